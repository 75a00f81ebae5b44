//! Exact rank by elimination. Both routines return the same thing: the rank
//! and a count of row updates performed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::ffpoly::inv_mod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RankOutcome {
    pub rank: usize,
    pub row_ops: u64,
}

/// Below this many entries the update loop stays on one thread.
const PARALLEL_ENTRIES: usize = 1 << 14;

/// Gaussian elimination over `F_p`. Entries must already be reduced.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> RankOutcome {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut row_ops = 0u64;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], p);
        for x in rows[rank][col..].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let eliminate = |row: &mut Vec<u64>| -> u64 {
            let factor = row[col];
            if factor == 0 {
                return 0;
            }
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                let sub = factor as u128 * y as u128 % p as u128;
                *x = ((*x as u128 + p as u128 - sub) % p as u128) as u64;
            }
            1
        };
        row_ops += if rest.len() * (ncols - col) >= PARALLEL_ENTRIES {
            rest.par_iter_mut().map(eliminate).sum::<u64>()
        } else {
            rest.iter_mut().map(eliminate).sum::<u64>()
        };
        rank += 1;
    }
    RankOutcome { rank, row_ops }
}

/// Fraction-free (Bareiss) elimination over the integers. Every division by
/// the previous pivot is exact, so no rationals ever appear.
pub fn rank_bareiss(mut rows: Vec<Vec<BigInt>>) -> RankOutcome {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut row_ops = 0u64;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let lead = &pivot_row[col];
        let prev_ref = &prev;
        let eliminate = |row: &mut Vec<BigInt>| -> u64 {
            let factor = std::mem::take(&mut row[col]);
            for j in col + 1..ncols {
                let num = lead * &row[j] - &factor * &pivot_row[j];
                let (q, r) = num.div_rem(prev_ref);
                debug_assert!(r.is_zero(), "inexact Bareiss division");
                row[j] = q;
            }
            u64::from(!factor.is_zero())
        };
        row_ops += if rest.len() * (ncols - col) >= PARALLEL_ENTRIES / 16 {
            rest.par_iter_mut().map(eliminate).sum::<u64>()
        } else {
            rest.iter_mut().map(eliminate).sum::<u64>()
        };
        prev = lead.clone();
        rank += 1;
    }
    RankOutcome { rank, row_ops }
}
