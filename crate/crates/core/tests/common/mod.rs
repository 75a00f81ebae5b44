//! Parameter generators and brute-force oracles shared by the integration
//! tests. Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use lintersect::random::{random_admissible_family, seeded};
use lintersect::{Mode, PrimeModulus, ResidueSet, SetFamily};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rs(xs: &[u64]) -> ResidueSet {
    ResidueSet::new(xs.iter().copied()).unwrap()
}

pub fn prime(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded(seed)
}

/// `size` distinct values drawn from `lo..=hi`.
pub fn pick<R: Rng>(rng: &mut R, lo: u64, hi: u64, size: usize) -> Vec<u64> {
    let pool: Vec<u64> = (lo..=hi).collect();
    pool.choose_multiple(rng, size).copied().collect()
}

/// Random nonempty subset of `lo..=hi`.
pub fn pick_any<R: Rng>(rng: &mut R, lo: u64, hi: u64) -> Vec<u64> {
    let span = (hi - lo + 1) as usize;
    let size = rng.gen_range(1..=span);
    pick(rng, lo, hi, size)
}

/// `(K, L)` with `|L| = s <= n`, `|K| = r <= s` and every `k > s - r`:
/// the exact multilevel hypotheses on the parameters.
pub fn multilevel_params<R: Rng>(rng: &mut R, n: usize, s_max: usize) -> (ResidueSet, ResidueSet) {
    let s = rng.gen_range(1..=n.min(s_max));
    let l = pick(rng, 0, n as u64 - 1, s);
    let r = rng.gen_range(1..=s);
    let k = pick(rng, (s - r + 1) as u64, n as u64, r);
    (rs(&k), rs(&l))
}

/// `(K, L)` with `L` a proper nonempty subset of `F_p` and `K` a nonempty
/// subset of its complement.
pub fn modular_params<R: Rng>(rng: &mut R, p: u64) -> (ResidueSet, ResidueSet) {
    let s = rng.gen_range(1..p as usize);
    let l = pick(rng, 0, p - 1, s);
    let rest: Vec<u64> = (0..p).filter(|x| !l.contains(x)).collect();
    let r = rng.gen_range(1..=rest.len());
    let k: Vec<u64> = rest.choose_multiple(rng, r).copied().collect();
    (rs(&k), rs(&l))
}

pub fn family<R: Rng>(
    rng: &mut R,
    n: usize,
    k: &ResidueSet,
    l: &ResidueSet,
    mode: Mode,
) -> SetFamily {
    random_admissible_family(n, k, l, mode, rng).unwrap()
}

pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn admits(mode: Mode, set: &ResidueSet, x: usize) -> bool {
    match mode {
        Mode::Exact => set.elements().contains(&(x as u64)),
        Mode::Modular(p) => set.elements().contains(&(x as u64 % p.get())),
    }
}

/// Maximum admissible family by enumerating every subfamily of the
/// admissible sets. Returns the size and the lexicographically least
/// maximum family as masks, with candidates in `(popcount, mask)` order.
pub fn brute_force_max(n: usize, k: &ResidueSet, l: &ResidueSet, mode: Mode) -> (usize, Vec<u64>) {
    let mut verts: Vec<u64> = (0u64..1 << n)
        .filter(|m| admits(mode, k, m.count_ones() as usize))
        .collect();
    verts.sort_by_key(|&m| (m.count_ones(), m));
    let v = verts.len();
    assert!(v <= 24, "oracle limited to small vertex sets");
    let adj: Vec<u32> = (0..v)
        .map(|i| {
            (0..v)
                .filter(|&j| j != i && admits(mode, l, (verts[i] & verts[j]).count_ones() as usize))
                .fold(0u32, |acc, j| acc | 1 << j)
        })
        .collect();
    // clique[S] for every S, built from S minus its lowest element.
    let mut clique = vec![false; 1 << v];
    clique[0] = true;
    let mut best: u32 = 0;
    for s in 1u32..(1 << v) {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let ok = clique[rest as usize] && adj[low] & rest == rest;
        clique[s as usize] = ok;
        if !ok {
            continue;
        }
        let better = s.count_ones() > best.count_ones()
            || (s.count_ones() == best.count_ones() && {
                let diff = s ^ best;
                s & (diff & diff.wrapping_neg()) != 0
            });
        if better {
            best = s;
        }
    }
    let members = (0..v)
        .filter(|&i| best >> i & 1 == 1)
        .map(|i| verts[i])
        .collect();
    (best.count_ones() as usize, members)
}
