//! Seeded generators for admissible families. All randomness flows from an
//! explicit `u64` seed through ChaCha8.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ffpoly::ResidueSet;
use crate::setfam::{level_masks, Mode, SetFamily, Subset};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every subset of `[n]` whose size satisfies the `K` condition.
pub fn admissible_masks(n: usize, k: &ResidueSet, mode: Mode) -> Vec<u64> {
    (0..=n)
        .filter(|&size| mode.admits(k, size))
        .flat_map(|size| level_masks(n, size))
        .collect()
}

/// A random `K`-sized, `L`-intersecting family: admissible sets are visited
/// in random order and kept whenever compatible with everything kept so
/// far, until a random target size is reached.
pub fn random_admissible_family<R: Rng>(
    n: usize,
    k: &ResidueSet,
    l: &ResidueSet,
    mode: Mode,
    rng: &mut R,
) -> Result<SetFamily> {
    let mut pool = admissible_masks(n, k, mode);
    pool.shuffle(rng);
    let target = rng.gen_range(0..=pool.len());
    let mut kept: Vec<u64> = Vec::new();
    for m in pool {
        if kept.len() >= target {
            break;
        }
        let compatible = kept
            .iter()
            .all(|&other| mode.admits(l, (m & other).count_ones() as usize));
        if compatible {
            kept.push(m);
        }
    }
    SetFamily::from_masks(n, kept)
}

/// A uniformly random subset of `[n]`.
pub fn random_subset<R: Rng>(n: usize, rng: &mut R) -> Subset {
    let mask = if n == 0 {
        0
    } else {
        rng.gen::<u64>() >> (64 - n)
    };
    Subset::from_mask(n, mask).expect("mask within ground set")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::PrimeModulus;
    use crate::setfam::{check_l_intersecting, check_sizes};

    #[test]
    fn generated_families_are_admissible() {
        let k = ResidueSet::new([2, 4]).unwrap();
        let l = ResidueSet::new([0, 1]).unwrap();
        let p = Mode::Modular(PrimeModulus::new(5).unwrap());
        let mut rng = seeded(7);
        for _ in 0..50 {
            for mode in [Mode::Exact, p] {
                let f = random_admissible_family(6, &k, &l, mode, &mut rng).unwrap();
                assert!(check_sizes(&f, &k, mode).is_none());
                assert!(check_l_intersecting(&f, &l, mode).is_none());
            }
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let k = ResidueSet::new([3]).unwrap();
        let l = ResidueSet::new([1]).unwrap();
        let a = random_admissible_family(7, &k, &l, Mode::Exact, &mut seeded(42)).unwrap();
        let b = random_admissible_family(7, &k, &l, Mode::Exact, &mut seeded(42)).unwrap();
        assert_eq!(a, b);
    }
}
