mod common;

use common::*;
use lintersect::bounds::{self, TheoremId};
use lintersect::ffpoly::{self, PowerPoly};
use lintersect::search::{self, SearchConfig, SearchProblem};
use lintersect::setfam::{self, check_l_intersecting, check_sizes, union_of_levels};
use lintersect::witness::{self, CertConfig, WitnessFamily};
use lintersect::{Domain, Mode, ResidueSet, SetFamily};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::Rng;

fn in_domain(domain: Domain, x: i64) -> BigInt {
    match domain {
        Domain::Integers => BigInt::from(x),
        Domain::Modular(p) => BigInt::from(x.rem_euclid(p.get() as i64)),
    }
}

proptest! {
    #[test]
    fn binomial_round_trip(
        p in prop::sample::select(vec![0u64, 2, 3, 5, 7, 11, 13]),
        coeffs in prop::collection::vec(-50i64..50, 0..8),
        extra in 0usize..3,
    ) {
        let domain = if p == 0 { Domain::Integers } else { Domain::Modular(prime(p)) };
        let poly = PowerPoly::from_i64(domain, &coeffs);
        let s = poly.degree().unwrap_or(0) + extra;
        prop_assume!(p == 0 || (s as u64) < p);
        let e = ffpoly::to_binomial_basis(&poly, s).unwrap();
        prop_assert_eq!(e.to_power_basis(), poly.clone());
        for t in 0..10u64 {
            prop_assert_eq!(e.eval_u64(t), poly.eval_u64(t));
        }
    }

    #[test]
    fn random_family_random_parameters_reports_agree(seed in any::<u64>()) {
        // Hypotheses need not hold: both forms of the bound are compared
        // on whatever report comes out.
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=7);
        let k = rs(&pick_any(&mut rng, 0, n as u64));
        let l = rs(&pick_any(&mut rng, 0, n as u64));
        let masks: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.2)).collect();
        let f = SetFamily::from_masks(n, masks).unwrap();
        let p = prime([2, 3, 5, 7][rng.gen_range(0..4)]);
        let mut reports = vec![
            bounds::check_multilevel(&f, &k, &l),
            bounds::check_modular_multilevel(&f, &k, &l, p),
        ];
        reports.extend(bounds::check_nonmodular_support(&f, &k, &l));
        reports.extend(bounds::check_coeff_sensitive(&f, &k, &l, p, true));
        for report in reports {
            prop_assert_eq!(report.holds(), report.shadow_form_holds(), "{:?}", report);
        }
    }
}

#[test]
fn shadow_monotone_and_level_identity() {
    let mut rng = rng(11);
    for _ in 0..300 {
        let n = rng.gen_range(0..=8);
        let masks: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.15)).collect();
        let f = SetFamily::from_masks(n, masks.clone()).unwrap();
        let sub =
            SetFamily::from_masks(n, masks.into_iter().filter(|_| rng.gen_bool(0.5))).unwrap();
        for t in 0..=n {
            let shadow = setfam::shadow(&f, t).unwrap();
            assert!(setfam::shadow(&sub, t).unwrap().is_subfamily_of(&shadow));
            let nonshadow = setfam::nonshadow_count(&f, t).unwrap();
            assert_eq!(shadow.len() as u128 + nonshadow, binom(n as u64, t as u64));
            // brute-force shadow
            let brute = (0..1u64 << n)
                .filter(|m| m.count_ones() as usize == t && f.iter().any(|a| m & !a.mask() == 0))
                .count();
            assert_eq!(shadow.len(), brute);
        }
    }
}

#[test]
fn shadow_of_full_levels_is_full() {
    for n in 0..=7 {
        for k in 0..=n {
            let f = union_of_levels(n, &[k]).unwrap();
            for t in 0..=k {
                assert_eq!(
                    setfam::shadow(&f, t).unwrap(),
                    union_of_levels(n, &[t]).unwrap()
                );
            }
        }
    }
}

#[test]
fn intersection_check_extremes() {
    let mut rng = rng(12);
    for _ in 0..200 {
        let n = rng.gen_range(1..=7);
        let masks: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.1)).collect();
        let f = SetFamily::from_masks(n, masks).unwrap();
        let everything = ResidueSet::initial_segment(n as u64 + 1);
        assert!(check_l_intersecting(&f, &everything, Mode::Exact).is_none());
        let empty = rs(&[]);
        assert_eq!(
            check_l_intersecting(&f, &empty, Mode::Exact).is_none(),
            f.len() <= 1
        );
    }
}

#[test]
fn text_round_trip() {
    let mut rng = rng(13);
    for _ in 0..200 {
        let n = rng.gen_range(0..=10);
        let masks: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.05)).collect();
        let f = SetFamily::from_masks(n, masks).unwrap();
        let text = f.to_text();
        let back = SetFamily::parse_text(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_text(), text);
    }
}

/// Random families that pass `theorem`'s hypotheses, with the report.
fn soundness_sweep(theorem: TheoremId, seed: u64) {
    let mut rng = rng(seed);
    let mut passing = 0;
    let mut attempts = 0;
    while passing < 1000 {
        attempts += 1;
        assert!(
            attempts < 50_000,
            "{theorem:?}: generator rarely meets hypotheses"
        );
        let n = rng.gen_range(1..=10);
        let (k, l, p) = match theorem {
            TheoremId::AbsClassic | TheoremId::MultilevelNonshadow => {
                let (k, l) = multilevel_params(&mut rng, n, 4);
                (k, l, None)
            }
            TheoremId::NonmodularSupport => {
                let k = pick_any(&mut rng, 0, n as u64);
                let l: Vec<u64> = (0..n as u64)
                    .filter(|x| !k.contains(x) && rng.gen_bool(0.4))
                    .collect();
                (rs(&k), rs(&l), None)
            }
            TheoremId::Consecutive => {
                let p = [3u64, 5, 7][rng.gen_range(0..3)];
                let s = rng.gen_range(2..p);
                let k = pick_any(&mut rng, s, p - 1);
                (rs(&k), ResidueSet::initial_segment(s), Some(prime(p)))
            }
            _ => {
                let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
                let (k, l) = modular_params(&mut rng, p);
                (k, l, Some(prime(p)))
            }
        };
        let mode = p.map_or(Mode::Exact, Mode::Modular);
        let f = family(&mut rng, n, &k, &l, mode);
        let report = bounds::check(theorem, &f, &k, &l, p).unwrap();
        if !report.hypotheses_ok {
            continue;
        }
        assert!(
            report.slack >= 0,
            "{theorem:?} n={n} K={k} L={l}: {report:?}"
        );
        passing += 1;
    }
}

#[test]
fn theorem_soundness_sweeps() {
    for (i, &theorem) in TheoremId::ALL.iter().enumerate() {
        soundness_sweep(theorem, 100 + i as u64);
    }
}

#[test]
fn almost_initial_dominates() {
    for p in [3u64, 5, 7] {
        for lmask in 1u64..(1 << p) - 1 {
            let l: Vec<u64> = (0..p).filter(|i| lmask >> i & 1 == 1).collect();
            let l = rs(&l);
            let s = l.len();
            let shape = ffpoly::is_almost_initial(&l, prime(p)).unwrap();
            let support = ffpoly::bsupp(&l, Domain::Modular(prime(p))).unwrap();
            let full: Vec<usize> = (s - shape.m..=s).collect();
            for n in s..=s + 3 {
                let f = SetFamily::empty(n).unwrap();
                let k = rs(&[]);
                let almost = bounds::check_almost_initial(&f, &k, &l, prime(p)).unwrap();
                let coeff = bounds::check_coeff_sensitive(&f, &k, &l, prime(p), false).unwrap();
                assert!(almost.rhs >= coeff.rhs);
                assert_eq!(
                    almost.rhs == coeff.rhs,
                    support == full,
                    "p={p} L={l} n={n}"
                );
            }
        }
    }
}

#[test]
fn consecutive_beats_abs() {
    for p in [3u64, 5, 7, 11] {
        for s in 2..p as usize {
            let l = ResidueSet::initial_segment(s as u64);
            for n in s..=s + 4 {
                let f = SetFamily::empty(n).unwrap();
                let coeff =
                    bounds::check_coeff_sensitive(&f, &rs(&[]), &l, prime(p), false).unwrap();
                assert_eq!(coeff.rhs, binom(n as u64, s as u64));
                for r in 2..=s {
                    assert!(coeff.rhs < bounds::abs_bound(n, s, r).unwrap());
                }
            }
        }
    }
}

#[test]
fn abs_bound_full_range() {
    for n in 1..=20 {
        for s in 1..=n {
            let want: u128 = (1..=s).map(|i| binom(n as u64, i as u64)).sum();
            assert_eq!(bounds::abs_bound(n, s, s).unwrap(), want);
        }
    }
}

fn valid_witness<R: Rng>(rng: &mut R) -> (SetFamily, ResidueSet, ResidueSet, Mode, WitnessFamily) {
    loop {
        let n = rng.gen_range(1..=6);
        let (k, l, mode) = if rng.gen_bool(0.5) {
            let (k, l) = multilevel_params(rng, n, n);
            (k, l, Mode::Exact)
        } else {
            let p = [3u64, 5, 7][rng.gen_range(0..3)];
            let (k, l) = modular_params(rng, p);
            (k, l, Mode::Modular(prime(p)))
        };
        let f = family(rng, n, &k, &l, mode);
        if let Ok(w) = witness::build_witness(&f, &k, &l, mode) {
            return (f, k, l, mode, w);
        }
    }
}

fn product_value(linear: &[(u64, i64)], point: u64) -> i64 {
    linear
        .iter()
        .map(|&(vars, shift)| (vars & point).count_ones() as i64 - shift)
        .product()
}

#[test]
fn witness_polynomials_evaluate_as_products() {
    let mut rng = rng(21);
    for _ in 0..100 {
        let (f, k, l, _, w) = valid_witness(&mut rng);
        let n = f.n();
        let all = (1u64 << n) - 1;
        let filter: Vec<(u64, i64)> = k.elements().iter().map(|&x| (all, x as i64)).collect();
        let small: Vec<u64> = (0..1u64 << n)
            .filter(|m| m.count_ones() as usize <= w.s.saturating_sub(w.r))
            .collect();
        let mut small = small;
        small.sort_by_key(|&m| (m.count_ones(), m));
        for point in 0..1u64 << n {
            for (a, poly) in f.iter().zip(&w.triangular) {
                let factors: Vec<(u64, i64)> = l
                    .elements()
                    .iter()
                    .filter(|&&x| (x as usize) < a.len())
                    .map(|&x| (a.mask(), x as i64))
                    .collect();
                assert_eq!(
                    poly.eval(point),
                    in_domain(w.domain, product_value(&factors, point))
                );
            }
            if w.r <= w.s {
                for (&i, poly) in small.iter().zip(&w.filter) {
                    let v = if i & !point == 0 {
                        product_value(&filter, point)
                    } else {
                        0
                    };
                    assert_eq!(poly.eval(point), in_domain(w.domain, v));
                }
            }
        }
    }
}

#[test]
fn triangular_block_is_triangular() {
    let mut rng = rng(22);
    for _ in 0..200 {
        let (f, _, _, _, w) = valid_witness(&mut rng);
        for (i, poly) in w.triangular.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                let v = poly.eval(b.mask());
                if j < i {
                    assert!(v.is_zero(), "f_{i}(A_{j}) != 0");
                }
                if j == i {
                    assert!(!v.is_zero(), "f_{i}(A_{i}) == 0");
                }
            }
        }
    }
}

#[test]
fn adjoined_block_is_independent() {
    let mut rng = rng(23);
    for _ in 0..100 {
        let (_, _, _, _, w) = valid_witness(&mut rng);
        let adjoined = WitnessFamily {
            triangular: Vec::new(),
            ..w.clone()
        };
        let cert = witness::verify_independence(&adjoined, CertConfig::default()).unwrap();
        assert!(cert.independent);
        let full = witness::verify_independence(&w, CertConfig::default()).unwrap();
        assert_eq!(full.rank, w.len());
        assert!(w.len() as u128 <= w.ambient_dimension());
        assert_eq!(witness::verify_by_evaluation(&w).unwrap().rank, full.rank);
    }
}

#[test]
fn gram_valid_iff_hypotheses() {
    for p in [2u64, 3, 5] {
        for lmask in 0u64..(1 << p) - 1 {
            let l: Vec<u64> = (0..p).filter(|i| lmask >> i & 1 == 1).collect();
            let k: Vec<u64> = (0..p).filter(|i| lmask >> i & 1 == 0).collect();
            let (k, l) = (rs(&k), rs(&l));
            let mode = Mode::Modular(prime(p));
            for n in 0..=3 {
                for fam in 0u64..1 << (1 << n) {
                    let f = SetFamily::from_masks(n, (0..1u64 << n).filter(|m| fam >> m & 1 == 1))
                        .unwrap();
                    let g = witness::gram_witness(&f, &l, prime(p)).unwrap();
                    let ok = check_sizes(&f, &k, mode).is_none()
                        && check_l_intersecting(&f, &l, mode).is_none();
                    assert_eq!(g.valid, ok, "p={p} L={l} {}", f.to_text());
                }
            }
        }
    }
}

#[test]
fn incidence_vectors_independent_for_valid_families() {
    let mut rng = rng(24);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let p = [3u64, 5, 7][rng.gen_range(0..3)];
        let (k, l) = modular_params(&mut rng, p);
        let f = family(&mut rng, n, &k, &l, Mode::Modular(prime(p)));
        let cert = witness::incidence_independence(
            &f,
            &l,
            Domain::Modular(prime(p)),
            true,
            CertConfig::default(),
        )
        .unwrap();
        assert!(cert.independent, "p={p} K={k} L={l} {}", f.to_text());
    }
}

fn small_problems<R: Rng>(rng: &mut R, count: usize) -> Vec<SearchProblem> {
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=7);
            if rng.gen_bool(0.5) {
                let (k, l) = multilevel_params(rng, n, 3);
                SearchProblem::exact(n, k, l)
            } else {
                let p = [2u64, 3, 5][rng.gen_range(0..3)];
                let (k, l) = modular_params(rng, p);
                SearchProblem::modular(n, prime(p), k, l)
            }
        })
        .collect()
}

#[test]
fn search_sound_deterministic_and_bounded() {
    let mut rng = rng(31);
    let config = |threads, prune| SearchConfig {
        threads: Some(threads),
        theorem_prune: prune,
        time_budget: None,
        ..SearchConfig::default()
    };
    for problem in small_problems(&mut rng, 120) {
        let one = match search::max_family(&problem, &config(1, false)) {
            Ok(r) => r,
            Err(lintersect::Error::SearchCapExceeded { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        assert!(check_sizes(&one.witness, &problem.k, problem.mode).is_none());
        assert!(check_l_intersecting(&one.witness, &problem.l, problem.mode).is_none());
        for other in [config(4, false), config(3, true)] {
            let r = search::max_family(&problem, &other).unwrap();
            assert_eq!(
                (r.max_size, &r.witness),
                (one.max_size, &one.witness),
                "{problem:?}"
            );
        }
        for (theorem, rhs) in search::applicable_bounds(&problem) {
            assert!(
                one.max_size as u128 <= rhs,
                "{theorem:?}: {} > {rhs}",
                one.max_size
            );
        }
        if problem.mode == Mode::Exact {
            let empty = SetFamily::empty(problem.n).unwrap();
            let r = bounds::check_nonmodular_support(&empty, &problem.k, &problem.l).unwrap();
            if r.hypotheses_ok {
                assert!(one.max_size as u128 <= r.rhs);
            }
        }
    }
}

#[test]
fn search_sweeps() {
    let config = SearchConfig::default();
    let rows = search::sharpness_sweep(5, 3, &config).unwrap();
    assert!(rows
        .iter()
        .all(|r| r.attained as u128 == r.bound && r.union_witness && r.proof_of_optimality));
    let rows = search::unattainability_sweep(prime(7), 7, &config).unwrap();
    for row in &rows {
        assert!(row.max_size as u128 <= row.level_bound && row.level_bound < row.abs_bound);
    }
    let row = rows
        .iter()
        .find(|r| r.n == 6 && r.s == 3 && r.k == vec![3, 5])
        .unwrap();
    assert_eq!(row.level_bound.to_u64(), Some(20));
    assert_eq!(row.abs_bound, 35);
}
