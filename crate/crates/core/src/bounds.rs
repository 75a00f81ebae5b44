//! Evaluates each bound on a concrete family and reports every quantity
//! involved: hypothesis checks, both sides of the inequality, the slack and
//! the per-level shadow statistics.
//!
//! A failed hypothesis never aborts the evaluation. The report is still
//! computed and flagged with `hypotheses_ok = false`; only then may the
//! slack be negative.

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ffpoly::{self, Domain, PrimeModulus, ResidueSet};
use crate::setfam::{
    self, binomial, level_stats, LevelStats, Mode, PairViolation, SetFamily, Subset,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremId {
    AbsClassic,
    MultilevelNonshadow,
    ModularMultilevel,
    CoeffSensitive,
    CoeffSensitiveNonshadow,
    AlmostInitial,
    Consecutive,
    NonmodularSupport,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::AbsClassic,
        TheoremId::MultilevelNonshadow,
        TheoremId::ModularMultilevel,
        TheoremId::CoeffSensitive,
        TheoremId::CoeffSensitiveNonshadow,
        TheoremId::AlmostInitial,
        TheoremId::Consecutive,
        TheoremId::NonmodularSupport,
    ];

    /// Whether `lhs` folds in the non-shadow counts of the inspected levels
    /// and `rhs` is the sum of `binom(n, j)` over exactly those levels, so
    /// that `lhs <= rhs` is equivalent to `|F| <= sum |∂_j F|`.
    pub fn is_nonshadow_form(self) -> bool {
        matches!(
            self,
            TheoremId::MultilevelNonshadow
                | TheoremId::ModularMultilevel
                | TheoremId::CoeffSensitiveNonshadow
                | TheoremId::NonmodularSupport
        )
    }
}

/// One hypothesis of one theorem, named so reports can say which failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// Every member size lies in `K` (or `K + pZ`).
    SizesInK,
    /// Every pairwise intersection lies in `L` (or `L + pZ`).
    LIntersecting,
    /// `1 <= r <= s`.
    RAtMostS,
    /// `k > s - r` for every `k` in `K`.
    SizesAboveSMinusR,
    KLDisjoint,
    /// `K` and `L` are residues, i.e. lie in `[0, p)`.
    ResiduesInRange,
    /// `1 <= s <= p - 1`.
    SInFieldRange,
    /// `L = {0, ..., s-1}`.
    ConsecutiveL,
    /// `s >= 2`.
    SAtLeastTwo,
}

fn serialize_bigints<S: Serializer>(
    v: &Option<Vec<BigInt>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(v) => s.collect_seq(v.iter().map(ffpoly::JsonInt)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub mode: Mode,
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub hypotheses_ok: bool,
    pub violated: Vec<Hypothesis>,
    pub family_size: u128,
    pub lhs: u128,
    pub rhs: u128,
    pub slack: i128,
    /// `sum |∂_j F|` over the inspected levels.
    pub shadow_sum: u128,
    pub levels: Vec<LevelStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bsupp: Option<Vec<usize>>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_bigints"
    )]
    pub coefficients: Option<Vec<BigInt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub almost_initial_m: Option<usize>,
    /// `N(n, s, r)`, attached where the report compares against it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_bound: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_violation: Option<PairViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_violation: Option<Subset>,
}

impl BoundReport {
    /// `lhs <= rhs`.
    pub fn holds(&self) -> bool {
        self.slack >= 0
    }

    /// `|F| <= sum_j |∂_j F|` over the inspected levels.
    pub fn shadow_form_holds(&self) -> bool {
        self.family_size <= self.shadow_sum
    }

    pub fn nonshadow_sum(&self) -> u128 {
        self.levels.iter().map(|l| l.nonshadow_count).sum()
    }
}

/// `N(n, s, r) = binom(n, s) + ... + binom(n, s - r + 1)`.
pub fn abs_bound(n: usize, s: usize, r: usize) -> Result<u128> {
    if !(1 <= r && r <= s && s <= n) {
        return Err(Error::ParamOutOfRange(format!(
            "need 1 <= r <= s <= n, got n={n} s={s} r={r}"
        )));
    }
    Ok(level_sum(n, top_levels(s, r)))
}

/// Levels `s - r + 1 ..= s`, clipped at zero; empty when `r = 0`.
fn top_levels(s: usize, r: usize) -> Vec<usize> {
    ((s + 1).saturating_sub(r)..=s).collect()
}

fn level_sum(n: usize, levels: impl IntoIterator<Item = usize>) -> u128 {
    levels.into_iter().map(|j| binomial(n, j)).sum()
}

/// `N(n, s, r) - binom(n, s)`, the amount by which the consecutive-residue
/// bound undercuts the ABS bound.
pub fn unattainability_margin(n: usize, s: usize, r: usize, p: PrimeModulus) -> Result<u128> {
    if !(2 <= r && r <= s && (s as u64) < p.get() && n >= s) {
        return Err(Error::ParamOutOfRange(format!(
            "need 2 <= r <= s <= p-1 and n >= s, got n={n} s={s} r={r} p={p}"
        )));
    }
    Ok(abs_bound(n, s, r)? - binomial(n, s))
}

/// Shared hypothesis bookkeeping for one family.
struct Checks<'a> {
    family: &'a SetFamily,
    k: &'a ResidueSet,
    l: &'a ResidueSet,
    mode: Mode,
    violated: Vec<Hypothesis>,
    pair_violation: Option<PairViolation>,
    size_violation: Option<Subset>,
}

impl<'a> Checks<'a> {
    fn new(family: &'a SetFamily, k: &'a ResidueSet, l: &'a ResidueSet, mode: Mode) -> Self {
        let mut checks = Checks {
            family,
            k,
            l,
            mode,
            violated: Vec::new(),
            pair_violation: None,
            size_violation: None,
        };
        checks.size_violation = setfam::check_sizes(family, k, mode);
        if checks.size_violation.is_some() {
            checks.violated.push(Hypothesis::SizesInK);
        }
        checks.pair_violation = setfam::check_l_intersecting(family, l, mode);
        if checks.pair_violation.is_some() {
            checks.violated.push(Hypothesis::LIntersecting);
        }
        if let Mode::Modular(p) = mode {
            let in_range = |x: &u64| *x < p.get();
            if !(k.elements().iter().all(in_range) && l.elements().iter().all(in_range)) {
                checks.violated.push(Hypothesis::ResiduesInRange);
            }
        }
        checks
    }

    fn s(&self) -> usize {
        self.l.len()
    }

    fn r(&self) -> usize {
        self.k.len()
    }

    fn require(&mut self, ok: bool, h: Hypothesis) {
        if !ok {
            self.violated.push(h);
        }
    }

    fn require_low_level_exclusion(&mut self) {
        let (s, r) = (self.s(), self.r());
        self.require(1 <= r && r <= s, Hypothesis::RAtMostS);
        let floor = s as i128 - r as i128;
        let ok = self.k.elements().iter().all(|&k| k as i128 > floor);
        self.require(ok, Hypothesis::SizesAboveSMinusR);
    }

    fn require_disjoint(&mut self) {
        let ok = self.k.is_disjoint(self.l);
        self.require(ok, Hypothesis::KLDisjoint);
    }

    fn require_field_range(&mut self) {
        let p = self.mode.modulus().expect("modular checks").get();
        let s = self.s() as u64;
        self.require(1 <= s && s < p, Hypothesis::SInFieldRange);
    }

    fn report(
        mut self,
        theorem: TheoremId,
        levels: &[usize],
        with_nonshadows: bool,
        rhs: u128,
    ) -> BoundReport {
        self.violated.sort();
        self.violated.dedup();
        let stats: Vec<LevelStats> = levels
            .iter()
            .map(|&j| level_stats(self.family, j))
            .collect();
        let family_size = self.family.len() as u128;
        let nonshadows: u128 = stats.iter().map(|l| l.nonshadow_count).sum();
        let lhs = if with_nonshadows {
            family_size + nonshadows
        } else {
            family_size
        };
        BoundReport {
            theorem,
            mode: self.mode,
            n: self.family.n(),
            s: self.s(),
            r: self.r(),
            hypotheses_ok: self.violated.is_empty(),
            violated: self.violated,
            family_size,
            lhs,
            rhs,
            slack: rhs as i128 - lhs as i128,
            shadow_sum: stats.iter().map(|l| l.shadow_count).sum(),
            levels: stats,
            bsupp: None,
            coefficients: None,
            almost_initial_m: None,
            abs_bound: None,
            pair_violation: self.pair_violation,
            size_violation: self.size_violation,
        }
    }
}

/// `|F| <= N(n, s, r)`.
pub fn check_abs_classic(family: &SetFamily, k: &ResidueSet, l: &ResidueSet) -> BoundReport {
    let mut c = Checks::new(family, k, l, Mode::Exact);
    c.require_low_level_exclusion();
    let levels = top_levels(c.s(), c.r());
    let rhs = level_sum(family.n(), levels.iter().copied());
    c.report(TheoremId::AbsClassic, &levels, false, rhs)
}

/// `|F| + sum_{j = s-r+1}^{s} |N_j(F)| <= N(n, s, r)`.
pub fn check_multilevel(family: &SetFamily, k: &ResidueSet, l: &ResidueSet) -> BoundReport {
    let mut c = Checks::new(family, k, l, Mode::Exact);
    c.require_low_level_exclusion();
    let levels = top_levels(c.s(), c.r());
    let rhs = level_sum(family.n(), levels.iter().copied());
    c.report(TheoremId::MultilevelNonshadow, &levels, true, rhs)
}

/// The modular variant of [`check_multilevel`]: `K, L ⊆ F_p` disjoint,
/// `k > s - r >= 0`, sizes and intersections taken mod `p`.
pub fn check_modular_multilevel(
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
    p: PrimeModulus,
) -> BoundReport {
    let mut c = Checks::new(family, k, l, Mode::Modular(p));
    c.require_disjoint();
    c.require_low_level_exclusion();
    let levels = top_levels(c.s(), c.r());
    let rhs = level_sum(family.n(), levels.iter().copied());
    c.report(TheoremId::ModularMultilevel, &levels, true, rhs)
}

fn modular_expansion(l: &ResidueSet, p: PrimeModulus) -> Result<ffpoly::BinomialExpansion> {
    ffpoly::annihilator_expansion(l, Domain::Modular(p)).map_err(|e| match e {
        Error::DegreeExceedsModulus { size, modulus } => Error::BasisDegenerate {
            degree: size,
            modulus,
        },
        other => other,
    })
}

fn coeff_checks<'a>(
    family: &'a SetFamily,
    k: &'a ResidueSet,
    l: &'a ResidueSet,
    p: PrimeModulus,
) -> Checks<'a> {
    let mut c = Checks::new(family, k, l, Mode::Modular(p));
    c.require_field_range();
    c.require_disjoint();
    c
}

/// `|F| <= sum_{j in bsupp(L)} binom(n, j)`, or with `with_nonshadows` the
/// refinement `|F| + sum_{j in bsupp(L)} |N_j(F)| <= sum_{j in bsupp(L)} binom(n, j)`.
///
/// Fails with `BasisDegenerate` when `|L| >= p` and with `ResidueOutOfRange`
/// when `L` is not a set of residues, since `bsupp(L)` is then undefined.
pub fn check_coeff_sensitive(
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
    p: PrimeModulus,
    with_nonshadows: bool,
) -> Result<BoundReport> {
    let expansion = modular_expansion(l, p)?;
    let support = expansion.support();
    let c = coeff_checks(family, k, l, p);
    let rhs = level_sum(family.n(), support.iter().copied());
    let theorem = if with_nonshadows {
        TheoremId::CoeffSensitiveNonshadow
    } else {
        TheoremId::CoeffSensitive
    };
    let mut report = c.report(theorem, &support, with_nonshadows, rhs);
    report.bsupp = Some(support);
    report.coefficients = Some(expansion.coeffs().to_vec());
    Ok(report)
}

/// `|F| + sum_{j in bsupp(L)} |N_j(F)| <= sum_{i=0}^{m} binom(n, s - i)`
/// for `L = {0, ..., s-m-1} ∪ R`, with the smallest such `m`.
pub fn check_almost_initial(
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
    p: PrimeModulus,
) -> Result<BoundReport> {
    let shape = ffpoly::is_almost_initial(l, p).ok_or(Error::NotAlmostInitial)?;
    let expansion = modular_expansion(l, p)?;
    let support = expansion.support();
    let c = coeff_checks(family, k, l, p);
    let s = c.s();
    let rhs = level_sum(family.n(), (s - shape.m)..=s);
    let mut report = c.report(TheoremId::AlmostInitial, &support, true, rhs);
    report.bsupp = Some(support);
    report.coefficients = Some(expansion.coeffs().to_vec());
    report.almost_initial_m = Some(shape.m);
    Ok(report)
}

/// `|F| <= binom(n, s)` for `L = {0, ..., s-1}` mod `p`. When `2 <= r <= s`
/// and `n >= s` the report also carries `N(n, s, r)` for comparison.
pub fn check_consecutive(
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
    p: PrimeModulus,
) -> Result<BoundReport> {
    let expansion = modular_expansion(l, p)?;
    let support = expansion.support();
    let mut c = coeff_checks(family, k, l, p);
    let s = c.s();
    let r = c.r();
    let consecutive = *l == ResidueSet::initial_segment(s as u64);
    c.require(consecutive, Hypothesis::ConsecutiveL);
    c.require(s >= 2, Hypothesis::SAtLeastTwo);
    let n = family.n();
    let mut report = c.report(TheoremId::Consecutive, &[s], false, binomial(n, s));
    report.bsupp = Some(support);
    report.coefficients = Some(expansion.coeffs().to_vec());
    if 2 <= r && r <= s && n >= s {
        report.abs_bound = abs_bound(n, s, r).ok();
    }
    Ok(report)
}

/// Integer-coefficient analogue: for `K ∩ L = ∅`, an exactly-`K`-sized,
/// exactly-`L`-intersecting family obeys
/// `|F| + sum_{j in bsupp(L)} |N_j(F)| <= sum_{j in bsupp(L)} binom(n, j)`
/// with `bsupp` taken over the integers.
pub fn check_nonmodular_support(
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
) -> Result<BoundReport> {
    let expansion = ffpoly::annihilator_expansion(l, Domain::Integers)?;
    let support = expansion.support();
    let mut c = Checks::new(family, k, l, Mode::Exact);
    c.require_disjoint();
    let rhs = level_sum(family.n(), support.iter().copied());
    let mut report = c.report(TheoremId::NonmodularSupport, &support, true, rhs);
    report.bsupp = Some(support);
    report.coefficients = Some(expansion.coeffs().to_vec());
    Ok(report)
}

/// Dispatches to the check for `theorem`. Exact theorems ignore `p`;
/// modular ones require it.
pub fn check(
    theorem: TheoremId,
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
    p: Option<PrimeModulus>,
) -> Result<BoundReport> {
    let need_p =
        || p.ok_or_else(|| Error::ParamOutOfRange(format!("{theorem:?} needs a prime modulus")));
    match theorem {
        TheoremId::AbsClassic => Ok(check_abs_classic(family, k, l)),
        TheoremId::MultilevelNonshadow => Ok(check_multilevel(family, k, l)),
        TheoremId::ModularMultilevel => Ok(check_modular_multilevel(family, k, l, need_p()?)),
        TheoremId::CoeffSensitive => check_coeff_sensitive(family, k, l, need_p()?, false),
        TheoremId::CoeffSensitiveNonshadow => check_coeff_sensitive(family, k, l, need_p()?, true),
        TheoremId::AlmostInitial => check_almost_initial(family, k, l, need_p()?),
        TheoremId::Consecutive => check_consecutive(family, k, l, need_p()?),
        TheoremId::NonmodularSupport => check_nonmodular_support(family, k, l),
    }
}
