//! The linear-independence arguments behind the bounds, made concrete.
//!
//! [`build_witness`] assembles the polynomial family
//! `{f_i} ∪ {x_I g : |I| <= s-r} ∪ {x_J : J a top-level non-shadow}`
//! and [`verify_independence`] certifies it by exact rank over the
//! monomials of degree at most `s`. [`gram_witness`] and
//! [`incidence_independence`] do the same for the incidence-vector
//! argument used by the binomial-support bounds.

mod multilinear;
pub mod rank;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

pub use multilinear::MultilinearPoly;

use crate::bounds;
use crate::error::{Error, Result};
use crate::ffpoly::{self, Domain, PrimeModulus, ResidueSet};
use crate::setfam::{self, binomial, level_masks, Mode, SetFamily, Subset};

/// Column budget for certificate matrices.
pub const DEFAULT_MATRIX_CAP: u128 = 200_000;

/// `f_i = prod_{l in L, l < |A_i|} (v_{A_i} . x - l)` for each member `A_i`,
/// in the family's canonical (size-sorted) order.
pub fn triangular_polys(
    family: &SetFamily,
    l: &ResidueSet,
    domain: Domain,
) -> Result<Vec<MultilinearPoly>> {
    l.validate(domain).map_err(|_| Error::DomainMismatch)?;
    let n = family.n();
    Ok(family
        .iter()
        .map(|a| {
            l.elements()
                .iter()
                .filter(|&&x| (x as usize) < a.len())
                .fold(MultilinearPoly::constant(n, domain, 1.into()), |acc, &x| {
                    acc.mul(&MultilinearPoly::linear_form(
                        n,
                        domain,
                        a.mask(),
                        &x.into(),
                    ))
                })
        })
        .collect())
}

/// `g = prod_{k in K} (x_1 + ... + x_n - k)`.
pub fn filter_poly(k: &ResidueSet, n: usize, domain: Domain) -> MultilinearPoly {
    let all = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    k.elements()
        .iter()
        .fold(MultilinearPoly::constant(n, domain, 1.into()), |acc, &x| {
            acc.mul(&MultilinearPoly::linear_form(n, domain, all, &x.into()))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockSizes {
    pub triangular: usize,
    pub filter: usize,
    pub nonshadow: usize,
}

impl BlockSizes {
    pub fn total(&self) -> usize {
        self.triangular + self.filter + self.nonshadow
    }
}

/// The polynomial family of the multilevel argument, in block order.
#[derive(Debug, Clone)]
pub struct WitnessFamily {
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub domain: Domain,
    pub triangular: Vec<MultilinearPoly>,
    pub filter: Vec<MultilinearPoly>,
    pub nonshadow: Vec<MultilinearPoly>,
}

impl WitnessFamily {
    pub fn block_sizes(&self) -> BlockSizes {
        BlockSizes {
            triangular: self.triangular.len(),
            filter: self.filter.len(),
            nonshadow: self.nonshadow.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.block_sizes().total()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn polys(&self) -> impl Iterator<Item = &MultilinearPoly> {
        self.triangular
            .iter()
            .chain(&self.filter)
            .chain(&self.nonshadow)
    }

    pub fn max_degree(&self) -> usize {
        self.polys().map(MultilinearPoly::degree).max().unwrap_or(0)
    }

    /// `sum_{i <= s} binom(n, i)`, the dimension of the space the family
    /// lives in.
    pub fn ambient_dimension(&self) -> u128 {
        (0..=self.s).map(|i| binomial(self.n, i)).sum()
    }
}

fn witness_report(
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
    mode: Mode,
) -> bounds::BoundReport {
    match mode {
        Mode::Exact => bounds::check_multilevel(family, k, l),
        Mode::Modular(p) => bounds::check_modular_multilevel(family, k, l, p),
    }
}

/// Builds the witness family after checking the multilevel hypotheses
/// (exact or modular, per `mode`).
pub fn build_witness(
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
    mode: Mode,
) -> Result<WitnessFamily> {
    let report = witness_report(family, k, l, mode);
    if !report.hypotheses_ok {
        return Err(Error::HypothesisViolated(report.violated));
    }
    build_witness_unchecked(family, k, l, mode)
}

/// Builds the witness family without checking hypotheses, so that
/// near-misses can be certified (and may turn out dependent).
pub fn build_witness_unchecked(
    family: &SetFamily,
    k: &ResidueSet,
    l: &ResidueSet,
    mode: Mode,
) -> Result<WitnessFamily> {
    let domain = Domain::from(mode);
    let n = family.n();
    let (s, r) = (l.len(), k.len());
    k.validate(domain).map_err(|_| Error::DomainMismatch)?;
    let triangular = triangular_polys(family, l, domain)?;

    let g = filter_poly(k, n, domain);
    let filter = if r <= s {
        (0..=(s - r).min(n))
            .flat_map(|i| level_masks(n, i))
            .map(|m| MultilinearPoly::monomial(n, domain, m).mul(&g))
            .collect()
    } else {
        Vec::new()
    };

    let mut nonshadow = Vec::new();
    for j in (s + 1).saturating_sub(r)..=s.min(n) {
        for t in setfam::nonshadow(family, j)?.iter() {
            nonshadow.push(MultilinearPoly::monomial(n, domain, t.mask()));
        }
    }

    Ok(WitnessFamily {
        n,
        s,
        r,
        domain,
        triangular,
        filter,
        nonshadow,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WorkCounters {
    pub row_ops: u64,
    pub entries: u128,
}

/// Exact rank verdict for a list of vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub independent: bool,
    pub domain: Domain,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlockSizes>,
    pub work: WorkCounters,
    /// Row-major matrix that was eliminated, when requested.
    #[serde(skip)]
    pub matrix: Option<Vec<Vec<BigInt>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertConfig {
    pub matrix_cap: u128,
    pub keep_matrix: bool,
}

impl Default for CertConfig {
    fn default() -> Self {
        CertConfig {
            matrix_cap: DEFAULT_MATRIX_CAP,
            keep_matrix: false,
        }
    }
}

fn certify(
    matrix: Vec<Vec<BigInt>>,
    cols: usize,
    domain: Domain,
    blocks: Option<BlockSizes>,
    config: CertConfig,
) -> Certificate {
    let rows = matrix.len();
    let kept = config.keep_matrix.then(|| matrix.clone());
    let outcome = match domain {
        Domain::Integers => rank::rank_bareiss(matrix),
        Domain::Modular(p) => rank::rank_mod_p(
            matrix
                .into_iter()
                .map(|row| {
                    row.iter()
                        .map(|x| x.to_u64().expect("reduced residue"))
                        .collect()
                })
                .collect(),
            p.get(),
        ),
    };
    Certificate {
        rows,
        cols,
        rank: outcome.rank,
        independent: outcome.rank == rows,
        domain,
        blocks,
        work: WorkCounters {
            row_ops: outcome.row_ops,
            entries: rows as u128 * cols as u128,
        },
        matrix: kept,
    }
}

fn check_cap(required: u128, cap: u128) -> Result<()> {
    if required > cap {
        Err(Error::DimensionOverflow { required, cap })
    } else {
        Ok(())
    }
}

/// All subsets of `[n]` with at most `d` elements, canonical order.
fn monomials_up_to(n: usize, d: usize) -> Vec<u64> {
    (0..=d.min(n)).flat_map(|i| level_masks(n, i)).collect()
}

/// Certifies the witness family by exact rank of its coefficient matrix over
/// the monomials `x_I` with `|I| <= s` (or the family's largest degree, if
/// some member exceeds `s`). Rows are in block order.
pub fn verify_independence(witness: &WitnessFamily, config: CertConfig) -> Result<Certificate> {
    let n = witness.n;
    let degree = witness.s.max(witness.max_degree()).min(n);
    let required: u128 = (0..=degree).map(|i| binomial(n, i)).sum();
    check_cap(required, config.matrix_cap)?;
    let columns = monomials_up_to(n, degree);
    let index: std::collections::HashMap<u64, usize> =
        columns.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let matrix = witness
        .polys()
        .map(|poly| {
            let mut row = vec![BigInt::zero(); columns.len()];
            for (m, c) in poly.terms() {
                row[index[m]] = c.clone();
            }
            row
        })
        .collect();
    Ok(certify(
        matrix,
        columns.len(),
        witness.domain,
        Some(witness.block_sizes()),
        config,
    ))
}

/// Largest `n` for the evaluation cross-check (2^n columns).
pub const EVALUATION_MAX_N: usize = 12;

/// Same verdict computed from the evaluation matrix over all of `{0,1}^n`.
pub fn verify_by_evaluation(witness: &WitnessFamily) -> Result<Certificate> {
    let n = witness.n;
    if n > EVALUATION_MAX_N {
        return Err(Error::ParamOutOfRange(format!(
            "evaluation cross-check supports n <= {EVALUATION_MAX_N}, got {n}"
        )));
    }
    let points: Vec<u64> = (0..1u64 << n).collect();
    let matrix = witness
        .polys()
        .map(|poly| points.iter().map(|&pt| poly.eval(pt)).collect())
        .collect();
    Ok(certify(
        matrix,
        points.len(),
        witness.domain,
        Some(witness.block_sizes()),
        CertConfig::default(),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramViolation {
    pub row: usize,
    pub col: usize,
    pub first: Subset,
    pub second: Subset,
    pub value: u64,
}

/// `M[A][B] = P_L(|A ∩ B|) mod p` over the family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramWitness {
    pub p: u64,
    pub size: usize,
    pub entries: Vec<Vec<u64>>,
    /// Nonzero diagonal and zero off-diagonal.
    pub valid: bool,
    /// First failing entry, scanning the upper triangle row by row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<GramViolation>,
}

pub fn gram_witness(family: &SetFamily, l: &ResidueSet, p: PrimeModulus) -> Result<GramWitness> {
    let poly = ffpoly::annihilator_poly(l, Domain::Modular(p))?;
    let members = family.members();
    let max_len = members.iter().map(|a| a.len()).max().unwrap_or(0);
    let table: Vec<u64> = (0..=max_len)
        .map(|t| poly.eval_u64(t as u64).to_u64().expect("residue"))
        .collect();
    let entries: Vec<Vec<u64>> = members
        .iter()
        .map(|a| {
            members
                .iter()
                .map(|&b| table[a.intersection_len(b)])
                .collect()
        })
        .collect();
    let mut violation = None;
    'scan: for i in 0..members.len() {
        for j in i..members.len() {
            let bad = if i == j {
                entries[i][j] == 0
            } else {
                entries[i][j] != 0
            };
            if bad {
                violation = Some(GramViolation {
                    row: i,
                    col: j,
                    first: members[i],
                    second: members[j],
                    value: entries[i][j],
                });
                break 'scan;
            }
        }
    }
    Ok(GramWitness {
        p: p.get(),
        size: members.len(),
        entries,
        valid: violation.is_none(),
        violation,
    })
}

/// Rows `w_A` (concatenated `j`-incidence vectors over `j in bsupp(L)`) for
/// each member, followed, with `with_nonshadows`, by the unit vectors
/// `e_T` for every non-shadow `T` on an active level. Certified by exact
/// rank in `domain` (modular, or the integers for the nonmodular analogue).
pub fn incidence_independence(
    family: &SetFamily,
    l: &ResidueSet,
    domain: Domain,
    with_nonshadows: bool,
    config: CertConfig,
) -> Result<Certificate> {
    let support = ffpoly::bsupp(l, domain)?;
    let n = family.n();
    let active: Vec<usize> = support.into_iter().filter(|&j| j <= n).collect();
    let required: u128 = active.iter().map(|&j| binomial(n, j)).sum();
    check_cap(required, config.matrix_cap)?;
    let coords: Vec<u64> = active.iter().flat_map(|&j| level_masks(n, j)).collect();
    let index: std::collections::HashMap<u64, usize> =
        coords.iter().enumerate().map(|(i, &m)| (m, i)).collect();

    let mut matrix: Vec<Vec<BigInt>> = family
        .iter()
        .map(|a| {
            coords
                .iter()
                .map(|&t| BigInt::from(u8::from(t & !a.mask() == 0)))
                .collect()
        })
        .collect();
    let mut unit_rows = 0;
    if with_nonshadows {
        for &j in &active {
            for t in setfam::nonshadow(family, j)?.iter() {
                let mut row = vec![BigInt::zero(); coords.len()];
                row[index[&t.mask()]] = BigInt::from(1);
                matrix.push(row);
                unit_rows += 1;
            }
        }
    }
    let blocks = BlockSizes {
        triangular: family.len(),
        filter: 0,
        nonshadow: unit_rows,
    };
    Ok(certify(matrix, coords.len(), domain, Some(blocks), config))
}
