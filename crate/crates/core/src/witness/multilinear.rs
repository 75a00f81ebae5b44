use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ffpoly::Domain;

/// A multilinear polynomial in `x_1..x_n`, stored as a sparse map from the
/// monomial's variable set (bit `i - 1` for `x_i`) to its coefficient.
/// Products are reduced with `x_i^2 = x_i`, which is exact on `{0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPoly {
    n: usize,
    domain: Domain,
    terms: BTreeMap<u64, BigInt>,
}

impl MultilinearPoly {
    pub fn zero(n: usize, domain: Domain) -> Self {
        MultilinearPoly {
            n,
            domain,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, domain: Domain, c: BigInt) -> Self {
        let mut p = Self::zero(n, domain);
        p.add_term(0, c);
        p
    }

    /// `x_I`.
    pub fn monomial(n: usize, domain: Domain, vars: u64) -> Self {
        let mut p = Self::zero(n, domain);
        p.add_term(vars, BigInt::one());
        p
    }

    /// `sum_{i in vars} x_i - shift`.
    pub fn linear_form(n: usize, domain: Domain, vars: u64, shift: &BigInt) -> Self {
        let mut p = Self::constant(n, domain, -shift.clone());
        for i in 0..n {
            if vars >> i & 1 == 1 {
                p.add_term(1 << i, BigInt::one());
            }
        }
        p
    }

    fn add_term(&mut self, vars: u64, c: BigInt) {
        let entry = self.terms.entry(vars).or_insert_with(BigInt::zero);
        *entry = self.domain.reduce(std::mem::take(entry) + c);
        if entry.is_zero() {
            self.terms.remove(&vars);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Nonzero terms keyed by monomial bitmask.
    pub fn terms(&self) -> &BTreeMap<u64, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, vars: u64) -> BigInt {
        self.terms.get(&vars).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest monomial size; zero for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Multilinear product.
    pub fn mul(&self, other: &MultilinearPoly) -> MultilinearPoly {
        assert_eq!(
            self.domain, other.domain,
            "multilinear polys from different domains"
        );
        let mut out = Self::zero(self.n.max(other.n), self.domain);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                out.add_term(a | b, ca * cb);
            }
        }
        out
    }

    /// Value at the characteristic vector of `set`: `sum_{I ⊆ set} coeff(I)`.
    pub fn eval(&self, set: u64) -> BigInt {
        let acc = self
            .terms
            .iter()
            .filter(|(&m, _)| m & !set == 0)
            .fold(BigInt::zero(), |acc, (_, c)| acc + c);
        self.domain.reduce(acc)
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by_key(|(&m, _)| (m.count_ones(), m));
        for (i, (&m, c)) in ordered.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m == 0 {
                write!(f, "{c}")?;
                continue;
            }
            if !c.is_one() {
                write!(f, "{c}*")?;
            }
            let vars: Vec<String> = (0..64)
                .filter(|b| m >> b & 1 == 1)
                .map(|b| format!("x{}", b + 1))
                .collect();
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}
