//! Exact univariate polynomials over the integers or a prime field, the
//! annihilator polynomial of a residue set, and its expansion in the
//! binomial basis `binom(t, 0), ..., binom(t, s)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A prime `p`, checked with a deterministic Miller-Rabin test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeModulus(p))
        } else {
            Err(Error::NonPrimeModulus(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Fails unless `0 <= x < p`.
    pub fn check(self, x: u64) -> Result<u64> {
        if x < self.0 {
            Ok(x)
        } else {
            Err(Error::ResidueOutOfRange {
                value: x,
                modulus: self.0,
            })
        }
    }

    pub fn reduce(self, x: u64) -> u64 {
        x % self.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic for every `u64` (the first twelve primes are a complete
/// witness set below 3.3e24).
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut twos = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        twos += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..twos {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Modular inverse of `a` modulo the prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Where polynomial coefficients live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Integers,
    Modular(PrimeModulus),
}

impl Domain {
    pub fn modulus(self) -> Option<PrimeModulus> {
        match self {
            Domain::Integers => None,
            Domain::Modular(p) => Some(p),
        }
    }

    /// Canonical representative: unchanged over the integers, in `[0, p)` mod p.
    pub fn reduce(self, x: BigInt) -> BigInt {
        match self {
            Domain::Integers => x,
            Domain::Modular(p) => x.mod_floor(&BigInt::from(p.get())),
        }
    }

    pub fn from_i64(self, x: i64) -> BigInt {
        self.reduce(BigInt::from(x))
    }

    pub fn is_zero(self, x: &BigInt) -> bool {
        self.reduce(x.clone()).is_zero()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Integers => write!(f, "integers"),
            Domain::Modular(p) => write!(f, "mod {p}"),
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A sorted, duplicate-free set of nonnegative integers such as `L` or `K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ResidueSet {
    elements: Vec<u64>,
    modulus: Option<PrimeModulus>,
}

impl ResidueSet {
    pub fn new(elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateResidue(w[0]));
        }
        Ok(ResidueSet {
            elements,
            modulus: None,
        })
    }

    /// Residues modulo `p`; every element must already lie in `[0, p)`.
    pub fn modular(elements: impl IntoIterator<Item = u64>, p: PrimeModulus) -> Result<Self> {
        let mut set = Self::new(elements)?;
        for &x in &set.elements {
            p.check(x)?;
        }
        set.modulus = Some(p);
        Ok(set)
    }

    /// `{0, 1, ..., len - 1}`.
    pub fn initial_segment(len: u64) -> Self {
        ResidueSet {
            elements: (0..len).collect(),
            modulus: None,
        }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn modulus(&self) -> Option<PrimeModulus> {
        self.modulus
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Membership of `x mod p`.
    pub fn contains_mod(&self, x: u64, p: PrimeModulus) -> bool {
        self.contains(p.reduce(x))
    }

    pub fn is_disjoint(&self, other: &ResidueSet) -> bool {
        self.elements.iter().all(|&x| !other.contains(x))
    }

    pub fn max(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    /// Checks every element against `domain`; used before building anything
    /// modular.
    pub fn validate(&self, domain: Domain) -> Result<()> {
        if let Domain::Modular(p) = domain {
            for &x in &self.elements {
                p.check(x)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Polynomial in the power basis, coefficients in ascending degree.
/// Coefficients are kept reduced and the trailing zeros trimmed, so equality
/// is equality of polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerPoly {
    domain: Domain,
    coeffs: Vec<BigInt>,
}

impl PowerPoly {
    pub fn new(domain: Domain, coeffs: Vec<BigInt>) -> Self {
        let mut coeffs: Vec<BigInt> = coeffs.into_iter().map(|c| domain.reduce(c)).collect();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PowerPoly { domain, coeffs }
    }

    pub fn from_i64(domain: Domain, coeffs: &[i64]) -> Self {
        Self::new(domain, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(domain: Domain) -> Self {
        PowerPoly {
            domain,
            coeffs: Vec::new(),
        }
    }

    pub fn one(domain: Domain) -> Self {
        Self::new(domain, vec![BigInt::one()])
    }

    /// The monic linear polynomial `t - root`.
    pub fn linear(domain: Domain, root: &BigInt) -> Self {
        Self::new(domain, vec![-root.clone(), BigInt::one()])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        let acc = self
            .coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * t + c);
        self.domain.reduce(acc)
    }

    pub fn eval_u64(&self, t: u64) -> BigInt {
        self.eval(&BigInt::from(t))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.domain, self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divides by `t - root`, returning quotient coefficients and the remainder.
    fn synthetic_division(coeffs: &[BigInt], root: &BigInt) -> (Vec<BigInt>, BigInt) {
        if coeffs.is_empty() {
            return (Vec::new(), BigInt::zero());
        }
        let d = coeffs.len() - 1;
        let mut quotient = vec![BigInt::zero(); d];
        let mut carry = BigInt::zero();
        for i in (0..=d).rev() {
            let value = &coeffs[i] + root * &carry;
            if i == 0 {
                return (quotient, value);
            }
            quotient[i - 1] = value.clone();
            carry = value;
        }
        unreachable!()
    }
}

fn same_domain(a: &PowerPoly, b: &PowerPoly) -> Domain {
    assert_eq!(a.domain, b.domain, "polynomials from different domains");
    a.domain
}

impl Add for &PowerPoly {
    type Output = PowerPoly;
    fn add(self, rhs: &PowerPoly) -> PowerPoly {
        let domain = same_domain(self, rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        PowerPoly::new(
            domain,
            (0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect(),
        )
    }
}

impl Sub for &PowerPoly {
    type Output = PowerPoly;
    fn sub(self, rhs: &PowerPoly) -> PowerPoly {
        let domain = same_domain(self, rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        PowerPoly::new(
            domain,
            (0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect(),
        )
    }
}

impl Mul for &PowerPoly {
    type Output = PowerPoly;
    fn mul(self, rhs: &PowerPoly) -> PowerPoly {
        let domain = same_domain(self, rhs);
        if self.is_zero() || rhs.is_zero() {
            return PowerPoly::zero(domain);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PowerPoly::new(domain, out)
    }
}

impl fmt::Display for PowerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{mag}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Coefficients `c_0..c_s` with `P(t) = sum_j c_j * binom(t, j)`.
/// Zero coefficients are kept, so the length is always `s + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialExpansion {
    domain: Domain,
    coeffs: Vec<BigInt>,
}

impl BinomialExpansion {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// The `s` of the basis the expansion lives in.
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Levels `j` with `c_j != 0`.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, _)| j)
            .collect()
    }

    /// `sum_j c_j * binom(t, j)` evaluated at a nonnegative integer.
    pub fn eval_u64(&self, t: u64) -> BigInt {
        let mut acc = BigInt::zero();
        let mut binom = BigInt::one();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j as u64 > t {
                break;
            }
            acc += c * &binom;
            binom = binom * BigInt::from(t - j as u64) / BigInt::from(j as u64 + 1);
        }
        self.domain.reduce(acc)
    }

    /// Rebuilds the power-basis polynomial. `c_j = j! * d_j` where `d_j` is
    /// the falling-factorial coefficient, so the division is exact over the
    /// integers and an inverse of `j!` mod p otherwise.
    pub fn to_power_basis(&self) -> PowerPoly {
        let mut acc = PowerPoly::zero(self.domain);
        let mut fact = BigInt::one();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                fact *= j;
            }
            let d = match self.domain {
                Domain::Integers => {
                    debug_assert!((c % &fact).is_zero());
                    c / &fact
                }
                Domain::Modular(p) => {
                    let f = fact.mod_floor(&BigInt::from(p.get())).to_u64().unwrap();
                    c * BigInt::from(inv_mod(f, p.get()))
                }
            };
            if !d.is_zero() {
                acc = &acc + &falling_factorial(j, self.domain).scale(&d);
            }
        }
        acc
    }
}

impl Serialize for BinomialExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            domain: Domain,
            coefficients: Vec<JsonInt<'a>>,
            support: Vec<usize>,
        }
        Repr {
            domain: self.domain,
            coefficients: self.coeffs.iter().map(JsonInt).collect(),
            support: self.support(),
        }
        .serialize(s)
    }
}

/// JSON number when it fits in an `i64`, decimal string otherwise.
pub struct JsonInt<'a>(pub &'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.collect_str(self.0),
        }
    }
}

/// `(t)_k = t (t - 1) ... (t - k + 1)`, with `(t)_0 = 1`.
pub fn falling_factorial(k: usize, domain: Domain) -> PowerPoly {
    (0..k).fold(PowerPoly::one(domain), |acc, j| {
        &acc * &PowerPoly::linear(domain, &BigInt::from(j))
    })
}

/// `P_L(t) = prod_{l in L} (t - l)`.
pub fn annihilator_poly(l: &ResidueSet, domain: Domain) -> Result<PowerPoly> {
    if let Domain::Modular(p) = domain {
        l.validate(domain)?;
        if l.len() as u64 >= p.get() {
            return Err(Error::DegreeExceedsModulus {
                size: l.len(),
                modulus: p.get(),
            });
        }
    }
    Ok(l.elements().iter().fold(PowerPoly::one(domain), |acc, &x| {
        &acc * &PowerPoly::linear(domain, &BigInt::from(x))
    }))
}

/// Expands `poly` (degree at most `s`) in `binom(t, 0..=s)`.
///
/// Repeated synthetic division by `t - 0, t - 1, ...` yields the coefficients
/// in the falling-factorial basis (the remainders); `(t)_j = j! binom(t, j)`
/// then scales them into the binomial basis.
pub fn to_binomial_basis(poly: &PowerPoly, s: usize) -> Result<BinomialExpansion> {
    let domain = poly.domain();
    if let Domain::Modular(p) = domain {
        if s as u64 >= p.get() {
            return Err(Error::BasisDegenerate {
                degree: s,
                modulus: p.get(),
            });
        }
    }
    if let Some(d) = poly.degree() {
        if d > s {
            return Err(Error::DegreeTooLarge {
                degree: d,
                bound: s,
            });
        }
    }
    let mut coeffs = Vec::with_capacity(s + 1);
    let mut current = poly.coeffs().to_vec();
    let mut fact = BigInt::one();
    for j in 0..=s {
        if j > 0 {
            fact *= j;
        }
        let (quotient, remainder) = PowerPoly::synthetic_division(&current, &BigInt::from(j));
        coeffs.push(domain.reduce(remainder * &fact));
        current = quotient;
    }
    Ok(BinomialExpansion { domain, coeffs })
}

/// The binomial expansion of `P_L` with `s = |L|`.
pub fn annihilator_expansion(l: &ResidueSet, domain: Domain) -> Result<BinomialExpansion> {
    let poly = annihilator_poly(l, domain)?;
    to_binomial_basis(&poly, l.len())
}

/// `bsupp(L) = { j : c_j(L) != 0 }`.
pub fn bsupp(l: &ResidueSet, domain: Domain) -> Result<Vec<usize>> {
    Ok(annihilator_expansion(l, domain)?.support())
}

/// `L = {0, ..., s - m - 1} ∪ R` with `R` disjoint from the initial segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlmostInitial {
    pub m: usize,
    pub rest: Vec<u64>,
}

/// Smallest `m` for which `L` is almost-initial. `m = s` (empty initial
/// segment) always qualifies, so this is `None` only when some element of
/// `L` is not a residue mod `p`.
pub fn is_almost_initial(l: &ResidueSet, p: PrimeModulus) -> Option<AlmostInitial> {
    if l.elements().iter().any(|&x| x >= p.get()) {
        return None;
    }
    let run = l
        .elements()
        .iter()
        .enumerate()
        .take_while(|(i, &x)| *i as u64 == x)
        .count();
    Some(AlmostInitial {
        m: l.len() - run,
        rest: l.elements()[run..].to_vec(),
    })
}
