//! Subsets of `[n]` as bitmasks, families in canonical order, shadows and
//! non-shadows, and the size / intersection conditions of the theorems.
//!
//! Elements are 1-based everywhere outside this module's bit twiddling:
//! element `i` lives at bit `i - 1`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_integer::binomial as num_binomial;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ffpoly::{Domain, PrimeModulus, ResidueSet};

pub const MAX_GROUND_SET: usize = 64;

/// `binom(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        0
    } else {
        num_binomial(n as u128, k as u128)
    }
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Whether conditions are tested on the integers themselves or modulo `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Modular(PrimeModulus),
}

impl Mode {
    pub fn modulus(self) -> Option<PrimeModulus> {
        match self {
            Mode::Exact => None,
            Mode::Modular(p) => Some(p),
        }
    }

    /// Does the integer `x` satisfy "x in S" (exact) or "x mod p in S"?
    pub fn admits(self, set: &ResidueSet, x: usize) -> bool {
        match self {
            Mode::Exact => set.contains(x as u64),
            Mode::Modular(p) => set.contains_mod(x as u64, p),
        }
    }
}

impl From<Mode> for Domain {
    fn from(mode: Mode) -> Domain {
        match mode {
            Mode::Exact => Domain::Integers,
            Mode::Modular(p) => Domain::Modular(p),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Modular(p) => write!(f, "mod {p}"),
        }
    }
}

impl Serialize for Mode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    mask: u64,
    n: u8,
}

impl Subset {
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > MAX_GROUND_SET {
            return Err(Error::GroundSetTooLarge(n));
        }
        if mask & !full_mask(n) != 0 {
            let element = 64 - mask.leading_zeros() as usize;
            return Err(Error::ElementOutOfRange { element, n });
        }
        Ok(Subset { mask, n: n as u8 })
    }

    /// Builds a subset from 1-based elements. Repeated elements collapse.
    pub fn from_elements(n: usize, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n > MAX_GROUND_SET {
            return Err(Error::GroundSetTooLarge(n));
        }
        let mut mask = 0u64;
        for e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            mask |= 1 << (e - 1);
        }
        Ok(Subset { mask, n: n as u8 })
    }

    pub(crate) fn from_mask_unchecked(n: usize, mask: u64) -> Self {
        debug_assert!(mask & !full_mask(n) == 0);
        Subset { mask, n: n as u8 }
    }

    pub fn mask(self) -> u64 {
        self.mask
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn intersection_len(self, other: Subset) -> usize {
        (self.mask & other.mask).count_ones() as usize
    }

    /// 1-based elements in increasing order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mask = self.mask;
        (0..64).filter(move |i| mask >> i & 1 == 1).map(|i| i + 1)
    }

    /// Canonical order key: size first, then numeric mask.
    pub fn canonical_key(self) -> (u32, u64) {
        (self.mask.count_ones(), self.mask)
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for e in self.elements() {
            seq.serialize_element(&e)?;
        }
        seq.end()
    }
}

/// Calls `f` on every `t`-subset of `mask`.
fn for_each_sub_of_size(mask: u64, t: usize, f: &mut impl FnMut(u64)) {
    fn go(rest: u64, t: usize, acc: u64, f: &mut impl FnMut(u64)) {
        if t == 0 {
            f(acc);
            return;
        }
        if (rest.count_ones() as usize) < t {
            return;
        }
        let low = rest & rest.wrapping_neg();
        go(rest & !low, t - 1, acc | low, f);
        go(rest & !low, t, acc, f);
    }
    go(mask, t, 0, f);
}

/// All `k`-subsets of `[n]` as masks in increasing numeric order.
pub fn level_masks(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    for_each_sub_of_size(full_mask(n), k, &mut |m| out.push(m));
    out.sort_unstable();
    out
}

/// An ordered duplicate-free family of subsets of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: usize,
    members: Vec<Subset>,
}

impl SetFamily {
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    /// Sorts into canonical order; rejects duplicates and foreign ground sets.
    pub fn new(n: usize, mut members: Vec<Subset>) -> Result<Self> {
        if n > MAX_GROUND_SET {
            return Err(Error::GroundSetTooLarge(n));
        }
        if members.iter().any(|s| s.n() != n) {
            return Err(Error::GroundSetMismatch);
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSet(w[0].to_string()));
        }
        Ok(SetFamily { n, members })
    }

    pub fn from_masks(n: usize, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        let members = masks
            .into_iter()
            .map(|m| Subset::from_mask(n, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    /// From 1-based element lists.
    pub fn from_sets<I, S>(n: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        let members = sets
            .into_iter()
            .map(|s| Subset::from_elements(n, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().copied()
    }

    /// The family with `extra` added (no-op if already present).
    pub fn with(&self, extra: Subset) -> Result<Self> {
        if self.contains(extra) {
            return Ok(self.clone());
        }
        let mut members = self.members.clone();
        members.push(extra);
        Self::new(self.n, members)
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.n == other.n && self.iter().all(|s| other.contains(s))
    }

    /// Text format: an `n=<int>` header, then one set per line as 1-based
    /// integers separated by whitespace or commas. `#` starts a comment line,
    /// blank lines are skipped, and `{}` denotes the empty set.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut members = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let Some(ground) = n else {
                let value = line
                    .strip_prefix("n=")
                    .or_else(|| line.strip_prefix("n ="))
                    .ok_or_else(|| parse_err("expected header `n=<int>`".into()))?;
                let value: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("bad ground set size `{}`", value.trim())))?;
                if value > MAX_GROUND_SET {
                    return Err(parse_err(format!("n={value} exceeds {MAX_GROUND_SET}")));
                }
                n = Some(value);
                continue;
            };
            let body = line.trim_start_matches('{').trim_end_matches('}');
            let elements = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|tok| !tok.is_empty())
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| parse_err(format!("bad element `{tok}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let subset =
                Subset::from_elements(ground, elements).map_err(|e| parse_err(e.to_string()))?;
            members.push((line_no, subset));
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing header `n=<int>`".into(),
        })?;
        let mut seen = HashSet::new();
        for &(line, s) in &members {
            if !seen.insert(s) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate set {s}"),
                });
            }
        }
        Self::new(n, members.into_iter().map(|(_, s)| s).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for s in &self.members {
            if s.is_empty() {
                out.push_str("{}");
            } else {
                let parts: Vec<String> = s.elements().map(|e| e.to_string()).collect();
                out.push_str(&parts.join(" "));
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            sets: &'a [Subset],
        }
        Repr {
            n: self.n,
            sets: &self.members,
        }
        .serialize(s)
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

fn check_level(n: usize, t: usize) -> Result<()> {
    if t > n {
        Err(Error::LevelOutOfRange { level: t, n })
    } else {
        Ok(())
    }
}

const PARALLEL_SHADOW_THRESHOLD: usize = 256;

fn shadow_masks(family: &SetFamily, t: usize) -> HashSet<u64> {
    let collect = |acc: &mut HashSet<u64>, s: &Subset| {
        if s.len() >= t {
            for_each_sub_of_size(s.mask(), t, &mut |m| {
                acc.insert(m);
            });
        }
    };
    if family.len() < PARALLEL_SHADOW_THRESHOLD {
        let mut acc = HashSet::new();
        family.members.iter().for_each(|s| collect(&mut acc, s));
        acc
    } else {
        family
            .members
            .par_iter()
            .fold(HashSet::new, |mut acc, s| {
                collect(&mut acc, s);
                acc
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    }
}

/// `∂_t F`: the `t`-subsets of `[n]` lying inside some member.
pub fn shadow(family: &SetFamily, t: usize) -> Result<SetFamily> {
    check_level(family.n, t)?;
    let mut masks: Vec<u64> = shadow_masks(family, t).into_iter().collect();
    masks.sort_unstable();
    let members = masks
        .into_iter()
        .map(|m| Subset::from_mask_unchecked(family.n, m))
        .collect();
    Ok(SetFamily {
        n: family.n,
        members,
    })
}

/// `|∂_t F|`.
pub fn shadow_count(family: &SetFamily, t: usize) -> Result<u128> {
    Ok(binomial(family.n, t) - nonshadow_count(family, t)?)
}

fn covers_full_level_at_or_above(family: &SetFamily, t: usize) -> bool {
    let mut per_level: BTreeMap<usize, u128> = BTreeMap::new();
    for s in &family.members {
        *per_level.entry(s.len()).or_default() += 1;
    }
    per_level
        .range(t..)
        .any(|(&k, &count)| count == binomial(family.n, k))
}

/// `|N_t(F)| = binom(n, t) - |∂_t F|`.
pub fn nonshadow_count(family: &SetFamily, t: usize) -> Result<u128> {
    check_level(family.n, t)?;
    if covers_full_level_at_or_above(family, t) {
        return Ok(0);
    }
    Ok(binomial(family.n, t) - shadow_masks(family, t).len() as u128)
}

/// The non-shadow `N_t(F)` itself, canonical order.
pub fn nonshadow(family: &SetFamily, t: usize) -> Result<SetFamily> {
    check_level(family.n, t)?;
    let covered = shadow_masks(family, t);
    let members = level_masks(family.n, t)
        .into_iter()
        .filter(|m| !covered.contains(m))
        .map(|m| Subset::from_mask_unchecked(family.n, m))
        .collect();
    Ok(SetFamily {
        n: family.n,
        members,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    #[serde(rename = "j")]
    pub level: usize,
    #[serde(rename = "shadow")]
    pub shadow_count: u128,
    #[serde(rename = "nonshadow")]
    pub nonshadow_count: u128,
}

/// Shadow and non-shadow counts on level `j`; levels above `n` are empty.
pub fn level_stats(family: &SetFamily, j: usize) -> LevelStats {
    if j > family.n {
        return LevelStats {
            level: j,
            shadow_count: 0,
            nonshadow_count: 0,
        };
    }
    let nonshadow_count = nonshadow_count(family, j).expect("level checked");
    LevelStats {
        level: j,
        shadow_count: binomial(family.n, j) - nonshadow_count,
        nonshadow_count,
    }
}

/// Histogram of `|A ∩ B|` over unordered pairs of distinct members.
pub fn intersection_profile(family: &SetFamily) -> BTreeMap<usize, u64> {
    let mut hist = BTreeMap::new();
    let m = &family.members;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            *hist.entry(m[i].intersection_len(m[j])).or_default() += 1;
        }
    }
    hist
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub first: Subset,
    pub second: Subset,
    pub intersection: usize,
}

/// `None` when every pair of distinct members meets in an allowed size.
/// Otherwise the first offending pair in canonical order.
pub fn check_l_intersecting(
    family: &SetFamily,
    l: &ResidueSet,
    mode: Mode,
) -> Option<PairViolation> {
    let m = &family.members;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let size = m[i].intersection_len(m[j]);
            if !mode.admits(l, size) {
                return Some(PairViolation {
                    first: m[i],
                    second: m[j],
                    intersection: size,
                });
            }
        }
    }
    None
}

/// `None` when every member size is allowed, otherwise the first violator.
pub fn check_sizes(family: &SetFamily, k: &ResidueSet, mode: Mode) -> Option<Subset> {
    family.iter().find(|s| !mode.admits(k, s.len()))
}

/// Every subset of `[n]` whose size is in `levels`.
pub fn union_of_levels(n: usize, levels: &[usize]) -> Result<SetFamily> {
    if n > MAX_GROUND_SET {
        return Err(Error::GroundSetTooLarge(n));
    }
    let mut masks = Vec::new();
    for &k in levels {
        check_level(n, k)?;
        masks.extend(level_masks(n, k));
    }
    masks.sort_unstable();
    masks.dedup();
    SetFamily::from_masks(n, masks)
}
