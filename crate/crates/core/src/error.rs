use thiserror::Error;

use crate::bounds::Hypothesis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrimeModulus(u64),
    #[error("residue {value} is out of range for modulus {modulus}")]
    ResidueOutOfRange { value: u64, modulus: u64 },
    #[error("duplicate residue {0}")]
    DuplicateResidue(u64),
    #[error("|L| = {size} must be smaller than the modulus {modulus}")]
    DegreeExceedsModulus { size: usize, modulus: u64 },
    #[error("binomial polynomials up to degree {degree} do not form a basis mod {modulus}")]
    BasisDegenerate { degree: usize, modulus: u64 },
    #[error("polynomial of degree {degree} does not fit in a basis of degree {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("level {level} is out of range for ground set of size {n}")]
    LevelOutOfRange { level: usize, n: usize },
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("ground set size {0} exceeds the supported maximum of 64")]
    GroundSetTooLarge(usize),
    #[error("element {element} is outside the ground set [1..{n}]")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("set {0} appears more than once")]
    DuplicateSet(String),
    #[error("all sets in a family must share the ground set")]
    GroundSetMismatch,
    #[error("hypotheses violated: {0:?}")]
    HypothesisViolated(Vec<Hypothesis>),
    #[error("residue set is not almost-initial")]
    NotAlmostInitial,
    #[error("coefficient domains do not match")]
    DomainMismatch,
    #[error("matrix needs {required} columns, cap is {cap}")]
    DimensionOverflow { required: u128, cap: u128 },
    #[error("search needs {required} (cap {cap})")]
    SearchCapExceeded { required: String, cap: usize },
    #[error("bound violated: {0}")]
    CounterExample(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
