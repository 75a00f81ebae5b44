//! Executable polynomial-method bounds for restricted-intersection families.
//!
//! * [`ffpoly`]: annihilator polynomials and their binomial support.
//! * [`setfam`]: bitmask families, shadows, non-shadows.
//! * [`bounds`]: each bound evaluated on a concrete family, as a report.
//! * [`witness`]: the linear-independence witnesses behind the bounds, with
//!   exact rank certificates.
//! * [`search`]: exhaustive search for maximum admissible families.
//! * [`random`]: seeded generators of admissible families.

pub mod bounds;
pub mod error;
pub mod ffpoly;
pub mod random;
pub mod search;
pub mod setfam;
pub mod witness;

pub use error::{Error, Result};
pub use ffpoly::{Domain, PrimeModulus, ResidueSet};
pub use setfam::{Mode, SetFamily, Subset};

/// Version tag carried by every JSON document the toolkit emits.
pub const SCHEMA_VERSION: &str = "1";
