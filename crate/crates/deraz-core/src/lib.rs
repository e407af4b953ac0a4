//! Exact computational homological algebra over finitely presented
//! commutative rings: Gröbner/syzygy engines, bounded complexes of free
//! modules, strict dg-algebras, derived-Azumaya verdicts, descent
//! constructions (splitting algebras, finite-flat pushforward) and
//! two-patch gluing with Čech global sections.
//!
//! All arithmetic is exact (arbitrary-precision rationals or F_p); every
//! negative verdict carries a machine-checkable certificate.

pub mod scalars;
pub mod cring;
pub mod complexes;
pub mod dgalg;
pub mod azumaya;
pub mod descent;
pub mod glue;

pub use azumaya::{AzumayaVerdict, MoritaWitness, SmoothVerdict};
pub use complexes::{ChainMap, FreeComplex, HomologyReport};
pub use descent::{FiniteFlatData, SplittingAlgebra, StandardEtaleData};
pub use glue::{CechReport, GluedComplex, GluedGenerator, GluedScheme};
pub use dgalg::DGAlgebra;
pub use cring::{Poly, PolyAlgebra, PointSpec};
pub use scalars::{Field, FieldElement, Matrix};

/// Crate-wide error type. The variant names are part of the library
/// contract: callers (and the CLI) match on them to pick exit codes.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("cannot localize at zero")]
    ZeroLocalization,
    #[error("point does not satisfy the ring relations: {0}")]
    PointMismatch(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("polynomial is not monic: {0}")]
    NotMonic(String),
    #[error("basis error: {0}")]
    BasisError(String),
    #[error("malformed module action: {0}")]
    ActionError(String),
    #[error("unsupported input shape: {0}")]
    Unsupported(String),
    #[error("lift not found: {0}")]
    LiftNotFound(String),
    #[error("window too small: {0}")]
    WindowError(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
