//! Crate-wide error type.
//!
//! Payloads are kept at `f64`/`usize` so the enum stays independent of the
//! scalar parameter; certificates report failures as data, not through here.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Eigenvalue ratio is real (or eigenvalues degenerate); the local model
    /// requires a non-real ratio.
    #[error("not complex hyperbolic: eigenvalue ratio {re}{im:+}i is real within tolerance")]
    NotComplexHyperbolic { re: f64, im: f64 },

    /// The two field components share a common factor: the zero locus is not
    /// a finite point set.
    #[error("degenerate field: non-isolated singular locus detected near ({0}, {1})")]
    DegenerateField(f64, f64),

    /// A leaf lift ran into a singular point of the direction field.
    #[error("singular encounter at path parameter t = {t}: |denominator| = {denom:e}")]
    SingularEncounter { t: f64, denom: f64 },

    /// Iteration budget exhausted.
    #[error("no convergence in {context} after {iterations} iterations")]
    NoConvergence {
        context: &'static str,
        iterations: usize,
    },

    /// Germ composition anchor falls outside the outer germ's domain.
    #[error(
        "domain violation: |{value:e}| exceeds domain radius {radius:e} at composition anchor"
    )]
    DomainError { value: f64, radius: f64 },

    /// Entry-path endpoint lies on a separatrix.
    #[error("entry path endpoint ({z:e}, {w:e}) lies on a separatrix")]
    OnSeparatrix { z: f64, w: f64 },

    /// No direction satisfies both strict half-plane conditions.
    #[error("no admissible exponential direction for ratio {re}{im:+}i")]
    NoAdmissibleDirection { re: f64, im: f64 },

    /// The holonomy germ vanishes inside the section disc.
    #[error("germ vanishes inside the section disc of radius {radius:e}")]
    GermVanishes { radius: f64 },

    /// The map does not contract on the disc (or an iterate escaped it).
    #[error("contraction violated: {0}")]
    ContractionViolated(&'static str),

    /// Representative assembly failed to close up.
    #[error("assembly error: closure defect {defect:e} exceeds tolerance {tol:e}")]
    AssemblyError { defect: f64, tol: f64 },

    /// A contour integral was requested over a non-closed curve.
    #[error("curve not closed: gap {gap:e} exceeds tolerance {tol:e}")]
    NotClosed { gap: f64, tol: f64 },

    /// Brute-force enumeration bound exceeded.
    #[error("dependency search over {n} values exceeds the enumeration bound {max}")]
    TooLarge { n: usize, max: usize },

    /// The line at infinity is not invariant (dicritical field).
    #[error("line at infinity is not invariant: direction polynomial vanishes identically")]
    NotInvariantLine,

    /// The supplied line is invariant; tangency counting is undefined.
    #[error("line is invariant: tangency polynomial vanishes identically")]
    InvariantLine,

    /// Precondition or configuration violation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Malformed serialized data.
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
