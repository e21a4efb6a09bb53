//! Error types shared by all modules.

use num_complex::Complex64;
use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while solving for modes and derived quantities.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the supported evaluation range of a special function.
    #[error("argument out of supported range: order {order}, |z| = {magnitude:.3e}")]
    RangeExceeded { order: u32, magnitude: f64 },

    /// A special-function evaluation overflowed or produced a non-finite value.
    #[error("non-finite result for order {order} at z = {z}")]
    NonFinite { order: u32, z: Complex64 },

    /// The dispersion ratio was requested at (or too close to) a zero of J_m.
    #[error("dispersion ratio pole: |J_m| below threshold at gamma = {gamma}")]
    PoleAtEigenvalue { gamma: Complex64 },

    /// Closed-form cross integral requested with a^2 ~ b^2; use `lommel_self`.
    #[error("degenerate arguments in cross integral: |a^2-b^2| = {separation:.3e}")]
    DegenerateArguments { separation: f64 },

    /// Argument-principle count disagrees with the set of roots found.
    #[error("completeness failure: winding count {expected} but {found} roots located")]
    CompletenessFailure { expected: i64, found: usize },

    /// Adaptive continuation could not shrink the step far enough.
    #[error("step collapse while tracking near beta0 = {beta0} (substep {substep:.3e})")]
    StepCollapse { beta0: Complex64, substep: f64 },

    /// Newton iteration did not converge within its budget.
    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Second gamma-derivative vanished: a triple (or higher) root.
    #[error("triple root suspected: |d2f/dgamma2| = {magnitude:.3e}")]
    TripleRoot { magnitude: f64 },

    /// Requested expansion point outside the validity disk of the local model.
    #[error("beta0 outside expansion disk: |beta0 - beta_ep| = {distance:.3e}")]
    OutOfExpansionDisk { distance: f64 },

    /// Encircling loop invalid (not closed, or passing too close to the EP).
    #[error("invalid encircling loop: {reason}")]
    InvalidLoop { reason: String },

    /// Junction system too ill-conditioned to trust.
    #[error("ill-conditioned junction solve: condition estimate {estimate:.3e}")]
    IllConditioned { estimate: f64 },

    /// Catch-all for violated preconditions.
    #[error("invalid input: {reason}")]
    InvalidInput { reason: String },
}

impl Error {
    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            reason: reason.into(),
        }
    }
}
