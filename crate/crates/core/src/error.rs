//! Error types shared across the solver.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the numerical core.
///
/// Violations of mathematical hypotheses (like a multiplier failing
/// monotonicity) are *not* errors; they are reported by the validator.
/// Errors are reserved for operations that cannot produce a result.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("table multiplier queried at |n| = {n}, beyond the tabulated range n_max = {n_max}")]
    TableOutOfRange { n: i64, n_max: usize },

    #[error("grid of {m} points is too coarse: this operation needs at least {required}")]
    GridTooCoarse { m: usize, required: usize },

    #[error("field truncation mismatch: expected N = {expected}, got N = {got}")]
    TruncationMismatch { expected: usize, got: usize },

    #[error("operation is only defined for p = 2 (got p = {p})")]
    UnsupportedP { p: f64 },

    #[error("derivative of order {order} is unavailable for exponent p = {p}")]
    RegularityUnavailable { order: u8, p: f64 },

    #[error("Newton did not converge in {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Jacobian is numerically singular (condition estimate {cond_estimate:.3e})")]
    SingularJacobian { cond_estimate: f64 },

    #[error("continuation stalled: step size fell below ds_min = {ds_min:.3e}")]
    StallAtMinStep { ds_min: f64 },

    #[error("no non-trivial constant solution exists at lambda = 0")]
    ZeroLambda,

    #[error("operation requires the fractional multiplier")]
    UnsupportedMultiplier,

    #[error("scaling would need truncation {required}, above the configured cap {cap}")]
    TruncationOverflow { required: usize, cap: usize },

    #[error("lambda = {lambda} is outside the closed form's validity range ({reason})")]
    LambdaOutOfRange { lambda: f64, reason: &'static str },

    #[error("bound functions need p < 4s + 1 (got p = {p}, s = {s})")]
    UnsupportedRegime { p: f64, s: f64 },

    #[error("time integration blew up at t = {t:.6e} (coefficient magnitude exceeded 1e12)")]
    BlowupDetected { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
