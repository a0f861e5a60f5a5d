use alloc::string::String;

use crate::poly::Var;

/// Errors raised by the kernel.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    #[error("curve parameter t must avoid 0 and 1")]
    SingularCurve,
    #[error("variable {0} is not assigned")]
    UnassignedVariable(Var),
    #[error("pole of {0}")]
    Pole(&'static str),
    #[error("indeterminate value of {0}")]
    Indeterminate(&'static str),
    #[error("cross-ratio needs four distinct points")]
    RepeatedPoint,
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("recovered section parameter is off the curve (residual {residual:e})")]
    InconsistentSection { residual: f64 },
    #[error("roots are not Gaussian-rational")]
    IrrationalRoots,
    #[error("sections coincide")]
    SameSection,
    #[error("path passes within {distance:e} of branch point {branch}")]
    ClearanceViolation { branch: String, distance: f64 },
    #[error("path is not closed on the curve ({encircled} branch points encircled)")]
    NotClosed { encircled: i64 },
    #[error("step size collapsed at parameter {at}")]
    StepSizeCollapse { at: f64 },
    #[error("finite-difference step {0:e} is too small")]
    StepUnderflow(f64),
    #[error("slopes are nearly degenerate (min gap {0:e})")]
    NearDegenerateSlopes(f64),
    #[error("Moebius fit failed: {0}")]
    FitFailed(&'static str),
    #[error("leaf intersection did not converge")]
    IntersectionFailed,
}
