use core::fmt;

/// Failures raised by the geometric and numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Requested jet order outside `0..=MAX_ORDER`.
    OrderOutOfRange { order: usize },
    /// `|dα₀(A, B)|` fell below the contact threshold.
    DegenerateContact { value: f64 },
    /// The chart frame (A, B, Z) or a linear system built from it is singular.
    SingularFrame,
    /// The immersion differential dropped rank.
    RankDeficient,
    /// The point lies (numerically) in the characteristic set, `|a| ≈ 1`.
    CharacteristicPoint { a: f64 },
    /// Adaptive quadrature or extrapolation did not reach its tolerance.
    NonConvergent { estimate: f64, error: f64 },
    /// The slope-at-zero fit does not look like a straight line through the origin.
    IllConditionedFit { slope: f64, residual: f64 },
    /// An argument violates the documented domain of an operation.
    Domain(&'static str),
    /// Evaluation requested at a boundary corner.
    CornerPoint { t: f64 },
    /// A tangent vector of zero length.
    ZeroVector,
    /// A one-sided derivative of `α(γ̇)` vanishes where it must not.
    StarViolation { t: f64, derivative: f64 },
    /// Boundary runs inside the characteristic set on a set of positive length.
    UnsupportedBoundary,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OrderOutOfRange { order } => write!(f, "jet order {order} out of range"),
            Error::DegenerateContact { value } => {
                write!(f, "distribution is not contact here (dα₀(A,B) = {value:e})")
            }
            Error::SingularFrame => f.write_str("frame is linearly dependent"),
            Error::RankDeficient => f.write_str("immersion is rank deficient"),
            Error::CharacteristicPoint { a } => write!(f, "characteristic point (a = {a})"),
            Error::NonConvergent { estimate, error } => {
                write!(f, "did not converge (estimate {estimate:e}, error {error:e})")
            }
            Error::IllConditionedFit { slope, residual } => {
                write!(f, "ill-conditioned slope fit (slope {slope}, residual {residual:e})")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::CornerPoint { t } => write!(f, "t = {t} is a corner of the boundary"),
            Error::ZeroVector => f.write_str("zero tangent vector"),
            Error::StarViolation { t, derivative } => {
                write!(f, "boundary becomes tangent to E without transversality at t = {t} (dψ/dt = {derivative:e})")
            }
            Error::UnsupportedBoundary => f.write_str("boundary meets the characteristic set on a set of positive length"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::error::Error for Error {}
