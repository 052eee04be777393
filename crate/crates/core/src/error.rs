use core::fmt;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A value was requested outside the half-open window `[start, start+len)`.
    OutOfWindow { n: u64, start: u64, len: u64 },
    /// A window or loop bound exceeds the configured memory budget.
    CapacityExceeded { requested: u64, budget: u64 },
    /// An argument that must be prime is not.
    NotPrime(u64),
    /// The Euler-product cutoff is below the certified minimum for this tuple.
    PMaxTooSmall { p_max: u64, required: u64 },
    /// Generic precondition failure; the message names the violated bound.
    BadParameter(&'static str),
    /// Symmetric-function order beyond the supported cap.
    KCapExceeded { k: u32, cap: u32 },
    /// Interval length exceeds the short-interval regime.
    LambdaCapExceeded { lambda: f64, cap: f64 },
    /// The moment matrix is singular at this parameter point, so the
    /// orthogonality system has no unique solution.
    SingularSystem { k: u32, lambda: f64 },
    /// A closed form hit a zero denominator.
    ZeroDenominator(&'static str),
    /// Iteration cap reached without meeting the tolerance.
    NoConvergence(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfWindow { n, start, len } => {
                write!(f, "n = {n} outside window [{start}, {})", start + len)
            }
            Error::CapacityExceeded { requested, budget } => {
                write!(f, "requested length {requested} exceeds budget {budget}")
            }
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::PMaxTooSmall { p_max, required } => {
                write!(f, "p_max = {p_max} below required minimum {required}")
            }
            Error::BadParameter(msg) => write!(f, "{msg}"),
            Error::KCapExceeded { k, cap } => write!(f, "k = {k} beyond cap {cap}"),
            Error::LambdaCapExceeded { lambda, cap } => {
                write!(f, "lambda = {lambda} beyond cap {cap}")
            }
            Error::SingularSystem { k, lambda } => {
                write!(f, "moment matrix singular at k = {k}, lambda = {lambda}")
            }
            Error::ZeroDenominator(msg) => write!(f, "zero denominator in {msg}"),
            Error::NoConvergence(msg) => write!(f, "no convergence in {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
