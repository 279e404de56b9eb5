use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("precision exhausted after {certified} certified terms; raise the precision")]
    PrecisionExhausted { certified: usize },

    #[error("input is rational; use the truncated/rational route")]
    RationalInput,

    #[error("index {index} out of range (expansion has {len} terms)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "parabolic residual {residual:e} exceeds tolerance {tolerance:e}; raise the precision"
    )]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("parabolic coefficient vanished for {0}")]
    DegenerateParabolic(String),

    #[error("small divisor vanished at n = {0}")]
    ZeroSmallDivisor(u64),

    #[error("series order {order} too small (need at least {min})")]
    SeriesTooShort { order: usize, min: usize },

    #[error("period {q} exceeds the cap {cap}")]
    QCapExceeded { q: u64, cap: u32 },

    #[error("root finder did not converge: {0}")]
    RootFinder(String),

    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(String),

    #[error("offset {eps:e} outside the explosion disk of radius {bound:e}")]
    OutsideExplosionDisk { eps: f64, bound: f64 },

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
