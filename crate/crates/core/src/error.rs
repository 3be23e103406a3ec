use thiserror::Error;

/// Errors raised by constructors and operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not strictly inside the unit disc")]
    OutsideDisc { re: f64, im: f64 },

    #[error("point ({re}, {im}) is not in the open upper half-plane")]
    OutsideHalfPlane { re: f64, im: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dyadic arc at level {level} has arclength >= 1; its top center is undefined")]
    CoarseDyadicArc { level: u32 },

    #[error("evaluation point coincides with zero #{index}")]
    ZeroHit { index: usize },

    #[error("zero #{index} has multiplicity {mult}; the quantity vanishes identically")]
    MultipleZero { index: usize, mult: u32 },

    #[error("zero #{index} lies within {distance:e} of the integration circle")]
    NearIntegrationCircle { index: usize, distance: f64 },

    #[error("boundary set is empty")]
    EmptyBoundarySet,

    #[error("atom at {angle_turns} turns lies outside the boundary set")]
    AtomOutsideSet { angle_turns: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
