use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("image list is not a bijection")]
    NotBijection,
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("point set is not invariant")]
    NotInvariant,
    #[error("element is not a member of the group")]
    NotMember,
    #[error("generator images do not define a homomorphism")]
    NotHomomorphism,
    #[error("element has no preimage")]
    EmptyPreimage,
    #[error("subgroup index exceeds bound {bound}")]
    IndexOverflow { bound: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not a Johnson action: {0}")]
    NotJohnson(String),
    #[error("node budget of {limit} exhausted")]
    Budget { limit: u64 },
    #[error("internal assertion failed: {0}")]
    Assertion(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn check_degree(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DegreeMismatch { expected, found })
    }
}
