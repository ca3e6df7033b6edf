use thiserror::Error;

use crate::model::CandidateId;
use crate::params::ParamError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid parameter {0}")]
    Params(#[from] ParamError),
    #[error("expected {expected} candidates, got {actual}")]
    CandidateCount { expected: usize, actual: usize },
    #[error("candidate {id} position ({x}, {y}) outside [0,1]²")]
    CandidateOutOfRange { id: CandidateId, x: f64, y: f64 },
    #[error("duplicate candidate id {0}")]
    DuplicateCandidate(CandidateId),
    #[error("unknown candidate id {0}")]
    UnknownCandidate(CandidateId),
    #[error("scandal potential {0} outside [0, 1]")]
    PotentialOutOfRange(f64),
    #[error("{0} voters exceeds the supported maximum")]
    TooManyVoters(usize),
}
