//! Agent-based simulator of a multi-candidate election in a 2D opinion space.
//!
//! Voters drift toward the nearest candidate they still tolerate and toward
//! (or away from) their neighbours. Scandals raise a candidate's repulsion,
//! which decays over time; voters whose tolerance is exceeded dismiss the
//! candidate and may end up abstaining. Everything is deterministic given
//! the seed.

pub mod dynamics;
pub mod engine;
mod error;
pub mod model;
pub mod params;
pub mod rng;
pub mod tally;

pub use dynamics::{decay_scandals, step, trigger_scandal, update_repulsion, update_voter};
pub use error::SimError;
pub use model::{
    init_world, Candidate, CandidateId, CandidateSpec, Point, Scandal, ScandalId, Voter, VoterId,
    WorldState,
};
pub use params::{ParamError, SimParams, SocialSign};
pub use tally::{tally, ElectionResult};
