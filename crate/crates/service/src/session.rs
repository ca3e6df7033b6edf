//! Single-threaded session state. The actor in [`crate::actor`] owns one of
//! these and is the only writer.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use votesim_core::{
    init_world, tally, CandidateId, CandidateSpec, SimParams, WorldState,
};

pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

/// Snapshots carry at most this many voter positions.
pub const MAX_SNAPSHOT_VOTERS: usize = 5000;

pub const DEFAULT_TICK_RATE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayState {
    Paused,
    Running,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Configure {
        params: SimParams,
        candidates: Vec<CandidateSpec>,
    },
    Start,
    Pause,
    Resume,
    SetSpeed(f64),
    TriggerScandal {
        candidate: CandidateId,
        potential: f64,
    },
    Reset {
        seed: Option<u64>,
    },
    RequestSnapshot,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}")]
pub struct CommandError {
    pub code: &'static str,
    pub message: String,
}

impl CommandError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CommandError {
            code,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Applied {
    /// Time of the first state that reflects the command.
    pub effective_step: u64,
    /// Whether subscribers should get a fresh snapshot now.
    pub publish: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotCandidate {
    pub id: CandidateId,
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub repulsion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotScandal {
    pub id: u64,
    pub target: CandidateId,
    pub potential: f64,
    pub onset_time: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotVoters {
    pub total: u64,
    /// Every `stride`-th voter by id is included.
    pub stride: u64,
    /// Flattened `[x0, y0, x1, y1, ...]`.
    pub xy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyEntry {
    pub candidate: CandidateId,
    pub votes: u64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotTally {
    pub votes: Vec<TallyEntry>,
    pub abstentions: u64,
    pub abstention_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub schema_version: u32,
    pub time: u64,
    pub play_state: PlayState,
    pub tick_rate: f64,
    pub candidates: Vec<SnapshotCandidate>,
    pub scandals: Vec<SnapshotScandal>,
    pub voters: SnapshotVoters,
    pub tally: SnapshotTally,
}

/// Voter ids kept in snapshots of a population of size `n`.
pub fn snapshot_stride(n: usize) -> usize {
    n.div_ceil(MAX_SNAPSHOT_VOTERS).max(1)
}

#[derive(Debug, Clone)]
pub struct SessionCore {
    params: SimParams,
    candidates: Vec<CandidateSpec>,
    world: WorldState,
    play: PlayState,
    tick_rate: f64,
}

fn build(params: &SimParams, candidates: &[CandidateSpec]) -> Result<WorldState, CommandError> {
    init_world(params, candidates).map_err(|e| CommandError::new("invalid_params", e.to_string()))
}

impl SessionCore {
    /// A paused session at time 0.
    pub fn new(params: SimParams, candidates: Vec<CandidateSpec>) -> Result<Self, CommandError> {
        let world = build(&params, &candidates)?;
        Ok(SessionCore {
            params,
            candidates,
            world,
            play: PlayState::Paused,
            tick_rate: DEFAULT_TICK_RATE,
        })
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn play_state(&self) -> PlayState {
        self.play
    }

    pub fn tick_rate(&self) -> f64 {
        self.tick_rate
    }

    pub fn apply(&mut self, command: Command) -> Result<Applied, CommandError> {
        let now = self.world.time;
        let at = |effective_step, publish| Ok(Applied { effective_step, publish });
        match command {
            Command::Configure { params, candidates } => {
                self.world = build(&params, &candidates)?;
                self.params = params;
                self.candidates = candidates;
                self.play = PlayState::Paused;
                at(0, true)
            }
            Command::Start | Command::Resume => {
                let changed = self.play != PlayState::Running;
                self.play = PlayState::Running;
                at(now, changed)
            }
            Command::Pause => {
                let changed = self.play != PlayState::Paused;
                self.play = PlayState::Paused;
                at(now, changed)
            }
            Command::SetSpeed(rate) => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(CommandError::new(
                        "invalid_speed",
                        format!("tick rate must be finite and > 0, got {rate}; use pause to halt"),
                    ));
                }
                self.tick_rate = rate;
                at(now, true)
            }
            Command::TriggerScandal { candidate, potential } => {
                self.world
                    .trigger_scandal(candidate, potential)
                    .map_err(|e| match e {
                        votesim_core::SimError::UnknownCandidate(_) => {
                            CommandError::new("unknown_candidate", e.to_string())
                        }
                        _ => CommandError::new("invalid_potential", e.to_string()),
                    })?;
                at(now + 1, false)
            }
            Command::Reset { seed } => {
                let mut params = self.params.clone();
                if let Some(seed) = seed {
                    params.seed = seed;
                }
                self.world = build(&params, &self.candidates)?;
                self.params = params;
                self.play = PlayState::Paused;
                at(0, true)
            }
            Command::RequestSnapshot => at(now, false),
        }
    }

    pub fn step(&mut self) {
        self.world.advance();
    }

    pub fn snapshot(&self) -> Snapshot {
        let w = &self.world;
        let result = tally(w);
        let stride = snapshot_stride(w.voters.len());
        let xy = w
            .voters
            .iter()
            .step_by(stride)
            .flat_map(|v| [v.position.x, v.position.y])
            .collect();
        Snapshot {
            schema_version: SNAPSHOT_SCHEMA_VERSION,
            time: w.time,
            play_state: self.play,
            tick_rate: self.tick_rate,
            candidates: w
                .candidates
                .iter()
                .map(|c| SnapshotCandidate {
                    id: c.id,
                    label: c.label.clone(),
                    x: c.position.x,
                    y: c.position.y,
                    repulsion: c.repulsion,
                })
                .collect(),
            scandals: w
                .scandals
                .iter()
                .map(|s| SnapshotScandal {
                    id: s.id.0,
                    target: s.target,
                    potential: s.potential,
                    onset_time: s.onset_time,
                })
                .collect(),
            voters: SnapshotVoters {
                total: w.voters.len() as u64,
                stride: stride as u64,
                xy,
            },
            tally: SnapshotTally {
                votes: result
                    .votes
                    .iter()
                    .map(|(&candidate, &votes)| TallyEntry {
                        candidate,
                        votes,
                        share: result.share(candidate),
                    })
                    .collect(),
                abstentions: result.abstentions,
                abstention_rate: result.abstention_rate(),
            },
        }
    }
}
