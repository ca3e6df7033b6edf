use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::model::CandidateId;

/// Default number of steps in a run.
pub const DEFAULT_RUN_LENGTH: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledScandal {
    pub step: u64,
    pub candidate: CandidateId,
    pub potential: f64,
}

/// Scripted scandal injections for a headless run.
///
/// An entry at step `t` is injected just before the world advances from `t`
/// to `t+1`, so its first effect on repulsion shows at time `t+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSchedule {
    pub entries: Vec<ScheduledScandal>,
    pub run_length: u64,
}

impl Default for ScenarioSchedule {
    fn default() -> Self {
        ScenarioSchedule::empty(DEFAULT_RUN_LENGTH)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("entries[{index}]: step {step} is not before run_length {run_length}")]
    StepOutOfRange { index: usize, step: u64, run_length: u64 },
    #[error("entries[{index}]: step {step} precedes the previous entry")]
    Unsorted { index: usize, step: u64 },
    #[error("entries[{index}]: {source}")]
    Entry { index: usize, source: SimError },
}

impl ScenarioSchedule {
    pub fn empty(run_length: u64) -> Self {
        ScenarioSchedule {
            entries: Vec::new(),
            run_length,
        }
    }

    pub fn single(run_length: u64, step: u64, candidate: CandidateId, potential: f64) -> Self {
        ScenarioSchedule {
            entries: vec![ScheduledScandal {
                step,
                candidate,
                potential,
            }],
            run_length,
        }
    }

    /// Checks ordering, step bounds, potentials and targets against `candidates`.
    pub fn validate(&self, candidates: &[CandidateId]) -> Result<(), ScheduleError> {
        let mut previous = 0;
        for (index, e) in self.entries.iter().enumerate() {
            if e.step >= self.run_length {
                return Err(ScheduleError::StepOutOfRange {
                    index,
                    step: e.step,
                    run_length: self.run_length,
                });
            }
            if e.step < previous {
                return Err(ScheduleError::Unsorted { index, step: e.step });
            }
            previous = e.step;
            if !(0.0..=1.0).contains(&e.potential) {
                return Err(ScheduleError::Entry {
                    index,
                    source: SimError::PotentialOutOfRange(e.potential),
                });
            }
            if !candidates.contains(&e.candidate) {
                return Err(ScheduleError::Entry {
                    index,
                    source: SimError::UnknownCandidate(e.candidate),
                });
            }
        }
        Ok(())
    }

    pub fn with_potential(&self, potential: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.potential = potential;
        }
        out
    }

    pub fn entries_at(&self, step: u64) -> impl Iterator<Item = &ScheduledScandal> {
        let start = self.entries.partition_point(|e| e.step < step);
        self.entries[start..].iter().take_while(move |e| e.step == step)
    }
}
