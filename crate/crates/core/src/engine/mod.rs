//! Drives the model over time: scheduled scandals, recording and replay.

mod replay;
mod schedule;
mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::SimError;
use crate::model::{init_world, CandidateId, CandidateSpec, Point, ScandalId, WorldState};
use crate::params::SimParams;
use crate::tally::{tally, ElectionResult};

pub use replay::{replay, replay_from, Divergence, ReplayError, ReplayReport};
pub use schedule::{ScenarioSchedule, ScheduleError, ScheduledScandal, DEFAULT_RUN_LENGTH};
pub use sweep::{sweep, sweep_with_jobs, SweepAxis, SweepError, SweepRow};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Init(#[from] SimError),
    #[error("schedule {0}")]
    Schedule(#[from] ScheduleError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScandalRecord {
    pub id: ScandalId,
    pub target: CandidateId,
    pub potential: f64,
}

/// Observable state at one time index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub time: u64,
    /// One entry per candidate, in ascending id order.
    pub repulsions: Vec<f64>,
    pub scandals: Vec<ScandalRecord>,
    pub voters: Option<Vec<Point>>,
    pub tally: ElectionResult,
}

impl StepRecord {
    pub fn capture(world: &WorldState, record_voters: bool) -> Self {
        StepRecord {
            time: world.time,
            repulsions: world.candidates.iter().map(|c| c.repulsion).collect(),
            scandals: world
                .scandals
                .iter()
                .map(|s| ScandalRecord {
                    id: s.id,
                    target: s.target,
                    potential: s.potential,
                })
                .collect(),
            voters: record_voters.then(|| world.voters.iter().map(|v| v.position).collect()),
            tally: tally(world),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub num_voters: u64,
    pub candidate_ids: Vec<CandidateId>,
    /// Initial state followed by one record per step.
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn records_voters(&self) -> bool {
        self.records.first().is_some_and(|r| r.voters.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub final_result: ElectionResult,
    /// Abstention rate at every recorded time, initial state included.
    pub abstention_series: Vec<f64>,
    /// `share_series[t][i]`: share of the electorate voting for candidate `i` at time `t`.
    pub share_series: Vec<Vec<f64>>,
}

impl RunMetrics {
    pub fn from_trajectory(trajectory: &Trajectory) -> Self {
        let final_result = trajectory
            .records
            .last()
            .map(|r| r.tally.clone())
            .expect("trajectory holds at least the initial state");
        RunMetrics {
            final_result,
            abstention_series: trajectory
                .records
                .iter()
                .map(|r| r.tally.abstention_rate())
                .collect(),
            share_series: trajectory.records.iter().map(|r| r.tally.shares()).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub world: WorldState,
    pub trajectory: Trajectory,
    pub metrics: RunMetrics,
}

/// Steps a world through a schedule one tick at a time.
#[derive(Debug, Clone)]
pub struct Runner {
    world: WorldState,
    schedule: ScenarioSchedule,
    record_voters: bool,
}

impl Runner {
    pub fn new(
        world: WorldState,
        schedule: ScenarioSchedule,
        record_voters: bool,
    ) -> Result<Self, EngineError> {
        schedule.validate(&world.candidate_ids())?;
        Ok(Runner {
            world,
            schedule,
            record_voters,
        })
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn into_world(self) -> WorldState {
        self.world
    }

    pub fn is_finished(&self) -> bool {
        self.world.time >= self.schedule.run_length
    }

    pub fn record(&self) -> StepRecord {
        StepRecord::capture(&self.world, self.record_voters)
    }

    /// Applies the entries scheduled for the current time, then advances.
    /// Returns `None` once the run length is reached.
    pub fn step(&mut self) -> Option<StepRecord> {
        if self.is_finished() {
            return None;
        }
        let now = self.world.time;
        for e in self.schedule.entries_at(now) {
            self.world
                .trigger_scandal(e.candidate, e.potential)
                .expect("schedule validated against this world");
        }
        self.world.advance();
        Some(self.record())
    }
}

pub fn run(
    params: &SimParams,
    candidates: &[CandidateSpec],
    schedule: &ScenarioSchedule,
    record_voters: bool,
) -> Result<RunOutput, EngineError> {
    let world = init_world(params, candidates)?;
    let mut runner = Runner::new(world, schedule.clone(), record_voters)?;
    let mut records = Vec::with_capacity(schedule.run_length as usize + 1);
    records.push(runner.record());
    while let Some(r) = runner.step() {
        records.push(r);
    }
    let world = runner.into_world();
    let trajectory = Trajectory {
        seed: params.seed,
        num_voters: params.num_voters as u64,
        candidate_ids: world.candidate_ids(),
        records,
    };
    let metrics = RunMetrics::from_trajectory(&trajectory);
    Ok(RunOutput {
        world,
        trajectory,
        metrics,
    })
}
