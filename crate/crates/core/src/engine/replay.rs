use thiserror::Error;

use super::{EngineError, Runner, ScenarioSchedule, StepRecord, Trajectory};
use crate::model::{init_world, CandidateSpec, WorldState};
use crate::params::SimParams;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub step: u64,
    pub field: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub records_compared: usize,
    pub first_divergence: Option<Divergence>,
}

impl ReplayReport {
    pub fn is_faithful(&self) -> bool {
        self.first_divergence.is_none()
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("trajectory does not match the run parameters: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Re-executes the run described by `params`, `candidates` and `schedule`
/// and compares it record by record with `trajectory`.
///
/// The seed is treated as part of the initial state: a trajectory recorded
/// under another seed diverges at step 0.
pub fn replay(
    trajectory: &Trajectory,
    params: &SimParams,
    candidates: &[CandidateSpec],
    schedule: &ScenarioSchedule,
) -> Result<ReplayReport, ReplayError> {
    if trajectory.num_voters != params.num_voters as u64 {
        return Err(ReplayError::Mismatch(format!(
            "num_voters {} != {}",
            trajectory.num_voters, params.num_voters
        )));
    }
    if trajectory.seed != params.seed {
        return Ok(ReplayReport {
            records_compared: 0,
            first_divergence: Some(Divergence {
                step: 0,
                field: format!("seed ({} recorded, {} expected)", trajectory.seed, params.seed),
            }),
        });
    }
    let world = init_world(params, candidates).map_err(EngineError::from)?;
    replay_from(world, trajectory, schedule)
}

/// Continues from `world` (at any time covered by `trajectory`) and checks
/// the remaining records.
pub fn replay_from(
    world: WorldState,
    trajectory: &Trajectory,
    schedule: &ScenarioSchedule,
) -> Result<ReplayReport, ReplayError> {
    if trajectory.candidate_ids != world.candidate_ids() {
        return Err(ReplayError::Mismatch(format!(
            "candidate ids {:?} != {:?}",
            trajectory.candidate_ids,
            world.candidate_ids()
        )));
    }
    let expected_len = schedule.run_length as usize + 1;
    if trajectory.records.len() != expected_len {
        return Err(ReplayError::Mismatch(format!(
            "{} records, run length implies {expected_len}",
            trajectory.records.len()
        )));
    }
    let start = world.time as usize;
    if start >= trajectory.records.len() {
        return Err(ReplayError::Mismatch(format!(
            "world time {start} is past the end of the trajectory"
        )));
    }

    let mut runner = Runner::new(world, schedule.clone(), trajectory.records_voters())?;
    let mut compared = 0;
    let mut current = runner.record();
    for recorded in &trajectory.records[start..] {
        compared += 1;
        if let Some(field) = first_difference(recorded, &current) {
            return Ok(ReplayReport {
                records_compared: compared,
                first_divergence: Some(Divergence {
                    step: current.time,
                    field,
                }),
            });
        }
        match runner.step() {
            Some(next) => current = next,
            None => break,
        }
    }
    Ok(ReplayReport {
        records_compared: compared,
        first_divergence: None,
    })
}

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits()
}

/// Name of the first field where two records disagree, bit for bit.
pub(crate) fn first_difference(recorded: &StepRecord, replayed: &StepRecord) -> Option<String> {
    if recorded.time != replayed.time {
        return Some(format!("time ({} != {})", recorded.time, replayed.time));
    }
    if recorded.repulsions.len() != replayed.repulsions.len() {
        return Some("repulsions.len".into());
    }
    for (i, (a, b)) in recorded.repulsions.iter().zip(&replayed.repulsions).enumerate() {
        if !same(*a, *b) {
            return Some(format!("repulsions[{i}] ({a} != {b})"));
        }
    }
    if recorded.scandals.len() != replayed.scandals.len() {
        return Some("scandals.len".into());
    }
    for (i, (a, b)) in recorded.scandals.iter().zip(&replayed.scandals).enumerate() {
        if a.id != b.id || a.target != b.target || !same(a.potential, b.potential) {
            return Some(format!("scandals[{i}]"));
        }
    }
    match (&recorded.voters, &replayed.voters) {
        (Some(a), Some(b)) => {
            if a.len() != b.len() {
                return Some("voters.len".into());
            }
            for (i, (p, q)) in a.iter().zip(b).enumerate() {
                if !same(p.x, q.x) || !same(p.y, q.y) {
                    return Some(format!("voters[{i}]"));
                }
            }
        }
        (None, None) => {}
        _ => return Some("voters presence".into()),
    }
    if recorded.tally != replayed.tally {
        return Some("tally".into());
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::model::CandidateId;

    fn setup() -> (SimParams, Vec<CandidateSpec>, ScenarioSchedule) {
        let params = SimParams {
            num_voters: 80,
            num_candidates: 3,
            ..SimParams::default()
        };
        let schedule = ScenarioSchedule::single(30, 5, CandidateId(1), 0.7);
        (params, CandidateSpec::default_line(3), schedule)
    }

    #[test]
    fn fresh_run_replays_cleanly() {
        let (p, c, s) = setup();
        let out = run(&p, &c, &s, true).unwrap();
        let report = replay(&out.trajectory, &p, &c, &s).unwrap();
        assert!(report.is_faithful());
        assert_eq!(report.records_compared, 31);
    }

    #[test]
    fn tampered_repulsion_is_located() {
        let (p, c, s) = setup();
        let mut traj = run(&p, &c, &s, false).unwrap().trajectory;
        let r = &mut traj.records[9].repulsions[1];
        *r = f64::from_bits(r.to_bits() ^ 1);
        let report = replay(&traj, &p, &c, &s).unwrap();
        let d = report.first_divergence.unwrap();
        assert_eq!(d.step, 9);
        assert!(d.field.starts_with("repulsions[1]"), "{}", d.field);
    }

    #[test]
    fn other_seed_diverges_at_start() {
        let (p, c, s) = setup();
        let traj = run(&SimParams { seed: 7, ..p.clone() }, &c, &s, false)
            .unwrap()
            .trajectory;
        let d = replay(&traj, &p, &c, &s).unwrap().first_divergence.unwrap();
        assert!(d.step <= 1);
    }

    #[test]
    fn resumes_from_saved_world() {
        let (p, c, s) = setup();
        let full = run(&p, &c, &s, true).unwrap();
        let half = run(&p, &c, &ScenarioSchedule { run_length: 12, ..s.clone() }, false).unwrap();
        let saved = serde_json::to_string(&half.world).unwrap();
        let loaded: WorldState = serde_json::from_str(&saved).unwrap();
        let report = replay_from(loaded, &full.trajectory, &s).unwrap();
        assert!(report.is_faithful(), "{report:?}");
        assert_eq!(report.records_compared, 31 - 12);
    }

    #[test]
    fn structural_mismatch_is_an_error() {
        let (p, c, s) = setup();
        let traj = run(&p, &c, &s, false).unwrap().trajectory;
        let other = SimParams { num_voters: 81, ..p.clone() };
        assert!(matches!(replay(&traj, &other, &c, &s), Err(ReplayError::Mismatch(_))));
        let longer = ScenarioSchedule { run_length: 31, ..s.clone() };
        assert!(matches!(replay(&traj, &p, &c, &longer), Err(ReplayError::Mismatch(_))));
    }
}
