//! Random small instances, run through both the engine and the oracle.

#![allow(dead_code)]

use proptest::prelude::*;
use votesim_core::engine::{Runner, ScenarioSchedule, ScheduledScandal};
use votesim_core::{
    init_world, tally, CandidateId, CandidateSpec, Point, SimParams, SocialSign, WorldState,
};

use super::oracle::{self, Frame, Instance};

pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Case {
    pub params: SimParams,
    pub candidates: Vec<[f64; 2]>,
    pub voters: Vec<([f64; 2], [f64; 4])>,
    /// (step, candidate index, potential)
    pub scandals: Vec<(u64, usize, f64)>,
    pub steps: u64,
}

/// Coarse values land on exact ties and coincident points often enough to matter.
fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![
        3 => 0.0..=1.0f64,
        1 => (0u32..=4).prop_map(|k| k as f64 / 4.0),
    ]
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    (coord(), coord()).prop_map(|(x, y)| [x, y])
}

fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![4 => 0.0..=1.0f64, 1 => Just(0.0), 1 => Just(1.0)]
}

pub fn case(max_voters: usize, max_candidates: usize, max_steps: u64) -> impl Strategy<Value = Case> {
    (
        1..=max_candidates,
        0..=max_voters,
        1..=max_steps,
        any::<u64>(),
        (unit(), unit(), 0.0..0.2f64, 0.0..0.5f64, any::<bool>()),
    )
        .prop_flat_map(move |(nc, nv, steps, seed, (appease, falloff, lc, ls, attract))| {
            let traits = (0.0..=0.8f64, unit(), 0.0..=1.2f64, unit())
                .prop_map(|(s, k, t, e)| [s, k, t, e]);
            (
                prop::collection::vec(point(), nc),
                prop::collection::vec((point(), traits), nv),
                prop::collection::vec((0..steps, 0..nc, unit()), 0..=4),
            )
                .prop_map(move |(candidates, voters, mut scandals)| {
                    scandals.sort_by_key(|s| s.0);
                    Case {
                        params: SimParams {
                            num_voters: nv,
                            num_candidates: nc,
                            appeasement_delta: appease,
                            falloff_rate: falloff,
                            max_openness: 0.8,
                            max_tolerance: 1.2,
                            candidate_attraction_step: lc,
                            social_step: ls,
                            social_sign: if attract {
                                SocialSign::Attract
                            } else {
                                SocialSign::RepelLiteral
                            },
                            seed,
                        },
                        candidates,
                        voters,
                        scandals,
                        steps,
                    }
                })
        })
}

impl Case {
    /// Candidate ids are spaced out and listed in reverse to exercise id ordering.
    pub fn specs(&self) -> Vec<CandidateSpec> {
        self.candidates
            .iter()
            .enumerate()
            .rev()
            .map(|(i, p)| CandidateSpec::new(10 + 3 * i as u32, format!("K{i}"), Point::new(p[0], p[1])))
            .collect()
    }

    pub fn world(&self) -> WorldState {
        let mut w = init_world(&self.params, &self.specs()).expect("valid case");
        for (v, (xy, t)) in w.voters.iter_mut().zip(&self.voters) {
            v.position = Point::new(xy[0], xy[1]);
            v.openness = t[0];
            v.charisma = t[1];
            v.tolerance = t[2];
            v.conformity = t[3];
        }
        w
    }

    pub fn schedule(&self) -> ScenarioSchedule {
        ScenarioSchedule {
            entries: self
                .scandals
                .iter()
                .map(|&(step, c, potential)| ScheduledScandal {
                    step,
                    candidate: CandidateId(10 + 3 * c as u32),
                    potential,
                })
                .collect(),
            run_length: self.steps,
        }
    }

    pub fn instance(&self) -> Instance {
        let p = &self.params;
        Instance {
            appease: p.appeasement_delta,
            falloff: p.falloff_rate,
            attraction_step: p.candidate_attraction_step,
            social_step: p.social_step,
            social_sign: if p.social_sign == SocialSign::Attract { 1.0 } else { -1.0 },
            cand_xy: self.candidates.clone(),
            gamma: vec![0.0; self.candidates.len()],
            scandals: Vec::new(),
            voter_xy: self.voters.iter().map(|v| v.0).collect(),
            traits: self.voters.iter().map(|v| v.1).collect(),
        }
    }

    pub fn oracle(&self) -> Vec<Frame> {
        let mut by_step = vec![Vec::new(); self.steps as usize];
        for &(step, c, pot) in &self.scandals {
            by_step[step as usize].push((c, pot));
        }
        oracle::trajectory(self.instance(), &by_step, self.steps as usize)
    }

    /// Engine worlds for times 0..=steps.
    pub fn engine(&self) -> Vec<WorldState> {
        let mut runner = Runner::new(self.world(), self.schedule(), true).expect("valid schedule");
        let mut out = vec![runner.world().clone()];
        while runner.step().is_some() {
            out.push(runner.world().clone());
        }
        out
    }
}

/// Describes the first disagreement between engine and oracle, if any.
pub fn compare(engine: &[WorldState], oracle: &[Frame]) -> Result<(), String> {
    if engine.len() != oracle.len() {
        return Err(format!("{} engine frames vs {} oracle frames", engine.len(), oracle.len()));
    }
    for (t, (w, f)) in engine.iter().zip(oracle).enumerate() {
        for (c, g) in w.candidates.iter().zip(&f.gamma) {
            if (c.repulsion - g).abs() > TOLERANCE {
                return Err(format!("t={t} repulsion {} vs {g}", c.repulsion));
            }
        }
        for (i, (v, xy)) in w.voters.iter().zip(&f.voter_xy).enumerate() {
            if (v.position.x - xy[0]).abs() > TOLERANCE || (v.position.y - xy[1]).abs() > TOLERANCE {
                return Err(format!("t={t} voter {i} at {:?} vs {xy:?}", v.position));
            }
        }
        let result = tally(w);
        let votes: Vec<u64> = w.candidates.iter().map(|c| result.votes[&c.id]).collect();
        if votes != f.votes || result.abstentions != f.abstentions {
            return Err(format!(
                "t={t} tally {votes:?}+{} vs {:?}+{}",
                result.abstentions, f.votes, f.abstentions
            ));
        }
    }
    Ok(())
}
