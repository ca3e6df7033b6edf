use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{CandidateId, Voter, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionResult {
    /// Every candidate appears, including those with zero votes.
    pub votes: BTreeMap<CandidateId, u64>,
    pub abstentions: u64,
}

impl ElectionResult {
    pub fn num_voters(&self) -> u64 {
        self.votes.values().sum::<u64>() + self.abstentions
    }

    /// Abstentions over the electorate; 0 for an empty electorate.
    pub fn abstention_rate(&self) -> f64 {
        fraction(self.abstentions, self.num_voters())
    }

    /// Votes for `id` over the whole electorate (abstainers included).
    pub fn share(&self, id: CandidateId) -> f64 {
        fraction(self.votes.get(&id).copied().unwrap_or(0), self.num_voters())
    }

    pub fn shares(&self) -> Vec<f64> {
        let n = self.num_voters();
        self.votes.values().map(|&v| fraction(v, n)).collect()
    }
}

fn fraction(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// Candidate index `voter` would vote for, or `None` for abstention.
///
/// Considered candidates lie within the voter's openness (inclusive) and have
/// repulsion below its tolerance. Ties go to the lowest id.
pub fn ballot(voter: &Voter, world: &WorldState) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in world.candidates.iter().enumerate() {
        if !voter.tolerates(c) {
            continue;
        }
        let d = voter.position.distance(c.position);
        if d > voter.openness {
            continue;
        }
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

pub fn tally(world: &WorldState) -> ElectionResult {
    let mut counts = vec![0u64; world.candidates.len()];
    let mut abstentions = 0;
    for v in &world.voters {
        match ballot(v, world) {
            Some(i) => counts[i] += 1,
            None => abstentions += 1,
        }
    }
    ElectionResult {
        votes: world
            .candidates
            .iter()
            .map(|c| c.id)
            .zip(counts)
            .collect(),
        abstentions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{init_world, CandidateSpec, Point, VoterId};
    use crate::params::SimParams;

    fn world_with(candidates: &[Point], voters: Vec<Voter>) -> WorldState {
        let p = SimParams {
            num_voters: 0,
            num_candidates: candidates.len(),
            ..SimParams::default()
        };
        let mut w = init_world(&p, &CandidateSpec::from_positions(candidates)).unwrap();
        w.params.num_voters = voters.len();
        w.voters = voters;
        w
    }

    fn voter(id: u32, x: f64, y: f64, openness: f64, tolerance: f64) -> Voter {
        Voter {
            id: VoterId(id),
            position: Point::new(x, y),
            openness,
            charisma: 0.5,
            tolerance,
            conformity: 0.5,
        }
    }

    #[test]
    fn coincident_voter_votes() {
        let w = world_with(&[Point::new(0.4, 0.4)], vec![voter(0, 0.4, 0.4, 0.1, 0.5)]);
        let r = tally(&w);
        assert_eq!(r.votes[&CandidateId(0)], 1);
        assert_eq!(r.abstentions, 0);
    }

    #[test]
    fn closed_voter_abstains() {
        let w = world_with(&[Point::new(0.4, 0.4)], vec![voter(0, 0.41, 0.4, 0.0, 0.5)]);
        let r = tally(&w);
        assert_eq!(r.abstentions, 1);
        assert_eq!(r.abstention_rate(), 1.0);
    }

    #[test]
    fn zero_openness_still_sees_coincident_candidate() {
        let w = world_with(&[Point::new(0.4, 0.4)], vec![voter(0, 0.4, 0.4, 0.0, 0.5)]);
        assert_eq!(tally(&w).abstentions, 0);
    }

    #[test]
    fn dismissed_candidate_gets_no_vote() {
        let mut w = world_with(&[Point::new(0.4, 0.4)], vec![voter(0, 0.4, 0.4, 0.5, 0.3)]);
        w.candidates[0].repulsion = 0.3;
        assert_eq!(tally(&w).abstentions, 1);
        w.candidates[0].repulsion = 0.29;
        assert_eq!(tally(&w).abstentions, 0);
    }

    #[test]
    fn nearest_considered_candidate_wins() {
        let mut w = world_with(
            &[Point::new(0.2, 0.5), Point::new(0.5, 0.5), Point::new(0.9, 0.5)],
            vec![
                voter(0, 0.45, 0.5, 0.3, 0.5),
                voter(1, 0.45, 0.5, 0.3, 0.5),
                voter(2, 0.85, 0.5, 0.01, 0.5),
            ],
        );
        w.voters[1].tolerance = 0.1;
        w.candidates[1].repulsion = 0.2;
        let r = tally(&w);
        // Voter 0 tolerates C2; voter 1 does not and falls back to C1;
        // voter 2 cannot see C3 at distance 0.05.
        assert_eq!(r.votes[&CandidateId(0)], 1);
        assert_eq!(r.votes[&CandidateId(1)], 1);
        assert_eq!(r.votes[&CandidateId(2)], 0);
        assert_eq!(r.abstentions, 1);
        assert_eq!(r.num_voters(), 3);
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let w = world_with(
            &[Point::new(0.25, 0.5), Point::new(0.75, 0.5)],
            vec![voter(0, 0.5, 0.5, 0.4, 0.5)],
        );
        assert_eq!(tally(&w).votes[&CandidateId(0)], 1);
    }

    #[test]
    fn empty_cases() {
        let w = world_with(&[Point::new(0.5, 0.5)], vec![]);
        let r = tally(&w);
        assert_eq!(r.abstention_rate(), 0.0);
        assert_eq!(r.share(CandidateId(0)), 0.0);

        let w = world_with(&[], vec![voter(0, 0.5, 0.5, 1.0, 1.0)]);
        let r = tally(&w);
        assert_eq!(r.abstentions, 1);
        assert!(r.votes.is_empty());
    }

    #[test]
    fn shares_and_abstention_sum_to_one() {
        let w = world_with(
            &[Point::new(0.2, 0.2), Point::new(0.8, 0.8)],
            (0..10)
                .map(|i| voter(i, i as f64 / 10.0, i as f64 / 10.0, 0.2, 0.5))
                .collect(),
        );
        let r = tally(&w);
        let total: f64 = r.shares().iter().sum::<f64>() + r.abstention_rate();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
