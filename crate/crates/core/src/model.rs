use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::params::SimParams;
use crate::rng::{sample_trait, sample_unit, RngState};

/// A point of the opinion space `[0,1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn clamp_unit(self) -> Point {
        Point::new(self.x.clamp(0.0, 1.0), self.y.clamp(0.0, 1.0))
    }

    pub fn in_unit_square(self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateId(pub u32);

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoterId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScandalId(pub u64);

/// Placement of one candidate before the world is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSpec {
    pub id: CandidateId,
    pub label: String,
    pub position: Point,
}

impl CandidateSpec {
    pub fn new(id: u32, label: impl Into<String>, position: Point) -> Self {
        CandidateSpec {
            id: CandidateId(id),
            label: label.into(),
            position,
        }
    }

    /// `count` candidates spread evenly on `y = 0.5`, `x ∈ [0.1, 0.9]`,
    /// labelled `C1..Cn` with ids `0..n`.
    pub fn default_line(count: usize) -> Vec<CandidateSpec> {
        (0..count)
            .map(|i| {
                let x = if count == 1 {
                    0.5
                } else {
                    0.1 + 0.8 * i as f64 / (count - 1) as f64
                };
                CandidateSpec::new(i as u32, format!("C{}", i + 1), Point::new(x, 0.5))
            })
            .collect()
    }

    /// Candidates at the given positions with ids `0..n` and labels `C1..Cn`.
    pub fn from_positions(positions: &[Point]) -> Vec<CandidateSpec> {
        positions
            .iter()
            .enumerate()
            .map(|(i, &p)| CandidateSpec::new(i as u32, format!("C{}", i + 1), p))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: CandidateId,
    pub label: String,
    pub position: Point,
    /// Repulsion γ ∈ [0,1].
    pub repulsion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Voter {
    pub id: VoterId,
    pub position: Point,
    /// Openness σ: radius within which other voters and candidates are perceived.
    pub openness: f64,
    /// Charisma κ: weight of this voter's pull on its neighbours.
    pub charisma: f64,
    /// Tolerance θ: a candidate whose repulsion reaches it is dismissed.
    pub tolerance: f64,
    /// Conformity η: susceptibility to the neighbours' pull.
    pub conformity: f64,
}

impl Voter {
    pub fn tolerates(&self, candidate: &Candidate) -> bool {
        candidate.repulsion < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scandal {
    pub id: ScandalId,
    pub target: CandidateId,
    /// Potential ρ ∈ [0,1].
    pub potential: f64,
    pub onset_time: u64,
}

/// Complete state of a simulation at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub time: u64,
    pub params: SimParams,
    /// Sorted by ascending id.
    pub candidates: Vec<Candidate>,
    /// Sorted by ascending id; ids are `0..num_voters`.
    pub voters: Vec<Voter>,
    /// Active scandals in injection order.
    pub scandals: Vec<Scandal>,
    pub rng_state: RngState,
    pub next_scandal_id: u64,
}

impl WorldState {
    pub fn candidate(&self, id: CandidateId) -> Option<&Candidate> {
        self.candidates
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.candidates[i])
    }

    pub fn candidate_index(&self, id: CandidateId) -> Option<usize> {
        self.candidates.binary_search_by_key(&id, |c| c.id).ok()
    }

    pub fn candidate_ids(&self) -> Vec<CandidateId> {
        self.candidates.iter().map(|c| c.id).collect()
    }
}

/// Builds the time-zero world.
///
/// Voters are drawn in index order; for each voter the draw order is
/// `position.x, position.y, openness, charisma, tolerance, conformity`.
pub fn init_world(params: &SimParams, candidates: &[CandidateSpec]) -> Result<WorldState, SimError> {
    params.validate()?;
    if candidates.len() != params.num_candidates {
        return Err(SimError::CandidateCount {
            expected: params.num_candidates,
            actual: candidates.len(),
        });
    }
    for c in candidates {
        if !c.position.in_unit_square() {
            return Err(SimError::CandidateOutOfRange {
                id: c.id,
                x: c.position.x,
                y: c.position.y,
            });
        }
    }
    let mut sorted: Vec<Candidate> = candidates
        .iter()
        .map(|c| Candidate {
            id: c.id,
            label: c.label.clone(),
            position: c.position,
            repulsion: 0.0,
        })
        .collect();
    sorted.sort_by_key(|c| c.id);
    if let Some(pair) = sorted.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(SimError::DuplicateCandidate(pair[0].id));
    }
    if params.num_voters > u32::MAX as usize {
        return Err(SimError::TooManyVoters(params.num_voters));
    }

    let mut rng = RngState::new(params.seed).restore();
    let mut voters = Vec::with_capacity(params.num_voters);
    for i in 0..params.num_voters {
        let x = sample_unit(&mut rng);
        let y = sample_unit(&mut rng);
        let openness = sample_trait(&mut rng, params.max_openness);
        let charisma = sample_trait(&mut rng, 1.0);
        let tolerance = sample_trait(&mut rng, params.max_tolerance);
        let conformity = sample_trait(&mut rng, 1.0);
        voters.push(Voter {
            id: VoterId(i as u32),
            position: Point::new(x, y),
            openness,
            charisma,
            tolerance,
            conformity,
        });
    }

    Ok(WorldState {
        time: 0,
        params: params.clone(),
        candidates: sorted,
        voters,
        scandals: Vec::new(),
        rng_state: RngState::capture(params.seed, &rng),
        next_scandal_id: 0,
    })
}
