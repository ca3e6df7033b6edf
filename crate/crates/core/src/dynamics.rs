//! One tick of the model: scandal decay, candidate repulsion, voter motion.

use crate::error::SimError;
use crate::model::{CandidateId, Point, Scandal, ScandalId, Voter, WorldState};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Populations at or above this size update voters on the rayon pool.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 2048;

/// `ρ ← clamp(ρ − Δρ)`; scandals whose potential reaches 0 are dropped.
pub fn decay_scandals(world: &mut WorldState) {
    let falloff = world.params.falloff_rate;
    for s in &mut world.scandals {
        s.potential = (s.potential - falloff).clamp(0.0, 1.0);
    }
    world.scandals.retain(|s| s.potential > 0.0);
}

/// `γ ← clamp(γ − Δα + Σ ρ)` over the active scandals targeting each candidate.
///
/// Must run after [`decay_scandals`] so the sum uses the already-decayed potentials.
pub fn update_repulsion(world: &mut WorldState) {
    let appeasement = world.params.appeasement_delta;
    for c in &mut world.candidates {
        let pressure: f64 = world
            .scandals
            .iter()
            .filter(|s| s.target == c.id)
            .map(|s| s.potential)
            .sum();
        c.repulsion = (c.repulsion - appeasement + pressure).clamp(0.0, 1.0);
    }
}

/// Nearest candidate the voter still tolerates, ties to the lowest id.
pub fn attraction_target(voter: &Voter, world: &WorldState) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in world.candidates.iter().enumerate() {
        if !voter.tolerates(c) {
            continue;
        }
        let d = voter.position.distance(c.position);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// New position of `voter` given the world at time `t` with repulsions
/// already advanced to `t+1`. Scans every voter for neighbours.
pub fn update_voter(voter: &Voter, world: &WorldState) -> Point {
    let sigma = voter.openness;
    let neighbours: Vec<usize> = world
        .voters
        .iter()
        .enumerate()
        .filter(|(_, y)| y.id != voter.id && voter.position.distance(y.position) < sigma)
        .map(|(j, _)| j)
        .collect();
    displace(voter, world, &neighbours)
}

/// `neighbours` must be sorted ascending so the social sum has a fixed order.
fn displace(voter: &Voter, world: &WorldState, neighbours: &[usize]) -> Point {
    let params = &world.params;
    let here = voter.position;
    let mut next = here;

    if let Some(i) = attraction_target(voter, world) {
        let target = &world.candidates[i];
        let d = here.distance(target.position);
        if d >= params.candidate_attraction_step {
            let scale = params.candidate_attraction_step / (d * (1.0 + target.repulsion));
            next.x += (target.position.x - here.x) * scale;
            next.y += (target.position.y - here.y) * scale;
        }
    }

    if params.social_step > 0.0 && !neighbours.is_empty() {
        let (mut sx, mut sy) = (0.0, 0.0);
        for &j in neighbours {
            let other = &world.voters[j];
            sx += other.charisma * (other.position.x - here.x);
            sy += other.charisma * (other.position.y - here.y);
        }
        let weight = params.social_step * voter.conformity * params.social_sign.factor()
            / neighbours.len() as f64;
        next.x += weight * sx;
        next.y += weight * sy;
    }

    next.clamp_unit()
}

/// Uniform bucket grid over `[0,1]²` for fixed-radius neighbour queries.
struct NeighbourGrid {
    dim: usize,
    cells: Vec<Vec<u32>>,
}

impl NeighbourGrid {
    const MAX_DIM: usize = 256;

    fn build(world: &WorldState) -> Self {
        let max_radius = world.params.max_openness;
        let dim = if max_radius > 0.0 {
            ((1.0 / max_radius).floor() as usize).clamp(1, Self::MAX_DIM)
        } else {
            1
        };
        let mut cells = vec![Vec::new(); dim * dim];
        for (i, v) in world.voters.iter().enumerate() {
            let (cx, cy) = Self::cell_of(dim, v.position);
            cells[cy * dim + cx].push(i as u32);
        }
        NeighbourGrid { dim, cells }
    }

    fn cell_of(dim: usize, p: Point) -> (usize, usize) {
        let cx = ((p.x * dim as f64) as usize).min(dim - 1);
        let cy = ((p.y * dim as f64) as usize).min(dim - 1);
        (cx, cy)
    }

    /// Indices of voters strictly within `voter.openness`, excluding itself, ascending.
    fn neighbours(&self, world: &WorldState, index: usize, out: &mut Vec<usize>) {
        out.clear();
        let voter = &world.voters[index];
        let sigma = voter.openness;
        if sigma <= 0.0 {
            return;
        }
        let reach = ((sigma * self.dim as f64).ceil() as usize).min(self.dim);
        let (cx, cy) = Self::cell_of(self.dim, voter.position);
        let (x0, x1) = (cx.saturating_sub(reach), (cx + reach).min(self.dim - 1));
        let (y0, y1) = (cy.saturating_sub(reach), (cy + reach).min(self.dim - 1));
        for gy in y0..=y1 {
            for gx in x0..=x1 {
                for &j in &self.cells[gy * self.dim + gx] {
                    let j = j as usize;
                    if j != index && voter.position.distance(world.voters[j].position) < sigma {
                        out.push(j);
                    }
                }
            }
        }
        out.sort_unstable();
    }
}

fn next_positions(world: &WorldState) -> Vec<Point> {
    let grid = NeighbourGrid::build(world);

    #[cfg(feature = "parallel")]
    if world.voters.len() >= PARALLEL_THRESHOLD {
        return (0..world.voters.len())
            .into_par_iter()
            .map_init(Vec::new, |buf, i| {
                grid.neighbours(world, i, buf);
                displace(&world.voters[i], world, buf)
            })
            .collect();
    }

    let mut buf = Vec::new();
    (0..world.voters.len())
        .map(|i| {
            grid.neighbours(world, i, &mut buf);
            displace(&world.voters[i], world, &buf)
        })
        .collect()
}

impl WorldState {
    /// Advances one tick in place: decay, repulsion, synchronous voter update.
    pub fn advance(&mut self) {
        decay_scandals(self);
        update_repulsion(self);
        let positions = next_positions(self);
        for (v, p) in self.voters.iter_mut().zip(positions) {
            v.position = p;
        }
        self.time += 1;
    }

    /// Injects a scandal at the current time. It first acts on the next tick.
    pub fn trigger_scandal(
        &mut self,
        target: CandidateId,
        potential: f64,
    ) -> Result<ScandalId, SimError> {
        if self.candidate(target).is_none() {
            return Err(SimError::UnknownCandidate(target));
        }
        if !(0.0..=1.0).contains(&potential) {
            return Err(SimError::PotentialOutOfRange(potential));
        }
        let id = ScandalId(self.next_scandal_id);
        self.next_scandal_id += 1;
        self.scandals.push(Scandal {
            id,
            target,
            potential,
            onset_time: self.time,
        });
        Ok(id)
    }
}

/// Pure form of [`WorldState::advance`].
pub fn step(world: &WorldState) -> WorldState {
    let mut next = world.clone();
    next.advance();
    next
}

/// Pure form of [`WorldState::trigger_scandal`].
pub fn trigger_scandal(
    world: &WorldState,
    target: CandidateId,
    potential: f64,
) -> Result<WorldState, SimError> {
    let mut next = world.clone();
    next.trigger_scandal(target, potential)?;
    Ok(next)
}
