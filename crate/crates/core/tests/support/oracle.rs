//! Straight-line reference evaluation of the update and tally rules.
//! Plain arrays only; shares no code with the crate under test.

#![allow(dead_code, clippy::manual_clamp, clippy::needless_range_loop)]

#[derive(Debug, Clone)]
pub struct Instance {
    pub appease: f64,
    pub falloff: f64,
    pub attraction_step: f64,
    pub social_step: f64,
    pub social_sign: f64,
    /// Candidates in ascending id order.
    pub cand_xy: Vec<[f64; 2]>,
    pub gamma: Vec<f64>,
    /// (candidate index, potential)
    pub scandals: Vec<(usize, f64)>,
    pub voter_xy: Vec<[f64; 2]>,
    /// (openness, charisma, tolerance, conformity)
    pub traits: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub gamma: Vec<f64>,
    pub voter_xy: Vec<[f64; 2]>,
    /// Vote count per candidate index, then abstentions.
    pub votes: Vec<u64>,
    pub abstentions: u64,
}

fn clamp01(v: f64) -> f64 {
    if v < 0.0 {
        0.0
    } else if v > 1.0 {
        1.0
    } else {
        v
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn tally(inst: &Instance) -> (Vec<u64>, u64) {
    let mut votes = vec![0u64; inst.cand_xy.len()];
    let mut abstentions = 0;
    for (v, xy) in inst.voter_xy.iter().enumerate() {
        let [sigma, _, theta, _] = inst.traits[v];
        let mut best: Option<(usize, f64)> = None;
        for c in 0..inst.cand_xy.len() {
            let d = dist(*xy, inst.cand_xy[c]);
            if d <= sigma && inst.gamma[c] < theta && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((c, d));
            }
        }
        match best {
            Some((c, _)) => votes[c] += 1,
            None => abstentions += 1,
        }
    }
    (votes, abstentions)
}

pub fn frame(inst: &Instance) -> Frame {
    let (votes, abstentions) = tally(inst);
    Frame {
        gamma: inst.gamma.clone(),
        voter_xy: inst.voter_xy.clone(),
        votes,
        abstentions,
    }
}

/// One tick. `injected` scandals join before decay.
pub fn tick(inst: &mut Instance, injected: &[(usize, f64)]) {
    inst.scandals.extend_from_slice(injected);

    let mut alive = Vec::new();
    for &(c, rho) in &inst.scandals {
        let next = clamp01(rho - inst.falloff);
        if next > 0.0 {
            alive.push((c, next));
        }
    }
    inst.scandals = alive;

    for c in 0..inst.gamma.len() {
        let mut g = inst.gamma[c] - inst.appease;
        for &(target, rho) in &inst.scandals {
            if target == c {
                g += rho;
            }
        }
        inst.gamma[c] = clamp01(g);
    }

    let old = inst.voter_xy.clone();
    for v in 0..old.len() {
        let [sigma, _, theta, eta] = inst.traits[v];
        let x = old[v];
        let mut nx = x[0];
        let mut ny = x[1];

        let mut target: Option<(usize, f64)> = None;
        for c in 0..inst.cand_xy.len() {
            if inst.gamma[c] >= theta {
                continue;
            }
            let d = dist(x, inst.cand_xy[c]);
            if target.is_none_or(|(_, bd)| d < bd) {
                target = Some((c, d));
            }
        }
        if let Some((c, d)) = target {
            if d >= inst.attraction_step {
                let scale = inst.attraction_step / (1.0 + inst.gamma[c]);
                nx += scale * (inst.cand_xy[c][0] - x[0]) / d;
                ny += scale * (inst.cand_xy[c][1] - x[1]) / d;
            }
        }

        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut n = 0usize;
        for u in 0..old.len() {
            if u == v || dist(x, old[u]) >= sigma {
                continue;
            }
            let kappa = inst.traits[u][1];
            sx += kappa * inst.social_sign * (old[u][0] - x[0]);
            sy += kappa * inst.social_sign * (old[u][1] - x[1]);
            n += 1;
        }
        let norm = inst.social_step * eta / (n.max(1) as f64);
        nx += norm * sx;
        ny += norm * sy;

        inst.voter_xy[v] = [clamp01(nx), clamp01(ny)];
    }
}

/// Frames for times 0..=steps. `schedule[t]` holds scandals injected at time t.
pub fn trajectory(mut inst: Instance, schedule: &[Vec<(usize, f64)>], steps: usize) -> Vec<Frame> {
    let mut out = vec![frame(&inst)];
    for t in 0..steps {
        let injected = schedule.get(t).cloned().unwrap_or_default();
        tick(&mut inst, &injected);
        out.push(frame(&inst));
    }
    out
}
