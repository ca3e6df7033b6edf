//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! The page runs the model locally in the browser; no server is involved.

use serde::{Deserialize, Serialize};
use votesim_core::{init_world, tally, CandidateId, CandidateSpec, Point, SimParams, WorldState};
use wasm_bindgen::prelude::*;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateInput {
    id: u32,
    #[serde(default)]
    label: Option<String>,
    x: f64,
    y: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default)]
    params: Option<SimParams>,
    #[serde(default)]
    candidates: Option<Vec<CandidateInput>>,
}

#[derive(Serialize)]
struct CandidateView<'a> {
    id: CandidateId,
    label: &'a str,
    x: f64,
    y: f64,
    repulsion: f64,
    votes: u64,
    share: f64,
}

#[derive(Serialize)]
struct TallyView<'a> {
    time: u64,
    candidates: Vec<CandidateView<'a>>,
    abstentions: u64,
    abstention_rate: f64,
    active_scandals: usize,
}

#[wasm_bindgen]
pub struct Simulation {
    world: WorldState,
}

impl Simulation {
    /// `config` is `{ "params": {...}, "candidates": [{id, label?, x, y}] }`;
    /// both keys are optional. An empty string means all defaults.
    pub fn from_config(config: &str) -> Result<Simulation, String> {
        let config: Config = if config.trim().is_empty() {
            Config::default()
        } else {
            serde_json::from_str(config).map_err(|e| e.to_string())?
        };
        let mut params = config.params.unwrap_or_default();
        let candidates = match config.candidates {
            Some(list) => {
                params.num_candidates = list.len();
                list.into_iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let label = c.label.unwrap_or_else(|| format!("C{}", i + 1));
                        CandidateSpec::new(c.id, label, Point::new(c.x, c.y))
                    })
                    .collect()
            }
            None => CandidateSpec::default_line(params.num_candidates),
        };
        let world = init_world(&params, &candidates).map_err(|e| e.to_string())?;
        Ok(Simulation { world })
    }

    pub fn try_trigger(&mut self, candidate: u32, potential: f64) -> Result<(), String> {
        self.world
            .trigger_scandal(CandidateId(candidate), potential)
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(config: &str) -> Result<Simulation, JsError> {
        Simulation::from_config(config).map_err(|e| JsError::new(&e))
    }

    /// Advances `steps` ticks.
    pub fn step(&mut self, steps: u32) {
        for _ in 0..steps {
            self.world.advance();
        }
    }

    /// Takes effect on the next step.
    pub fn trigger_scandal(&mut self, candidate: u32, potential: f64) -> Result<(), JsError> {
        self.try_trigger(candidate, potential).map_err(|e| JsError::new(&e))
    }

    pub fn time(&self) -> f64 {
        self.world.time as f64
    }

    /// Flattened voter positions `[x0, y0, x1, y1, ...]`.
    pub fn positions(&self) -> Vec<f64> {
        self.world
            .voters
            .iter()
            .flat_map(|v| [v.position.x, v.position.y])
            .collect()
    }

    /// Candidate index each voter would vote for now, or -1 to abstain.
    pub fn ballots(&self) -> Vec<i32> {
        self.world
            .voters
            .iter()
            .map(|v| votesim_core::tally::ballot(v, &self.world).map_or(-1, |i| i as i32))
            .collect()
    }

    /// Candidates with repulsion and current votes, as JSON.
    pub fn tally_json(&self) -> String {
        let result = tally(&self.world);
        let view = TallyView {
            time: self.world.time,
            candidates: self
                .world
                .candidates
                .iter()
                .map(|c| CandidateView {
                    id: c.id,
                    label: &c.label,
                    x: c.position.x,
                    y: c.position.y,
                    repulsion: c.repulsion,
                    votes: result.votes[&c.id],
                    share: result.share(c.id),
                })
                .collect(),
            abstentions: result.abstentions,
            abstention_rate: result.abstention_rate(),
            active_scandals: self.world.scandals.len(),
        };
        serde_json::to_string(&view).expect("tally serializes")
    }
}
