//! Scenario files: TOML documents describing one headless run.
//!
//! ```toml
//! schema_version = 1
//!
//! [params]
//! num_voters = 500
//! seed = 7
//!
//! [[candidates]]
//! id = 0
//! label = "Left"
//! x = 0.2
//! y = 0.5
//!
//! [schedule]
//! run_length = 500
//! scandals = [{ step = 100, candidate = 0, potential = 0.8 }]
//!
//! [output]
//! record_voters = false
//! ```
//!
//! Unknown keys are rejected everywhere. Omitted parameters take the
//! simulator defaults; omitted candidates are spread along `y = 0.5`.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use votesim_core::engine::{ScenarioSchedule, ScheduleError, ScheduledScandal, DEFAULT_RUN_LENGTH};
use votesim_core::{CandidateId, CandidateSpec, Point, SimError, SimParams, SocialSign};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {reason}")]
    Schema { path: String, reason: String },
}

impl ScenarioError {
    fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    #[serde(default)]
    params: RawParams,
    candidates: Option<Vec<RawCandidate>>,
    #[serde(default)]
    schedule: RawSchedule,
    #[serde(default)]
    output: OutputOptions,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    num_voters: Option<usize>,
    num_candidates: Option<usize>,
    appeasement_delta: Option<f64>,
    falloff_rate: Option<f64>,
    max_openness: Option<f64>,
    max_tolerance: Option<f64>,
    candidate_attraction_step: Option<f64>,
    social_step: Option<f64>,
    social_sign: Option<SocialSign>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCandidate {
    id: u32,
    label: Option<String>,
    x: f64,
    y: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    run_length: Option<u64>,
    #[serde(default)]
    scandals: Vec<RawScandal>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScandal {
    step: u64,
    candidate: u32,
    potential: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputOptions {
    pub record_voters: bool,
    pub trajectory: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            record_voters: false,
            trajectory: true,
        }
    }
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: SimParams,
    pub candidates: Vec<CandidateSpec>,
    pub schedule: ScenarioSchedule,
    pub output: OutputOptions,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        raw.resolve()
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(seed) = seed {
            self.params.seed = seed;
        }
        self
    }
}

impl RawScenario {
    fn resolve(self) -> Result<Scenario, ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::schema(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }

        let defaults = SimParams::default();
        let p = self.params;
        let mut params = SimParams {
            num_voters: p.num_voters.unwrap_or(defaults.num_voters),
            num_candidates: p.num_candidates.unwrap_or(defaults.num_candidates),
            appeasement_delta: p.appeasement_delta.unwrap_or(defaults.appeasement_delta),
            falloff_rate: p.falloff_rate.unwrap_or(defaults.falloff_rate),
            max_openness: p.max_openness.unwrap_or(defaults.max_openness),
            max_tolerance: p.max_tolerance.unwrap_or(defaults.max_tolerance),
            candidate_attraction_step: p
                .candidate_attraction_step
                .unwrap_or(defaults.candidate_attraction_step),
            social_step: p.social_step.unwrap_or(defaults.social_step),
            social_sign: p.social_sign.unwrap_or(defaults.social_sign),
            seed: p.seed.unwrap_or(defaults.seed),
        };
        params
            .validate()
            .map_err(|e| ScenarioError::schema(format!("params.{}", e.field), e.reason))?;

        let candidates = match self.candidates {
            None => CandidateSpec::default_line(params.num_candidates),
            Some(list) => {
                if let Some(n) = p.num_candidates {
                    if n != list.len() {
                        return Err(ScenarioError::schema(
                            "params.num_candidates",
                            format!("{n} does not match the {} listed candidates", list.len()),
                        ));
                    }
                }
                params.num_candidates = list.len();
                let mut out = Vec::with_capacity(list.len());
                for (i, c) in list.into_iter().enumerate() {
                    for (axis, v) in [("x", c.x), ("y", c.y)] {
                        if !(0.0..=1.0).contains(&v) {
                            return Err(ScenarioError::schema(
                                format!("candidates[{i}].{axis}"),
                                format!("value {v} outside [0, 1]"),
                            ));
                        }
                    }
                    if out.iter().any(|o: &CandidateSpec| o.id.0 == c.id) {
                        return Err(ScenarioError::schema(
                            format!("candidates[{i}].id"),
                            format!("duplicate id {}", c.id),
                        ));
                    }
                    let label = c.label.unwrap_or_else(|| format!("C{}", i + 1));
                    out.push(CandidateSpec::new(c.id, label, Point::new(c.x, c.y)));
                }
                out
            }
        };

        let schedule = ScenarioSchedule {
            entries: self
                .schedule
                .scandals
                .into_iter()
                .map(|s| ScheduledScandal {
                    step: s.step,
                    candidate: CandidateId(s.candidate),
                    potential: s.potential,
                })
                .collect(),
            run_length: self.schedule.run_length.unwrap_or(DEFAULT_RUN_LENGTH),
        };
        let ids: Vec<CandidateId> = candidates.iter().map(|c| c.id).collect();
        schedule.validate(&ids).map_err(schedule_error)?;

        Ok(Scenario {
            params,
            candidates,
            schedule,
            output: self.output,
        })
    }
}

fn schedule_error(e: ScheduleError) -> ScenarioError {
    match e {
        ScheduleError::StepOutOfRange { index, step, run_length } => ScenarioError::schema(
            format!("schedule.scandals[{index}].step"),
            format!("step {step} is not before run_length {run_length}"),
        ),
        ScheduleError::Unsorted { index, step } => ScenarioError::schema(
            format!("schedule.scandals[{index}].step"),
            format!("step {step} precedes the previous entry"),
        ),
        ScheduleError::Entry { index, source } => {
            let field = match source {
                SimError::PotentialOutOfRange(_) => "potential",
                _ => "candidate",
            };
            ScenarioError::schema(format!("schedule.scandals[{index}].{field}"), source.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema_path(text: &str) -> String {
        match Scenario::parse(text) {
            Err(ScenarioError::Schema { path, .. }) => path,
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_scenario_uses_defaults() {
        let s = Scenario::parse("schema_version = 1").unwrap();
        assert_eq!(s.params, SimParams::default());
        assert_eq!(s.candidates, CandidateSpec::default_line(5));
        assert_eq!(s.schedule, ScenarioSchedule::empty(DEFAULT_RUN_LENGTH));
        assert!(s.output.trajectory);
        assert!(!s.output.record_voters);
    }

    #[test]
    fn full_scenario() {
        let s = Scenario::parse(
            r#"
            schema_version = 1
            [params]
            num_voters = 12
            falloff_rate = 0.05
            social_sign = "repel-literal"
            seed = 3
            [[candidates]]
            id = 4
            label = "Left"
            x = 0.2
            y = 0.5
            [[candidates]]
            id = 9
            x = 0.8
            y = 0.5
            [schedule]
            run_length = 20
            scandals = [{ step = 2, candidate = 9, potential = 0.4 }]
            [output]
            record_voters = true
            "#,
        )
        .unwrap();
        assert_eq!(s.params.num_candidates, 2);
        assert_eq!(s.params.social_sign, SocialSign::RepelLiteral);
        assert_eq!(s.candidates[1].label, "C2");
        assert_eq!(s.schedule.entries[0].candidate, CandidateId(9));
        assert!(s.output.record_voters);
        assert_eq!(s.clone().with_seed(Some(8)).params.seed, 8);
        assert_eq!(s.with_seed(None).params.seed, 3);
    }

    #[test]
    fn schema_errors_name_the_field() {
        assert_eq!(
            schema_path(
                "schema_version = 1\n[params]\nnum_candidates = 1\n[schedule]\nrun_length = 5\nscandals = [{ step = 0, candidate = 0, potential = 1.5 }]"
            ),
            "schedule.scandals[0].potential"
        );
        assert_eq!(
            schema_path("schema_version = 1\n[params]\nfalloff_rate = 2.0"),
            "params.falloff_rate"
        );
        assert_eq!(schema_path("schema_version = 2"), "schema_version");
        assert_eq!(
            schema_path("schema_version = 1\n[[candidates]]\nid = 0\nx = 1.5\ny = 0.5"),
            "candidates[0].x"
        );
        assert_eq!(
            schema_path(
                "schema_version = 1\n[params]\nnum_candidates = 1\n[schedule]\nrun_length = 5\nscandals = [{ step = 0, candidate = 3, potential = 0.5 }]"
            ),
            "schedule.scandals[0].candidate"
        );
        assert_eq!(
            schema_path(
                "schema_version = 1\n[params]\nnum_candidates = 2\n[[candidates]]\nid = 0\nx = 0.5\ny = 0.5"
            ),
            "params.num_candidates"
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in [
            "schema_version = 1\nextra = 3",
            "schema_version = 1\n[params]\nspeed = 2",
            "schema_version = 1\n[output]\nplot = true",
        ] {
            assert!(matches!(Scenario::parse(text), Err(ScenarioError::Parse(_))), "{text}");
        }
    }
}
