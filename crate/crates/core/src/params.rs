//! Global simulation knobs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sign applied to the conformity term of the voter update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SocialSign {
    /// Voters drift toward their neighbours.
    #[default]
    Attract,
    /// Voters drift away from their neighbours, `κ(y)(ψ(x) − ψ(y))` as literally written.
    RepelLiteral,
}

impl SocialSign {
    pub fn factor(self) -> f64 {
        match self {
            SocialSign::Attract => 1.0,
            SocialSign::RepelLiteral => -1.0,
        }
    }
}

/// All global parameters of a run. Distances are in canonical `[0,1]²` units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    pub num_voters: usize,
    pub num_candidates: usize,
    /// Per-step decrease of candidate repulsion (Δα).
    pub appeasement_delta: f64,
    /// Per-step decrease of scandal potential (Δρ).
    pub falloff_rate: f64,
    /// Upper bound of voter openness (σ_max).
    pub max_openness: f64,
    /// Upper bound of voter tolerance (θ_max). Values above 1 make some
    /// voters immune to dismissal, since repulsion never exceeds 1.
    pub max_tolerance: f64,
    /// Distance a voter moves toward its target candidate per step (λ_c).
    pub candidate_attraction_step: f64,
    /// Scale of the conformity displacement per step (λ_s).
    pub social_step: f64,
    pub social_sign: SocialSign,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            num_voters: 1000,
            num_candidates: 5,
            appeasement_delta: 0.01,
            falloff_rate: 0.01,
            max_openness: 0.3,
            max_tolerance: 1.0,
            candidate_attraction_step: 0.005,
            social_step: 0.01,
            social_sign: SocialSign::Attract,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {reason}")]
pub struct ParamError {
    pub field: &'static str,
    pub reason: String,
}

impl ParamError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        ParamError {
            field,
            reason: reason.into(),
        }
    }
}

fn check_unit(field: &'static str, value: f64) -> Result<(), ParamError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(ParamError::new(field, format!("value {value} outside [0, 1]")));
    }
    Ok(())
}

fn check_nonneg(field: &'static str, value: f64) -> Result<(), ParamError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ParamError::new(
            field,
            format!("value {value} must be finite and >= 0"),
        ));
    }
    Ok(())
}

impl SimParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        check_unit("appeasement_delta", self.appeasement_delta)?;
        check_unit("falloff_rate", self.falloff_rate)?;
        check_nonneg("max_openness", self.max_openness)?;
        check_nonneg("max_tolerance", self.max_tolerance)?;
        check_nonneg("social_step", self.social_step)?;
        if !self.candidate_attraction_step.is_finite() || self.candidate_attraction_step <= 0.0 {
            return Err(ParamError::new(
                "candidate_attraction_step",
                format!("value {} must be finite and > 0", self.candidate_attraction_step),
            ));
        }
        Ok(())
    }
}
