//! JSON envelopes `{ "type", "seq", "payload" }` in both directions.

use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Map, Value};
use votesim_core::{CandidateId, CandidateSpec, Point, SimParams};

use crate::session::{Command, CommandError, Snapshot};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateInput {
    id: u32,
    #[serde(default)]
    label: Option<String>,
    x: f64,
    y: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurePayload {
    #[serde(default)]
    params: Option<Map<String, Value>>,
    #[serde(default)]
    candidates: Option<Vec<CandidateInput>>,
}

impl ConfigurePayload {
    /// Fills omitted params with defaults. `num_candidates` follows the
    /// candidate list when only the list is given.
    pub fn resolve(self) -> Result<(SimParams, Vec<CandidateSpec>), CommandError> {
        let mut raw = self.params.unwrap_or_default();
        if let Some(list) = &self.candidates {
            raw.entry("num_candidates").or_insert(json!(list.len()));
        }
        let params: SimParams = serde_json::from_value(Value::Object(raw))
            .map_err(|e| CommandError::new("invalid_payload", format!("params: {e}")))?;
        let candidates = match self.candidates {
            Some(list) => list
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    let label = c.label.unwrap_or_else(|| format!("C{}", i + 1));
                    CandidateSpec::new(c.id, label, Point::new(c.x, c.y))
                })
                .collect(),
            None => CandidateSpec::default_line(params.num_candidates),
        };
        Ok((params, candidates))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeedPayload {
    steps_per_second: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScandalPayload {
    candidate: u32,
    potential: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ResetPayload {
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
struct Envelope {
    #[serde(rename = "type")]
    kind: String,
    seq: u64,
    #[serde(default)]
    payload: Value,
}

/// A rejected message. `seq` is recovered when the envelope was readable.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub seq: Option<u64>,
    pub error: CommandError,
}

fn payload<T: for<'de> Deserialize<'de> + Default>(value: Value) -> Result<T, CommandError> {
    if value.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(value).map_err(|e| CommandError::new("invalid_payload", e.to_string()))
}

fn required<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, CommandError> {
    serde_json::from_value(value).map_err(|e| CommandError::new("invalid_payload", e.to_string()))
}

pub fn parse_client(text: &str) -> Result<(u64, Command), Rejection> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| Rejection {
        seq: serde_json::from_str::<Value>(text)
            .ok()
            .and_then(|v| v.get("seq").and_then(Value::as_u64)),
        error: CommandError::new("bad_message", e.to_string()),
    })?;
    let seq = env.seq;
    let command = match env.kind.as_str() {
        "configure" => payload::<ConfigurePayload>(env.payload)
            .and_then(ConfigurePayload::resolve)
            .map(|(params, candidates)| Command::Configure { params, candidates }),
        "start" => Ok(Command::Start),
        "pause" => Ok(Command::Pause),
        "resume" => Ok(Command::Resume),
        "set_speed" => required::<SpeedPayload>(env.payload).map(|p| Command::SetSpeed(p.steps_per_second)),
        "trigger_scandal" => required::<ScandalPayload>(env.payload).map(|p| Command::TriggerScandal {
            candidate: CandidateId(p.candidate),
            potential: p.potential,
        }),
        "reset" => payload::<ResetPayload>(env.payload).map(|p| Command::Reset { seed: p.seed }),
        "request_snapshot" => Ok(Command::RequestSnapshot),
        other => Err(CommandError::new(
            "unknown_type",
            format!("unknown message type `{other}`"),
        )),
    };
    command
        .map(|c| (seq, c))
        .map_err(|error| Rejection { seq: Some(seq), error })
}

#[derive(Debug, Clone)]
pub enum ServerMessage {
    Ack { seq: u64, effective_step: u64 },
    Error { seq: Option<u64>, code: &'static str, message: String },
    /// `seq` is set when the snapshot answers a `request_snapshot`.
    Snapshot { seq: Option<u64>, snapshot: Arc<Snapshot> },
}

impl ServerMessage {
    pub fn error(seq: Option<u64>, e: CommandError) -> Self {
        ServerMessage::Error {
            seq,
            code: e.code,
            message: e.message,
        }
    }

    pub fn to_json(&self) -> String {
        let value = match self {
            ServerMessage::Ack { seq, effective_step } => json!({
                "type": "ack",
                "seq": seq,
                "payload": { "effective_step": effective_step },
            }),
            ServerMessage::Error { seq, code, message } => json!({
                "type": "error",
                "seq": seq,
                "payload": { "code": code, "message": message },
            }),
            ServerMessage::Snapshot { seq, snapshot } => json!({
                "type": "snapshot",
                "seq": seq,
                "payload": snapshot.as_ref(),
            }),
        };
        value.to_string()
    }
}
