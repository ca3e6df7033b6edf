use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::ws::{CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use futures_util::{SinkExt, StreamExt};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::mpsc::{self, UnboundedReceiver};
use tokio::time::Instant;

use crate::actor::{self, Request, SessionHandle};
use crate::protocol::{parse_client, ConfigurePayload, ServerMessage};
use crate::session::{CommandError, SessionCore};

/// Close code sent when a client connects to a session that does not exist.
pub const CLOSE_UNKNOWN_SESSION: u16 = 4404;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Per-connection snapshot cap unless the client asks via `?max_rate=`.
    /// Zero means unthrottled.
    pub max_snapshots_per_sec: f64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            max_snapshots_per_sec: 30.0,
        }
    }
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, SessionHandle>>>,
    config: Arc<ServiceConfig>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            sessions: Arc::default(),
            config: Arc::new(config),
        }
    }

    fn session(&self, id: &str) -> Option<SessionHandle> {
        self.sessions.lock().expect("session map").get(id).cloned()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", delete(delete_session))
        .route("/sessions/{id}/ws", get(channel))
        .with_state(state)
}

async fn healthz(State(state): State<AppState>) -> Json<serde_json::Value> {
    let sessions = state.sessions.lock().expect("session map").len();
    Json(json!({ "status": "ok", "sessions": sessions }))
}

fn rejected(e: CommandError) -> Response {
    (
        StatusCode::BAD_REQUEST,
        Json(json!({ "code": e.code, "message": e.message })),
    )
        .into_response()
}

/// Body is an optional `configure` payload.
async fn create_session(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    let payload = if body.iter().all(u8::is_ascii_whitespace) {
        ConfigurePayload::default()
    } else {
        match serde_json::from_slice::<ConfigurePayload>(&body) {
            Ok(p) => p,
            Err(e) => return rejected(CommandError::new("invalid_payload", e.to_string())),
        }
    };
    let core = match payload
        .resolve()
        .and_then(|(params, candidates)| SessionCore::new(params, candidates))
    {
        Ok(core) => core,
        Err(e) => return rejected(e),
    };
    let id = uuid::Uuid::new_v4().simple().to_string();
    state
        .sessions
        .lock()
        .expect("session map")
        .insert(id.clone(), actor::spawn(core));

    let channel = format!("/sessions/{id}/ws");
    let mut body = json!({ "id": id, "channel": channel });
    if let Some(host) = headers.get(header::HOST).and_then(|h| h.to_str().ok()) {
        body["url"] = json!(format!("ws://{host}{channel}"));
    }
    (StatusCode::CREATED, Json(body)).into_response()
}

async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> StatusCode {
    match state.sessions.lock().expect("session map").remove(&id) {
        Some(_) => StatusCode::NO_CONTENT,
        None => StatusCode::NOT_FOUND,
    }
}

#[derive(Deserialize)]
struct ChannelQuery {
    max_rate: Option<f64>,
}

async fn channel(
    ws: WebSocketUpgrade,
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<ChannelQuery>,
) -> Response {
    let handle = state.session(&id);
    let rate = query
        .max_rate
        .filter(|r| r.is_finite() && *r >= 0.0)
        .unwrap_or(state.config.max_snapshots_per_sec);
    ws.on_upgrade(move |socket| async move {
        match handle {
            Some(h) => connection(socket, h, rate).await,
            None => refuse(socket, &id).await,
        }
    })
}

async fn refuse(mut socket: WebSocket, id: &str) {
    let err = ServerMessage::error(
        None,
        CommandError::new("unknown_session", format!("no session `{id}`")),
    );
    let _ = socket.send(Message::Text(err.to_json().into())).await;
    let _ = socket
        .send(Message::Close(Some(CloseFrame {
            code: CLOSE_UNKNOWN_SESSION,
            reason: "unknown_session".into(),
        })))
        .await;
}

fn text(msg: &ServerMessage) -> Message {
    Message::Text(msg.to_json().into())
}

/// Sends everything already queued in the outbox.
async fn flush_outbox<S>(sink: &mut S, outbox: &mut UnboundedReceiver<ServerMessage>) -> bool
where
    S: SinkExt<Message> + Unpin,
{
    while let Ok(m) = outbox.try_recv() {
        if sink.send(text(&m)).await.is_err() {
            return false;
        }
    }
    true
}

async fn connection(socket: WebSocket, handle: SessionHandle, max_rate: f64) {
    let (mut sink, mut stream) = socket.split();
    let (reply, mut outbox) = mpsc::unbounded_channel();
    let mut snapshots = handle.subscribe();
    let interval = if max_rate > 0.0 {
        Duration::from_secs_f64(1.0 / max_rate)
    } else {
        Duration::ZERO
    };

    let current = snapshots.borrow_and_update().clone();
    let first = ServerMessage::Snapshot {
        seq: None,
        snapshot: current,
    };
    if sink.send(text(&first)).await.is_err() {
        return;
    }
    let mut next_allowed = Instant::now() + interval;
    let mut pending = false;

    loop {
        tokio::select! {
            biased;
            Some(m) = outbox.recv() => {
                if sink.send(text(&m)).await.is_err() {
                    break;
                }
            }
            incoming = stream.next() => match incoming {
                Some(Ok(Message::Text(t))) => match parse_client(t.as_str()) {
                    Ok((seq, command)) => {
                        let request = Request { seq, command, reply: reply.clone() };
                        if !handle.send(request) {
                            break;
                        }
                    }
                    Err(r) => {
                        let _ = reply.send(ServerMessage::error(r.seq, r.error));
                    }
                },
                Some(Ok(Message::Binary(_))) => {
                    let e = CommandError::new("bad_message", "binary frames are not supported");
                    let _ = reply.send(ServerMessage::error(None, e));
                }
                Some(Ok(Message::Close(_))) | Some(Err(_)) | None => break,
                Some(Ok(_)) => {}
            },
            changed = snapshots.changed(), if !pending => {
                if changed.is_err() {
                    break;
                }
                pending = true;
            }
            _ = tokio::time::sleep_until(next_allowed), if pending => {
                // Borrow before flushing so acks for this state go out first.
                let snapshot = snapshots.borrow_and_update().clone();
                if !flush_outbox(&mut sink, &mut outbox).await {
                    break;
                }
                if sink.send(text(&ServerMessage::Snapshot { seq: None, snapshot })).await.is_err() {
                    break;
                }
                pending = false;
                next_allowed = Instant::now() + interval;
            }
        }
    }
}
