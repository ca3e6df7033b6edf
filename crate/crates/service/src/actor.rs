use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use tokio::sync::{mpsc::UnboundedSender, watch};

use crate::protocol::ServerMessage;
use crate::session::{Command, PlayState, SessionCore, Snapshot};

pub struct Request {
    pub seq: u64,
    pub command: Command,
    /// Outbox of the connection that sent the command.
    pub reply: UnboundedSender<ServerMessage>,
}

/// Cheap to clone; the stepper thread exits once every clone is dropped.
#[derive(Clone)]
pub struct SessionHandle {
    commands: mpsc::Sender<Request>,
    snapshots: watch::Receiver<Arc<Snapshot>>,
}

impl SessionHandle {
    pub fn send(&self, request: Request) -> bool {
        self.commands.send(request).is_ok()
    }

    pub fn subscribe(&self) -> watch::Receiver<Arc<Snapshot>> {
        self.snapshots.clone()
    }
}

pub fn spawn(core: SessionCore) -> SessionHandle {
    let (commands, rx) = mpsc::channel();
    let (publish, snapshots) = watch::channel(Arc::new(core.snapshot()));
    thread::Builder::new()
        .name("session".into())
        .spawn(move || stepper(core, rx, publish))
        .expect("spawn session thread");
    SessionHandle {
        commands,
        snapshots,
    }
}

fn period(rate: f64) -> Duration {
    Duration::from_secs_f64(1.0 / rate).max(Duration::from_micros(1))
}

fn stepper(mut core: SessionCore, rx: mpsc::Receiver<Request>, publish: watch::Sender<Arc<Snapshot>>) {
    let mut next_tick = Instant::now();
    loop {
        let request = match core.play_state() {
            PlayState::Paused => match rx.recv() {
                Ok(r) => Some(r),
                Err(_) => return,
            },
            PlayState::Running => {
                let now = Instant::now();
                if now >= next_tick {
                    None
                } else {
                    match rx.recv_timeout(next_tick - now) {
                        Ok(r) => Some(r),
                        Err(RecvTimeoutError::Timeout) => None,
                        Err(RecvTimeoutError::Disconnected) => return,
                    }
                }
            }
        };

        let Some(Request { seq, command, reply }) = request else {
            core.step();
            publish.send_replace(Arc::new(core.snapshot()));
            next_tick = (next_tick + period(core.tick_rate())).max(Instant::now());
            continue;
        };

        let was_running = core.play_state() == PlayState::Running;
        let wants_snapshot = command == Command::RequestSnapshot;
        let retimes = matches!(command, Command::SetSpeed(_));
        match core.apply(command) {
            Ok(applied) => {
                let _ = reply.send(ServerMessage::Ack {
                    seq,
                    effective_step: applied.effective_step,
                });
                if wants_snapshot {
                    let _ = reply.send(ServerMessage::Snapshot {
                        seq: Some(seq),
                        snapshot: Arc::new(core.snapshot()),
                    });
                }
                if applied.publish {
                    publish.send_replace(Arc::new(core.snapshot()));
                }
                let started = !was_running && core.play_state() == PlayState::Running;
                if started || retimes {
                    next_tick = Instant::now() + period(core.tick_rate());
                }
            }
            Err(e) => {
                let _ = reply.send(ServerMessage::error(Some(seq), e));
            }
        }
    }
}
