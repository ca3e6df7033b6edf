//! Live simulation sessions. Each session has one stepper thread that owns
//! the world; clients drive it over a WebSocket and receive snapshots.

pub mod actor;
pub mod protocol;
pub mod server;
pub mod session;

pub use server::{router, AppState, ServiceConfig};
pub use session::{Command, PlayState, SessionCore, Snapshot};
