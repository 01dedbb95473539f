//! Streaming backend for the interactive EPR explorer.
//!
//! Each websocket connection owns at most one [`EprSession`]. Control
//! messages and sample emission run on the same task, so the order of ticks
//! seen by a client is total and replayable from the seed and the control
//! messages.

pub mod protocol;
pub mod server;
pub mod session;

pub use protocol::{ClientMessage, ServerMessage};
pub use server::{router, serve, AppState, ServeConfig};
pub use session::{EprSession, SessionError, MAX_RATE, MIN_RATE};
