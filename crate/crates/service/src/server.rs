//! HTTP and websocket front end.
//!
//! Routes: `GET /ws` upgrades to the session protocol, `GET /health` reports
//! liveness and load, and everything else is served read-only from the UI
//! bundle directory (or a placeholder page when none is configured).

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{Html, IntoResponse};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::time::{interval, Interval, MissedTickBehavior};
use tower_http::services::ServeDir;

use crate::protocol::{ClientMessage, ServerMessage};
use crate::session::{EprSession, SessionError};

const PLACEHOLDER_INDEX: &str = "<!doctype html>\n<html><head><title>phasemu</title></head>\n<body><p>No UI bundle configured. Connect a client to <code>/ws</code>.</p></body></html>\n";

#[derive(Clone, Debug)]
pub struct ServeConfig {
    pub host: IpAddr,
    pub port: u16,
    pub max_sessions: usize,
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: 8080,
            max_sessions: 64,
            ui_dir: None,
        }
    }
}

/// Shared server state: session capacity and id allocation.
#[derive(Debug)]
pub struct AppState {
    max_sessions: usize,
    active: AtomicUsize,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(max_sessions: usize) -> Arc<Self> {
        Arc::new(Self {
            max_sessions,
            active: AtomicUsize::new(0),
            next_id: AtomicU64::new(1),
        })
    }

    pub fn active_sessions(&self) -> usize {
        self.active.load(Ordering::SeqCst)
    }

    pub fn max_sessions(&self) -> usize {
        self.max_sessions
    }

    fn acquire(self: &Arc<Self>) -> Result<SessionSlot, SessionError> {
        self.active
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| {
                (n < self.max_sessions).then_some(n + 1)
            })
            .map_err(|_| SessionError::Capacity(self.max_sessions))?;
        Ok(SessionSlot(Arc::clone(self)))
    }

    fn allocate_id(&self) -> u64 {
        self.next_id.fetch_add(1, Ordering::SeqCst)
    }
}

/// Holds one unit of capacity until dropped.
#[derive(Debug)]
struct SessionSlot(Arc<AppState>);

impl Drop for SessionSlot {
    fn drop(&mut self) {
        self.0.active.fetch_sub(1, Ordering::SeqCst);
    }
}

/// Protocol state of one connection.
struct Connection {
    state: Arc<AppState>,
    session: Option<(EprSession, SessionSlot)>,
}

impl Connection {
    fn new(state: Arc<AppState>) -> Self {
        Self {
            state,
            session: None,
        }
    }

    fn session_mut(&mut self) -> Result<&mut EprSession, SessionError> {
        self.session
            .as_mut()
            .map(|(s, _)| s)
            .ok_or(SessionError::NotOpen)
    }

    /// Applies a client message. A second `open` replaces the session and
    /// keeps the capacity slot.
    fn handle(&mut self, msg: ClientMessage) -> Result<ServerMessage, SessionError> {
        match msg {
            ClientMessage::Open {
                seed,
                theta1_deg,
                theta2_deg,
                rate,
            } => {
                let id = self.state.allocate_id();
                let session = EprSession::open(id, seed, theta1_deg, theta2_deg, rate)?;
                let slot = match self.session.take() {
                    Some((_, slot)) => slot,
                    None => self.state.acquire()?,
                };
                let snapshot = session.snapshot();
                self.session = Some((session, slot));
                Ok(snapshot)
            }
            ClientMessage::SetAngles {
                theta1_deg,
                theta2_deg,
                session,
            } => self.session_mut()?.set_angles(theta1_deg, theta2_deg, session),
            ClientMessage::Pause => {
                let s = self.session_mut()?;
                s.pause();
                Ok(s.snapshot())
            }
            ClientMessage::Resume => {
                let s = self.session_mut()?;
                s.resume();
                Ok(s.snapshot())
            }
        }
    }

    fn running(&mut self) -> Option<&mut EprSession> {
        self.session
            .as_mut()
            .map(|(s, _)| s)
            .filter(|s| !s.is_paused())
    }

    fn ticker(&self) -> Option<Interval> {
        self.session.as_ref().map(|(s, _)| {
            let mut t = interval(Duration::from_secs_f64(1.0 / s.rate()));
            t.set_missed_tick_behavior(MissedTickBehavior::Delay);
            t
        })
    }
}

async fn next_tick(ticker: &mut Option<Interval>) {
    match ticker {
        Some(t) => {
            t.tick().await;
        }
        None => std::future::pending().await,
    }
}

async fn send(socket: &mut WebSocket, msg: &ServerMessage) -> bool {
    socket.send(Message::Text(msg.to_json().into())).await.is_ok()
}

async fn run_connection(mut socket: WebSocket, state: Arc<AppState>) {
    let mut conn = Connection::new(state);
    let mut ticker: Option<Interval> = None;
    loop {
        tokio::select! {
            incoming = socket.recv() => {
                let reply = match incoming {
                    None | Some(Err(_)) | Some(Ok(Message::Close(_))) => break,
                    Some(Ok(Message::Text(text))) => {
                        match serde_json::from_str::<ClientMessage>(&text) {
                            Ok(msg) => {
                                let reopened = matches!(msg, ClientMessage::Open { .. });
                                let reply = conn.handle(msg).unwrap_or_else(|e| ServerMessage::error(e.to_string()));
                                if reopened {
                                    ticker = conn.ticker();
                                }
                                reply
                            }
                            Err(e) => ServerMessage::error(format!("malformed message: {e}")),
                        }
                    }
                    Some(Ok(Message::Binary(_))) => ServerMessage::error("binary frames are not supported"),
                    Some(Ok(_)) => continue,
                };
                if !send(&mut socket, &reply).await {
                    break;
                }
            }
            _ = next_tick(&mut ticker) => {
                let Some(session) = conn.running() else { continue };
                let msg = session.emit_sample().unwrap_or_else(|e| ServerMessage::error(e.to_string()));
                if !send(&mut socket, &msg).await {
                    break;
                }
            }
        }
    }
}

async fn ws_handler(ws: WebSocketUpgrade, State(state): State<Arc<AppState>>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| run_connection(socket, state))
}

async fn health(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    Json(json!({
        "status": "ok",
        "active_sessions": state.active_sessions(),
        "max_sessions": state.max_sessions(),
    }))
}

pub fn router(state: Arc<AppState>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/ws", get(ws_handler))
        .route("/health", get(health));
    let api = match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_INDEX) })),
    };
    api.with_state(state)
}

/// Binds the listener and serves until the process ends.
pub async fn serve(config: ServeConfig) -> std::io::Result<()> {
    let listener = TcpListener::bind(SocketAddr::new(config.host, config.port)).await?;
    tracing::info!(addr = %listener.local_addr()?, max_sessions = config.max_sessions, "listening");
    let app = router(AppState::new(config.max_sessions), config.ui_dir);
    axum::serve(listener, app).await
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(seed: i64) -> ClientMessage {
        ClientMessage::Open {
            seed,
            theta1_deg: 0.0,
            theta2_deg: 30.0,
            rate: 10.0,
        }
    }

    #[test]
    fn capacity_is_enforced_and_released() {
        let state = AppState::new(1);
        let mut first = Connection::new(Arc::clone(&state));
        let mut second = Connection::new(Arc::clone(&state));
        assert!(first.handle(open(1)).is_ok());
        assert_eq!(second.handle(open(2)), Err(SessionError::Capacity(1)));
        // Reopening on the same connection reuses its slot.
        assert!(first.handle(open(3)).is_ok());
        assert_eq!(state.active_sessions(), 1);
        drop(first);
        assert_eq!(state.active_sessions(), 0);
        assert!(second.handle(open(2)).is_ok());
    }

    #[test]
    fn control_without_session_is_rejected() {
        let mut conn = Connection::new(AppState::new(4));
        assert_eq!(conn.handle(ClientMessage::Pause), Err(SessionError::NotOpen));
        let set = ClientMessage::SetAngles {
            theta1_deg: 0.0,
            theta2_deg: 0.0,
            session: None,
        };
        assert_eq!(conn.handle(set), Err(SessionError::NotOpen));
    }

    #[test]
    fn bad_open_keeps_previous_session() {
        let state = AppState::new(2);
        let mut conn = Connection::new(Arc::clone(&state));
        conn.handle(open(1)).unwrap();
        let bad = ClientMessage::Open {
            seed: 1,
            theta1_deg: 0.0,
            theta2_deg: 0.0,
            rate: 0.0,
        };
        assert_eq!(conn.handle(bad), Err(SessionError::BadRate(0.0)));
        assert!(conn.running().is_some());
        assert_eq!(state.active_sessions(), 1);
    }

    #[test]
    fn paused_session_is_not_running() {
        let mut conn = Connection::new(AppState::new(1));
        conn.handle(open(1)).unwrap();
        conn.handle(ClientMessage::Pause).unwrap();
        assert!(conn.running().is_none());
        conn.handle(ClientMessage::Resume).unwrap();
        assert!(conn.running().is_some());
    }
}
