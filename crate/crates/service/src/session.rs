//! Per-connection session state. Purely synchronous; the server decides when
//! to call [`EprSession::emit_sample`].

use phasemu::epr::{arrow_endpoints, exact_correlation, EprError, EprModel, EprRun};
use phasemu::randomness::PhaseClock;
use thiserror::Error;

use crate::protocol::ServerMessage;

/// Emission rate bounds in samples per second.
pub const MIN_RATE: f64 = 1.0;
pub const MAX_RATE: f64 = 1000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("rate must lie in [{MIN_RATE}, {MAX_RATE}], got {0}")]
    BadRate(f64),
    #[error("session capacity of {0} reached")]
    Capacity(usize),
    #[error("unknown session {0}")]
    UnknownSession(u64),
    #[error("no open session")]
    NotOpen,
    #[error(transparent)]
    Model(#[from] EprError),
}

pub struct EprSession {
    id: u64,
    clock: PhaseClock,
    theta1_deg: f64,
    theta2_deg: f64,
    model: EprModel,
    exact: f64,
    run: EprRun<PhaseClock>,
    paused: bool,
    rate: f64,
}

impl EprSession {
    /// Opens a session whose clock is `counter_hash(seed)` starting at tick 0.
    pub fn open(
        id: u64,
        seed: i64,
        theta1_deg: f64,
        theta2_deg: f64,
        rate: f64,
    ) -> Result<Self, SessionError> {
        if !(MIN_RATE..=MAX_RATE).contains(&rate) {
            return Err(SessionError::BadRate(rate));
        }
        let clock = PhaseClock::counter_hash(seed);
        let model = EprModel::from_degrees(theta1_deg, theta2_deg)?;
        let run = EprRun::new(&model, clock, 0)?;
        Ok(Self {
            id,
            clock,
            theta1_deg,
            theta2_deg,
            exact: exact_correlation(&model),
            model,
            run,
            paused: false,
            rate,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    pub fn exact(&self) -> f64 {
        self.exact
    }

    pub fn model(&self) -> &EprModel {
        &self.model
    }

    pub fn next_tick(&self) -> i64 {
        self.run.next_tick()
    }

    pub fn snapshot(&self) -> ServerMessage {
        ServerMessage::Snapshot {
            session: self.id,
            theta1_deg: self.theta1_deg,
            theta2_deg: self.theta2_deg,
            exact: self.exact,
            step: self.run.correlation().count(),
            tick: self.next_tick(),
            window: self.run.correlation().window().iter().copied().collect(),
            paused: self.paused,
            rate: self.rate,
            scheme: self.clock.scheme().name().to_string(),
            basis: self.model.basis().identifier().to_string(),
        }
    }

    /// Measures the next pair. Works regardless of the paused flag.
    pub fn emit_sample(&mut self) -> Result<ServerMessage, SessionError> {
        let s = self.run.next_sample()?;
        let (red, green) = arrow_endpoints((s.a, s.b), self.model.theta1(), self.model.theta2());
        Ok(ServerMessage::Sample {
            step: s.step,
            tick: s.tick,
            a: s.a,
            b: s.b,
            c: s.c,
            red,
            green,
            exact: self.exact,
        })
    }

    /// Rebuilds the model and clears the trace; ticks continue. Identical
    /// angles still reset. On error the session is left unchanged.
    pub fn set_angles(
        &mut self,
        theta1_deg: f64,
        theta2_deg: f64,
        session: Option<u64>,
    ) -> Result<ServerMessage, SessionError> {
        if let Some(requested) = session {
            if requested != self.id {
                return Err(SessionError::UnknownSession(requested));
            }
        }
        let model = EprModel::from_degrees(theta1_deg, theta2_deg)?;
        let run = EprRun::new(&model, self.clock, self.next_tick())?;
        self.exact = exact_correlation(&model);
        self.model = model;
        self.run = run;
        self.theta1_deg = theta1_deg;
        self.theta2_deg = theta2_deg;
        Ok(ServerMessage::Reset {
            exact: self.exact,
            theta1_deg,
            theta2_deg,
            tick: self.next_tick(),
        })
    }

    pub fn pause(&mut self) {
        self.paused = true;
    }

    pub fn resume(&mut self) {
        self.paused = false;
    }
}
