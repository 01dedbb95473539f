//! JSON wire messages. Every message is an object tagged by `"type"`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Open {
        seed: i64,
        theta1_deg: f64,
        theta2_deg: f64,
        rate: f64,
    },
    SetAngles {
        theta1_deg: f64,
        theta2_deg: f64,
        /// Optional guard: rejected unless it names the connection's session.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        session: Option<u64>,
    },
    Pause,
    Resume,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Snapshot {
        session: u64,
        theta1_deg: f64,
        theta2_deg: f64,
        exact: f64,
        /// Samples in the current trace.
        step: usize,
        /// Tick the next sample will use.
        tick: i64,
        /// Most recent running correlations, oldest first.
        window: Vec<f64>,
        paused: bool,
        rate: f64,
        scheme: String,
        basis: String,
    },
    Sample {
        step: usize,
        tick: i64,
        a: f64,
        b: f64,
        c: f64,
        red: [f64; 2],
        green: [f64; 2],
        exact: f64,
    },
    Reset {
        exact: f64,
        theta1_deg: f64,
        theta2_deg: f64,
        tick: i64,
    },
    Error {
        message: String,
    },
}

impl ServerMessage {
    pub fn error(message: impl Into<String>) -> Self {
        ServerMessage::Error {
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}
