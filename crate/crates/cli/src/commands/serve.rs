use phasemu_service::{serve, ServeConfig};

use crate::args::ServeArgs;
use crate::error::{CliError, CliResult};

pub fn run(a: ServeArgs) -> CliResult {
    if a.max_sessions == 0 {
        return Err(CliError::Usage("--max-sessions must be at least 1".into()));
    }
    if let Some(dir) = &a.ui_dir {
        if !dir.is_dir() {
            return Err(CliError::io(dir, "not a directory"));
        }
    }
    tracing_subscriber::fmt().with_target(false).init();
    let config = ServeConfig {
        host: a.host,
        port: a.port,
        max_sessions: a.max_sessions,
        ui_dir: a.ui_dir,
    };
    tokio::runtime::Runtime::new()
        .map_err(|e| CliError::Io(e.to_string()))?
        .block_on(serve(config))
        .map_err(|e| CliError::Io(format!("server: {e}")))
}
