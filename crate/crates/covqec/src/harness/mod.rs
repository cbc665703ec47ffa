//! Command-line plumbing: configuration resolution, the subcommands, CSV and
//! SVG output, and the invariant suite behind `verify`.

mod cli;
mod commands;
mod config;
mod output;
mod verify;

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::codes::CodeError;
use crate::protocol::ProtocolError;
use crate::sdp::SdpError;

pub use cli::{run, Cli, Command, CommonArgs, SdpCheckArgs, VerifyArgs};
pub use commands::{
    cmd_bounds, cmd_sdp_check, cmd_simulate, cmd_sweep, default_grid, sdp_cross_validation, SdpCheckSummary,
};
pub use config::{Format, ModelKind, RunConfig};
pub use output::{format_float, render_svg, sweep_csv, RESULT_COLUMNS};
pub use verify::{run_checks, CheckOutcome, FaultHook, MODULES};

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad flags or config; the binary exits with status 2.
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}
