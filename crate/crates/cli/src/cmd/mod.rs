pub mod decompose;
pub mod simulate;
pub mod sweep;
pub mod verify;

use std::fmt::Display;
use std::process::ExitCode;

/// Exit status contract: 0 success, 1 failed check, 2 usage error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    ChecksFailed,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::ChecksFailed
        }
    }

    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Pass => ExitCode::SUCCESS,
            Outcome::ChecksFailed => ExitCode::from(1),
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(e: impl Display) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }

    pub fn internal(e: impl Display) -> Self {
        Failure {
            code: 2,
            message: format!("internal: {e}"),
        }
    }
}
