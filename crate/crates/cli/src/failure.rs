use std::fmt;
use std::process::ExitCode;

use brjuno::Error;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_PARTIAL: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Downstream reader went away; exit quietly.
    pub silent: bool,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
            silent: false,
        }
    }

    pub fn budget(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BUDGET,
            message: message.into(),
            silent: false,
        }
    }

    pub fn io(err: std::io::Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            silent: err.kind() == std::io::ErrorKind::BrokenPipe,
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::InvalidArgument(_)
        | Error::RationalInput
        | Error::IndexOutOfRange { .. }
        | Error::SeriesTooShort { .. }
        | Error::QCapExceeded { .. }
        | Error::OutsideExplosionDisk { .. } => EXIT_USAGE,
        Error::PrecisionExhausted { .. }
        | Error::ResidualTooLarge { .. }
        | Error::BudgetExhausted(_) => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Self {
            code: exit_code_for(&err),
            message: err.to_string(),
            silent: false,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Self::io(err)
    }
}

impl From<csv::Error> for Failure {
    fn from(err: csv::Error) -> Self {
        let message = err.to_string();
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Self::io(io),
            _ => Self {
                code: EXIT_FAILURE,
                message,
                silent: false,
            },
        }
    }
}
