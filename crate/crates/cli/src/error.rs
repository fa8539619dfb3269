//! Maps library errors onto exit codes: 2 for bad input, 3 for numerics.

use hhl_poisson::circuit::CircuitError;
use hhl_poisson::linalg::LinalgError;
use hhl_poisson::{HhlError, SimError, StackError, SweepError};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

pub struct CliError {
    pub code: u8,
    pub source: anyhow::Error,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn usage(source: anyhow::Error) -> Self {
        Self {
            code: EXIT_USAGE,
            source,
        }
    }

    pub fn numerical(source: anyhow::Error) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            source,
        }
    }
}

fn linalg_code(e: &LinalgError) -> u8 {
    match e {
        LinalgError::DimensionMismatch { .. } | LinalgError::UnsupportedDimension(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn hhl_code(e: &HhlError) -> u8 {
    match e {
        HhlError::InvalidConfig(_) | HhlError::Inapplicable | HhlError::Circuit(_) => EXIT_USAGE,
        HhlError::Linalg(l) => linalg_code(l),
        HhlError::Sim(SimError::UnsupportedWidth(_)) => EXIT_USAGE,
        HhlError::RotationDomain { .. } | HhlError::UndefinedError | HhlError::Sim(_) => EXIT_NUMERICAL,
    }
}

fn stack_code(e: &StackError) -> u8 {
    match e {
        StackError::Linalg(l) => linalg_code(l),
        _ => EXIT_USAGE,
    }
}

impl From<HhlError> for CliError {
    fn from(e: HhlError) -> Self {
        Self {
            code: hhl_code(&e),
            source: e.into(),
        }
    }
}

impl From<StackError> for CliError {
    fn from(e: StackError) -> Self {
        Self {
            code: stack_code(&e),
            source: e.into(),
        }
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        Self::usage(e.into())
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        let code = match &e {
            SweepError::Hhl(h) => hhl_code(h),
            SweepError::Stack(s) => stack_code(s),
            SweepError::NoSolution(_) => EXIT_NUMERICAL,
            SweepError::InvalidRequest(_) | SweepError::Csv(_) | SweepError::Io(_) => EXIT_USAGE,
        };
        Self { code, source: e.into() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.into())
    }
}
