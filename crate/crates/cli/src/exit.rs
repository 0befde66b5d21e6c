//! Process exit codes.

use std::fmt;

pub const OK: i32 = 0;
pub const NEGATIVE: i32 = 2;
pub const INCONCLUSIVE: i32 = 3;
pub const INTERIOR_ZERO: i32 = 4;
pub const USAGE: i32 = 64;
pub const BAD_PROFILE: i32 = 65;
pub const INTERNAL: i32 = 70;

/// An error that carries its own exit code.
#[derive(Debug)]
pub struct Coded {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Coded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Coded {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    Coded { code: USAGE, message: message.into() }.into()
}

fn library_code(e: &admwex::Error) -> i32 {
    use admwex::Error::*;
    match e {
        InvalidSetup(_) | InvalidWeight(_) | InvalidArgument(_) | ExactUnsupported(_) | AnsatzNotApplicable(_)
        | LogObstruction(_) => USAGE,
        InvalidProfile(_) => BAD_PROFILE,
        Quadrature(_) | Singular(_) | Inconsistency(_) | NoConvergence(_) => INTERNAL,
    }
}

pub fn code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(c) = cause.downcast_ref::<Coded>() {
            return c.code;
        }
        if let Some(e) = cause.downcast_ref::<admwex::Error>() {
            return library_code(e);
        }
    }
    INTERNAL
}
