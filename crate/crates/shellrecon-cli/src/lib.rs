//! Implementation of the `shellrecon` command-line tool.
//!
//! The binary in `main.rs` is a thin wrapper over [`run`]; the subcommand
//! logic lives in [`commands`] and the verification suites in [`suites`] so
//! that the integration tests can drive them directly.

pub mod args;
pub mod commands;
pub mod io;
pub mod suites;

use shellrecon::Error;

/// Exit code for a library error, per the documented taxonomy: 2 for usage
/// errors and malformed input, 3 for numeric degeneracy, 4 for measurements
/// no configuration can explain, 5 when a nonuniqueness search finds no
/// root.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::InvalidJson(_) => 2,
        Error::Overflow(_)
        | Error::Degenerate(_)
        | Error::Truncation(_)
        | Error::SingularSystem(_) => 3,
        Error::IllPosedMode(_) | Error::InconsistentMeasurement(_) => 4,
        Error::NoRoot(_) => 5,
    }
}

/// Run a parsed invocation, printing any failure to stderr, and return the
/// process exit code.
pub fn run(cli: &args::Cli) -> u8 {
    let result = match &cli.command {
        args::Command::Forward(a) => commands::cmd_forward(a),
        args::Command::Ndmap(a) => commands::cmd_ndmap(a),
        args::Command::Invert(a) => commands::cmd_invert(a),
        args::Command::Nonuniq(a) => commands::cmd_nonuniq(a),
        args::Command::Verify(a) => commands::cmd_verify(a),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}
