//! The `afpp` command-line tool in library form.
//!
//! Everything the binary does lives behind [`run`], which takes an argv
//! slice and two write sinks and returns the process exit code.  Keeping the
//! whole tool callable in-process lets tests (and the determinism criterion
//! of the acceptance battery) run commands repeatedly and compare output
//! bytes without spawning.
//!
//! Structured results — certificates, verification reports, the suite
//! bundle — go to stdout; one-line summaries and errors go to stderr.  See
//! [`commands`] for the exit-code contract, [`spec`] for the input formats,
//! and [`certificate`] for what the outputs contain and how they re-verify.

pub mod certificate;
pub mod commands;
pub mod oracle;
pub mod spec;
pub mod suite;

pub use commands::run;
