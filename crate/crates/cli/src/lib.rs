//! Library surface of the command-line front end: scenario-config parsing
//! and the runnable operations (curve sweep, conditional-phase summary,
//! oracle cross-checks, built-in reference scenarios).  The `xpm` binary
//! is a thin argument-parsing shell over this crate so integration tests
//! can call every operation in-process.

pub mod runner;
pub mod scenario;
