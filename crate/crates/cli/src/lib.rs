//! Command-line driver for `qtm-core`.
//!
//! Every command is first resolved into a [`Request`](request::Request) that
//! captures the merged configuration and options. Requests are executed by
//! [`execute`](request::execute), serialized into run manifests, and replayed
//! from them with identical output bytes.

pub mod cli;
pub mod error;
pub mod format;
pub mod input;
pub mod manifest;
pub mod request;

pub use error::{CliError, Result};
pub use request::{execute, execute_with_threads, Rendered, Request};
