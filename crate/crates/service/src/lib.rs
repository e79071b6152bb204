//! HTTP session service and command-line front end for `rsvp-core`.

pub mod api;
pub mod cli;
mod error;
pub mod session;

pub use error::ApiError;
