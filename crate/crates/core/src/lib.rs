//! Exact predictions for simple and extended Wigner's-friend experiments
//! with a tunable quasiclassical communication channel between the friend
//! and the superobserver.
//!
//! The [`scenarios`] module builds the simple experiment and its collapse,
//! unitary, and record-conditioned statistics; [`channel`] adds the
//! communication channel and the partial-collapse statistics it induces;
//! [`friendliness`] builds the extended bipartite setup and evaluates the
//! CHSH-like local-friendliness expression with and without records and
//! conditioning on channel messages.
//!
//! Everything is a pure function over immutable values; results are exact
//! up to double-precision roundoff, far below the fixed tolerances.

pub mod channel;
pub mod friendliness;
pub mod scenarios;

mod error;

pub use error::{Error, Result};

pub use wfsim_qcore as qcore;
