//! Simulation and verification toolkit for distributed statistical
//! estimation under communication constraints.
//!
//! - [`codec`]: bit strings, fixed-point quantizers, message framing and
//!   bit-accounted transcripts.
//! - [`families`]: distribution families, seeded samplers and the
//!   mean → regression → probit reductions.
//! - [`protocols`]: the achievable estimation schemes and Monte Carlo risk
//!   estimation.
//! - [`bounds`]: closed-form minimax lower/upper bound calculators.
//! - [`infotheory`]: exact finite-alphabet information quantities and
//!   enumeration-based inequality checks.
//! - [`cli`]: the `commest` command-line front end.

pub mod bounds;
pub mod cli;
pub mod codec;
pub mod error;
pub mod families;
pub mod infotheory;
pub mod protocols;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
