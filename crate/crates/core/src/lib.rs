//! Simulation and optimization of a STAR-RIS aided bistatic ISAC network that
//! faces a coordinated jammer and a malicious detector.
//!
//! The surface's reflection subspace is tuned to suppress jamming at the
//! downlink users ([`jamming`]); its transmission subspace is tuned to hide
//! the sensing target from the malicious detector while keeping the ISAC
//! receiver's sensing SINR above a floor ([`concealment`]).

// `!(x > 0.0)` is the intended NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel_model;
pub mod concealment;
pub mod error;
pub mod harness;
pub mod jamming;
pub mod linalg;
pub mod report;
pub mod scenario;
pub mod sdp;
pub mod selftest;

pub use error::{Error, Result};
