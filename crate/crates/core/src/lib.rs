//! Core numerical models for a full-duplex link that back-reflects its
//! return data off a space-time modulated reflecting surface: arrival
//! geometry and delay maps, temporal phase waveforms, the coupled
//! multiplicative reflection response, cluster-based decoupling, channel
//! synthesis, and link-budget arithmetic.

pub mod channel;
pub mod decoupling;
pub mod error;
pub mod geometry;
pub mod linkbudget;
pub mod stmm;
pub mod waveform;

pub use error::{Error, Result};
