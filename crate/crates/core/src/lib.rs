//! Mother-waveform toolkit.
//!
//! A single SC-IFDM lattice generates OFDM, OTFS, FMCW, OCDM and AFDM
//! frames through index selection and phase adjustment. On top of that the
//! crate provides precoded OTFS resource allocation, two orthogonal
//! coexistence schemes, a doubly-dispersive channel simulator, linear
//! receivers, a dechirp sensing chain and the Monte-Carlo harness that ties
//! them together.

pub mod channel;
pub mod coexistence;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod receivers;
pub mod sensing;
pub mod transforms;
pub mod waveform;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
