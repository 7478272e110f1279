//! Offspring waveforms generated through the mother lattice, their direct
//! reference generators, and symbol mapping.

pub mod constellation;
pub mod synth;

pub use constellation::{demap_symbols, detect_bits, map_bits, Constellation};
pub use synth::{
    compare_up_to_scalar, demodulate, synthesize_mother, synthesize_reference, ChirpSet, Modem,
    ScalarFit, WaveformKind,
};
