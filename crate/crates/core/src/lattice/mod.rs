//! Mother-lattice machinery: the OTFS phase matrix, sparse chirp supports in
//! the SC-IFDM lattice, and Kronecker precoding for TF resource allocation.

pub mod chirp;
pub mod phase;
pub mod precode;

pub use chirp::{
    accumulate_chirp, chirp_family_maps, chirp_index_map, embed_chirp, project_chirp, Chirp,
    ChirpIndexMap, ChirpKind, SupportForm,
};
pub use phase::{omega, otfs_phase_apply, PhaseMatrix};
pub use precode::{precode_allocate, precode_recover, tf_occupancy, OccupancyMask, PrecodeParams};
