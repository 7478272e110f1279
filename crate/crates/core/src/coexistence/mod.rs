//! Two coexistence schemes built on the mother lattice: OTFS and OFDM
//! sharing symbol blocks in time, and data plus sensing chirps sharing the
//! SC-IFDM lattice.

pub mod chirp_lattice;
pub mod otfs_ofdm;

pub use chirp_lattice::{
    compose_scifdm_afdm, receive_scifdm_afdm, CoexScifdmAfdmConfig, GuardRadius, ScifdmAfdmLayout,
    ScifdmAfdmReceiver, ScifdmAfdmRx,
};
pub use otfs_ofdm::{
    compose_otfs_ofdm, ofdm_branch_response, otfs_branch_channel, receive_ofdm_branch,
    receive_otfs_branch, CoexOtfsOfdmConfig, OfdmBranch, OfdmResponse, OtfsBranch,
    OtfsBranchReceiver,
};

/// Owner of one time block or lattice bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Owner {
    Data,
    /// Position of the chirp in the configured chirp list.
    Chirp(usize),
    Guard,
    Otfs,
    Ofdm,
}

impl Owner {
    pub fn label(self) -> String {
        match self {
            Owner::Data => "data".into(),
            Owner::Chirp(i) => format!("chirp_{i}"),
            Owner::Guard => "guard".into(),
            Owner::Otfs => "otfs".into(),
            Owner::Ofdm => "ofdm".into(),
        }
    }
}
