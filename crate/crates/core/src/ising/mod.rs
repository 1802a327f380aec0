//! Transverse-field Ising chain under periodic driving, one momentum mode
//! at a time.

pub mod floquet;
pub mod hamiltonian;
pub mod protocol;
pub mod spectrum;

pub use floquet::{
    floquet_decompose, overlaps, period_propagator, rotated_frame_check, rotated_frame_propagator,
    FloquetDecomposition,
};
pub use hamiltonian::{
    bogoliubov_ground, ground_bloch, mode_energy, mode_hamiltonian, GroundState,
};
pub use protocol::{fold_quasi_energy, DriveProtocol, DriveShape, ProtocolSpec};
pub use spectrum::{
    build_spectrum, solve_mode, GridScheme, GridSpec, ModeSolution, SmallKModel, SpectrumTable,
};
