//! Independent numerical references for the closed-form dynamics.

pub mod blocks;
pub mod eigen;
pub mod jumps;
pub mod lindblad;
pub mod nonhermitian;

pub use blocks::{block_hamiltonian, is_block_diagonal, multi_excitation_hamiltonian};
pub use jumps::{jump_rate, jump_rate_series};
pub use lindblad::{lindblad_evolve, lindblad_run, DensityMatrix4, IntegrationOptions, Lindbladian, LindbladRun};
pub use nonhermitian::{
    biorthogonal_eigensystem, effective_hamiltonian, effective_propagate, numeric_eigensystem,
    BiorthogonalEigensystem,
};
