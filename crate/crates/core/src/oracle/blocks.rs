//! Multi-excitation structure of the effective Hamiltonian.
//!
//! Over the basis `{|1,k,0⟩, |0,k+1,0⟩, |0,k,1⟩}` (k = 0, 1, …) the
//! effective Hamiltonian splits into independent 3×3 blocks, so an initial
//! state with an empty waveguide never leaves the k = 0 block.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::params::SystemParams;

/// The k-th block: couplings `√(k+1) g`, waveguide entry
/// `(k+1)(ω_WG − iκ/2)`, qubit entries `ω_q − iγ/2`.
pub fn block_hamiltonian(k: usize, p: &SystemParams) -> Matrix3<Complex64> {
    let scale = (k as f64 + 1.0).sqrt();
    let coupling = Complex64::new(scale * p.g, 0.0);
    let qubit = Complex64::new(p.omega_q, -p.gamma / 2.0);
    let mode = Complex64::new(p.omega_wg(), -p.kappa / 2.0) * (k as f64 + 1.0);
    let zero = Complex64::new(0.0, 0.0);
    Matrix3::new(
        qubit, coupling, zero, //
        coupling, mode, coupling, //
        zero, coupling, qubit,
    )
}

/// Fock state `|qubit A, photons, qubit B⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockState {
    pub qubit_a: u8,
    pub photons: usize,
    pub qubit_b: u8,
}

pub fn block_basis(blocks: usize) -> Vec<FockState> {
    let s = |qubit_a, photons, qubit_b| FockState {
        qubit_a,
        photons,
        qubit_b,
    };
    (0..blocks)
        .flat_map(|k| [s(1, k, 0), s(0, k + 1, 0), s(0, k, 1)])
        .collect()
}

/// `H_eff |state⟩` as a list of (state, amplitude).
fn apply_effective(p: &SystemParams, st: FockState) -> Vec<(FockState, Complex64)> {
    let n = st.photons as f64;
    let diag = Complex64::new(
        p.omega_q * f64::from(st.qubit_a + st.qubit_b) + p.omega_wg() * n,
        -0.5 * (p.gamma * f64::from(st.qubit_a + st.qubit_b) + p.kappa * n),
    );
    let mut out = vec![(st, diag)];
    let g = |amp: f64| Complex64::new(p.g * amp, 0.0);
    // σ⁺ a on each qubit
    if st.photons > 0 {
        if st.qubit_a == 0 {
            out.push((FockState { qubit_a: 1, photons: st.photons - 1, ..st }, g(n.sqrt())));
        }
        if st.qubit_b == 0 {
            out.push((FockState { qubit_b: 1, photons: st.photons - 1, ..st }, g(n.sqrt())));
        }
    }
    // σ⁻ a† on each qubit
    if st.qubit_a == 1 {
        out.push((FockState { qubit_a: 0, photons: st.photons + 1, ..st }, g((n + 1.0).sqrt())));
    }
    if st.qubit_b == 1 {
        out.push((FockState { qubit_b: 0, photons: st.photons + 1, ..st }, g((n + 1.0).sqrt())));
    }
    out
}

/// Matrix elements `⟨i|H_eff|j⟩` over [`block_basis`], computed from the
/// ladder-operator action rather than from [`block_hamiltonian`].
pub fn multi_excitation_hamiltonian(blocks: usize, p: &SystemParams) -> DMatrix<Complex64> {
    let basis = block_basis(blocks);
    let dim = basis.len();
    let mut h = DMatrix::zeros(dim, dim);
    for (j, &state) in basis.iter().enumerate() {
        for (target, amp) in apply_effective(p, state) {
            if let Some(i) = basis.iter().position(|&b| b == target) {
                h[(i, j)] += amp;
            }
        }
    }
    h
}

/// True when every entry outside the diagonal `block`×`block` blocks is
/// exactly zero.
pub fn is_block_diagonal(m: &DMatrix<Complex64>, block: usize) -> bool {
    (0..m.nrows()).all(|i| {
        (0..m.ncols()).all(|j| i / block == j / block || m[(i, j)] == Complex64::new(0.0, 0.0))
    })
}
