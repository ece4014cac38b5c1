//! No-jump evolution under the effective Hamiltonian
//! `H_eff = H − (i/2) Σ L†L` in the single-excitation basis
//! `{|1,0,0⟩, |0,1,0⟩, |0,0,1⟩}`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::eigen;
use crate::analytic::OccupationTriple;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::series::{TimeGrid, TimeSeries};

/// Overlap `|⟨l|r⟩| / (|l| |r|)` below which a pair is treated as defective.
pub const DEFECT_THRESHOLD: f64 = 1e-6;

pub fn effective_hamiltonian(p: &SystemParams) -> Matrix3<Complex64> {
    let qubit = Complex64::new(p.omega_q, -p.gamma / 2.0);
    let mode = Complex64::new(p.omega_wg(), -p.kappa / 2.0);
    let g = Complex64::new(p.g, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Matrix3::new(qubit, g, zero, g, mode, g, zero, g, qubit)
}

/// Paired left/right eigenvectors normalized so that `⟨λ^L_m|λ^R_n⟩ = δ_mn`
/// (bilinear product: left vectors hold bra components).
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalEigensystem {
    pub eigenvalues: [Complex64; 3],
    pub right: [Vector3<Complex64>; 3],
    pub left: [Vector3<Complex64>; 3],
    /// Product of the left and right normalization constants, read off the
    /// `|1,0,0⟩` components.
    pub norm_products: [Complex64; 3],
}

impl BiorthogonalEigensystem {
    fn from_pairs(
        eigenvalues: [Complex64; 3],
        right: [Vector3<Complex64>; 3],
        left: [Vector3<Complex64>; 3],
    ) -> Result<Self> {
        let mut right_n = right;
        let mut left_n = left;
        for n in 0..3 {
            let r = right[n] / Complex64::new(right[n].norm(), 0.0);
            let overlap = left[n].dot(&r);
            if overlap.norm() < DEFECT_THRESHOLD * left[n].norm() || !overlap.norm().is_finite() {
                return Err(Error::Degenerate(describe_collision(&eigenvalues, n)));
            }
            right_n[n] = r;
            left_n[n] = left[n] / overlap;
        }
        let norm_products = [0, 1, 2].map(|n| left_n[n][0] * right_n[n][0]);
        Ok(Self {
            eigenvalues,
            right: right_n,
            left: left_n,
            norm_products,
        })
    }

    /// `⟨λ^L_m|λ^R_n⟩`
    pub fn overlap(&self, m: usize, n: usize) -> Complex64 {
        self.left[m].dot(&self.right[n])
    }

    /// Largest deviation of the overlap matrix from the identity.
    pub fn biorthogonality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..3 {
            for n in 0..3 {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((self.overlap(m, n) - target).norm());
            }
        }
        worst
    }

    /// `Σ_n ⟨λ^L_n|ψ0⟩ |λ^R_n⟩ e^{−iλ_n t}`
    pub fn propagate(&self, psi0: &Vector3<Complex64>, t: f64) -> Vector3<Complex64> {
        let mut psi = Vector3::zeros();
        for n in 0..3 {
            let weight = self.left[n].dot(psi0) * (-Complex64::i() * self.eigenvalues[n] * t).exp();
            psi += self.right[n] * weight;
        }
        psi
    }
}

fn describe_collision(eigenvalues: &[Complex64; 3], n: usize) -> String {
    let other = (0..3)
        .filter(|&m| m != n)
        .min_by(|&a, &b| {
            (eigenvalues[a] - eigenvalues[n])
                .norm()
                .total_cmp(&(eigenvalues[b] - eigenvalues[n]).norm())
        })
        .unwrap();
    format!(
        "eigenvalues {} and {} collide (left/right overlap below {DEFECT_THRESHOLD:e})",
        eigenvalues[n], eigenvalues[other]
    )
}

/// Eigensystem of `H_eff` from the closed forms, ordered `[λ0, λ+, λ−]`:
///
/// ```text
/// λ0 = ω_q − iγ/2,           |λ0⟩ = (|1,0,0⟩ − |0,0,1⟩)/√2
/// λ± = ω_q + δ − i(γ+κ)/4 ± θ′,  |λ±⟩ ∝ |1,0,0⟩ + (δ + iΓ ± θ′)/g |0,1,0⟩ + |0,0,1⟩
/// ```
pub fn biorthogonal_eigensystem(p: &SystemParams) -> Result<BiorthogonalEigensystem> {
    let d = p.derive()?;
    let theta = d.complex_freq;
    if theta.norm() == 0.0 {
        return Err(Error::Degenerate(format!(
            "exceptional point: λ+ = λ− = {}",
            Complex64::new(p.omega_q + d.half_detuning, -(p.gamma + p.kappa) / 4.0)
        )));
    }
    if p.g == 0.0 {
        return Err(Error::Degenerate(
            "zero coupling: λ0 coincides with one of λ± and the closed-form vectors are undefined"
                .into(),
        ));
    }
    let shift = d.shift();
    let centre = Complex64::new(p.omega_q + d.half_detuning, -(p.gamma + p.kappa) / 4.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let dark = Vector3::new(one, zero, -one) / Complex64::new(std::f64::consts::SQRT_2, 0.0);

    let bright = |sign: f64| Vector3::new(one, (shift + sign * theta) / p.g, one);
    let eigenvalues = [
        Complex64::new(p.omega_q, -p.gamma / 2.0),
        centre + theta,
        centre - theta,
    ];
    let right = [dark, bright(1.0), bright(-1.0)];
    // H_eff is complex symmetric, so left vectors share the right components.
    let left = right;
    BiorthogonalEigensystem::from_pairs(eigenvalues, right, left)
}

/// Eigensystem of an arbitrary 3×3 matrix by numerical eigensolve.
pub fn numeric_eigensystem(h: &Matrix3<Complex64>) -> Result<BiorthogonalEigensystem> {
    let eigenvalues = eigen::eigenvalues(h);
    let right = eigenvalues.map(|l| eigen::right_eigenvector(h, l));
    let left = eigenvalues.map(|l| eigen::left_eigenvector(h, l));
    BiorthogonalEigensystem::from_pairs(eigenvalues, right, left)
}

/// Occupations from `e^{−iH_eff t}|1,0,0⟩`, using a numerical eigensolve
/// of `H_eff` (independent of the closed-form eigensystem).
pub fn effective_propagate(p: &SystemParams, grid: &TimeGrid) -> Result<TimeSeries> {
    p.validate()?;
    let system = numeric_eigensystem(&effective_hamiltonian(p))?;
    let psi0 = Vector3::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    );
    let occupations = grid
        .times()
        .iter()
        .map(|&t| {
            let psi = system.propagate(&psi0, t);
            OccupationTriple {
                p_a: psi[0].norm_sqr(),
                p_wg: psi[1].norm_sqr(),
                p_b: psi[2].norm_sqr(),
            }
        })
        .collect();
    TimeSeries::new(grid.times().to_vec(), occupations)
}
