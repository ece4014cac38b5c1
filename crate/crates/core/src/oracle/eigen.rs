//! Eigen-decomposition of small dense complex 3×3 matrices.
//!
//! Eigenvalues are the roots of the characteristic cubic, found with
//! Durand–Kerner iteration and polished by Newton steps. Right and left
//! null vectors of `M − λI` come from cross products of its rows and
//! columns respectively.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

const MAX_ITER: usize = 500;

/// Coefficients `[c0, c1, c2]` of `λ³ − c2 λ² + c1 λ − c0`.
pub fn characteristic_coefficients(m: &Matrix3<Complex64>) -> [Complex64; 3] {
    let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
        + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
    [det, minors, trace]
}

fn cubic(c: &[Complex64; 3], x: Complex64) -> Complex64 {
    ((x - c[2]) * x + c[1]) * x - c[0]
}

fn cubic_derivative(c: &[Complex64; 3], x: Complex64) -> Complex64 {
    (3.0 * x - 2.0 * c[2]) * x + c[1]
}

/// The three eigenvalues of `m`, unordered.
pub fn eigenvalues(m: &Matrix3<Complex64>) -> [Complex64; 3] {
    // Shift by the mean eigenvalue so large common offsets (ω_q) do not
    // cost precision in the root finder.
    let shift = (m[(0, 0)] + m[(1, 1)] + m[(2, 2)]) / 3.0;
    let shifted = m - Matrix3::from_diagonal_element(shift);
    let c = characteristic_coefficients(&shifted);

    let radius = 1.0 + c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots = [seed * radius, seed * seed * radius, seed * seed * seed * radius];

    for _ in 0..MAX_ITER {
        let mut change: f64 = 0.0;
        for i in 0..3 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(f64::EPSILON, 0.0);
            }
            let step = cubic(&c, roots[i]) / denom;
            roots[i] -= step;
            change = change.max(step.norm());
        }
        if change <= 1e-16 * radius {
            break;
        }
    }

    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = cubic_derivative(&c, *r);
            if d.norm() == 0.0 {
                break;
            }
            let step = cubic(&c, *r) / d;
            if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 1e-6 * radius {
                break;
            }
            *r -= step;
        }
    }

    roots.map(|r| r + shift)
}

fn cross(u: &Vector3<Complex64>, v: &Vector3<Complex64>) -> Vector3<Complex64> {
    Vector3::new(
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
}

fn best_cross(vectors: [Vector3<Complex64>; 3]) -> Vector3<Complex64> {
    let candidates = [
        cross(&vectors[0], &vectors[1]),
        cross(&vectors[0], &vectors[2]),
        cross(&vectors[1], &vectors[2]),
    ];
    candidates
        .into_iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap()
}

/// Right null vector of `m − λI` (column vector, `M r = λ r`).
pub fn right_eigenvector(m: &Matrix3<Complex64>, lambda: Complex64) -> Vector3<Complex64> {
    let a = m - Matrix3::from_diagonal_element(lambda);
    let rows = [0, 1, 2].map(|i| a.row(i).transpose());
    best_cross(rows)
}

/// Left null vector of `m − λI`, returned as the components of the row
/// vector `l` with `l M = λ l` (no conjugation).
pub fn left_eigenvector(m: &Matrix3<Complex64>, lambda: Complex64) -> Vector3<Complex64> {
    let a = m - Matrix3::from_diagonal_element(lambda);
    let cols = [0, 1, 2].map(|j| a.column(j).into_owned());
    best_cross(cols)
}
