//! Closed-form occupation probabilities for the single-excitation dynamics
//! starting from qubit A excited.
//!
//! The qubit-B amplitude is
//!
//! ```text
//! c_B(t) = −e^{−γt/2}/2 + e^{−(κ+γ)t/4} e^{−iδt} (A + iB) / 2
//! A + iB = cos(θ′t) + i (a + ib) sin(θ′t)
//! ```
//!
//! and qubit A differs only in the sign of the first term. The waveguide
//! amplitude is `−i e^{−(κ+γ)t/4} e^{−iδt} Ω sin(θ′t) / (√2 θ′)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DerivedParams, SystemParams};
use crate::series::{TimeGrid, TimeSeries};

/// Occupation probabilities of qubit A, the waveguide mode and qubit B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupationTriple {
    pub p_a: f64,
    pub p_wg: f64,
    pub p_b: f64,
}

impl OccupationTriple {
    pub const INITIAL: Self = Self {
        p_a: 1.0,
        p_wg: 0.0,
        p_b: 0.0,
    };

    pub fn total(&self) -> f64 {
        self.p_a + self.p_wg + self.p_b
    }
}

/// The envelope factors A(t), B(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCoefficients {
    pub a_t: f64,
    pub b_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    Lossless,
    Lossy,
}

/// Lossless occupations. Rejects parameters with any loss.
pub fn lossless_occupations(t: f64, d: &DerivedParams) -> Result<OccupationTriple> {
    if !d.is_lossless() {
        return Err(Error::Domain(format!(
            "lossless evaluation with kappa = {}, gamma = {}",
            d.kappa, d.gamma
        )));
    }
    let theta = d.osc_freq;
    if theta == 0.0 {
        return Ok(OccupationTriple::INITIAL);
    }
    let delta = d.half_detuning;
    let (s_th, c_th) = (theta * t).sin_cos();
    let (s_d, c_d) = (delta * t).sin_cos();
    let ratio = delta / theta;
    let common = 1.0 + c_th * c_th + ratio * ratio * s_th * s_th;
    let cross = 2.0 * c_th * c_d + 2.0 * ratio * s_th * s_d;
    Ok(OccupationTriple {
        p_a: 0.25 * (common + cross),
        p_wg: 0.5 * (d.rabi * d.rabi) / (theta * theta) * s_th * s_th,
        p_b: 0.25 * (common - cross),
    })
}

/// A(t) and B(t) evaluated directly with cosh/sinh. Overflows once |φ|t
/// passes ~710; [`lossy_occupations`] never calls this.
pub fn envelope_coefficients(t: f64, d: &DerivedParams) -> EnvelopeCoefficients {
    if d.complex_freq.norm() == 0.0 {
        return EnvelopeCoefficients {
            a_t: 1.0 - d.loss_asymmetry * t,
            b_t: d.half_detuning * t,
        };
    }
    let (s, c) = (d.osc_freq * t).sin_cos();
    let (sh, ch) = ((d.decay_split * t).sinh(), (d.decay_split * t).cosh());
    let (a, b) = (d.mix_re, d.mix_im);
    EnvelopeCoefficients {
        a_t: c * ch - a * c * sh - b * s * ch,
        b_t: -s * sh + a * s * ch - b * c * sh,
    }
}

/// Expanded form of A² + B²:
/// `1 + (a²+b²−1) sin²θt + (a²+b²+1) sinh²φt − a sinh 2φt − b sin 2θt`.
pub fn envelope_norm_identity(t: f64, d: &DerivedParams) -> f64 {
    let (a, b) = (d.mix_re, d.mix_im);
    let m2 = a * a + b * b;
    let s = (d.osc_freq * t).sin();
    let sh = (d.decay_split * t).sinh();
    1.0 + (m2 - 1.0) * s * s + (m2 + 1.0) * sh * sh
        - a * (2.0 * d.decay_split * t).sinh()
        - b * (2.0 * d.osc_freq * t).sin()
}

/// A, B and sinh(φt) scaled by e^{−|φ|t}, plus the exponent |φ|t.
struct ScaledEnvelope {
    a_t: f64,
    b_t: f64,
    sinh: f64,
    log_scale: f64,
}

fn scaled_envelope(t: f64, d: &DerivedParams) -> ScaledEnvelope {
    if d.complex_freq.norm() == 0.0 {
        // θ′ = 0: cos(θ′t) → 1 and sin(θ′t)/θ′ → t.
        return ScaledEnvelope {
            a_t: 1.0 - d.loss_asymmetry * t,
            b_t: d.half_detuning * t,
            sinh: 0.0,
            log_scale: 0.0,
        };
    }
    let x = d.decay_split * t;
    let log_scale = x.abs();
    let e = (-2.0 * log_scale).exp();
    let ch = 0.5 * (1.0 + e);
    let sh = 0.5 * (1.0 - e) * x.signum();
    let (s, c) = (d.osc_freq * t).sin_cos();
    let (a, b) = (d.mix_re, d.mix_im);
    ScaledEnvelope {
        a_t: c * ch - a * c * sh - b * s * ch,
        b_t: -s * sh + a * s * ch - b * c * sh,
        sinh: sh,
        log_scale,
    }
}

/// Lossy occupations from the non-Hermitian no-jump evolution. Valid for
/// any loss rates, including zero, and for arbitrarily long times.
pub fn lossy_occupations(t: f64, d: &DerivedParams) -> OccupationTriple {
    let env = scaled_envelope(t, d);
    let (kappa, gamma) = (d.kappa, d.gamma);
    let (s_d, c_d) = (d.half_detuning * t).sin_cos();

    let qubit_decay = (-gamma * t).exp();
    let cross_decay = (-(kappa + 3.0 * gamma) / 4.0 * t + env.log_scale).exp();
    let pair_decay = (-(kappa + gamma) / 2.0 * t + 2.0 * env.log_scale).exp();

    let cross = 2.0 * cross_decay * (env.a_t * c_d + env.b_t * s_d);
    let norm = pair_decay * (env.a_t * env.a_t + env.b_t * env.b_t);

    let p_wg = if d.complex_freq.norm() == 0.0 {
        0.5 * d.rabi * d.rabi * t * t * (-(kappa + gamma) / 2.0 * t).exp()
    } else {
        // |sin θ′t|² = sin²θt + sinh²φt
        let s_th = (d.osc_freq * t).sin();
        let scaled_sin2 = s_th * s_th * (-2.0 * env.log_scale).exp() + env.sinh * env.sinh;
        0.5 * d.rabi * d.rabi / d.complex_freq.norm_sqr() * pair_decay * scaled_sin2
    };

    OccupationTriple {
        p_a: 0.25 * (qubit_decay + cross + norm),
        p_wg,
        p_b: 0.25 * (qubit_decay - cross + norm),
    }
}

/// Evaluate a model on a grid.
pub fn occupations_series(p: &SystemParams, grid: &TimeGrid, model: Model) -> Result<TimeSeries> {
    let d = p.derive()?;
    let times = grid.times().to_vec();
    let occupations = match model {
        Model::Lossless => times
            .iter()
            .map(|&t| lossless_occupations(t, &d))
            .collect::<Result<Vec<_>>>()?,
        Model::Lossy => times.iter().map(|&t| lossy_occupations(t, &d)).collect(),
    };
    TimeSeries::new(times, occupations)
}

/// Same as [`occupations_series`] with the lossy model, chunked across the
/// rayon pool. Output is identical to the sequential version.
pub fn lossy_series_par(p: &SystemParams, grid: &TimeGrid) -> Result<TimeSeries> {
    let d = p.derive()?;
    let times = grid.times().to_vec();
    let occupations = times
        .par_iter()
        .with_min_len(4096)
        .map(|&t| lossy_occupations(t, &d))
        .collect();
    TimeSeries::new(times, occupations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{PI, SQRT_2};

    fn derived(dw: f64, g: f64, kappa: f64, gamma: f64) -> DerivedParams {
        SystemParams::new(dw, g, kappa, gamma).unwrap().derive().unwrap()
    }

    // Direct complex evaluation of cos(θ′t) + i(a+ib) sin(θ′t).
    fn envelope_oracle(t: f64, d: &DerivedParams) -> Complex64 {
        let z = Complex64::new(d.half_detuning, d.loss_asymmetry);
        let th = (z * z + d.rabi * d.rabi).sqrt();
        let arg = th * t;
        arg.cos() + Complex64::i() * (z / th) * arg.sin()
    }

    #[test]
    fn initial_state() {
        for d in [derived(0.5, 1.1, 0.0, 0.0), derived(0.3, 0.2, 0.01, 0.05)] {
            let o = lossy_occupations(0.0, &d);
            assert_eq!((o.p_a, o.p_wg, o.p_b), (1.0, 0.0, 0.0));
            let e = envelope_coefficients(0.0, &d);
            assert_eq!((e.a_t, e.b_t), (1.0, 0.0));
        }
        let o = lossless_occupations(0.0, &derived(0.5, 1.1, 0.0, 0.0)).unwrap();
        assert_eq!((o.p_a, o.p_wg, o.p_b), (1.0, 0.0, 0.0));
    }

    #[test]
    fn resonant_perfect_transfer() {
        let d = derived(0.0, 1.0, 0.0, 0.0);
        assert!((d.osc_freq - SQRT_2).abs() < 1e-15);
        let o = lossless_occupations(PI / d.osc_freq, &d).unwrap();
        assert!((o.p_b - 1.0).abs() < 1e-12);
        assert!(o.p_a.abs() < 1e-12);
        assert!(o.p_wg.abs() < 1e-12);
    }

    #[test]
    fn odd_ratio_three_caps_at_three_quarters() {
        // δ = 1, Ω = √8 → θ = 3
        let d = derived(2.0, 2.0, 0.0, 0.0);
        assert!((d.osc_freq / d.half_detuning - 3.0).abs() < 1e-14);
        let n = 400_000;
        let period = 2.0 * PI;
        let peak = (0..=n)
            .map(|i| lossless_occupations(period * i as f64 / n as f64, &d).unwrap().p_b)
            .fold(0.0, f64::max);
        assert!((peak - 0.75).abs() < 1e-8, "peak {peak}");
    }

    #[test]
    fn rejects_lossy_params() {
        let d = derived(0.5, 1.1, 0.003, 0.0);
        assert!(matches!(lossless_occupations(1.0, &d), Err(Error::Domain(_))));
    }

    #[test]
    fn envelope_lossless_form() {
        let d = derived(0.5, 1.1, 0.0, 0.0);
        for t in [0.1, 0.7, 2.9] {
            let e = envelope_coefficients(t, &d);
            assert!((e.a_t - (d.osc_freq * t).cos()).abs() < 1e-15);
            assert!((e.b_t - d.mix_re * (d.osc_freq * t).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn envelope_matches_complex_exponential() {
        let d = derived(0.5, 1.1, 0.003, 0.002);
        let e = envelope_coefficients(1.0, &d);
        let oracle = envelope_oracle(1.0, &d);
        assert!((e.a_t - oracle.re).abs() <= 1e-10 * oracle.re.abs().max(1e-300));
        assert!((e.b_t - oracle.im).abs() <= 1e-10 * oracle.im.abs().max(1e-300));

        let d = derived(1.3, 0.4, 0.9, 0.05);
        for t in [0.0, 0.5, 3.0, 11.0] {
            let e = envelope_coefficients(t, &d);
            let o = envelope_oracle(t, &d);
            assert!((e.a_t - o.re).abs() < 1e-12 * (1.0 + o.norm()));
            assert!((e.b_t - o.im).abs() < 1e-12 * (1.0 + o.norm()));
        }
    }

    #[test]
    fn norm_identity() {
        for d in [
            derived(0.5, 1.1, 0.003, 0.002),
            derived(0.2, 0.05, 0.4, 0.0),
            derived(1.0, 0.3, 0.0, 0.6),
        ] {
            for t in [0.0, 0.37, 1.9, 7.5] {
                let e = envelope_coefficients(t, &d);
                let lhs = e.a_t * e.a_t + e.b_t * e.b_t;
                let rhs = envelope_norm_identity(t, &d);
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-12), "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn lossy_reduces_to_lossless() {
        let d = derived(0.5, 1.1, 0.0, 0.0);
        for i in 0..200 {
            let t = i as f64 * 0.05;
            let a = lossless_occupations(t, &d).unwrap();
            let b = lossy_occupations(t, &d);
            assert!((a.p_a - b.p_a).abs() < 1e-12);
            assert!((a.p_wg - b.p_wg).abs() < 1e-12);
            assert!((a.p_b - b.p_b).abs() < 1e-12);
        }
    }

    #[test]
    fn waveguide_loss_limit_is_half() {
        // γ = 0: the dark state (|A⟩ − |B⟩)/√2 keeps half the excitation.
        let d = derived(0.1, 0.2, 0.3, 0.0);
        let o = lossy_occupations(2000.0, &d);
        assert!((o.p_a + o.p_b - 0.5).abs() < 1e-9);
        assert!((o.p_a - 0.25).abs() < 1e-9);
        assert!((o.p_b - 0.25).abs() < 1e-9);
        assert!(o.p_wg < 1e-9);
    }

    #[test]
    fn qubit_loss_empties_system() {
        let d = derived(0.1, 0.2, 0.0, 0.3);
        assert!(d.decay_split > 0.0 && d.mix_im > 0.0);
        let o = lossy_occupations(500.0, &d);
        assert!(o.total() < 1e-12);
    }

    #[test]
    fn huge_hyperbolic_argument_stays_finite() {
        // |φ|t ≫ 710: direct cosh overflows, scaled evaluation must not.
        let d = derived(4.0, 0.05, 10.0, 0.0);
        let t = 50_000.0;
        assert!(d.decay_split.abs() * t > 800.0);
        assert!(!envelope_coefficients(t, &d).a_t.is_finite());
        let o = lossy_occupations(t, &d);
        assert!(o.p_a.is_finite() && o.p_wg.is_finite() && o.p_b.is_finite());
        assert!((o.p_b - 0.25).abs() < 1e-6);
    }

    #[test]
    fn qubit_exchange_flips_cross_term() {
        // Starting from B instead of A swaps the roles; equivalently P_A and
        // P_B differ only by the sign of the cross term.
        let d = derived(0.7, 0.3, 0.02, 0.01);
        for t in [0.4, 3.3, 9.1] {
            let o = lossy_occupations(t, &d);
            let env = envelope_coefficients(t, &d);
            let (s, c) = (d.half_detuning * t).sin_cos();
            let cross = 1.0
                * (-(d.kappa + 3.0 * d.gamma) / 4.0 * t).exp()
                * (env.a_t * c + env.b_t * s);
            assert!((o.p_a - o.p_b - cross).abs() < 1e-13);
        }
    }

    #[test]
    fn first_order_waveguide_expansion() {
        let d = derived(0.5, 1.1, 0.003, 0.002);
        let mut worst: f64 = 0.0;
        for i in 1..200 {
            let t = i as f64 * 0.1;
            let pt = (d.decay_split * t).abs();
            if pt >= 1e-3 {
                continue;
            }
            let expansion = d.rabi * d.rabi / (d.osc_freq.powi(2) + d.decay_split.powi(2))
                * (-(d.kappa + d.gamma) / 2.0 * t).exp()
                * (d.osc_freq * t).sin().powi(2)
                / 2.0;
            let diff = (lossy_occupations(t, &d).p_wg - expansion).abs();
            worst = worst.max(diff / (pt * pt));
        }
        assert!(worst <= 1.0, "fitted constant {worst}");
    }

    #[test]
    fn zero_order_qubit_b_at_empty_waveguide() {
        let d = derived(0.5, 1.1, 0.003, 0.002);
        for n in 1..20 {
            let t = n as f64 * PI / d.osc_freq;
            let (k, g) = (d.kappa, d.gamma);
            let approx = 0.25
                * ((-g * t).exp()
                    - 2.0 * (d.osc_freq * t).cos() * (d.half_detuning * t).cos()
                        * (-(k + 3.0 * g) / 4.0 * t).exp()
                    + (-(k + g) / 2.0 * t).exp());
            let pt = (d.decay_split * t).abs();
            let diff = (lossy_occupations(t, &d).p_b - approx).abs();
            assert!(diff <= 2.0 * pt.max(1e-12), "n={n} diff={diff} φt={pt}");
        }
    }

    #[test]
    fn exceptional_point_limit_is_continuous() {
        // δ = 0, Ω = |Γ|: θ′ = 0 exactly.
        let gamma = 0.8;
        let g = gamma / 4.0 / SQRT_2;
        let d = derived(0.0, g, 0.0, gamma);
        assert_eq!(d.complex_freq.norm(), 0.0);
        let near = derived(0.0, g * (1.0 + 1e-7), 0.0, gamma);
        for t in [0.5, 2.0, 6.0] {
            let a = lossy_occupations(t, &d);
            let b = lossy_occupations(t, &near);
            assert!((a.p_a - b.p_a).abs() < 1e-5);
            assert!((a.p_wg - b.p_wg).abs() < 1e-5);
            assert!((a.p_b - b.p_b).abs() < 1e-5);
        }
    }

    #[test]
    fn series_errors_and_shapes() {
        let p = SystemParams::new(0.5, 1.1, 0.003, 0.002).unwrap();
        let single = TimeGrid::from_times(vec![0.0]).unwrap();
        let s = occupations_series(&p, &single, Model::Lossy).unwrap();
        assert_eq!(s.occupations, vec![OccupationTriple::INITIAL]);
        assert!(matches!(
            occupations_series(&p, &single, Model::Lossless),
            Err(Error::Domain(_))
        ));
        let grid = TimeGrid::uniform(3.0, 1000).unwrap();
        let seq = occupations_series(&p, &grid, Model::Lossy).unwrap();
        let par = lossy_series_par(&p, &grid).unwrap();
        assert_eq!(seq, par);
    }
}
