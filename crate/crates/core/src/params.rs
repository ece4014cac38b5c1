//! Physical parameters, unit parsing and the derived constants that feed
//! every closed-form expression.
//!
//! All rates are angular frequencies in rad/ns. Values written with a
//! frequency suffix (`"500MHz"`) are cyclic and are multiplied by 2π on
//! the way in, so `"1GHz"` is `2π` rad/ns.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular rate (rad/ns) of one cyclic GHz.
pub const RAD_PER_NS_PER_GHZ: f64 = TAU;

/// Note written into every output header.
pub const UNIT_NOTE: &str =
    "rates in rad/ns with 1 GHz = 2*pi rad/ns; times in ns; eta quoted per second";

/// User-facing physical inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Qubit frequency. Only contributes a global phase.
    pub omega_q: f64,
    /// Waveguide detuning ω_WG − ω_q.
    pub delta_omega: f64,
    /// Qubit–waveguide coupling.
    pub g: f64,
    /// Waveguide photon loss rate.
    pub kappa: f64,
    /// Qubit decay rate (same for both qubits).
    pub gamma: f64,
}

impl SystemParams {
    pub fn new(delta_omega: f64, g: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let p = Self {
            omega_q: 0.0,
            delta_omega,
            g,
            kappa,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn lossless(delta_omega: f64, g: f64) -> Result<Self> {
        Self::new(delta_omega, g, 0.0, 0.0)
    }

    pub fn with_omega_q(mut self, omega_q: f64) -> Self {
        self.omega_q = omega_q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_q", self.omega_q),
            ("delta_omega", self.delta_omega),
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} is not finite ({v})")));
            }
        }
        for (name, v) in [("g", self.g), ("kappa", self.kappa), ("gamma", self.gamma)] {
            if v < 0.0 {
                return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_lossless(&self) -> bool {
        self.kappa == 0.0 && self.gamma == 0.0
    }

    /// Waveguide mode frequency ω_q + Δω.
    pub fn omega_wg(&self) -> f64 {
        self.omega_q + self.delta_omega
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        derive(self)
    }
}

/// Constants of the closed-form solution.
///
/// With `z = δ + iΓ` the complex oscillation frequency is
/// `θ′ = √(Ω² + z²)` on the principal branch, and the mixing ratio is
/// `a + ib = z / θ′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// δ = Δω / 2
    pub half_detuning: f64,
    /// Ω = √2 g
    pub rabi: f64,
    /// Γ = (γ − κ) / 4
    pub loss_asymmetry: f64,
    /// θ′
    pub complex_freq: Complex64,
    /// θ = Re θ′
    pub osc_freq: f64,
    /// φ = Im θ′, the split between the two decaying branches.
    pub decay_split: f64,
    /// a = Re(z / θ′)
    pub mix_re: f64,
    /// b = Im(z / θ′)
    pub mix_im: f64,
    pub kappa: f64,
    pub gamma: f64,
}

pub fn derive(p: &SystemParams) -> Result<DerivedParams> {
    p.validate()?;
    let half_detuning = p.delta_omega / 2.0;
    let rabi = std::f64::consts::SQRT_2 * p.g;
    let loss_asymmetry = (p.gamma - p.kappa) / 4.0;
    let z = Complex64::new(half_detuning, loss_asymmetry);
    let complex_freq = (z * z + rabi * rabi).sqrt();
    // θ′ = 0 only at an exact exceptional point (or g = δ = Γ = 0); the
    // mixing ratio is then undefined and the envelope uses its limit form.
    let mix = if complex_freq == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        z / complex_freq
    };
    Ok(DerivedParams {
        half_detuning,
        rabi,
        loss_asymmetry,
        complex_freq,
        osc_freq: complex_freq.re,
        decay_split: complex_freq.im,
        mix_re: mix.re,
        mix_im: mix.im,
        kappa: p.kappa,
        gamma: p.gamma,
    })
}

impl DerivedParams {
    pub fn is_lossless(&self) -> bool {
        self.kappa == 0.0 && self.gamma == 0.0
    }

    /// δ + iΓ
    pub fn shift(&self) -> Complex64 {
        Complex64::new(self.half_detuning, self.loss_asymmetry)
    }

    pub fn mix(&self) -> Complex64 {
        Complex64::new(self.mix_re, self.mix_im)
    }

    /// θ and φ from the explicit real radicals. The sign of φ is taken from
    /// δΓ, so φ is `None` when δΓ = 0 and the radical form is undefined.
    pub fn radical_parts(&self) -> (f64, Option<f64>) {
        let om2 = self.rabi * self.rabi;
        let d2 = self.half_detuning * self.half_detuning;
        let gm2 = self.loss_asymmetry * self.loss_asymmetry;
        let root = ((om2 + d2 + gm2).powi(2) - 4.0 * om2 * gm2).max(0.0).sqrt();
        let theta = ((root + om2 + d2 - gm2) / 2.0).max(0.0).sqrt();
        let sign = self.half_detuning * self.loss_asymmetry;
        let phi = if sign == 0.0 {
            None
        } else {
            Some(sign.signum() * ((root - om2 - d2 + gm2) / 2.0).max(0.0).sqrt())
        };
        (theta, phi)
    }
}

/// Parse a cyclic frequency with a unit suffix (`Hz`, `kHz`, `MHz`, `GHz`)
/// into an angular rate in rad/ns.
pub fn parse_rate(text: &str) -> Result<f64> {
    let (value, unit) = split_quantity(text)?;
    let ghz = match unit {
        "Hz" => 1e-9,
        "kHz" => 1e-6,
        "MHz" => 1e-3,
        "GHz" => 1.0,
        _ => {
            return Err(Error::Parse {
                token: text.to_string(),
                reason: format!("unknown rate unit `{unit}` (expected Hz, kHz, MHz or GHz)"),
            })
        }
    };
    Ok(value * ghz * RAD_PER_NS_PER_GHZ)
}

/// Parse a duration with a unit suffix (`ps`, `ns`, `us`, `ms`, `s`) into ns.
pub fn parse_time(text: &str) -> Result<f64> {
    let (value, unit) = split_quantity(text)?;
    let ns = match unit {
        "ps" => 1e-3,
        "ns" => 1.0,
        "us" | "µs" => 1e3,
        "ms" => 1e6,
        "s" => 1e9,
        _ => {
            return Err(Error::Parse {
                token: text.to_string(),
                reason: format!("unknown time unit `{unit}` (expected ps, ns, us, ms or s)"),
            })
        }
    };
    Ok(value * ns)
}

fn split_quantity(text: &str) -> Result<(f64, &str)> {
    let trimmed = text.trim();
    let split = trimmed
        .char_indices()
        .find(|&(i, c)| {
            c.is_alphabetic() && !((c == 'e' || c == 'E') && is_exponent(trimmed, i))
        })
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Parse {
            token: text.to_string(),
            reason: "missing unit suffix".into(),
        })?;
    let (num, unit) = trimmed.split_at(split);
    let value: f64 = num.trim().parse().map_err(|_| Error::Parse {
        token: text.to_string(),
        reason: format!("malformed number `{}`", num.trim()),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            token: text.to_string(),
            reason: "value is not finite".into(),
        });
    }
    Ok((value, unit.trim()))
}

// `e` followed by a digit or sign is an exponent, not the start of a unit.
fn is_exponent(s: &str, i: usize) -> bool {
    i > 0
        && s[i + 1..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+')
}
