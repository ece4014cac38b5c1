//! Transfer figures of merit: fidelity, latency and efficiency of a time
//! series, the closed-form latency predictor and the θ/δ classifier.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::DerivedParams;
use crate::series::TimeSeries;

/// Default largest denominator for [`classify_n`].
pub const DEFAULT_MAX_DENOMINATOR: u32 = 9;
/// Default relative tolerance for [`classify_n`].
pub const DEFAULT_CLASS_TOLERANCE: f64 = 0.02;

/// Latency/fidelity tradeoff weight, stored per ns.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Eta(f64);

impl Eta {
    pub const ZERO: Eta = Eta(0.0);

    pub fn per_ns(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Input(format!("eta must be finite and non-negative, got {value}")));
        }
        Ok(Self(value))
    }

    /// From a weight in inverse seconds.
    pub fn per_second(value: f64) -> Result<Self> {
        Self::per_ns(value * 1e-9)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMetrics {
    /// P_B at the selected time.
    pub fidelity: f64,
    /// Selected time (ns).
    pub latency: f64,
    /// `J = P_B − η t` at the selected time.
    pub efficiency: f64,
    /// Weight used, per ns.
    pub eta: f64,
    /// Grid index of the selected time; `None` for predicted latencies.
    pub achieved_index: Option<usize>,
}

/// Maximize `J(η, t) = P_B(t) − η t` over the series, taking the earliest
/// sample on exact ties.
pub fn transfer_metrics(series: &TimeSeries, eta: Eta) -> Result<TransferMetrics> {
    if series.is_empty() {
        return Err(Error::Input("empty time series".into()));
    }
    let eta = eta.value();
    let mut best = 0;
    let mut best_j = f64::NEG_INFINITY;
    for (i, (t, o)) in series.times.iter().zip(&series.occupations).enumerate() {
        let j = o.p_b - eta * t;
        if j > best_j {
            best = i;
            best_j = j;
        }
    }
    Ok(TransferMetrics {
        fidelity: series.occupations[best].p_b,
        latency: series.times[best],
        efficiency: best_j,
        eta,
        achieved_index: Some(best),
    })
}

/// `τ = round(θ / (θ − |δ|)) π / θ`, rounding halves up.
pub fn predict_latency(d: &DerivedParams) -> Result<f64> {
    let theta = d.osc_freq;
    let delta = d.half_detuning.abs();
    if d.rabi == 0.0 {
        return Err(Error::NoTransfer("zero coupling".into()));
    }
    if delta >= theta {
        return Err(Error::NoTransfer(format!("|δ| = {delta} is not below θ = {theta}")));
    }
    let c = (theta / (theta - delta) + 0.5).floor();
    Ok(c * PI / theta)
}

/// Internal half-period `π/θ`.
pub fn half_period(d: &DerivedParams) -> f64 {
    PI / d.osc_freq
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NKind {
    Even,
    OddOdd { num: u32, den: u32 },
    Generic,
    Undefined,
}

impl fmt::Display for NKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NKind::Even => write!(f, "even"),
            NKind::OddOdd { num, den } => write!(f, "odd_odd({num},{den})"),
            NKind::Generic => write!(f, "generic"),
            NKind::Undefined => write!(f, "undefined"),
        }
    }
}

impl std::str::FromStr for NKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            token: s.to_string(),
            reason: "expected even, generic, undefined or odd_odd(a,b)".into(),
        };
        match s {
            "even" => Ok(NKind::Even),
            "generic" => Ok(NKind::Generic),
            "undefined" => Ok(NKind::Undefined),
            _ => {
                let inner = s
                    .strip_prefix("odd_odd(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let (a, b) = inner.split_once(',').ok_or_else(bad)?;
                Ok(NKind::OddOdd {
                    num: a.trim().parse().map_err(|_| bad())?,
                    den: b.trim().parse().map_err(|_| bad())?,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NClass {
    /// θ/|δ|; `None` when undefined.
    pub n_value: Option<f64>,
    pub kind: NKind,
    pub max_denominator: u32,
}

/// Best rational approximation `p/q` of `x > 0` with `q ≤ max_den`.
pub fn best_rational(x: f64, max_den: u32) -> (u64, u64) {
    let max_den = u64::from(max_den.max(1));
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    loop {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a_int = a as u64;
        let q2 = q0 + a_int * q1;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p0 + a_int * p1, q2);
        let frac = r - a;
        if frac <= 1e-15 * r.max(1.0) {
            return (p1, q1);
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return (x.round() as u64, 1);
    }
    let k = (max_den - q0) / q1;
    let (sp, sq) = (p0 + k * p1, q0 + k * q1);
    let semi = (sp as f64 / sq as f64 - x).abs();
    let conv = (p1 as f64 / q1 as f64 - x).abs();
    if semi < conv {
        (sp, sq)
    } else {
        (p1, q1)
    }
}

/// Classify `N = θ/|δ|` by its nearest small-denominator rational.
pub fn classify_n(d: &DerivedParams, max_den: u32, tol: f64) -> NClass {
    let delta = d.half_detuning.abs();
    if delta == 0.0 || d.rabi == 0.0 {
        return NClass {
            n_value: None,
            kind: NKind::Undefined,
            max_denominator: max_den,
        };
    }
    let n = d.osc_freq / delta;
    let (a, b) = best_rational(n, max_den);
    let close = b > 0 && (n - a as f64 / b as f64).abs() <= tol * n;
    let kind = match (close, a % 2, b % 2) {
        (true, 0, 1) if b == 1 => NKind::Even,
        (true, 1, 1) => NKind::OddOdd {
            num: a as u32,
            den: b as u32,
        },
        _ => NKind::Generic,
    };
    NClass {
        n_value: Some(n),
        kind,
        max_denominator: max_den,
    }
}

pub fn classify_n_default(d: &DerivedParams) -> NClass {
    classify_n(d, DEFAULT_MAX_DENOMINATOR, DEFAULT_CLASS_TOLERANCE)
}

/// Lossless ceiling on P_B for `θ/δ = a/b` with a, b odd.
///
/// The waveguide is empty at `θt = nπ`, where P_B reduces to
/// `(1 − cos θt cos δt)/2`; the bound is its maximum over the `2a`
/// such instants in one common period.
pub fn lossless_peak_bound(class: &NClass) -> Result<f64> {
    let NKind::OddOdd { num, den } = class.kind else {
        return Err(Error::Domain(format!(
            "peak bound defined for odd/odd ratios only, got {}",
            class.kind
        )));
    };
    let ratio = f64::from(den) / f64::from(num);
    let best = (1..=2 * num)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            0.5 * (1.0 - sign * (f64::from(n) * PI * ratio).cos())
        })
        .fold(0.0, f64::max);
    Ok(best)
}
