use serde::{Deserialize, Serialize};

use crate::analytic::OccupationTriple;
use crate::error::{Error, Result};

/// Sorted sample times (ns). Uniform grids come from [`TimeGrid::uniform`];
/// every evaluator accepts arbitrary strictly increasing grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// `n` equally spaced points on `[0, t_max]`, both ends included.
    pub fn uniform(t_max: f64, n: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::Grid(format!("t_max must be finite and > 0, got {t_max}")));
        }
        if n < 2 {
            return Err(Error::Grid(format!("need at least 2 points, got {n}")));
        }
        let step = t_max / (n - 1) as f64;
        let mut times: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        times[n - 1] = t_max;
        Ok(Self { times })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Grid("empty grid".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Grid("non-finite time".into()));
        }
        if times[0] < 0.0 {
            return Err(Error::Grid(format!("grid starts before 0 ({})", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Grid(format!(
                "grid not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Spacing of the first interval; the grid step for uniform grids.
    pub fn step(&self) -> Option<f64> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }
}

/// Occupations sampled on a time grid, from any evolution method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub occupations: Vec<OccupationTriple>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, occupations: Vec<OccupationTriple>) -> Result<Self> {
        if times.len() != occupations.len() {
            return Err(Error::Input(format!(
                "{} times but {} occupation triples",
                times.len(),
                occupations.len()
            )));
        }
        Ok(Self { times, occupations })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn p_a(&self) -> impl Iterator<Item = f64> + '_ {
        self.occupations.iter().map(|o| o.p_a)
    }

    pub fn p_wg(&self) -> impl Iterator<Item = f64> + '_ {
        self.occupations.iter().map(|o| o.p_wg)
    }

    pub fn p_b(&self) -> impl Iterator<Item = f64> + '_ {
        self.occupations.iter().map(|o| o.p_b)
    }

    /// Largest componentwise difference to another series on the same grid.
    pub fn max_abs_diff(&self, other: &TimeSeries) -> Result<f64> {
        if self.times.len() != other.times.len() {
            return Err(Error::Input("series lengths differ".into()));
        }
        Ok(self
            .occupations
            .iter()
            .zip(&other.occupations)
            .map(|(x, y)| {
                (x.p_a - y.p_a)
                    .abs()
                    .max((x.p_wg - y.p_wg).abs())
                    .max((x.p_b - y.p_b).abs())
            })
            .fold(0.0, f64::max))
    }

    /// Occupations at `t`, linearly interpolated between samples.
    pub fn at(&self, t: f64) -> Result<OccupationTriple> {
        let (start, end) = match (self.times.first(), self.times.last()) {
            (Some(&s), Some(&e)) => (s, e),
            _ => return Err(Error::Input("empty series".into())),
        };
        if !(t >= start && t <= end) {
            return Err(Error::Range { t, start, end });
        }
        let i = self.times.partition_point(|&x| x <= t);
        if i == 0 {
            return Ok(self.occupations[0]);
        }
        let lo = i - 1;
        if self.times[lo] == t || lo + 1 == self.times.len() {
            return Ok(self.occupations[lo]);
        }
        let (t0, t1) = (self.times[lo], self.times[lo + 1]);
        let w = (t - t0) / (t1 - t0);
        let (x, y) = (self.occupations[lo], self.occupations[lo + 1]);
        Ok(OccupationTriple {
            p_a: x.p_a + w * (y.p_a - x.p_a),
            p_wg: x.p_wg + w * (y.p_wg - x.p_wg),
            p_b: x.p_b + w * (y.p_b - x.p_b),
        })
    }
}
