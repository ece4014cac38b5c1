//! Heatmap sweeps over (g, Δω), method comparison and timing.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{lossy_occupations, occupations_series, Model};
use crate::error::{Error, Result};
use crate::metrics::{classify_n_default, half_period, predict_latency, transfer_metrics, Eta, NKind, TransferMetrics};
use crate::oracle::{effective_propagate, lindblad_evolve};
use crate::params::{SystemParams, RAD_PER_NS_PER_GHZ};
use crate::series::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Lindblad,
    Effective,
    Predictor,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Analytic, Method::Lindblad, Method::Effective, Method::Predictor];

    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Lindblad => "lindblad",
            Method::Effective => "effective",
            Method::Predictor => "predictor",
        }
    }

    pub fn needs_grid(self) -> bool {
        self != Method::Predictor
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse {
                token: s.to_string(),
                reason: "expected analytic, lindblad, effective or predictor".into(),
            })
    }
}

/// Sweep configuration. Rates in rad/ns, times in ns, `eta` per ns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub g_min: f64,
    pub g_max: f64,
    pub dw_min: f64,
    pub dw_max: f64,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub kappa: f64,
    pub gamma: f64,
    pub omega_q: f64,
    pub eta: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub method: Method,
}

impl Default for SweepSpec {
    /// 50×50 cells, g ∈ [10, 100] MHz, Δω ∈ [0, 100] MHz, κ = γ = 0.1 MHz,
    /// 400 samples on [0, 40] ns.
    fn default() -> Self {
        let mhz = 1e-3 * RAD_PER_NS_PER_GHZ;
        Self {
            g_min: 10.0 * mhz,
            g_max: 100.0 * mhz,
            dw_min: 0.0,
            dw_max: 100.0 * mhz,
            grid_nx: 50,
            grid_ny: 50,
            kappa: 0.1 * mhz,
            gamma: 0.1 * mhz,
            omega_q: 0.0,
            eta: 0.0,
            t_max: 40.0,
            n_t: 400,
            method: Method::Analytic,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    v[n - 1] = hi;
    v
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.g_min, self.g_max, self.dw_min, self.dw_max, self.kappa, self.gamma, self.omega_q, self.eta,
            self.t_max,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("sweep bounds must be finite".into()));
        }
        if self.grid_nx == 0 || self.grid_ny == 0 {
            return Err(Error::Input("grid dimensions must be at least 1".into()));
        }
        if self.g_min <= 0.0 {
            return Err(Error::Input(format!("g_min must be positive, got {}", self.g_min)));
        }
        if self.g_max < self.g_min || self.dw_max < self.dw_min {
            return Err(Error::Input("sweep ranges must satisfy min ≤ max".into()));
        }
        if self.kappa < 0.0 || self.gamma < 0.0 || self.eta < 0.0 {
            return Err(Error::Input("kappa, gamma and eta must be non-negative".into()));
        }
        if self.method.needs_grid() {
            TimeGrid::uniform(self.t_max, self.n_t)?;
        }
        Ok(())
    }

    pub fn g_values(&self) -> Vec<f64> {
        linspace(self.g_min, self.g_max, self.grid_nx)
    }

    pub fn dw_values(&self) -> Vec<f64> {
        linspace(self.dw_min, self.dw_max, self.grid_ny)
    }

    pub fn params(&self, g: f64, delta_omega: f64) -> Result<SystemParams> {
        Ok(SystemParams::new(delta_omega, g, self.kappa, self.gamma)?.with_omega_q(self.omega_q))
    }

    /// Time-grid spacing, for methods that sample in time.
    pub fn time_step(&self) -> f64 {
        self.t_max / (self.n_t.max(2) - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub g: f64,
    pub delta_omega: f64,
    /// `None` when the cell is poisoned.
    pub metrics: Option<TransferMetrics>,
    pub n_kind: NKind,
    /// Internal half-period `π/θ` (ns).
    pub half_period: f64,
    /// Reason the cell could not be evaluated.
    pub poisoned: Option<String>,
}

/// Sweep result. Cell `(i, j)` for `g_values[i]`, `dw_values[j]` sits at
/// index `i * dw_values.len() + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub spec: SweepSpec,
    pub method: Method,
    pub g_values: Vec<f64>,
    pub dw_values: Vec<f64>,
    pub cells: Vec<Cell>,
    pub wall_time_s: f64,
}

impl HeatmapGrid {
    pub fn cell(&self, i_g: usize, i_dw: usize) -> &Cell {
        &self.cells[i_g * self.dw_values.len() + i_dw]
    }

    pub fn poisoned_count(&self) -> usize {
        self.cells.iter().filter(|c| c.poisoned.is_some()).count()
    }
}

fn evaluate_cell(spec: &SweepSpec, grid: Option<&TimeGrid>, g: f64, delta_omega: f64) -> Cell {
    let mut cell = Cell {
        g,
        delta_omega,
        metrics: None,
        n_kind: NKind::Undefined,
        half_period: f64::NAN,
        poisoned: None,
    };
    let outcome = (|| -> Result<TransferMetrics> {
        let p = spec.params(g, delta_omega)?;
        let d = p.derive()?;
        cell.n_kind = classify_n_default(&d).kind;
        cell.half_period = half_period(&d);
        let eta = Eta::per_ns(spec.eta)?;
        let series = match (spec.method, grid) {
            (Method::Predictor, _) => {
                let tau = predict_latency(&d)?;
                let fidelity = lossy_occupations(tau, &d).p_b;
                return Ok(TransferMetrics {
                    fidelity,
                    latency: tau,
                    efficiency: fidelity - eta.value() * tau,
                    eta: eta.value(),
                    achieved_index: None,
                });
            }
            (_, None) => return Err(Error::Input("time grid required".into())),
            (Method::Analytic, Some(grid)) => occupations_series(&p, grid, Model::Lossy)?,
            (Method::Lindblad, Some(grid)) => lindblad_evolve(&p, grid)?,
            (Method::Effective, Some(grid)) => effective_propagate(&p, grid)?,
        };
        transfer_metrics(&series, eta)
    })();
    match outcome {
        Ok(m) => cell.metrics = Some(m),
        Err(e) => cell.poisoned = Some(e.to_string()),
    }
    cell
}

/// Evaluate every cell on the global thread pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<HeatmapGrid> {
    spec.validate()?;
    let start = Instant::now();
    let grid = if spec.method.needs_grid() {
        Some(TimeGrid::uniform(spec.t_max, spec.n_t)?)
    } else {
        None
    };
    let g_values = spec.g_values();
    let dw_values = spec.dw_values();
    let coords: Vec<(f64, f64)> = g_values
        .iter()
        .flat_map(|&g| dw_values.iter().map(move |&dw| (g, dw)))
        .collect();
    let cells = coords
        .par_iter()
        .with_max_len(1)
        .map(|&(g, dw)| evaluate_cell(spec, grid.as_ref(), g, dw))
        .collect();
    Ok(HeatmapGrid {
        spec: spec.clone(),
        method: spec.method,
        g_values,
        dw_values,
        cells,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// As [`run_sweep`], on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> Result<HeatmapGrid> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Input(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonStats {
    pub methods: [Method; 2],
    pub mean_fidelity_diff: f64,
    pub max_fidelity_diff: f64,
    pub mean_latency_diff: f64,
    pub max_latency_diff: f64,
    /// Fraction of compared cells whose latencies differ by at most `π/θ`.
    pub within_half_period: f64,
    pub compared_cells: usize,
    /// Cells poisoned in either grid.
    pub excluded_cells: usize,
    pub wall_times_s: [f64; 2],
}

/// Cell-by-cell statistics for two sweeps over the same axes.
pub fn compare_grids(a: &HeatmapGrid, b: &HeatmapGrid) -> Result<ComparisonStats> {
    if a.g_values != b.g_values || a.dw_values != b.dw_values {
        return Err(Error::Input("heatmaps have different axes".into()));
    }
    let mut fid = Vec::new();
    let mut lat = Vec::new();
    let mut within = 0usize;
    let mut excluded = 0usize;
    for (x, y) in a.cells.iter().zip(&b.cells) {
        match (x.metrics, y.metrics) {
            (Some(mx), Some(my)) => {
                fid.push((mx.fidelity - my.fidelity).abs());
                let dl = (mx.latency - my.latency).abs();
                lat.push(dl);
                let tolerance = x.half_period.max(y.half_period);
                if dl <= tolerance * (1.0 + 1e-12) {
                    within += 1;
                }
            }
            _ => excluded += 1,
        }
    }
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(ComparisonStats {
        methods: [a.method, b.method],
        mean_fidelity_diff: mean(&fid),
        max_fidelity_diff: max(&fid),
        mean_latency_diff: mean(&lat),
        max_latency_diff: max(&lat),
        within_half_period: if lat.is_empty() { 0.0 } else { within as f64 / lat.len() as f64 },
        compared_cells: lat.len(),
        excluded_cells: excluded,
        wall_times_s: [a.wall_time_s, b.wall_time_s],
    })
}

/// Run `spec` with each of two methods and compare.
pub fn compare_methods(spec: &SweepSpec, methods: [Method; 2]) -> Result<ComparisonStats> {
    let a = run_sweep(&SweepSpec {
        method: methods[0],
        ..spec.clone()
    })?;
    let b = run_sweep(&SweepSpec {
        method: methods[1],
        ..spec.clone()
    })?;
    compare_grids(&a, &b)
}

/// Parameters used for timing: Δω = 500 MHz, g = 1.1 GHz, κ = 3 MHz,
/// γ = 2 MHz.
pub fn benchmark_params() -> SystemParams {
    SystemParams::new(
        0.5 * RAD_PER_NS_PER_GHZ,
        1.1 * RAD_PER_NS_PER_GHZ,
        3e-3 * RAD_PER_NS_PER_GHZ,
        2e-3 * RAD_PER_NS_PER_GHZ,
    )
    .expect("valid benchmark parameters")
}

/// Time window of the benchmark (ns).
pub const BENCH_T_MAX: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n_t: usize,
    pub analytic_mean_s: f64,
    pub analytic_std_s: f64,
    pub lindblad_mean_s: f64,
    pub lindblad_std_s: f64,
    /// `lindblad_mean_s / analytic_mean_s`
    pub speedup: f64,
    /// Some mean is below ten timer ticks.
    pub timer_limited: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub params: SystemParams,
    pub t_max: f64,
    pub repetitions: usize,
    pub timer_granularity_s: f64,
    pub rows: Vec<BenchRow>,
}

/// Smallest observable step of the monotonic clock.
pub fn timer_granularity() -> Duration {
    (0..20)
        .map(|_| {
            let start = Instant::now();
            loop {
                let d = start.elapsed();
                if d > Duration::ZERO {
                    break d;
                }
            }
        })
        .min()
        .unwrap_or(Duration::from_nanos(1))
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

fn time_runs<F: FnMut() -> Result<()>>(reps: usize, mut f: F) -> Result<Vec<f64>> {
    f()?;
    (0..reps)
        .map(|_| {
            let start = Instant::now();
            f()?;
            Ok(start.elapsed().as_secs_f64())
        })
        .collect()
}

/// Wall time of the closed-form series and of the Lindblad integrator on
/// identical grids over `[0, 3]` ns, one warm-up run then `repetitions`
/// timed runs each, single-threaded.
pub fn benchmark(n_t_list: &[usize], repetitions: usize) -> Result<BenchReport> {
    if repetitions < 3 {
        return Err(Error::Input(format!("at least 3 repetitions required, got {repetitions}")));
    }
    let p = benchmark_params();
    let granularity = timer_granularity().as_secs_f64();
    let mut rows = Vec::with_capacity(n_t_list.len());
    for &n_t in n_t_list {
        let grid = TimeGrid::uniform(BENCH_T_MAX, n_t)?;
        let analytic = time_runs(repetitions, || {
            std::hint::black_box(occupations_series(&p, &grid, Model::Lossy)?);
            Ok(())
        })?;
        let lindblad = time_runs(repetitions, || {
            std::hint::black_box(lindblad_evolve(&p, &grid)?);
            Ok(())
        })?;
        let (am, asd) = mean_std(&analytic);
        let (lm, lsd) = mean_std(&lindblad);
        rows.push(BenchRow {
            n_t,
            analytic_mean_s: am,
            analytic_std_s: asd,
            lindblad_mean_s: lm,
            lindblad_std_s: lsd,
            speedup: lm / am,
            timer_limited: am.min(lm) < 10.0 * granularity,
        });
    }
    Ok(BenchReport {
        params: p,
        t_max: BENCH_T_MAX,
        repetitions,
        timer_granularity_s: granularity,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small(method: Method) -> SweepSpec {
        SweepSpec {
            grid_nx: 4,
            grid_ny: 3,
            method,
            ..SweepSpec::default()
        }
    }

    #[test]
    fn single_resonant_cell() {
        let g = 0.5;
        let theta = std::f64::consts::SQRT_2 * g;
        let spec = SweepSpec {
            g_min: g,
            g_max: g,
            dw_min: 0.0,
            dw_max: 0.0,
            grid_nx: 1,
            grid_ny: 1,
            kappa: 0.0,
            gamma: 0.0,
            t_max: 2.0 * PI / theta,
            n_t: 2001,
            ..SweepSpec::default()
        };
        let h = run_sweep(&spec).unwrap();
        let m = h.cells[0].metrics.unwrap();
        assert!((m.fidelity - 1.0).abs() < 1e-12);
        assert!((m.latency - PI / theta).abs() < 1e-9);
    }

    #[test]
    fn layout_and_axes() {
        let h = run_sweep(&small(Method::Analytic)).unwrap();
        assert_eq!(h.cells.len(), 12);
        assert_eq!(h.g_values.len(), 4);
        assert_eq!(h.dw_values.len(), 3);
        let c = h.cell(2, 1);
        assert_eq!((c.g, c.delta_omega), (h.g_values[2], h.dw_values[1]));
        assert_eq!(h.dw_values[0], 0.0);
        assert_eq!(h.cell(0, 0).n_kind, NKind::Undefined);
        for c in &h.cells {
            let m = c.metrics.unwrap();
            assert!((0.0..=1.0).contains(&m.fidelity));
            assert!((0.0..=h.spec.t_max).contains(&m.latency));
        }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        for method in [Method::Analytic, Method::Effective, Method::Predictor] {
            let a = run_sweep_with_workers(&small(method), 1).unwrap();
            let b = run_sweep_with_workers(&small(method), 3).unwrap();
            assert_eq!(a.cells, b.cells);
        }
    }

    #[test]
    fn analytic_matches_effective() {
        let stats = compare_methods(&small(Method::Analytic), [Method::Analytic, Method::Effective]).unwrap();
        assert_eq!(stats.excluded_cells, 0);
        assert!(stats.max_fidelity_diff < 1e-9);
        assert_eq!(stats.max_latency_diff, 0.0);
    }

    #[test]
    fn degenerate_cell_is_poisoned() {
        let gamma = 0.8;
        let spec = SweepSpec {
            g_min: gamma / 4.0 / std::f64::consts::SQRT_2,
            g_max: gamma / 4.0 / std::f64::consts::SQRT_2,
            dw_min: 0.0,
            dw_max: 0.0,
            grid_nx: 1,
            grid_ny: 1,
            kappa: 0.0,
            gamma,
            method: Method::Effective,
            ..SweepSpec::default()
        };
        let h = run_sweep(&spec).unwrap();
        assert_eq!(h.poisoned_count(), 1);
        assert!(h.cells[0].poisoned.as_deref().unwrap().contains("degenerate"));
        let other = run_sweep(&SweepSpec {
            method: Method::Analytic,
            ..spec
        })
        .unwrap();
        let stats = compare_grids(&h, &other).unwrap();
        assert_eq!((stats.compared_cells, stats.excluded_cells), (0, 1));
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            SweepSpec { g_min: 0.0, ..SweepSpec::default() },
            SweepSpec { grid_nx: 0, ..SweepSpec::default() },
            SweepSpec { n_t: 1, ..SweepSpec::default() },
            SweepSpec { t_max: 0.0, ..SweepSpec::default() },
            SweepSpec { dw_max: -1.0, ..SweepSpec::default() },
        ];
        for spec in bad {
            assert!(run_sweep(&spec).is_err(), "{spec:?}");
        }
        let predictor = SweepSpec { n_t: 1, method: Method::Predictor, ..SweepSpec::default() };
        assert!(predictor.validate().is_ok());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("qutip".parse::<Method>().is_err());
    }

    #[test]
    fn benchmark_requires_three_repetitions() {
        assert!(matches!(benchmark(&[10], 1), Err(Error::Input(_))));
        let r = benchmark(&[10, 100], 3).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|row| row.speedup > 0.0 && row.analytic_std_s >= 0.0));
    }
}
