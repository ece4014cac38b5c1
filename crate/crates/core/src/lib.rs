//! Closed-form dynamics of single-excitation state transfer between two
//! qubits coupled through one lossy waveguide mode, with independent
//! numerical oracles, transfer metrics and parameter sweeps.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod params;
pub mod series;
pub mod sweep;

pub use analytic::{lossless_occupations, lossy_occupations, occupations_series, Model, OccupationTriple};
pub use error::{Error, Result};
pub use metrics::{classify_n, lossless_peak_bound, predict_latency, transfer_metrics, Eta, NClass, NKind, TransferMetrics};
pub use params::{derive, parse_rate, parse_time, DerivedParams, SystemParams};
pub use series::{TimeGrid, TimeSeries};
pub use sweep::{benchmark, compare_methods, run_sweep, HeatmapGrid, Method, SweepSpec};
