//! Command-line front end and file formats.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic::{occupations_series, Model};
use crate::error::Error;
use crate::metrics::{
    classify_n_default, lossless_peak_bound, predict_latency, Eta, NKind, TransferMetrics,
};
use crate::oracle::{effective_propagate, lindblad_evolve};
use crate::params::{parse_rate, parse_time, SystemParams, UNIT_NOTE};
use crate::series::{TimeGrid, TimeSeries};
use crate::sweep::{
    benchmark, compare_grids, run_sweep, run_sweep_with_workers, BenchReport, Cell, ComparisonStats,
    HeatmapGrid, Method, SweepSpec,
};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_INTEGRATION: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "wavelink", version, about = "Qubit-to-qubit state transfer through a lossy waveguide mode")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Occupation probabilities over time.
    Evolve(EvolveArgs),
    /// Fidelity/latency heatmap over (g, detuning).
    Sweep(SweepArgs),
    /// Closed-form latency prediction and ratio classification.
    Predict(PredictArgs),
    /// Compare two methods, or two saved heatmaps.
    Compare(CompareArgs),
    /// Time the closed form against the master-equation integrator.
    Bench(BenchArgs),
}

fn rate_arg(s: &str) -> Result<f64, String> {
    parse_rate(s).map_err(|e| e.to_string())
}

fn time_arg(s: &str) -> Result<f64, String> {
    parse_time(s).map_err(|e| e.to_string())
}

fn grid_arg(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad grid size `{s}`"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => parse(s).map(|n| (n, n)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// Coupling strength, e.g. 1.1GHz.
    #[arg(long, value_parser = rate_arg, allow_hyphen_values = true)]
    pub g: f64,
    /// Waveguide detuning from the qubits, e.g. 500MHz.
    #[arg(long, value_parser = rate_arg, allow_hyphen_values = true)]
    pub detuning: f64,
    /// Waveguide photon loss rate.
    #[arg(long, value_parser = rate_arg, default_value = "0Hz")]
    pub kappa: f64,
    /// Qubit decay rate.
    #[arg(long, value_parser = rate_arg, default_value = "0Hz")]
    pub gamma: f64,
    /// Qubit frequency (global phase only).
    #[arg(long = "omega-q", value_parser = rate_arg, default_value = "0Hz", allow_hyphen_values = true)]
    pub omega_q: f64,
}

impl SystemArgs {
    fn params(&self) -> Result<SystemParams, Error> {
        Ok(SystemParams::new(self.detuning, self.g, self.kappa, self.gamma)?.with_omega_q(self.omega_q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvolveMethod {
    Analytic,
    Lossless,
    Lindblad,
    Effective,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long = "t-max", value_parser = time_arg, default_value = "3ns")]
    pub t_max: f64,
    /// Number of samples, including t = 0 and t = t-max.
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "analytic")]
    pub method: EvolveMethod,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long = "g-min", value_parser = rate_arg, default_value = "10MHz")]
    pub g_min: f64,
    #[arg(long = "g-max", value_parser = rate_arg, default_value = "100MHz")]
    pub g_max: f64,
    #[arg(long = "dw-min", value_parser = rate_arg, default_value = "0Hz", allow_hyphen_values = true)]
    pub dw_min: f64,
    #[arg(long = "dw-max", value_parser = rate_arg, default_value = "100MHz", allow_hyphen_values = true)]
    pub dw_max: f64,
    /// Cells per axis, `N` or `NxM` (g × detuning).
    #[arg(long, value_parser = grid_arg, default_value = "50")]
    pub grid: (usize, usize),
    #[arg(long, value_parser = rate_arg, default_value = "0.1MHz")]
    pub kappa: f64,
    #[arg(long, value_parser = rate_arg, default_value = "0.1MHz")]
    pub gamma: f64,
    #[arg(long = "omega-q", value_parser = rate_arg, default_value = "0Hz", allow_hyphen_values = true)]
    pub omega_q: f64,
    /// Latency penalty in inverse seconds.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long = "t-max", value_parser = time_arg, default_value = "40ns")]
    pub t_max: f64,
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
    /// Worker threads (default: all cores).
    #[arg(long, env = "WAVELINK_WORKERS")]
    pub workers: Option<usize>,
}

impl GridArgs {
    fn spec(&self, method: Method) -> Result<SweepSpec, Error> {
        let spec = SweepSpec {
            g_min: self.g_min,
            g_max: self.g_max,
            dw_min: self.dw_min,
            dw_max: self.dw_max,
            grid_nx: self.grid.0,
            grid_ny: self.grid.1,
            kappa: self.kappa,
            gamma: self.gamma,
            omega_q: self.omega_q,
            eta: Eta::per_second(self.eta)?.value(),
            t_max: self.t_max,
            n_t: self.steps,
            method,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn run(&self, spec: &SweepSpec) -> Result<HeatmapGrid, Error> {
        match self.workers {
            Some(w) => run_sweep_with_workers(spec, w),
            None => run_sweep(spec),
        }
    }
}

fn method_arg(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_parser = method_arg, default_value = "analytic")]
    pub method: Method,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Exit non-zero when there is no transfer to predict.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Two saved heatmaps (CSV or JSON). Without them, both methods are run.
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Methods to run, comma separated.
    #[arg(long, value_parser = method_arg, value_delimiter = ',', default_value = "analytic,lindblad")]
    pub method: Vec<Method>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Grid sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000,100000")]
    pub steps: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Run(Error::Integration { .. }) => EXIT_INTEGRATION,
            CliError::Run(Error::Input(_) | Error::Parse { .. } | Error::Grid(_)) => EXIT_USAGE,
            CliError::Run(_) => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Identification written into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub units: String,
}

impl Provenance {
    fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            units: UNIT_NOTE.into(),
        }
    }

    fn comment_lines(&self) -> String {
        format!(
            "# {} {}\n# command: {}\n# units: {}\n",
            self.tool, self.version, self.command, self.units
        )
    }
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Shortest round-trip text, with an exponent for very small or large values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

// ---- evolve ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveDocument {
    pub provenance: Provenance,
    pub params: SystemParams,
    pub t_max: f64,
    pub steps: usize,
    pub series: Vec<(String, TimeSeries)>,
}

fn evolve_series(p: &SystemParams, grid: &TimeGrid, method: EvolveMethod) -> CliResult<Vec<(String, TimeSeries)>> {
    let one = |m: EvolveMethod| -> CliResult<(String, TimeSeries)> {
        let s = match m {
            EvolveMethod::Analytic => occupations_series(p, grid, Model::Lossy)?,
            EvolveMethod::Lossless => occupations_series(p, grid, Model::Lossless)?,
            EvolveMethod::Lindblad => lindblad_evolve(p, grid)?,
            EvolveMethod::Effective => effective_propagate(p, grid)?,
            EvolveMethod::All => unreachable!(),
        };
        let name = m.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        Ok((name, s))
    };
    match method {
        EvolveMethod::All => [EvolveMethod::Analytic, EvolveMethod::Lindblad, EvolveMethod::Effective]
            .into_iter()
            .map(one)
            .collect(),
        m => Ok(vec![one(m)?]),
    }
}

pub fn write_evolve_csv<W: Write>(mut out: W, doc: &EvolveDocument) -> CliResult<()> {
    out.write_all(doc.provenance.comment_lines().as_bytes())?;
    writeln!(out, "# params: {}", serde_json::to_string(&doc.params)?)?;
    writeln!(out, "# window: t_max = {} ns, steps = {}", doc.t_max, doc.steps)?;
    let methods: Vec<&str> = doc.series.iter().map(|(m, _)| m.as_str()).collect();
    writeln!(out, "# method: {}", methods.join(","))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for (m, _) in &doc.series {
        for col in ["P_A", "P_WG", "P_B"] {
            header.push(if doc.series.len() == 1 { col.to_string() } else { format!("{m}_{col}") });
        }
    }
    w.write_record(&header)?;
    let times = doc.series.first().map(|(_, s)| s.times.clone()).unwrap_or_default();
    for (i, t) in times.iter().enumerate() {
        let mut row = vec![num(*t)];
        for (_, s) in &doc.series {
            let o = s.occupations[i];
            row.extend([num(o.p_a), num(o.p_wg), num(o.p_b)]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_evolve(args: &EvolveArgs) -> CliResult<()> {
    let p = args.system.params()?;
    let grid = TimeGrid::uniform(args.t_max, args.steps)?;
    let doc = EvolveDocument {
        provenance: Provenance::new("evolve"),
        params: p,
        t_max: args.t_max,
        steps: args.steps,
        series: evolve_series(&p, &grid, args.method)?,
    };
    let mut out = open_output(args.output.out.as_deref())?;
    match args.output.format {
        Format::Csv => write_evolve_csv(&mut out, &doc)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

// ---- sweep ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub provenance: Provenance,
    pub heatmap: HeatmapGrid,
}

const HEATMAP_COLUMNS: [&str; 10] = [
    "g",
    "delta_omega",
    "fidelity",
    "latency",
    "efficiency",
    "eta",
    "achieved_index",
    "n_kind",
    "half_period",
    "poisoned",
];

pub fn write_heatmap_csv<W: Write>(mut out: W, grid: &HeatmapGrid) -> CliResult<()> {
    out.write_all(Provenance::new("sweep").comment_lines().as_bytes())?;
    writeln!(out, "# spec: {}", serde_json::to_string(&grid.spec)?)?;
    writeln!(out, "# wall_time_s: {}", grid.wall_time_s)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEATMAP_COLUMNS)?;
    for c in &grid.cells {
        let m = c.metrics;
        w.write_record([
            num(c.g),
            num(c.delta_omega),
            opt_num(m.map(|m| m.fidelity)),
            opt_num(m.map(|m| m.latency)),
            opt_num(m.map(|m| m.efficiency)),
            opt_num(m.map(|m| m.eta)),
            m.and_then(|m| m.achieved_index).map(|i| i.to_string()).unwrap_or_default(),
            c.n_kind.to_string(),
            num(c.half_period),
            c.poisoned.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(value: &str, column: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Io(format!("bad `{column}` value `{value}`")))
}

/// Read a heatmap written by [`write_heatmap_csv`].
pub fn read_heatmap_csv(text: &str) -> CliResult<HeatmapGrid> {
    let mut spec: Option<SweepSpec> = None;
    let mut wall_time_s = 0.0;
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some(json) = line.strip_prefix("# spec: ") {
            spec = Some(serde_json::from_str(json)?);
        } else if let Some(t) = line.strip_prefix("# wall_time_s: ") {
            wall_time_s = parse_field(t.trim(), "wall_time_s")?;
        }
    }
    let spec = spec.ok_or_else(|| CliError::Io("heatmap CSV lacks a `# spec:` line".into()))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().ne(HEATMAP_COLUMNS) {
        return Err(CliError::Io(format!("unexpected heatmap columns: {headers:?}")));
    }
    let mut cells = Vec::new();
    for record in reader.records() {
        let r = record?;
        let f = |i: usize| -> CliResult<f64> { parse_field(&r[i], HEATMAP_COLUMNS[i]) };
        let poisoned = (!r[9].is_empty()).then(|| r[9].to_string());
        let metrics = if poisoned.is_some() {
            None
        } else {
            Some(TransferMetrics {
                fidelity: f(2)?,
                latency: f(3)?,
                efficiency: f(4)?,
                eta: f(5)?,
                achieved_index: if r[6].is_empty() { None } else { Some(parse_field(&r[6], "achieved_index")?) },
            })
        };
        cells.push(Cell {
            g: f(0)?,
            delta_omega: f(1)?,
            metrics,
            n_kind: r[7].parse::<NKind>().map_err(|e| CliError::Io(e.to_string()))?,
            half_period: f(8)?,
            poisoned,
        });
    }
    let (g_values, dw_values) = (spec.g_values(), spec.dw_values());
    if cells.len() != g_values.len() * dw_values.len() {
        return Err(CliError::Io(format!(
            "heatmap has {} rows, spec implies {}",
            cells.len(),
            g_values.len() * dw_values.len()
        )));
    }
    Ok(HeatmapGrid {
        method: spec.method,
        spec,
        g_values,
        dw_values,
        cells,
        wall_time_s,
    })
}

/// Read a heatmap file in either format.
pub fn read_heatmap(path: &Path) -> CliResult<HeatmapGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let doc: SweepDocument = serde_json::from_str(&text)?;
        Ok(doc.heatmap)
    } else {
        read_heatmap_csv(&text)
    }
}

fn emit_heatmap(grid: &HeatmapGrid, output: &OutputArgs) -> CliResult<()> {
    let mut out = open_output(output.out.as_deref())?;
    match output.format {
        Format::Csv => write_heatmap_csv(&mut out, grid)?,
        Format::Json => {
            let doc = SweepDocument {
                provenance: Provenance::new("sweep"),
                heatmap: grid.clone(),
            };
            serde_json::to_writer(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let spec = args.grid.spec(args.method)?;
    let grid = args.grid.run(&spec)?;
    emit_heatmap(&grid, &args.output)
}

// ---- predict ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub latency_ns: Option<f64>,
    pub theta: f64,
    pub delta: f64,
    pub n_value: Option<f64>,
    pub n_kind: NKind,
    pub peak_bound: Option<f64>,
    pub no_transfer: Option<String>,
}

pub fn predict(p: &SystemParams) -> Result<Prediction, Error> {
    let d = p.derive()?;
    let class = classify_n_default(&d);
    let (latency_ns, no_transfer) = match predict_latency(&d) {
        Ok(t) => (Some(t), None),
        Err(Error::NoTransfer(why)) => (None, Some(why)),
        Err(e) => return Err(e),
    };
    Ok(Prediction {
        latency_ns,
        theta: d.osc_freq,
        delta: d.half_detuning,
        n_value: class.n_value,
        n_kind: class.kind,
        peak_bound: lossless_peak_bound(&class).ok(),
        no_transfer,
    })
}

fn cmd_predict(args: &PredictArgs) -> CliResult<()> {
    let pred = predict(&args.system.params()?)?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string(&pred)?),
        Format::Csv => {
            let latency = match (&pred.latency_ns, &pred.no_transfer) {
                (Some(t), _) => format!("latency_ns={t}"),
                (None, Some(why)) => format!("no transfer ({why})"),
                (None, None) => unreachable!(),
            };
            let mut line = format!(
                "{latency} theta={} delta={} n={} kind={}",
                pred.theta,
                pred.delta,
                pred.n_value.map_or("undefined".into(), |n| n.to_string()),
                pred.n_kind
            );
            if let Some(b) = pred.peak_bound {
                line.push_str(&format!(" lossless_peak_bound={b}"));
            }
            println!("{line}");
        }
    }
    match pred.no_transfer {
        Some(why) if args.strict => Err(CliError::Run(Error::NoTransfer(why))),
        _ => Ok(()),
    }
}

// ---- compare ----

fn write_stats<W: Write>(mut out: W, stats: &ComparisonStats, format: Format) -> CliResult<()> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                provenance: Provenance,
                stats: &'a ComparisonStats,
            }
            serde_json::to_writer_pretty(
                &mut out,
                &Doc {
                    provenance: Provenance::new("compare"),
                    stats,
                },
            )?;
            writeln!(out)?;
        }
        Format::Csv => {
            out.write_all(Provenance::new("compare").comment_lines().as_bytes())?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "method_a",
                "method_b",
                "mean_fidelity_diff",
                "max_fidelity_diff",
                "mean_latency_diff",
                "max_latency_diff",
                "within_half_period",
                "compared_cells",
                "excluded_cells",
                "wall_time_a_s",
                "wall_time_b_s",
            ])?;
            w.write_record([
                stats.methods[0].to_string(),
                stats.methods[1].to_string(),
                num(stats.mean_fidelity_diff),
                num(stats.max_fidelity_diff),
                num(stats.mean_latency_diff),
                num(stats.max_latency_diff),
                num(stats.within_half_period),
                stats.compared_cells.to_string(),
                stats.excluded_cells.to_string(),
                num(stats.wall_times_s[0]),
                num(stats.wall_times_s[1]),
            ])?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> CliResult<()> {
    let (a, b) = match args.files.as_slice() {
        [fa, fb] => (read_heatmap(fa)?, read_heatmap(fb)?),
        [] => {
            let [ma, mb] = args.method.as_slice() else {
                return Err(CliError::Usage("--method takes exactly two methods".into()));
            };
            let a = args.grid.run(&args.grid.spec(*ma)?)?;
            let b = args.grid.run(&args.grid.spec(*mb)?)?;
            (a, b)
        }
        _ => return Err(CliError::Usage("compare takes zero or two heatmap files".into())),
    };
    let stats = compare_grids(&a, &b)?;
    let mut out = open_output(args.output.out.as_deref())?;
    write_stats(&mut out, &stats, args.output.format)?;
    out.flush()?;
    Ok(())
}

// ---- bench ----

pub fn write_bench_csv<W: Write>(mut out: W, report: &BenchReport) -> CliResult<()> {
    out.write_all(Provenance::new("bench").comment_lines().as_bytes())?;
    writeln!(out, "# params: {}", serde_json::to_string(&report.params)?)?;
    writeln!(
        out,
        "# window: [0, {}] ns; repetitions: {} after one warm-up; timer granularity: {} s",
        report.t_max, report.repetitions, report.timer_granularity_s
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n_t",
        "analytic_mean_ms",
        "analytic_std_ms",
        "lindblad_mean_ms",
        "lindblad_std_ms",
        "speedup",
        "timer_limited",
    ])?;
    for r in &report.rows {
        w.write_record([
            r.n_t.to_string(),
            num(r.analytic_mean_s * 1e3),
            num(r.analytic_std_s * 1e3),
            num(r.lindblad_mean_s * 1e3),
            num(r.lindblad_std_s * 1e3),
            num(r.speedup),
            r.timer_limited.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    if args.reps < 3 {
        return Err(CliError::Usage(format!("--reps must be at least 3, got {}", args.reps)));
    }
    let report = benchmark(&args.steps, args.reps)?;
    let mut out = open_output(args.output.out.as_deref())?;
    match args.output.format {
        Format::Csv => write_bench_csv(&mut out, &report)?,
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                provenance: Provenance,
                report: &'a BenchReport,
            }
            serde_json::to_writer_pretty(
                &mut out,
                &Doc {
                    provenance: Provenance::new("bench"),
                    report: &report,
                },
            )?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Evolve(a) => cmd_evolve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
