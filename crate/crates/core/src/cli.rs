//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bound::{figure_configs, sweep, Numerics, PdarkGrid, SweepOutcome, SweepRow, SweepSpec};
use crate::error::{Error, Result};
use crate::params::{ideal_click_probability, to_dimensionless, DimensionlessConfig, PhysicalSetup};
use crate::selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

/// Environment variable with the default number of worker threads.
pub const THREADS_ENV: &str = "CLICKBOUND_THREADS";

/// Column order of result files.
pub const CSV_COLUMNS: [&str; 16] = [
    "config_id",
    "N",
    "dphi",
    "aspect",
    "phase",
    "dl_tilde",
    "dL_tilde",
    "pdark",
    "pmax",
    "zeta_opt",
    "e_opt",
    "informative",
    "w2_zero",
    "eta_max",
    "error_estimate",
    "status",
];

#[derive(Debug, Parser)]
#[command(name = "clickbound", version, about = "Upper bounds on the click probability of local photodetectors")]
#[command(args_override_self = true)]
struct Cli {
    /// File of `key = value` lines supplying any long flag; command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads [default: $CLICKBOUND_THREADS or all cores].
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound for one configuration over a grid of dark-count probabilities.
    Bound(BoundArgs),
    /// Bounds for the five reference configurations.
    Figure(FigureArgs),
    /// Reduce physical parameters to the dimensionless configuration.
    Convert(ConvertArgs),
    /// Run the invariant checks at reduced resolution.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; `-` writes to stdout.
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write the sampled W2 curve of each configuration to
    /// `DIR/curve_<config_id>.csv`.
    #[arg(long, value_name = "DIR")]
    curve_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NumericsArgs {
    /// Momentum quadrature tolerance relative to W2(0).
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Initial panels in each momentum direction.
    #[arg(long)]
    panels: Option<usize>,
    /// Panel budget of each adaptive integration.
    #[arg(long)]
    max_panels: Option<usize>,
    /// Spacing of the transform tables.
    #[arg(long)]
    table_step: Option<f64>,
    /// Relative level below which transforms are treated as zero.
    #[arg(long)]
    tail_threshold: Option<f64>,
    /// Accepted interpolation residual of the rapidity curve, relative to W2(0).
    #[arg(long)]
    interp_tol: Option<f64>,
    #[arg(long)]
    zeta_min: Option<f64>,
    #[arg(long)]
    zeta_max: Option<f64>,
    #[arg(long)]
    zeta_points: Option<usize>,
    /// Relative tolerance of the golden-section refinement in zeta.
    #[arg(long)]
    zeta_tol: Option<f64>,
}

impl NumericsArgs {
    fn numerics(&self) -> Numerics {
        let mut n = Numerics::default();
        if let Some(v) = self.rel_tol {
            n.grid.rel_tol = v;
        }
        if let Some(v) = self.panels {
            n.grid.radial_panels = v;
            n.grid.polar_panels = v;
            n.grid.azimuthal_panels = v;
        }
        if let Some(v) = self.max_panels {
            n.grid.max_panels = v;
        }
        if let Some(v) = self.table_step {
            n.transforms.table_step = v;
            n.grid.transverse_step = v;
        }
        if let Some(v) = self.tail_threshold {
            n.transforms.tail_threshold = v;
        }
        if let Some(v) = self.interp_tol {
            n.curve.interp_tol = v;
        }
        if let Some(v) = self.zeta_min {
            n.search.zeta_min = v;
        }
        if let Some(v) = self.zeta_max {
            n.search.zeta_max = v;
        }
        if let Some(v) = self.zeta_points {
            n.search.grid_points = v;
        }
        if let Some(v) = self.zeta_tol {
            n.search.rel_tol = v;
        }
        n
    }
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// Effective photon number N.
    #[arg(long = "n")]
    n: f64,
    /// Accumulated phase.
    #[arg(long)]
    dphi: f64,
    #[arg(long, default_value_t = 1.0)]
    aspect: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phase: f64,
    #[arg(long, default_value_t = 1.0)]
    dl_tilde: f64,
    #[arg(long = "dL-tilde", default_value_t = 1.0)]
    dbig_l_tilde: f64,
    #[arg(long, default_value_t = -12.0, allow_negative_numbers = true)]
    pdark_min_exp: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pdark_max_exp: f64,
    #[arg(long, default_value_t = 12)]
    pdark_points: usize,
    #[command(flatten)]
    numerics: NumericsArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(long, default_value_t = -12, allow_negative_numbers = true)]
    pdark_min_exp: i32,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    pdark_max_exp: i32,
    #[arg(long, default_value_t = 1)]
    points_per_decade: usize,
    #[command(flatten)]
    numerics: NumericsArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// Detector thickness.
    #[arg(long = "l")]
    l: f64,
    /// Side of the square face.
    #[arg(long = "L")]
    big_l: f64,
    /// Operation time.
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    k0: f64,
    /// Mean photon number |alpha_0|^2.
    #[arg(long)]
    alpha0_sq: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    arg_alpha0: f64,
    #[arg(long)]
    v_coh: f64,
    /// Longitudinal collar [default: l + tau].
    #[arg(long)]
    delta_l: Option<f64>,
    /// Transverse collar [default: L + tau].
    #[arg(long = "delta-L")]
    delta_big_l: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Seed of the random test grids.
    #[arg(long, default_value_t = 20240611)]
    seed: u64,
}

/// Reads `key = value` lines into long-flag tokens. Blank lines and lines
/// starting with `#` are skipped; `key = true` becomes a bare flag.
pub fn config_file_args(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::validation("config", format!("line {}: expected `key = value`", no + 1)));
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() {
            return Err(Error::validation("config", format!("line {}: empty key", no + 1)));
        }
        out.push(OsString::from(format!("--{key}")));
        if value != "true" {
            out.push(OsString::from(value));
        }
    }
    Ok(out)
}

/// Splices the tokens of a `--config` file in directly after the subcommand,
/// so that flags given on the command line override them.
fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut it = argv.iter().enumerate();
    while let Some((_, a)) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = it.next().map(|(_, p)| PathBuf::from(p));
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let extra = config_file_args(&text)?;
    let names = ["bound", "figure", "convert", "selftest"];
    let Some(pos) = argv.iter().position(|a| names.contains(&a.to_string_lossy().as_ref())) else {
        return Ok(argv);
    };
    let mut out = argv[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::command().try_get_matches_from(argv).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::validation("threads", "must be >= 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Io(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Bound(a) => run_bound(a),
        Command::Figure(a) => run_figure(a),
        Command::Convert(a) => run_convert(a),
        Command::Selftest(a) => run_selftest(a),
    })
}

fn run_bound(a: BoundArgs) -> Result<i32> {
    let config = DimensionlessConfig::with_collars(a.n, a.dphi, a.aspect, a.phase, a.dl_tilde, a.dbig_l_tilde)?;
    if a.pdark_points == 0 {
        return Err(Error::validation("pdark_points", "must be >= 1"));
    }
    let spec = SweepSpec {
        configs: vec![config],
        pdark: PdarkGrid {
            min_exp: a.pdark_min_exp,
            max_exp: a.pdark_max_exp,
            points: a.pdark_points,
        },
        numerics: a.numerics.numerics(),
    };
    run_sweep(&spec, &a.output)
}

fn run_figure(a: FigureArgs) -> Result<i32> {
    if a.points_per_decade == 0 {
        return Err(Error::validation("points_per_decade", "must be >= 1"));
    }
    let spec = SweepSpec {
        configs: figure_configs(),
        pdark: PdarkGrid::per_decade(a.pdark_min_exp, a.pdark_max_exp, a.points_per_decade),
        numerics: a.numerics.numerics(),
    };
    run_sweep(&spec, &a.output)
}

fn run_sweep(spec: &SweepSpec, out: &OutputArgs) -> Result<i32> {
    let outcome = sweep(spec)?;
    let bytes = match out.format {
        Format::Csv => results_csv(&outcome)?,
        Format::Json => results_json(spec, &outcome)?,
    };
    write_output(&out.output, &bytes)?;
    if let Some(dir) = &out.curve_dir {
        write_curves(dir, &outcome)?;
    }
    let failed = outcome.failures();
    let total = outcome.rows.len();
    if failed > 0 {
        eprintln!("{failed} of {total} points failed");
        for row in outcome.rows.iter().filter(|r| r.outcome.is_err()) {
            if let Err(e) = &row.outcome {
                eprintln!("  config {} pdark {:e}: {e}", row.config_id, row.pdark);
            }
        }
    }
    Ok(if failed == 0 {
        EXIT_OK
    } else if failed < total {
        EXIT_PARTIAL
    } else {
        EXIT_NUMERICAL
    })
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    if path.as_os_str() == "-" {
        let mut stdout = io::stdout().lock();
        stdout.write_all(bytes)?;
        stdout.flush()?;
    } else {
        fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn write_curves(dir: &Path, outcome: &SweepOutcome) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for (id, curve) in outcome.curves.iter().enumerate() {
        if let Some(curve) = curve {
            let path = dir.join(format!("curve_{id}.csv"));
            let file = fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            curve.write_debug_csv(io::BufWriter::new(file))?;
        }
    }
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// One result row, with every input echoed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub config_id: usize,
    #[serde(rename = "N")]
    pub n: f64,
    pub dphi: f64,
    pub aspect: f64,
    pub phase: f64,
    pub dl_tilde: f64,
    #[serde(rename = "dL_tilde")]
    pub dbig_l_tilde: f64,
    pub pdark: f64,
    pub pmax: Option<f64>,
    pub zeta_opt: Option<f64>,
    pub e_opt: Option<f64>,
    pub informative: Option<bool>,
    pub w2_zero: Option<f64>,
    pub eta_max: Option<f64>,
    pub error_estimate: Option<f64>,
    pub status: String,
    /// Error message of failed rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl From<&SweepRow> for ResultRecord {
    fn from(r: &SweepRow) -> Self {
        let ok = r.outcome.as_ref().ok();
        Self {
            config_id: r.config_id,
            n: r.config.n,
            dphi: r.config.delta_phi,
            aspect: r.config.aspect,
            phase: r.config.arg_alpha0,
            dl_tilde: r.config.dl_tilde,
            dbig_l_tilde: r.config.dbig_l_tilde,
            pdark: r.pdark,
            pmax: ok.map(|b| b.pmax),
            zeta_opt: ok.and_then(|b| b.zeta_opt),
            e_opt: ok.map(|b| b.e_opt),
            informative: ok.map(|b| b.informative),
            w2_zero: r.curve.map(|c| c.w2_zero),
            eta_max: r.curve.map(|c| c.eta_max),
            error_estimate: r.error_estimate,
            status: r.status().to_string(),
            message: r.outcome.as_ref().err().map(|e| e.to_string()),
        }
    }
}

impl ResultRecord {
    fn csv_fields(&self) -> [String; 16] {
        [
            self.config_id.to_string(),
            num(self.n),
            num(self.dphi),
            num(self.aspect),
            num(self.phase),
            num(self.dl_tilde),
            num(self.dbig_l_tilde),
            num(self.pdark),
            opt(self.pmax),
            opt(self.zeta_opt),
            opt(self.e_opt),
            self.informative.map(|b| b.to_string()).unwrap_or_default(),
            opt(self.w2_zero),
            opt(self.eta_max),
            opt(self.error_estimate),
            self.status.clone(),
        ]
    }
}

/// Result rows as CSV with the [`CSV_COLUMNS`] header.
pub fn results_csv(outcome: &SweepOutcome) -> Result<Vec<u8>> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for row in &outcome.rows {
        w.write_record(ResultRecord::from(row).csv_fields()).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

#[derive(Serialize)]
struct JsonReport<'a> {
    numerics: &'a Numerics,
    pdark: &'a PdarkGrid,
    results: Vec<ResultRecord>,
}

pub fn results_json(spec: &SweepSpec, outcome: &SweepOutcome) -> Result<Vec<u8>> {
    let report = JsonReport {
        numerics: &spec.numerics,
        pdark: &spec.pdark,
        results: outcome.rows.iter().map(ResultRecord::from).collect(),
    };
    let mut v = serde_json::to_vec_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

#[derive(Serialize)]
struct ConvertReport {
    #[serde(rename = "N")]
    n: f64,
    delta_phi: f64,
    omega0_tilde: f64,
    aspect: f64,
    arg_alpha0: f64,
    dl_tilde: f64,
    #[serde(rename = "dL_tilde")]
    dbig_l_tilde: f64,
    ideal_click_probability: f64,
}

fn run_convert(a: ConvertArgs) -> Result<i32> {
    let setup = PhysicalSetup {
        l: a.l,
        big_l: a.big_l,
        tau: a.tau,
        k0: a.k0,
        alpha0_sq: a.alpha0_sq,
        arg_alpha0: a.arg_alpha0,
        v_coh: a.v_coh,
        delta_l: a.delta_l.unwrap_or(a.l + a.tau),
        delta_big_l: a.delta_big_l.unwrap_or(a.big_l + a.tau),
    };
    let c = to_dimensionless(&setup)?;
    let report = ConvertReport {
        n: c.n,
        delta_phi: c.delta_phi,
        omega0_tilde: c.omega0_tilde,
        aspect: c.aspect,
        arg_alpha0: c.arg_alpha0,
        dl_tilde: c.dl_tilde,
        dbig_l_tilde: c.dbig_l_tilde,
        ideal_click_probability: ideal_click_probability(setup.alpha0_sq)?,
    };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))? + "\n",
        Format::Csv => format!(
            "N = {}\ndelta_phi = {}\nomega0_tilde = {}\na = {}\narg_alpha0 = {}\ndl_tilde = {}\ndL_tilde = {}\nideal_click_probability = {}\n",
            report.n,
            report.delta_phi,
            report.omega0_tilde,
            report.aspect,
            report.arg_alpha0,
            report.dl_tilde,
            report.dbig_l_tilde,
            report.ideal_click_probability
        ),
    };
    write_output(Path::new("-"), text.as_bytes())?;
    Ok(EXIT_OK)
}

fn run_selftest(a: SelftestArgs) -> Result<i32> {
    let checks = selftest::run_all(a.seed);
    let mut failed = 0;
    for c in &checks {
        println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NUMERICAL })
}
