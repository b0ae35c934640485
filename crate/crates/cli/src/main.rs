use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use nsbesov::experiments::{
    emit_report, fmt_f64, run_stability_experiment, run_verification_suites, write_csv, ExperimentConfig,
    ReportFormat, SolverMethod, SuiteConfig,
};
use nsbesov::norms::{critical_s, BlockNorms};
use nsbesov::perturbed::{Background, HeatPropagator, Propagator, StepPropagator};
use nsbesov::snapshot::{load_snapshot, load_vector_field, save_snapshot};
use nsbesov::solvers::{
    solve_ns_direct, solve_perturbation_picard, solve_stationary, DirectConfig, EvolutionPath, PicardConfig,
    StationaryConfig, StationaryResult,
};
use nsbesov::{besov_norm, weak_lp_norm, BesovIndex, Error, ErrorKind, VectorField};

#[derive(Parser)]
#[command(name = "nsbesov", version, about = "Besov-space diagnostics for Navier-Stokes flows on the torus")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Littlewood-Paley block norms and the aggregated Besov norm of a snapshot.
    Norms(NormsArgs),
    /// Stationary solution for a forcing snapshot by Picard iteration.
    Stationary(StationaryArgs),
    /// Time evolution from an initial snapshot.
    Evolve(EvolveArgs),
    /// Inequality and operator verification suites.
    Verify(VerifyArgs),
    /// Nonlinear stability run with decay-rate fits.
    Stability(StabilityArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormsArgs {
    /// JSON file with any of these options; command-line flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Summation exponent; `inf` for the supremum.
    #[arg(long)]
    q: Option<f64>,
    /// Also report the weak-L^p norm with this exponent.
    #[arg(long)]
    weak_lp: Option<f64>,
    #[arg(long, value_enum)]
    report: Option<Format>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StationaryArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    force: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    /// Extra regularity index tracked alongside the critical norm.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Snapshot of the solution.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Text report file; stdout if absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvolveArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    initial: Option<PathBuf>,
    #[arg(long)]
    force: Option<PathBuf>,
    /// `zero`, `solve` (stationary solution for the forcing) or a snapshot path.
    #[arg(long)]
    background: Option<String>,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Number of uniformly spaced sample times in (0, T].
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Integrability exponent of the monitored Besov norm.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    out_prefix: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Method {
    Direct,
    Picard,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suites to run, comma separated or repeated; `all` selects every suite.
    #[arg(long, value_delimiter = ',', required = true)]
    suite: Vec<String>,
    /// `zero` or a background snapshot.
    #[arg(long = "U")]
    background: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<usize>>,
    #[arg(long)]
    ensemble_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Summary CSV path, or a directory for the full report.
    #[arg(long, default_value = "verify_out")]
    out: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Error> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))
        }
    }
}

fn require<T>(v: Option<T>, name: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidConfig(format!("missing required option '{name}'")))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn run_norms(cli: NormsArgs) -> Result<(), Error> {
    let file: NormsArgs = read_config(cli.config.as_deref())?;
    let input = require(cli.input.or(file.input), "input")?;
    let s = require(cli.s.or(file.s), "s")?;
    let p = cli.p.or(file.p).unwrap_or(2.0);
    let q = cli.q.or(file.q).unwrap_or(f64::INFINITY);
    let weak = cli.weak_lp.or(file.weak_lp);
    let format = cli.report.or(file.report).unwrap_or(Format::Csv);
    let out = cli.out.or(file.out);

    let idx = BesovIndex::new(s, p, q)?;
    let field = load_snapshot(&input)?;
    let blocks = BlockNorms::compute(&field, p);
    let value = besov_norm(&field, &idx).value;
    let weak_value = weak.map(|r| weak_lp_norm(&field, r));
    let rows: Vec<(i32, f64, f64)> =
        blocks.weighted(s).zip(&blocks.lp).map(|((j, w), &lp)| (j, lp, w)).collect();

    let mut w = output(out.as_deref())?;
    match format {
        Format::Csv => {
            let header = ["j", "block_lp", "weighted"].map(String::from).to_vec();
            let mut table: Vec<Vec<String>> =
                rows.iter().map(|&(j, lp, wt)| vec![j.to_string(), fmt_f64(lp), fmt_f64(wt)]).collect();
            table.push(vec!["besov".into(), String::new(), fmt_f64(value)]);
            if let (Some(r), Some(v)) = (weak, weak_value) {
                table.push(vec![format!("weak_l{r}"), String::new(), fmt_f64(v)]);
            }
            write_csv(&mut w, &header, &table)?;
        }
        Format::Json => {
            let blocks: Vec<_> =
                rows.iter().map(|&(j, lp, wt)| json!({"j": j, "block_lp": lp, "weighted": wt})).collect();
            let doc = json!({
                "s": s, "p": p, "q": if q.is_finite() { json!(q) } else { json!("inf") },
                "blocks": blocks, "besov": value,
                "weak_lp": weak.map(|r| json!({"p": r, "value": weak_value})),
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&doc).map_err(|e| Error::Serialization(e.to_string()))?)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn stationary_text(r: &StationaryResult, cfg: &StationaryConfig) -> String {
    let mut out = format!(
        "p: {}\ncritical_index: {}\niterations: {}\nresidual: {:e}\nforcing_norm: {:e}\nsolution_norm: {:e}\nratio: {:e}\n",
        cfg.p,
        critical_s(r.u.dim(), cfg.p),
        r.iterations,
        r.residual,
        r.forcing_norm,
        r.norm,
        r.ratio()
    );
    if let (Some(s), Some((v, ratio))) = (cfg.s_extra, r.extra) {
        out.push_str(&format!("extra_index: {s}\nextra_norm: {v:e}\nextra_ratio: {ratio:e}\n"));
    }
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ");
    out.push_str(&format!("increments: {}\n", list(&r.increments)));
    out.push_str(&format!("contraction_factors: {}\n", list(&r.contraction_factors)));
    out
}

fn run_stationary(cli: StationaryArgs) -> Result<(), Error> {
    let file: StationaryArgs = read_config(cli.config.as_deref())?;
    let force = require(cli.force.or(file.force), "force")?;
    let mut cfg = StationaryConfig::default();
    if let Some(p) = cli.p.or(file.p) {
        cfg.p = p;
    }
    cfg.s_extra = cli.s.or(file.s);
    if let Some(t) = cli.tol.or(file.tol) {
        cfg.tol = t;
    }
    if let Some(m) = cli.max_iter.or(file.max_iter) {
        cfg.max_iter = m;
    }
    let f = load_vector_field(&force)?;
    let r = solve_stationary(&f, &cfg)?;
    if let Some(out) = cli.out.or(file.out) {
        save_snapshot(&r.u, &out)?;
        info!("wrote {}", out.display());
    }
    let mut w = output(cli.report.or(file.report).as_deref())?;
    w.write_all(stationary_text(&r, &cfg).as_bytes())?;
    w.flush()?;
    Ok(())
}

fn resolve_background(spec: Option<&str>, force: Option<&VectorField>, like: &VectorField) -> Result<VectorField, Error> {
    match spec {
        None | Some("zero") => Ok(VectorField::zeros(like.grid())),
        Some("solve") => {
            let f = force.ok_or_else(|| Error::InvalidConfig("background 'solve' needs a forcing".into()))?;
            Ok(solve_stationary(f, &StationaryConfig::default())?.u)
        }
        Some(path) => load_vector_field(path),
    }
}

fn run_evolve(cli: EvolveArgs) -> Result<(), Error> {
    let file: EvolveArgs = read_config(cli.config.as_deref())?;
    let initial = require(cli.initial.or(file.initial), "initial")?;
    let t_end = require(cli.t_end.or(file.t_end), "T")?;
    let count = cli.samples.or(file.samples).unwrap_or(10);
    let dt = cli.dt.or(file.dt).unwrap_or(1e-3);
    let method = cli.method.or(file.method).unwrap_or(Method::Direct);
    let p = cli.p.or(file.p).unwrap_or(2.0);
    let prefix = cli.out_prefix.or(file.out_prefix).unwrap_or_else(|| PathBuf::from("evolve"));
    if t_end.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || count == 0 {
        return Err(Error::InvalidArgument("need T > 0 and at least one sample".into()));
    }

    let a = load_vector_field(&initial)?;
    let f = cli.force.or(file.force).map(load_vector_field).transpose()?;
    let bg_spec = cli.background.or(file.background);
    // Picard evolves the perturbation around a stationary flow, so a forcing implies one.
    let bg_spec = match (method, bg_spec.as_deref(), &f) {
        (Method::Picard, None, Some(_)) => Some("solve".to_string()),
        _ => bg_spec,
    };
    let u = resolve_background(bg_spec.as_deref(), f.as_ref(), &a)?;
    let samples: Vec<f64> = (1..=count).map(|i| t_end * i as f64 / count as f64).collect();

    let mut path: EvolutionPath = match method {
        Method::Direct => solve_ns_direct(&a, f.as_ref(), &samples, &DirectConfig { dt, ..DirectConfig::default() })?,
        Method::Picard => {
            let bg = Background::new(u.clone())?;
            let b = &a - &u;
            let prop: Box<dyn Propagator> = if bg.is_zero() {
                Box::new(HeatPropagator::new(a.grid()))
            } else {
                Box::new(StepPropagator { bg, dt })
            };
            let (pert, report) = solve_perturbation_picard(&b, prop.as_ref(), &samples, &PicardConfig::default())?;
            info!("picard converged in {} iterations (residual {:e})", report.iterations, report.residual);
            pert.shifted(&u.scale(-1.0))
        }
    };

    let n = a.dim() as f64;
    let sp = critical_s(a.dim(), p);
    path.add_trace(&format!("besov_{sp}_{p}_inf"), |v| nsbesov::norms::besov(v, sp, p, f64::INFINITY));
    path.add_trace(&format!("perturbation_besov_{sp}_{p}_inf"), |v| {
        nsbesov::norms::besov(&(v - &u), sp, p, f64::INFINITY)
    });
    path.add_trace(&format!("weak_l{n}"), |v| weak_lp_norm(v, n));
    path.add_trace("energy", |v| v.energy());
    path.add_trace("divergence_defect", |v| v.divergence_defect());

    let stem = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "evolve".into());
    let dir = prefix.parent().filter(|d| !d.as_os_str().is_empty()).map(Path::to_path_buf).unwrap_or_default();
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&dir)?;
    }
    for (i, state) in path.states.iter().enumerate() {
        save_snapshot(state, dir.join(format!("{stem}_{i:04}.nsbf")))?;
    }
    let mut header = vec!["t".to_string()];
    header.extend(path.norm_traces.iter().map(|t| t.name.clone()));
    let rows: Vec<Vec<String>> = path
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = vec![fmt_f64(t)];
            row.extend(path.norm_traces.iter().map(|tr| fmt_f64(tr.values[i])));
            row
        })
        .collect();
    let csv_path = dir.join(format!("{stem}_norms.csv"));
    write_csv(BufWriter::new(File::create(&csv_path)?), &header, &rows)?;
    println!("wrote {} snapshots and {}", path.len(), csv_path.display());
    Ok(())
}

fn run_verify(cli: VerifyArgs) -> Result<(), Error> {
    let mut cfg = match &cli.config {
        Some(p) => SuiteConfig::from_json(&std::fs::read_to_string(p)?)?,
        None => SuiteConfig::default(),
    };
    match cli.background.as_deref() {
        None => {}
        Some("zero") => {
            cfg.background = 0.0;
            cfg.background_snapshot = None;
        }
        Some(path) => cfg.background_snapshot = Some(PathBuf::from(path)),
    }
    if let Some(s) = cli.s {
        cfg.s = s;
    }
    if let Some(t) = cli.tau {
        cfg.tau = t;
    }
    if let Some(pts) = cli.points {
        cfg.points = pts;
    }
    if let Some(m) = cli.ensemble_size {
        cfg.ensemble_size = m;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.t_min = cli.t_min.or(cfg.t_min);
    cfg.t_max = cli.t_max.or(cfg.t_max);

    let report = run_verification_suites(&cli.suite, &cfg)?;
    if cli.out.extension().is_some_and(|e| e == "csv") {
        emit_report(&report, ReportFormat::Csv, &cli.out)?;
        let stem = cli.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let dir = cli.out.parent().map(Path::to_path_buf).unwrap_or_default();
        for r in &report.results {
            emit_report(r, ReportFormat::Csv, &dir.join(format!("{stem}_{}_N{}.csv", r.suite, r.resolution)))?;
        }
    } else {
        report.emit(&cli.out)?;
    }
    print!("{}", nsbesov::experiments::Reportable::text(&report));
    Ok(())
}

fn run_stability(cli: StabilityArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::load(&cli.config)?;
    if let Some(n) = cli.points {
        cfg.grid.points = n;
    }
    if let Some(m) = cli.method {
        cfg.method = match m {
            Method::Direct => SolverMethod::Direct,
            Method::Picard => SolverMethod::Picard,
        };
    }
    if let Some(dt) = cli.dt {
        cfg.dt = dt;
    }
    if let Some(t) = cli.t_min {
        cfg.window.t_min = t;
    }
    if let Some(t) = cli.t_max {
        cfg.window.t_max = t;
    }
    cfg.validate()?;
    let report = run_stability_experiment(&cfg)?;
    let output = cfg.output.clone();
    let csv = cli.csv.or(output.csv).unwrap_or_else(|| PathBuf::from("stability.csv"));
    let summary = cli.summary.or(output.summary).unwrap_or_else(|| PathBuf::from("stability_summary.json"));
    emit_report(&report, ReportFormat::Csv, &csv)?;
    emit_report(&report, ReportFormat::Json, &summary)?;
    let s = &report.summary;
    println!(
        "slope_high {} (predicted {}, pass {}), slope_low {} (predicted {}, pass {})",
        s.slope_high.map_or("null".into(), fmt_f64),
        fmt_f64(s.predicted_high),
        s.pass_high,
        s.slope_low.map_or("null".into(), fmt_f64),
        fmt_f64(s.predicted_low),
        s.pass_low
    );
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Precondition => 2,
        ErrorKind::Numerical => 3,
        ErrorKind::Io => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Norms(a) => run_norms(a),
        Command::Stationary(a) => run_stationary(a),
        Command::Evolve(a) => run_evolve(a),
        Command::Verify(a) => run_verify(a),
        Command::Stability(a) => run_stability(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
