//! `bound-id` command-line interface.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 assumption violation,
//! 3 numerical failure.

use bound_id::bounds::{default_x_grid, BoundCurve, BoundsConfig, BoundsEngine, Method};
use bound_id::dist::{
    joint_x_support, Dominance, EmpiricalModel, KernelWeights, OutcomeMode, SwappedArms,
};
use bound_id::grid::{midpoint_grid, YGrid};
use bound_id::sim::DgpConfig;
use bound_id::{
    fit_empirical, make_analytic, orbit, pi_set, sample, t_hat_check, t_tilde, true_g,
    validate_assumptions, AnalyticModel, Arm, CondModel, Dataset, DgpSpec, Error, ExecPolicy,
    FitConfig, PiSetKind, SCHEMA_TAG,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bound-id", version, about = "Bounds on nonseparable structural functions with a binary instrument")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a sample from a closed-form DGP and write it as `y,x,z` CSV.
    Simulate(SimulateArgs),
    /// Check the instrument assumptions and print the report as JSON.
    Validate(ValidateArgs),
    /// Compute bound curves.
    Bounds(BoundsArgs),
    /// Tabulate an n-step outcome transport anchored at `x`.
    Transport(TransportArgs),
    /// Print an index-pair set as JSON.
    Pisets(PisetsArgs),
    /// Write the CSV bundle behind the figures.
    FigureData(FigureArgs),
}

/// DGP parameters; each flag overrides the config file.
#[derive(Args, Default)]
struct DgpFlags {
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tail: Option<f64>,
}

#[derive(Args)]
struct Source {
    /// Dataset CSV with columns `y,x,z`; fits an empirical model.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Flat JSON config (DGP, fit and bound parameters).
    #[arg(long, alias = "config")]
    spec: Option<PathBuf>,
    #[command(flatten)]
    dgp: DgpFlags,
    /// Kernel bandwidth for both arms of an empirical fit.
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[command(flatten)]
    dgp: DgpFlags,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: Source,
    /// Dominance tolerance on `F(x|1) − F(x|0)`.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: Source,
    /// Comma-separated methods among M, C, MC, G.
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated quantile levels in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    e: Option<String>,
    /// Outcome grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Number of x-grid points over the joint regressor support.
    #[arg(long)]
    x_points: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Tilde,
    Hat,
    Check,
}

#[derive(Args)]
struct TransportArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
    n: i32,
    #[arg(long, value_enum, default_value = "tilde")]
    kind: KindArg,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    M,
    C,
}

#[derive(Args)]
struct PisetsArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, allow_negative_numbers = true)]
    xp: f64,
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, value_enum, default_value = "m")]
    kind: SetArg,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[command(flatten)]
    dgp: DgpFlags,
    #[arg(long, allow_negative_numbers = true)]
    e: Option<f64>,
    #[arg(long)]
    x_points: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

/// Flat JSON config file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    kappa: Option<f64>,
    a0: Option<f64>,
    b0: Option<f64>,
    a1: Option<f64>,
    b1: Option<f64>,
    beta0: Option<f64>,
    beta1: Option<f64>,
    c: Option<f64>,
    d: Option<f64>,
    rho: Option<f64>,
    p: Option<f64>,
    tail: Option<f64>,
    n: Option<usize>,
    seed: Option<u64>,
    e: Option<f64>,
    method: Option<String>,
    grid: Option<usize>,
    x_points: Option<usize>,
    quad_nodes: Option<usize>,
    level_tol: Option<f64>,
    crossing_steps: Option<f64>,
    bandwidth: Option<f64>,
    bandwidth0: Option<f64>,
    bandwidth1: Option<f64>,
    x_nodes: Option<usize>,
    outcome: Option<OutcomeMode>,
    weights: Option<KernelWeights>,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Violated(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::from(e))
    }
}

type CliResult<T> = Result<T, Failure>;

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Violated(_) => 2,
            Failure::Lib(e) if e.is_assumption_violation() || matches!(e, Error::RequiresContinuousOutcome) => 2,
            Failure::Lib(e) if e.is_numerical() => 3,
            Failure::Lib(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Violated(m) => format!("assumption violated: {m}"),
            Failure::Lib(e) => format!("error: {e}"),
        }
    }
}

fn load_config(path: Option<&Path>) -> CliResult<FileConfig> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

fn dgp_spec(file: &FileConfig, flags: &DgpFlags) -> CliResult<DgpSpec> {
    let cfg = DgpConfig {
        family: flags.family.clone().or_else(|| file.family.clone()),
        alpha: flags.alpha.or(file.alpha),
        beta: flags.beta.or(file.beta),
        kappa: flags.kappa.or(file.kappa),
        a0: flags.a0.or(file.a0),
        b0: flags.b0.or(file.b0),
        a1: flags.a1.or(file.a1),
        b1: flags.b1.or(file.b1),
        beta0: flags.beta0.or(file.beta0),
        beta1: flags.beta1.or(file.beta1),
        c: flags.c.or(file.c),
        d: flags.d.or(file.d),
        rho: flags.rho.or(file.rho),
        p: flags.p.or(file.p),
        tail: flags.tail.or(file.tail),
    };
    cfg.into_spec().map_err(|e| Failure::Usage(e.to_string()))
}

fn bounds_config(file: &FileConfig, grid: Option<usize>) -> BoundsConfig {
    let mut cfg = BoundsConfig { y_grid: grid.or(file.grid), ..Default::default() };
    if let Some(q) = file.quad_nodes {
        cfg.quad_nodes = q;
    }
    if let Some(t) = file.level_tol {
        cfg.level_tol = t;
    }
    if file.crossing_steps.is_some() {
        cfg.crossing_steps = file.crossing_steps;
    }
    cfg.exec = exec_policy();
    cfg
}

fn exec_policy() -> ExecPolicy {
    match std::env::var("BOUND_ID_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(1) => ExecPolicy::Sequential,
        _ => ExecPolicy::Parallel,
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("BOUND_ID_THREADS") else { return Ok(()) };
    match v.parse::<usize>() {
        Ok(n) if n > 0 => {
            bound_id::exec::configure_threads(n);
            Ok(())
        }
        _ => Err(Failure::Usage(format!("BOUND_ID_THREADS must be a positive integer, got '{v}'"))),
    }
}

enum Model {
    Analytic(AnalyticModel),
    Empirical(EmpiricalModel),
    SwappedAnalytic(SwappedArms<AnalyticModel>),
    SwappedEmpirical(SwappedArms<EmpiricalModel>),
}

macro_rules! with_model {
    ($model:expr, $m:ident => $body:expr) => {
        match $model {
            Model::Analytic($m) => $body,
            Model::Empirical($m) => $body,
            Model::SwappedAnalytic($m) => $body,
            Model::SwappedEmpirical($m) => $body,
        }
    };
}

struct Loaded {
    model: Model,
    file: FileConfig,
}

/// Build the model named by `source`, relabelling the instrument arms when
/// `Z = 1` is the dominated arm.
fn load(source: &Source, relabel: bool) -> CliResult<Loaded> {
    let file = load_config(source.spec.as_deref())?;
    let model = match &source.data {
        Some(path) => {
            let data = Dataset::from_path(path)?;
            let both = source.bandwidth.or(file.bandwidth);
            let fit = FitConfig {
                bandwidth: [file.bandwidth0.or(both), file.bandwidth1.or(both)],
                x_nodes: file.x_nodes.unwrap_or(FitConfig::default().x_nodes),
                y_grid: file.grid,
                outcome: file.outcome.unwrap_or_default(),
                weights: file.weights.unwrap_or_default(),
            };
            Model::Empirical(fit_empirical(&data, &fit)?)
        }
        None => {
            Model::Analytic(make_analytic(&dgp_spec(&file, &source.dgp)?)?)
        }
    };
    let model = if relabel { relabelled(model) } else { model };
    Ok(Loaded { model, file })
}

fn relabelled(model: Model) -> Model {
    let flip = with_model!(&model, m => validate_assumptions(m, None).direction == Dominance::Z1Dominates);
    if !flip {
        return model;
    }
    eprintln!("note: Z=1 is the dominated arm; relabelling instrument arms");
    match model {
        Model::Analytic(m) => Model::SwappedAnalytic(SwappedArms(m)),
        Model::Empirical(m) => Model::SwappedEmpirical(SwappedArms(m)),
        other => other,
    }
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult<()> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Failure::Lib(Error::from(e)))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{json}")?;
    out.flush()?;
    Ok(())
}

fn parse_list<T>(raw: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> CliResult<Vec<T>> {
    raw.split(',')
        .map(|s| parse(s.trim()).ok_or_else(|| Failure::Usage(format!("invalid {what} '{}'", s.trim()))))
        .collect()
}

fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let file = load_config(args.spec.as_deref())?;
    let spec = dgp_spec(&file, &args.dgp)?;
    let n = args.n.or(file.n).unwrap_or(10_000);
    if n == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    let data = sample(&spec, n, args.seed.or(file.seed).unwrap_or(42));
    let mut w = output(args.out.as_deref())?;
    data.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn validate(args: &ValidateArgs) -> CliResult<()> {
    let loaded = load(&args.source, false)?;
    let report = with_model!(&loaded.model, m => validate_assumptions(m, args.tol));
    print_json(&report)?;
    if report.satisfied() {
        Ok(())
    } else {
        Err(Failure::Violated(report.summary()))
    }
}

fn compute_bounds<M: CondModel>(
    model: &M,
    cfg: &BoundsConfig,
    methods: &[Method],
    levels: &[f64],
    x_points: usize,
) -> CliResult<Vec<BoundCurve>> {
    for &e in levels {
        if !(e > 0.0 && e < 1.0) {
            return Err(Failure::Usage(Error::EOutOfRange { e }.to_string()));
        }
    }
    let xs = default_x_grid(model, x_points);
    let engine = BoundsEngine::for_methods(model, cfg, methods)?;
    let mut curves = Vec::new();
    for &method in methods {
        for &e in levels {
            curves.push(engine.curve(e, &xs, method)?);
        }
    }
    Ok(curves)
}

fn bounds(args: &BoundsArgs) -> CliResult<()> {
    let file = load_config(args.source.spec.as_deref())?;
    let methods = match args.method.as_deref().or(file.method.as_deref()) {
        Some(raw) => parse_list(raw, "method", Method::parse)?,
        None => vec![Method::M],
    };
    let levels = match &args.e {
        Some(raw) => parse_list(raw, "quantile level", |s| s.parse().ok())?,
        None => vec![file.e.unwrap_or(0.5)],
    };
    let x_points = args.x_points.or(file.x_points).unwrap_or(200);
    if x_points == 0 {
        return Err(Failure::Usage("--x-points must be positive".into()));
    }
    let loaded = load(&args.source, true)?;
    let cfg = bounds_config(&loaded.file, args.grid);
    let curves = with_model!(&loaded.model, m => compute_bounds(m, &cfg, &methods, &levels, x_points))?;
    let crossed: usize = curves.iter().map(|c| c.crossed.iter().filter(|&&b| b).count()).sum();
    if crossed > 0 {
        eprintln!("note: bounds crossed at {crossed} grid point(s) and were collapsed to the midpoint");
    }
    let mut w = output(args.out.as_deref())?;
    BoundCurve::write_csv(&curves, &mut w)?;
    w.flush()?;
    Ok(())
}

fn outcome_grid<M: CondModel>(model: &M, size: Option<usize>) -> CliResult<YGrid> {
    let (lo, hi) = model.y_range();
    Ok(YGrid::new(lo, hi, size.unwrap_or(model.default_y_grid()))?)
}

fn transport(args: &TransportArgs) -> CliResult<()> {
    let loaded = load(&args.source, true)?;
    let size = args.grid.or(loaded.file.grid);
    let map = with_model!(&loaded.model, m => {
        let grid = outcome_grid(m, size)?;
        match args.kind {
            KindArg::Tilde => t_tilde(m, args.x, args.n, grid)?,
            KindArg::Hat => t_hat_check(m, args.x, args.n, grid)?.0,
            KindArg::Check => t_hat_check(m, args.x, args.n, grid)?.1,
        }
    });
    let kind = match args.kind {
        KindArg::Tilde => "tilde",
        KindArg::Hat => "hat",
        KindArg::Check => "check",
    };
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "{SCHEMA_TAG}")?;
    writeln!(w, "y,value,kind,x,n")?;
    for (y, v) in map.knots().into_iter().zip(map.values()) {
        writeln!(w, "{y},{v},{kind},{},{}", args.x, args.n)?;
    }
    w.flush()?;
    Ok(())
}

fn pisets(args: &PisetsArgs) -> CliResult<()> {
    let loaded = load(&args.source, true)?;
    let kind = match args.kind {
        SetArg::M => PiSetKind::M,
        SetArg::C => PiSetKind::C,
    };
    let set = with_model!(&loaded.model, m => pi_set(m, args.xp, args.x, kind))?;
    print_json(&set)
}

/// Spec echo with unset keys dropped.
fn spec_echo(spec: &DgpSpec) -> CliResult<String> {
    let mut v = serde_json::to_value(spec.to_config()).map_err(|e| Failure::Lib(Error::from(e)))?;
    if let Some(obj) = v.as_object_mut() {
        obj.retain(|_, val| !val.is_null());
    }
    Ok(v.to_string())
}

fn figure_data(args: &FigureArgs) -> CliResult<()> {
    let file = load_config(args.spec.as_deref())?;
    let spec = dgp_spec(&file, &args.dgp)?;
    let e = args.e.or(file.e).unwrap_or(0.5);
    if !(e > 0.0 && e < 1.0) {
        return Err(Failure::Usage(Error::EOutOfRange { e }.to_string()));
    }
    let x_points = args.x_points.or(file.x_points).unwrap_or(200);
    if x_points == 0 {
        return Err(Failure::Usage("--x-points must be positive".into()));
    }
    let model = make_analytic(&spec)?;
    let cfg = bounds_config(&file, args.grid);
    fs::create_dir_all(&args.out)?;
    let echo = spec_echo(&spec)?;
    let create = |name: &str| -> CliResult<BufWriter<File>> {
        let mut w = BufWriter::new(File::create(args.out.join(name))?);
        writeln!(w, "{SCHEMA_TAG}")?;
        writeln!(w, "# spec {echo}")?;
        Ok(w)
    };

    let xs = default_x_grid(&model, x_points);
    let methods = [Method::M, Method::C];
    let engine = BoundsEngine::for_methods(&model, &cfg, &methods)?;
    let m = engine.curve(e, &xs, Method::M)?;
    let c = engine.curve(e, &xs, Method::C)?;

    let mut w = create("figure4.csv")?;
    writeln!(w, "x,e,true_g,lower,upper,method,point_id")?;
    for (j, &x) in xs.iter().enumerate() {
        let g = true_g(&spec, x, e);
        writeln!(w, "{x},{e},{g},{},{},{},{}", m.lower[j], m.upper[j], m.method, u8::from(m.point_identified[j]))?;
    }
    w.flush()?;

    for (name, curve) in [("envelope_m.csv", &m), ("envelope_c.csv", &c)] {
        let mut w = create(name)?;
        writeln!(w, "x,e,true_g,stage_lower,stage_upper,lower,upper,method")?;
        for (j, &x) in xs.iter().enumerate() {
            writeln!(
                w,
                "{x},{e},{},{},{},{},{},{}",
                true_g(&spec, x, e),
                curve.stage_lower[j],
                curve.stage_upper[j],
                curve.lower[j],
                curve.upper[j],
                curve.method
            )?;
        }
        w.flush()?;
    }

    let support = joint_x_support(&model);
    let mut w = create("cdf_pair.csv")?;
    writeln!(w, "x,cdf_z0,cdf_z1")?;
    for x in midpoint_grid(support.lo, support.hi, 201) {
        writeln!(w, "{x},{},{}", model.cdf_x(x, Arm::Z0), model.cdf_x(x, Arm::Z1))?;
    }
    w.flush()?;

    let s0 = model.x_support(Arm::Z0);
    let mut w = create("orbit.csv")?;
    writeln!(w, "anchor,n,x")?;
    for anchor in midpoint_grid(s0.lo, s0.hi, 3) {
        for (n, x) in orbit(&model, anchor)?.entries() {
            writeln!(w, "{anchor},{n},{x}")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Validate(a) => validate(a),
        Cmd::Bounds(a) => bounds(a),
        Cmd::Transport(a) => transport(a),
        Cmd::Pisets(a) => pisets(a),
        Cmd::FigureData(a) => figure_data(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(Error::Io(e))) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
