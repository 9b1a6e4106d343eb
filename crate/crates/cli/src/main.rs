//! `gdtransfer` command-line front end.
//!
//! Exit status: 0 success, 2 usage, 3 numeric domain, 4 I/O, 5 validation
//! failure.

mod config;
mod error;
mod io;
mod plot;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gdtransfer::discord::{gaussian_discord, ppt_min_eigenvalue};
use gdtransfer::figures::Figure;
use gdtransfer::montecarlo::{validate_against_engine, ACCEPT_SIGMAS, MIN_SAMPLES};
use gdtransfer::optimize::{
    maximize_2d_with, maximize_scalar_with, SearchOptions, ANCILLA_NOISE_RANGE, ATTENUATION_RANGE,
    DEFAULT_TOL, GAIN_RANGE, MIN_GRID_1D, MIN_GRID_2D, SQUEEZE_RANGE,
};
use gdtransfer::protocol::{
    attenuate_both_modes, make_asymmetric_discordant, make_epr, make_symmetric_discordant,
    transfer_closed_form, transfer_via_engine,
};
use gdtransfer::sweep::{
    evaluate_point, format_sig, run_sweep, AncillaKind, Axis, Model, Output, Param, ParamSet, SweepSpec,
    SweepTable,
};
use gdtransfer::{Ancilla, Efficiencies, Execution, TransferScenario, TwoModeCovariance};

use crate::config::Config;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "gdtransfer", version, about = "Gaussian discord and its remote transfer")]
struct Cli {
    /// Output file (transfer, sweep) or directory (figure).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key = value file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also render SVG plots next to the CSVs.
    #[arg(long, global = true)]
    plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Discord breakdown of a state.
    Discord(DiscordArgs),
    /// Run one protocol scenario.
    Transfer(TransferArgs),
    /// Sweep one or two parameters and write a CSV.
    Sweep(SweepArgs),
    /// Regenerate the CSVs of a figure.
    Figure(FigureArgs),
    /// Maximize output discord over one or two parameters.
    Optimize(OptimizeArgs),
    /// Compare a seeded Monte Carlo run with the covariance engine.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AncillaArg {
    Discordant,
    Epr,
}

impl std::str::FromStr for AncillaArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug, Default)]
struct ScenarioArgs {
    /// Discording noise of the initial state.
    #[arg(long)]
    va: Option<f64>,
    #[arg(long, value_enum)]
    ancilla: Option<AncillaArg>,
    /// Discording noise of a discordant ancilla.
    #[arg(long)]
    vb: Option<f64>,
    /// Squeezing of an EPR ancilla.
    #[arg(long)]
    r: Option<f64>,
    /// Feedforward gain.
    #[arg(long)]
    g: Option<f64>,
    /// Detection efficiency applied to all four modes.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eta_a: Option<f64>,
    #[arg(long)]
    eta_e: Option<f64>,
    #[arg(long)]
    eta_f: Option<f64>,
    #[arg(long)]
    eta_d: Option<f64>,
}

impl ScenarioArgs {
    fn ancilla_kind(&self, cfg: &Config) -> Result<AncillaKind, CliError> {
        Ok(match cfg.resolve(self.ancilla, "ancilla", AncillaArg::Discordant)? {
            AncillaArg::Discordant => AncillaKind::Discordant,
            AncillaArg::Epr => AncillaKind::Epr,
        })
    }

    fn params(&self, cfg: &Config) -> Result<ParamSet, CliError> {
        let d = ParamSet::default();
        let mut p = d;
        for (flag, key, param) in [
            (self.va, "va", Param::VA),
            (self.vb, "vb", Param::VB),
            (self.r, "r", Param::R),
            (self.g, "g", Param::G),
            (self.eta, "eta", Param::Eta),
        ] {
            p.set(param, cfg.resolve(flag, key, d.get(param))?);
        }
        Ok(p)
    }

    fn scenario(&self, cfg: &Config) -> Result<TransferScenario, CliError> {
        let p = self.params(cfg)?;
        let ancilla = match self.ancilla_kind(cfg)? {
            AncillaKind::Discordant => Ancilla::Discordant { v_b: p.get(Param::VB) },
            AncillaKind::Epr => Ancilla::Epr { r: p.get(Param::R) },
        };
        let eta = p.get(Param::Eta);
        let eff = Efficiencies {
            eta_a: cfg.resolve(self.eta_a, "eta_a", eta)?,
            eta_e: cfg.resolve(self.eta_e, "eta_e", eta)?,
            eta_f: cfg.resolve(self.eta_f, "eta_f", eta)?,
            eta_d: cfg.resolve(self.eta_d, "eta_d", eta)?,
        };
        let s = TransferScenario::lossless(p.get(Param::VA), ancilla, p.get(Param::G)).with_efficiencies(eff);
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "state")]
struct StateSelect {
    /// Symmetric discordant state with noise V.
    #[arg(long, value_name = "V")]
    symmetric_v: Option<f64>,
    /// Asymmetric discordant state with noise V (attenuation from --t).
    #[arg(long, value_name = "V")]
    asymmetric_v: Option<f64>,
    /// Two-mode squeezed vacuum with squeezing r.
    #[arg(long, value_name = "R")]
    epr_r: Option<f64>,
    /// Symmetric state V with both modes attenuated by --t1, --t2.
    #[arg(long, value_name = "V")]
    attenuated_v: Option<f64>,
    /// 4x4 covariance file.
    #[arg(long, value_name = "PATH")]
    cov: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiscordArgs {
    #[command(flatten)]
    state: StateSelect,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    t1: f64,
    #[arg(long, default_value_t = 1.0)]
    t2: f64,
}

#[derive(Args, Debug)]
struct TransferArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Use the multimode covariance engine instead of the closed form.
    #[arg(long)]
    engine: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Symmetric,
    Asymmetric,
    Attenuated,
    Discordant,
    Epr,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Symmetric => Model::Symmetric,
            ModelArg::Asymmetric => Model::Asymmetric,
            ModelArg::Attenuated => Model::Attenuated,
            ModelArg::Discordant => Model::Transfer(AncillaKind::Discordant),
            ModelArg::Epr => Model::Transfer(AncillaKind::Epr),
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// State factory or protocol (discordant/epr select the ancilla).
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Swept parameter as name=lo:hi:n; give once or twice.
    #[arg(long = "axis", required = true, value_parser = parse_axis)]
    axes: Vec<Axis>,
    /// Fixed parameter as name=value.
    #[arg(long = "set", value_parser = parse_assignment)]
    sets: Vec<(Param, f64)>,
    /// Comma-separated output columns (default: all).
    #[arg(long, value_delimiter = ',', value_parser = parse_output)]
    outputs: Vec<Output>,
    /// Re-optimize g at every grid point.
    #[arg(long)]
    optimize_gain: bool,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(value_parser = parse_figure)]
    name: Figure,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Optimize the asymmetric discordant state with noise V instead of a
    /// protocol scenario.
    #[arg(long, value_name = "V")]
    asymmetric_v: Option<f64>,
    /// One or two of g, r, vb, t.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_param)]
    over: Vec<Param>,
    #[arg(long)]
    tol: Option<f64>,
    /// Coarse grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Perturb the gain seen by the sampler only (negative control).
    #[arg(long, default_value_t = 0.0, value_name = "DELTA")]
    corrupt_gain: f64,
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse().map_err(|e: gdtransfer::Error| e.to_string())
}

fn parse_param(s: &str) -> Result<Param, String> {
    s.parse().map_err(|e: gdtransfer::Error| e.to_string())
}

fn parse_output(s: &str) -> Result<Output, String> {
    s.parse().map_err(|e: gdtransfer::Error| e.to_string())
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse().map_err(|e: gdtransfer::Error| e.to_string())
}

fn parse_assignment(s: &str) -> Result<(Param, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    let v = v.trim().parse().map_err(|_| format!("bad value '{v}'"))?;
    Ok((parse_param(k)?, v))
}

struct Ctx {
    cfg: Config,
    out: Option<PathBuf>,
    plot: bool,
}

fn emit(lines: &[(&str, String)]) {
    let stdout = std::io::stdout();
    let mut h = stdout.lock();
    for (k, v) in lines {
        let _ = writeln!(h, "{k} = {v}");
    }
}

fn cmd_discord(args: &DiscordArgs) -> Result<(), CliError> {
    let s = &args.state;
    let sigma = if let Some(v) = s.symmetric_v {
        make_symmetric_discordant(v)?
    } else if let Some(v) = s.asymmetric_v {
        make_asymmetric_discordant(v, args.t)?
    } else if let Some(r) = s.epr_r {
        make_epr(r)?
    } else if let Some(v) = s.attenuated_v {
        attenuate_both_modes(&make_symmetric_discordant(v)?, args.t1, args.t2)?
    } else if let Some(path) = &s.cov {
        io::read_covariance(path)?
    } else {
        unreachable!("clap enforces one state selector")
    };
    report_discord(&sigma)
}

fn report_discord(sigma: &TwoModeCovariance) -> Result<(), CliError> {
    let d = gaussian_discord(sigma)?;
    let inv = d.invariants;
    emit(&[
        ("discord", format_sig(d.discord)),
        ("mutual_information", format_sig(d.mutual_information)),
        ("classical_correlation", format_sig(d.classical_correlation)),
        ("nu_minus", format_sig(d.nu_minus)),
        ("nu_plus", format_sig(d.nu_plus)),
        ("e_min", format_sig(d.e_min)),
        ("branch", d.branch.to_string()),
        ("i1", format_sig(inv.i1)),
        ("i2", format_sig(inv.i2)),
        ("i3", format_sig(inv.i3)),
        ("i4", format_sig(inv.i4)),
        ("ppt_witness", format_sig(ppt_min_eigenvalue(sigma)?)),
    ]);
    Ok(())
}

fn cmd_transfer(ctx: &Ctx, args: &TransferArgs) -> Result<(), CliError> {
    let sc = args.scenario.scenario(&ctx.cfg)?;
    let input = gaussian_discord(&make_symmetric_discordant(sc.v_a)?)?;
    let engine = transfer_via_engine(&sc)?;
    let (out, method) = if args.engine || !sc.efficiencies.is_perfect() {
        (engine, "engine")
    } else {
        (transfer_closed_form(&sc)?, "closed_form")
    };
    let d = gaussian_discord(&out)?;
    let mut lines = vec![
        ("method", method.to_string()),
        ("input_discord", format_sig(input.discord)),
        ("output_discord", format_sig(d.discord)),
        ("output_nu_minus", format_sig(d.nu_minus)),
        ("ppt_witness", format_sig(ppt_min_eigenvalue(&out)?)),
    ];
    if sc.efficiencies.is_perfect() {
        let diff = engine.max_abs_diff(&transfer_closed_form(&sc)?);
        lines.push(("cross_check_max_abs_diff", format_sig(diff)));
        lines.push(("cross_check", if diff <= 1e-10 { "ok" } else { "MISMATCH" }.to_string()));
    }
    emit(&lines);
    print!("output_covariance =\n{}", io::format_covariance(&out));
    if let Some(path) = &ctx.out {
        io::write_covariance(&out, path)?;
    }
    Ok(())
}

fn cmd_sweep(ctx: &Ctx, args: &SweepArgs) -> Result<(), CliError> {
    let model = Model::from(args.model);
    let mut base = ParamSet::default();
    for (key, p) in [("va", Param::VA), ("vb", Param::VB), ("r", Param::R), ("g", Param::G), ("eta", Param::Eta)] {
        if let Some(v) = ctx.cfg.get::<f64>(key)? {
            base.set(p, v);
        }
    }
    for &(p, v) in &args.sets {
        base.set(p, v);
    }
    let mut spec = SweepSpec::new(model, base, args.axes.clone());
    if !args.outputs.is_empty() {
        spec.outputs = args.outputs.clone();
    }
    if args.optimize_gain {
        spec = spec.with_optimized_gain(GAIN_RANGE);
    }
    let table = run_sweep(&spec, Execution::default())?;
    match &ctx.out {
        Some(path) => {
            io::write_table_file(&table, path)?;
            if ctx.plot {
                io::write_text(&path.with_extension("svg"), &render(&path.display().to_string(), &spec, &[("sweep".into(), &table)]))?;
            }
        }
        None => io::write_table(&table, std::io::stdout().lock())?,
    }
    Ok(())
}

fn render(title: &str, spec: &SweepSpec, tables: &[(String, &SweepTable)]) -> String {
    let y_label = spec.outputs[0].name();
    let col = |t: &SweepTable, k: usize| t.rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let z_index = |t: &SweepTable| t.columns.iter().position(|c| c == y_label).unwrap();
    if spec.axes.len() == 1 {
        let series: Vec<(String, Vec<(f64, f64)>)> = tables
            .iter()
            .map(|(label, t)| {
                let xs = col(t, 0);
                let ys = col(t, z_index(t));
                (label.clone(), xs.into_iter().zip(ys).collect())
            })
            .collect();
        plot::line_plot(title, spec.axes[0].param.name(), y_label, &series)
    } else {
        let t = tables[0].1;
        let k = z_index(t);
        let pts: Vec<(f64, f64, f64)> = t.rows.iter().map(|r| (r[0], r[1], r[k])).collect();
        plot::heatmap(
            &format!("{title}: {y_label}"),
            spec.axes[0].param.name(),
            spec.axes[1].param.name(),
            &pts,
        )
    }
}

fn cmd_figure(ctx: &Ctx, args: &FigureArgs) -> Result<(), CliError> {
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
    io::ensure_dir(&dir)?;
    let curves = args.name.curves()?;
    let mut tables = Vec::with_capacity(curves.len());
    for c in &curves {
        let table = run_sweep(&c.spec, Execution::default())?;
        let path = dir.join(format!("{}.csv", c.stem));
        io::write_table_file(&table, &path)?;
        println!("{}", path.display());
        tables.push(table);
    }
    if ctx.plot {
        let fig = args.name.name();
        let labelled: Vec<(String, &SweepTable)> = curves
            .iter()
            .zip(&tables)
            .map(|(c, t)| (c.stem.trim_start_matches(fig).trim_start_matches('_').to_string(), t))
            .collect();
        let path = dir.join(format!("{fig}.svg"));
        io::write_text(&path, &render(fig, &curves[0].spec, &labelled))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn search_range(p: Param) -> Result<(f64, f64), CliError> {
    Ok(match p {
        Param::G => GAIN_RANGE,
        Param::R => SQUEEZE_RANGE,
        Param::VB => ANCILLA_NOISE_RANGE,
        Param::T => ATTENUATION_RANGE,
        other => return Err(CliError::Usage(format!("cannot optimize over {other}; choose from g, r, vb, t"))),
    })
}

fn cmd_optimize(ctx: &Ctx, args: &OptimizeArgs) -> Result<(), CliError> {
    if args.over.len() > 2 {
        return Err(CliError::Usage("at most two optimization targets".into()));
    }
    if args.over.len() == 2 && args.over[0] == args.over[1] {
        return Err(CliError::Usage("optimization targets must differ".into()));
    }
    let (model, base) = match args.asymmetric_v {
        Some(v) => (Model::Asymmetric, ParamSet::default().with(Param::VA, v)),
        None => {
            let sc = args.scenario.scenario(&ctx.cfg)?;
            if !sc.efficiencies.is_perfect() && sc.efficiencies != Efficiencies::uniform(sc.efficiencies.eta_a) {
                return Err(CliError::Usage("optimize supports a common --eta only".into()));
            }
            let kind = args.scenario.ancilla_kind(&ctx.cfg)?;
            let p = args.scenario.params(&ctx.cfg)?.with(Param::Eta, sc.efficiencies.eta_a);
            (Model::Transfer(kind), p)
        }
    };
    for &p in &args.over {
        if !model.params().contains(&p) || p == Param::VA || p == Param::Eta {
            return Err(CliError::Usage(format!("{p} is not a free parameter of this scenario")));
        }
    }
    let ranges: Vec<(f64, f64)> = args.over.iter().map(|&p| search_range(p)).collect::<Result<_, _>>()?;
    let tol = ctx.cfg.resolve(args.tol, "tol", DEFAULT_TOL)?;
    let default_grid = if args.over.len() == 1 { MIN_GRID_1D } else { MIN_GRID_2D };
    let opts = SearchOptions {
        grid_points: ctx.cfg.resolve(args.grid, "grid", default_grid)?,
        ..SearchOptions::with_tol(tol)
    };
    let eval = |values: &[f64]| -> gdtransfer::Result<f64> {
        let mut p = base;
        for (&param, &v) in args.over.iter().zip(values) {
            p.set(param, v);
        }
        Ok(evaluate_point(model, &p)?.discord)
    };
    let best = if args.over.len() == 1 {
        maximize_scalar_with(|x| eval(&[x]), ranges[0].0, ranges[0].1, &opts)?
    } else {
        maximize_2d_with(|x, y| eval(&[x, y]), ranges[0], ranges[1], &opts)?
    };
    let mut lines: Vec<(&str, String)> = args
        .over
        .iter()
        .zip(&best.location)
        .map(|(p, &v)| (p.name(), format_sig(v)))
        .collect();
    lines.push(("discord", format_sig(best.value)));
    lines.push(("evaluations", best.evaluations.to_string()));
    lines.push(("converged", best.converged.to_string()));
    emit(&lines);
    Ok(())
}

fn cmd_validate(ctx: &Ctx, args: &ValidateArgs) -> Result<(), CliError> {
    let sc = args.scenario.scenario(&ctx.cfg)?;
    let n = ctx.cfg.resolve(args.samples, "samples", 1_000_000)?;
    if n < MIN_SAMPLES {
        return Err(CliError::Usage(format!("--samples must be at least {MIN_SAMPLES}")));
    }
    let seed = ctx.cfg.resolve(args.seed, "seed", 42)?;
    let report = validate_against_engine(&sc, n, seed, args.corrupt_gain, Execution::default())?;
    emit(&[
        ("samples", n.to_string()),
        ("seed", seed.to_string()),
        ("corrupt_gain", format_sig(args.corrupt_gain)),
        ("max_deviation_se", format_sig(report.max_deviation_se)),
        ("threshold_se", format_sig(ACCEPT_SIGMAS)),
        ("result", if report.passed { "PASS" } else { "FAIL" }.to_string()),
    ]);
    print!("sampled_covariance =\n{}", io::format_covariance(&report.sampled.estimate));
    print!("reference_covariance =\n{}", io::format_covariance(&report.reference));
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "max deviation {} SE exceeds {ACCEPT_SIGMAS}",
            format_sig(report.max_deviation_se)
        )))
    }
}

fn configure_threads(n: Option<usize>) -> Result<(), CliError> {
    let Some(n) = n else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    if n > 1 {
        eprintln!("note: built without the parallel feature; running on one thread");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    configure_threads(match cli.threads {
        Some(n) => Some(n),
        None => cfg.get("threads")?,
    })?;
    let out = match cli.out {
        Some(p) => Some(p),
        None => cfg.get::<String>("out")?.map(PathBuf::from),
    };
    let plot = cli.plot || cfg.get::<bool>("plot")?.unwrap_or(false);
    let ctx = Ctx { cfg, out, plot };
    match &cli.command {
        Command::Discord(a) => cmd_discord(a),
        Command::Transfer(a) => cmd_transfer(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Figure(a) => cmd_figure(&ctx, a),
        Command::Optimize(a) => cmd_optimize(&ctx, a),
        Command::Validate(a) => cmd_validate(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
