mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use spoqc::circuit::{build_memory_experiment, validate_circuit, Basis};
use spoqc::code::build_rotated_surface_code;
use spoqc::experiments::{
    curves_csv, ft_line, ft_surface, hrus_tradeoff, loss_intercept, threshold_scan, Border, ExperimentError,
    FtSurface, TradeoffCurve,
};
use spoqc::frame::{sample_batch, write_dump};
use spoqc::noise::{hrus_rates, hrus_trial_rates, NoiseError, Trials};
use spoqc::optics::oracle_report;

use config::RunConfig;

const VERSION: &str = env!("SPOQC_GIT_DESCRIBE");

#[derive(Parser, Debug)]
#[command(name = "spoqc", version = VERSION, about = "Fault-tolerance simulations of spin-optical surface codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Build, validate and serialise rotated-surface-code Tanner graphs.
    Code,
    /// Check the photon-level gate model against the gate table, tableau and distinguishability channel.
    VerifyOptics,
    /// Per-trial and whole-gate outcome probabilities.
    Rates,
    /// Logical error curves along one noise axis and their crossings.
    Threshold,
    /// Boundary of the correctable region on the plane through the axis thresholds.
    FtSurface,
    /// Tolerable trial time against photon loss for RUS gates.
    Tradeoff,
    /// The same trade-off for hybrid gates with several photons per trial.
    HrusTradeoff,
    /// Binary dump of raw detector, observable and herald bits.
    Sample,
}

/// Every flag overrides the matching config entry.
#[derive(Args, Debug, Default)]
struct Flags {
    /// TOML, or JSON such as the summary of an earlier run.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads; defaults to SPOQC_WORKERS, then all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    distances: Option<Vec<usize>>,
    #[arg(long, global = true)]
    rounds: Option<usize>,
    #[arg(long, global = true)]
    basis: Option<Basis>,
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    bootstrap: Option<usize>,
    #[arg(long = "p-fail", global = true)]
    p_fail: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Photon transmission, `1 − epsilon`.
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    k: Option<u32>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long = "distinguishability", short = 'D', global = true)]
    distinguishability: Option<f64>,
    /// Gate duration over T2.
    #[arg(long = "t-rus", global = true)]
    t_rus: Option<f64>,
    /// Trial duration over T2, multiplied by `k`.
    #[arg(long = "t-trial", global = true)]
    t_trial: Option<f64>,
    /// p_F, t, D, loss or w.
    #[arg(long, global = true)]
    axis: Option<String>,
    #[arg(long, global = true)]
    min: Option<f64>,
    #[arg(long, global = true)]
    max: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Trial budget of the loss axis.
    #[arg(long, global = true)]
    trials: Option<u32>,
    /// Direction `p_F,t,D` scaled by the w axis.
    #[arg(long, global = true, value_delimiter = ',')]
    point: Option<Vec<f64>>,
    /// Single-axis thresholds `p_F,t,D` spanning the plane.
    #[arg(long, global = true, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
    #[arg(long = "n-p", global = true)]
    n_p: Option<usize>,
    #[arg(long = "w-min", global = true)]
    w_min: Option<f64>,
    #[arg(long = "w-max", global = true)]
    w_max: Option<f64>,
    #[arg(long = "w-points", global = true)]
    w_points: Option<usize>,
    /// Scan this many points of the D = 0 edge only.
    #[arg(long, global = true)]
    line: Option<usize>,
    /// Trial budgets of the trade-off.
    #[arg(long, global = true, value_delimiter = ',')]
    ks: Option<Vec<u32>>,
    /// Photons per trial of the hybrid trade-off.
    #[arg(long, global = true, value_delimiter = ',')]
    ns: Option<Vec<u32>>,
    #[arg(long = "loss-min", global = true)]
    loss_min: Option<f64>,
    #[arg(long = "loss-max", global = true)]
    loss_max: Option<f64>,
    #[arg(long = "loss-points", global = true)]
    loss_points: Option<usize>,
    /// JSON summary of an `ft-surface` run.
    #[arg(long, global = true, value_name = "FILE")]
    border: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    csv: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    dump: Option<PathBuf>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn set_opt<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

fn triple(v: Option<Vec<f64>>) -> Result<Option<[f64; 3]>> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[a, b, c]) => Ok(Some([a, b, c])),
        Some(_) => bail!("expected three comma-separated values"),
    }
}

impl Flags {
    fn apply(self, cfg: &mut RunConfig) -> Result<()> {
        set(&mut cfg.code.distances, self.distances);
        set_opt(&mut cfg.code.rounds, self.rounds);
        set(&mut cfg.code.basis, self.basis);
        set(&mut cfg.run.shots, self.shots);
        set(&mut cfg.run.seed, self.seed);
        set(&mut cfg.run.bootstrap, self.bootstrap);
        set_opt(&mut cfg.run.workers, self.workers);
        if self.p_fail.is_some() {
            cfg.noise.p_fail = self.p_fail;
            cfg.noise.epsilon = None;
        }
        if let Some(eps) = self.epsilon.or(self.eta.map(|e| 1.0 - e)) {
            cfg.noise.epsilon = Some(eps);
            cfg.noise.p_fail = None;
        }
        set_opt(&mut cfg.noise.k, self.k);
        set(&mut cfg.noise.n, self.n);
        set(&mut cfg.noise.distinguishability, self.distinguishability);
        if self.t_rus.is_some() {
            cfg.noise.t_rus_over_t2 = self.t_rus;
            cfg.noise.t_trial_over_t2 = None;
        }
        if self.t_trial.is_some() {
            cfg.noise.t_trial_over_t2 = self.t_trial;
            cfg.noise.t_rus_over_t2 = None;
        }
        set(&mut cfg.sweep.axis, self.axis);
        set_opt(&mut cfg.sweep.min, self.min);
        set_opt(&mut cfg.sweep.max, self.max);
        set(&mut cfg.sweep.points, self.points);
        set(&mut cfg.sweep.trials, self.trials);
        set_opt(&mut cfg.sweep.point, triple(self.point)?);
        set_opt(&mut cfg.surface.thresholds, triple(self.thresholds)?);
        set(&mut cfg.surface.n_p, self.n_p);
        set(&mut cfg.surface.w_min, self.w_min);
        set(&mut cfg.surface.w_max, self.w_max);
        set(&mut cfg.surface.w_points, self.w_points);
        set_opt(&mut cfg.surface.line, self.line);
        set(&mut cfg.tradeoff.k, self.ks);
        set(&mut cfg.tradeoff.n, self.ns);
        set(&mut cfg.tradeoff.loss_min, self.loss_min);
        set(&mut cfg.tradeoff.loss_max, self.loss_max);
        set(&mut cfg.tradeoff.loss_points, self.loss_points);
        set_opt(&mut cfg.tradeoff.border, self.border);
        set_opt(&mut cfg.output.csv, self.csv);
        set_opt(&mut cfg.output.json, self.json);
        set_opt(&mut cfg.output.dump, self.dump);
        Ok(())
    }
}

/// Exit 1: the request is invalid. Exit 2: it failed while running.
enum Failure {
    Invalid(anyhow::Error),
    Runtime(anyhow::Error),
}

fn classify(e: anyhow::Error) -> Failure {
    let invalid = e.downcast_ref::<ExperimentError>().is_some_and(|x| matches!(x, ExperimentError::Invalid(_) | ExperimentError::Noise(_)))
        || e.downcast_ref::<NoiseError>().is_some();
    if invalid {
        Failure::Invalid(e)
    } else {
        Failure::Runtime(e)
    }
}

/// Marks a config-resolution error as a validation failure.
fn invalid<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| ExperimentError::Invalid(format!("{e:#}")).into())
}

fn write_text(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// JSON summary echoing the resolved config.
fn write_summary(cfg: &RunConfig, command: &str, result: impl Serialize) -> Result<()> {
    let Some(path) = &cfg.output.json else { return Ok(()) };
    let doc = json!({
        "command": command,
        "version": VERSION,
        "seed": cfg.run.seed,
        "config": cfg,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_code(cfg: &RunConfig) -> Result<bool> {
    let mut graphs = Vec::new();
    let mut ok = true;
    for &d in &cfg.code.distances {
        let code = invalid(build_rotated_surface_code(d).map_err(Into::into))?;
        let report = code.graph.validate_ldpc(4);
        let p = code.params;
        println!(
            "d = {d}: [[{}, {}, {}]], {} checks, {} edges, max degree {}, {}",
            p.n,
            p.k,
            p.d,
            code.graph.checks().len(),
            code.graph.edges().len(),
            report.max_degree,
            if report.passed() { "valid" } else { "INVALID" }
        );
        ok &= report.passed();
        graphs.push(json!({ "distance": d, "params": p, "tanner": code.graph.to_json(), "logicals": code.logicals }));
    }
    write_summary(cfg, "code", graphs)?;
    Ok(ok)
}

fn cmd_verify_optics(cfg: &RunConfig) -> Result<bool> {
    let r = oracle_report()?;
    println!("{r}");
    let dev = r.max_deviation();
    write_summary(cfg, "verify-optics", json!({ "max_deviation": dev }))?;
    Ok(dev < 1e-8)
}

fn cmd_rates(cfg: &RunConfig) -> Result<bool> {
    let eps = cfg.noise.epsilon.unwrap_or(0.0);
    let eta = 1.0 - eps;
    let Some(k) = cfg.noise.k else { bail!(ExperimentError::Invalid("rates needs --k".into())) };
    let n = cfg.noise.n;
    let trial = hrus_trial_rates(eta, eta, n)?;
    let gate = hrus_rates(eta, eta, Trials::Bounded(k), n)?;
    let limit = hrus_rates(eta, eta, Trials::Unbounded, n)?;
    println!("eta = {eta}, k = {k}, n = {n}");
    println!("trial: success {} repeat {} failure {}", trial.success, trial.repeat, trial.failure);
    println!("gate: success {} failure {} abort {}", gate.success, gate.failure, gate.abort);
    println!("failure+abort {}", gate.not_success());
    println!("k -> inf: success {} failure {}", limit.success, limit.failure);
    println!("\nsuccess probability by k (rows) and n (columns)");
    let ns: Vec<u32> = (1..=n.max(3)).collect();
    println!("{:>4} {}", "k", ns.iter().map(|n| format!("{:>12}", format!("n={n}"))).collect::<String>());
    let mut table = Vec::new();
    for kk in 1..=k.max(6) {
        let row = ns.iter().map(|&nn| hrus_rates(eta, eta, Trials::Bounded(kk), nn).map(|r| r.success)).collect::<Result<Vec<_>, _>>()?;
        println!("{kk:>4} {}", row.iter().map(|p| format!("{p:>12.6}")).collect::<String>());
        table.push(row);
    }
    write_summary(cfg, "rates", json!({ "trial": trial, "gate": gate, "unbounded": limit, "success_table": table }))?;
    Ok(true)
}

fn cmd_threshold(cfg: &RunConfig) -> Result<bool> {
    let spec = invalid(cfg.sweep_spec())?;
    let scan = threshold_scan(&spec)?;
    write_text(&cfg.output.csv, &curves_csv(&scan.curves))?;
    for p in &scan.crossings.pairs {
        match &p.estimate {
            Some(e) => eprintln!("d = {} vs {}: crossing {:.5} ci {:?}", p.distances[0], p.distances[1], e.crossing, e.ci),
            None => eprintln!("d = {} vs {}: no crossing in range", p.distances[0], p.distances[1]),
        }
    }
    match &scan.crossings.pooled {
        Some(e) => eprintln!("pooled {} threshold {:.5} ci {:?}", spec.axis.name(), e.crossing, e.ci),
        None => eprintln!("pooled: no crossing in range"),
    }
    write_summary(cfg, "threshold", json!({ "spec": spec, "crossings": scan.crossings, "curves": scan.curves }))?;
    Ok(true)
}

fn cmd_ft_surface(cfg: &RunConfig) -> Result<bool> {
    let spec = invalid(cfg.surface_spec())?;
    let surface = match cfg.surface.line {
        Some(n) => ft_line(&spec, n)?,
        None => ft_surface(&spec)?,
    };
    write_text(&cfg.output.csv, &surface.to_csv())?;
    let flagged = surface.points.iter().filter(|p| !p.bracketed).count();
    eprintln!("{} points, {flagged} not bracketed", surface.points.len());
    write_summary(cfg, "ft-surface", &surface)?;
    Ok(true)
}

fn border(cfg: &RunConfig) -> Result<Border> {
    if let Some(path) = &cfg.tradeoff.border {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let surface: FtSurface = serde_json::from_value(value.get("result").cloned().unwrap_or(value))?;
        return Ok(surface.border()?);
    }
    match &cfg.tradeoff.border_knots {
        Some(k) => Ok(Border::new(k.iter().map(|x| (x[0], x[1])).collect())?),
        None => bail!(ExperimentError::Invalid("tradeoff needs --border or tradeoff.border_knots".into())),
    }
}

fn tradeoff_csv(curves: &[TradeoffCurve]) -> String {
    let mut out = String::from("photons,trials,loss,p_F,t_trial_max\n");
    for c in curves {
        for s in &c.series {
            for p in &s.points {
                out.push_str(&format!("{},{},{},{},{}\n", c.photons, s.trials, p.loss, p.p_fail, p.t_trial_max));
            }
        }
        for e in &c.envelope {
            out.push_str(&format!("{},envelope,{},,{}\n", c.photons, e.loss, e.t_trial_max));
        }
    }
    out
}

fn cmd_tradeoff(cfg: &RunConfig, hybrid: bool) -> Result<bool> {
    let b = invalid(border(cfg))?;
    let losses = invalid(cfg.losses())?;
    let ns = if hybrid { cfg.tradeoff.n.clone() } else { vec![1] };
    let curves = hrus_tradeoff(&ns, &cfg.tradeoff.k, &losses, &b)?;
    write_text(&cfg.output.csv, &tradeoff_csv(&curves))?;
    let mut intercepts = Vec::new();
    for c in &curves {
        let eps = loss_intercept(c.photons, &cfg.tradeoff.k, &b)?;
        let t0 = spoqc::experiments::envelope_at(c.photons, &cfg.tradeoff.k, 0.0, &b)?;
        eprintln!("n = {}: loss intercept {eps:.5}, t_trial intercept {t0:.5}", c.photons);
        intercepts.push(json!({ "photons": c.photons, "loss_intercept": eps, "t_trial_intercept": t0 }));
    }
    let name = if hybrid { "hrus-tradeoff" } else { "tradeoff" };
    write_summary(cfg, name, json!({ "border": b, "intercepts": intercepts, "curves": curves }))?;
    Ok(true)
}

fn cmd_sample(cfg: &RunConfig) -> Result<bool> {
    let Some(path) = &cfg.output.dump else { bail!(ExperimentError::Invalid("sample needs --dump FILE".into())) };
    let d = *cfg.code.distances.first().context("no distance given")?;
    let noise = invalid(cfg.noise_params())?;
    let c = build_memory_experiment(d, cfg.code.basis, cfg.code.rounds.unwrap_or(d), &noise)?;
    let report = validate_circuit(&c);
    if !report.passed() {
        bail!(ExperimentError::Invalid(format!("circuit failed validation: {report:?}")));
    }
    let shots = sample_batch(&c, cfg.run.shots as usize, cfg.run.seed);
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_dump(&mut out, c.detector_count(), c.herald_count(), &shots)?;
    out.flush()?;
    eprintln!("{} shots, {} detectors, {} heralds", shots.len(), c.detector_count(), c.herald_count());
    write_summary(
        cfg,
        "sample",
        json!({ "detectors": c.detector_count(), "heralds": c.herald_count(), "shots": shots.len(), "noise": noise }),
    )?;
    Ok(true)
}

fn workers(cfg: &RunConfig) -> Result<usize> {
    if let Some(w) = cfg.run.workers {
        return Ok(w);
    }
    match std::env::var("SPOQC_WORKERS") {
        Ok(v) => v.parse().with_context(|| format!("SPOQC_WORKERS = {v:?} is not a count")),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let mut cfg = match &cli.flags.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Invalid)?,
        None => RunConfig::default(),
    };
    cli.flags.apply(&mut cfg).map_err(Failure::Invalid)?;
    cfg.check_outputs().map_err(Failure::Invalid)?;
    let threads = workers(&cfg).map_err(Failure::Invalid)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Failure::Runtime(e.into()))?;
    pool.install(|| match cli.command {
        Command::Code => cmd_code(&cfg),
        Command::VerifyOptics => cmd_verify_optics(&cfg),
        Command::Rates => cmd_rates(&cfg),
        Command::Threshold => cmd_threshold(&cfg),
        Command::FtSurface => cmd_ft_surface(&cfg),
        Command::Tradeoff => cmd_tradeoff(&cfg, false),
        Command::HrusTradeoff => cmd_tradeoff(&cfg, true),
        Command::Sample => cmd_sample(&cfg),
    })
    .map_err(classify)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
