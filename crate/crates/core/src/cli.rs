//! The `turing-unilateral` command line.
//!
//! Exit codes: `0` success, `2` configuration error, `3` numerical
//! non-convergence.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::eigenbasis::SpectralBasis;
use crate::error::{Error, Result};
use crate::geometry::{
    classify_point, envelope_d1max, spectrum_s, DiffusionPoint, RegionLabel, ENVELOPE_RTOL,
};
use crate::simulator::{run_experiment, write_trace};
use crate::sweep::{emit_curves, emit_svg, find_c1_c2_intersection, sweep_curves};
use crate::unilateral::{check_sign_condition_group, maximize_rayleigh, tau_bound};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "turing-unilateral",
    version,
    about = "Critical curves of reaction-diffusion systems with unilateral sources and sinks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// JSON configuration file; defaults describe the reference problem.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config leaf by dotted path, e.g. `profile.s_plus=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Output directory for files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random starts and noise.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write an SVG plot (sweep).
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a diffusion point and compare classical and unilateral maxima.
    Analyze {
        #[arg(long)]
        d1: Option<f64>,
        #[arg(long)]
        d2: Option<f64>,
    },
    /// Sweep d2 over the configured window and write the critical curves.
    Sweep,
    /// Integrate the evolution system from a small perturbation.
    Simulate,
    /// Laplace spectrum, hyperbola values and eigenvalues of S_{d2}.
    Spectrum {
        #[arg(long)]
        d2: Option<f64>,
    },
    /// Sign condition over a multiplicity group (default: the envelope argmax).
    CheckCondition {
        #[arg(long)]
        d2: Option<f64>,
        /// Mode whose eigenspace is tested.
        #[arg(long)]
        mode: Option<usize>,
    },
}

enum Failure {
    Config(Error),
    NonConvergence(String),
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Config(e.into())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalBlowUp { .. } => Failure::NonConvergence(e.to_string()),
            e => Failure::Config(e),
        }
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// the human-readable report to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(e)) => {
            let _ = writeln!(out, "error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::NonConvergence(msg)) => {
            let _ = writeln!(out, "not converged: {msg}");
            EXIT_NONCONVERGENCE
        }
    }
}

fn load(g: &GlobalArgs) -> Result<(RunConfig, Value)> {
    let mut sets = g.set.clone();
    if let Some(seed) = g.seed {
        sets.push(format!("seed={seed}"));
    }
    RunConfig::load(g.config.as_deref(), &sets)
}

fn out_dir(g: &GlobalArgs, cfg: &RunConfig) -> Result<PathBuf> {
    let dir = g
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let (cfg, echo) = load(&cli.global)?;
    let basis = cfg.basis()?;
    let w = |out: &mut dyn Write, s: String| -> Result<()> {
        writeln!(out, "{s}")?;
        Ok(())
    };
    match &cli.command {
        Command::Analyze { d1, d2 } => {
            let point = match (d1, d2, cfg.point) {
                (Some(a), Some(b), _) => DiffusionPoint::new(*a, *b)?,
                (a, b, Some(p)) => DiffusionPoint::new(a.unwrap_or(p.d1), b.unwrap_or(p.d2))?,
                (Some(a), None, None) => DiffusionPoint::new(*a, cfg.d2)?,
                _ => {
                    return Err(Failure::Config(Error::Config(
                        "analyze needs a point: --d1 (and optionally --d2) or `point` in the config".into(),
                    )))
                }
            };
            analyze(point, &cfg, &echo, &basis, cli.global.out.is_some().then(|| out_dir(&cli.global, &cfg)).transpose()?, out)
        }
        Command::Sweep => {
            let profile = cfg.source_sink(&basis)?;
            let result = sweep_curves(&cfg.window, &cfg.matrix, &basis, &profile, &cfg.sweep_options())?;
            let dir = out_dir(&cli.global, &cfg)?;
            let csv_path = dir.join("curves.csv");
            emit_curves(&result.samples, &csv_path)?;
            w(out, format!("wrote {}", csv_path.display()))?;
            if cli.global.svg || cfg.output.svg {
                let svg_path = dir.join("curves.svg");
                emit_svg(&result.samples, &svg_path)?;
                w(out, format!("wrote {}", svg_path.display()))?;
            }
            let d2i = find_c1_c2_intersection(&cfg.matrix, &basis).ok().flatten();
            let unconverged: Vec<f64> = result
                .samples
                .iter()
                .filter(|s| s.d1_max_beta.is_some() && !s.converged)
                .map(|s| s.d2)
                .collect();
            write_json(
                &dir.join("sweep.json"),
                &json!({
                    "config": echo,
                    "eps_est": result.eps_est,
                    "d2_intersection": d2i,
                    "samples": result.samples,
                }),
            )?;
            w(out, format!("samples: {}", result.samples.len()))?;
            w(out, format!("eps_est: {}", opt(result.eps_est)))?;
            w(out, format!("d2_intersection: {}", opt(d2i)))?;
            if !unconverged.is_empty() {
                return Err(Failure::NonConvergence(format!(
                    "maximizer did not converge at d2 = {unconverged:?}"
                )));
            }
            Ok(())
        }
        Command::Simulate => {
            let profile = cfg.source_sink(&basis)?;
            let kinetics = cfg.kinetics()?;
            let (report, trace) = run_experiment(&cfg.simulation, &basis, &kinetics, &profile)?;
            let dir = out_dir(&cli.global, &cfg)?;
            write_trace(&trace, &dir.join("trace.csv"))?;
            let mut doc = serde_json::to_value(&report)?;
            doc["config"] = echo;
            write_json(&dir.join("report.json"), &doc)?;
            w(out, format!("classification: {}", serde_json::to_value(report.classification)?.as_str().unwrap_or("?")))?;
            w(out, format!("fitted_rate: {}", opt(report.fitted_rate)))?;
            w(out, format!("oracle_rate: {}", report.oracle_rate))?;
            w(out, format!("wrote {}", dir.join("report.json").display()))?;
            Ok(())
        }
        Command::Spectrum { d2 } => {
            let d2 = d2.unwrap_or(cfg.d2);
            let entries = spectrum_s(d2, &cfg.matrix, &basis)?;
            w(out, "j,kappa,d1_eigenvalue,lambda".into())?;
            for e in &entries {
                w(out, format!("{},{},{},{}", e.index, e.kappa, opt(e.d1_eigenvalue), e.lambda_operator))?;
            }
            if let Some(dir) = cli.global.out.is_some().then(|| out_dir(&cli.global, &cfg)).transpose()? {
                write_json(&dir.join("spectrum.json"), &json!({"config": echo, "d2": d2, "spectrum": entries}))?;
            }
            Ok(())
        }
        Command::CheckCondition { d2, mode } => {
            let d2 = d2.unwrap_or(cfg.d2);
            let profile = cfg.source_sink(&basis)?;
            let group = match mode {
                Some(j) => basis.group_of(*j)?,
                None => {
                    let env = envelope_d1max(d2, &cfg.matrix, &basis)?;
                    let mut g = Vec::new();
                    for j in env.argmax {
                        g.extend(basis.group_of(j)?);
                    }
                    g.sort_unstable();
                    g.dedup();
                    g
                }
            };
            let check = check_sign_condition_group(&group, &profile, &basis, cfg.sweep.sign_directions)?;
            w(out, format!("group: {group:?}"))?;
            w(out, format!("min_norm: {}", check.norm))?;
            w(out, format!("violated: {}", check.violated))?;
            Ok(())
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

fn analyze(
    point: DiffusionPoint,
    cfg: &RunConfig,
    echo: &Value,
    basis: &SpectralBasis,
    dir: Option<PathBuf>,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let b = &cfg.matrix;
    let label = classify_point(point, b, basis)?;
    let env = envelope_d1max(point.d2, b, basis)?;
    let profile = cfg.source_sink(basis)?;
    let result = maximize_rayleigh(point.d2, &profile, b, basis, &cfg.maximizer)?;
    let mut group = Vec::new();
    for &j in &env.argmax {
        group.extend(basis.group_of(j)?);
    }
    group.sort_unstable();
    group.dedup();
    let sign = check_sign_condition_group(&group, &profile, basis, cfg.sweep.sign_directions)?;
    let tau = tau_bound(point.d2, b, basis)?;
    let beta = result.positive_found.then_some(result.value);
    let gap = beta.map(|v| env.d1max - v);

    let region = match &label {
        RegionLabel::Instability => "instability".to_string(),
        RegionLabel::Stability => "stability".to_string(),
        RegionLabel::Envelope { on_curves } => format!(
            "envelope, {}",
            on_curves.iter().map(|j| format!("C_{j}")).collect::<Vec<_>>().join(" ∩ ")
        ),
    };
    let near = |a: f64, b: f64| (a - b).abs() <= ENVELOPE_RTOL * b.abs();
    let verdict = if profile.is_zero() {
        match label {
            RegionLabel::Envelope { .. } => "critical point of the linear problem",
            RegionLabel::Instability => "below the envelope: critical only if on some hyperbola",
            RegionLabel::Stability => "above the envelope: no critical points",
        }
        .to_string()
    } else {
        match beta {
            None => "no positive eigenvalue of the unilateral problem at this d2".to_string(),
            Some(_) if point.d1 > env.d1max && !near(point.d1, env.d1max) => {
                "above the envelope: no critical points".into()
            }
            Some(v) if near(point.d1, v) => "on the unilateral critical curve".into(),
            Some(v) if point.d1 > v => {
                "inside exclusion strip: no critical or bifurcation points of the unilateral problem".into()
            }
            Some(_) => "below the unilateral critical curve".into(),
        }
    };

    let w = |out: &mut dyn Write, s: String| -> Result<()> {
        writeln!(out, "{s}")?;
        Ok(())
    };
    w(out, format!("point: d1 = {}, d2 = {}", point.d1, point.d2))?;
    w(out, format!("region: {region}"))?;
    w(out, format!("nearest_hyperbolas: {:?}", env.argmax))?;
    w(out, format!("d1_max: {}", env.d1max))?;
    w(out, format!("d1_max_beta: {}", opt(beta)))?;
    w(out, format!("gap: {}", opt(gap)))?;
    w(out, format!("residual: {:e}", result.residual))?;
    w(
        out,
        format!("sign_condition: {}", if sign.violated { "violated" } else { "satisfied" }),
    )?;
    w(out, format!("tau_bound: {tau}"))?;
    w(out, format!("verdict: {verdict}"))?;

    if let Some(dir) = dir {
        write_json(
            &dir.join("analysis.json"),
            &json!({
                "config": echo,
                "point": point,
                "region": label,
                "nearest_hyperbolas": env.argmax,
                "d1_max": env.d1max,
                "d1_max_beta": beta,
                "gap": gap,
                "residual": result.residual,
                "converged": result.converged,
                "sign_condition_violated": sign.violated,
                "tau_bound": tau,
                "verdict": verdict,
            }),
        )?;
    }
    if result.positive_found && !result.converged {
        return Err(Failure::NonConvergence(format!(
            "maximizer stopped with residual {:e}",
            result.residual
        )));
    }
    Ok(())
}
