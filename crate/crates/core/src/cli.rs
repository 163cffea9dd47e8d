//! Command-line front end: `run`, `sweep`, `picard` and `check`.
//!
//! Exit codes: 0 success, 1 usage or configuration error (and `check` on a
//! nonpositive margin), 2 a run ended early (vacuum, non-finite values or
//! gradient blow-up).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::diagnostics::{sweep, threshold_margin, threshold_margin_max_entry, SweepRow, SweepSample};
use crate::dynamics::{cfl_dt, run, Formulation};
use crate::eos::EosParams;
use crate::error::{Error, Result};
use crate::io::{load_config, write_series, write_snapshot, RunConfig};
use crate::kernel::Kernel;
use crate::picard::{auto_t0, picard_run, CoefficientSampling, PicardConfig, PicardOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ABORT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "euler-align", version, about = "Damped Euler-alignment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one configuration, writing the diagnostics series and snapshots.
    Run {
        config: PathBuf,
        /// Overrides `[output] directory`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Repeat a run over values of one parameter and tabulate the outcome.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build Picard iterates and report the successive differences.
    Picard {
        config: PathBuf,
        #[arg(long, default_value_t = 8)]
        iterations: usize,
        /// Horizon, or `auto` to search up to `--t-max`.
        #[arg(long, default_value = "auto")]
        t0: String,
        /// Search limit for `--t0 auto`; defaults to `[scheme] t_end`.
        #[arg(long)]
        t_max: Option<f64>,
        /// Ratio bound used by `--t0 auto`.
        #[arg(long, default_value_t = 0.5)]
        max_ratio: f64,
        /// Time step; defaults to the CFL step of the initial data.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum, default_value_t = Sampling::Stage)]
        sampling: Sampling,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Validate a configuration and print the derived quantities.
    Check { config: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SweepParam {
    A,
    #[value(name = "a_sym")]
    ASym,
    Tau,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Sampling {
    Stage,
    Linear,
}

/// Shortest decimal with at most 12 significant fractional digits.
fn short(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn output_dir(cfg: &RunConfig, over: Option<PathBuf>) -> PathBuf {
    over.unwrap_or_else(|| cfg.output.directory.clone())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn with_parameter(eos: &EosParams, param: SweepParam, value: f64) -> Result<EosParams> {
    let (a, g, r, t) = (eos.pressure_constant, eos.gamma, eos.rho_bar, eos.tau);
    match param {
        SweepParam::A => EosParams::new(a, g, r, value, t),
        SweepParam::ASym => EosParams::with_symmetrized_alignment(a, g, r, value, t),
        SweepParam::Tau => EosParams::with_symmetrized_alignment(a, g, r, eos.alignment_sym, value),
    }
}

enum Outcome {
    Ok,
    Rejected,
    Abort,
}

fn cmd_check(path: &Path, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = load_config(path)?;
    let kernel = Kernel::build(cfg.kernel, cfg.grid)?;
    let init = cfg.initial_state()?;
    let dt = cfl_dt(&init, &cfg.eos, &cfg.scheme)?;
    let margin = threshold_margin(&cfg.eos, &kernel);
    let mut s = String::new();
    let g = cfg.grid;
    let e = &cfg.eos;
    let _ = writeln!(s, "config: {}", path.display());
    let _ = writeln!(s, "grid: dim = {}, n = {}, L = {}, h = {}", g.dim(), g.points(), short(g.length()), short(g.spacing()));
    let _ = writeln!(s, "eos: gamma = {}, nu = {}, rho_bar = {}, kappa_bar = {}", short(e.gamma), short(e.nu), short(e.rho_bar), short(e.kappa_bar));
    let _ = writeln!(s, "alignment: a = {}, a_sym = {}, tau = {}", short(e.alignment), short(e.alignment_sym), short(e.tau));
    let _ = writeln!(s, "kernel_l1: {}", short(kernel.l1_norm()));
    let _ = writeln!(s, "kernel_l1_max_entry: {}", short(kernel.l1_norm_max_entry()));
    let _ = writeln!(s, "threshold_margin: {}", short(margin));
    let _ = writeln!(s, "threshold_margin_max_entry: {}", short(threshold_margin_max_entry(&cfg.eos, &kernel)));
    let _ = writeln!(s, "scheme: {}, dealias = {}, t_end = {}", cfg.scheme.spatial.name(), cfg.scheme.dealias, short(cfg.scheme.t_end));
    let _ = writeln!(s, "initial_dt: {}", short(dt));
    if margin <= 0.0 {
        let _ = writeln!(s, "warning: damping does not dominate alignment (margin <= 0)");
    }
    let _ = out.write_all(s.as_bytes());
    Ok(if margin > 0.0 { Outcome::Ok } else { Outcome::Rejected })
}

fn cmd_run(path: &Path, over: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let cfg = load_config(path)?;
    let kernel = Kernel::build(cfg.kernel, cfg.grid)?;
    let init = cfg.initial_state()?;
    let result = run(&init, &cfg.eos, &kernel, &cfg.scheme, &cfg.diagnostics)?;
    let dir = output_dir(&cfg, over);
    ensure_dir(&dir)?;
    let series = dir.join(&cfg.output.series);
    write_series(&series, &result.records)?;
    for (i, s) in result.trajectory.iter().enumerate() {
        write_snapshot(&dir.join(format!("snap_{i:05}.bin")), s)?;
    }
    let last = result.records.last().expect("initial record");
    let first = result.records[0];
    let _ = writeln!(
        out,
        "steps: {}\nfinal_time: {}\ne_l2: {:.6e} -> {:.6e}\nsnapshots: {}\nseries: {}\nstatus: {}",
        result.steps,
        short(last.time),
        first.e_l2,
        last.e_l2,
        result.trajectory.len(),
        series.display(),
        result.status.describe()
    );
    if result.status.is_completed() {
        Ok(Outcome::Ok)
    } else {
        let _ = writeln!(err, "run ended early: {}", result.status.describe());
        Ok(Outcome::Abort)
    }
}

fn sweep_table(rows: &[SweepRow]) -> String {
    let mut s = String::from("value,margin,margin_max_entry,decay_ratio,decay_rate,classification,final_time,note\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.6e},{:.6e},{},{},{}",
            short(r.value),
            short(r.margin),
            short(r.margin_max_entry),
            r.decay_ratio,
            r.decay_rate,
            r.classification.name(),
            short(r.final_time),
            r.note.as_deref().unwrap_or("").replace(',', ";")
        );
    }
    s
}

fn cmd_sweep(
    path: &Path,
    param: SweepParam,
    values: &[f64],
    threads: usize,
    over: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let cfg = load_config(path)?;
    let kernel = Kernel::build(cfg.kernel, cfg.grid)?;
    let dir = output_dir(&cfg, over);
    ensure_dir(&dir)?;
    let runner = |value: f64| -> Result<SweepSample> {
        let eos = with_parameter(&cfg.eos, param, value)?;
        let local = RunConfig { eos, ..cfg.clone() };
        let init = local.initial_state()?;
        let output = run(&init, &eos, &kernel, &local.scheme, &local.diagnostics)?;
        let sub = dir.join(format!("value_{}", short(value)));
        ensure_dir(&sub)?;
        write_series(&sub.join(&cfg.output.series), &output.records)?;
        Ok(SweepSample {
            margin: threshold_margin(&eos, &kernel),
            margin_max_entry: threshold_margin_max_entry(&eos, &kernel),
            output,
        })
    };
    let rows = sweep(values, threads, runner);
    let table = sweep_table(&rows);
    let file = dir.join("sweep.csv");
    std::fs::write(&file, &table).map_err(|e| Error::io(&file, e))?;
    let _ = out.write_all(table.as_bytes());
    Ok(Outcome::Ok)
}

#[allow(clippy::too_many_arguments)]
fn cmd_picard(
    path: &Path,
    iterations: usize,
    t0: &str,
    t_max: Option<f64>,
    max_ratio: f64,
    dt: Option<f64>,
    sampling: Sampling,
    over: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Outcome> {
    let cfg = load_config(path)?;
    let kernel = Kernel::build(cfg.kernel, cfg.grid)?;
    let init = cfg.initial_state()?.to_form(Formulation::Symmetrized, &cfg.eos)?;
    let base_dt = match dt {
        Some(d) => d,
        None => cfl_dt(&init, &cfg.eos, &cfg.scheme)?,
    };
    let mut base = PicardConfig::new(0.0, base_dt, iterations);
    base.sampling = match sampling {
        Sampling::Stage => CoefficientSampling::StageAligned,
        Sampling::Linear => CoefficientSampling::Linear,
    };
    base.sobolev_s = cfg.diagnostics.sobolev_s;
    base.dealias = cfg.scheme.dealias;

    let result: Option<(PicardConfig, PicardOutput)> = if t0 == "auto" {
        auto_t0(&init, &cfg.eos, &kernel, &base, t_max.unwrap_or(cfg.scheme.t_end), max_ratio)?
    } else {
        let t0 = t0
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| Error::InvalidParameter(format!("--t0 must be 'auto' or a positive number, got '{t0}'")))?;
        let step = if dt.is_some() { base_dt } else { t0 / (t0 / base_dt).ceil() };
        let c = PicardConfig { t0, dt: step, ..base };
        let o = picard_run(&init, &cfg.eos, &kernel, &c)?;
        Some((c, o))
    };
    let Some((used, output)) = result else {
        let _ = writeln!(err, "no horizon with contraction ratio <= {max_ratio} found");
        return Ok(Outcome::Ok);
    };
    let r = &output.report;
    let mut table = String::from("k,d_k,ratio\n");
    for (i, d) in r.differences.iter().enumerate() {
        let ratio = r.ratios.get(i).map(|v| format!("{v:.6e}")).unwrap_or_default();
        let _ = writeln!(table, "{},{:.6e},{}", i + 1, d, ratio);
    }
    let dir = output_dir(&cfg, over);
    ensure_dir(&dir)?;
    let file = dir.join("picard.csv");
    std::fs::write(&file, &table).map_err(|e| Error::io(&file, e))?;
    let _ = writeln!(out, "t0: {}\ndt: {}\nsteps: {}\niterations: {}", short(used.t0), short(used.dt), r.steps, used.iterations);
    let _ = out.write_all(table.as_bytes());
    let _ = writeln!(out, "max_ratio_k>=2: {:.6e}", r.max_ratio_from(2));
    for w in &r.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if r.non_contraction {
        let _ = writeln!(err, "warning: successive differences do not contract");
    }
    Ok(Outcome::Ok)
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Run { config, output } => cmd_run(&config, output, out, err),
        Command::Sweep {
            config,
            param,
            values,
            threads,
            output,
        } => cmd_sweep(&config, param, &values, threads, output, out),
        Command::Picard {
            config,
            iterations,
            t0,
            t_max,
            max_ratio,
            dt,
            sampling,
            output,
        } => cmd_picard(&config, iterations, &t0, t_max, max_ratio, dt, sampling, output, out, err),
        Command::Check { config } => cmd_check(&config, out),
    };
    match result {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Rejected) => EXIT_USAGE,
        Ok(Outcome::Abort) => EXIT_ABORT,
        Err(e @ (Error::Vacuum { .. } | Error::NonFiniteValue { .. } | Error::NonPositiveWeight { .. })) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ABORT
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
