use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches, Parser};
use spectral_adapt::experiments::{
    convergence_sweep, mode_name, parse_mode, run_experiment, Experiment, ExperimentSpec, Outcome,
    StrategyKind,
};
use spectral_adapt::{Mode, SpectralError};
use tempfile::NamedTempFile;

/// Run adaptive Laguerre/Hermite spectral experiments and write CSV histories.
#[derive(Parser, Debug)]
#[command(name = "spadapt", version)]
struct Cli {
    /// Experiment to run (alternative to --experiment).
    #[arg(value_parser = experiment_arg, conflicts_with = "experiment_flag", value_name = "EXPERIMENT")]
    experiment: Option<Experiment>,
    #[arg(long = "experiment", id = "experiment_flag", value_parser = experiment_arg, value_name = "NAME")]
    experiment_flag: Option<Experiment>,
    /// Adaptivity: none, scale, move or move-scale.
    #[arg(long, value_parser = mode_arg)]
    mode: Option<Mode>,
    /// Expansion order.
    #[arg(long = "N", value_parser = clap::value_parser!(u64).range(2..))]
    n: Option<u64>,
    /// Initial scaling factor.
    #[arg(long, value_parser = positive)]
    beta: Option<f64>,
    /// Time step.
    #[arg(long, value_parser = positive)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long = "T", value_parser = positive)]
    t_end: Option<f64>,
    /// Scaling ratio, in (0, 1).
    #[arg(long, value_parser = unit_interval)]
    q: Option<f64>,
    /// Frequency threshold multiplier, > 1 (default 1/q).
    #[arg(long, value_parser = above_one)]
    nu: Option<f64>,
    /// Exterior threshold multiplier, > 1.
    #[arg(long, value_parser = above_one)]
    mu: Option<f64>,
    /// Displacement quantum.
    #[arg(long, value_parser = positive)]
    delta: Option<f64>,
    /// Largest displacement per step.
    #[arg(long = "dmax", value_parser = positive)]
    d_max: Option<f64>,
    /// Lower bound for the scaling factor.
    #[arg(long = "beta-min", value_parser = positive)]
    beta_min: Option<f64>,
    /// Run once per listed order and write convergence tables.
    #[arg(long = "sweep-N", value_delimiter = ',', value_parser = clap::value_parser!(u64).range(2..), value_name = "N,N,...")]
    sweep: Vec<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Dump the expansion at these times.
    #[arg(long, value_delimiter = ',', value_parser = non_negative, conflicts_with = "sweep", value_name = "T,T,...")]
    snapshot: Vec<f64>,
    /// Parabolic scaling strategy: fixed, time-dependent or frequency-dependent.
    #[arg(long, value_parser = strategy_arg)]
    strategy: Option<StrategyKind>,
}

fn experiment_arg(s: &str) -> Result<Experiment, String> {
    Experiment::from_name(s).map_err(|_| {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn mode_arg(s: &str) -> Result<Mode, String> {
    parse_mode(s).map_err(|_| "expected none, scale, move or move-scale".into())
}

fn strategy_arg(s: &str) -> Result<StrategyKind, String> {
    StrategyKind::from_name(s)
        .map_err(|_| "expected fixed, time-dependent or frequency-dependent".into())
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn positive(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if v > 0.0 {
            Ok(v)
        } else {
            Err("must be positive".into())
        }
    })
}

fn non_negative(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if v >= 0.0 {
            Ok(v)
        } else {
            Err("must not be negative".into())
        }
    })
}

fn unit_interval(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if v > 0.0 && v < 1.0 {
            Ok(v)
        } else {
            Err("must lie in (0, 1)".into())
        }
    })
}

fn above_one(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if v > 1.0 {
            Ok(v)
        } else {
            Err("must exceed 1".into())
        }
    })
}

fn defaults_help() -> String {
    let mut s = String::from("Experiments and their defaults:\n");
    for e in Experiment::ALL {
        let d = ExperimentSpec::defaults(e);
        let _ = writeln!(s, "  {:<11} {}", e.name(), e.describe());
        let _ = writeln!(
            s,
            "              --mode {} --N {} --beta {} --dt {} --T {} --mu {} --delta {} --dmax {}",
            mode_name(d.mode),
            d.n,
            d.beta,
            d.dt,
            d.t_end,
            d.mu,
            d.delta,
            d.d_max
        );
    }
    s.push_str("\nAll experiments default to --q 0.95 --nu 1/q --beta-min 0.01.\n");
    s.push_str("Exit status: 0 success, 2 usage error, 3 solver abort.");
    s
}

fn usage_error(kind: ErrorKind, msg: impl std::fmt::Display) -> ! {
    Cli::command()
        .after_help(defaults_help())
        .error(kind, msg)
        .exit()
}

fn build_spec(cli: &Cli) -> ExperimentSpec {
    let Some(experiment) = cli.experiment.or(cli.experiment_flag) else {
        usage_error(
            ErrorKind::MissingRequiredArgument,
            "an experiment is required (positional or --experiment)",
        );
    };
    if cli.strategy.is_some() && experiment != Experiment::Parabolic {
        usage_error(
            ErrorKind::ArgumentConflict,
            "--strategy applies to the parabolic experiment only",
        );
    }
    let d = ExperimentSpec::defaults(experiment);
    let q = cli.q.unwrap_or(d.q);
    let spec = ExperimentSpec {
        experiment,
        mode: cli.mode.unwrap_or(d.mode),
        n: cli.n.map_or(d.n, |n| n as usize),
        beta: cli.beta.unwrap_or(d.beta),
        dt: cli.dt.unwrap_or(d.dt),
        t_end: cli.t_end.unwrap_or(d.t_end),
        q,
        nu: cli.nu.unwrap_or(1.0 / q),
        mu: cli.mu.unwrap_or(d.mu),
        delta: cli.delta.unwrap_or(d.delta),
        d_max: cli.d_max.unwrap_or(d.d_max),
        beta_min: cli.beta_min.unwrap_or(d.beta_min),
        strategy: cli.strategy.unwrap_or(d.strategy),
    };
    if spec.delta > spec.d_max {
        usage_error(
            ErrorKind::ValueValidation,
            format!("--delta {} exceeds --dmax {}", spec.delta, spec.d_max),
        );
    }
    if spec.dt > spec.t_end {
        usage_error(
            ErrorKind::ValueValidation,
            format!("--dt {} exceeds --T {}", spec.dt, spec.t_end),
        );
    }
    if !cli.sweep.is_empty() && cli.sweep.len() < 2 {
        usage_error(
            ErrorKind::ValueValidation,
            "--sweep-N needs at least two orders",
        );
    }
    if let Err(e) = spec.validate() {
        usage_error(ErrorKind::ValueValidation, e);
    }
    spec
}

/// Write through a temporary file in the same directory, then rename.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    let path = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}

enum Failure {
    Usage(String),
    Abort(String),
    Io(io::Error),
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::InvalidParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Abort(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.6e}"))
}

fn report(o: &Outcome) {
    println!("final error  {}", fmt_opt(o.final_error));
    println!("final F      {}", fmt_opt(o.final_freq));
    println!("final beta   {:.6}", o.final_beta);
    for (k, v) in &o.summary {
        println!("{k:<12} {v}");
    }
}

fn execute(cli: &Cli, spec: &ExperimentSpec) -> Result<(), Failure> {
    std::fs::create_dir_all(&cli.out)?;
    println!(
        "{} mode={} N={} beta={} dt={} T={}",
        spec.experiment.name(),
        mode_name(spec.mode),
        spec.n,
        spec.beta,
        spec.dt,
        spec.t_end
    );
    let mut written = Vec::new();
    if cli.sweep.is_empty() {
        let o = run_experiment(spec, &cli.snapshot)?;
        report(&o);
        written.push(write_atomic(&cli.out, "history.csv", &o.history.to_csv())?);
        for (t, text) in &o.snapshots {
            written.push(write_atomic(&cli.out, &format!("snapshot_t{t}.txt"), text)?);
        }
    } else {
        let ns: Vec<usize> = cli.sweep.iter().map(|&n| n as usize).collect();
        let c = convergence_sweep(spec, &ns)?;
        println!("{:>5} {:>14} {:>14} {:>10}", "N", "error", "F", "beta");
        for r in &c.rows {
            println!(
                "{:>5} {:>14.6e} {:>14} {:>10.6}",
                r.n,
                r.error_final,
                fmt_opt(r.f_final),
                r.beta_final
            );
        }
        for (w, p) in c.rows.windows(2).zip(c.orders()) {
            println!("order {} -> {}: {p:.3}", w[0].n, w[1].n);
        }
        written.push(write_atomic(
            &cli.out,
            "convergence.csv",
            &c.table().to_csv(),
        )?);
        written.push(write_atomic(
            &cli.out,
            "orders.csv",
            &c.orders_table().to_csv(),
        )?);
        for (r, o) in c.rows.iter().zip(&c.outcomes) {
            written.push(write_atomic(
                &cli.out,
                &format!("history_N{}.csv", r.n),
                &o.history.to_csv(),
            )?);
        }
        let last = c.outcomes.last().expect("at least two runs");
        written.push(write_atomic(
            &cli.out,
            "history.csv",
            &last.history.to_csv(),
        )?);
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let matches = Cli::command().after_help(defaults_help()).get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let spec = build_spec(&cli);
    match execute(&cli, &spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => usage_error(ErrorKind::ValueValidation, msg),
        Err(Failure::Abort(msg)) => {
            eprintln!("spadapt: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("spadapt: cannot write output in {}: {e}", cli.out.display());
            ExitCode::from(1)
        }
    }
}
