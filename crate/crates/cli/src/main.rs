use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wwlab_cli::config::Frequency;
use wwlab_cli::{emit_report, run_experiment, CliError, Experiment, ExperimentConfig, Format};

/// Seeded experiments on double-recurrence Wiener-Wintner averages.
///
/// Exit status is 0 when every verdict of the report passes, 1 when some
/// verdict fails, 2 on usage or configuration errors, 3 when the experiment
/// rejects its input and 4 on I/O errors. `WWLAB_THREADS` caps the worker
/// pool; results do not depend on it.
#[derive(Parser, Debug)]
#[command(name = "wwlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// JSON config used when no subcommand is given.
    #[arg(long, global = false)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// W_N decay, persistence and the integral inequalities.
    Ww(Flags),
    /// GHK, N_k, angle seminorms and the power bound.
    Seminorm(Flags),
    /// Correlation sequences, Wiener statistic and atoms.
    Spectral(Flags),
    /// Kernel conditional expectations, resonance limits and projections.
    KernelCheck(Flags),
    /// Random-input checks of the van der Corput inequalities.
    Ineq(Flags),
    /// The bound of sup_t |W_N| by C N_2^2.
    Maxisom(Flags),
    /// The rational-frequency lift and the eigenfunction twist.
    Lift(Flags),
    /// Polynomial orbit averages and the cocycle equation.
    Nil(Flags),
    /// Quadratic Weyl sums.
    Weyl(Flags),
    /// A battery of every experiment at reduced size.
    Report(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON config with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// rotation, skew, doubling, cyclic or heisenberg.
    #[arg(long)]
    system: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Order of the cyclic factor.
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    f1: Option<String>,
    #[arg(long)]
    f2: Option<String>,
    #[arg(short = 'a', allow_negative_numbers = true)]
    a: Option<i64>,
    #[arg(short = 'b', allow_negative_numbers = true)]
    b: Option<i64>,
    /// Frequency, real or p/q.
    #[arg(short = 't', allow_negative_numbers = true)]
    t: Option<String>,
    #[arg(short = 'N')]
    n: Option<usize>,
    /// Comma-separated increasing N values.
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<usize>>,
    #[arg(short = 'H')]
    h: Option<usize>,
    #[arg(short = 'K')]
    k: Option<usize>,
    /// Quadrature nodes per axis.
    #[arg(long)]
    nodes: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    oversampling: Option<usize>,
    /// Variant of the experiment (see README).
    #[arg(long)]
    which: Option<String>,
    /// Seminorm order k.
    #[arg(long)]
    order: Option<u8>,
    #[arg(long)]
    trials: Option<usize>,
    /// The constant C of the uniform bounds.
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Comma-separated powers s for the kernel check.
    #[arg(long, value_delimiter = ',')]
    powers: Option<Vec<u64>>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha2: Option<f64>,
    /// Character index k of the eigenfunction twist.
    #[arg(long, allow_negative_numbers = true)]
    eigen_index: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Record wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

impl Flags {
    fn into_config(
        self,
        experiment: Experiment,
    ) -> Result<(Option<PathBuf>, ExperimentConfig), CliError> {
        let t = self.t.as_deref().map(str::parse::<Frequency>).transpose()?;
        let cfg = ExperimentConfig {
            experiment: Some(experiment),
            system: self.system,
            alpha: self.alpha,
            q: self.q,
            f: self.f,
            f1: self.f1,
            f2: self.f2,
            a: self.a,
            b: self.b,
            t,
            n: self.n,
            ladder: self.ladder,
            h: self.h,
            k: self.k,
            nodes: self.nodes,
            oversampling: self.oversampling,
            samples: self.samples,
            seed: self.seed,
            which: self.which,
            order: self.order,
            trials: self.trials,
            constant: self.constant,
            threshold: self.threshold,
            powers: self.powers,
            x: self.x,
            y: self.y,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            eigen_index: self.eigen_index,
            out: self.out,
            format: self.format,
            timing: self.timing,
            ..Default::default()
        };
        Ok((self.config, cfg))
    }
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let (path, flags) = match cli.command {
        None => (cli.config, ExperimentConfig::default()),
        Some(cmd) => {
            let (experiment, flags) = match cmd {
                Command::Ww(f) => (Experiment::Ww, f),
                Command::Seminorm(f) => (Experiment::Seminorm, f),
                Command::Spectral(f) => (Experiment::Spectral, f),
                Command::KernelCheck(f) => (Experiment::KernelCheck, f),
                Command::Ineq(f) => (Experiment::Ineq, f),
                Command::Maxisom(f) => (Experiment::Maxisom, f),
                Command::Lift(f) => (Experiment::Lift, f),
                Command::Nil(f) => (Experiment::Nil, f),
                Command::Weyl(f) => (Experiment::Weyl, f),
                Command::Report(f) => (Experiment::Report, f),
            };
            let (path, cfg) = flags.into_config(experiment)?;
            (path.or(cli.config), cfg)
        }
    };
    let base = match path {
        Some(p) => ExperimentConfig::load(&p)?,
        None => ExperimentConfig::default(),
    };
    Ok(base.overlay(&flags))
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("WWLAB_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "WWLAB_THREADS must be a positive integer, got `{v}`"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))?;
    }
    Ok(())
}

fn main_inner() -> Result<bool, CliError> {
    let cli = Cli::parse();
    configure_threads()?;
    let cfg = resolve(cli)?;
    let report = run_experiment(&cfg)?;
    emit_report(&report, cfg.format.unwrap_or_default(), cfg.out.as_deref())?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("wwlab: error: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("try `wwlab --help`");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
