//! Argument parsing. Flags override the TOML file, which overrides defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Command, RunReport};
use crate::config::{ConstantSet, Config, FormName, SelectMode, TopologyName};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "spiroplanck", version, about = "Spirograph-guided sensor placement with a Planck-curve stopping rule")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file
    #[arg(long, short = 'c', value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for artifacts and the run manifest
    #[arg(long, short = 'o', value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct FieldArgs {
    /// Field side length L (m)
    #[arg(long)]
    pub side_length: Option<f64>,
    /// Sensing range R (m)
    #[arg(long)]
    pub range: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct CurveArgs {
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    /// Pen offset
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub t_step: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Sample the spirograph curve
    Spirograph {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Place nodes along the curve until the isolation threshold is met
    Plan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        threshold: Option<f64>,
        /// Quantization step for duplicate detection
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        max_iterations: Option<u64>,
        #[arg(long, value_enum)]
        select: Option<SelectMode>,
        /// Seed for `--select random`
        #[arg(long, value_parser = seed_parser())]
        seed: Option<u64>,
        /// Exit with status 3 unless the planner converges
        #[arg(long)]
        strict: bool,
    },
    /// Tabulate Planck spectra
    Planck {
        #[command(flatten)]
        common: Common,
        /// Temperatures in kelvin (repeatable)
        #[arg(long = "temperature", short = 't', value_name = "K")]
        temperatures: Vec<f64>,
        #[arg(long, value_enum)]
        form: Option<FormName>,
        #[arg(long, value_enum)]
        constants: Option<ConstantSet>,
    },
    /// Binomial coverage distribution and its Poisson approximation
    Coverage {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, short = 'n')]
        nodes: Option<u64>,
    },
    /// Check the isolation formula against random deployments
    Montecarlo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, short = 'n')]
        nodes: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, value_parser = seed_parser())]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        topology: Option<TopologyName>,
    },
    /// Echo and plot the OSPF overhead reference table
    Bench {
        #[command(flatten)]
        common: Common,
        /// Alternative reference CSV
        #[arg(long, value_name = "CSV")]
        reference: Option<PathBuf>,
    },
    /// Re-run a command from its manifest
    Replay {
        manifest: PathBuf,
        #[arg(long, short = 'o', value_name = "DIR", default_value = ".")]
        out_dir: PathBuf,
    },
}

/// Manifests store seeds as TOML integers, which are signed 64-bit.
fn seed_parser() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(..=i64::MAX as u64)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl FieldArgs {
    fn apply(&self, c: &mut Config) {
        set(&mut c.field.side_length, self.side_length);
        set(&mut c.field.range, self.range);
    }
}

impl CurveArgs {
    fn apply(&self, c: &mut Config) {
        set(&mut c.curve.r1, self.r1);
        set(&mut c.curve.r2, self.r2);
        set(&mut c.curve.a, self.a);
        set(&mut c.curve.t_step, self.t_step);
        if self.t_max.is_some() {
            c.curve.t_max = self.t_max;
        }
    }
}

fn load(common: &Common) -> Result<Config> {
    Config::load_or_default(common.config.as_deref())
}

/// The outcome of a parsed invocation.
pub struct Invocation {
    pub report: RunReport,
    pub strict: bool,
}

impl Sub {
    pub fn run(self) -> Result<Invocation> {
        let (command, config, out_dir, strict) = match self {
            Sub::Replay { manifest, out_dir } => {
                return Ok(Invocation {
                    report: commands::replay(&manifest, &out_dir)?,
                    strict: false,
                })
            }
            Sub::Spirograph { common, curve } => {
                let mut c = load(&common)?;
                curve.apply(&mut c);
                (Command::Spirograph, c, common.out_dir, false)
            }
            Sub::Plan {
                common,
                field,
                curve,
                threshold,
                epsilon,
                max_iterations,
                select,
                seed,
                strict,
            } => {
                let mut c = load(&common)?;
                field.apply(&mut c);
                curve.apply(&mut c);
                set(&mut c.planner.threshold, threshold);
                set(&mut c.planner.epsilon, epsilon);
                if max_iterations.is_some() {
                    c.planner.max_iterations = max_iterations;
                }
                set(&mut c.planner.select, select);
                set(&mut c.planner.seed, seed);
                (Command::Plan, c, common.out_dir, strict)
            }
            Sub::Planck {
                common,
                temperatures,
                form,
                constants,
            } => {
                let mut c = load(&common)?;
                if !temperatures.is_empty() {
                    c.planck.temperatures = temperatures;
                }
                set(&mut c.planck.form, form);
                set(&mut c.planck.constants, constants);
                (Command::Planck, c, common.out_dir, false)
            }
            Sub::Coverage { common, field, nodes } => {
                let mut c = load(&common)?;
                field.apply(&mut c);
                set(&mut c.coverage.n_nodes, nodes);
                (Command::Coverage, c, common.out_dir, false)
            }
            Sub::Montecarlo {
                common,
                field,
                nodes,
                trials,
                seed,
                topology,
            } => {
                let mut c = load(&common)?;
                field.apply(&mut c);
                set(&mut c.montecarlo.n_nodes, nodes);
                set(&mut c.montecarlo.trials, trials);
                set(&mut c.montecarlo.seed, seed);
                set(&mut c.montecarlo.topology, topology);
                (Command::MonteCarlo, c, common.out_dir, false)
            }
            Sub::Bench { common, reference } => {
                let mut c = load(&common)?;
                if reference.is_some() {
                    c.bench.reference = reference;
                }
                (Command::Bench, c, common.out_dir, false)
            }
        };
        let report = commands::execute(command, config, &out_dir)?;
        Ok(Invocation { report, strict })
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
/// Output goes to the given writers.
pub fn main_with<I, S>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match cli.command.run() {
        Ok(Invocation { report, strict }) => {
            for line in &report.messages {
                let _ = writeln!(stdout, "{line}");
            }
            for w in &report.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let _ = writeln!(stdout, "manifest: {}", display(&report.manifest));
            match report.outcome {
                Some(outcome) if strict && outcome != spiroplanck::planner::Outcome::Converged => {
                    let e = CliError::NotConverged(outcome);
                    let _ = writeln!(stderr, "error: {e}");
                    e.exit_code()
                }
                _ => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
