//! Command-line grammar and dispatch.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evoscheme_core::validation::Ladder;

use crate::commands::{audit, sensitivity, sensitivity_csv, validate, Axis};
use crate::config::{parse_grid, parse_offsets, Family, RunConfig, TemplateChoice};
use crate::error::{CliError, Result};
use crate::evolve::{check_divergence, evolve};
use crate::files::SchemeFile;
use crate::output::{num, write_comparison, write_evolution, write_text};

/// Evolve numerical scheme coefficients and verify their order.
#[derive(Debug, Parser)]
#[command(name = "evoscheme", version)]
pub struct Cli {
    /// Root for output directories of commands run without --out.
    #[arg(
        long,
        env = "EVOSCHEME_OUT",
        default_value = "evoscheme-out",
        global = true
    )]
    pub out_root: PathBuf,
    /// What to do.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a scheme over several seeded runs.
    Evolve {
        /// Scheme family.
        #[arg(value_enum)]
        family: Family,
        /// Run configuration.
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory (default: <out-root>/evolve-<label>-seed<seed>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scheme file against the conditions of an order.
    Audit {
        /// Scheme file, or builtin:<name>.
        file: String,
        /// Order to check.
        #[arg(long)]
        order: usize,
        /// Also write the CSV here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Step-size convergence study of one or more schemes.
    Validate {
        /// Scheme files, or builtin:<name>.
        #[arg(required = true)]
        files: Vec<String>,
        /// Reference: bell, exponential or ivp.
        #[arg(long)]
        reference: String,
        /// Largest step.
        #[arg(long, default_value_t = 0.1)]
        h0: f64,
        /// Ratio between steps.
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        /// Number of steps.
        #[arg(long, default_value_t = 10)]
        rungs: usize,
        /// Evaluation abscissa (default 1 for ivp, 0 otherwise).
        #[arg(long, allow_hyphen_values = true)]
        location: Option<f64>,
        /// Output directory (default: <out-root>/validate-<reference>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat an evolution across a grid of one parameter.
    Sensitivity {
        /// Parameter to vary.
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated grid values.
        #[arg(long, value_parser = parse_grid_arg)]
        grid: GridArg,
        /// Scheme family (stencils default to central order 6).
        #[arg(long, value_enum, default_value = "fd")]
        family: Family,
        /// Run configuration.
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory (default: <out-root>/sensitivity-<axis>-<label>-seed<seed>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parsed `--grid`.
#[derive(Debug, Clone)]
pub struct GridArg(pub Vec<f64>);

fn parse_grid_arg(s: &str) -> std::result::Result<GridArg, String> {
    parse_grid(s).map(GridArg)
}

fn parse_offsets_arg(s: &str) -> std::result::Result<Offsets, String> {
    parse_offsets(s).map(Offsets)
}

/// Parsed `--offsets`.
#[derive(Debug, Clone)]
pub struct Offsets(pub Vec<i32>);

/// Config file plus per-key overrides; flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// key = value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Population size NP.
    #[arg(long)]
    pub population_size: Option<usize>,
    /// Initial crossover rate.
    #[arg(long)]
    pub cr0: Option<f64>,
    /// Initial scale factor.
    #[arg(long)]
    pub f0: Option<f64>,
    /// Cauchy half-width.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Generations without improvement before stopping.
    #[arg(long)]
    pub stall_generations: Option<usize>,
    /// Generation limit.
    #[arg(long)]
    pub max_generations: Option<usize>,
    /// Individuals reinjected per generation.
    #[arg(long)]
    pub reinjection_count: Option<usize>,
    /// Master seed; run j uses seed + j.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent runs.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Training points N.
    #[arg(long)]
    pub training_points: Option<usize>,
    /// Sampling step of the training target.
    #[arg(long)]
    pub sample_step: Option<f64>,
    /// Training target: bell or exponential.
    #[arg(long)]
    pub target: Option<String>,
    /// Stencil template.
    #[arg(long, value_enum)]
    pub template: Option<TemplateChoice>,
    /// Stencil order or Runge-Kutta order.
    #[arg(long)]
    pub order: Option<u32>,
    /// Central stencils: include the f(x) term.
    #[arg(long)]
    pub center: Option<bool>,
    /// Custom offsets, e.g. -3,-1,1,3.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_offsets_arg)]
    pub offsets: Option<Offsets>,
    /// Runge-Kutta stages.
    #[arg(long)]
    pub stage: Option<usize>,
    /// Adams-Bashforth steps.
    #[arg(long)]
    pub k: Option<usize>,
    /// Start-up tableau name for Adams-Bashforth.
    #[arg(long)]
    pub starter: Option<String>,
    /// Full order-5 budget (stall 10000, max 100000).
    #[arg(long)]
    pub paper_budget: bool,
    /// Evaluate serially.
    #[arg(long)]
    pub serial: bool,
}

impl ConfigArgs {
    /// File contents overlaid by the flags.
    pub fn load(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::parse(&fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            population_size: self.population_size,
            cr0: self.cr0,
            f0: self.f0,
            gamma: self.gamma,
            stall_generations: self.stall_generations,
            max_generations: self.max_generations,
            reinjection_count: self.reinjection_count,
            seed: self.seed,
            runs: self.runs,
            training_points: self.training_points,
            sample_step: self.sample_step,
            target: self.target.clone(),
            template: self.template,
            order: self.order,
            center: self.center,
            offsets: self.offsets.clone().map(|o| o.0),
            stage: self.stage,
            k: self.k,
            starter: self.starter.clone(),
            paper_budget: self.paper_budget.then_some(true),
            parallel: self.serial.then_some(false),
        };
        Ok(base.overlay(&flags))
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| CliError::io("<stdout>", e))?
    };
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    out.write_all(bytes)
        .map_err(|e| CliError::io("<stdout>", e))
}

fn report_paths(w: &mut dyn Write, paths: &[PathBuf]) -> Result<()> {
    if let Some(dir) = paths.first().and_then(|p| p.parent()) {
        say!(w, "wrote {} files under {}", paths.len(), dir.display());
    }
    Ok(())
}

/// Executes a parsed command line, writing reports to `w`.
pub fn execute(cli: Cli, w: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Evolve {
            family,
            config,
            out,
        } => {
            let resolved = config.load()?.resolve(family)?;
            if let Some(w) = &resolved.warning {
                eprintln!("warning: {w}");
            }
            let evo = evolve(&resolved)?;
            let dir = out.unwrap_or_else(|| {
                cli.out_root.join(format!(
                    "evolve-{}-seed{}",
                    resolved.problem.label(),
                    resolved.settings.seed
                ))
            });
            let written = write_evolution(&evo, &dir)?;
            let r = &evo.report;
            say!(
                w,
                "winner run {} (seed {})",
                r.winner_run,
                r.runs[r.winner_run].seed
            );
            say!(w, "fitness {}", num(r.winner_fitness));
            say!(w, "error_sum {}", num(r.winner_error_sum));
            if let (Some(name), Some(d)) = (&r.nearest_theory, r.winner_coefficient_error) {
                say!(w, "coefficient_error {} (vs {name})", num(d));
            }
            let g: Vec<String> = r.winner_genome.iter().map(|&x| num(x)).collect();
            say!(w, "genome {}", g.join(" "));
            report_paths(w, &written)?;
            check_divergence(&evo)
        }
        Command::Audit {
            file,
            order,
            output,
        } => {
            let (_, scheme) = SchemeFile::load(&file)?;
            let report = audit(&scheme, order)?;
            let csv = report.to_csv()?;
            emit(w, csv.as_bytes())?;
            if let Some(p) = output {
                write_text(&p, &csv)?;
            }
            Ok(())
        }
        Command::Validate {
            files,
            reference,
            h0,
            ratio,
            rungs,
            location,
            out,
        } => {
            let schemes = files
                .iter()
                .map(|f| SchemeFile::load(f))
                .collect::<Result<Vec<_>>>()?;
            let comparison =
                validate(&schemes, &reference, location, &Ladder { h0, ratio, rungs })?;
            let dir = out.unwrap_or_else(|| cli.out_root.join(format!("validate-{reference}")));
            let written = write_comparison(&comparison, &dir)?;
            for col in &comparison.columns {
                match col.fit.estimate() {
                    Some(e) => say!(
                        w,
                        "{}: slope {:.4} (r² {:.6}, {} points)",
                        col.name,
                        e.slope,
                        e.r_squared,
                        e.points_used
                    ),
                    None => say!(w, "{}: slope indeterminate", col.name),
                }
            }
            report_paths(w, &written)?;
            Ok(())
        }
        Command::Sensitivity {
            axis,
            grid,
            family,
            config,
            out,
        } => {
            let mut base = config.load()?;
            if family == Family::Fd && base.order.is_none() && base.template.is_none() {
                base.order = Some(6);
            }
            let probe = base.resolve(family)?;
            let rows = sensitivity(axis, &grid.0, &base, family)?;
            let dir = out.unwrap_or_else(|| {
                cli.out_root.join(format!(
                    "sensitivity-{}-{}-seed{}",
                    axis.name(),
                    probe.problem.label(),
                    probe.settings.seed
                ))
            });
            let csv = sensitivity_csv(axis, &rows)?;
            emit(w, csv.as_bytes())?;
            write_text(&dir.join("sensitivity.csv"), &csv)?;
            write_text(&dir.join("config.txt"), &probe.config.to_text())?;
            say!(w, "wrote sensitivity.csv under {}", dir.display());
            Ok(())
        }
    }
}

/// Parses the process arguments and runs; maps errors to exit codes
/// (1 configuration, 2 all runs diverged).
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let result = execute(cli, &mut lock)
        .and_then(|()| lock.flush().map_err(|e| CliError::io("<stdout>", e)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
