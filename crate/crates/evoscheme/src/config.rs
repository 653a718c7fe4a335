//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags. Keys are the field names of [`RunConfig`]; `#` starts a comment.
//!
//! ```text
//! # central sixth order, 200 training points
//! template = central
//! order = 6
//! training_points = 200
//! seed = 7
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use evoscheme_core::conditions::{check_admissible, max_order_for_stage, min_stage_for_order};
use evoscheme_core::de::DeSettings;
use evoscheme_core::fitness::{reference_by_name, Reference, TargetFunctionPair};
use evoscheme_core::{ButcherTableau, StencilTemplate};

use crate::error::{CliError, Result};
use crate::files::resolve_starter;

/// Scheme family of an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// Finite-difference stencils.
    Fd,
    /// Runge-Kutta tableaus.
    Rk,
    /// Adams-Bashforth weights.
    Ab,
}

impl Family {
    /// Lower-case name.
    pub fn name(self) -> &'static str {
        match self {
            Family::Fd => "fd",
            Family::Rk => "rk",
            Family::Ab => "ab",
        }
    }
}

/// Stencil template kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TemplateChoice {
    /// Symmetric offsets.
    Central,
    /// Offsets `0..=p`.
    Forward,
    /// Explicit `offsets`.
    Custom,
}

/// Every configurable value; unset fields take per-family defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    /// Population size NP.
    pub population_size: Option<usize>,
    /// Initial crossover rate.
    pub cr0: Option<f64>,
    /// Initial scale factor.
    pub f0: Option<f64>,
    /// Cauchy half-width.
    pub gamma: Option<f64>,
    /// Stall limit.
    pub stall_generations: Option<usize>,
    /// Generation limit.
    pub max_generations: Option<usize>,
    /// Individuals reinjected per generation.
    pub reinjection_count: Option<usize>,
    /// Master seed; run `j` uses `seed + j`.
    pub seed: Option<u64>,
    /// Independent runs R.
    pub runs: Option<usize>,
    /// Training points N.
    pub training_points: Option<usize>,
    /// Sampling step of the training target.
    pub sample_step: Option<f64>,
    /// Training target name.
    pub target: Option<String>,
    /// Stencil template kind.
    pub template: Option<TemplateChoice>,
    /// Stencil order, or Runge-Kutta order.
    pub order: Option<u32>,
    /// Central stencils: include the `f(x)` term.
    pub center: Option<bool>,
    /// Custom stencil offsets.
    pub offsets: Option<Vec<i32>>,
    /// Runge-Kutta stage count.
    pub stage: Option<usize>,
    /// Adams-Bashforth step count.
    pub k: Option<usize>,
    /// Named start-up tableau for Adams-Bashforth.
    pub starter: Option<String>,
    /// Full order-5 budget instead of the desk budget.
    pub paper_budget: Option<bool>,
    /// Evaluate in parallel.
    pub parallel: Option<bool>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("{key}: cannot parse `{value}`: {e}"))
}

/// Comma-separated integers, as in `-3,-1,1,3`.
pub fn parse_offsets(value: &str) -> std::result::Result<Vec<i32>, String> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<i32>()
                .map_err(|e| format!("offsets: `{s}`: {e}"))
        })
        .collect()
}

/// Comma-separated reals.
pub fn parse_grid(value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("grid: `{s}`: {e}"))
        })
        .collect()
}

impl RunConfig {
    /// Parses a config file; errors carry the line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", no + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(cfg)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "population_size" => self.population_size = Some(parse(key, value)?),
            "cr0" => self.cr0 = Some(parse(key, value)?),
            "f0" => self.f0 = Some(parse(key, value)?),
            "gamma" => self.gamma = Some(parse(key, value)?),
            "stall_generations" => self.stall_generations = Some(parse(key, value)?),
            "max_generations" => self.max_generations = Some(parse(key, value)?),
            "reinjection_count" => self.reinjection_count = Some(parse(key, value)?),
            "seed" => self.seed = Some(parse(key, value)?),
            "runs" => self.runs = Some(parse(key, value)?),
            "training_points" => self.training_points = Some(parse(key, value)?),
            "sample_step" => self.sample_step = Some(parse(key, value)?),
            "target" => self.target = Some(value.to_string()),
            "template" => {
                self.template = Some(
                    <TemplateChoice as clap::ValueEnum>::from_str(value, true).map_err(|_| {
                        format!("template: `{value}` is not central, forward or custom")
                    })?,
                )
            }
            "order" => self.order = Some(parse(key, value)?),
            "center" => self.center = Some(parse(key, value)?),
            "offsets" => self.offsets = Some(parse_offsets(value)?),
            "stage" => self.stage = Some(parse(key, value)?),
            "k" => self.k = Some(parse(key, value)?),
            "starter" => self.starter = Some(value.to_string()),
            "paper_budget" => self.paper_budget = Some(parse(key, value)?),
            "parallel" => self.parallel = Some(parse(key, value)?),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Fields set in `other` replace those of `self`.
    pub fn overlay(mut self, other: &RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(
            population_size,
            cr0,
            f0,
            gamma,
            stall_generations,
            max_generations,
            reinjection_count,
            seed,
            runs,
            training_points,
            sample_step,
            target,
            template,
            order,
            center,
            offsets,
            stage,
            k,
            starter,
            paper_budget,
            parallel
        );
        self
    }

    /// The set fields in file syntax, in declaration order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        macro_rules! emit {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { let _ = writeln!(out, "{} = {}", stringify!($f), v); } )* };
        }
        emit!(
            population_size,
            cr0,
            f0,
            gamma,
            stall_generations,
            max_generations,
            reinjection_count,
            seed,
            runs,
            training_points,
            sample_step,
            target
        );
        if let Some(t) = self.template {
            let _ = writeln!(out, "template = {}", template_name(t));
        }
        emit!(order, center);
        if let Some(o) = &self.offsets {
            let joined: Vec<String> = o.iter().map(i32::to_string).collect();
            let _ = writeln!(out, "offsets = {}", joined.join(","));
        }
        emit!(stage, k, starter, paper_budget, parallel);
        out
    }

    /// Fills every default for `family` and checks consistency.
    pub fn resolve(&self, family: Family) -> Result<Resolved> {
        let mut cfg = self.clone();
        let problem = match family {
            Family::Fd => {
                let kind = cfg.template.unwrap_or(TemplateChoice::Central);
                let template = match kind {
                    TemplateChoice::Central => StencilTemplate::central(
                        cfg.order.unwrap_or(2),
                        cfg.center.unwrap_or(true),
                    )?,
                    TemplateChoice::Forward => StencilTemplate::forward(cfg.order.unwrap_or(1))?,
                    TemplateChoice::Custom => {
                        let offsets = cfg.offsets.clone().ok_or_else(|| {
                            CliError::Config("custom template needs `offsets`".into())
                        })?;
                        StencilTemplate::custom(offsets)?
                    }
                };
                cfg.template = Some(kind);
                let target = training_target(&cfg)?;
                let n = *cfg.training_points.get_or_insert(800);
                Problem::Fd {
                    template,
                    target,
                    training_points: n,
                }
            }
            Family::Rk => {
                let (stage, order) = match (cfg.stage, cfg.order) {
                    (Some(s), Some(p)) => (s, p as usize),
                    (Some(s), None) => (s, max_order_for_stage(s)),
                    (None, Some(p)) => (
                        min_stage_for_order(p as usize)
                            .ok_or(evoscheme_core::Error::UnsupportedOrder(p as usize))?,
                        p as usize,
                    ),
                    (None, None) => {
                        return Err(CliError::Config(
                            "Runge-Kutta runs need `order` or `stage`".into(),
                        ))
                    }
                };
                check_admissible(stage, order)?;
                cfg.stage = Some(stage);
                cfg.order = Some(order as u32);
                Problem::Rk { stage, order }
            }
            Family::Ab => {
                let k = *cfg.k.get_or_insert(2);
                if k == 0 {
                    return Err(CliError::Config("k must be at least 1".into()));
                }
                let starter = resolve_starter(k, cfg.starter.as_deref())?;
                let target = training_target(&cfg)?;
                let n = *cfg.training_points.get_or_insert(6400);
                Problem::Ab {
                    k,
                    target,
                    training_points: n,
                    starter,
                }
            }
        };

        let (np, stall, max, runs) = match &problem {
            Problem::Fd { .. } | Problem::Ab { .. } => (150, 250, 2500, 10),
            Problem::Rk { order, .. } if *order < 5 => (350, 500, 5000, 100),
            Problem::Rk { .. } if cfg.paper_budget == Some(true) => (350, 10_000, 100_000, 100),
            Problem::Rk { .. } => (350, 2000, 20_000, 100),
        };
        let warning = match &problem {
            Problem::Rk { order: 5, .. } if cfg.paper_budget != Some(true) && cfg.max_generations.is_none() => {
                Some("order-5 runs use the desk budget (stall 2000, max 20000); pass --paper-budget for stall 10000, max 100000".to_string())
            }
            _ => None,
        };
        let defaults = DeSettings::default();
        let settings = DeSettings {
            population_size: *cfg.population_size.get_or_insert(np),
            cr0: *cfg.cr0.get_or_insert(defaults.cr0),
            f0: *cfg.f0.get_or_insert(defaults.f0),
            gamma: *cfg.gamma.get_or_insert(defaults.gamma),
            stall_generations: *cfg.stall_generations.get_or_insert(stall),
            max_generations: *cfg.max_generations.get_or_insert(max),
            reinjection_count: *cfg
                .reinjection_count
                .get_or_insert(defaults.reinjection_count),
            seed: *cfg.seed.get_or_insert(0),
        };
        settings.validate()?;
        let runs = *cfg.runs.get_or_insert(runs);
        if runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        let parallel = *cfg.parallel.get_or_insert(true);
        Ok(Resolved {
            family,
            settings,
            runs,
            parallel,
            problem,
            warning,
            config: cfg,
        })
    }
}

fn template_name(t: TemplateChoice) -> &'static str {
    match t {
        TemplateChoice::Central => "central",
        TemplateChoice::Forward => "forward",
        TemplateChoice::Custom => "custom",
    }
}

fn training_target(cfg: &RunConfig) -> Result<TargetFunctionPair> {
    let name = cfg.target.as_deref().unwrap_or("bell");
    let pair = match reference_by_name(name) {
        Some(Reference::Function(p)) => p,
        Some(Reference::Ivp(_)) => {
            return Err(CliError::Config(format!(
                "`{name}` is not a function pair and cannot be a training target"
            )))
        }
        None => return Err(CliError::Config(format!("unknown target `{name}`"))),
    };
    Ok(match cfg.sample_step {
        Some(h) if h > 0.0 && h.is_finite() => pair.with_step(h),
        Some(h) => {
            return Err(CliError::Config(format!(
                "sample_step must be positive, got {h}"
            )))
        }
        None => pair,
    })
}

/// What is being evolved.
#[derive(Debug, Clone)]
pub enum Problem {
    /// Stencil coefficients trained on a function pair.
    Fd {
        /// Offsets.
        template: StencilTemplate,
        /// Training pair.
        target: TargetFunctionPair,
        /// N.
        training_points: usize,
    },
    /// Tableau trained on order conditions.
    Rk {
        /// Stages.
        stage: usize,
        /// Target order.
        order: usize,
    },
    /// Multistep weights trained by integrating a function pair.
    Ab {
        /// Steps.
        k: usize,
        /// Training pair.
        target: TargetFunctionPair,
        /// N.
        training_points: usize,
        /// Start-up tableau.
        starter: Option<ButcherTableau>,
    },
}

impl Problem {
    /// Short deterministic label, used for output directory names.
    pub fn label(&self) -> String {
        match self {
            Problem::Fd { template, .. } => match template.kind() {
                evoscheme_core::scheme::TemplateKind::Central { order, with_center } => {
                    format!(
                        "fd-central{order}{}",
                        if *with_center { "" } else { "-nocenter" }
                    )
                }
                evoscheme_core::scheme::TemplateKind::Forward { order } => {
                    format!("fd-forward{order}")
                }
                evoscheme_core::scheme::TemplateKind::Custom(o) => {
                    let o: Vec<String> = o.iter().map(i32::to_string).collect();
                    format!("fd-custom{}", o.join("_"))
                }
            },
            Problem::Rk { stage, order } => format!("rk-s{stage}-p{order}"),
            Problem::Ab { k, .. } => format!("ab-k{k}"),
        }
    }

    /// Genome length.
    pub fn dimension(&self) -> usize {
        match self {
            Problem::Fd { template, .. } => template.len(),
            Problem::Rk { stage, .. } => evoscheme_core::scheme::genome_len(*stage),
            Problem::Ab { k, .. } => *k,
        }
    }
}

/// A configuration with every default applied.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// Family.
    pub family: Family,
    /// Engine settings; `seed` is the master seed.
    pub settings: DeSettings,
    /// Independent runs.
    pub runs: usize,
    /// Parallel evaluation.
    pub parallel: bool,
    /// The problem.
    pub problem: Problem,
    /// Budget notice for the user, if any.
    pub warning: Option<String>,
    /// The configuration with defaults filled in, for snapshots.
    pub config: RunConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = RunConfig::parse(
            "# comment\npopulation_size = 40\nseed=3 # inline\noffsets = -3,-1,1,3\n",
        )
        .unwrap();
        assert_eq!(file.population_size, Some(40));
        assert_eq!(file.offsets, Some(vec![-3, -1, 1, 3]));
        let flags = RunConfig {
            seed: Some(9),
            ..RunConfig::default()
        };
        let merged = file.overlay(&flags);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.population_size, Some(40));
        assert_eq!(RunConfig::parse(&merged.to_text()).unwrap(), merged);
    }

    #[test]
    fn line_numbers_in_errors() {
        let e = RunConfig::parse("seed = 1\n\npopulation_size = many\n").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = RunConfig::parse("colour = blue\n").unwrap_err();
        assert!(e.to_string().contains("unknown key"), "{e}");
    }

    #[test]
    fn table_defaults() {
        let r = RunConfig::default().resolve(Family::Fd).unwrap();
        assert_eq!(
            (
                r.settings.population_size,
                r.settings.stall_generations,
                r.settings.max_generations
            ),
            (150, 250, 2500)
        );
        assert_eq!(r.runs, 10);
        assert_eq!(r.problem.dimension(), 3);
        let r = RunConfig::default().resolve(Family::Ab).unwrap();
        assert!(matches!(
            r.problem,
            Problem::Ab {
                training_points: 6400,
                k: 2,
                ..
            }
        ));
        let rk = RunConfig {
            order: Some(3),
            ..RunConfig::default()
        };
        let r = rk.resolve(Family::Rk).unwrap();
        assert_eq!(
            (
                r.settings.population_size,
                r.settings.stall_generations,
                r.settings.max_generations
            ),
            (350, 500, 5000)
        );
        let five = RunConfig {
            order: Some(5),
            ..RunConfig::default()
        };
        let r = five.resolve(Family::Rk).unwrap();
        assert_eq!(
            (r.settings.stall_generations, r.settings.max_generations),
            (2000, 20_000)
        );
        assert!(r.warning.is_some());
        assert!(matches!(r.problem, Problem::Rk { stage: 6, order: 5 }));
        let full = RunConfig {
            paper_budget: Some(true),
            ..five
        };
        let r = full.resolve(Family::Rk).unwrap();
        assert_eq!(
            (r.settings.stall_generations, r.settings.max_generations),
            (10_000, 100_000)
        );
    }

    #[test]
    fn rejections() {
        let odd = RunConfig {
            order: Some(3),
            ..RunConfig::default()
        };
        assert!(odd.resolve(Family::Fd).is_err());
        let dup = RunConfig {
            template: Some(TemplateChoice::Custom),
            offsets: Some(vec![1, 1]),
            ..RunConfig::default()
        };
        assert!(dup.resolve(Family::Fd).is_err());
        let s5 = RunConfig {
            stage: Some(5),
            order: Some(5),
            ..RunConfig::default()
        };
        assert!(s5.resolve(Family::Rk).is_err());
        let ivp = RunConfig {
            target: Some("ivp".into()),
            ..RunConfig::default()
        };
        assert!(ivp.resolve(Family::Fd).is_err());
    }
}
