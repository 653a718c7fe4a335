//! Multi-run evolution and the best-of report.

use std::time::Instant;

use evoscheme_core::catalog;
use evoscheme_core::de::{
    self, DeSettings, Fitness, PopulationEvaluator, RunRecord, Serial, TerminationReason,
};
use evoscheme_core::fitness::{
    coefficient_error_sum, AbFitness, FdFitness, RkFitness, TrainingSet,
};
use evoscheme_core::{ButcherTableau, MultistepScheme};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Problem, Resolved};
use crate::error::{CliError, Result};
use crate::files::SchemeFile;

/// Evaluates a population on the rayon pool. Results come back in input
/// order, so runs stay bit-identical to serial ones.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl PopulationEvaluator for Parallel {
    fn evaluate_all(&self, fitness: &dyn Fitness, genomes: &[&[f64]]) -> Vec<f64> {
        genomes
            .par_iter()
            .with_min_len(8)
            .map(|g| fitness.evaluate(g))
            .collect()
    }
}

/// A fitness evaluator for one run, with its unlogged error.
pub enum ProblemFitness {
    /// Stencil training.
    Fd(FdFitness),
    /// Order conditions.
    Rk(RkFitness),
    /// Multistep training.
    Ab(AbFitness),
}

impl ProblemFitness {
    /// Builds a fresh evaluator (and point counter) for `problem`.
    pub fn new(problem: &Problem) -> Result<Self> {
        Ok(match problem {
            Problem::Fd {
                template,
                target,
                training_points,
            } => {
                let training = TrainingSet::for_stencil(target, template, *training_points)?;
                ProblemFitness::Fd(FdFitness::new(template, target, &training))
            }
            Problem::Rk { stage, order } => ProblemFitness::Rk(RkFitness::new(*stage, *order)?),
            Problem::Ab {
                k,
                target,
                training_points,
                starter,
            } => ProblemFitness::Ab(AbFitness::new(
                *k,
                target,
                *training_points,
                starter.as_ref(),
            )?),
        })
    }

    /// The evaluator as a trait object.
    pub fn as_fitness(&self) -> &dyn Fitness {
        match self {
            ProblemFitness::Fd(f) => f,
            ProblemFitness::Rk(f) => f,
            ProblemFitness::Ab(f) => f,
        }
    }

    /// Training error before the logarithm.
    pub fn error_sum(&self, genome: &[f64]) -> f64 {
        match self {
            ProblemFitness::Fd(f) => f.error_sum(genome),
            ProblemFitness::Rk(f) => f.residual_sum(genome),
            ProblemFitness::Ab(f) => f.error_sum(genome),
        }
    }
}

/// Known closed-form solutions for a problem, with display names.
pub fn theory_rows(problem: &Problem) -> Vec<(String, Vec<f64>)> {
    match problem {
        Problem::Fd { template, .. } => catalog::theory_for_template(template)
            .into_iter()
            .enumerate()
            .map(|(i, s)| (format!("theory-{}", i + 1), s.coefficients().to_vec()))
            .collect(),
        Problem::Rk { .. } => Vec::new(),
        Problem::Ab { k, .. } => catalog::adams_bashforth(*k)
            .map(|s| vec![("theory".to_string(), s.betas().to_vec())])
            .unwrap_or_default(),
    }
}

/// Index and distance of the theory row nearest to `genome`.
pub fn nearest_theory(rows: &[(String, Vec<f64>)], genome: &[f64]) -> Option<(usize, f64)> {
    rows.iter()
        .enumerate()
        .map(|(i, (_, c))| (i, coefficient_error_sum(genome, c)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Runs one seeded evolution, filling in the wall time.
pub fn timed_run(
    settings: &DeSettings,
    fitness: &ProblemFitness,
    dimension: usize,
    parallel: bool,
) -> Result<RunRecord> {
    let start = Instant::now();
    let evaluator: &dyn PopulationEvaluator = if parallel { &Parallel } else { &Serial };
    let mut record = de::run_with(settings, dimension, fitness.as_fitness(), evaluator, None)?;
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(record)
}

/// One line of the per-run table.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    /// Run index `j`.
    pub run: usize,
    /// `master + j`.
    pub seed: u64,
    /// Final best fitness.
    pub fitness: f64,
    /// Final training error (residual sum for tableaus).
    pub error_sum: f64,
    /// Distance to the nearest theory row.
    pub coefficient_error: Option<f64>,
    /// Generations executed.
    pub generations_run: usize,
    /// Why it stopped.
    pub termination_reason: TerminationReason,
    /// Target-function point evaluations.
    pub point_evaluations: u64,
}

/// Five-number summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    /// Smallest value.
    pub min: f64,
    /// First quartile.
    pub q1: f64,
    /// Median.
    pub median: f64,
    /// Third quartile.
    pub q3: f64,
    /// Largest value.
    pub max: f64,
}

impl Stats {
    /// Quartiles by linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            if lo == hi {
                v[lo]
            } else {
                v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
            }
        };
        Some(Stats {
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Summary of R runs of one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BestOfReport {
    /// Problem label.
    pub label: String,
    /// Per-run results, in run order.
    pub runs: Vec<RunSummary>,
    /// Run with the lowest fitness (first on ties).
    pub winner_run: usize,
    /// Its fitness; the minimum over `runs`.
    pub winner_fitness: f64,
    /// Its genome.
    pub winner_genome: Vec<f64>,
    /// Its training error.
    pub winner_error_sum: f64,
    /// Name of the nearest theory row.
    pub nearest_theory: Option<String>,
    /// Distance to that row.
    pub winner_coefficient_error: Option<f64>,
    /// Spread of final fitness.
    pub fitness_stats: Stats,
    /// Spread of training error.
    pub error_stats: Stats,
    /// Spread of coefficient error, when theory exists.
    pub coefficient_error_stats: Option<Stats>,
}

impl BestOfReport {
    /// Coefficient error when theory exists, otherwise training error.
    pub fn winner_score(&self) -> f64 {
        self.winner_coefficient_error
            .unwrap_or(self.winner_error_sum)
    }
}

/// Everything an evolve command produces.
#[derive(Debug, Clone)]
pub struct Evolution {
    /// Inputs.
    pub resolved: Resolved,
    /// One record per run.
    pub records: Vec<RunRecord>,
    /// Summary.
    pub report: BestOfReport,
    /// Theory rows used for comparison.
    pub theory: Vec<(String, Vec<f64>)>,
}

impl Evolution {
    /// The winning scheme in file form.
    pub fn winner_scheme(&self) -> Result<SchemeFile> {
        let g = &self.report.winner_genome;
        Ok(match &self.resolved.problem {
            Problem::Fd { template, .. } => SchemeFile::Stencil(template.scheme(g)?),
            Problem::Rk { stage, .. } => SchemeFile::Tableau(ButcherTableau::decode(g, *stage)?),
            Problem::Ab { .. } => SchemeFile::Multistep {
                betas: MultistepScheme::new(g.clone())?.betas().to_vec(),
                starter: self.resolved.config.starter.clone(),
            },
        })
    }

    /// True when no run reached a finite fitness.
    pub fn all_diverged(&self) -> bool {
        self.report.runs.iter().all(|r| !r.fitness.is_finite())
    }
}

/// Runs `resolved.runs` independent evolutions; run `j` is seeded with
/// `master + j`.
pub fn evolve(resolved: &Resolved) -> Result<Evolution> {
    let dimension = resolved.problem.dimension();
    let one = |j: usize| -> Result<(RunRecord, f64)> {
        let settings = DeSettings {
            seed: resolved.settings.seed.wrapping_add(j as u64),
            ..resolved.settings.clone()
        };
        let fitness = ProblemFitness::new(&resolved.problem)?;
        let record = timed_run(&settings, &fitness, dimension, resolved.parallel)?;
        let err = fitness.error_sum(&record.final_best.genome);
        Ok((record, err))
    };
    let results: Vec<Result<(RunRecord, f64)>> = if resolved.parallel {
        (0..resolved.runs).into_par_iter().map(one).collect()
    } else {
        (0..resolved.runs).map(one).collect()
    };
    let mut records = Vec::with_capacity(resolved.runs);
    let mut errors = Vec::with_capacity(resolved.runs);
    for r in results {
        let (rec, e) = r?;
        records.push(rec);
        errors.push(e);
    }

    let theory = theory_rows(&resolved.problem);
    let runs: Vec<RunSummary> = records
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(j, (rec, &error_sum))| RunSummary {
            run: j,
            seed: rec.settings.seed,
            fitness: rec.best_fitness(),
            error_sum,
            coefficient_error: nearest_theory(&theory, &rec.final_best.genome).map(|(_, d)| d),
            generations_run: rec.generations_run,
            termination_reason: rec.termination_reason,
            point_evaluations: rec.point_evaluations(),
        })
        .collect();
    let winner = runs.iter().fold(0, |best, r| {
        if r.fitness < runs[best].fitness {
            r.run
        } else {
            best
        }
    });
    let genome = records[winner].final_best.genome.clone();
    let nearest = nearest_theory(&theory, &genome);
    let fitness: Vec<f64> = runs.iter().map(|r| r.fitness).collect();
    let coef: Vec<f64> = runs.iter().filter_map(|r| r.coefficient_error).collect();
    let report = BestOfReport {
        label: resolved.problem.label(),
        winner_run: winner,
        winner_fitness: runs[winner].fitness,
        winner_error_sum: runs[winner].error_sum,
        winner_genome: genome,
        nearest_theory: nearest.map(|(i, _)| theory[i].0.clone()),
        winner_coefficient_error: nearest.map(|(_, d)| d),
        fitness_stats: Stats::of(&fitness).expect("at least one run"),
        error_stats: Stats::of(&errors).expect("at least one run"),
        coefficient_error_stats: Stats::of(&coef),
        runs,
    };
    Ok(Evolution {
        resolved: resolved.clone(),
        records,
        report,
        theory,
    })
}

/// Fails with [`CliError::AllDiverged`] when no run produced a finite fitness.
pub fn check_divergence(evo: &Evolution) -> Result<()> {
    if evo.all_diverged() {
        return Err(CliError::AllDiverged(evo.report.runs.len()));
    }
    Ok(())
}
