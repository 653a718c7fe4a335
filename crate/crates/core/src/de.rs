//! Self-adaptive DE/rand/1/bin.
//!
//! Every individual carries its own crossover rate `cr` and scale factor
//! `f`. After each generation the means of the pairs that produced
//! successful trials become the new centres, and every individual redraws
//! its pair from a Cauchy distribution (half-width [`DeSettings::gamma`])
//! around them, truncated to `cr ∈ [0, 1]`, `f ∈ [0.1, 1]`. A few random
//! non-best individuals are replaced by fresh ones every generation.
//!
//! Randomness comes from one ChaCha8 stream per run seeded with
//! [`DeSettings::seed`]. All draws happen in the serial part of a
//! generation, so evaluating a batch in parallel cannot change a run.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math::tan;
use crate::{Error, Result};

/// The engine's random number generator.
pub type DeRng = ChaCha8Rng;

/// Creates the generator for a run seed.
pub fn rng_from_seed(seed: u64) -> DeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lower truncation bound of the scale factor.
pub const F_MIN: f64 = 0.1;
/// Upper truncation bound of the scale factor.
pub const F_MAX: f64 = 1.0;

/// Something to minimize.
pub trait Fitness: Sync {
    /// Fitness of `genome`; lower is better. NaN is treated as `+∞`.
    fn evaluate(&self, genome: &[f64]) -> f64;

    /// Total target-function point evaluations so far, if the evaluator
    /// keeps count.
    fn point_evaluations(&self) -> u64 {
        0
    }
}

/// Adapts a closure into a [`Fitness`].
pub struct FnFitness<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> Fitness for FnFitness<F> {
    fn evaluate(&self, genome: &[f64]) -> f64 {
        (self.0)(genome)
    }
}

impl<T: Fitness + ?Sized> Fitness for &T {
    fn evaluate(&self, genome: &[f64]) -> f64 {
        (**self).evaluate(genome)
    }

    fn point_evaluations(&self) -> u64 {
        (**self).point_evaluations()
    }
}

/// Evaluates a batch of genomes. Implementations may work in parallel but
/// must return results in input order.
pub trait PopulationEvaluator {
    /// One fitness per genome.
    fn evaluate_all(&self, fitness: &dyn Fitness, genomes: &[&[f64]]) -> Vec<f64>;
}

/// Evaluates one genome after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl PopulationEvaluator for Serial {
    fn evaluate_all(&self, fitness: &dyn Fitness, genomes: &[&[f64]]) -> Vec<f64> {
        genomes.iter().map(|g| fitness.evaluate(g)).collect()
    }
}

/// Maps NaN to `+∞` so diverging candidates lose every comparison.
#[inline]
pub fn sanitize(fitness: f64) -> f64 {
    if fitness.is_nan() {
        f64::INFINITY
    } else {
        fitness
    }
}

/// Engine configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeSettings {
    /// Population size NP (≥ 4).
    pub population_size: usize,
    /// Initial crossover rate of every individual.
    pub cr0: f64,
    /// Initial scale factor of every individual.
    pub f0: f64,
    /// Cauchy half-width used for both control parameters.
    pub gamma: f64,
    /// Stop after this many consecutive generations without a strict
    /// improvement of the best fitness.
    pub stall_generations: usize,
    /// Hard generation limit.
    pub max_generations: usize,
    /// Non-best individuals replaced by fresh ones each generation.
    pub reinjection_count: usize,
    /// Seed of the run's random stream.
    pub seed: u64,
}

impl Default for DeSettings {
    fn default() -> Self {
        DeSettings {
            population_size: 150,
            cr0: 0.25,
            f0: 0.6,
            gamma: 0.1,
            stall_generations: 250,
            max_generations: 2500,
            reinjection_count: 5,
            seed: 0,
        }
    }
}

impl DeSettings {
    /// Checks every documented constraint.
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::PopulationTooSmall(self.population_size));
        }
        if self.max_generations == 0 {
            return Err(Error::InvalidSettings(
                "max_generations must be positive".into(),
            ));
        }
        if self.stall_generations == 0 {
            return Err(Error::InvalidSettings(
                "stall_generations must be positive".into(),
            ));
        }
        if self.stall_generations > self.max_generations {
            return Err(Error::InvalidSettings(alloc::format!(
                "stall_generations ({}) exceeds max_generations ({})",
                self.stall_generations,
                self.max_generations
            )));
        }
        if self.reinjection_count >= self.population_size {
            return Err(Error::ReinjectionTooLarge {
                count: self.reinjection_count,
                population: self.population_size,
            });
        }
        if !(0.0..=1.0).contains(&self.cr0) {
            return Err(Error::InvalidSettings("cr0 must lie in [0, 1]".into()));
        }
        if !(F_MIN..=F_MAX).contains(&self.f0) {
            return Err(Error::InvalidSettings("f0 must lie in [0.1, 1]".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidSettings("gamma must be positive".into()));
        }
        Ok(())
    }
}

/// A candidate coefficient vector with its own control parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    /// Coefficients.
    pub genome: Vec<f64>,
    /// Crossover rate.
    pub cr: f64,
    /// Scale factor.
    pub f: f64,
    /// `None` until evaluated.
    #[serde(with = "opt_fitness")]
    pub fitness: Option<f64>,
}

/// Current centres of the control-parameter distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlAverages {
    /// Mean crossover rate.
    pub cr: f64,
    /// Mean scale factor.
    pub f: f64,
}

/// Draws `NP` individuals with genome entries uniform in `[-1, 1]` and the
/// initial control parameters.
pub fn initialize_population<R: Rng + ?Sized>(
    settings: &DeSettings,
    dimension: usize,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    if settings.population_size < 4 {
        return Err(Error::PopulationTooSmall(settings.population_size));
    }
    if dimension == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok((0..settings.population_size)
        .map(|_| Individual {
            genome: random_genome(dimension, rng),
            cr: settings.cr0,
            f: settings.f0,
            fitness: None,
        })
        .collect())
}

fn random_genome<R: Rng + ?Sized>(dimension: usize, rng: &mut R) -> Vec<f64> {
    (0..dimension)
        .map(|_| -1.0 + rng.gen::<f64>() * 2.0)
        .collect()
}

/// Three indices distinct from each other and from `target`.
pub fn pick_donors<R: Rng + ?Sized>(target: usize, population: usize, rng: &mut R) -> [usize; 3] {
    assert!(population >= 4, "mutation needs at least 4 individuals");
    let mut picked = [usize::MAX; 3];
    for slot in 0..3 {
        picked[slot] = loop {
            let r = rng.gen_range(0..population);
            if r != target && !picked[..slot].contains(&r) {
                break r;
            }
        };
    }
    picked
}

/// `base + f·(plus − minus)`.
pub fn mutant_from(base: &[f64], plus: &[f64], minus: &[f64], f: f64) -> Vec<f64> {
    base.iter()
        .zip(plus.iter().zip(minus))
        .map(|(b, (p, m))| b + f * (p - m))
        .collect()
}

/// DE/rand/1 mutation for individual `target_index`.
pub fn mutate<R: Rng + ?Sized>(
    target_index: usize,
    population: &[Individual],
    f: f64,
    rng: &mut R,
) -> Vec<f64> {
    let [r1, r2, r3] = pick_donors(target_index, population.len(), rng);
    mutant_from(
        &population[r1].genome,
        &population[r2].genome,
        &population[r3].genome,
        f,
    )
}

/// Binomial crossover. Entry `j` comes from the mutant when a uniform draw
/// is `≤ cr`, and always for one randomly chosen index.
pub fn crossover<R: Rng + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if target.len() != mutant.len() {
        return Err(Error::LengthMismatch {
            expected: target.len(),
            actual: mutant.len(),
        });
    }
    if target.is_empty() {
        return Err(Error::ZeroDimension);
    }
    let j_rand = rng.gen_range(0..target.len());
    Ok(target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&x, &v))| {
            let draw: f64 = rng.gen();
            if draw <= cr || j == j_rand {
                v
            } else {
                x
            }
        })
        .collect())
}

/// Greedy selection; ties go to the trial. The survivor keeps the target's
/// control parameters, which are the ones that produced the trial.
pub fn select(
    target: &Individual,
    trial_genome: Vec<f64>,
    trial_fitness: f64,
) -> (Individual, bool) {
    let trial_fitness = sanitize(trial_fitness);
    let current = target.fitness.map_or(f64::INFINITY, sanitize);
    if trial_fitness <= current {
        (
            Individual {
                genome: trial_genome,
                cr: target.cr,
                f: target.f,
                fitness: Some(trial_fitness),
            },
            true,
        )
    } else {
        (target.clone(), false)
    }
}

/// Draws from `Cauchy(location, gamma)` by inverting the CDF.
pub fn cauchy<R: Rng + ?Sized>(location: f64, gamma: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    location + gamma * tan(PI * (u - 0.5))
}

/// Control-parameter update after a generation.
///
/// When any selection succeeded the centres become the means of the
/// successful pairs; otherwise they stay. Each individual then draws
/// `f` and `cr` (in that order) around the centres and truncates them.
pub fn adapt_control_parameters<R: Rng + ?Sized>(
    successful_cr: &[f64],
    successful_f: &[f64],
    previous: ControlAverages,
    gamma: f64,
    population: &mut [Individual],
    rng: &mut R,
) -> ControlAverages {
    let mut averages = previous;
    if !successful_f.is_empty() {
        averages.f = mean(successful_f);
    }
    if !successful_cr.is_empty() {
        averages.cr = mean(successful_cr);
    }
    for ind in population.iter_mut() {
        ind.f = cauchy(averages.f, gamma, rng).clamp(F_MIN, F_MAX);
        ind.cr = cauchy(averages.cr, gamma, rng).clamp(0.0, 1.0);
    }
    averages
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Replaces `count` distinct individuals other than `best` by fresh random
/// ones carrying the current control-parameter centres. Their fitness is
/// cleared.
pub fn reinject<R: Rng + ?Sized>(
    population: &mut [Individual],
    count: usize,
    best: usize,
    averages: ControlAverages,
    rng: &mut R,
) -> Result<()> {
    let np = population.len();
    if count >= np {
        return Err(Error::ReinjectionTooLarge {
            count,
            population: np,
        });
    }
    if count == 0 {
        return Ok(());
    }
    let dimension = population[0].genome.len();
    let mut candidates: Vec<usize> = (0..np).filter(|&i| i != best).collect();
    // partial Fisher-Yates
    for n in 0..count {
        let pick = rng.gen_range(n..candidates.len());
        candidates.swap(n, pick);
        let q = candidates[n];
        population[q] = Individual {
            genome: random_genome(dimension, rng),
            cr: averages.cr,
            f: averages.f,
            fitness: None,
        };
    }
    Ok(())
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// No strict improvement for `stall_generations` generations.
    Stalled,
    /// `max_generations` reached.
    MaxGenerations,
}

/// End-of-generation snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// Generation number, starting at 1.
    pub generation: usize,
    /// Best fitness in the population.
    #[serde(with = "fitness_value")]
    pub best_fitness: f64,
    /// Crossover-rate centre after adaptation.
    pub cr_avg: f64,
    /// Scale-factor centre after adaptation.
    pub f_avg: f64,
    /// Cumulative target-function point evaluations.
    pub point_evaluations: u64,
}

/// Everything about one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Settings used, seed included.
    pub settings: DeSettings,
    /// Problem dimension.
    pub dimension: usize,
    /// One entry per generation.
    pub trace: Vec<GenerationStats>,
    /// Best individual at the end.
    pub final_best: Individual,
    /// Generations executed.
    pub generations_run: usize,
    /// Why the run stopped.
    pub termination_reason: TerminationReason,
    /// Fitness evaluations performed.
    pub evaluations: u64,
    /// Wall-clock seconds. The engine itself leaves this at zero; timed
    /// front ends fill it in.
    pub wall_time: f64,
}

impl RunRecord {
    /// `(generation, best fitness)` pairs.
    pub fn best_per_generation(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.trace.iter().map(|g| (g.generation, g.best_fitness))
    }

    /// Final best fitness (`+∞` if never finite).
    pub fn best_fitness(&self) -> f64 {
        self.final_best.fitness.unwrap_or(f64::INFINITY)
    }

    /// Total point evaluations.
    pub fn point_evaluations(&self) -> u64 {
        self.trace.last().map_or(0, |g| g.point_evaluations)
    }
}

/// Read-only view handed to a run observer after every generation.
pub struct GenerationView<'a> {
    /// Generation just completed.
    pub generation: usize,
    /// Population after reinjection.
    pub population: &'a [Individual],
    /// Control-parameter centres.
    pub averages: ControlAverages,
    /// Index of the best individual.
    pub best_index: usize,
}

/// Runs the optimizer serially.
pub fn run<F: Fitness + ?Sized>(
    settings: &DeSettings,
    dimension: usize,
    fitness: &F,
) -> Result<RunRecord> {
    run_with(settings, dimension, &fitness, &Serial, None)
}

/// Runs the optimizer with a custom batch evaluator and an optional
/// per-generation observer.
pub fn run_with(
    settings: &DeSettings,
    dimension: usize,
    fitness: &dyn Fitness,
    evaluator: &dyn PopulationEvaluator,
    mut observer: Option<&mut dyn FnMut(&GenerationView<'_>)>,
) -> Result<RunRecord> {
    settings.validate()?;
    if dimension == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut rng = rng_from_seed(settings.seed);
    let mut population = initialize_population(settings, dimension, &mut rng)?;
    let mut averages = ControlAverages {
        cr: settings.cr0,
        f: settings.f0,
    };
    let points_at_start = fitness.point_evaluations();
    let mut evaluations = 0u64;
    let mut trace = Vec::new();
    let mut best_so_far: Option<f64> = None;
    let mut stall = 0usize;
    let mut reason = TerminationReason::MaxGenerations;
    let mut best_index = 0;
    let np = population.len();

    for generation in 1..=settings.max_generations {
        // Evaluate individuals without a cached fitness.
        let pending: Vec<usize> = (0..np)
            .filter(|&i| population[i].fitness.is_none())
            .collect();
        if !pending.is_empty() {
            let genomes: Vec<&[f64]> = pending
                .iter()
                .map(|&i| population[i].genome.as_slice())
                .collect();
            let values = evaluator.evaluate_all(fitness, &genomes);
            evaluations += values.len() as u64;
            for (&i, v) in pending.iter().zip(values) {
                population[i].fitness = Some(sanitize(v));
            }
        }

        // Trials are built from the population as it stood at the end of
        // the previous generation.
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let mutant = mutate(i, &population, population[i].f, &mut rng);
                crossover(&population[i].genome, &mutant, population[i].cr, &mut rng)
                    .expect("mutant and target share the dimension")
            })
            .collect();
        let trial_fitness = {
            let genomes: Vec<&[f64]> = trials.iter().map(Vec::as_slice).collect();
            evaluator.evaluate_all(fitness, &genomes)
        };
        evaluations += trial_fitness.len() as u64;

        let mut successful_cr = Vec::new();
        let mut successful_f = Vec::new();
        for (i, (trial, tf)) in trials.into_iter().zip(trial_fitness).enumerate() {
            let (survivor, success) = select(&population[i], trial, tf);
            if success {
                successful_cr.push(population[i].cr);
                successful_f.push(population[i].f);
            }
            population[i] = survivor;
        }

        averages = adapt_control_parameters(
            &successful_cr,
            &successful_f,
            averages,
            settings.gamma,
            &mut population,
            &mut rng,
        );

        best_index = argmin(&population);
        reinject(
            &mut population,
            settings.reinjection_count,
            best_index,
            averages,
            &mut rng,
        )?;

        let best = population[best_index].fitness.unwrap_or(f64::INFINITY);
        trace.push(GenerationStats {
            generation,
            best_fitness: best,
            cr_avg: averages.cr,
            f_avg: averages.f,
            point_evaluations: fitness.point_evaluations() - points_at_start,
        });
        if let Some(obs) = observer.as_mut() {
            obs(&GenerationView {
                generation,
                population: &population,
                averages,
                best_index,
            });
        }

        match best_so_far {
            Some(prev) if best >= prev => stall += 1,
            _ => {
                best_so_far = Some(best);
                stall = 0;
            }
        }
        if stall >= settings.stall_generations {
            reason = TerminationReason::Stalled;
            break;
        }
    }

    Ok(RunRecord {
        settings: settings.clone(),
        dimension,
        generations_run: trace.len(),
        trace,
        final_best: population[best_index].clone(),
        termination_reason: reason,
        evaluations,
        wall_time: 0.0,
    })
}

/// Index of the lowest evaluated fitness; the first one wins ties.
fn argmin(population: &[Individual]) -> usize {
    let mut best = 0;
    let mut best_value = f64::INFINITY;
    for (i, ind) in population.iter().enumerate() {
        if let Some(v) = ind.fitness {
            if v < best_value {
                best = i;
                best_value = v;
            }
        }
    }
    best
}

/// Fitness values may be `+∞`, which JSON cannot carry; it is written as
/// `null` and read back as `+∞`.
mod fitness_value {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

mod opt_fitness {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Value(f64),
        Text(alloc::string::String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if x.is_finite() => s.serialize_some(x),
            Some(_) => s.serialize_some("inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(match Option::<Repr>::deserialize(d)? {
            None => None,
            Some(Repr::Value(x)) => Some(x),
            Some(Repr::Text(_)) => Some(f64::INFINITY),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ind(genome: Vec<f64>, fitness: Option<f64>) -> Individual {
        Individual {
            genome,
            cr: 0.25,
            f: 0.6,
            fitness,
        }
    }

    #[test]
    fn initialization() {
        let s = DeSettings {
            population_size: 4,
            reinjection_count: 0,
            ..Default::default()
        };
        let pop = initialize_population(&s, 2, &mut rng_from_seed(7)).unwrap();
        assert_eq!(pop.len(), 4);
        for i in &pop {
            assert!(i.genome.iter().all(|x| (-1.0..=1.0).contains(x)));
            assert_eq!((i.cr, i.f, i.fitness), (0.25, 0.6, None));
        }
        let a = initialize_population(&s, 1, &mut rng_from_seed(3)).unwrap();
        let b = initialize_population(&s, 1, &mut rng_from_seed(3)).unwrap();
        assert_eq!(a, b);

        let small = DeSettings {
            population_size: 3,
            ..s
        };
        assert_eq!(
            initialize_population(&small, 2, &mut rng_from_seed(0)),
            Err(Error::PopulationTooSmall(3))
        );
    }

    #[test]
    fn mutation_formula() {
        let v = mutant_from(&[1.0, 0.0], &[2.0, 2.0], &[1.0, 1.0], 0.6);
        assert!((v[0] - 1.6).abs() < 1e-15 && (v[1] - 0.6).abs() < 1e-15);
        assert_eq!(
            mutant_from(&[0.3, -0.2], &[0.5, 0.5], &[0.5, 0.5], 0.9),
            vec![0.3, -0.2]
        );
        let v = mutant_from(&[0.0], &[1.0], &[-1.0], 0.1);
        assert!((v[0] - 0.2).abs() < 1e-16);
    }

    #[test]
    fn donors_distinct() {
        let mut rng = rng_from_seed(11);
        for t in 0..4 {
            for _ in 0..200 {
                let [a, b, c] = pick_donors(t, 4, &mut rng);
                let mut all = [a, b, c, t];
                all.sort_unstable();
                assert_eq!(all, [0, 1, 2, 3]);
            }
        }
    }

    #[test]
    fn crossover_rules() {
        let mut rng = rng_from_seed(5);
        let t = [1.0, 2.0, 3.0];
        let m = [-1.0, -2.0, -3.0];
        assert_eq!(crossover(&t, &m, 1.0, &mut rng).unwrap(), m.to_vec());
        for _ in 0..50 {
            let u = crossover(&t, &m, 0.0, &mut rng).unwrap();
            assert_eq!(u.iter().zip(&t).filter(|(a, b)| a != b).count(), 1);
        }
        assert_eq!(crossover(&t, &t, 0.5, &mut rng).unwrap(), t.to_vec());
        assert!(crossover(&t, &m[..2], 0.5, &mut rng).is_err());
    }

    #[test]
    fn selection_rules() {
        let target = ind(vec![0.0], Some(1.0));
        let (s, ok) = select(&target, vec![1.0], 0.5);
        assert!(ok);
        assert_eq!(s.genome, vec![1.0]);
        let (s, ok) = select(&target, vec![2.0], 1.0);
        assert!(ok, "ties favour the trial");
        assert_eq!(s.genome, vec![2.0]);
        let (s, ok) = select(&target, vec![3.0], 2.0);
        assert!(!ok);
        assert_eq!(s, target);
        let (_, ok) = select(&target, vec![3.0], f64::NAN);
        assert!(!ok);
    }

    #[test]
    fn adaptation_uses_successful_means() {
        let mut rng = rng_from_seed(1);
        let mut pop = vec![ind(vec![0.0], Some(0.0)); 6];
        let prev = ControlAverages { cr: 0.25, f: 0.6 };
        let avg = adapt_control_parameters(&[0.2, 0.4], &[0.5, 0.7], prev, 0.1, &mut pop, &mut rng);
        assert!((avg.f - 0.6).abs() < 1e-15);
        assert!((avg.cr - 0.3).abs() < 1e-15);
        let kept = adapt_control_parameters(&[], &[], avg, 0.1, &mut pop, &mut rng);
        assert_eq!(kept, avg);
        for i in &pop {
            assert!((0.0..=1.0).contains(&i.cr));
            assert!((F_MIN..=F_MAX).contains(&i.f));
        }
    }

    #[test]
    fn truncation_of_wild_draws() {
        assert_eq!(3.2f64.clamp(F_MIN, F_MAX), 1.0);
        // A huge half-width makes most draws land outside the bounds.
        let mut rng = rng_from_seed(9);
        let mut pop = vec![ind(vec![0.0], Some(0.0)); 64];
        adapt_control_parameters(
            &[],
            &[],
            ControlAverages { cr: 0.5, f: 0.5 },
            1e6,
            &mut pop,
            &mut rng,
        );
        assert!(pop
            .iter()
            .all(|i| (F_MIN..=F_MAX).contains(&i.f) && (0.0..=1.0).contains(&i.cr)));
        assert!(pop.iter().any(|i| i.f == F_MAX) && pop.iter().any(|i| i.f == F_MIN));
    }

    #[test]
    fn reinjection() {
        let mut rng = rng_from_seed(2);
        let base: Vec<Individual> = (0..150)
            .map(|i| ind(vec![10.0 + i as f64; 3], Some(i as f64)))
            .collect();
        let avg = ControlAverages { cr: 0.4, f: 0.7 };

        let mut pop = base.clone();
        reinject(&mut pop, 5, 0, avg, &mut rng).unwrap();
        let changed: Vec<usize> = (0..150).filter(|&i| pop[i] != base[i]).collect();
        assert_eq!(changed.len(), 5);
        assert!(!changed.contains(&0));
        for &i in &changed {
            assert_eq!(pop[i].fitness, None);
            assert_eq!((pop[i].cr, pop[i].f), (0.4, 0.7));
            assert!(pop[i].genome.iter().all(|x| (-1.0..=1.0).contains(x)));
        }

        let mut pop = base.clone();
        reinject(&mut pop, 0, 0, avg, &mut rng).unwrap();
        assert_eq!(pop, base);

        let mut pop = base[..6].to_vec();
        reinject(&mut pop, 5, 3, avg, &mut rng).unwrap();
        assert_eq!(pop[3], base[3]);
        assert!((0..6).filter(|&i| i != 3).all(|i| pop[i].fitness.is_none()));

        assert!(reinject(&mut pop, 6, 0, avg, &mut rng).is_err());
    }

    #[test]
    fn constant_fitness_stalls() {
        let s = DeSettings {
            population_size: 10,
            stall_generations: 7,
            max_generations: 100,
            ..Default::default()
        };
        let rec = run(&s, 3, &FnFitness(|_: &[f64]| 1.0)).unwrap();
        assert_eq!(rec.termination_reason, TerminationReason::Stalled);
        assert_eq!(rec.generations_run, 8);
    }

    #[test]
    fn single_generation() {
        let s = DeSettings {
            population_size: 10,
            stall_generations: 1,
            max_generations: 1,
            ..Default::default()
        };
        let rec = run(&s, 2, &FnFitness(|g: &[f64]| g.iter().map(|x| x * x).sum())).unwrap();
        assert_eq!(rec.generations_run, 1);
        assert_eq!(rec.termination_reason, TerminationReason::MaxGenerations);
    }

    #[test]
    fn nan_fitness_loses() {
        let s = DeSettings {
            population_size: 8,
            stall_generations: 20,
            max_generations: 40,
            reinjection_count: 2,
            ..Default::default()
        };
        let rec = run(
            &s,
            1,
            &FnFitness(|g: &[f64]| if g[0] > 0.0 { f64::NAN } else { -g[0] }),
        )
        .unwrap();
        assert!(rec.best_fitness().is_finite());
        assert!(rec.final_best.genome[0] <= 0.0);
    }

    #[test]
    fn settings_validation() {
        assert!(DeSettings::default().validate().is_ok());
        let bad = DeSettings {
            stall_generations: 10,
            max_generations: 5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = DeSettings {
            population_size: 5,
            ..Default::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(Error::ReinjectionTooLarge { .. })
        ));
    }
}
