//! Fitness evaluators and the built-in target functions.
//!
//! All three evaluators return `log₁₀` of a non-negative error sum, with the
//! sum clamped below at [`ERROR_FLOOR`] so a perfect candidate still has a
//! finite fitness. Non-finite sums map to `+∞`.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::conditions::{check_admissible, condition_set, ConditionSet};
use crate::de::Fitness;
use crate::math::{abs, exp, log10};
use crate::scheme::{genome_len, ButcherTableau, StencilTemplate};
use crate::{Error, Result};

/// Lower clamp applied to error sums before taking the logarithm.
pub const ERROR_FLOOR: f64 = 1e-300;

/// `log₁₀(max(sum, ERROR_FLOOR))`, or `+∞` for a non-finite sum.
pub fn log_error(sum: f64) -> f64 {
    if sum.is_finite() {
        log10(sum.max(ERROR_FLOOR))
    } else {
        f64::INFINITY
    }
}

/// An analytic function with its exact derivative, a domain and a sampling
/// step.
#[derive(Debug, Clone, Copy)]
pub struct TargetFunctionPair {
    /// Catalog name.
    pub name: &'static str,
    /// The function.
    pub f: fn(f64) -> f64,
    /// Its derivative.
    pub f_prime: fn(f64) -> f64,
    /// Closed interval `[lo, hi]`.
    pub domain: (f64, f64),
    /// Sampling step `h`.
    pub sample_step: f64,
}

impl TargetFunctionPair {
    /// Same pair with a different sampling step.
    pub fn with_step(mut self, h: f64) -> Self {
        self.sample_step = h;
        self
    }
}

/// Scalar initial value problem with a closed-form solution.
#[derive(Debug, Clone, Copy)]
pub struct InitialValueProblem {
    /// Catalog name.
    pub name: &'static str,
    /// Right-hand side `f(t, y)`.
    pub rhs: fn(f64, f64) -> f64,
    /// Exact solution `y(t)`.
    pub solution: fn(f64) -> f64,
    /// Initial time.
    pub t0: f64,
    /// Initial value.
    pub y0: f64,
}

/// What a scheme is validated against.
#[derive(Debug, Clone, Copy)]
pub enum Reference {
    /// Differentiate (stencils) or integrate `y' = f'(t)` (integrators).
    Function(TargetFunctionPair),
    /// Integrate an initial value problem.
    Ivp(InitialValueProblem),
}

impl Reference {
    /// Catalog name.
    pub fn name(&self) -> &'static str {
        match self {
            Reference::Function(p) => p.name,
            Reference::Ivp(p) => p.name,
        }
    }
}

fn bell(x: f64) -> f64 {
    1.5 * exp(-0.5 * x * x)
}

fn bell_prime(x: f64) -> f64 {
    -1.5 * x * exp(-0.5 * x * x)
}

fn steep_exp(x: f64) -> f64 {
    2.0 * exp(18.0 * x)
}

fn steep_exp_prime(x: f64) -> f64 {
    36.0 * exp(18.0 * x)
}

fn ivp_rhs(t: f64, y: f64) -> f64 {
    1.0 - t + 4.0 * y
}

fn ivp_solution(t: f64) -> f64 {
    0.25 * t - 3.0 / 16.0 + 19.0 / 16.0 * exp(4.0 * t)
}

/// Training pair `1.5·exp(−x²/2)` on `[−4, 4]`, `h = 0.01`.
pub fn bell_pair() -> TargetFunctionPair {
    TargetFunctionPair {
        name: "bell",
        f: bell,
        f_prime: bell_prime,
        domain: (-4.0, 4.0),
        sample_step: 0.01,
    }
}

/// Validation pair `2·exp(18x)`. Integration runs over `[−1, 0]`.
pub fn exponential_pair() -> TargetFunctionPair {
    TargetFunctionPair {
        name: "exponential",
        f: steep_exp,
        f_prime: steep_exp_prime,
        domain: (-1.0, 0.0),
        sample_step: 0.01,
    }
}

/// Validation problem `y' = 1 − t + 4y`, `y(0) = 1`.
pub fn reference_ivp() -> InitialValueProblem {
    InitialValueProblem {
        name: "ivp",
        rhs: ivp_rhs,
        solution: ivp_solution,
        t0: 0.0,
        y0: 1.0,
    }
}

/// The built-in references.
pub struct BuiltinTargets {
    /// Training bell curve.
    pub bell: TargetFunctionPair,
    /// Validation exponential.
    pub exponential: TargetFunctionPair,
    /// Validation initial value problem.
    pub ivp: InitialValueProblem,
}

/// All built-in references.
pub fn builtin_targets() -> BuiltinTargets {
    BuiltinTargets {
        bell: bell_pair(),
        exponential: exponential_pair(),
        ivp: reference_ivp(),
    }
}

/// Looks a reference up by its catalog name.
pub fn reference_by_name(name: &str) -> Option<Reference> {
    match name {
        "bell" => Some(Reference::Function(bell_pair())),
        "exponential" | "exp" => Some(Reference::Function(exponential_pair())),
        "ivp" => Some(Reference::Ivp(reference_ivp())),
        _ => None,
    }
}

/// Sample locations where candidates are compared with the target.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    /// Abscissae.
    pub points: Vec<f64>,
}

impl TrainingSet {
    /// `n` evenly spaced points on `[lo + inset, hi − inset]`; a single
    /// point sits at the centre.
    pub fn evenly_spaced(domain: (f64, f64), inset: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSettings(
                "training set needs at least one point".into(),
            ));
        }
        let lo = domain.0 + inset;
        let hi = domain.1 - inset;
        if lo > hi {
            return Err(Error::InvalidSettings(
                "training domain is empty after inset".into(),
            ));
        }
        let points = if n == 1 {
            alloc::vec![0.5 * (lo + hi)]
        } else {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|k| lo + k as f64 * step).collect()
        };
        Ok(TrainingSet { points })
    }

    /// Points for `template` on `target`, inset so every stencil sample
    /// stays inside the domain.
    pub fn for_stencil(
        target: &TargetFunctionPair,
        template: &StencilTemplate,
        n: usize,
    ) -> Result<Self> {
        let inset = f64::from(template.max_abs_offset()) * target.sample_step;
        Self::evenly_spaced(target.domain, inset, n)
    }

    /// Number of points N.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when there are no points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Stencil fitness: `log₁₀ Σₖ |f'(xₖ) − (1/h) Σᵢ mᵢ f(xₖ + nᵢh)|`.
///
/// The target samples `f(xₖ + nᵢh)` do not depend on the genome and are
/// tabulated once; each evaluation counts N point evaluations.
pub struct FdFitness {
    dimension: usize,
    h: f64,
    samples: Vec<f64>,
    exact: Vec<f64>,
    counter: AtomicU64,
}

impl FdFitness {
    /// Builds the evaluator for `template` trained on `target` at `training`.
    pub fn new(
        template: &StencilTemplate,
        target: &TargetFunctionPair,
        training: &TrainingSet,
    ) -> Self {
        let h = target.sample_step;
        let offsets = template.offsets();
        let mut samples = Vec::with_capacity(training.len() * offsets.len());
        for &x in &training.points {
            samples.extend(offsets.iter().map(|&n| (target.f)(x + f64::from(n) * h)));
        }
        FdFitness {
            dimension: offsets.len(),
            h,
            samples,
            exact: training
                .points
                .iter()
                .map(|&x| (target.f_prime)(x))
                .collect(),
            counter: AtomicU64::new(0),
        }
    }

    /// Unlogged error sum.
    pub fn error_sum(&self, genome: &[f64]) -> f64 {
        if genome.len() != self.dimension {
            return f64::INFINITY;
        }
        self.samples
            .chunks_exact(self.dimension)
            .zip(&self.exact)
            .map(|(row, &exact)| {
                let acc: f64 = row.iter().zip(genome).map(|(s, m)| m * s).sum();
                abs(exact - acc / self.h)
            })
            .sum()
    }
}

impl Fitness for FdFitness {
    fn evaluate(&self, genome: &[f64]) -> f64 {
        self.counter
            .fetch_add(self.exact.len() as u64, Ordering::Relaxed);
        log_error(self.error_sum(genome))
    }

    fn point_evaluations(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}

/// Runge-Kutta fitness: `log₁₀ Σ |Cₖ − Cₖ*|` over the conditions of the
/// requested order.
pub struct RkFitness {
    stage: usize,
    conditions: ConditionSet,
    counter: AtomicU64,
}

impl RkFitness {
    /// Rejects stage/order pairs that no explicit scheme can satisfy.
    pub fn new(stage: usize, order: usize) -> Result<Self> {
        check_admissible(stage, order)?;
        Ok(RkFitness {
            stage,
            conditions: condition_set(order)?,
            counter: AtomicU64::new(0),
        })
    }

    /// Genome dimension.
    pub fn dimension(&self) -> usize {
        genome_len(self.stage)
    }

    /// Unlogged residual sum.
    pub fn residual_sum(&self, genome: &[f64]) -> f64 {
        match ButcherTableau::decode(genome, self.stage) {
            Ok(t) => self.conditions.residual_sum(&t),
            Err(_) => f64::INFINITY,
        }
    }
}

impl Fitness for RkFitness {
    fn evaluate(&self, genome: &[f64]) -> f64 {
        self.counter
            .fetch_add(self.conditions.count() as u64, Ordering::Relaxed);
        log_error(self.residual_sum(genome))
    }

    fn point_evaluations(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}

/// Adams-Bashforth fitness.
///
/// Integrates `y' = f'(t)` from `(lo, f(lo))` over N steps that tile the
/// target's domain (`h = (hi − lo)/N`), the first `k − 1` steps by the
/// starter tableau, and sums `|yₙ − f(tₙ)|` over `n = 1..=N`. The grid is
/// built by repeated addition of `h`. Since the right-hand side ignores `y`,
/// the start-up values and every `f'(tₙ)` are fixed and tabulated once.
pub struct AbFitness {
    k: usize,
    h: f64,
    y0: f64,
    slopes: Vec<f64>,
    exact: Vec<f64>,
    start: Vec<f64>,
    counter: AtomicU64,
}

impl AbFitness {
    /// Builds the evaluator for a `k`-step scheme with `n` training points.
    pub fn new(
        k: usize,
        target: &TargetFunctionPair,
        n: usize,
        starter: Option<&ButcherTableau>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSettings("Adams-Bashforth needs k ≥ 1".into()));
        }
        if n < k {
            return Err(Error::InvalidSettings(alloc::format!(
                "{n} training points cannot hold a {k}-step start-up"
            )));
        }
        if k > 1 && starter.is_none() {
            return Err(Error::MissingStarter { k });
        }
        let (lo, hi) = target.domain;
        let h = (hi - lo) / n as f64;
        let mut grid = Vec::with_capacity(n + 1);
        let mut t = lo;
        grid.push(t);
        for _ in 0..n {
            t += h;
            grid.push(t);
        }
        let slopes: Vec<f64> = grid.iter().map(|&t| (target.f_prime)(t)).collect();
        let exact: Vec<f64> = grid.iter().map(|&t| (target.f)(t)).collect();
        let y0 = exact[0];
        let mut start = Vec::with_capacity(k.saturating_sub(1));
        let mut y = y0;
        for step in 1..k {
            let tableau = starter.expect("checked above");
            y = tableau.step(|t, _| (target.f_prime)(t), grid[step - 1], y, h);
            start.push(y);
        }
        Ok(AbFitness {
            k,
            h,
            y0,
            slopes,
            exact,
            start,
            counter: AtomicU64::new(0),
        })
    }

    /// Integration step.
    pub fn step(&self) -> f64 {
        self.h
    }

    /// Unlogged error sum; `+∞` if the trajectory leaves the finite range.
    pub fn error_sum(&self, betas: &[f64]) -> f64 {
        if betas.len() != self.k {
            return f64::INFINITY;
        }
        let n = self.exact.len() - 1;
        let mut err = 0.0;
        let mut y = self.y0;
        for (step, &ys) in self.start.iter().enumerate() {
            y = ys;
            err += abs(y - self.exact[step + 1]);
        }
        for step in self.k..=n {
            let mut acc = 0.0;
            for (i, b) in betas.iter().enumerate() {
                acc += b * self.slopes[step - 1 - i];
            }
            y += self.h * acc;
            if !y.is_finite() {
                return f64::INFINITY;
            }
            err += abs(y - self.exact[step]);
        }
        err
    }
}

impl Fitness for AbFitness {
    fn evaluate(&self, genome: &[f64]) -> f64 {
        self.counter
            .fetch_add((self.exact.len() - 1) as u64, Ordering::Relaxed);
        log_error(self.error_sum(genome))
    }

    fn point_evaluations(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}

/// `Σ |aᵢ − bᵢ|`, the coefficient-error metric used for reporting.
pub fn coefficient_error_sum(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| abs(x - y)).sum()
}
