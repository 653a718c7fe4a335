//! Step-size convergence studies.
//!
//! A scheme is run over a geometric ladder of step sizes against an
//! analytical reference; the normalized error at a fixed location is
//! recorded per step, and the empirical order is the least-squares slope
//! of `log₁₀ error` against `log₁₀ h` inside a fixed window.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::fitness::Reference;
use crate::math::{abs, log10, powi, round};
use crate::scheme::{integrate, ButcherTableau, MultistepScheme, StencilScheme, Stepper};
use crate::{Error, Result};

/// Errors below this are rounding noise and are left out of slope fits.
pub const ROUNDING_FLOOR: f64 = 1e-13;
/// Errors above this are pre-asymptotic and are left out of slope fits.
pub const ASYMPTOTIC_CEILING: f64 = 1e-1;
/// Denominator guard of the normalized error.
pub const NORMALIZATION_EPS: f64 = 1e-30;

/// Geometric step-size ladder `h₀·ratioʲ`, `j = 0..rungs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    /// Largest step.
    pub h0: f64,
    /// Ratio between consecutive steps, in `(0, 1)`.
    pub ratio: f64,
    /// Number of steps.
    pub rungs: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder {
            h0: 0.1,
            ratio: 0.5,
            rungs: 10,
        }
    }
}

impl Ladder {
    /// The step sizes, largest first.
    pub fn steps(&self) -> Result<Vec<f64>> {
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(Error::InvalidLadder(format!(
                "h0 must be positive, got {}",
                self.h0
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidLadder(format!(
                "ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if self.rungs == 0 {
            return Err(Error::InvalidLadder(
                "ladder needs at least one rung".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.rungs);
        let mut h = self.h0;
        for _ in 0..self.rungs {
            out.push(h);
            h *= self.ratio;
        }
        Ok(out)
    }
}

/// A scheme under test.
#[derive(Debug, Clone)]
pub enum SweepScheme {
    /// Derivative approximation.
    Stencil(StencilScheme),
    /// One-step integrator.
    RungeKutta(ButcherTableau),
    /// Multistep integrator with its start-up tableau.
    AdamsBashforth {
        /// The weights.
        scheme: MultistepScheme,
        /// Start-up tableau, required for `k > 1`.
        starter: Option<ButcherTableau>,
    },
}

/// Errors of one scheme over a ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSweep {
    /// Evaluation abscissa.
    pub location: f64,
    /// `(h, normalized error)`; `+∞` marks a diverged run.
    pub errors: Vec<(f64, f64)>,
}

/// Normalized error `|numerical − analytical| / max(|analytical|, ε)`.
pub fn normalized_error(numerical: f64, analytical: f64) -> f64 {
    if !numerical.is_finite() {
        return f64::INFINITY;
    }
    abs(numerical - analytical) / abs(analytical).max(NORMALIZATION_EPS)
}

/// Runs `scheme` against `reference` at every step of `ladder`.
///
/// Stencils differentiate the reference function at `location`.
/// Integrators start at the reference's initial point (the problem's `t₀`,
/// or the lower end of a function pair's domain with `y₀ = f(t₀)`) and
/// integrate up to `location`, which must be a whole number of steps away.
pub fn sweep(
    scheme: &SweepScheme,
    reference: &Reference,
    location: f64,
    ladder: &Ladder,
) -> Result<ConvergenceSweep> {
    let steps = ladder.steps()?;
    let mut errors = Vec::with_capacity(steps.len());
    for h in steps {
        errors.push((h, error_at(scheme, reference, location, h)?));
    }
    Ok(ConvergenceSweep { location, errors })
}

fn error_at(scheme: &SweepScheme, reference: &Reference, location: f64, h: f64) -> Result<f64> {
    match (scheme, reference) {
        (SweepScheme::Stencil(s), Reference::Function(pair)) => {
            let est = s.apply(pair.f, location, h);
            Ok(normalized_error(est, (pair.f_prime)(location)))
        }
        (SweepScheme::Stencil(_), Reference::Ivp(_)) => Err(Error::Incompatible(
            "a derivative stencil cannot be run on an initial value problem".into(),
        )),
        (_, Reference::Function(pair)) => {
            let t0 = pair.domain.0;
            let y0 = (pair.f)(t0);
            let f_prime = pair.f_prime;
            let y = integrate_to(scheme, move |t, _| f_prime(t), t0, y0, location, h)?;
            Ok(normalized_error(y, (pair.f)(location)))
        }
        (_, Reference::Ivp(ivp)) => {
            let y = integrate_to(scheme, ivp.rhs, ivp.t0, ivp.y0, location, h)?;
            Ok(normalized_error(y, (ivp.solution)(location)))
        }
    }
}

fn integrate_to<F: Fn(f64, f64) -> f64>(
    scheme: &SweepScheme,
    f: F,
    t0: f64,
    y0: f64,
    location: f64,
    h: f64,
) -> Result<f64> {
    let span = location - t0;
    if span <= 0.0 {
        return Err(Error::Incompatible(format!(
            "integration must run forward: start {t0}, location {location}"
        )));
    }
    let n = round(span / h);
    if abs(n * h - span) > 1e-9 * span {
        return Err(Error::InvalidLadder(format!(
            "step {h} does not divide the interval [{t0}, {location}]"
        )));
    }
    let stepper = match scheme {
        SweepScheme::RungeKutta(t) => Stepper::RungeKutta(t),
        SweepScheme::AdamsBashforth { scheme, starter } => Stepper::AdamsBashforth {
            scheme,
            starter: starter.as_ref(),
        },
        SweepScheme::Stencil(_) => unreachable!("handled by the caller"),
    };
    let traj = integrate(stepper, f, t0, y0, h, n as usize)?;
    Ok(if traj.diverged {
        f64::INFINITY
    } else {
        traj.last().1
    })
}

/// Least-squares fit of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    /// Slope of `log₁₀ error` against `log₁₀ h`.
    pub slope: f64,
    /// Coefficient of determination.
    pub r_squared: f64,
    /// Points inside the window.
    pub points_used: usize,
    /// Points dropped below the rounding floor.
    pub floor_excluded: usize,
}

/// Outcome of [`estimate_order`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlopeFit {
    /// At least two points inside the window.
    Determined(OrderEstimate),
    /// Too few usable points to fit a line.
    Indeterminate {
        /// Points inside the window.
        points_used: usize,
        /// Points dropped below the rounding floor.
        floor_excluded: usize,
    },
}

impl SlopeFit {
    /// Slope, when determined.
    pub fn slope(&self) -> Option<f64> {
        match self {
            SlopeFit::Determined(e) => Some(e.slope),
            SlopeFit::Indeterminate { .. } => None,
        }
    }

    /// Estimate, when determined.
    pub fn estimate(&self) -> Option<&OrderEstimate> {
        match self {
            SlopeFit::Determined(e) => Some(e),
            SlopeFit::Indeterminate { .. } => None,
        }
    }
}

/// Fits the empirical order of `sweep` over points with error in
/// `[1e-13, 1e-1]`.
pub fn estimate_order(sweep: &ConvergenceSweep) -> SlopeFit {
    estimate_order_from(&sweep.errors)
}

/// [`estimate_order`] on raw `(h, error)` pairs.
pub fn estimate_order_from(errors: &[(f64, f64)]) -> SlopeFit {
    let mut floor_excluded = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(h, e) in errors {
        if e < ROUNDING_FLOOR {
            floor_excluded += 1;
        } else if e <= ASYMPTOTIC_CEILING {
            xs.push(log10(h));
            ys.push(log10(e));
        }
    }
    let n = xs.len();
    if n < 2 {
        return SlopeFit::Indeterminate {
            points_used: n,
            floor_excluded,
        };
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return SlopeFit::Indeterminate {
            points_used: n,
            floor_excluded,
        };
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        powi(sxy, 2) / (sxx * syy)
    };
    SlopeFit::Determined(OrderEstimate {
        slope,
        r_squared,
        points_used: n,
        floor_excluded,
    })
}

/// One column of a comparison report.
#[derive(Debug, Clone)]
pub struct ComparisonColumn {
    /// Scheme label.
    pub name: String,
    /// Normalized error per ladder step.
    pub errors: Vec<f64>,
    /// Order fit of this column.
    pub fit: SlopeFit,
}

/// Several schemes swept over one ladder.
#[derive(Debug, Clone)]
pub struct Comparison {
    /// Shared step sizes.
    pub steps: Vec<f64>,
    /// One column per scheme.
    pub columns: Vec<ComparisonColumn>,
}

/// Sweeps every scheme over the same ladder and fits each column.
pub fn compare_schemes(
    schemes: &[(String, SweepScheme)],
    reference: &Reference,
    location: f64,
    ladder: &Ladder,
) -> Result<Comparison> {
    let steps = ladder.steps()?;
    let mut columns = Vec::with_capacity(schemes.len());
    for (name, scheme) in schemes {
        let s = sweep(scheme, reference, location, ladder)?;
        columns.push(ComparisonColumn {
            name: name.clone(),
            fit: estimate_order(&s),
            errors: s.errors.into_iter().map(|(_, e)| e).collect(),
        });
    }
    Ok(Comparison { steps, columns })
}

/// Default evaluation location for a reference: `x = 1` for the initial
/// value problem, `x = 0` otherwise.
pub fn default_location(reference: &Reference) -> f64 {
    match reference {
        Reference::Ivp(_) => 1.0,
        Reference::Function(_) => 0.0,
    }
}
