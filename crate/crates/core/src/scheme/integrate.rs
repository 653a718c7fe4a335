use alloc::vec::Vec;

use super::multistep::combine;
use super::{ButcherTableau, MultistepScheme};
use crate::{Error, Result};

/// What advances the solution.
#[derive(Debug, Clone, Copy)]
pub enum Stepper<'a> {
    /// One-step explicit Runge-Kutta.
    RungeKutta(&'a ButcherTableau),
    /// Adams-Bashforth; `starter` supplies the first `k − 1` points after
    /// the initial value and is required whenever `k > 1`.
    AdamsBashforth {
        /// The multistep weights.
        scheme: &'a MultistepScheme,
        /// Runge-Kutta tableau used for the start-up steps.
        starter: Option<&'a ButcherTableau>,
    },
}

/// A fixed-step solution `(tₙ, yₙ)`, `n = 0..`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Points computed so far; on divergence the last one is non-finite.
    pub points: Vec<(f64, f64)>,
    /// Set when a non-finite value stopped the integration early.
    pub diverged: bool,
}

impl Trajectory {
    /// Final point.
    pub fn last(&self) -> (f64, f64) {
        *self
            .points
            .last()
            .expect("trajectory always holds the initial value")
    }
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` over `n_steps` steps of size
/// `h`. Times are computed as `t0 + n·h`.
pub fn integrate<F: Fn(f64, f64) -> f64>(
    stepper: Stepper<'_>,
    f: F,
    t0: f64,
    y0: f64,
    h: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidStep(h));
    }
    let time = |n: usize| t0 + n as f64 * h;
    let mut points = Vec::with_capacity(n_steps + 1);
    points.push((t0, y0));

    match stepper {
        Stepper::RungeKutta(tableau) => {
            let mut y = y0;
            for n in 1..=n_steps {
                y = tableau.step(&f, time(n - 1), y, h);
                points.push((time(n), y));
                if !y.is_finite() {
                    return Ok(Trajectory {
                        points,
                        diverged: true,
                    });
                }
            }
        }
        Stepper::AdamsBashforth { scheme, starter } => {
            let k = scheme.steps();
            if k > 1 && starter.is_none() {
                return Err(Error::MissingStarter { k });
            }
            let mut y = y0;
            for n in 1..k.min(n_steps + 1) {
                let tableau = starter.expect("checked above");
                y = tableau.step(&f, time(n - 1), y, h);
                points.push((time(n), y));
                if !y.is_finite() {
                    return Ok(Trajectory {
                        points,
                        diverged: true,
                    });
                }
            }
            if points.len() == k {
                return Ok(continue_multistep(scheme, f, &points, h, n_steps + 1 - k));
            }
        }
    }
    Ok(Trajectory {
        points,
        diverged: false,
    })
}

/// Continues an Adams-Bashforth integration from `start`, the last `k`
/// points oldest first, for `n_steps` further steps. The returned trajectory
/// includes the start points. Times are `t_start + n·h`.
pub fn continue_multistep<F: Fn(f64, f64) -> f64>(
    scheme: &MultistepScheme,
    f: F,
    start: &[(f64, f64)],
    h: f64,
    n_steps: usize,
) -> Trajectory {
    let k = scheme.steps();
    assert_eq!(
        start.len(),
        k,
        "multistep continuation needs exactly k start points"
    );
    let t0 = start[0].0;
    let mut points = Vec::with_capacity(k + n_steps);
    points.extend_from_slice(start);
    let mut slopes: Vec<f64> = start.iter().map(|&(t, y)| f(t, y)).collect();
    let mut y = start[k - 1].1;
    for n in k..k + n_steps {
        y = combine(
            scheme.betas(),
            slopes[slopes.len() - k..].iter().rev().copied(),
            y,
            h,
        );
        let t = t0 + n as f64 * h;
        points.push((t, y));
        if !y.is_finite() {
            return Trajectory {
                points,
                diverged: true,
            };
        }
        slopes.push(f(t, y));
    }
    Trajectory {
        points,
        diverged: false,
    }
}
