use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Adams-Bashforth weights `β₁..β_k`:
/// `yₙ = yₙ₋₁ + h Σ βᵢ f(tₙ₋ᵢ, yₙ₋ᵢ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultistepRepr", into = "MultistepRepr")]
pub struct MultistepScheme {
    betas: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MultistepRepr {
    betas: Vec<f64>,
}

impl TryFrom<MultistepRepr> for MultistepScheme {
    type Error = Error;

    fn try_from(r: MultistepRepr) -> Result<Self> {
        MultistepScheme::new(r.betas)
    }
}

impl From<MultistepScheme> for MultistepRepr {
    fn from(s: MultistepScheme) -> Self {
        MultistepRepr { betas: s.betas }
    }
}

impl MultistepScheme {
    /// Needs at least one weight.
    pub fn new(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                actual: 0,
            });
        }
        Ok(MultistepScheme { betas })
    }

    /// Step count `k`.
    pub fn steps(&self) -> usize {
        self.betas.len()
    }

    /// The weights, `β₁` first.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// One Adams-Bashforth step. `history` holds `(tₙ₋ᵢ, yₙ₋ᵢ)` for
/// `i = 1..=k`, most recent first.
pub fn ab_step<F: Fn(f64, f64) -> f64>(
    scheme: &MultistepScheme,
    f: F,
    history: &[(f64, f64)],
    h: f64,
) -> Result<f64> {
    if history.len() != scheme.steps() {
        return Err(Error::LengthMismatch {
            expected: scheme.steps(),
            actual: history.len(),
        });
    }
    let y_prev = history[0].1;
    Ok(combine(
        &scheme.betas,
        history.iter().map(|&(t, y)| f(t, y)),
        y_prev,
        h,
    ))
}

/// `y_prev + h Σ βᵢ gᵢ`, with `g` most recent first.
#[inline]
pub(crate) fn combine<I: IntoIterator<Item = f64>>(
    betas: &[f64],
    g: I,
    y_prev: f64,
    h: f64,
) -> f64 {
    let mut acc = 0.0;
    for (b, gi) in betas.iter().zip(g) {
        acc += b * gi;
    }
    y_prev + h * acc
}
