use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A first-derivative finite-difference stencil.
///
/// Approximates `f'(x)` by `(1/h) Σ mᵢ f(x + nᵢh)` with integer offsets `nᵢ`
/// and real coefficients `mᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StencilRepr", into = "StencilRepr")]
pub struct StencilScheme {
    offsets: Vec<i32>,
    coefficients: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StencilRepr {
    #[serde(default = "first_derivative")]
    derivative_order: u32,
    offsets: Vec<i32>,
    coefficients: Vec<f64>,
}

fn first_derivative() -> u32 {
    1
}

impl TryFrom<StencilRepr> for StencilScheme {
    type Error = Error;

    fn try_from(repr: StencilRepr) -> Result<Self> {
        if repr.derivative_order != 1 {
            return Err(Error::InvalidTemplate(format!(
                "only first-derivative stencils are supported, got derivative order {}",
                repr.derivative_order
            )));
        }
        StencilScheme::new(repr.offsets, repr.coefficients)
    }
}

impl From<StencilScheme> for StencilRepr {
    fn from(s: StencilScheme) -> Self {
        StencilRepr {
            derivative_order: 1,
            offsets: s.offsets,
            coefficients: s.coefficients,
        }
    }
}

impl StencilScheme {
    /// Builds a stencil, rejecting duplicate offsets and length mismatches.
    pub fn new(offsets: Vec<i32>, coefficients: Vec<f64>) -> Result<Self> {
        if offsets.len() != coefficients.len() {
            return Err(Error::LengthMismatch {
                expected: offsets.len(),
                actual: coefficients.len(),
            });
        }
        if offsets.is_empty() {
            return Err(Error::InvalidTemplate("stencil has no terms".into()));
        }
        check_distinct(&offsets)?;
        Ok(StencilScheme {
            offsets,
            coefficients,
        })
    }

    /// The integer offsets `nᵢ`.
    pub fn offsets(&self) -> &[i32] {
        &self.offsets
    }

    /// The coefficients `mᵢ`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Derivative order approximated. Only first derivatives are supported.
    pub fn derivative_order(&self) -> u32 {
        1
    }

    /// The mirrored scheme: a forward stencil becomes the equivalent
    /// backward one. Offsets and coefficients are both negated.
    pub fn backward(&self) -> StencilScheme {
        StencilScheme {
            offsets: self.offsets.iter().map(|n| -n).collect(),
            coefficients: self.coefficients.iter().map(|m| -m).collect(),
        }
    }

    /// Largest `|nᵢ|`.
    pub fn max_abs_offset(&self) -> u32 {
        self.offsets
            .iter()
            .map(|n| n.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Shorthand for [`apply_stencil`].
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, x: f64, h: f64) -> f64 {
        apply_stencil(self, f, x, h)
    }
}

/// Evaluates `(1/h) Σ mᵢ f(x + nᵢh)`.
pub fn apply_stencil<F: Fn(f64) -> f64>(scheme: &StencilScheme, f: F, x: f64, h: f64) -> f64 {
    let acc: f64 = scheme
        .offsets
        .iter()
        .zip(&scheme.coefficients)
        .map(|(&n, &m)| m * f(x + f64::from(n) * h))
        .sum();
    acc / h
}

fn check_distinct(offsets: &[i32]) -> Result<()> {
    for (i, a) in offsets.iter().enumerate() {
        if offsets[i + 1..].contains(a) {
            return Err(Error::DuplicateOffset(*a));
        }
    }
    Ok(())
}

/// Shape of the stencil skeleton whose coefficients get evolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    /// Central scheme of even order `p`: offsets `±1..±p/2`, plus `0` when
    /// `with_center` is set.
    Central {
        /// Order of accuracy (even).
        order: u32,
        /// Whether the `f(x)` term is included.
        with_center: bool,
    },
    /// Forward scheme of order `p`: offsets `0..=p`.
    Forward {
        /// Order of accuracy.
        order: u32,
    },
    /// Explicit offset list.
    Custom(Vec<i32>),
}

/// A stencil skeleton: the offsets are fixed, the coefficients are free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StencilTemplate {
    kind: TemplateKind,
    offsets: Vec<i32>,
}

impl StencilTemplate {
    /// Central template. `order` must be even and positive.
    pub fn central(order: u32, with_center: bool) -> Result<Self> {
        if order == 0 || !order.is_multiple_of(2) {
            return Err(Error::InvalidTemplate(format!(
                "central order must be even and positive, got {order}"
            )));
        }
        let half = (order / 2) as i32;
        let mut offsets: Vec<i32> = (-half..=half).collect();
        if !with_center {
            offsets.retain(|&n| n != 0);
        }
        Ok(StencilTemplate {
            kind: TemplateKind::Central { order, with_center },
            offsets,
        })
    }

    /// Forward template of order `order ≥ 1`.
    pub fn forward(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidTemplate(
                "forward order must be at least 1".into(),
            ));
        }
        Ok(StencilTemplate {
            kind: TemplateKind::Forward { order },
            offsets: (0..=order as i32).collect(),
        })
    }

    /// Template over an explicit set of distinct offsets.
    pub fn custom(offsets: Vec<i32>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidTemplate(
                "custom template needs at least one offset".into(),
            ));
        }
        check_distinct(&offsets)?;
        Ok(StencilTemplate {
            kind: TemplateKind::Custom(offsets.clone()),
            offsets,
        })
    }

    /// Template kind.
    pub fn kind(&self) -> &TemplateKind {
        &self.kind
    }

    /// Resolved offsets, in the order genome entries map onto them.
    pub fn offsets(&self) -> &[i32] {
        &self.offsets
    }

    /// Genome dimension.
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    /// Always false; templates have at least one offset.
    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Largest `|nᵢ|` in the template.
    pub fn max_abs_offset(&self) -> u32 {
        self.offsets
            .iter()
            .map(|n| n.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Order of accuracy the template is meant to reach, when the kind
    /// states one.
    pub fn nominal_order(&self) -> Option<u32> {
        match self.kind {
            TemplateKind::Central { order, .. } | TemplateKind::Forward { order } => Some(order),
            TemplateKind::Custom(_) => None,
        }
    }

    /// Attaches coefficients to the template.
    pub fn scheme(&self, coefficients: &[f64]) -> Result<StencilScheme> {
        StencilScheme::new(self.offsets.clone(), coefficients.to_vec())
    }
}
