use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of free coefficients of an explicit `stage`-stage scheme:
/// `s(s−1)/2` strictly-lower entries of A plus `s` weights.
pub const fn genome_len(stage: usize) -> usize {
    stage * (stage - 1) / 2 + stage
}

/// Explicit Runge-Kutta scheme.
///
/// `a` is strictly lower triangular, stored dense and row-major. Nodes are
/// not free: `cᵢ = Σⱼ aᵢⱼ`, so `c₁ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableauRepr", into = "TableauRepr")]
pub struct ButcherTableau {
    stage: usize,
    a: Vec<f64>,
    w: Vec<f64>,
    c: Vec<f64>,
}

/// On-disk layout: the flat genome plus the stage count.
#[derive(Serialize, Deserialize)]
struct TableauRepr {
    stage: usize,
    genome: Vec<f64>,
}

impl TryFrom<TableauRepr> for ButcherTableau {
    type Error = Error;

    fn try_from(r: TableauRepr) -> Result<Self> {
        ButcherTableau::decode(&r.genome, r.stage)
    }
}

impl From<ButcherTableau> for TableauRepr {
    fn from(t: ButcherTableau) -> Self {
        TableauRepr {
            stage: t.stage,
            genome: t.encode(),
        }
    }
}

impl ButcherTableau {
    /// Builds a tableau from the vector layout
    /// `(a21 a31 a32 a41 … a_s,s−1 w1 … ws)`.
    pub fn decode(genome: &[f64], stage: usize) -> Result<Self> {
        if stage == 0 {
            return Err(Error::ZeroStage);
        }
        let expected = genome_len(stage);
        if genome.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: genome.len(),
            });
        }
        let mut a = vec![0.0; stage * stage];
        let mut c = vec![0.0; stage];
        let mut k = 0;
        for i in 1..stage {
            let mut row_sum = 0.0;
            for j in 0..i {
                a[i * stage + j] = genome[k];
                row_sum += genome[k];
                k += 1;
            }
            c[i] = row_sum;
        }
        Ok(ButcherTableau {
            stage,
            a,
            w: genome[k..].to_vec(),
            c,
        })
    }

    /// Builds a tableau from its lower-triangular rows. Row `i` (0-based)
    /// must hold exactly `i` entries.
    pub fn from_rows(rows: &[&[f64]], weights: &[f64]) -> Result<Self> {
        let stage = weights.len();
        if rows.len() != stage {
            return Err(Error::LengthMismatch {
                expected: stage,
                actual: rows.len(),
            });
        }
        let mut genome = Vec::with_capacity(genome_len(stage.max(1)));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i {
                return Err(Error::LengthMismatch {
                    expected: i,
                    actual: row.len(),
                });
            }
            genome.extend_from_slice(row);
        }
        genome.extend_from_slice(weights);
        Self::decode(&genome, stage)
    }

    /// Inverse of [`decode`](Self::decode).
    pub fn encode(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(genome_len(self.stage));
        for i in 1..self.stage {
            out.extend_from_slice(&self.a[i * self.stage..i * self.stage + i]);
        }
        out.extend_from_slice(&self.w);
        out
    }

    /// Number of stages `s`.
    pub fn stage(&self) -> usize {
        self.stage
    }

    /// Entry `aᵢⱼ` (0-based). Zero on and above the diagonal.
    #[inline]
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.stage + j]
    }

    /// Row `i` of A, full width `s`.
    #[inline]
    pub fn a_row(&self, i: usize) -> &[f64] {
        &self.a[i * self.stage..(i + 1) * self.stage]
    }

    /// Weights `wᵢ`.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Nodes `cᵢ` (row sums of A).
    pub fn nodes(&self) -> &[f64] {
        &self.c
    }

    /// Advances `y` from `t` by one step of size `h`.
    pub fn step<F: Fn(f64, f64) -> f64>(&self, f: F, t: f64, y: f64, h: f64) -> f64 {
        rk_step(self, f, t, y, h)
    }
}

/// One explicit Runge-Kutta step: `y + Σ wᵢkᵢ` with
/// `kᵢ = h f(t + cᵢh, y + Σⱼ<ᵢ aᵢⱼkⱼ)`.
///
/// Non-finite stage values propagate into the result.
pub fn rk_step<F: Fn(f64, f64) -> f64>(
    tableau: &ButcherTableau,
    f: F,
    t: f64,
    y: f64,
    h: f64,
) -> f64 {
    let s = tableau.stage;
    // Stack storage covers everything up to 8 stages.
    let mut stack = [0.0f64; 8];
    let mut heap;
    let k: &mut [f64] = if s <= stack.len() {
        &mut stack[..s]
    } else {
        heap = vec![0.0; s];
        &mut heap
    };
    for i in 0..s {
        let row = tableau.a_row(i);
        let mut yi = y;
        for j in 0..i {
            yi += row[j] * k[j];
        }
        k[i] = h * f(t + tableau.c[i] * h, yi);
    }
    let mut incr = 0.0;
    for (w, ki) in tableau.w.iter().zip(k.iter()) {
        incr += w * ki;
    }
    y + incr
}

impl fmt::Display for ButcherTableau {
    /// Renders the usual `c | A` over `| w` layout.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(6);
        let width = prec + 4;
        for i in 0..self.stage {
            write!(f, "{:>width$.prec$} |", self.c[i])?;
            for j in 0..i {
                write!(f, " {:>width$.prec$}", self.a(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "{:>width$} +", "")?;
        for _ in 0..self.stage {
            write!(f, "{:-<1$}", "", width + 1)?;
        }
        writeln!(f)?;
        write!(f, "{:>width$} |", "")?;
        for wi in &self.w {
            write!(f, " {:>width$.prec$}", wi)?;
        }
        writeln!(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn rk4() -> ButcherTableau {
        ButcherTableau::from_rows(
            &[&[], &[0.5], &[0.0, 0.5], &[0.0, 0.0, 1.0]],
            &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
        )
        .unwrap()
    }

    #[test]
    fn midpoint_decodes() {
        let t = ButcherTableau::decode(&[0.5, 0.0, 1.0], 2).unwrap();
        assert_eq!(t.a(1, 0), 0.5);
        assert_eq!(t.weights(), &[0.0, 1.0]);
        assert_eq!(t.nodes(), &[0.0, 0.5]);
        // order-2 conditions by substitution
        assert_eq!(t.weights()[0] + t.weights()[1], 1.0);
        assert_eq!(t.weights()[1] * t.a(1, 0), 0.5);
    }

    #[test]
    fn nodes_are_row_sums() {
        let t = ButcherTableau::decode(&[0.3, 0.1, 0.25, 0.2, 0.3, 0.5], 3).unwrap();
        assert_eq!(t.nodes()[2], 0.1 + 0.25);
        assert_eq!(t.nodes()[0], 0.0);
    }

    #[test]
    fn wrong_length_rejected() {
        assert_eq!(
            ButcherTableau::decode(&[0.0; 9], 4),
            Err(Error::LengthMismatch {
                expected: 10,
                actual: 9
            })
        );
        assert_eq!(genome_len(6), 21);
    }

    #[test]
    fn encode_layout_and_round_trip() {
        let t = ButcherTableau::from_rows(&[&[], &[0.5]], &[0.0, 1.0]).unwrap();
        assert_eq!(t.encode(), vec![0.5, 0.0, 1.0]);
        let r = rk4();
        assert_eq!(ButcherTableau::decode(&r.encode(), 4).unwrap(), r);
    }

    #[test]
    fn euler_step_on_constant_rhs() {
        let euler = ButcherTableau::decode(&[1.0], 1).unwrap();
        assert!((euler.step(|_, _| 1.0, 0.0, 2.0, 0.1) - 2.1).abs() < 1e-15);
    }

    #[test]
    fn zero_rhs_leaves_state() {
        assert_eq!(rk_step(&rk4(), |_, _| 0.0, 0.3, 1.25, 0.1), 1.25);
    }

    #[test]
    fn rk4_on_exponential_growth() {
        // Taylor expansion of the RK4 update for y' = y:
        // 1 + h + h²/2 + h³/6 + h⁴/24.
        let h: f64 = 0.1;
        let taylor = 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        let y = rk_step(&rk4(), |_, y| y, 0.0, 1.0, h);
        assert!((y - taylor).abs() < 1e-15);
        assert!((y - 1.105170918).abs() < 1e-7);
    }

    #[test]
    fn display_renders_every_row() {
        let text = rk4().to_string();
        assert_eq!(text.lines().count(), 6);
        assert!(text.contains("0.166667"));
    }
}
