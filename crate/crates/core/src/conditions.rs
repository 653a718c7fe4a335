//! Order-of-accuracy audits.
//!
//! Runge-Kutta tableaus are checked against the 17 explicit order
//! conditions up to order 5. Stencils and Adams-Bashforth weights are
//! checked through their Taylor moment equations.

use alloc::vec::Vec;

use crate::math::{abs, powi};
use crate::scheme::{ButcherTableau, MultistepScheme, StencilScheme};
use crate::{Error, Result};

/// Highest order with hard-coded conditions.
pub const MAX_ORDER: usize = 5;

/// Exact rational right-hand side of an order condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    /// Numerator.
    pub num: i64,
    /// Denominator, positive.
    pub den: i64,
}

impl Rational {
    const fn new(num: i64, den: i64) -> Self {
        Rational { num, den }
    }

    /// Nearest double.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// One order condition `Σ … = target`.
#[derive(Debug, Clone, Copy)]
pub struct OrderCondition {
    /// Position in the full 17-condition listing, starting at 1.
    pub index: usize,
    /// The order this condition first appears at.
    pub order: usize,
    /// Human-readable left-hand side.
    pub expression: &'static str,
    /// Right-hand side.
    pub target: Rational,
    lhs: fn(&Terms) -> f64,
}

impl OrderCondition {
    /// Evaluates the left-hand side on `tableau`.
    pub fn lhs(&self, tableau: &ButcherTableau) -> f64 {
        (self.lhs)(&Terms::new(tableau))
    }
}

/// All conditions required for one order, cumulative over lower orders.
#[derive(Debug, Clone)]
pub struct ConditionSet {
    /// Requested order.
    pub order: usize,
    /// Conditions in listing order.
    pub conditions: Vec<OrderCondition>,
}

impl ConditionSet {
    /// Number of conditions.
    pub fn count(&self) -> usize {
        self.conditions.len()
    }

    /// Sum of all targets (the residual sum of an all-zero tableau).
    pub fn target_sum(&self) -> f64 {
        self.conditions.iter().map(|c| c.target.to_f64()).sum()
    }

    /// Residual report for `tableau`.
    pub fn evaluate(&self, tableau: &ButcherTableau) -> ResidualReport {
        let terms = Terms::new(tableau);
        let entries = self
            .conditions
            .iter()
            .map(|c| {
                let lhs = (c.lhs)(&terms);
                let target = c.target.to_f64();
                ResidualEntry {
                    index: c.index,
                    lhs,
                    target,
                    abs_residual: abs(target - lhs),
                }
            })
            .collect();
        ResidualReport {
            order: self.order,
            entries,
        }
    }

    /// `Σ |Cₖ − Cₖ*|` without building a report.
    pub fn residual_sum(&self, tableau: &ButcherTableau) -> f64 {
        let terms = Terms::new(tableau);
        self.conditions
            .iter()
            .map(|c| abs(c.target.to_f64() - (c.lhs)(&terms)))
            .sum()
    }
}

/// One line of a residual report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualEntry {
    /// Condition index (1-based, listing order).
    pub index: usize,
    /// Left-hand side evaluated on the tableau.
    pub lhs: f64,
    /// Exact target as a double.
    pub target: f64,
    /// `|target − lhs|`.
    pub abs_residual: f64,
}

/// Per-condition residuals of a tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Audited order.
    pub order: usize,
    /// One entry per condition.
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    /// Sum of absolute residuals.
    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.abs_residual).sum()
    }

    /// Just the residuals.
    pub fn residuals(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.abs_residual).collect()
    }
}

/// Weights and the node/matrix products the condition formulas need,
/// computed once per tableau. Indices are 0-based; every product runs over
/// the full stage range so zero entries of an explicit tableau drop out.
struct Terms {
    s: usize,
    buf: Vec<f64>,
}

/// Slots of [`Terms::buf`], each `s` long.
#[derive(Clone, Copy)]
enum V {
    W,
    C,
    C2,
    C3,
    C4,
    /// `A c`
    Ac,
    /// `A c²`
    Ac2,
    /// `A c³`
    Ac3,
    /// `A A c`
    AAc,
    /// `A A c²`
    AAc2,
    /// `A A A c`
    AAAc,
    /// `A (c ∘ A c)`
    ACAc,
}

const SLOTS: usize = 12;

impl Terms {
    fn new(t: &ButcherTableau) -> Self {
        let s = t.stage();
        let mut terms = Terms {
            s,
            buf: alloc::vec![0.0; SLOTS * s],
        };
        for i in 0..s {
            let c = t.nodes()[i];
            terms.set(V::W, i, t.weights()[i]);
            terms.set(V::C, i, c);
            terms.set(V::C2, i, powi(c, 2));
            terms.set(V::C3, i, powi(c, 3));
            terms.set(V::C4, i, powi(c, 4));
        }
        terms.mat_vec(t, V::C, V::Ac);
        terms.mat_vec(t, V::C2, V::Ac2);
        terms.mat_vec(t, V::C3, V::Ac3);
        terms.mat_vec(t, V::Ac, V::AAc);
        terms.mat_vec(t, V::Ac2, V::AAc2);
        terms.mat_vec(t, V::AAc, V::AAAc);
        for i in 0..s {
            let g: f64 = (0..s)
                .map(|j| t.a(i, j) * (terms.get(V::C, j) * terms.get(V::Ac, j)))
                .sum();
            terms.set(V::ACAc, i, g);
        }
        terms
    }

    fn get(&self, v: V, i: usize) -> f64 {
        self.buf[v as usize * self.s + i]
    }

    fn set(&mut self, v: V, i: usize, x: f64) {
        self.buf[v as usize * self.s + i] = x;
    }

    fn mat_vec(&mut self, t: &ButcherTableau, from: V, to: V) {
        for i in 0..self.s {
            let g: f64 = (0..self.s).map(|j| t.a(i, j) * self.get(from, j)).sum();
            self.set(to, i, g);
        }
    }

    /// `Σᵢ wᵢ Πₖ vₖ[i]`.
    fn weighted(&self, vs: &[V]) -> f64 {
        (0..self.s)
            .map(|i| self.get(V::W, i) * vs.iter().fold(1.0, |acc, &v| acc * self.get(v, i)))
            .sum()
    }
}

macro_rules! cond {
    ($index:expr, $order:expr, $expr:expr, $num:expr, $den:expr, $f:expr) => {
        OrderCondition {
            index: $index,
            order: $order,
            expression: $expr,
            target: Rational::new($num, $den),
            lhs: $f,
        }
    };
}

static CONDITIONS: [OrderCondition; 17] = [
    // order 1
    cond!(1, 1, "Σ w_i", 1, 1, |t| t.weighted(&[])),
    // order 2
    cond!(2, 2, "Σ w_i c_i", 1, 2, |t| t.weighted(&[V::C])),
    // order 3
    cond!(3, 3, "Σ w_i c_i^2", 1, 3, |t| t.weighted(&[V::C2])),
    cond!(4, 3, "Σ w_i a_ij c_j", 1, 6, |t| t.weighted(&[V::Ac])),
    // order 4
    cond!(5, 4, "Σ w_i c_i^3", 1, 4, |t| t.weighted(&[V::C3])),
    cond!(6, 4, "Σ w_i c_i a_ij c_j", 1, 8, |t| t
        .weighted(&[V::C, V::Ac])),
    cond!(7, 4, "Σ w_i a_ij c_j^2", 1, 12, |t| t.weighted(&[V::Ac2])),
    cond!(8, 4, "Σ w_i a_ij a_jk c_k", 1, 24, |t| t
        .weighted(&[V::AAc])),
    // order 5
    cond!(9, 5, "Σ w_i c_i^4", 1, 5, |t| t.weighted(&[V::C4])),
    cond!(10, 5, "Σ w_i c_i^2 a_ij c_j", 1, 10, |t| t
        .weighted(&[V::C2, V::Ac])),
    cond!(11, 5, "Σ w_i c_i a_ij c_j^2", 1, 15, |t| t
        .weighted(&[V::C, V::Ac2])),
    cond!(12, 5, "Σ w_i c_i a_ij a_jk c_k", 1, 30, |t| t
        .weighted(&[V::C, V::AAc])),
    cond!(13, 5, "Σ w_i a_ij c_j a_ik c_k", 1, 20, |t| t
        .weighted(&[V::Ac, V::Ac])),
    cond!(14, 5, "Σ w_i a_ij c_j^3", 1, 20, |t| t.weighted(&[V::Ac3])),
    cond!(15, 5, "Σ w_i a_ij c_j a_jk c_k", 1, 40, |t| t
        .weighted(&[V::ACAc])),
    cond!(16, 5, "Σ w_i a_ij a_jk c_k^2", 1, 60, |t| t
        .weighted(&[V::AAc2])),
    cond!(17, 5, "Σ w_i a_ij a_jk a_kl c_l", 1, 120, |t| t
        .weighted(&[V::AAAc])),
];

/// Every condition a scheme must satisfy to have order `order`
/// (cumulative: 1, 2, 4, 8 and 17 conditions for orders 1 to 5).
pub fn condition_set(order: usize) -> Result<ConditionSet> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(ConditionSet {
        order,
        conditions: CONDITIONS
            .iter()
            .filter(|c| c.order <= order)
            .copied()
            .collect(),
    })
}

/// Residuals `|Cₖ − Cₖ*|` of `tableau` for every condition of `order`.
pub fn evaluate_conditions(tableau: &ButcherTableau, order: usize) -> Result<ResidualReport> {
    Ok(condition_set(order)?.evaluate(tableau))
}

/// Highest order an explicit scheme with `stage` stages can reach, capped
/// at [`MAX_ORDER`].
pub fn max_order_for_stage(stage: usize) -> usize {
    match stage {
        0 => 0,
        1..=4 => stage,
        5 => 4,
        _ => MAX_ORDER,
    }
}

/// Fewest stages that can reach `order`.
pub fn min_stage_for_order(order: usize) -> Option<usize> {
    (1..=6).find(|&s| max_order_for_stage(s) >= order)
}

/// Rejects stage/order pairs no explicit scheme can satisfy.
pub fn check_admissible(stage: usize, order: usize) -> Result<()> {
    if stage == 0 {
        return Err(Error::ZeroStage);
    }
    if order == 0 || order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    if order > max_order_for_stage(stage) {
        return Err(Error::InadmissibleStageOrder { stage, order });
    }
    Ok(())
}

/// First-derivative moment residuals of a stencil for degrees
/// `0..=claimed_order`: `|Σ mᵢ nᵢʲ − δⱼ₁|`. All vanish iff the stencil is
/// exact on polynomials of degree `claimed_order`.
pub fn taylor_moment_check(scheme: &StencilScheme, claimed_order: u32) -> Vec<f64> {
    (0..=claimed_order)
        .map(|j| {
            let moment: f64 = scheme
                .offsets()
                .iter()
                .zip(scheme.coefficients())
                .map(|(&n, &m)| m * powi(f64::from(n), j))
                .sum();
            let target = if j == 1 { 1.0 } else { 0.0 };
            abs(moment - target)
        })
        .collect()
}

/// Adams-Bashforth quadrature residuals
/// `|Σᵢ βᵢ (1 − i)^(j−1) − 1/j|` for `j = 1..=claimed_order`.
pub fn ab_moment_check(scheme: &MultistepScheme, claimed_order: u32) -> Vec<f64> {
    (1..=claimed_order)
        .map(|j| {
            let lhs: f64 = scheme
                .betas()
                .iter()
                .enumerate()
                .map(|(idx, &b)| b * powi(-(idx as f64), j - 1))
                .sum();
            abs(lhs - 1.0 / f64::from(j))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use alloc::vec;

    #[test]
    fn counts_follow_stage_table() {
        let counts: Vec<usize> = (1..=5).map(|p| condition_set(p).unwrap().count()).collect();
        assert_eq!(counts, vec![1, 2, 4, 8, 17]);
        assert!(condition_set(6).is_err());
        assert!(condition_set(0).is_err());
    }

    #[test]
    fn order_three_targets() {
        let set = condition_set(3).unwrap();
        let t: Vec<Rational> = set.conditions.iter().map(|c| c.target).collect();
        assert_eq!(
            t,
            vec![
                Rational::new(1, 1),
                Rational::new(1, 2),
                Rational::new(1, 3),
                Rational::new(1, 6)
            ]
        );
    }

    #[test]
    fn order_five_targets_in_listing_order() {
        let dens: Vec<i64> = condition_set(5)
            .unwrap()
            .conditions
            .iter()
            .map(|c| c.target.den)
            .collect();
        assert_eq!(
            dens,
            vec![1, 2, 3, 6, 4, 8, 12, 24, 5, 10, 15, 30, 20, 20, 40, 60, 120]
        );
    }

    #[test]
    fn rk4_satisfies_order_four() {
        let r = evaluate_conditions(&catalog::rk4(), 4).unwrap();
        assert!(r.entries.iter().all(|e| e.abs_residual < 1e-15), "{r:?}");
    }

    #[test]
    fn classical_tableaus_reach_their_orders() {
        for (t, p) in [
            (catalog::euler(), 1),
            (catalog::midpoint(), 2),
            (catalog::kutta3(), 3),
            (catalog::rk4(), 4),
            (catalog::butcher5(), 5),
        ] {
            let sum = evaluate_conditions(&t, p).unwrap().sum();
            assert!(sum < 1e-14, "order {p}: {sum}");
            if p < MAX_ORDER {
                let next = evaluate_conditions(&t, p + 1).unwrap().sum();
                assert!(next > 1e-3, "order {p} should not pass order {}", p + 1);
            }
        }
    }

    #[test]
    fn zero_tableau_residual_is_target_sum() {
        let z = ButcherTableau::decode(&[0.0; 3], 2).unwrap();
        assert_eq!(evaluate_conditions(&z, 2).unwrap().sum(), 1.5);
    }

    #[test]
    fn admissibility() {
        assert!(check_admissible(6, 5).is_ok());
        assert!(check_admissible(3, 3).is_ok());
        assert_eq!(
            check_admissible(5, 5),
            Err(Error::InadmissibleStageOrder { stage: 5, order: 5 })
        );
        assert_eq!(min_stage_for_order(5), Some(6));
        assert_eq!(min_stage_for_order(4), Some(4));
    }

    #[test]
    fn central_two_moments() {
        let s = StencilScheme::new(vec![-1, 1], vec![-0.5, 0.5]).unwrap();
        assert_eq!(taylor_moment_check(&s, 2), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn forward_two_is_not_third_order() {
        let s = StencilScheme::new(vec![0, 1, 2], vec![-1.5, 2.0, -0.5]).unwrap();
        let r = taylor_moment_check(&s, 3);
        assert_eq!(&r[..3], &[0.0, 0.0, 0.0]);
        assert_eq!(r[3], 2.0);
    }

    #[test]
    fn first_abnormal_is_fourth_order() {
        let s = &catalog::theory_abnormal()[0].scheme;
        assert!(taylor_moment_check(s, 4).iter().all(|&r| r < 1e-15));
    }

    #[test]
    fn adams_bashforth_moments() {
        let euler = MultistepScheme::new(vec![1.0]).unwrap();
        assert_eq!(ab_moment_check(&euler, 1), vec![0.0]);
        let ab2 = MultistepScheme::new(vec![1.5, -0.5]).unwrap();
        assert_eq!(ab_moment_check(&ab2, 2), vec![0.0, 0.0]);
        let ab3 = MultistepScheme::new(vec![23.0 / 12.0, -4.0 / 3.0, 5.0 / 12.0]).unwrap();
        assert!(ab_moment_check(&ab3, 3).iter().all(|&r| r < 1e-15));
        // AB2 is not third order.
        assert!(ab_moment_check(&ab2, 3)[2] > 0.1);
    }
}
