//! Reference schemes: classical tableaus, closed-form stencil and
//! Adams-Bashforth weights, and the published evolved coefficient sets.

use alloc::vec;
use alloc::vec::Vec;

use crate::scheme::{
    ButcherTableau, MultistepScheme, StencilScheme, StencilTemplate, TemplateKind,
};

/// A stencil together with the order of accuracy it is listed with.
#[derive(Debug, Clone, PartialEq)]
pub struct ListedStencil {
    /// Short identifier, e.g. `central-4`.
    pub name: &'static str,
    /// Order of accuracy as listed.
    pub stated_order: u32,
    /// The stencil.
    pub scheme: StencilScheme,
}

fn stencil(offsets: &[i32], coefficients: &[f64]) -> StencilScheme {
    StencilScheme::new(offsets.to_vec(), coefficients.to_vec())
        .expect("catalog stencils are well formed")
}

fn listed(name: &'static str, stated_order: u32, offsets: &[i32], c: &[f64]) -> ListedStencil {
    ListedStencil {
        name,
        stated_order,
        scheme: stencil(offsets, c),
    }
}

/// Closed-form central stencils of orders 2, 4, 6, 8 (no `f(x)` term).
pub fn theory_central() -> Vec<ListedStencil> {
    vec![
        listed("central-2", 2, &[-1, 1], &[-1.0 / 2.0, 1.0 / 2.0]),
        listed(
            "central-4",
            4,
            &[-2, -1, 1, 2],
            &[1.0 / 12.0, -2.0 / 3.0, 2.0 / 3.0, -1.0 / 12.0],
        ),
        listed(
            "central-6",
            6,
            &[-3, -2, -1, 1, 2, 3],
            &[
                -1.0 / 60.0,
                3.0 / 20.0,
                -3.0 / 4.0,
                3.0 / 4.0,
                -3.0 / 20.0,
                1.0 / 60.0,
            ],
        ),
        listed(
            "central-8",
            8,
            &[-4, -3, -2, -1, 1, 2, 3, 4],
            &[
                1.0 / 280.0,
                -4.0 / 105.0,
                1.0 / 5.0,
                -4.0 / 5.0,
                4.0 / 5.0,
                -1.0 / 5.0,
                4.0 / 105.0,
                -1.0 / 280.0,
            ],
        ),
    ]
}

/// Closed-form forward stencils of orders 1 through 6.
pub fn theory_forward() -> Vec<ListedStencil> {
    vec![
        listed("forward-1", 1, &[0, 1], &[-1.0, 1.0]),
        listed("forward-2", 2, &[0, 1, 2], &[-3.0 / 2.0, 2.0, -1.0 / 2.0]),
        listed(
            "forward-3",
            3,
            &[0, 1, 2, 3],
            &[-11.0 / 6.0, 3.0, -3.0 / 2.0, 1.0 / 3.0],
        ),
        listed(
            "forward-4",
            4,
            &[0, 1, 2, 3, 4],
            &[-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0],
        ),
        listed(
            "forward-5",
            5,
            &[0, 1, 2, 3, 4, 5],
            &[-137.0 / 60.0, 5.0, -5.0, 10.0 / 3.0, -5.0 / 4.0, 1.0 / 5.0],
        ),
        listed(
            "forward-6",
            6,
            &[0, 1, 2, 3, 4, 5, 6],
            &[
                -49.0 / 20.0,
                6.0,
                -15.0 / 2.0,
                20.0 / 3.0,
                -15.0 / 4.0,
                6.0 / 5.0,
                -1.0 / 6.0,
            ],
        ),
    ]
}

/// The two non-standard fourth-order rows as published, both on the shared
/// offset header `(−3, −1, 1, 3)`.
///
/// Only the first row is a first-derivative stencil on those offsets. The
/// second row's moments only work out on `(−3, −2, −1, 1)`, where it is
/// third order; see [`second_abnormal_reinterpreted`].
pub fn theory_abnormal() -> Vec<ListedStencil> {
    vec![
        listed(
            "abnormal-1",
            4,
            &[-3, -1, 1, 3],
            &[1.0 / 48.0, -27.0 / 48.0, 27.0 / 48.0, -1.0 / 48.0],
        ),
        listed(
            "abnormal-2",
            4,
            &[-3, -1, 1, 3],
            &[1.0 / 8.0, -1.0 / 3.0, -1.0 / 4.0, 11.0 / 24.0],
        ),
    ]
}

/// The second non-standard row placed on the only small integer offset set
/// where it approximates a first derivative: `(−3, −2, −1, 1)`, order 3.
pub fn second_abnormal_reinterpreted() -> ListedStencil {
    listed(
        "abnormal-2-shifted",
        3,
        &[-3, -2, -1, 1],
        &[1.0 / 8.0, -1.0 / 3.0, -1.0 / 4.0, 11.0 / 24.0],
    )
}

/// Published evolved central stencils (with `f(x)` term), orders 2–8.
pub fn computed_central() -> Vec<ListedStencil> {
    vec![
        listed(
            "central-2-evolved",
            2,
            &[-1, 0, 1],
            &[-0.500013397, 0.000000000, 0.500013397],
        ),
        listed(
            "central-4-evolved",
            4,
            &[-2, -1, 0, 1, 2],
            &[
                0.083342157,
                -0.666684313,
                0.000000938,
                0.666683691,
                -0.083342002,
            ],
        ),
        listed(
            "central-6-evolved",
            6,
            &[-3, -2, -1, 0, 1, 2, 3],
            &[
                -0.016670578,
                0.150015647,
                -0.750019558,
                -0.000014356,
                0.750030440,
                -0.150020047,
                0.016671320,
            ],
        ),
        listed(
            "central-8-evolved",
            8,
            &[-4, -3, -2, -1, 0, 1, 2, 3, 4],
            &[
                0.003565704,
                -0.038061207,
                0.199921330,
                -0.799922070,
                0.000015479,
                0.800122711,
                -0.199924308,
                0.038063121,
                -0.003566130,
            ],
        ),
    ]
}

/// Published evolved forward stencils, orders 1–6.
pub fn computed_forward() -> Vec<ListedStencil> {
    vec![
        listed(
            "forward-1-evolved",
            1,
            &[0, 1],
            &[-0.999965187, 0.999992406],
        ),
        listed(
            "forward-2-evolved",
            2,
            &[0, 1, 2],
            &[-1.499934810, 1.999923208, -0.499988397],
        ),
        listed(
            "forward-3-evolved",
            3,
            &[0, 1, 2, 3],
            &[-1.833239315, 2.999797978, -1.499878000, 0.333319340],
        ),
        listed(
            "forward-4-evolved",
            4,
            &[0, 1, 2, 3, 4],
            &[
                -2.083211809,
                3.999619798,
                -2.999588512,
                1.333164876,
                -0.249984353,
            ],
        ),
        listed(
            "forward-5-evolved",
            5,
            &[0, 1, 2, 3, 4, 5],
            &[
                -2.283198253,
                4.999457198,
                -4.999179543,
                3.332777993,
                -1.249854882,
                0.199997488,
            ],
        ),
        listed(
            "forward-6-evolved",
            6,
            &[0, 1, 2, 3, 4, 5, 6],
            &[
                -2.449833503,
                5.999156723,
                -7.498280965,
                6.664893406,
                -3.749059104,
                1.199779258,
                -0.166655814,
            ],
        ),
    ]
}

/// Published evolved non-standard stencils.
pub fn computed_abnormal() -> Vec<ListedStencil> {
    vec![
        listed(
            "abnormal-1-evolved",
            4,
            &[-3, -1, 1, 3],
            &[0.020838333, -0.562514996, 0.562514996, -0.020838333],
        ),
        listed(
            "abnormal-2-evolved",
            4,
            &[-3, -1, 1, 3],
            &[0.124974036, -0.333219716, -0.250118502, 0.458364183],
        ),
    ]
}

/// Closed-form stencils whose offsets coincide with `template`'s, in the
/// template's coefficient order. Central templates with an `f(x)` term get a
/// zero centre coefficient.
pub fn theory_for_template(template: &StencilTemplate) -> Vec<StencilScheme> {
    let pool: Vec<ListedStencil> = match template.kind() {
        TemplateKind::Central { .. } => theory_central(),
        TemplateKind::Forward { .. } => theory_forward(),
        TemplateKind::Custom(_) => {
            let mut all = theory_central();
            all.extend(theory_forward());
            all.extend(theory_abnormal());
            all
        }
    };
    pool.into_iter()
        .filter_map(|l| align(&l.scheme, template.offsets()))
        .collect()
}

/// Re-expresses `scheme` on `offsets`: every stencil term must appear in
/// `offsets`, extra offsets get a zero coefficient.
fn align(scheme: &StencilScheme, offsets: &[i32]) -> Option<StencilScheme> {
    if scheme.offsets().iter().any(|n| !offsets.contains(n)) {
        return None;
    }
    if offsets.len() > scheme.offsets().len() + 1 {
        return None;
    }
    let coefficients = offsets
        .iter()
        .map(|n| {
            scheme
                .offsets()
                .iter()
                .position(|m| m == n)
                .map_or(0.0, |i| scheme.coefficients()[i])
        })
        .collect();
    StencilScheme::new(offsets.to_vec(), coefficients).ok()
}

/// Closed-form Adams-Bashforth weights for `k = 1..=5`.
pub fn theory_adams_bashforth() -> Vec<MultistepScheme> {
    let rows: [&[f64]; 5] = [
        &[1.0],
        &[3.0 / 2.0, -1.0 / 2.0],
        &[23.0 / 12.0, -4.0 / 3.0, 5.0 / 12.0],
        &[55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -3.0 / 8.0],
        &[
            1901.0 / 720.0,
            -1387.0 / 360.0,
            109.0 / 30.0,
            -637.0 / 360.0,
            251.0 / 720.0,
        ],
    ];
    rows.iter()
        .map(|b| MultistepScheme::new(b.to_vec()).expect("non-empty"))
        .collect()
}

/// Closed-form Adams-Bashforth scheme with `k` steps, if catalogued.
pub fn adams_bashforth(k: usize) -> Option<MultistepScheme> {
    theory_adams_bashforth().into_iter().nth(k.checked_sub(1)?)
}

fn tableau(rows: &[&[f64]], w: &[f64]) -> ButcherTableau {
    ButcherTableau::from_rows(rows, w).expect("catalog tableaus are well formed")
}

/// Forward Euler.
pub fn euler() -> ButcherTableau {
    tableau(&[&[]], &[1.0])
}

/// Explicit midpoint rule (order 2).
pub fn midpoint() -> ButcherTableau {
    tableau(&[&[], &[0.5]], &[0.0, 1.0])
}

/// Kutta's third-order method.
pub fn kutta3() -> ButcherTableau {
    tableau(
        &[&[], &[0.5], &[-1.0, 2.0]],
        &[1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    )
}

/// The classical fourth-order method.
pub fn rk4() -> ButcherTableau {
    tableau(
        &[&[], &[0.5], &[0.0, 0.5], &[0.0, 0.0, 1.0]],
        &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
    )
}

/// Butcher's six-stage fifth-order method.
pub fn butcher5() -> ButcherTableau {
    tableau(
        &[
            &[],
            &[1.0 / 4.0],
            &[1.0 / 8.0, 1.0 / 8.0],
            &[0.0, -1.0 / 2.0, 1.0],
            &[3.0 / 16.0, 0.0, 0.0, 9.0 / 16.0],
            &[-3.0 / 7.0, 2.0 / 7.0, 12.0 / 7.0, -12.0 / 7.0, 8.0 / 7.0],
        ],
        &[
            7.0 / 90.0,
            0.0,
            32.0 / 90.0,
            12.0 / 90.0,
            32.0 / 90.0,
            7.0 / 90.0,
        ],
    )
}

/// A classical tableau of exactly order `order` (1..=5), used to generate
/// Adams-Bashforth starting values.
pub fn starter_for_order(order: usize) -> Option<ButcherTableau> {
    match order {
        1 => Some(euler()),
        2 => Some(midpoint()),
        3 => Some(kutta3()),
        4 => Some(rk4()),
        5 => Some(butcher5()),
        _ => None,
    }
}

/// Best published evolved 3-stage, order-3 tableau.
pub fn evolved_stage3() -> ButcherTableau {
    tableau(
        &[
            &[],
            &[0.588205371365611],
            &[-0.117042030825954, 0.865356722666391],
        ],
        &[0.239084361012680, 0.433481022213682, 0.327434616773638],
    )
}

/// Best published evolved 4-stage, order-4 tableau.
pub fn evolved_stage4() -> ButcherTableau {
    tableau(
        &[
            &[],
            &[0.446027096189541],
            &[-0.253232894933462, 0.837303080381472],
            &[0.284580085103288, 0.018557477374513, 0.696862437522200],
        ],
        &[
            0.160860757268920,
            0.410796107210609,
            0.268240761883735,
            0.160102373636736,
        ],
    )
}

/// Best published evolved 6-stage, order-5 tableau.
#[allow(clippy::excessive_precision)]
pub fn evolved_stage6() -> ButcherTableau {
    tableau(
        &[
            &[],
            &[0.142950591304828],
            &[0.737459236646687, -0.504634588009118],
            &[0.314129433383799, -0.330273585672633, 0.467497950578092],
            &[
                -0.183250006068950,
                1.499638222192340,
                -1.622659422172800,
                1.058063997380150,
            ],
            &[
                -0.139352972771695,
                -1.278258776673380,
                3.335534496262670,
                -1.848343730854510,
                0.930420984036919,
            ],
        ],
        &[
            0.008109845927407,
            0.365341829971006,
            -0.104294398783786,
            0.327711908497619,
            0.318235531221308,
            0.084895283166445,
        ],
    )
}

/// Looks a tableau up by name: `euler`, `midpoint`, `kutta3`, `rk4`,
/// `butcher5`, `evolved3`, `evolved4`, `evolved6`.
pub fn tableau_by_name(name: &str) -> Option<ButcherTableau> {
    Some(match name {
        "euler" => euler(),
        "midpoint" => midpoint(),
        "kutta3" => kutta3(),
        "rk4" => rk4(),
        "butcher5" => butcher5(),
        "evolved3" => evolved_stage3(),
        "evolved4" => evolved_stage4(),
        "evolved6" => evolved_stage6(),
        _ => return None,
    })
}
