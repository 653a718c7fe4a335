//! CSV and JSON products. Numbers are written with 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use evoscheme_core::conditions::{evaluate_conditions, ResidualReport};
use evoscheme_core::de::{RunRecord, TerminationReason};
use evoscheme_core::validation::{Comparison, SlopeFit};
use evoscheme_core::ButcherTableau;
use serde::Serialize;

use crate::config::Problem;
use crate::error::{CliError, Result};
use crate::evolve::Evolution;

/// `{:.16e}`, with `inf`/`-inf`/`nan` for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Convergence trace: `generation,best_fitness,cr_avg,f_avg,point_evaluations`.
pub fn trace_csv(record: &RunRecord) -> Result<String> {
    let header = strings([
        "generation",
        "best_fitness",
        "cr_avg",
        "f_avg",
        "point_evaluations",
    ]);
    csv_string(std::iter::once(header).chain(record.trace.iter().map(|g| {
        vec![
            g.generation.to_string(),
            num(g.best_fitness),
            num(g.cr_avg),
            num(g.f_avg),
            g.point_evaluations.to_string(),
        ]
    })))
}

/// Residual audit: one row per condition plus a `sum` row.
pub fn residual_csv(report: &ResidualReport) -> Result<String> {
    let header = strings(["condition_index", "lhs_value", "target", "abs_residual"]);
    let rows = report.entries.iter().map(|e| {
        vec![
            e.index.to_string(),
            num(e.lhs),
            num(e.target),
            num(e.abs_residual),
        ]
    });
    let total = vec![
        "sum".into(),
        String::new(),
        String::new(),
        num(report.sum()),
    ];
    csv_string(
        std::iter::once(header)
            .chain(rows)
            .chain(std::iter::once(total)),
    )
}

/// Moment residuals: one row per moment plus a `sum` row.
pub fn moment_csv(residuals: &[f64], first_moment: usize) -> Result<String> {
    let header = strings(["moment", "abs_residual"]);
    let rows = residuals
        .iter()
        .enumerate()
        .map(|(j, r)| vec![(j + first_moment).to_string(), num(*r)]);
    let total = vec!["sum".into(), num(residuals.iter().sum())];
    csv_string(
        std::iter::once(header)
            .chain(rows)
            .chain(std::iter::once(total)),
    )
}

fn offset_label(n: i32) -> String {
    match n {
        0 => "f(x)".into(),
        1 => "f(x+h)".into(),
        -1 => "f(x-h)".into(),
        n if n > 0 => format!("f(x+{n}h)"),
        n => format!("f(x-{}h)", -n),
    }
}

/// Coefficient table: theory rows and the winner, with their distance to
/// the winner (for theory rows) or to the nearest theory row (winner).
pub fn coefficient_csv(evo: &Evolution) -> Result<String> {
    let (order, labels): (String, Vec<String>) = match &evo.resolved.problem {
        Problem::Fd { template, .. } => (
            template
                .nominal_order()
                .map(|o| o.to_string())
                .unwrap_or_default(),
            template
                .offsets()
                .iter()
                .map(|&n| offset_label(n))
                .collect(),
        ),
        Problem::Ab { k, .. } => (
            k.to_string(),
            (1..=*k).map(|i| format!("beta_{i}")).collect(),
        ),
        Problem::Rk { stage, .. } => (
            String::new(),
            (0..evoscheme_core::scheme::genome_len(*stage))
                .map(|i| format!("g{i}"))
                .collect(),
        ),
    };
    let mut header = strings(["row", "order", "vector_length"]);
    header.extend(labels.iter().cloned());
    header.push("sum_abs_error".into());
    let winner = &evo.report.winner_genome;
    let row = |name: &str, coeffs: &[f64], err: Option<f64>| {
        let mut r = vec![name.to_string(), order.clone(), coeffs.len().to_string()];
        r.extend(coeffs.iter().map(|&c| num(c)));
        r.push(err.map(num).unwrap_or_default());
        r
    };
    let mut rows = vec![header];
    for (name, c) in &evo.theory {
        rows.push(row(
            name,
            c,
            Some(evoscheme_core::fitness::coefficient_error_sum(winner, c)),
        ));
    }
    rows.push(row("computed", winner, evo.report.winner_coefficient_error));
    csv_string(rows)
}

/// Per-run table.
pub fn runs_csv(evo: &Evolution) -> Result<String> {
    let header = strings([
        "run",
        "seed",
        "fitness",
        "error_sum",
        "coefficient_error",
        "generations_run",
        "termination_reason",
        "point_evaluations",
    ]);
    csv_string(
        std::iter::once(header).chain(evo.report.runs.iter().map(|r| {
            vec![
                r.run.to_string(),
                r.seed.to_string(),
                num(r.fitness),
                num(r.error_sum),
                r.coefficient_error.map(num).unwrap_or_default(),
                r.generations_run.to_string(),
                match r.termination_reason {
                    TerminationReason::Stalled => "stalled".into(),
                    TerminationReason::MaxGenerations => "max_generations".into(),
                },
                r.point_evaluations.to_string(),
            ]
        })),
    )
}

/// Box-plot data: training error per run, then the five-number summary.
pub fn box_csv(evo: &Evolution) -> Result<String> {
    let mut rows = vec![strings(["run", "error_sum"])];
    rows.extend(
        evo.report
            .runs
            .iter()
            .map(|r| vec![r.run.to_string(), num(r.error_sum)]),
    );
    let s = evo.report.error_stats;
    for (name, v) in [
        ("min", s.min),
        ("q1", s.q1),
        ("median", s.median),
        ("q3", s.q3),
        ("max", s.max),
    ] {
        rows.push(vec![name.into(), num(v)]);
    }
    csv_string(rows)
}

/// Writes everything an evolve command produces into `dir`; returns the
/// paths written.
pub fn write_evolution(evo: &Evolution, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: &str, contents: String| -> Result<()> {
        let p = dir.join(name);
        write(&p, contents)?;
        written.push(p);
        Ok(())
    };
    put("config.txt", evo.resolved.config.to_text())?;
    for (j, rec) in evo.records.iter().enumerate() {
        put(&format!("runs/run-{j:03}.json"), json(rec))?;
        put(&format!("runs/run-{j:03}.csv"), trace_csv(rec)?)?;
    }
    let winner = evo.winner_scheme()?;
    put("winner.json", winner.to_json())?;
    put("best_of.json", json(&evo.report))?;
    put("runs.csv", runs_csv(evo)?)?;
    put("coefficients.csv", coefficient_csv(evo)?)?;
    if let Problem::Rk { stage, order } = &evo.resolved.problem {
        let t = ButcherTableau::decode(&evo.report.winner_genome, *stage)?;
        put(
            "residuals.csv",
            residual_csv(&evaluate_conditions(&t, *order)?)?,
        )?;
        put("box.csv", box_csv(evo)?)?;
    }
    Ok(written)
}

/// `h` then one error column per scheme.
pub fn sweep_csv(c: &Comparison) -> Result<String> {
    let mut header = vec!["h".to_string()];
    header.extend(c.columns.iter().map(|col| col.name.clone()));
    let rows = c.steps.iter().enumerate().map(|(i, &h)| {
        let mut r = vec![num(h)];
        r.extend(c.columns.iter().map(|col| num(col.errors[i])));
        r
    });
    csv_string(std::iter::once(header).chain(rows))
}

/// Slope fit of one scheme, in report form.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateEntry {
    /// Scheme label.
    pub scheme: String,
    /// `null` when indeterminate.
    pub slope: Option<f64>,
    /// `null` when indeterminate.
    pub r_squared: Option<f64>,
    /// Points inside the fit window.
    pub points_used: usize,
    /// Points below the rounding floor.
    pub floor_excluded: usize,
    /// False when fewer than two points were usable.
    pub determined: bool,
}

/// Per-scheme slope estimates.
pub fn estimates(c: &Comparison) -> Vec<EstimateEntry> {
    c.columns
        .iter()
        .map(|col| match col.fit {
            SlopeFit::Determined(e) => EstimateEntry {
                scheme: col.name.clone(),
                slope: Some(e.slope),
                r_squared: Some(e.r_squared),
                points_used: e.points_used,
                floor_excluded: e.floor_excluded,
                determined: true,
            },
            SlopeFit::Indeterminate {
                points_used,
                floor_excluded,
            } => EstimateEntry {
                scheme: col.name.clone(),
                slope: None,
                r_squared: None,
                points_used,
                floor_excluded,
                determined: false,
            },
        })
        .collect()
}

/// Writes `sweep.csv` and `estimates.json`.
pub fn write_comparison(c: &Comparison, dir: &Path) -> Result<Vec<PathBuf>> {
    let a = dir.join("sweep.csv");
    write(&a, sweep_csv(c)?)?;
    let b = dir.join("estimates.json");
    write(&b, json(&estimates(c)))?;
    Ok(vec![a, b])
}

/// Writes arbitrary text, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    write(path, contents)
}
