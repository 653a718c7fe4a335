//! Audit, validation and sensitivity commands as library calls.

use std::collections::HashSet;

use evoscheme_core::conditions::{
    ab_moment_check, evaluate_conditions, taylor_moment_check, ResidualReport,
};
use evoscheme_core::fitness::reference_by_name;
use evoscheme_core::validation::{compare_schemes, default_location, Comparison, Ladder};
use evoscheme_core::MultistepScheme;

use crate::config::{Family, RunConfig};
use crate::error::{CliError, Result};
use crate::evolve::{evolve, BestOfReport};
use crate::files::SchemeFile;
use crate::output::{moment_csv, num, residual_csv};

/// Outcome of an audit.
#[derive(Debug, Clone)]
pub enum AuditReport {
    /// Order conditions of a tableau.
    Conditions(ResidualReport),
    /// Moment residuals of a stencil (`j = 0..=p`) or multistep scheme
    /// (`j = 1..=p`).
    Moments {
        /// Index of the first moment.
        first: usize,
        /// `|residual|` per moment.
        residuals: Vec<f64>,
    },
}

impl AuditReport {
    /// Sum of absolute residuals.
    pub fn sum(&self) -> f64 {
        match self {
            AuditReport::Conditions(r) => r.sum(),
            AuditReport::Moments { residuals, .. } => residuals.iter().sum(),
        }
    }

    /// CSV form.
    pub fn to_csv(&self) -> Result<String> {
        match self {
            AuditReport::Conditions(r) => residual_csv(r),
            AuditReport::Moments { first, residuals } => moment_csv(residuals, *first),
        }
    }
}

/// Checks `scheme` against the conditions for `order`.
pub fn audit(scheme: &SchemeFile, order: usize) -> Result<AuditReport> {
    if order == 0 {
        return Err(CliError::Config("order must be at least 1".into()));
    }
    Ok(match scheme {
        SchemeFile::Tableau(t) => AuditReport::Conditions(evaluate_conditions(t, order)?),
        SchemeFile::Stencil(s) => AuditReport::Moments {
            first: 0,
            residuals: taylor_moment_check(s, order as u32),
        },
        SchemeFile::Multistep { betas, .. } => AuditReport::Moments {
            first: 1,
            residuals: ab_moment_check(&MultistepScheme::new(betas.clone())?, order as u32),
        },
    })
}

/// Sweeps every scheme against the named reference. The location defaults
/// to `x = 1` for the initial value problem and `x = 0` otherwise.
pub fn validate(
    schemes: &[(String, SchemeFile)],
    reference: &str,
    location: Option<f64>,
    ladder: &Ladder,
) -> Result<Comparison> {
    let reference = reference_by_name(reference)
        .ok_or_else(|| CliError::Config(format!("unknown reference `{reference}`")))?;
    let location = location.unwrap_or_else(|| default_location(&reference));
    let mut seen = HashSet::new();
    let mut subjects = Vec::with_capacity(schemes.len());
    for (i, (name, file)) in schemes.iter().enumerate() {
        let mut label = name.clone();
        if !seen.insert(label.clone()) {
            label = format!("{name}-{i}");
            seen.insert(label.clone());
        }
        subjects.push((label, file.sweep_scheme()?));
    }
    Ok(compare_schemes(&subjects, &reference, location, ladder)?)
}

/// Parameter varied by a sensitivity study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Axis {
    /// N.
    TrainingPoints,
    /// NP.
    PopulationSize,
    /// Sampling step of the target.
    StepSize,
}

impl Axis {
    /// Name used in file headers.
    pub fn name(self) -> &'static str {
        match self {
            Axis::TrainingPoints => "training_points",
            Axis::PopulationSize => "population_size",
            Axis::StepSize => "step_size",
        }
    }
}

/// Result at one grid value.
#[derive(Debug, Clone)]
pub struct SensitivityRow {
    /// Grid value.
    pub value: f64,
    /// Best-of report at this value.
    pub report: BestOfReport,
    /// Point evaluations summed over all runs.
    pub total_point_evaluations: u64,
}

fn as_count(axis: Axis, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(CliError::Config(format!(
            "{}: `{v}` is not a positive integer",
            axis.name()
        )))
    }
}

/// Runs the configured evolution once per grid value, with the same master
/// seed everywhere so the comparison is paired.
pub fn sensitivity(
    axis: Axis,
    grid: &[f64],
    base: &RunConfig,
    family: Family,
) -> Result<Vec<SensitivityRow>> {
    if grid.is_empty() {
        return Err(CliError::Config("grid must not be empty".into()));
    }
    if family == Family::Rk && axis != Axis::PopulationSize {
        return Err(CliError::Config(format!(
            "{} has no meaning for Runge-Kutta runs",
            axis.name()
        )));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut cfg = base.clone();
        match axis {
            Axis::TrainingPoints => cfg.training_points = Some(as_count(axis, value)?),
            Axis::PopulationSize => cfg.population_size = Some(as_count(axis, value)?),
            Axis::StepSize => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(CliError::Config(format!(
                        "step_size: `{value}` is not positive"
                    )));
                }
                cfg.sample_step = Some(value)
            }
        }
        let evo = evolve(&cfg.resolve(family)?)?;
        let total = evo.report.runs.iter().map(|r| r.point_evaluations).sum();
        rows.push(SensitivityRow {
            value,
            report: evo.report,
            total_point_evaluations: total,
        });
    }
    Ok(rows)
}

/// One row per grid value.
pub fn sensitivity_csv(axis: Axis, rows: &[SensitivityRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        axis.name(),
        "winner_run",
        "winner_fitness",
        "winner_error_sum",
        "winner_coefficient_error",
        "winner_point_evaluations",
        "total_point_evaluations",
    ])?;
    for r in rows {
        let rep = &r.report;
        w.write_record([
            num(r.value),
            rep.winner_run.to_string(),
            num(rep.winner_fitness),
            num(rep.winner_error_sum),
            rep.winner_coefficient_error.map(num).unwrap_or_default(),
            rep.runs[rep.winner_run].point_evaluations.to_string(),
            r.total_point_evaluations.to_string(),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use evoscheme_core::catalog;

    #[test]
    fn zero_tableau_audit() {
        let zero =
            SchemeFile::Tableau(evoscheme_core::ButcherTableau::decode(&[0.0; 3], 2).unwrap());
        assert_eq!(audit(&zero, 2).unwrap().sum(), 1.5);
    }

    #[test]
    fn moment_audits() {
        let s = SchemeFile::Stencil(catalog::theory_central()[1].scheme.clone());
        let r = audit(&s, 4).unwrap();
        assert!(r.sum() < 1e-12);
        assert!(
            matches!(r, AuditReport::Moments { first: 0, ref residuals } if residuals.len() == 5)
        );
        let ab = SchemeFile::Multistep {
            betas: vec![1.5, -0.5],
            starter: None,
        };
        assert!(audit(&ab, 2).unwrap().sum() < 1e-15);
        assert!(audit(&ab, 3).unwrap().sum() > 0.1);
    }

    #[test]
    fn incompatible_validation() {
        let s = vec![(
            "c2".to_string(),
            SchemeFile::load("builtin:central-2").unwrap().1,
        )];
        assert!(matches!(
            validate(&s, "ivp", None, &Ladder::default()),
            Err(CliError::Core(evoscheme_core::Error::Incompatible(_)))
        ));
        assert!(validate(&s, "nowhere", None, &Ladder::default()).is_err());
    }

    #[test]
    fn duplicate_labels_kept_apart() {
        let rk = SchemeFile::load("builtin:rk4").unwrap();
        let c = validate(
            &[rk.clone(), rk],
            "ivp",
            None,
            &Ladder {
                rungs: 3,
                ..Ladder::default()
            },
        )
        .unwrap();
        assert_eq!(c.columns[0].name, "rk4");
        assert_eq!(c.columns[1].name, "rk4-1");
    }
}
