//! Scheme files: one JSON object tagged by `kind`.
//!
//! ```json
//! {"kind": "stencil", "offsets": [-1, 1], "coefficients": [-0.5, 0.5]}
//! {"kind": "tableau", "stage": 2, "genome": [0.5, 0.0, 1.0]}
//! {"kind": "multistep", "betas": [1.5, -0.5], "starter": "midpoint"}
//! ```
//!
//! Coefficients are written in shortest round-trip form, so a file read
//! back reproduces the exact doubles it was written from.

use std::fs;
use std::path::Path;

use evoscheme_core::catalog;
use evoscheme_core::conditions::{evaluate_conditions, max_order_for_stage};
use evoscheme_core::validation::SweepScheme;
use evoscheme_core::{ButcherTableau, MultistepScheme, StencilScheme};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Any scheme the tool can store.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeFile {
    /// Derivative stencil.
    Stencil(StencilScheme),
    /// Explicit Runge-Kutta tableau.
    Tableau(ButcherTableau),
    /// Adams-Bashforth weights.
    Multistep {
        /// `β₁..β_k`.
        betas: Vec<f64>,
        /// Named start-up tableau; the built-in one of order `k` if absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        starter: Option<String>,
    },
}

impl SchemeFile {
    /// Reads and validates a scheme file.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Parses JSON text. The variant is decoded from the original text so
    /// field errors keep their line and column.
    pub fn parse(text: &str) -> serde_json::Result<Self> {
        let tag: Tag = serde_json::from_str(text)?;
        match tag.kind.as_str() {
            "stencil" => serde_json::from_str(text).map(SchemeFile::Stencil),
            "tableau" => serde_json::from_str(text).map(SchemeFile::Tableau),
            "multistep" => {
                let m: MultistepFields = serde_json::from_str(text)?;
                MultistepScheme::new(m.betas.clone()).map_err(serde::de::Error::custom)?;
                Ok(SchemeFile::Multistep {
                    betas: m.betas,
                    starter: m.starter,
                })
            }
            other => Err(serde::de::Error::unknown_variant(
                other,
                &["stencil", "tableau", "multistep"],
            )),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scheme files always serialize");
        s.push('\n');
        s
    }

    /// Writes the file.
    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    /// Resolves `builtin:<name>` or a file path.
    ///
    /// Built-in names: the tableau names of [`catalog::tableau_by_name`],
    /// `central-<p>`, `forward-<p>` and `ab-<k>`.
    pub fn load(spec: &str) -> Result<(String, Self)> {
        if let Some(name) = spec.strip_prefix("builtin:") {
            return builtin(name).map(|s| (name.to_string(), s));
        }
        let path = Path::new(spec);
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        Ok((label, Self::read(path)?))
    }

    /// The scheme as a convergence-study subject.
    pub fn sweep_scheme(&self) -> Result<SweepScheme> {
        Ok(match self {
            SchemeFile::Stencil(s) => SweepScheme::Stencil(s.clone()),
            SchemeFile::Tableau(t) => SweepScheme::RungeKutta(t.clone()),
            SchemeFile::Multistep { betas, starter } => {
                let scheme = MultistepScheme::new(betas.clone())?;
                let starter = resolve_starter(scheme.steps(), starter.as_deref())?;
                SweepScheme::AdamsBashforth { scheme, starter }
            }
        })
    }
}

#[derive(Deserialize)]
struct Tag {
    kind: String,
}

#[derive(Deserialize)]
struct MultistepFields {
    betas: Vec<f64>,
    #[serde(default)]
    starter: Option<String>,
}

fn builtin(name: &str) -> Result<SchemeFile> {
    if let Some(t) = catalog::tableau_by_name(name) {
        return Ok(SchemeFile::Tableau(t));
    }
    let unknown = || CliError::Config(format!("unknown built-in scheme `{name}`"));
    let (family, n) = name.rsplit_once('-').ok_or_else(unknown)?;
    let n: usize = n.parse().map_err(|_| unknown())?;
    let rows = match family {
        "central" => catalog::theory_central(),
        "forward" => catalog::theory_forward(),
        "ab" => {
            let s = catalog::adams_bashforth(n).ok_or_else(unknown)?;
            return Ok(SchemeFile::Multistep {
                betas: s.betas().to_vec(),
                starter: None,
            });
        }
        _ => return Err(unknown()),
    };
    rows.into_iter()
        .find(|r| r.stated_order as usize == n)
        .map(|r| SchemeFile::Stencil(r.scheme))
        .ok_or_else(unknown)
}

/// Highest order whose conditions `tableau` meets to `1e-10`.
pub fn tableau_order(tableau: &ButcherTableau) -> usize {
    let mut order = 0;
    for p in 1..=max_order_for_stage(tableau.stage()) {
        match evaluate_conditions(tableau, p) {
            Ok(r) if r.sum() < 1e-10 => order = p,
            _ => break,
        }
    }
    order
}

/// Start-up tableau for a `k`-step scheme: the named one, else the
/// built-in tableau of order `k`. It must itself reach order `k`.
pub fn resolve_starter(k: usize, name: Option<&str>) -> Result<Option<ButcherTableau>> {
    if k <= 1 && name.is_none() {
        return Ok(None);
    }
    let tableau = match name {
        Some(n) => catalog::tableau_by_name(n)
            .ok_or_else(|| CliError::Config(format!("unknown starter tableau `{n}`")))?,
        None => catalog::starter_for_order(k).ok_or(evoscheme_core::Error::MissingStarter { k })?,
    };
    let order = tableau_order(&tableau);
    if order < k {
        return Err(CliError::Config(format!(
            "starter tableau has order {order}, a {k}-step scheme needs at least {k}"
        )));
    }
    Ok(Some(tableau))
}
