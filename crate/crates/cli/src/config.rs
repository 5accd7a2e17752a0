//! Numeric configuration with flags > config file > defaults precedence.

use fluxform_core::chains::DEFAULT_JACOBIAN_STEP;
use fluxform_core::deriv::DerivConfig;
use fluxform_core::integrate::QuadratureSpec;
use fluxform_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Optional overrides as read from `--config <file.json>`.  Every key is
/// optional; unknown keys are rejected so typos do not silently fall back to
/// defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub eps: Option<f64>,
    pub subdivisions: Option<usize>,
    pub rtol: Option<f64>,
    pub richardson: Option<usize>,
    pub aspect_bound: Option<f64>,
    pub jacobian_step: Option<f64>,
    pub eps_outer: Option<f64>,
    pub eps_inner: Option<f64>,
    pub max_depth: Option<usize>,
    pub size_tol: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format {
            what: "config file",
            detail: format!("{}: {e}", path.display()),
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            what: "config file",
            detail: e.to_string(),
        })
    }
}

/// Flag-level overrides shared by several subcommands (each is `None` when
/// the flag was not given).
#[derive(Debug, Default)]
pub struct FlagOverrides {
    pub eps: Option<f64>,
    pub subdiv: Option<usize>,
    pub rtol: Option<f64>,
    pub richardson: Option<usize>,
    pub eps_outer: Option<f64>,
    pub eps_inner: Option<f64>,
    pub max_depth: Option<usize>,
    pub size_tol: Option<f64>,
}

/// The fully resolved configuration, echoed verbatim into every report.
///
/// `subdivisions` feeds the quadrature over chains; the derivative stencil's
/// face grid stays at 1 unless `--subdiv` targets a `derive` run explicitly
/// (see `face_subdivisions_for_derive`).
#[derive(Clone, Debug, Serialize)]
pub struct Effective {
    pub eps: f64,
    pub subdivisions: usize,
    pub rtol: Option<f64>,
    pub richardson: usize,
    pub aspect_bound: f64,
    pub jacobian_step: f64,
    pub eps_outer: f64,
    pub eps_inner: f64,
    pub max_depth: usize,
    pub size_tol: f64,
    #[serde(skip)]
    subdiv_explicit: bool,
}

impl Effective {
    pub fn resolve(file: &ConfigFile, flags: &FlagOverrides) -> Effective {
        let defaults = DerivConfig::default();
        let subdiv_flag = flags.subdiv.or(file.subdivisions);
        Effective {
            eps: flags.eps.or(file.eps).unwrap_or(defaults.eps),
            subdivisions: subdiv_flag
                .unwrap_or(QuadratureSpec::default().subdivisions_per_axis),
            rtol: flags.rtol.or(file.rtol),
            richardson: flags.richardson.or(file.richardson).unwrap_or(0),
            aspect_bound: file.aspect_bound.unwrap_or(defaults.aspect_bound),
            jacobian_step: file.jacobian_step.unwrap_or(DEFAULT_JACOBIAN_STEP),
            eps_outer: flags.eps_outer.or(file.eps_outer).unwrap_or(1e-3),
            eps_inner: flags.eps_inner.or(file.eps_inner).unwrap_or(1e-4),
            max_depth: flags.max_depth.or(file.max_depth).unwrap_or(12),
            size_tol: flags.size_tol.or(file.size_tol).unwrap_or(0.0),
            subdiv_explicit: subdiv_flag.is_some(),
        }
    }

    pub fn deriv_config(&self) -> DerivConfig {
        DerivConfig {
            eps: self.eps,
            richardson_levels: self.richardson,
            aspect_bound: self.aspect_bound,
            jacobian_step: self.jacobian_step,
            ..DerivConfig::default()
        }
    }

    /// For `derive`, an explicit `--subdiv` selects the face-grid flux route
    /// of the stencil; without it the 2n-point stencil is used.
    pub fn face_subdivisions_for_derive(&self) -> usize {
        if self.subdiv_explicit {
            self.subdivisions
        } else {
            1
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        let q = QuadratureSpec::new(self.subdivisions)?;
        Ok(match self.rtol {
            Some(r) => q.with_rtol(r),
            None => q,
        })
    }
}
