//! The flux exterior derivative.
//!
//! The component of `D omega` at `x` on the axes `Q = {q_1 < ... < q_k}` is
//! the face-centered stencil
//!
//! ```text
//! (1 / 2 eps) * sum_a (-1)^(a+1) [ omega_{x + eps e_(q_a)}(Q \ q_a)
//!                                 - omega_{x - eps e_(q_a)}(Q \ q_a) ]
//! ```
//!
//! which is also the average flux of omega through the boundary of the
//! `2 eps`-cube around `x` in the Q-plane, divided by the cube's volume.
//! The difference within each axis is taken first, so constant fields
//! differentiate to exactly zero.  All `C(n, k)` components share one set of
//! `2n` samples.  [`flux_average`] exposes the general definition for an
//! arbitrary C^1 map; Richardson refinement and an empirical convergence
//! order round out the toolkit.

use crate::chains::{Block, Chain, SingularBlock, SmoothMap};
use crate::forms::{AlternatingTensor, FormField};
use crate::integrate::{integrate_over_chain, QuadratureSpec};
use crate::multiindex::{self, MultiIndex};
use crate::{Error, Result};

/// Stencil and refinement settings.
///
/// `eps` is the stencil half-width in ambient length units; `aspect_bound`
/// is the largest tolerated ratio of longest to shortest block side in
/// [`flux_average`] (violations warn, they do not reject);
/// `face_subdivisions` is the midpoint grid per face axis (1 = the
/// one-point face rule); `richardson_levels` drives
/// [`exterior_derivative_refined`]; `jacobian_step` floors the
/// finite-difference Jacobian steps of maps without analytic Jacobians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivConfig {
    pub eps: f64,
    pub aspect_bound: f64,
    pub face_subdivisions: usize,
    pub richardson_levels: usize,
    pub jacobian_step: f64,
}

impl Default for DerivConfig {
    fn default() -> Self {
        DerivConfig {
            eps: 1e-4,
            aspect_bound: 10.0,
            face_subdivisions: 1,
            richardson_levels: 0,
            jacobian_step: crate::chains::DEFAULT_JACOBIAN_STEP,
        }
    }
}

impl DerivConfig {
    /// Default config with `eps` scaled to the point: `1e-4 * max(1, |x|_inf)`.
    pub fn for_point(x: &[f64]) -> Self {
        let scale = x.iter().fold(1.0f64, |m, &v| m.max(v.abs()));
        DerivConfig {
            eps: 1e-4 * scale,
            ..Default::default()
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eps.is_finite() || self.eps <= 0.0 {
            return Err(Error::Config(format!(
                "stencil eps must be a positive finite number, got {}",
                self.eps
            )));
        }
        if self.aspect_bound.is_nan() || self.aspect_bound <= 1.0 {
            return Err(Error::Config(format!(
                "aspect bound must exceed 1, got {}",
                self.aspect_bound
            )));
        }
        if self.face_subdivisions == 0 {
            return Err(Error::Config(
                "face_subdivisions must be at least 1".to_string(),
            ));
        }
        if !self.jacobian_step.is_finite() || self.jacobian_step <= 0.0 {
            return Err(Error::Config(format!(
                "jacobian_step must be a positive finite number, got {}",
                self.jacobian_step
            )));
        }
        Ok(())
    }
}

/// Average flux of a degree-(k-1) field through the boundary of `phi(B)`:
/// `(1 / vol(B)) * integral over boundary(B) of phi^* omega`.  The limit of
/// this quantity over shrinking blocks of bounded aspect ratio is the flux
/// derivative evaluated on the Jacobian columns of `phi`.
///
/// Blocks with aspect ratio at or above `cfg.aspect_bound` are warned about
/// but still computed.
pub fn flux_average(
    field: &FormField,
    phi: &SmoothMap,
    block: &Block,
    cfg: &DerivConfig,
    q: &QuadratureSpec,
) -> Result<f64> {
    cfg.validate()?;
    if phi.domain_dim() != block.dim() {
        return Err(Error::dim("flux map domain", block.dim(), phi.domain_dim()));
    }
    if field.degree() + 1 != block.dim() {
        return Err(Error::DegreeMismatch {
            declared: block.dim().saturating_sub(1),
            found: field.degree(),
        });
    }
    let aspect = block.aspect_ratio();
    if aspect >= cfg.aspect_bound {
        log::warn!(
            "flux block aspect ratio {aspect:.3} is at or above the bound {}",
            cfg.aspect_bound
        );
    }
    let mut phi = phi.clone();
    if !phi.has_jacobian() {
        phi = phi.with_fd_step(cfg.jacobian_step);
    }
    let sb = SingularBlock::new(block.clone(), phi)?;
    let total = integrate_over_chain(field, &Chain::from_block(sb).boundary(), q)?;
    Ok(total / block.volume())
}

/// The flux derivative tensor at `x`: every increasing component by the
/// face-centered stencil (sharing the `2n` samples) when
/// `cfg.face_subdivisions == 1`, otherwise by per-component flux averages
/// with a midpoint grid on each cube face.
pub fn exterior_derivative_at(
    field: &FormField,
    x: &[f64],
    cfg: &DerivConfig,
) -> Result<AlternatingTensor> {
    cfg.validate()?;
    let n = field.n();
    if x.len() != n {
        return Err(Error::dim("derivative point", n, x.len()));
    }
    let k = field.degree() + 1;
    if k > n {
        return Err(Error::DegreeOutOfRange { degree: k, n });
    }
    if cfg.face_subdivisions > 1 {
        return flux_components(field, x, cfg);
    }

    let eps = cfg.eps;
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    let mut p = x.to_vec();
    for i in 0..n {
        p[i] = x[i] + eps;
        plus.push(field.sample(&p)?);
        p[i] = x[i] - eps;
        minus.push(field.sample(&p)?);
        p[i] = x[i];
    }

    let mut out = AlternatingTensor::zero(n, k)?;
    let scale = 1.0 / (2.0 * eps);
    multiindex::for_each_combination(n, k, |q| {
        let full = MultiIndex::from_sorted_unchecked(n, q.to_vec());
        let mut acc = 0.0;
        for (a, &qa) in q.iter().enumerate() {
            let rest = full.without_position(a);
            let diff = plus[qa - 1].get(&rest) - minus[qa - 1].get(&rest);
            if a % 2 == 0 {
                acc += diff;
            } else {
                acc -= diff;
            }
        }
        out.set(&full, acc * scale);
    });
    Ok(out)
}

/// m > 1 generalization: each component is the flux average over the
/// `2 eps`-cube in its coordinate plane with a midpoint face grid.
fn flux_components(field: &FormField, x: &[f64], cfg: &DerivConfig) -> Result<AlternatingTensor> {
    let n = field.n();
    let k = field.degree() + 1;
    let q = QuadratureSpec::new(cfg.face_subdivisions)?;
    let block = Block::cube(&vec![0.0; k], cfg.eps)?;
    let mut out = AlternatingTensor::zero(n, k)?;
    for idx in multiindex::enumerate(n, k)? {
        let phi = SmoothMap::axis_embedding(x.to_vec(), idx.indices().to_vec())?;
        let avg = flux_average(field, &phi, &block, cfg, &q)?;
        out.set(&idx, avg);
    }
    Ok(out)
}

/// Richardson-refined derivative.
#[derive(Clone, Debug)]
pub struct RefinedDerivative {
    pub tensor: AlternatingTensor,
    /// Max component change at the last extrapolation level.
    pub error_estimate: f64,
    /// Empirical order from the raw stencil sequence (needs >= 3 levels and
    /// non-negligible level differences).
    pub observed_order: Option<f64>,
    /// False when the observed order strays from 2 by more than 0.5 — the
    /// even-error-expansion assumption behind the extrapolation is then
    /// suspect and the refined value should not be trusted blindly.
    pub reliable: bool,
}

/// Extrapolate the centered stencil over `eps, eps/2, ..., eps/2^r` with the
/// usual `O(eps^2)` elimination (`r = cfg.richardson_levels >= 1`).
pub fn exterior_derivative_refined(
    field: &FormField,
    x: &[f64],
    cfg: &DerivConfig,
) -> Result<RefinedDerivative> {
    cfg.validate()?;
    let r = cfg.richardson_levels;
    if r == 0 {
        return Err(Error::Config(
            "richardson_levels must be at least 1 for refinement".to_string(),
        ));
    }
    let mut raw = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let level = DerivConfig {
            eps: cfg.eps / (1u64 << i) as f64,
            richardson_levels: 0,
            ..*cfg
        };
        raw.push(exterior_derivative_at(field, x, &level)?);
    }

    // triangular table, one row at a time; R[i][j] cancels the eps^(2j) term
    let mut prev_row = vec![raw[0].clone()];
    let mut prev_diag = raw[0].clone();
    for (i, base) in raw.iter().enumerate().skip(1) {
        let mut row = vec![base.clone()];
        for j in 1..=i {
            let f = 4f64.powi(j as i32);
            row.push(AlternatingTensor::linear_comb(
                f / (f - 1.0),
                &row[j - 1],
                -1.0 / (f - 1.0),
                &prev_row[j - 1],
            ));
        }
        prev_diag = prev_row.last().expect("nonempty row").clone();
        prev_row = row;
    }
    let tensor = prev_row.last().expect("nonempty row").clone();
    let error_estimate = tensor.max_component_diff(&prev_diag);

    let sample_scale = raw.iter().map(AlternatingTensor::max_abs).fold(0.0, f64::max);
    let floor = 1e-13 * (1.0 + sample_scale);
    let diffs: Vec<f64> = raw
        .windows(2)
        .map(|w| w[0].max_component_diff(&w[1]))
        .collect();
    let mut orders = Vec::new();
    for w in diffs.windows(2) {
        if w[0] > floor && w[1] > floor {
            orders.push((w[0] / w[1]).log2());
        }
    }
    let observed_order = if orders.is_empty() {
        None
    } else {
        Some(orders.iter().sum::<f64>() / orders.len() as f64)
    };
    let reliable = observed_order.is_none_or(|o| (o - 2.0).abs() <= 0.5);

    Ok(RefinedDerivative {
        tensor,
        error_estimate,
        observed_order,
        reliable,
    })
}

/// Outcome of an empirical convergence study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvergenceOrder {
    /// Some level's error was at the numerical-zero floor — the stencil is
    /// exact for this field (constants, forms with affine coefficients, ...).
    Exact,
    /// Least-squares slope of log(error) against log(eps).
    Slope(f64),
}

impl serde::Serialize for ConvergenceOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ConvergenceOrder::Exact => s.serialize_str("exact"),
            ConvergenceOrder::Slope(v) => s.serialize_f64(*v),
        }
    }
}

/// Max-component errors against `reference` over a strictly decreasing eps
/// sequence (at least 3 entries), reduced to a log-log slope.
pub fn convergence_order(
    field: &FormField,
    x: &[f64],
    eps_sequence: &[f64],
    reference: &AlternatingTensor,
    cfg: &DerivConfig,
) -> Result<ConvergenceOrder> {
    if eps_sequence.len() < 3 {
        return Err(Error::Config(format!(
            "convergence study needs at least 3 epsilons, got {}",
            eps_sequence.len()
        )));
    }
    for w in eps_sequence.windows(2) {
        if w[1].is_nan() || w[1] >= w[0] {
            return Err(Error::Config(
                "eps sequence must be strictly decreasing".to_string(),
            ));
        }
    }
    if reference.n() != field.n() || reference.degree() != field.degree() + 1 {
        return Err(Error::dim(
            "convergence reference degree",
            field.degree() + 1,
            reference.degree(),
        ));
    }
    let floor = 1e-13 * (1.0 + reference.max_abs());
    let mut pts = Vec::with_capacity(eps_sequence.len());
    for &eps in eps_sequence {
        let level = DerivConfig { eps, ..*cfg };
        let err = exterior_derivative_at(field, x, &level)?.max_component_diff(reference);
        if err <= floor {
            return Ok(ConvergenceOrder::Exact);
        }
        pts.push((eps.ln(), err.ln()));
    }
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Ok(ConvergenceOrder::Slope(sxy / sxx))
}
