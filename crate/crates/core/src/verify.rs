//! Numerical realizations of the structural theorems: Stokes residuals,
//! D-squared-equals-zero, numeric-versus-analytic compatibility, and the
//! trisection-driven mean-value locator.

use crate::chains::{Block, Chain, SingularBlock};
use crate::deriv::{exterior_derivative_at, DerivConfig};
use crate::forms::{AlternatingTensor, FormField};
use crate::integrate::{
    boundary_integral, integrate_density_over_block, integrate_over_chain, QuadratureSpec,
};
use crate::multiindex::MultiIndex;
use crate::util::{pairwise_sum, try_for_each_counter};
use crate::{Error, Result};

/// Root tolerance for the trisection selection: the chosen sub-block's
/// average boundary flux must match the original block's this closely.
pub const TRISECTION_ROOT_TOL: f64 = 1e-10;

/// When all sub-block averages already agree this closely, the centered
/// sub-block is selected without root-finding.
pub const TRISECTION_EQUAL_TOL: f64 = 1e-12;

/// Bisection iteration cap per trisection depth.
pub const BISECTION_CAP: usize = 60;

/// Smallest stencil half-width used for derivative estimates at interior
/// points whose distance to the boundary would otherwise force eps to 0.
const MIN_INTERIOR_EPS: f64 = 1e-8;

/// Both sides of the Stokes identity and their absolute gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesReport {
    /// Integral of the field over the boundary of the chain.
    pub boundary: f64,
    /// Integral of the (numerical or analytic) derivative over the chain.
    pub interior: f64,
    pub residual: f64,
}

/// Stencil half-width for a derivative taken at an interior node: the
/// configured eps, capped at a tenth of the distance to the enclosing
/// block's boundary, floored so it never collapses entirely.
fn interior_eps(cfg: &DerivConfig, distance: f64) -> f64 {
    (0.1 * distance).min(cfg.eps).max(MIN_INTERIOR_EPS)
}

fn interior_derivative_integral(
    field: &FormField,
    c: &Chain,
    cfg: &DerivConfig,
    q: &QuadratureSpec,
) -> Result<f64> {
    let mut vals = Vec::with_capacity(c.terms().len());
    for (coef, sb) in c.terms() {
        let domain = sb.domain().clone();
        let v = integrate_density_over_block(domain.intervals(), q.subdivisions_per_axis, |t| {
            let x = sb.eval(t);
            let d = if field.has_analytic_derivative() {
                field.sample_analytic_derivative(&x)?
            } else {
                let node_cfg = DerivConfig {
                    eps: interior_eps(cfg, domain.boundary_distance(t)),
                    ..*cfg
                };
                exterior_derivative_at(field, &x, &node_cfg)?
            };
            d.apply(&sb.jacobian_columns(t))
        })?;
        vals.push(*coef as f64 * v);
    }
    Ok(pairwise_sum(&vals))
}

/// Evaluate both sides of `int_{boundary c} omega = int_c D omega`.
///
/// The boundary side integrates the field over the boundary chain; the
/// interior side integrates the derivative — the analytic one when the
/// field carries it, otherwise the stencil with eps capped per node so the
/// stencil stays inside the term's domain block.  The interior quadrature
/// uses the fixed `q.subdivisions_per_axis` (no doubling).
pub fn stokes_report(
    field: &FormField,
    c: &Chain,
    cfg: &DerivConfig,
    q: &QuadratureSpec,
) -> Result<StokesReport> {
    cfg.validate()?;
    if c.dim() == 0 {
        return Err(Error::Config(
            "stokes needs a chain of dimension at least 1".to_string(),
        ));
    }
    if field.n() != c.n() {
        return Err(Error::dim("stokes field space", c.n(), field.n()));
    }
    if field.degree() + 1 != c.dim() {
        return Err(Error::DegreeMismatch {
            declared: c.dim() - 1,
            found: field.degree(),
        });
    }
    let boundary = integrate_over_chain(field, &c.boundary(), q)?;
    let interior = interior_derivative_integral(field, c, cfg, q)?;
    Ok(StokesReport {
        boundary,
        interior,
        residual: (boundary - interior).abs(),
    })
}

/// `|int_{boundary c} omega - int_c D omega|`.
pub fn stokes_residual(
    field: &FormField,
    c: &Chain,
    cfg: &DerivConfig,
    q: &QuadratureSpec,
) -> Result<f64> {
    stokes_report(field, c, cfg, q).map(|r| r.residual)
}

/// The degree-(k+1) tensor `D(D omega)` at `x`: the outer stencil applied
/// to the field of inner stencil estimates.
pub fn d_squared_tensor(
    field: &FormField,
    x: &[f64],
    outer: &DerivConfig,
    inner: &DerivConfig,
) -> Result<AlternatingTensor> {
    outer.validate()?;
    inner.validate()?;
    let n = field.n();
    let k = field.degree() + 2;
    if k > n {
        return Err(Error::DegreeOutOfRange { degree: k, n });
    }
    let inner_field = {
        let field = field.clone();
        let inner = *inner;
        FormField::from_fn(n, field.degree() + 1, move |y| {
            exterior_derivative_at(&field, y, &inner)
        })?
    };
    exterior_derivative_at(&inner_field, x, outer)
}

/// Max-norm of `D(D omega)` at `x` with the inner stencil a tenth of the
/// outer (pass `eps = 1e-3` for the canonical `1e-3 / 1e-4` pairing).
pub fn d_squared_residual(field: &FormField, x: &[f64], cfg: &DerivConfig) -> Result<f64> {
    let inner = DerivConfig {
        eps: cfg.eps * 0.1,
        ..*cfg
    };
    Ok(d_squared_tensor(field, x, cfg, &inner)?.max_abs())
}

/// Max-norm gap between the stencil derivative and the field's analytic
/// derivative at `x`.  Errors when no analytic derivative is attached.
pub fn compatibility_check(field: &FormField, x: &[f64], cfg: &DerivConfig) -> Result<f64> {
    let numeric = exterior_derivative_at(field, x, cfg)?;
    let analytic = field.sample_analytic_derivative(x)?;
    Ok(numeric.max_component_diff(&analytic))
}

/// Result of the mean-value search.
#[derive(Clone, Debug)]
pub struct MvtResult {
    /// Located point, strictly inside the original block.
    pub xi: Vec<f64>,
    /// The original block's average boundary flux.
    pub target: f64,
    /// `D omega_xi(e_1, ..., e_k)` at the located point.
    pub attained: f64,
    /// Trisection depths actually performed.
    pub depth: usize,
    /// `|attained - target|`.
    pub residual: f64,
    /// Average boundary flux of the selected block at every depth,
    /// starting with the original block.  Each entry matches `target` to
    /// the root tolerance — that is the trisection invariant.
    pub level_averages: Vec<f64>,
}

fn average_flux(field: &FormField, block: &Block, q: &QuadratureSpec) -> Result<f64> {
    Ok(boundary_integral(field, &SingularBlock::inclusion(block.clone()), q)? / block.volume())
}

/// Bisection along the two-segment path `x_neg -> x_center -> x_pos`,
/// maintaining `m <= 0` on the left and `m >= 0` on the right.
fn bisect_path<F>(
    mut m: F,
    x_neg: &[f64],
    x_center: &[f64],
    x_pos: &[f64],
    depth: usize,
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let gamma = |t: f64| -> Vec<f64> {
        let (from, to, s) = if t <= 0.5 {
            (x_neg, x_center, 2.0 * t)
        } else {
            (x_center, x_pos, 2.0 * t - 1.0)
        };
        from.iter()
            .zip(to)
            .map(|(&a, &b)| a + s * (b - a))
            .collect()
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        let x = gamma(mid);
        let v = m(&x)?;
        if v.abs() <= TRISECTION_ROOT_TOL {
            return Ok(x);
        }
        if best.as_ref().is_none_or(|(b, _)| v.abs() < *b) {
            best = Some((v.abs(), x));
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (gap, _) = best.expect("bisection ran");
    Err(Error::Bracketing {
        depth,
        detail: format!(
            "bisection along the sub-block path stalled with |average - target| = {gap:.3e} \
             after {BISECTION_CAP} iterations; the field's boundary flux does not vary \
             continuously here"
        ),
    })
}

/// Locate a mean-value point: iterate the trisection construction on the
/// inclusion of `block`, at each depth selecting a 1/3-scale sub-block
/// whose average boundary flux equals the ORIGINAL block's average, until
/// `max_depth` is reached or the longest side drops below `size_tol`
/// (pass 0.0 to always run to `max_depth`).  The returned point is the
/// final block's center; `attained` is the derivative component on the
/// block axes, with the stencil width capped inside the block.
pub fn mvt_locate(
    field: &FormField,
    block: &Block,
    cfg: &DerivConfig,
    q: &QuadratureSpec,
    max_depth: usize,
    size_tol: f64,
) -> Result<MvtResult> {
    cfg.validate()?;
    let k = block.dim();
    if k == 0 {
        return Err(Error::Config(
            "mean-value search needs a block of dimension at least 1".to_string(),
        ));
    }
    if field.n() != k {
        return Err(Error::dim("mvt field space", k, field.n()));
    }
    if field.degree() + 1 != k {
        return Err(Error::DegreeMismatch {
            declared: k - 1,
            found: field.degree(),
        });
    }

    let target = average_flux(field, block, q)?;
    let mut level_averages = vec![target];
    let mut cur = block.clone();
    let mut depth = 0;

    while depth < max_depth && cur.longest_side() > size_tol {
        let corner: Vec<f64> = cur.intervals().iter().map(|&(a, _)| a).collect();
        let h: Vec<f64> = cur.intervals().iter().map(|&(a, b)| (b - a) / 3.0).collect();
        let mut m = |x: &[f64]| -> Result<f64> {
            Ok(average_flux(field, &Block::from_corner(x, &h)?, q)? - target)
        };

        // the 3^k grid of sub-block corners
        let mut min_v = f64::INFINITY;
        let mut max_v = f64::NEG_INFINITY;
        let mut min_x = corner.clone();
        let mut max_x = corner.clone();
        try_for_each_counter(&vec![3usize; k], |mu| {
            let x: Vec<f64> = (0..k).map(|i| corner[i] + mu[i] as f64 * h[i]).collect();
            let v = m(&x)?;
            if v < min_v {
                min_v = v;
                min_x = x.clone();
            }
            if v > max_v {
                max_v = v;
                max_x = x;
            }
            Ok::<(), Error>(())
        })?;

        let center_x: Vec<f64> = (0..k).map(|i| corner[i] + h[i]).collect();
        let spread = min_v.abs().max(max_v.abs());
        let chosen_x = if spread <= TRISECTION_EQUAL_TOL {
            // all sub-averages agree: take the centered sub-block
            center_x
        } else if min_v <= 0.0 && 0.0 <= max_v {
            bisect_path(&mut m, &min_x, &center_x, &max_x, depth)?
        } else if spread <= TRISECTION_ROOT_TOL {
            center_x
        } else {
            return Err(Error::Bracketing {
                depth,
                detail: format!(
                    "sub-block averages do not bracket the target \
                     (offsets range from {min_v:.3e} to {max_v:.3e})"
                ),
            });
        };

        let chosen = Block::from_corner(&chosen_x, &h)?;
        level_averages.push(average_flux(field, &chosen, q)?);
        cur = chosen;
        depth += 1;
    }

    let xi = cur.center();
    let att_cfg = DerivConfig {
        eps: interior_eps(cfg, block.boundary_distance(&xi)),
        ..*cfg
    };
    let attained = exterior_derivative_at(field, &xi, &att_cfg)?.get(&MultiIndex::full(k));
    Ok(MvtResult {
        residual: (attained - target).abs(),
        xi,
        target,
        attained,
        depth,
        level_averages,
    })
}
