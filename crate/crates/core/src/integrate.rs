//! Riemann integration of forms over blocks, singular blocks, and chains.
//!
//! The integral of a k-form over a singular k-block is the integral of the
//! pullback density over the domain block: at a parameter point `t`, sample
//! the form at the mapped point and apply it to the Jacobian columns.
//! Quadrature is composite midpoint — order 2, and it never places a node on
//! the block boundary.  Accumulation is pairwise in a fixed traversal order,
//! so results are deterministic however the node evaluations are scheduled.

use crate::chains::{Chain, SingularBlock};
use crate::forms::FormField;
use crate::util::{pairwise_sum, try_for_each_counter};
use crate::{Error, Result};

/// Composite midpoint quadrature settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Midpoint cells per axis (m >= 1).
    pub subdivisions_per_axis: usize,
    /// When set, keep doubling the per-axis cell count until two successive
    /// estimates differ by at most `rtol * max(1, |value|)`, or the node
    /// budget runs out (warned).
    pub rtol: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            subdivisions_per_axis: 16,
            rtol: None,
        }
    }
}

impl QuadratureSpec {
    pub fn new(subdivisions_per_axis: usize) -> Result<Self> {
        if subdivisions_per_axis == 0 {
            return Err(Error::Config(
                "quadrature needs at least one subdivision per axis".to_string(),
            ));
        }
        Ok(QuadratureSpec {
            subdivisions_per_axis,
            rtol: None,
        })
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = Some(rtol);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.subdivisions_per_axis == 0 {
            return Err(Error::Config(
                "quadrature needs at least one subdivision per axis".to_string(),
            ));
        }
        if let Some(r) = self.rtol {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::Config(format!(
                    "quadrature rtol must be a positive finite number, got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Node budget for the `rtol` doubling loop.
const DOUBLING_NODE_CAP: usize = 1 << 22;

/// The pullback integrand `(c*omega)_t(e_1, ..., e_k)`: sample the form at
/// the mapped point and apply it to the Jacobian columns at `t`.
pub fn pullback_density(field: &FormField, sb: &SingularBlock, t: &[f64]) -> Result<f64> {
    let x = sb.eval(t);
    let omega = field.sample(&x)?;
    omega.apply(&sb.jacobian_columns(t))
}

/// Composite midpoint sum of a scalar density over a block with `m` cells
/// per axis.  The 0-block integrates to the single density value.
pub(crate) fn integrate_density_over_block<F>(
    intervals: &[(f64, f64)],
    m: usize,
    mut density: F,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let k = intervals.len();
    if k == 0 {
        return density(&[]);
    }
    let steps: Vec<f64> = intervals.iter().map(|&(a, b)| (b - a) / m as f64).collect();
    let cell_vol: f64 = steps.iter().product();
    let dims = vec![m; k];
    let mut vals = Vec::with_capacity(m.saturating_pow(k as u32).min(DOUBLING_NODE_CAP));
    let mut t = vec![0.0; k];
    try_for_each_counter(&dims, |idx| {
        for i in 0..k {
            t[i] = intervals[i].0 + (idx[i] as f64 + 0.5) * steps[i];
        }
        vals.push(density(&t)? * cell_vol);
        Ok(())
    })?;
    Ok(pairwise_sum(&vals))
}

fn check_degrees(field: &FormField, n: usize, dim: usize, context: &'static str) -> Result<()> {
    if field.n() != n {
        return Err(Error::dim(context, n, field.n()));
    }
    if field.degree() != dim {
        return Err(Error::DegreeMismatch {
            declared: dim,
            found: field.degree(),
        });
    }
    Ok(())
}

/// Integral of a degree-k field over one singular k-block.
///
/// With `rtol` set, the per-axis cell count doubles until successive
/// estimates agree; the node budget caps the loop with a warning.
pub fn integrate_over_singular_block(
    field: &FormField,
    sb: &SingularBlock,
    q: &QuadratureSpec,
) -> Result<f64> {
    q.validate()?;
    check_degrees(field, sb.target_dim(), sb.domain_dim(), "integrand space")?;
    let k = sb.domain_dim();
    if k == 0 {
        return pullback_density(field, sb, &[]);
    }
    let mut m = q.subdivisions_per_axis;
    let mut prev: Option<f64> = None;
    loop {
        let val = integrate_density_over_block(sb.domain().intervals(), m, |t| {
            pullback_density(field, sb, t)
        })?;
        let Some(rtol) = q.rtol else {
            return Ok(val);
        };
        if let Some(p) = prev {
            if (val - p).abs() <= rtol * val.abs().max(1.0) {
                return Ok(val);
            }
        }
        prev = Some(val);
        let next = m.checked_mul(2);
        let nodes = next.and_then(|m2| m2.checked_pow(k as u32));
        match (next, nodes) {
            (Some(m2), Some(nn)) if nn <= DOUBLING_NODE_CAP => m = m2,
            _ => {
                log::warn!(
                    "quadrature doubling stopped at m={m} (node budget); \
                     last two estimates differ by {:.3e}",
                    prev.map_or(f64::NAN, |p| (val - p).abs())
                );
                return Ok(val);
            }
        }
    }
}

/// Coefficient-weighted sum of per-term integrals; the empty chain
/// integrates to 0.  For a 0-chain this is the signed sum of point samples.
pub fn integrate_over_chain(field: &FormField, c: &Chain, q: &QuadratureSpec) -> Result<f64> {
    check_degrees(field, c.n(), c.dim(), "integrand space")?;
    let mut vals = Vec::with_capacity(c.terms().len());
    for (coef, sb) in c.terms() {
        vals.push(*coef as f64 * integrate_over_singular_block(field, sb, q)?);
    }
    Ok(pairwise_sum(&vals))
}

/// Integral of a degree-(k-1) field over the boundary of a singular k-block.
pub fn boundary_integral(field: &FormField, sb: &SingularBlock, q: &QuadratureSpec) -> Result<f64> {
    integrate_over_chain(field, &Chain::from_block(sb.clone()).boundary(), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{Block, SmoothMap};
    use crate::forms::{AlternatingTensor, FormExpression};

    fn expr_field(text: &str, n: usize, degree: usize) -> FormField {
        FormExpression::parse(text, n, degree).unwrap().to_field()
    }

    fn quad(m: usize) -> QuadratureSpec {
        QuadratureSpec::new(m).unwrap()
    }

    #[test]
    fn density_on_inclusion_is_the_component() {
        let field = expr_field("x1*x2*dx1^dx2", 2, 2);
        let sb = SingularBlock::inclusion(Block::unit(2));
        let d = pullback_density(&field, &sb, &[0.5, 0.25]).unwrap();
        assert!((d - 0.125).abs() < 1e-15);
    }

    #[test]
    fn density_picks_up_the_jacobian_factor() {
        // t -> 2t from [0,1] to R, integrand 1*dx1: density is the 1x1 Jacobian
        let field = expr_field("1*dx1", 1, 1);
        let sb =
            SingularBlock::affine(Block::unit(1), vec![vec![2.0]], vec![0.0]).unwrap();
        for t in [0.1, 0.5, 0.9] {
            assert_eq!(pullback_density(&field, &sb, &[t]).unwrap(), 2.0);
        }
    }

    #[test]
    fn density_on_a_cube_face_is_the_frozen_coefficient() {
        // upper axis-1 face of the cube around x, integrand x1 dx2^dx3:
        // the face parametrizes (t2, t3) -> (x1 + eps, t2, t3), so the
        // density is the constant x1 + eps
        let x = [1.0, 2.0, 3.0];
        let eps = 0.01;
        let field = expr_field("x1*dx2^dx3", 3, 2);
        let cube = SingularBlock::inclusion(Block::cube(&x, eps).unwrap());
        let face = cube.face(1, 1).unwrap();
        let d = pullback_density(&field, &face, &[2.0, 3.0]).unwrap();
        assert!((d - 1.01).abs() < 1e-15);
    }

    #[test]
    fn linear_integrand_is_exact_for_midpoint() {
        let field = expr_field("x1*dx1", 1, 1);
        let sb = SingularBlock::inclusion(Block::unit(1));
        let v = integrate_over_singular_block(&field, &sb, &quad(1000)).unwrap();
        assert!((v - 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_field_integrates_to_zero() {
        let field = FormField::zero(2, 2).unwrap();
        let sb = SingularBlock::inclusion(Block::unit(2));
        assert_eq!(
            integrate_over_singular_block(&field, &sb, &quad(8)).unwrap(),
            0.0
        );
    }

    #[test]
    fn heaviside_boundary_flux_matches_the_closed_form() {
        // boundary integral of (sin x1 + step(x2)) dx2 over x + [0,h1]x[0,h2]
        // equals h2 (sin(x1+h1) - sin x1): the step parts cancel between the
        // two vertical faces
        let field = expr_field("(sin(x1)+step(x2))*dx2", 2, 1);
        let (x, h) = ([0.2, -0.3], [0.5, 0.4]);
        let sb = SingularBlock::inclusion(Block::from_corner(&x, &h).unwrap());
        let v = boundary_integral(&field, &sb, &quad(16)).unwrap();
        let expect = h[1] * ((x[0] + h[0]).sin() - x[0].sin());
        assert!((v - expect).abs() < 1e-10, "{v} vs {expect}");
    }

    #[test]
    fn zero_chain_integral_is_the_signed_point_sum() {
        let f = expr_field("x1^2", 1, 0);
        let seg = Chain::from_block(SingularBlock::inclusion(
            Block::new(vec![(1.0, 2.0)]).unwrap(),
        ));
        let v = integrate_over_chain(&f, &seg.boundary(), &quad(1)).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn opposite_coefficients_cancel() {
        let field = expr_field("exp(x1)*sin(x2)*dx1^dx2", 2, 2);
        let sb = SingularBlock::inclusion(Block::unit(2));
        let c = Chain::new(vec![(1, sb.clone()), (-1, sb)]).unwrap();
        assert_eq!(integrate_over_chain(&field, &c, &quad(8)).unwrap(), 0.0);
    }

    #[test]
    fn green_lhs_on_the_unit_square() {
        // P = -x2, Q = x1: circulation of P dx1 + Q dx2 around the square is 2
        let field = expr_field("x1*dx2-x2*dx1", 2, 1);
        let sb = SingularBlock::inclusion(Block::unit(2));
        let v = boundary_integral(&field, &sb, &quad(64)).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn x1_dx2_boundary_integral_is_the_area() {
        let field = expr_field("x1*dx2", 2, 1);
        let sb = SingularBlock::inclusion(Block::unit(2));
        let v = boundary_integral(&field, &sb, &quad(32)).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_form_boundary_integral_vanishes_exactly() {
        let field = expr_field("3*dx1+0.5*dx2-2*dx3", 3, 1);
        for axes in [[1usize, 2], [1, 3], [2, 3]] {
            let phi = SmoothMap::axis_embedding(vec![0.3, -1.0, 2.0], axes.to_vec()).unwrap();
            let sb =
                SingularBlock::new(Block::new(vec![(-0.2, 0.4), (0.1, 0.9)]).unwrap(), phi)
                    .unwrap();
            assert_eq!(boundary_integral(&field, &sb, &quad(4)).unwrap(), 0.0);
        }
    }

    #[test]
    fn radial_form_loops_to_zero_around_eps_squares() {
        // the radial 1-form is exact, so its circulation around any closed
        // square in a coordinate plane vanishes
        let field = expr_field("x1*dx1+x2*dx2+x3*dx3", 3, 1);
        let x = [1.0, 1.0, 1.0];
        for axes in [[1usize, 2], [1, 3], [2, 3]] {
            let phi = SmoothMap::axis_embedding(x.to_vec(), axes.to_vec()).unwrap();
            let sb = SingularBlock::new(
                Block::new(vec![(-0.01, 0.01), (-0.01, 0.01)]).unwrap(),
                phi,
            )
            .unwrap();
            let v = boundary_integral(&field, &sb, &quad(4)).unwrap();
            assert!(v.abs() <= 1e-12, "plane {axes:?}: {v}");
        }
    }

    #[test]
    fn linearity_on_fixed_nodes() {
        let omega = expr_field("sin(x1)*dx2", 2, 1);
        let eta = expr_field("x2^3*dx1", 2, 1);
        let (a, b) = (1.75, -0.4);
        let combo = expr_field("1.75*sin(x1)*dx2-0.4*x2^3*dx1", 2, 1);
        let sb = SingularBlock::inclusion(Block::new(vec![(0.0, 2.0), (-1.0, 1.0)]).unwrap());
        let chain = Chain::from_block(sb).boundary();
        let q = quad(16);
        let lhs = integrate_over_chain(&combo, &chain, &q).unwrap();
        let rhs = a * integrate_over_chain(&omega, &chain, &q).unwrap()
            + b * integrate_over_chain(&eta, &chain, &q).unwrap();
        assert!(
            (lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()),
            "{lhs} vs {rhs}"
        );
    }

    #[test]
    fn axis_swap_flips_the_sign() {
        let field = expr_field("(x1+2*x2)*dx1^dx2", 2, 2);
        let straight = SingularBlock::inclusion(Block::unit(2));
        let swapped = SingularBlock::affine(
            Block::unit(2),
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![0.0, 0.0],
        )
        .unwrap();
        let q = quad(32);
        let a = integrate_over_singular_block(&field, &straight, &q).unwrap();
        let b = integrate_over_singular_block(&field, &swapped, &q).unwrap();
        assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
        assert!(a > 0.5, "sanity: the integral is substantial");
    }

    #[test]
    fn affine_naturality_pullback_vs_direct() {
        // psi(t) = (2 t1 + 1, t2 - t1); integrating psi*omega over the
        // boundary of B equals integrating omega over psi of the boundary
        let omega = expr_field("exp(x1/4)*x2*dx2", 2, 1);
        let matrix = vec![vec![2.0, 0.0], vec![-1.0, 1.0]];
        let offset = vec![1.0, 0.0];
        let block = Block::unit(2);
        let q = quad(64);

        let direct = {
            let sb =
                SingularBlock::affine(block.clone(), matrix.clone(), offset.clone()).unwrap();
            boundary_integral(&omega, &sb, &q).unwrap()
        };
        let pulled = {
            let omega = omega.clone();
            let cols: Vec<Vec<f64>> =
                (0..2).map(|j| matrix.iter().map(|r| r[j]).collect()).collect();
            let psi = SmoothMap::affine(matrix.clone(), offset.clone()).unwrap();
            let pullback = FormField::from_fn(2, 1, move |t| {
                let w = omega.sample(&psi.eval(t))?;
                let mut out = AlternatingTensor::zero(2, 1)?;
                for (i, col) in cols.iter().enumerate() {
                    let v = w.apply(std::slice::from_ref(col))?;
                    out.set(&crate::MultiIndex::new(2, vec![i + 1])?, v);
                }
                Ok(out)
            })
            .unwrap();
            boundary_integral(&pullback, &SingularBlock::inclusion(block), &q).unwrap()
        };
        assert!(
            (direct - pulled).abs() <= 1e-10 * (1.0 + direct.abs()),
            "{direct} vs {pulled}"
        );
    }

    #[test]
    fn midpoint_error_shrinks_at_second_order() {
        let field = expr_field("exp(x1)*dx1", 1, 1);
        let sb = SingularBlock::inclusion(Block::new(vec![(0.0, 2.0)]).unwrap());
        let exact = 2f64.exp() - 1.0;
        let errs: Vec<f64> = [4usize, 8, 16, 32]
            .iter()
            .map(|&m| {
                (integrate_over_singular_block(&field, &sb, &quad(m)).unwrap() - exact).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(
                (order - 2.0).abs() < 0.3,
                "observed order {order}, errors {errs:?}"
            );
        }
    }

    #[test]
    fn rtol_doubling_converges() {
        let field = expr_field("exp(x1)*dx1", 1, 1);
        let sb = SingularBlock::inclusion(Block::unit(1));
        let q = quad(4).with_rtol(1e-10);
        let v = integrate_over_singular_block(&field, &sb, &q).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let field = expr_field("x1*dx1", 1, 1);
        let sb2 = SingularBlock::inclusion(Block::unit(2));
        assert!(integrate_over_singular_block(&field, &sb2, &quad(4)).is_err());
        let two_form = expr_field("x1*dx1^dx2", 2, 2);
        let line_in_r2 =
            SingularBlock::affine(Block::unit(1), vec![vec![1.0], vec![0.0]], vec![0.0, 0.0])
                .unwrap();
        assert!(integrate_over_singular_block(&two_form, &line_in_r2, &quad(4)).is_err());
        assert!(QuadratureSpec::new(0).is_err());
    }

    #[test]
    fn sampling_error_reports_the_node() {
        let field = FormField::from_fn(1, 1, |x| {
            Err(Error::Sampling {
                point: x.to_vec(),
                reason: "no data".to_string(),
            })
        })
        .unwrap();
        let sb = SingularBlock::inclusion(Block::unit(1));
        let err = integrate_over_singular_block(&field, &sb, &quad(2)).unwrap_err();
        match err {
            Error::Sampling { point, .. } => assert_eq!(point, vec![0.25]),
            other => panic!("expected sampling error, got {other:?}"),
        }
    }
}
