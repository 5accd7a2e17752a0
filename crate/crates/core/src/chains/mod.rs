//! Blocks, C^1 singular blocks, and integer chains of them.
//!
//! A [`Block`] is a closed product of non-degenerate intervals in `R^k`; the
//! empty product (`k = 0`) is a point and shows up as the domain of 0-blocks
//! and of faces of 1-blocks.  A [`SingularBlock`] pairs a block with a C^1
//! [`SmoothMap`] into `R^n`; a [`Chain`] is a formal integer combination of
//! singular blocks of one dimension.  The boundary operator produces the `2k`
//! faces with the alternating signs `(-1)^(i+j)` (axis `i` is 1-based, side
//! `j` is 0 at the lower wall, 1 at the upper), so for `[a, b]` it yields
//! `c(b) - c(a)`.

mod file;

pub use file::{AffineSpec, ChainFile, MapSpec, ParamRegistry, TermSpec};

use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// A closed axis-aligned product of intervals `[a_i, b_i]` with `a_i < b_i`.
///
/// The empty interval list is allowed and stands for a point (the domain of a
/// 0-block); its volume is the empty product 1, its side lengths are 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    intervals: Vec<(f64, f64)>,
}

impl Block {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::DegenerateInterval { a, b });
            }
        }
        Ok(Block { intervals })
    }

    /// The 0-dimensional block (a point domain).
    pub fn point() -> Self {
        Block {
            intervals: Vec::new(),
        }
    }

    /// `[0, 1]^k`.
    pub fn unit(k: usize) -> Self {
        Block {
            intervals: vec![(0.0, 1.0); k],
        }
    }

    /// Block with lower corner `corner` and side lengths `sides`.
    pub fn from_corner(corner: &[f64], sides: &[f64]) -> Result<Self> {
        if corner.len() != sides.len() {
            return Err(Error::dim("block corner/sides", corner.len(), sides.len()));
        }
        Block::new(
            corner
                .iter()
                .zip(sides)
                .map(|(&a, &h)| (a, a + h))
                .collect(),
        )
    }

    /// Axis-aligned cube centered at `center`.
    pub fn cube(center: &[f64], half_side: f64) -> Result<Self> {
        Block::new(
            center
                .iter()
                .map(|&c| (c - half_side, c + half_side))
                .collect(),
        )
    }

    pub(crate) fn from_intervals_unchecked(intervals: Vec<(f64, f64)>) -> Self {
        Block { intervals }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Interval of 0-based axis `i`.
    pub fn side(&self, i: usize) -> (f64, f64) {
        self.intervals[i]
    }

    /// Product of side lengths; 1 for the 0-block.
    pub fn volume(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).product()
    }

    /// Longest side `L`; 0 for the 0-block.
    pub fn longest_side(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }

    /// Shortest side `l`; 0 for the 0-block.
    pub fn shortest_side(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(a, b)| b - a)
            .fold(f64::INFINITY, f64::min)
            .min(self.longest_side())
    }

    /// Aspect ratio `L / l`; 1 for the 0-block.
    pub fn aspect_ratio(&self) -> f64 {
        if self.intervals.is_empty() {
            return 1.0;
        }
        self.longest_side() / self.shortest_side()
    }

    pub fn center(&self) -> Vec<f64> {
        self.intervals
            .iter()
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn contains(&self, t: &[f64]) -> bool {
        t.len() == self.dim()
            && self
                .intervals
                .iter()
                .zip(t)
                .all(|(&(a, b), &v)| a <= v && v <= b)
    }

    /// Distance from `t` to the nearest wall (0 outside or for the 0-block).
    pub fn boundary_distance(&self, t: &[f64]) -> f64 {
        assert_eq!(t.len(), self.dim(), "boundary_distance dimension mismatch");
        self.intervals
            .iter()
            .zip(t)
            .map(|(&(a, b), &v)| (v - a).min(b - v))
            .fold(f64::MAX, f64::min) // 0-block: MAX, never used downstream
            .max(0.0)
    }

    pub fn translate(&self, offset: &[f64]) -> Block {
        assert_eq!(offset.len(), self.dim(), "translate dimension mismatch");
        Block {
            intervals: self
                .intervals
                .iter()
                .zip(offset)
                .map(|(&(a, b), &o)| (a + o, b + o))
                .collect(),
        }
    }
}

type MapFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type JacFn = dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync;

/// A C^1 map `R^k -> R^n` with an optional analytic Jacobian.
///
/// The Jacobian closure returns the `k` columns (each of length `n`), i.e.
/// the images of the domain basis vectors.  Smoothness is a caller contract;
/// the library only ever evaluates the map and its (possibly finite
/// difference) Jacobian.
#[derive(Clone)]
pub struct SmoothMap {
    domain_dim: usize,
    target_dim: usize,
    f: Arc<MapFn>,
    jacobian: Option<Arc<JacFn>>,
    /// Step floor for the finite-difference Jacobian fallback.
    fd_step: f64,
}

/// Default floor for finite-difference Jacobian steps.
pub const DEFAULT_JACOBIAN_STEP: f64 = 1e-6;

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothMap")
            .field("domain_dim", &self.domain_dim)
            .field("target_dim", &self.target_dim)
            .field("jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl SmoothMap {
    pub fn new(
        domain_dim: usize,
        target_dim: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        SmoothMap {
            domain_dim,
            target_dim,
            f: Arc::new(f),
            jacobian: None,
            fd_step: DEFAULT_JACOBIAN_STEP,
        }
    }

    /// Attach an analytic Jacobian (columns of length `n`, one per axis).
    pub fn with_jacobian(
        mut self,
        j: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    /// Override the finite-difference step floor used when no analytic
    /// Jacobian is attached.
    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = step.abs().max(f64::MIN_POSITIVE);
        self
    }

    /// The identity inclusion of `R^k` into itself.
    pub fn identity(k: usize) -> Self {
        let columns: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut e = vec![0.0; k];
                e[i] = 1.0;
                e
            })
            .collect();
        SmoothMap::new(k, k, |t| t.to_vec()).with_jacobian(move |_| columns.clone())
    }

    /// `t -> A t + b` with `A` given as `n` rows of `k` entries.
    pub fn affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let n = offset.len();
        if matrix.len() != n {
            return Err(Error::dim("affine matrix rows", n, matrix.len()));
        }
        let k = matrix.first().map_or(0, |r| r.len());
        for row in &matrix {
            if row.len() != k {
                return Err(Error::dim("affine matrix row length", k, row.len()));
            }
        }
        let columns: Vec<Vec<f64>> = (0..k)
            .map(|j| matrix.iter().map(|row| row[j]).collect())
            .collect();
        let m = matrix;
        let b = offset;
        Ok(SmoothMap::new(k, n, move |t| {
            m.iter()
                .zip(&b)
                .map(|(row, &off)| {
                    off + row
                        .iter()
                        .zip(t)
                        .map(|(&aij, &tj)| aij * tj)
                        .sum::<f64>()
                })
                .collect()
        })
        .with_jacobian(move |_| columns.clone()))
    }

    /// `t -> base + sum_a t_a e_(axes[a])`: the axis-aligned embedding used by
    /// derivative stencils.  Axes are 1-based and must be distinct.
    pub fn axis_embedding(base: Vec<f64>, axes: Vec<usize>) -> Result<Self> {
        let n = base.len();
        for &q in &axes {
            if q < 1 || q > n {
                return Err(Error::IndexOutOfRange { value: q, n });
            }
        }
        let columns: Vec<Vec<f64>> = axes
            .iter()
            .map(|&q| {
                let mut e = vec![0.0; n];
                e[q - 1] = 1.0;
                e
            })
            .collect();
        let k = axes.len();
        Ok(SmoothMap::new(k, n, move |t| {
            let mut x = base.clone();
            for (a, &q) in axes.iter().enumerate() {
                x[q - 1] += t[a];
            }
            x
        })
        .with_jacobian(move |_| columns.clone()))
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn eval(&self, t: &[f64]) -> Vec<f64> {
        assert_eq!(t.len(), self.domain_dim, "map argument dimension mismatch");
        let out = (self.f)(t);
        assert_eq!(
            out.len(),
            self.target_dim,
            "map output dimension mismatch (broken map closure)"
        );
        out
    }
}

/// A block together with a C^1 map into `R^n`.
#[derive(Clone, Debug)]
pub struct SingularBlock {
    domain: Block,
    map: SmoothMap,
}

impl SingularBlock {
    pub fn new(domain: Block, map: SmoothMap) -> Result<Self> {
        if map.domain_dim() != domain.dim() {
            return Err(Error::dim(
                "singular block map domain",
                domain.dim(),
                map.domain_dim(),
            ));
        }
        Ok(SingularBlock { domain, map })
    }

    /// The inclusion of a block into `R^k` (identity map).
    pub fn inclusion(block: Block) -> Self {
        let k = block.dim();
        SingularBlock {
            domain: block,
            map: SmoothMap::identity(k),
        }
    }

    /// A 0-block: the constant map from the point domain.
    pub fn point(x: Vec<f64>) -> Self {
        let n = x.len();
        let map = SmoothMap::new(0, n, move |_| x.clone()).with_jacobian(|_| Vec::new());
        SingularBlock {
            domain: Block::point(),
            map,
        }
    }

    pub fn affine(domain: Block, matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        SingularBlock::new(domain, SmoothMap::affine(matrix, offset)?)
    }

    pub fn domain(&self) -> &Block {
        &self.domain
    }

    pub fn map(&self) -> &SmoothMap {
        &self.map
    }

    pub fn domain_dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn target_dim(&self) -> usize {
        self.map.target_dim()
    }

    pub fn eval(&self, t: &[f64]) -> Vec<f64> {
        self.map.eval(t)
    }

    /// The face `c_(i,j)`: freeze 1-based axis `i` at its lower (`j = 0`) or
    /// upper (`j = 1`) endpoint.  The face's Jacobian is the parent's with
    /// column `i` removed.
    pub fn face(&self, axis: usize, side: usize) -> Result<SingularBlock> {
        let k = self.domain_dim();
        if axis < 1 || axis > k {
            return Err(Error::AxisOutOfRange { axis, k });
        }
        if side > 1 {
            return Err(Error::Config(format!("face side must be 0 or 1, got {side}")));
        }
        let (a, b) = self.domain.side(axis - 1);
        let frozen = if side == 0 { a } else { b };
        let ax = axis - 1;
        let mut intervals = self.domain.intervals().to_vec();
        intervals.remove(ax);

        let insert = move |t_sub: &[f64]| -> Vec<f64> {
            let mut full = Vec::with_capacity(t_sub.len() + 1);
            full.extend_from_slice(&t_sub[..ax]);
            full.push(frozen);
            full.extend_from_slice(&t_sub[ax..]);
            full
        };
        let parent_f = Arc::clone(&self.map.f);
        let f = move |t_sub: &[f64]| parent_f(&insert(t_sub));
        let jacobian = self.map.jacobian.as_ref().map(|pj| {
            let pj = Arc::clone(pj);
            move |t_sub: &[f64]| {
                let mut cols = pj(&insert(t_sub));
                cols.remove(ax);
                cols
            }
        });

        let mut map = SmoothMap::new(k - 1, self.target_dim(), f);
        if let Some(j) = jacobian {
            map = map.with_jacobian(j);
        }
        map.fd_step = self.map.fd_step;
        Ok(SingularBlock {
            domain: Block::from_intervals_unchecked(intervals),
            map,
        })
    }

    /// Jacobian columns at `t`: the analytic closure when present, otherwise
    /// central differences with per-axis step `max(step_floor, 1e-8 |t_i|)`
    /// (floor 1e-6 unless overridden via [`SmoothMap::with_fd_step`]),
    /// falling back to one-sided differences at the domain walls so the map
    /// is never probed outside its block.
    pub fn jacobian_columns(&self, t: &[f64]) -> Vec<Vec<f64>> {
        if let Some(j) = &self.map.jacobian {
            let cols = j(t);
            debug_assert_eq!(cols.len(), self.domain_dim());
            return cols;
        }
        let k = self.domain_dim();
        let mut cols = Vec::with_capacity(k);
        let mut tp = t.to_vec();
        let mut tm = t.to_vec();
        for i in 0..k {
            let h = (1e-8 * t[i].abs()).max(self.map.fd_step);
            let (a, b) = self.domain.side(i);
            let hi = (t[i] + h).min(b);
            let lo = (t[i] - h).max(a);
            tp[i] = hi;
            tm[i] = lo;
            let fp = self.map.eval(&tp);
            let fm = self.map.eval(&tm);
            let denom = hi - lo;
            cols.push(
                fp.iter()
                    .zip(&fm)
                    .map(|(p, m)| (p - m) / denom)
                    .collect(),
            );
            tp[i] = t[i];
            tm[i] = t[i];
        }
        cols
    }
}

/// A formal integer combination of singular blocks of one dimension.
#[derive(Clone, Debug)]
pub struct Chain {
    n: usize,
    dim: usize,
    terms: Vec<(i64, SingularBlock)>,
}

impl Chain {
    /// Build from terms; zero coefficients are dropped, and every term must
    /// share the same domain dimension and target dimension.
    pub fn new(terms: Vec<(i64, SingularBlock)>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| {
            Error::Config("a chain needs at least one term; use Chain::empty".to_string())
        })?;
        let n = first.1.target_dim();
        let dim = first.1.domain_dim();
        for (_, sb) in &terms {
            if sb.target_dim() != n {
                return Err(Error::dim("chain target dimension", n, sb.target_dim()));
            }
            if sb.domain_dim() != dim {
                return Err(Error::dim("chain block dimension", dim, sb.domain_dim()));
            }
        }
        Ok(Chain {
            n,
            dim,
            terms: terms.into_iter().filter(|(c, _)| *c != 0).collect(),
        })
    }

    /// The zero chain of a given shape.
    pub fn empty(n: usize, dim: usize) -> Self {
        Chain {
            n,
            dim,
            terms: Vec::new(),
        }
    }

    pub fn from_block(sb: SingularBlock) -> Self {
        Chain {
            n: sb.target_dim(),
            dim: sb.domain_dim(),
            terms: vec![(1, sb)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(i64, SingularBlock)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiply every coefficient by `c`.
    pub fn scaled(mut self, c: i64) -> Self {
        if c == 0 {
            self.terms.clear();
            return self;
        }
        for (coef, _) in &mut self.terms {
            *coef *= c;
        }
        self
    }

    /// Formal sum (terms are concatenated, not merged).
    pub fn plus(&self, other: &Chain) -> Result<Chain> {
        if other.n != self.n {
            return Err(Error::dim("chain target dimension", self.n, other.n));
        }
        if other.dim != self.dim {
            return Err(Error::dim("chain block dimension", self.dim, other.dim));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Chain {
            n: self.n,
            dim: self.dim,
            terms,
        })
    }

    /// The boundary chain: per term the `2k` faces with signs `(-1)^(i+j)`.
    /// The boundary of a 0-chain is the empty chain.
    pub fn boundary(&self) -> Chain {
        if self.dim == 0 {
            return Chain::empty(self.n, 0);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * 2 * self.dim);
        for (c, sb) in &self.terms {
            for axis in 1..=self.dim {
                for side in 0..=1usize {
                    let sign: i64 = if (axis + side) % 2 == 0 { 1 } else { -1 };
                    let face = sb
                        .face(axis, side)
                        .expect("face axis within chain dimension");
                    terms.push((c * sign, face));
                }
            }
        }
        Chain {
            n: self.n,
            dim: self.dim - 1,
            terms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_validation_and_measures() {
        let b = Block::new(vec![(0.0, 2.0), (1.0, 1.5)]).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.volume(), 1.0);
        assert_eq!(b.longest_side(), 2.0);
        assert_eq!(b.shortest_side(), 0.5);
        assert_eq!(b.aspect_ratio(), 4.0);
        assert_eq!(b.center(), vec![1.0, 1.25]);
        assert!(b.contains(&[0.0, 1.5]));
        assert!(!b.contains(&[2.1, 1.2]));
        assert!(Block::new(vec![(1.0, 1.0)]).is_err());
        assert!(Block::new(vec![(2.0, 1.0)]).is_err());
        assert!(Block::new(vec![(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn zero_block_conventions() {
        let p = Block::point();
        assert_eq!(p.dim(), 0);
        assert_eq!(p.volume(), 1.0);
        assert_eq!(p.longest_side(), 0.0);
        assert_eq!(p.shortest_side(), 0.0);
        assert_eq!(p.aspect_ratio(), 1.0);
    }

    #[test]
    fn boundary_distance_picks_nearest_wall() {
        let b = Block::unit(2);
        assert_eq!(b.boundary_distance(&[0.1, 0.5]), 0.1);
        assert_eq!(b.boundary_distance(&[0.5, 0.5]), 0.5);
        assert_eq!(b.boundary_distance(&[1.0, 0.5]), 0.0);
    }

    #[test]
    fn affine_map_and_jacobian() {
        // (t1, t2) -> (2 t1, 3 t2, t1 + t2) + (1, 0, -1)
        let m = SmoothMap::affine(
            vec![vec![2.0, 0.0], vec![0.0, 3.0], vec![1.0, 1.0]],
            vec![1.0, 0.0, -1.0],
        )
        .unwrap();
        assert_eq!(m.domain_dim(), 2);
        assert_eq!(m.target_dim(), 3);
        assert_eq!(m.eval(&[1.0, 1.0]), vec![3.0, 3.0, 1.0]);
        let sb = SingularBlock::new(Block::unit(2), m).unwrap();
        let cols = sb.jacobian_columns(&[0.5, 0.5]);
        assert_eq!(cols, vec![vec![2.0, 0.0, 1.0], vec![0.0, 3.0, 1.0]]);
    }

    #[test]
    fn fd_jacobian_matches_analytic_inside_and_at_walls() {
        // curved graph map with a known Jacobian
        let curved = || {
            SmoothMap::new(2, 3, |t| vec![t[0], t[1], t[0] * t[0] + t[0] * t[1]])
        };
        let exact = |t: &[f64]| {
            vec![
                vec![1.0, 0.0, 2.0 * t[0] + t[1]],
                vec![0.0, 1.0, t[0]],
            ]
        };
        let sb = SingularBlock::new(Block::unit(2), curved()).unwrap();
        for t in [[0.4, 0.7], [0.0, 0.3], [1.0, 1.0]] {
            let fd = sb.jacobian_columns(&t);
            let ex = exact(&t);
            for (cf, ce) in fd.iter().zip(&ex) {
                for (a, b) in cf.iter().zip(ce) {
                    assert!(
                        (a - b).abs() < 1e-6,
                        "fd {a} vs exact {b} at {t:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn face_freezes_the_right_endpoint() {
        let sb = SingularBlock::inclusion(Block::new(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap());
        let lower = sb.face(1, 0).unwrap();
        assert_eq!(lower.domain_dim(), 1);
        assert_eq!(lower.eval(&[2.5]), vec![0.0, 2.5]);
        let upper = sb.face(2, 1).unwrap();
        assert_eq!(upper.eval(&[0.25]), vec![0.25, 3.0]);
        // face Jacobian drops the frozen column
        assert_eq!(upper.jacobian_columns(&[0.25]), vec![vec![1.0, 0.0]]);
        assert!(sb.face(3, 0).is_err());
        assert!(sb.face(1, 2).is_err());
    }

    #[test]
    fn face_of_interval_is_a_point_block() {
        let sb = SingularBlock::inclusion(Block::new(vec![(-1.0, 4.0)]).unwrap());
        let end = sb.face(1, 1).unwrap();
        assert_eq!(end.domain_dim(), 0);
        assert_eq!(end.eval(&[]), vec![4.0]);
        assert!(end.jacobian_columns(&[]).is_empty());
    }

    /// Second faces commute after the index shift: for i' < i,
    /// `c.face(i, j).face(i', j') == c.face(i', j').face(i - 1, j)`.
    /// This is the bookkeeping behind boundary-of-boundary cancellation.
    #[test]
    fn face_commutation_identity() {
        let sb = SingularBlock::inclusion(
            Block::new(vec![(0.0, 1.0), (-2.0, 0.5), (3.0, 4.0)]).unwrap(),
        );
        let probe = [0.37];
        for i in 1..=3usize {
            for ip in 1..i {
                for j in 0..=1usize {
                    for jp in 0..=1usize {
                        let left = sb.face(i, j).unwrap().face(ip, jp).unwrap();
                        let right = sb.face(ip, jp).unwrap().face(i - 1, j).unwrap();
                        assert_eq!(left.eval(&probe), right.eval(&probe), "i={i} i'={ip}");
                    }
                }
            }
        }
    }

    #[test]
    fn chain_shape_checks_and_zero_coefficients() {
        let a = SingularBlock::inclusion(Block::unit(2));
        let b = SingularBlock::inclusion(Block::new(vec![(0.0, 2.0), (0.0, 1.0)]).unwrap());
        let c = Chain::new(vec![(1, a.clone()), (0, b.clone()), (-2, b.clone())]).unwrap();
        assert_eq!(c.terms().len(), 2, "zero coefficient dropped");
        assert_eq!(c.dim(), 2);
        assert_eq!(c.n(), 2);
        // mixed dimensions are rejected
        let line = SingularBlock::inclusion(Block::new(vec![(0.0, 1.0)]).unwrap());
        assert!(Chain::new(vec![(1, a), (1, line)]).is_err());
    }

    #[test]
    fn boundary_counts_and_signs() {
        let square = Chain::from_block(SingularBlock::inclusion(Block::unit(2)));
        let b = square.boundary();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.terms().len(), 4);
        // signs: (-1)^(i+j) with i 1-based
        let signs: Vec<i64> = b.terms().iter().map(|(c, _)| *c).collect();
        assert_eq!(signs, vec![-1, 1, 1, -1]);
        // boundary of an interval is (endpoint) - (startpoint)
        let seg = Chain::from_block(SingularBlock::inclusion(
            Block::new(vec![(2.0, 5.0)]).unwrap(),
        ));
        let pts = seg.boundary();
        assert_eq!(pts.dim(), 0);
        let evals: Vec<(i64, f64)> = pts
            .terms()
            .iter()
            .map(|(c, sb)| (*c, sb.eval(&[])[0]))
            .collect();
        assert_eq!(evals, vec![(-1, 2.0), (1, 5.0)]);
        // boundary of a 0-chain is empty
        assert!(pts.boundary().is_empty());
    }

    #[test]
    fn point_block_evaluates_constantly() {
        let p = SingularBlock::point(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.domain_dim(), 0);
        assert_eq!(p.target_dim(), 3);
        assert_eq!(p.eval(&[]), vec![1.0, 2.0, 3.0]);
    }
}
