//! Alternating tensors and point-sampled form fields.
//!
//! An [`AlternatingTensor`] stores one `f64` per strictly increasing
//! multi-index; evaluation on a vector tuple expands determinant minors, so
//! alternation and multilinearity come from the determinant rather than from
//! stored redundancy.  A [`FormField`] is a differential form given only as a
//! pure sampler `x -> AlternatingTensor`; parsed expressions
//! ([`FormExpression`]) and scattered data clouds ([`DataCloud`]) both reduce
//! to this interface.

mod cloud;
mod expr;

pub use cloud::{field_from_cloud, CloudSample, DataCloud, Matching};
pub use expr::{parse_form, FormExpression};

use crate::multiindex::{self, MultiIndex, SortOutcome};
use crate::util;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Above this ambient dimension components move to sparse storage.
pub const DENSE_DIMENSION_LIMIT: usize = 12;

#[derive(Clone, Debug)]
enum Storage {
    /// One slot per increasing index, in lexicographic rank order.
    Dense(Vec<f64>),
    /// Only explicitly set components; everything else reads as zero.
    Sparse(BTreeMap<MultiIndex, f64>),
}

/// A degree-p alternating tensor on `R^n`, components on increasing indices.
#[derive(Clone, Debug)]
pub struct AlternatingTensor {
    n: usize,
    degree: usize,
    storage: Storage,
}

impl AlternatingTensor {
    /// The zero tensor.  Errors when `degree > n`.
    pub fn zero(n: usize, degree: usize) -> Result<Self> {
        if degree > n {
            return Err(Error::DegreeOutOfRange { degree, n });
        }
        let storage = if n <= DENSE_DIMENSION_LIMIT {
            Storage::Dense(vec![0.0; multiindex::binomial(n, degree)])
        } else {
            Storage::Sparse(BTreeMap::new())
        };
        Ok(AlternatingTensor { n, degree, storage })
    }

    /// Degree-0 tensor holding a single scalar.
    pub fn scalar(n: usize, value: f64) -> Self {
        let mut t = AlternatingTensor::zero(n, 0).expect("degree 0 always valid");
        t.set(&MultiIndex::empty(n), value);
        t
    }

    /// Build from `(increasing indices, value)` entries; later entries win.
    pub fn from_entries(n: usize, degree: usize, entries: &[(&[usize], f64)]) -> Result<Self> {
        let mut t = AlternatingTensor::zero(n, degree)?;
        for (indices, value) in entries {
            let idx = MultiIndex::new(n, indices.to_vec())?;
            if idx.degree() != degree {
                return Err(Error::DegreeMismatch {
                    declared: degree,
                    found: idx.degree(),
                });
            }
            t.set(&idx, *value);
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Component on an increasing index.  Panics on shape mismatch (that is a
    /// caller bug, not data-dependent).
    pub fn get(&self, idx: &MultiIndex) -> f64 {
        assert_eq!(idx.n(), self.n, "tensor/index dimension mismatch");
        assert_eq!(idx.degree(), self.degree, "tensor/index degree mismatch");
        match &self.storage {
            Storage::Dense(v) => v[idx.lex_rank()],
            Storage::Sparse(m) => m.get(idx).copied().unwrap_or(0.0),
        }
    }

    pub fn set(&mut self, idx: &MultiIndex, value: f64) {
        assert_eq!(idx.n(), self.n, "tensor/index dimension mismatch");
        assert_eq!(idx.degree(), self.degree, "tensor/index degree mismatch");
        match &mut self.storage {
            Storage::Dense(v) => v[idx.lex_rank()] = value,
            Storage::Sparse(m) => {
                if value == 0.0 {
                    m.remove(idx);
                } else {
                    m.insert(idx.clone(), value);
                }
            }
        }
    }

    /// Component on an *arbitrary* tuple, resolved by alternation:
    /// `sign * component(sorted)`, and exactly 0 on a repeated entry.
    ///
    /// This is the extension-by-antisymmetry of the increasing-key storage;
    /// samplers that build raw dictionaries on unsorted keys agree with it.
    pub fn component(&self, entries: &[usize]) -> Result<f64> {
        if entries.len() != self.degree {
            return Err(Error::dim("component tuple length", self.degree, entries.len()));
        }
        match multiindex::sort_with_sign(self.n, entries)? {
            SortOutcome::Repeated => Ok(0.0),
            SortOutcome::Sorted(idx, sign) => Ok(f64::from(sign) * self.get(&idx)),
        }
    }

    /// Visit `(indices, value)` pairs in lexicographic order.  Dense storage
    /// visits every component (zeros included), sparse only stored ones.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        match &self.storage {
            Storage::Dense(v) => {
                let mut rank = 0;
                multiindex::for_each_combination(self.n, self.degree, |c| {
                    f(c, v[rank]);
                    rank += 1;
                });
            }
            Storage::Sparse(m) => {
                for (idx, &value) in m {
                    f(idx.indices(), value);
                }
            }
        }
    }

    /// Max-norm over components.
    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        self.for_each(|_, v| m = m.max(v.abs()));
        m
    }

    /// Max-norm of the componentwise difference.
    pub fn max_component_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        assert_eq!(self.degree, other.degree);
        match (&self.storage, &other.storage) {
            (Storage::Dense(a), Storage::Dense(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            _ => {
                // sparse: walk the union of stored keys
                let mut keys: Vec<MultiIndex> = Vec::new();
                self.for_each(|c, _| {
                    keys.push(MultiIndex::from_sorted_unchecked(self.n, c.to_vec()))
                });
                other.for_each(|c, _| {
                    keys.push(MultiIndex::from_sorted_unchecked(self.n, c.to_vec()))
                });
                keys.sort();
                keys.dedup();
                keys.iter()
                    .map(|k| (self.get(k) - other.get(k)).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// In-place `self += a * other`.
    pub fn add_scaled(&mut self, a: f64, other: &Self) {
        assert_eq!(self.n, other.n);
        assert_eq!(self.degree, other.degree);
        match (&mut self.storage, &other.storage) {
            (Storage::Dense(dst), Storage::Dense(src)) => {
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
            _ => {
                let mut updates = Vec::new();
                other.for_each(|c, v| {
                    updates.push((MultiIndex::from_sorted_unchecked(other.n, c.to_vec()), v))
                });
                for (idx, v) in updates {
                    let cur = self.get(&idx);
                    self.set(&idx, cur + a * v);
                }
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        match &mut self.storage {
            Storage::Dense(v) => v.iter_mut().for_each(|x| *x *= a),
            Storage::Sparse(m) => m.values_mut().for_each(|x| *x *= a),
        }
    }

    /// `a * ta + b * tb`, componentwise.
    pub fn linear_comb(a: f64, ta: &Self, b: f64, tb: &Self) -> Self {
        let mut out = ta.clone();
        out.scale(a);
        out.add_scaled(b, tb);
        out
    }

    /// Components as a `"[1,3]" -> value` map: complete (zeros included) for
    /// dense storage, stored entries for sparse.
    pub fn components_map(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        self.for_each(|c, v| {
            out.insert(
                MultiIndex::from_sorted_unchecked(self.n, c.to_vec()).to_key_string(),
                v,
            );
        });
        out
    }

    /// Evaluate on `degree` vectors in `R^n` by the minor-determinant rule:
    /// `sum_I t[I] * det(rows I of [v1 ... vp])`.
    ///
    /// A bitwise-repeated argument vector short-circuits to exactly 0, so
    /// alternation holds without rounding residue.
    pub fn apply(&self, vectors: &[Vec<f64>]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::dim("apply_tensor vector count", self.degree, vectors.len()));
        }
        for v in vectors {
            if v.len() != self.n {
                return Err(Error::dim("apply_tensor vector length", self.n, v.len()));
            }
        }
        let p = self.degree;
        if p == 0 {
            return Ok(self.get(&MultiIndex::empty(self.n)));
        }
        for a in 0..p {
            for b in a + 1..p {
                if vectors[a] == vectors[b] {
                    return Ok(0.0);
                }
            }
        }
        let mut scratch = vec![0.0; p * p];
        let mut total = 0.0;
        self.for_each(|rows, value| {
            if value != 0.0 {
                for (r, &row) in rows.iter().enumerate() {
                    for (c, vector) in vectors.iter().enumerate() {
                        scratch[r * p + c] = vector[row - 1];
                    }
                }
                total += value * util::det_in_place(&mut scratch, p);
            }
        });
        Ok(total)
    }
}

/// Free-function form of [`AlternatingTensor::apply`].
pub fn apply_tensor(t: &AlternatingTensor, vectors: &[Vec<f64>]) -> Result<f64> {
    t.apply(vectors)
}

type Sampler = dyn Fn(&[f64]) -> Result<AlternatingTensor> + Send + Sync;

/// A differential form known only through a pure point sampler.
///
/// [`FormField::sample`] validates the sampler's output shape, so downstream
/// code can trust `(n, degree)`.  The optional analytic derivative serves as
/// ground truth in the verification module; nothing in the numerics requires
/// it.
#[derive(Clone)]
pub struct FormField {
    n: usize,
    degree: usize,
    sampler: Arc<Sampler>,
    analytic_derivative: Option<Arc<Sampler>>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormField")
            .field("n", &self.n)
            .field("degree", &self.degree)
            .field("analytic_derivative", &self.analytic_derivative.is_some())
            .finish()
    }
}

impl FormField {
    /// Wrap a sampler closure as a degree-p field on `R^n`.
    pub fn from_fn(
        n: usize,
        degree: usize,
        f: impl Fn(&[f64]) -> Result<AlternatingTensor> + Send + Sync + 'static,
    ) -> Result<Self> {
        if degree > n {
            return Err(Error::DegreeOutOfRange { degree, n });
        }
        Ok(FormField {
            n,
            degree,
            sampler: Arc::new(f),
            analytic_derivative: None,
        })
    }

    /// Degree-0 convenience: a scalar function as a form field.
    pub fn scalar_field(n: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        FormField::from_fn(n, 0, move |x| Ok(AlternatingTensor::scalar(x.len(), f(x))))
            .expect("degree 0 always valid")
    }

    /// The zero field.
    pub fn zero(n: usize, degree: usize) -> Result<Self> {
        FormField::from_fn(n, degree, move |_| AlternatingTensor::zero(n, degree))
    }

    /// Attach an analytic exterior derivative sampler (degree `p + 1`).
    pub fn with_analytic_derivative(
        mut self,
        f: impl Fn(&[f64]) -> Result<AlternatingTensor> + Send + Sync + 'static,
    ) -> Self {
        self.analytic_derivative = Some(Arc::new(f));
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.analytic_derivative.is_some()
    }

    /// Sample at `x`, validating both the input point and the output shape.
    pub fn sample(&self, x: &[f64]) -> Result<AlternatingTensor> {
        if x.len() != self.n {
            return Err(Error::dim("sample point length", self.n, x.len()));
        }
        let t = (self.sampler)(x)?;
        if t.n() != self.n {
            return Err(Error::dim("sampler output dimension", self.n, t.n()));
        }
        if t.degree() != self.degree {
            return Err(Error::dim("sampler output degree", self.degree, t.degree()));
        }
        Ok(t)
    }

    /// Sample the attached analytic derivative (degree `p + 1`) at `x`.
    pub fn sample_analytic_derivative(&self, x: &[f64]) -> Result<AlternatingTensor> {
        let f = self.analytic_derivative.as_ref().ok_or_else(|| {
            Error::Unsupported("field has no analytic derivative".to_string())
        })?;
        if x.len() != self.n {
            return Err(Error::dim("sample point length", self.n, x.len()));
        }
        let t = f(x)?;
        if t.n() != self.n {
            return Err(Error::dim("analytic derivative dimension", self.n, t.n()));
        }
        if t.degree() != self.degree + 1 {
            return Err(Error::dim(
                "analytic derivative degree",
                self.degree + 1,
                t.degree(),
            ));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minor_expansion_worked_example() {
        // t = e^{1,3} + 2 e^{2,3} applied to (e1 + e2, e3):
        // minor {1,3} of [[1,0],[1,0],[0,1]] has det 1, minor {2,3} det 1,
        // so the value is 1*1 + 2*1 = 3.
        let t =
            AlternatingTensor::from_entries(3, 2, &[(&[1, 3], 1.0), (&[2, 3], 2.0)]).unwrap();
        let v1 = vec![1.0, 1.0, 0.0];
        let v2 = vec![0.0, 0.0, 1.0];
        assert_eq!(t.apply(&[v1, v2]).unwrap(), 3.0);
    }

    #[test]
    fn basis_covector_orientation() {
        let t = AlternatingTensor::from_entries(2, 2, &[(&[1, 2], 1.0)]).unwrap();
        let e1 = vec![1.0, 0.0];
        let e2 = vec![0.0, 1.0];
        assert_eq!(t.apply(&[e1.clone(), e2.clone()]).unwrap(), 1.0);
        assert_eq!(t.apply(&[e2, e1]).unwrap(), -1.0);
    }

    #[test]
    fn repeated_vector_is_exactly_zero() {
        let t = AlternatingTensor::from_entries(
            3,
            2,
            &[(&[1, 2], 0.3), (&[1, 3], -7.1), (&[2, 3], 2.5)],
        )
        .unwrap();
        let v = vec![0.1234, -9.5, 3.3];
        let w = vec![1.0, 2.0, 3.0];
        assert_eq!(t.apply(&[v.clone(), v.clone()]).unwrap(), 0.0);
        assert_ne!(t.apply(&[v, w]).unwrap(), 0.0);
    }

    #[test]
    fn degree_zero_apply_returns_scalar() {
        let t = AlternatingTensor::scalar(4, 2.5);
        assert_eq!(t.apply(&[]).unwrap(), 2.5);
        assert_eq!(t.get(&MultiIndex::empty(4)), 2.5);
    }

    #[test]
    fn apply_rejects_wrong_shapes() {
        let t = AlternatingTensor::zero(3, 2).unwrap();
        assert!(t.apply(&[vec![1.0, 0.0, 0.0]]).is_err());
        assert!(t
            .apply(&[vec![1.0, 0.0], vec![0.0, 1.0]])
            .is_err());
    }

    #[test]
    fn component_resolves_by_alternation() {
        let t = AlternatingTensor::from_entries(3, 2, &[(&[1, 3], 4.0)]).unwrap();
        assert_eq!(t.component(&[1, 3]).unwrap(), 4.0);
        assert_eq!(t.component(&[3, 1]).unwrap(), -4.0);
        assert_eq!(t.component(&[1, 1]).unwrap(), 0.0);
        assert!(t.component(&[1]).is_err());
        assert!(t.component(&[1, 4]).is_err());
    }

    #[test]
    fn sparse_storage_above_dense_limit() {
        let n = DENSE_DIMENSION_LIMIT + 1;
        let mut t = AlternatingTensor::zero(n, 2).unwrap();
        let idx = MultiIndex::new(n, vec![3, 11]).unwrap();
        t.set(&idx, 5.0);
        assert_eq!(t.get(&idx), 5.0);
        assert_eq!(t.get(&MultiIndex::new(n, vec![1, 2]).unwrap()), 0.0);
        // stored map only carries the nonzero entry
        assert_eq!(t.components_map().len(), 1);
        // apply still works through the sparse path
        let mut v1 = vec![0.0; n];
        let mut v2 = vec![0.0; n];
        v1[2] = 1.0;
        v2[10] = 1.0;
        assert_eq!(t.apply(&[v1, v2]).unwrap(), 5.0);
    }

    #[test]
    fn zero_rejects_degree_above_n() {
        assert!(AlternatingTensor::zero(2, 3).is_err());
    }

    #[test]
    fn linear_comb_and_diff() {
        let a = AlternatingTensor::from_entries(2, 1, &[(&[1], 1.0), (&[2], 2.0)]).unwrap();
        let b = AlternatingTensor::from_entries(2, 1, &[(&[1], -1.0), (&[2], 0.5)]).unwrap();
        let c = AlternatingTensor::linear_comb(2.0, &a, 1.0, &b);
        assert_eq!(c.get(&MultiIndex::new(2, vec![1]).unwrap()), 1.0);
        assert_eq!(c.get(&MultiIndex::new(2, vec![2]).unwrap()), 4.5);
        assert_eq!(a.max_component_diff(&b), 2.0);
        assert_eq!(a.max_abs(), 2.0);
    }

    #[test]
    fn field_validates_sampler_output() {
        // sampler lies about its degree
        let f = FormField::from_fn(2, 1, |_| Ok(AlternatingTensor::scalar(2, 1.0))).unwrap();
        assert!(matches!(
            f.sample(&[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let f = FormField::scalar_field(2, |x| x[0] + x[1]);
        let t = f.sample(&[1.0, 2.0]).unwrap();
        assert_eq!(t.get(&MultiIndex::empty(2)), 3.0);
        assert!(f.sample(&[1.0]).is_err());
    }

    #[test]
    fn analytic_derivative_plumbs_through() {
        let f = FormField::scalar_field(2, |x| x[0] * x[1]).with_analytic_derivative(|x| {
            AlternatingTensor::from_entries(2, 1, &[(&[1], x[1]), (&[2], x[0])])
        });
        let d = f.sample_analytic_derivative(&[2.0, 3.0]).unwrap();
        assert_eq!(d.get(&MultiIndex::new(2, vec![1]).unwrap()), 3.0);
        assert_eq!(d.get(&MultiIndex::new(2, vec![2]).unwrap()), 2.0);
        let g = FormField::scalar_field(2, |x| x[0]);
        assert!(matches!(
            g.sample_analytic_derivative(&[0.0, 0.0]),
            Err(Error::Unsupported(_))
        ));
    }

    fn arb_vectors(n: usize, p: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(
            proptest::collection::vec(-3.0f64..3.0, n..=n),
            p..=p,
        )
    }

    proptest! {
        /// Independent oracle: full antisymmetrization sum over permutations
        /// of single-index products.
        #[test]
        fn apply_matches_permutation_expansion(
            values in proptest::collection::vec(-2.0f64..2.0, 3..=3),
            vectors in arb_vectors(3, 2),
        ) {
            let t = AlternatingTensor::from_entries(
                3,
                2,
                &[(&[1, 2], values[0]), (&[1, 3], values[1]), (&[2, 3], values[2])],
            ).unwrap();
            let got = t.apply(&vectors).unwrap();
            // oracle: sum_I t[I] * (v1[i]v2[j] - v1[j]v2[i])
            let pairs = [(1usize, 2usize), (1, 3), (2, 3)];
            let mut expect = 0.0;
            for (k, (i, j)) in pairs.iter().enumerate() {
                expect += values[k]
                    * (vectors[0][i - 1] * vectors[1][j - 1]
                        - vectors[0][j - 1] * vectors[1][i - 1]);
            }
            prop_assert!((got - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }

        #[test]
        fn apply_swaps_sign_under_argument_swap(
            values in proptest::collection::vec(-2.0f64..2.0, 3..=3),
            vectors in arb_vectors(3, 2),
        ) {
            let t = AlternatingTensor::from_entries(
                3,
                2,
                &[(&[1, 2], values[0]), (&[1, 3], values[1]), (&[2, 3], values[2])],
            ).unwrap();
            let ab = t.apply(&vectors).unwrap();
            let swapped = vec![vectors[1].clone(), vectors[0].clone()];
            let ba = t.apply(&swapped).unwrap();
            prop_assert!((ab + ba).abs() <= 1e-12 * (1.0 + ab.abs()));
        }

        #[test]
        fn apply_is_linear_in_each_slot(
            values in proptest::collection::vec(-2.0f64..2.0, 3..=3),
            vectors in arb_vectors(3, 3),
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
        ) {
            let t = AlternatingTensor::from_entries(
                3,
                2,
                &[(&[1, 2], values[0]), (&[1, 3], values[1]), (&[2, 3], values[2])],
            ).unwrap();
            let u = &vectors[0];
            let w = &vectors[1];
            let fixed = &vectors[2];
            let mixed: Vec<f64> = u.iter().zip(w).map(|(a, b)| alpha * a + beta * b).collect();
            let lhs = t.apply(&[mixed, fixed.clone()]).unwrap();
            let rhs = alpha * t.apply(&[u.clone(), fixed.clone()]).unwrap()
                + beta * t.apply(&[w.clone(), fixed.clone()]).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
        }
    }
}
