//! Strictly increasing multi-indices and their combinatorial bookkeeping.
//!
//! A degree-p component of an alternating tensor on `R^n` is keyed by a tuple
//! `1 <= i1 < i2 < ... < ip <= n`.  Everything downstream (tensor storage,
//! JSON component keys, CLI output) relies on the lexicographic order produced
//! by [`enumerate`], so this module is the single source of truth for that
//! order.  Indices are 1-based throughout: `dx1` pairs with coordinate 1.

use crate::{Error, Result};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// A strictly increasing tuple of 1-based coordinate indices in `1..=n`.
///
/// Ordering compares the index tuples lexicographically, which for fixed
/// degree is exactly the enumeration order of [`enumerate`].
#[derive(Clone, Debug, Eq, PartialEq, Hash)]
pub struct MultiIndex {
    n: usize,
    indices: Vec<usize>,
}

impl MultiIndex {
    /// Build an index, validating range and strict monotonicity.
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.len() > n {
            return Err(Error::DegreeOutOfRange {
                degree: indices.len(),
                n,
            });
        }
        for (pos, &v) in indices.iter().enumerate() {
            if v < 1 || v > n {
                return Err(Error::IndexOutOfRange { value: v, n });
            }
            if pos > 0 && indices[pos - 1] >= v {
                return Err(Error::Format {
                    what: "multi-index",
                    detail: format!("entries must be strictly increasing, got {indices:?}"),
                });
            }
        }
        Ok(MultiIndex { n, indices })
    }

    /// The unique degree-0 index.
    pub fn empty(n: usize) -> Self {
        MultiIndex {
            n,
            indices: Vec::new(),
        }
    }

    /// The top index `[1, 2, ..., n]`.
    pub fn full(n: usize) -> Self {
        MultiIndex {
            n,
            indices: (1..=n).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(n: usize, indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.iter().all(|&v| v >= 1 && v <= n));
        MultiIndex { n, indices }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, value: usize) -> bool {
        self.indices.binary_search(&value).is_ok()
    }

    /// Copy with the entry at 0-based `pos` removed; stays increasing.
    pub fn without_position(&self, pos: usize) -> MultiIndex {
        let mut indices = self.indices.clone();
        indices.remove(pos);
        MultiIndex {
            n: self.n,
            indices,
        }
    }

    /// Position of this index in `enumerate(n, degree)`.
    pub fn lex_rank(&self) -> usize {
        let p = self.indices.len();
        let mut rank = 0;
        let mut prev = 0;
        for (j, &ij) in self.indices.iter().enumerate() {
            for v in prev + 1..ij {
                rank += binomial(self.n - v, p - 1 - j);
            }
            prev = ij;
        }
        rank
    }

    /// Canonical string key, e.g. `[1,3]`; used for JSON component maps.
    pub fn to_key_string(&self) -> String {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    /// Parse a `[1,3]`-style key (whitespace tolerated around entries).
    pub fn from_key_str(n: usize, s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Format {
                what: "multi-index key",
                detail: format!("expected [i1,i2,...], got {s:?}"),
            })?;
        let mut indices = Vec::new();
        let inner = inner.trim();
        if !inner.is_empty() {
            for part in inner.split(',') {
                let v: usize = part.trim().parse().map_err(|_| Error::Format {
                    what: "multi-index key",
                    detail: format!("bad entry {part:?} in {s:?}"),
                })?;
                indices.push(v);
            }
        }
        MultiIndex::new(n, indices)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices
            .cmp(&other.indices)
            .then(self.n.cmp(&other.n))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_key_string())
    }
}

/// Serializes as a plain integer array, e.g. `[1,3]`.
impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.indices.len()))?;
        for i in &self.indices {
            seq.serialize_element(i)?;
        }
        seq.end()
    }
}

/// Binomial coefficient `C(n, k)`; 0 when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // stays integral at every step of the multiplicative formula
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Visit every increasing p-tuple in `1..=n` in lexicographic order, reusing
/// one buffer.  Backbone of [`enumerate`] and of dense tensor iteration.
pub(crate) fn for_each_combination(n: usize, p: usize, mut f: impl FnMut(&[usize])) {
    if p > n {
        return;
    }
    if p == 0 {
        f(&[]);
        return;
    }
    let mut cur: Vec<usize> = (1..=p).collect();
    loop {
        f(&cur);
        // advance to the lexicographic successor
        let mut i = p;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < n - (p - 1 - i) {
                cur[i] += 1;
                for j in i + 1..p {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All strictly increasing degree-p indices in `1..=n`, lexicographic order.
///
/// `p = 0` yields the single empty index; `p > n` is an error.
pub fn enumerate(n: usize, p: usize) -> Result<Vec<MultiIndex>> {
    if p > n {
        return Err(Error::DegreeOutOfRange { degree: p, n });
    }
    let mut out = Vec::with_capacity(binomial(n, p));
    for_each_combination(n, p, |c| {
        out.push(MultiIndex::from_sorted_unchecked(n, c.to_vec()));
    });
    Ok(out)
}

/// Outcome of sorting an arbitrary index tuple into increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SortOutcome {
    /// The sorted index together with the permutation sign (+1 or -1).
    Sorted(MultiIndex, i32),
    /// The tuple has a repeated entry, so any alternating component vanishes.
    Repeated,
}

impl SortOutcome {
    /// +1 / -1 for sorted tuples, 0 for repeated ones.
    pub fn sign(&self) -> i32 {
        match self {
            SortOutcome::Sorted(_, s) => *s,
            SortOutcome::Repeated => 0,
        }
    }
}

/// Sort `entries` into increasing order, tracking the permutation parity.
///
/// Entries outside `1..=n` are an error; a repeated entry is *not* (it reports
/// [`SortOutcome::Repeated`], the sign-0 case of antisymmetry).
pub fn sort_with_sign(n: usize, entries: &[usize]) -> Result<SortOutcome> {
    for &v in entries {
        if v < 1 || v > n {
            return Err(Error::IndexOutOfRange { value: v, n });
        }
    }
    let mut v = entries.to_vec();
    // insertion sort counting swaps; tuples are tiny
    let mut swaps = 0usize;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Ok(SortOutcome::Repeated);
    }
    let sign = if swaps.is_multiple_of(2) { 1 } else { -1 };
    Ok(SortOutcome::Sorted(
        MultiIndex::from_sorted_unchecked(n, v),
        sign,
    ))
}
