//! Scattered point samples of a form: the data-cloud JSON format.
//!
//! ```json
//! {
//!   "n": 3,
//!   "degree": 1,
//!   "samples": [
//!     {"point": [1.01, 1.0, 1.0],
//!      "components": {"[1]": 1.01, "[2]": 1.0, "[3]": 1.0}}
//!   ]
//! }
//! ```
//!
//! Component keys are `[i1,i2,...]` strings over increasing indices; missing
//! keys read as zero.  A cloud becomes a [`FormField`] through
//! [`field_from_cloud`], which answers queries either by exact matching (with
//! a small absolute tolerance) or by nearest-sample lookup.

use crate::forms::{AlternatingTensor, FormField};
use crate::multiindex::MultiIndex;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default per-coordinate absolute tolerance for exact matching.
pub const EXACT_MATCH_TOLERANCE: f64 = 1e-12;

/// How a cloud-backed sampler resolves query points against stored samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Matching {
    /// Every coordinate must agree within `tolerance` (absolute).  Queries
    /// with no matching sample fail with a sampling error naming the point.
    Exact { tolerance: f64 },
    /// Inverse-distance weighting over the K = 1 nearest sample, i.e. the
    /// nearest sample's components verbatim.  Approximate by construction;
    /// only an empty cloud can fail.
    Nearest,
}

impl Default for Matching {
    fn default() -> Self {
        Matching::Exact {
            tolerance: EXACT_MATCH_TOLERANCE,
        }
    }
}

/// One stored sample: a point and its component values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloudSample {
    pub point: Vec<f64>,
    pub components: BTreeMap<String, f64>,
}

/// A form known only at scattered points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DataCloud {
    pub n: usize,
    pub degree: usize,
    pub samples: Vec<CloudSample>,
}

impl DataCloud {
    pub fn from_json(text: &str) -> Result<Self> {
        let cloud: DataCloud = serde_json::from_str(text).map_err(|e| Error::Format {
            what: "data cloud",
            detail: e.to_string(),
        })?;
        cloud.validate()?;
        Ok(cloud)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cloud serialization cannot fail")
    }

    /// Check degrees, point lengths, and component keys.
    pub fn validate(&self) -> Result<()> {
        if self.degree > self.n {
            return Err(Error::DegreeOutOfRange {
                degree: self.degree,
                n: self.n,
            });
        }
        for (i, s) in self.samples.iter().enumerate() {
            if s.point.len() != self.n {
                return Err(Error::Format {
                    what: "data cloud",
                    detail: format!(
                        "sample {i}: point has {} coordinates, expected {}",
                        s.point.len(),
                        self.n
                    ),
                });
            }
            for key in s.components.keys() {
                let idx = MultiIndex::from_key_str(self.n, key)?;
                if idx.degree() != self.degree {
                    return Err(Error::Format {
                        what: "data cloud",
                        detail: format!(
                            "sample {i}: component key {key} has degree {}, expected {}",
                            idx.degree(),
                            self.degree
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    fn tensor_at(&self, sample: &CloudSample) -> Result<AlternatingTensor> {
        let mut t = AlternatingTensor::zero(self.n, self.degree)?;
        for (key, &value) in &sample.components {
            let idx = MultiIndex::from_key_str(self.n, key)?;
            t.set(&idx, value);
        }
        Ok(t)
    }
}

/// Wrap a cloud as a pure [`FormField`] sampler under `matching`.
pub fn field_from_cloud(cloud: &DataCloud, matching: Matching) -> Result<FormField> {
    cloud.validate()?;
    let cloud = cloud.clone();
    FormField::from_fn(cloud.n, cloud.degree, move |x| match matching {
        Matching::Exact { tolerance } => {
            for s in &cloud.samples {
                if s.point.iter().zip(x).all(|(a, b)| (a - b).abs() <= tolerance) {
                    return cloud.tensor_at(s);
                }
            }
            Err(Error::Sampling {
                point: x.to_vec(),
                reason: format!(
                    "no cloud sample within {tolerance:e} of the query point ({} samples searched)",
                    cloud.samples.len()
                ),
            })
        }
        Matching::Nearest => {
            let mut best: Option<(f64, &CloudSample)> = None;
            for s in &cloud.samples {
                let d2: f64 = s
                    .point
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if best.as_ref().is_none_or(|(bd, _)| d2 < *bd) {
                    best = Some((d2, s));
                }
            }
            match best {
                Some((_, s)) => cloud.tensor_at(s),
                None => Err(Error::Sampling {
                    point: x.to_vec(),
                    reason: "cloud is empty".to_string(),
                }),
            }
        }
    })
}
