//! JSON chain descriptions.
//!
//! A chain file lists terms with integer coefficients, a domain block, and a
//! map: the string `"inclusion"`, a name registered in a [`ParamRegistry`],
//! or an inline affine map.  Example (the counterclockwise unit square
//! written as one 2-block, with its map spelled out):
//!
//! ```json
//! {
//!   "n": 2,
//!   "terms": [
//!     {
//!       "coefficient": 1,
//!       "block": [[0.0, 1.0], [0.0, 1.0]],
//!       "map": "inclusion"
//!     }
//!   ]
//! }
//! ```
//!
//! A 0-block is written with `"block": []` and an affine map whose matrix has
//! empty rows, e.g. `{"affine": {"matrix": [[], []], "offset": [1.0, 2.0]}}`.

use super::{Block, Chain, SingularBlock, SmoothMap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainFile {
    pub n: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub coefficient: i64,
    /// Domain block as `[[a1, b1], [a2, b2], ...]`; `[]` is a point domain.
    pub block: Vec<[f64; 2]>,
    #[serde(default = "default_map")]
    pub map: MapSpec,
}

fn default_map() -> MapSpec {
    MapSpec::Name("inclusion".to_string())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    /// `"inclusion"` or a name registered in the [`ParamRegistry`].
    Name(String),
    Affine {
        affine: AffineSpec,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffineSpec {
    /// `n` rows of `k` entries.
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

/// Named parametrizations a chain file may refer to.
#[derive(Default)]
pub struct ParamRegistry {
    maps: HashMap<String, SmoothMap>,
}

impl ParamRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: impl Into<String>, map: SmoothMap) {
        self.maps.insert(name.into(), map);
    }

    fn get(&self, name: &str) -> Option<&SmoothMap> {
        self.maps.get(name)
    }
}

impl ChainFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChainFile = serde_json::from_str(text).map_err(|e| Error::Format {
            what: "chain file",
            detail: e.to_string(),
        })?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain file serializes")
    }

    /// Resolve maps and build the chain.  Every term must land in `R^n` with
    /// a common block dimension.
    pub fn build(&self, registry: &ParamRegistry) -> Result<Chain> {
        if self.terms.is_empty() {
            return Err(Error::Format {
                what: "chain file",
                detail: "a chain file needs at least one term".to_string(),
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (idx, spec) in self.terms.iter().enumerate() {
            let block = Block::new(spec.block.iter().map(|&[a, b]| (a, b)).collect())?;
            let k = block.dim();
            let map = match &spec.map {
                MapSpec::Name(name) if name == "inclusion" => {
                    if k != self.n {
                        return Err(Error::Format {
                            what: "chain file",
                            detail: format!(
                                "term {idx}: inclusion needs a {}-dimensional block, got {k}",
                                self.n
                            ),
                        });
                    }
                    SmoothMap::identity(k)
                }
                MapSpec::Name(name) => registry
                    .get(name)
                    .ok_or_else(|| Error::Format {
                        what: "chain file",
                        detail: format!("term {idx}: unknown parametrization {name:?}"),
                    })?
                    .clone(),
                MapSpec::Affine { affine } => {
                    SmoothMap::affine(affine.matrix.clone(), affine.offset.clone())?
                }
            };
            if map.target_dim() != self.n {
                return Err(Error::Format {
                    what: "chain file",
                    detail: format!(
                        "term {idx}: map lands in R^{}, file declares n = {}",
                        map.target_dim(),
                        self.n
                    ),
                });
            }
            if map.domain_dim() != k {
                return Err(Error::Format {
                    what: "chain file",
                    detail: format!(
                        "term {idx}: map expects a {}-dimensional block, got {k}",
                        map.domain_dim()
                    ),
                });
            }
            terms.push((spec.coefficient, SingularBlock::new(block, map)?));
        }
        Chain::new(terms)
    }
}
