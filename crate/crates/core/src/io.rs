//! JSON input and output formats.
//!
//! * family: `{"ground": ["a","b","c"], "sets": [[], ["a"], ["a","c"]]}`
//! * poset: `{"elements": ["x","y"], "leq": [["x","y"]], "closure": "covers"}`
//! * embedding: `{"ground": [...], "map": {"x": ["a"], "y": ["a","b"]}}`,
//!   where `ground` is optional and defaults to the sorted image labels
//! * weighted graph: `{"vertices": [...], "edges": [["u","v"]], "weights": ["r1"]}`

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{GroundSet, SetFamily};
use crate::forge::WeightedGraphSpec;
use crate::poset::{Closure, FinitePoset, PosetEmbedding};

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub ground: Vec<String>,
    pub sets: Vec<Vec<String>>,
}

impl FamilyJson {
    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn from_family(family: &SetFamily) -> Self {
        Self {
            ground: family.ground().labels().to_vec(),
            sets: family.to_labels(),
        }
    }

    pub fn ground(&self) -> Result<Arc<GroundSet>> {
        Ok(Arc::new(GroundSet::new(self.ground.iter().cloned())?))
    }

    /// The family over a fresh ground set.
    pub fn to_family(&self) -> Result<SetFamily> {
        self.to_family_over(self.ground()?)
    }

    /// The family over an existing ground set, which must carry the same labels.
    pub fn to_family_over(&self, ground: Arc<GroundSet>) -> Result<SetFamily> {
        if ground.labels() != self.ground.as_slice() {
            return Err(Error::GroundMismatch);
        }
        SetFamily::from_labels(ground, &self.sets)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureJson {
    #[default]
    Covers,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
    #[serde(default)]
    pub closure: ClosureJson,
}

impl PosetJson {
    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn to_poset(&self) -> Result<FinitePoset> {
        let closure = match self.closure {
            ClosureJson::Covers => Closure::Covers,
            ClosureJson::Full => Closure::Full,
        };
        FinitePoset::from_pairs(&self.elements, &self.leq, closure)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingJson {
    #[serde(default)]
    pub ground: Option<Vec<String>>,
    pub map: HashMap<String, Vec<String>>,
}

impl EmbeddingJson {
    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn to_embedding(&self, poset: Arc<FinitePoset>) -> Result<PosetEmbedding> {
        let labels: Vec<String> = match &self.ground {
            Some(g) => g.clone(),
            None => self
                .map
                .values()
                .flatten()
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        };
        if labels.is_empty() {
            return Err(Error::Malformed("embedding images use no ground labels".into()));
        }
        let ground = Arc::new(GroundSet::new(labels)?);
        PosetEmbedding::from_label_map(poset, ground, &self.map)
    }
}

pub fn parse_graph_spec(text: &str) -> Result<WeightedGraphSpec> {
    let spec: WeightedGraphSpec = parse(text)?;
    spec.validate()?;
    Ok(spec)
}
