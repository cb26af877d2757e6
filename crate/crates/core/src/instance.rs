//! Weighted k-set packing instances: data model, validation, and JSON I/O.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weight::Weight;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("k must be at least 1, got {0}")]
    BadK(usize),
    #[error("set {id:?} has {len} elements, exceeding k = {k}")]
    SetTooLarge { id: String, len: usize, k: usize },
    #[error("set {id:?} is empty")]
    EmptySet { id: String },
    #[error("duplicate set id {id:?}")]
    DuplicateId { id: String },
    #[error("set {id:?} repeats element {element:?}")]
    DuplicateElement { id: String, element: String },
    #[error("set {id:?} has non-positive weight")]
    NonPositiveWeight { id: String },
    #[error("label refers to unknown set id {id:?}")]
    UnknownLabelId { id: String },
    #[error(
        "labelled collection {which:?} is not pairwise disjoint: sets {a:?} and {b:?} intersect"
    )]
    LabelNotDisjoint { which: String, a: String, b: String },
    #[error("invalid generator parameters: {0}")]
    Parameter(String),
}

/// One set of the family: an id, its elements, and a positive weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDef {
    pub id: String,
    pub elements: Vec<String>,
    pub weight: Weight,
}

/// A validated weighted k-set packing instance.
///
/// Invariants (enforced by [`Instance::new`] and on load):
/// every set has 1..=k elements, set ids are unique, element lists are
/// duplicate-free, and all weights are strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    k: usize,
    sets: Vec<SetDef>,
}

impl Instance {
    pub fn new(k: usize, sets: Vec<SetDef>) -> Result<Self, InstanceError> {
        if k == 0 {
            return Err(InstanceError::BadK(k));
        }
        let mut seen_ids = BTreeSet::new();
        for set in &sets {
            if !seen_ids.insert(set.id.clone()) {
                return Err(InstanceError::DuplicateId { id: set.id.clone() });
            }
            if set.elements.is_empty() {
                return Err(InstanceError::EmptySet { id: set.id.clone() });
            }
            if set.elements.len() > k {
                return Err(InstanceError::SetTooLarge {
                    id: set.id.clone(),
                    len: set.elements.len(),
                    k,
                });
            }
            let mut elems = BTreeSet::new();
            for e in &set.elements {
                if !elems.insert(e) {
                    return Err(InstanceError::DuplicateElement {
                        id: set.id.clone(),
                        element: e.clone(),
                    });
                }
            }
        }
        Ok(Instance { k, sets })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sets(&self) -> &[SetDef] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Index of a set id in file order, if present.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.sets.iter().position(|s| s.id == id)
    }
}

/// An instance together with optional known solutions used by generators,
/// benchmarks, and the analysis tooling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledInstance {
    pub instance: Instance,
    /// A known pairwise-disjoint sub-collection of high weight (e.g. the
    /// planted optimum of a generated instance).
    pub planted_solution: Option<Vec<String>>,
    /// A known pairwise-disjoint starting solution that resists local search.
    pub adversarial_start: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FileFormat {
    k: usize,
    sets: Vec<SetDef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    planted_solution: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adversarial_start: Option<Vec<String>>,
}

impl LabeledInstance {
    pub fn unlabeled(instance: Instance) -> Self {
        LabeledInstance {
            instance,
            planted_solution: None,
            adversarial_start: None,
        }
    }

    pub fn new(
        instance: Instance,
        planted_solution: Option<Vec<String>>,
        adversarial_start: Option<Vec<String>>,
    ) -> Result<Self, InstanceError> {
        if let Some(ids) = &planted_solution {
            check_disjoint_collection(&instance, "planted_solution", ids)?;
        }
        if let Some(ids) = &adversarial_start {
            check_disjoint_collection(&instance, "adversarial_start", ids)?;
        }
        Ok(LabeledInstance {
            instance,
            planted_solution,
            adversarial_start,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, InstanceError> {
        let path = path.as_ref();
        let data = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&data)
    }

    pub fn from_json(data: &str) -> Result<Self, InstanceError> {
        let raw: FileFormat =
            serde_json::from_str(data).map_err(|e| InstanceError::Parse(e.to_string()))?;
        let instance = Instance::new(raw.k, raw.sets)?;
        LabeledInstance::new(instance, raw.planted_solution, raw.adversarial_start)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), InstanceError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| InstanceError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = FileFormat {
            k: self.instance.k,
            sets: self.instance.sets.clone(),
            planted_solution: self.planted_solution.clone(),
            adversarial_start: self.adversarial_start.clone(),
        };
        let mut out = serde_json::to_string_pretty(&raw).expect("instance serialization");
        out.push('\n');
        out
    }
}

fn check_disjoint_collection(
    instance: &Instance,
    which: &str,
    ids: &[String],
) -> Result<(), InstanceError> {
    let by_id: BTreeMap<&str, &SetDef> = instance.sets.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    for id in ids {
        let set = by_id
            .get(id.as_str())
            .ok_or_else(|| InstanceError::UnknownLabelId { id: id.clone() })?;
        for e in &set.elements {
            if let Some(prev) = owner.insert(e.as_str(), id.as_str()) {
                return Err(InstanceError::LabelNotDisjoint {
                    which: which.to_string(),
                    a: prev.to_string(),
                    b: id.clone(),
                });
            }
        }
    }
    Ok(())
}
