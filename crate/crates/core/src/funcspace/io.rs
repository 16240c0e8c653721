use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ScalarField, VectorField};
use crate::complex::{PlateauComplex, Vec3};
use crate::error::{PlateauError, Result};

/// Value of a scalar field at one (patch label, vertex) slot.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub patch: u32,
    pub vertex: usize,
    pub value: f64,
}

/// Field interchange document. Scalar fields list slot values (missing slots
/// are zero); vector fields list one vector per vertex.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldFile {
    Scalar { entries: Vec<FieldEntry> },
    Vector { vectors: Vec<[f64; 3]> },
}

impl FieldFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PlateauError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("field documents serialize")
    }

    pub fn from_scalar(c: &PlateauComplex, f: &ScalarField) -> Self {
        let entries = c
            .slots()
            .iter()
            .zip(&f.values)
            .map(|(s, &value)| FieldEntry { patch: c.patches()[s.patch].label, vertex: s.vertex, value })
            .collect();
        FieldFile::Scalar { entries }
    }

    pub fn from_vector(v: &VectorField) -> Self {
        FieldFile::Vector { vectors: v.vectors.iter().map(|p| [p.x, p.y, p.z]).collect() }
    }

    pub fn into_scalar(self, c: &PlateauComplex) -> Result<ScalarField> {
        let FieldFile::Scalar { entries } = self else {
            return Err(PlateauError::Parse("expected a scalar field".into()));
        };
        let mut f = ScalarField::zeros(c);
        for e in entries {
            let patch = c
                .patches()
                .iter()
                .position(|p| p.label == e.patch)
                .ok_or_else(|| PlateauError::Parse(format!("unknown patch {}", e.patch)))?;
            if e.vertex >= c.vertices().len() {
                return Err(PlateauError::Parse(format!("vertex {} out of range", e.vertex)));
            }
            let slot = c
                .slot_of(e.vertex, patch)
                .ok_or_else(|| PlateauError::Parse(format!("vertex {} is not on patch {}", e.vertex, e.patch)))?;
            if !e.value.is_finite() {
                return Err(PlateauError::Parse(format!("non-finite value at vertex {}", e.vertex)));
            }
            f.values[slot] = e.value;
        }
        Ok(f)
    }

    pub fn into_vector(self, c: &PlateauComplex) -> Result<VectorField> {
        let FieldFile::Vector { vectors } = self else {
            return Err(PlateauError::Parse("expected a vector field".into()));
        };
        if vectors.len() != c.vertices().len() {
            return Err(PlateauError::Parse(format!(
                "vector field has {} entries for {} vertices",
                vectors.len(),
                c.vertices().len()
            )));
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(PlateauError::Parse("non-finite vector component".into()));
        }
        Ok(VectorField { vectors: vectors.into_iter().map(Vec3::from).collect() })
    }
}

pub fn load_field(path: impl AsRef<Path>) -> Result<FieldFile> {
    FieldFile::parse(&std::fs::read_to_string(path)?)
}
