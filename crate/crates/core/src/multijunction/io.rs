use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{PlateauComplex, RawComplex, Vec3};
use crate::error::{PlateauError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetRecord {
    pub theta: f64,
    pub triangles: Vec<[usize; 3]>,
    /// Flip the computed normal of this sheet when -1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_side: Option<i8>,
}

/// Multiple-junction interchange document: sheets over a common vertex pool
/// sharing the polyline `gamma` (a closed curve repeats its first vertex).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiFile {
    pub vertices: Vec<[f64; 3]>,
    pub sheets: Vec<SheetRecord>,
    pub gamma: Vec<usize>,
}

impl MultiFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PlateauError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("multi-junction serialization cannot fail")
    }

    /// Validated complex (one patch per sheet, labels = sheet indices) and
    /// the per-sheet densities.
    pub fn into_complex(self) -> Result<(PlateauComplex, Vec<f64>)> {
        if self.sheets.len() > 16 {
            return Err(PlateauError::Structure(format!("{} sheets exceed the limit of 16", self.sheets.len())));
        }
        let mut triangles = Vec::new();
        let mut labels = Vec::new();
        let mut normal_side = std::collections::BTreeMap::new();
        let mut theta = Vec::with_capacity(self.sheets.len());
        for (i, sheet) in self.sheets.iter().enumerate() {
            if !(sheet.theta > 0.0 && sheet.theta.is_finite()) {
                return Err(PlateauError::Parse(format!("sheet {i} has non-positive density {}", sheet.theta)));
            }
            if sheet.triangles.is_empty() {
                return Err(PlateauError::Structure(format!("sheet {i} has no triangles")));
            }
            theta.push(sheet.theta);
            triangles.extend_from_slice(&sheet.triangles);
            labels.extend(std::iter::repeat(i as u32).take(sheet.triangles.len()));
            if let Some(side) = sheet.normal_side {
                normal_side.insert(i as u32, side);
            }
        }
        if self.gamma.iter().any(|&v| v >= self.vertices.len()) {
            return Err(PlateauError::Parse("gamma references a missing vertex".into()));
        }
        let raw = RawComplex {
            vertices: self.vertices.into_iter().map(Vec3::from).collect(),
            triangles,
            patch_labels: Some(labels),
            normal_side,
            ..Default::default()
        };
        let c = PlateauComplex::build_multi(raw, self.gamma)?;
        Ok((c, theta))
    }
}

pub fn load_multi(path: impl AsRef<Path>) -> Result<(PlateauComplex, Vec<f64>)> {
    MultiFile::parse(&std::fs::read_to_string(path)?)?.into_complex()
}
