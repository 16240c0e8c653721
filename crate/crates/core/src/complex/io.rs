use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PlateauComplex, RawComplex, Vec3};
use crate::error::{PlateauError, Result};

/// A triangle in the interchange format: either a bare index triple or an
/// object with an optional patch label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TriangleRecord {
    Labeled {
        v: [usize; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        patch: Option<u32>,
    },
    Bare([usize; 3]),
}

impl TriangleRecord {
    pub fn vertices(&self) -> [usize; 3] {
        match self {
            TriangleRecord::Labeled { v, .. } | TriangleRecord::Bare(v) => *v,
        }
    }
    pub fn patch(&self) -> Option<u32> {
        match self {
            TriangleRecord::Labeled { patch, .. } => *patch,
            TriangleRecord::Bare(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<TriangleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junctions: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_points: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub normal_side: BTreeMap<u32, i8>,
    /// Boundary edges that are artificial truncations of an unbounded sheet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extends: Option<Vec<[usize; 2]>>,
}

impl MeshFile {
    pub fn into_raw(self) -> Result<RawComplex> {
        let labeled = self.triangles.iter().filter(|t| t.patch().is_some()).count();
        if labeled != 0 && labeled != self.triangles.len() {
            return Err(PlateauError::Parse(
                "either every triangle carries a patch label or none does".into(),
            ));
        }
        let patch_labels =
            (labeled != 0).then(|| self.triangles.iter().map(|t| t.patch().unwrap()).collect());
        Ok(RawComplex {
            vertices: self.vertices.into_iter().map(Vec3::from).collect(),
            triangles: self.triangles.iter().map(|t| t.vertices()).collect(),
            patch_labels,
            junctions: self.junctions,
            t_points: self.t_points,
            normal_side: self.normal_side,
            extends: self.extends,
            tol_geom: None,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PlateauError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mesh serialization cannot fail")
    }

    /// Interchange representation of a validated complex: oriented triangles,
    /// explicit labels, normalized junction polylines.
    pub fn from_complex(c: &PlateauComplex) -> Self {
        let triangles = c
            .triangles()
            .iter()
            .enumerate()
            .map(|(t, v)| TriangleRecord::Labeled { v: *v, patch: Some(c.patches()[c.triangle_patch(t)].label) })
            .collect();
        let junctions = c
            .junctions()
            .iter()
            .map(|j| {
                let mut line = j.vertices.clone();
                if j.closed {
                    line.push(line[0]);
                }
                line
            })
            .collect::<Vec<_>>();
        let extends = c.has_extends().then(|| {
            c.edges()
                .filter(|(e, ts)| ts.len() == 1 && !c.finite_edges().contains(e))
                .map(|(&(a, b), _)| [a, b])
                .collect()
        });
        MeshFile {
            vertices: c.vertices().iter().map(|p| [p.x, p.y, p.z]).collect(),
            triangles,
            junctions: (!junctions.is_empty()).then_some(junctions),
            t_points: (!c.t_points().is_empty()).then(|| c.t_points().iter().map(|t| t.vertex).collect()),
            normal_side: BTreeMap::new(),
            extends,
        }
    }
}

pub fn parse_complex(text: &str) -> Result<PlateauComplex> {
    PlateauComplex::build(MeshFile::parse(text)?.into_raw()?)
}

pub fn load_complex(path: impl AsRef<Path>) -> Result<PlateauComplex> {
    let text = std::fs::read_to_string(path)?;
    parse_complex(&text)
}

pub fn save_complex(c: &PlateauComplex, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, MeshFile::from_complex(c).to_json())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Y_HINGE: &str = r#"{
        "vertices": [[0,0,0],[0,0,1],[1,0,0.5],[-0.5,0.8,0.5],[-0.5,-0.8,0.5]],
        "triangles": [{"v":[0,1,2],"patch":7},{"v":[0,1,3],"patch":3},{"v":[0,1,4],"patch":5}]
    }"#;

    #[test]
    fn labels_survive_a_round_trip() {
        let c = parse_complex(Y_HINGE).unwrap();
        assert_eq!(c.patch_labels(), vec![3, 5, 7]);
        let again = parse_complex(&MeshFile::from_complex(&c).to_json()).unwrap();
        assert_eq!(again.patch_labels(), c.patch_labels());
        assert_eq!(again.triangles(), c.triangles());
    }

    #[test]
    fn bare_triples_are_accepted() {
        let c = parse_complex(r#"{"vertices":[[0,0,0],[1,0,0],[0,1,0]],"triangles":[[0,1,2]]}"#).unwrap();
        assert_eq!(c.patches().len(), 1);
    }

    #[test]
    fn mixed_labels_are_a_parse_error() {
        let text = r#"{"vertices":[[0,0,0],[1,0,0],[0,1,0],[1,1,0]],
            "triangles":[{"v":[0,1,2],"patch":1},{"v":[1,3,2]}]}"#;
        assert!(matches!(parse_complex(text), Err(PlateauError::Parse(_))));
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(parse_complex("{\"vertices\": 3"), Err(PlateauError::Parse(_))));
        assert!(matches!(
            parse_complex(r#"{"vertices":[[0,0,0]],"triangles":[[0,1,2]]}"#),
            Err(PlateauError::Parse(_))
        ));
    }
}
