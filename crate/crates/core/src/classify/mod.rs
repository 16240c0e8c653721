//! Flat Plateau complexes: flatness test, planar region types of patches,
//! the case analysis into parallel planes, network × ℝ, T cone and double T,
//! and extraction of the planar cross-section network.

mod network;
mod regions;

pub use network::{extract_network, NetworkEdge, PlanarNetwork};
pub use regions::{region_type, RegionReport, RegionType, Side};

use serde::Serialize;

use crate::complex::{CurveEnd, PlateauComplex, Vec3};
use crate::error::{PlateauError, Result};
use crate::geometry::CurvatureData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FlatTag {
    ParallelPlanes,
    NetworkTimesR,
    TCone,
    DoubleT,
    NonFlat,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Flatness {
    pub flat: bool,
    /// Largest |A|² over fitted slots.
    pub max_a2: f64,
    /// Largest turning angle between consecutive junction edges (radians).
    pub max_turning: f64,
    pub tol_flat: f64,
}

/// Flat iff every fitted |A|² is at most `tol_flat` and every junction
/// polyline turns by at most √tol_flat.
pub fn is_flat(c: &PlateauComplex, curv: &CurvatureData, tol_flat: f64) -> Flatness {
    let max_a2 = curv.a2.iter().zip(&curv.fitted).filter(|(_, f)| **f).map(|(a, _)| *a).fold(0.0, f64::max);
    let mut max_turning = 0.0f64;
    for curve in c.junctions() {
        let mut pts: Vec<Vec3> = curve.vertices.iter().map(|&v| c.vertex(v)).collect();
        if curve.closed {
            pts.push(pts[0]);
            pts.push(pts[1]);
        }
        for w in pts.windows(3) {
            let (a, b) = ((w[1] - w[0]).normalize(), (w[2] - w[1]).normalize());
            max_turning = max_turning.max(a.cross(&b).norm().atan2(a.dot(&b)));
        }
    }
    Flatness { flat: max_a2 <= tol_flat && max_turning <= tol_flat.sqrt(), max_a2, max_turning, tol_flat }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatClassification {
    pub tag: FlatTag,
    pub flatness: Flatness,
    /// Per patch, the region type or the reason none applies.
    pub regions: Vec<std::result::Result<RegionReport, String>>,
    pub network: Option<PlanarNetwork>,
    pub t_points: Vec<[f64; 3]>,
    pub components: usize,
}

fn structure(msg: String) -> PlateauError {
    PlateauError::Structure(msg)
}

/// Number of connected components of the complex (triangles joined across
/// shared edges).
pub fn connected_components(c: &PlateauComplex) -> usize {
    let n = c.triangles().len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            let tv = c.triangles()[t];
            for k in 0..3 {
                for &u in c.edge_triangles(tv[k], tv[(k + 1) % 3]) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
    }
    count
}

fn patch_normal(c: &PlateauComplex, patch: usize) -> Vec3 {
    let sum: Vec3 = c.patches()[patch].triangles.iter().map(|&t| c.face_cross(t)).sum();
    sum.normalize()
}

/// Decision tree on a flat complex: a full plane, then a full junction line,
/// then the number of T-points.
pub fn classify_flat(c: &PlateauComplex, curv: &CurvatureData, tol_flat: f64, tol_angle: f64) -> Result<FlatClassification> {
    let flatness = is_flat(c, curv, tol_flat);
    let components = connected_components(c);
    let regions: Vec<_> =
        (0..c.patches().len()).map(|p| region_type(c, p, tol_angle).map_err(|e| e.to_string())).collect();
    let t_points: Vec<[f64; 3]> = c.t_points().iter().map(|t| c.vertex(t.vertex).into()).collect();
    let mut out = FlatClassification {
        tag: FlatTag::Indeterminate,
        flatness,
        regions,
        network: None,
        t_points,
        components,
    };
    if !out.flatness.flat {
        out.tag = FlatTag::NonFlat;
        return Ok(out);
    }
    let region_of = |p: usize| out.regions[p].as_ref().ok().map(|r| r.region);

    // (a) a whole plane.
    if (0..c.patches().len()).any(|p| region_of(p) == Some(RegionType::Plane)) {
        if !c.junctions().is_empty() {
            return Err(structure("a full plane meets a junction curve".into()));
        }
        let n0 = patch_normal(c, 0);
        for p in 0..c.patches().len() {
            if region_of(p) != Some(RegionType::Plane) {
                return Err(structure(format!("patch {p} is not a full plane")));
            }
            if n0.cross(&patch_normal(c, p)).norm() > tol_angle {
                return Err(structure(format!("plane {p} is not parallel to plane 0")));
            }
        }
        out.tag = FlatTag::ParallelPlanes;
        return Ok(out);
    }

    // (b) a junction curve that is a whole line.
    let full_line = c.junctions().iter().any(|j| j.start == CurveEnd::Boundary && j.end == CurveEnd::Boundary);
    if full_line {
        if !c.t_points().is_empty() {
            return Err(structure("a full junction line coexists with T-points".into()));
        }
        for p in 0..c.patches().len() {
            match region_of(p) {
                Some(RegionType::HalfPlane | RegionType::Strip) => {}
                _ => return Err(structure(format!("patch {p} of a network × ℝ is not a half-plane or strip"))),
            }
        }
        out.network = Some(extract_network(c, tol_angle)?);
        out.tag = FlatTag::NetworkTimesR;
        return Ok(out);
    }

    match c.t_points().len() {
        0 => Ok(out),
        1 => {
            if components != 1 {
                return Err(structure(format!("T cone with {components} components")));
            }
            let tv = c.t_points()[0].vertex;
            for (k, j) in c.junctions().iter().enumerate() {
                let from_t = matches!(j.start, CurveEnd::TPoint(_)) || matches!(j.end, CurveEnd::TPoint(_));
                let both_t = matches!(j.start, CurveEnd::TPoint(_)) && matches!(j.end, CurveEnd::TPoint(_));
                if !from_t || both_t || !j.vertices.contains(&tv) {
                    return Err(structure(format!("junction curve {k} is not a ray from the T-point")));
                }
            }
            if c.patches().len() != 6 || (0..6).any(|p| region_of(p) != Some(RegionType::Angular)) {
                return Err(structure("T cone faces are not six tetrahedral sectors".into()));
            }
            out.tag = FlatTag::TCone;
            Ok(out)
        }
        2 => {
            if components != 1 {
                return Err(structure(format!("double T with {components} components")));
            }
            let (a, b) = (c.t_points()[0].vertex, c.t_points()[1].vertex);
            let joined = c.junctions().iter().any(|j| {
                let ends = (j.vertices[0], *j.vertices.last().expect("curve vertices"));
                !j.closed && (ends == (a, b) || ends == (b, a))
            });
            if !joined {
                return Err(structure("the two T-points are not joined by a junction segment".into()));
            }
            for p in 0..c.patches().len() {
                match region_of(p) {
                    Some(RegionType::Angular | RegionType::ThreeSided) => {}
                    _ => return Err(structure(format!("patch {p} of a double T is neither angular nor three-sided"))),
                }
            }
            out.tag = FlatTag::DoubleT;
            Ok(out)
        }
        k => Err(structure(format!("a flat complex has {k} T-points; at most two are possible"))),
    }
}
