use crate::complex::{PlateauComplex, SignAssignment, Vec3, VertexKind};
use crate::error::Result;

use super::check_triangles;

/// Frame data at one vertex of one junction curve.
#[derive(Clone, Debug)]
pub struct JunctionVertexFrame {
    pub vertex: usize,
    pub tangent: Vec3,
    /// Curvature vector of the curve (points toward the center of curvature).
    pub curvature: Vec3,
    /// Trapezoid quadrature weight (half the adjacent edge lengths).
    pub weight: f64,
    /// Per incident patch, aligned with `JunctionCurve::patches`. Normals are
    /// fan normals made orthogonal to the conormal and the tangent.
    pub normals: Vec<Vec3>,
    pub conormals: Vec<Vec3>,
}

impl JunctionVertexFrame {
    pub fn conormal_sum(&self) -> Vec3 {
        self.conormals.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct JunctionFrames {
    /// Per junction curve, per curve vertex.
    pub curves: Vec<Vec<JunctionVertexFrame>>,
    /// max ‖Σ τⁱ‖ over all junction vertices.
    pub max_stationarity: f64,
    /// max ‖Σ signⁱ νⁱ‖.
    pub max_sign_residual: f64,
    /// max of |τ·ν| and |τ·t|.
    pub max_orthogonality: f64,
}

/// Derivative and second derivative of the quadratic through three samples
/// at chord parameters 0, h1, h1 + h2, evaluated at `at` ∈ {0, 1, 2}.
fn quadratic_derivatives(x: [Vec3; 3], h1: f64, h2: f64, at: usize) -> (Vec3, Vec3) {
    let f01 = (x[1] - x[0]) / h1;
    let f12 = (x[2] - x[1]) / h2;
    let f012 = (f12 - f01) / (h1 + h2);
    let d1 = match at {
        0 => f01 - f012 * h1,
        1 => f01 + f012 * h1,
        _ => f01 + f012 * (h1 + 2.0 * h2),
    };
    (d1, f012 * 2.0)
}

/// Unit tangents and curvature vectors along a polyline.
pub(crate) fn polyline_differentials(points: &[Vec3], closed: bool) -> Vec<(Vec3, Vec3)> {
    let m = points.len();
    if m == 2 && !closed {
        let t = (points[1] - points[0]).normalize();
        return vec![(t, Vec3::zeros()); 2];
    }
    (0..m)
        .map(|k| {
            let (idx, at) = if closed {
                ([(k + m - 1) % m, k, (k + 1) % m], 1)
            } else if k == 0 {
                ([0, 1, 2], 0)
            } else if k == m - 1 {
                ([m - 3, m - 2, m - 1], 2)
            } else {
                ([k - 1, k, k + 1], 1)
            };
            let x = [points[idx[0]], points[idx[1]], points[idx[2]]];
            let h1 = (x[1] - x[0]).norm();
            let h2 = (x[2] - x[1]).norm();
            let (d1, d2) = quadratic_derivatives(x, h1, h2, at);
            let t = d1.normalize();
            (t, d2 - t * d2.dot(&t))
        })
        .collect()
}

/// Area gradient at `v` of the triangles of `patch`: on a flat sheet this
/// is (half the adjacent curve edge lengths) × the outward conormal, and it
/// stays free of the normal-turning bias of fan normals on curved sheets.
fn sheet_pull(c: &PlateauComplex, v: usize, patch: usize) -> Vec3 {
    let mut g = Vec3::zeros();
    for &t in c.vertex_triangles(v) {
        if c.triangle_patch(t) != patch {
            continue;
        }
        let tv = c.triangles()[t];
        let k = tv.iter().position(|&w| w == v).expect("corner");
        let (b, cc) = (c.vertex(tv[(k + 1) % 3]), c.vertex(tv[(k + 2) % 3]));
        let nhat = c.face_cross(t).normalize();
        g += nhat.cross(&(cc - b)) * 0.5;
    }
    g
}

/// Conormals, normals, tangents and curvature vectors at every junction vertex.
pub fn compute_frames(c: &PlateauComplex, s: &SignAssignment) -> Result<JunctionFrames> {
    check_triangles(c)?;
    let mut curves = Vec::with_capacity(c.junctions().len());
    let (mut max_stat, mut max_sign, mut max_orth) = (0.0f64, 0.0f64, 0.0f64);
    for (ci, curve) in c.junctions().iter().enumerate() {
        let pts: Vec<Vec3> = curve.vertices.iter().map(|&v| c.vertex(v)).collect();
        let diffs = polyline_differentials(&pts, curve.closed);
        let m = pts.len();
        let frames: Vec<JunctionVertexFrame> = curve
            .vertices
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (tangent, curvature) = diffs[k];
                let prev = if k > 0 {
                    Some(k - 1)
                } else if curve.closed {
                    Some(m - 1)
                } else {
                    None
                };
                let next = if k + 1 < m {
                    Some(k + 1)
                } else if curve.closed {
                    Some(0)
                } else {
                    None
                };
                let weight = 0.5
                    * (prev.map_or(0.0, |j| (pts[k] - pts[j]).norm())
                        + next.map_or(0.0, |j| (pts[k] - pts[j]).norm()));
                let interior = c.kind(v) == VertexKind::Junction;
                let mut normals = Vec::with_capacity(curve.patches.len());
                let mut conormals = Vec::with_capacity(curve.patches.len());
                for (&p, &sg) in curve.patches.iter().zip(&s.curve_signs[ci]) {
                    let fan = c.fan_normal(v, p);
                    let mut tau = tangent.cross(&fan).normalize() * f64::from(sg);
                    if interior {
                        let pull = sheet_pull(c, v, p);
                        let pull = pull - tangent * pull.dot(&tangent);
                        if pull.norm() > 0.0 {
                            tau = pull.normalize();
                        }
                    }
                    let nu = fan - tau * fan.dot(&tau) - tangent * fan.dot(&tangent);
                    normals.push(nu.normalize());
                    conormals.push(tau);
                }
                JunctionVertexFrame { vertex: v, tangent, curvature, weight, normals, conormals }
            })
            .collect();
        for f in &frames {
            max_stat = max_stat.max(f.conormal_sum().norm());
            let sign_sum: Vec3 =
                f.normals.iter().zip(&s.curve_signs[ci]).map(|(n, &sg)| n * f64::from(sg)).sum();
            max_sign = max_sign.max(sign_sum.norm());
            for (tau, n) in f.conormals.iter().zip(&f.normals) {
                max_orth = max_orth.max(tau.dot(n).abs()).max(tau.dot(&f.tangent).abs());
            }
        }
        curves.push(frames);
    }
    Ok(JunctionFrames {
        curves,
        max_stationarity: max_stat,
        max_sign_residual: max_sign,
        max_orthogonality: max_orth,
    })
}
