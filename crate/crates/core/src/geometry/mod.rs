//! Geometric quantities consumed by the variation formulas.

mod area;
mod curvature;
mod frames;

pub use area::{area_growth_constant, area_in_ball, AreaGrowth};
pub use curvature::{compute_curvature, CurvatureData};
pub use frames::{compute_frames, JunctionFrames, JunctionVertexFrame};

use crate::complex::{PlateauComplex, Vec3};
use crate::error::{PlateauError, Result};

/// Fan normal of every slot.
pub fn slot_normals(c: &PlateauComplex) -> Vec<Vec3> {
    c.slots().iter().map(|s| c.fan_normal(s.vertex, s.patch)).collect()
}

/// Unit tangent of junction curve `curve` at each of its vertices, in
/// curve direction.
pub fn curve_tangents(c: &PlateauComplex, curve: usize) -> Vec<Vec3> {
    let jc = &c.junctions()[curve];
    let pts: Vec<Vec3> = jc.vertices.iter().map(|&v| c.vertex(v)).collect();
    frames::polyline_differentials(&pts, jc.closed).into_iter().map(|(t, _)| t).collect()
}

/// Reject triangles whose area falls below `tol_geom²`.
pub fn check_triangles(c: &PlateauComplex) -> Result<()> {
    let min_area = c.tol_geom() * c.tol_geom();
    for t in 0..c.triangles().len() {
        let area = c.triangle_area(t);
        if !(area > min_area) {
            return Err(PlateauError::DegenerateTriangle { triangle: t, area });
        }
    }
    Ok(())
}

/// Mixed Voronoi area of each corner of a triangle (Meyer et al.): Voronoi
/// cells for non-obtuse triangles, area splits of 1/2 and 1/4 otherwise.
pub fn mixed_corner_areas(p: [Vec3; 3]) -> [f64; 3] {
    let area = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
    let angle_cot = |i: usize| {
        let (a, b) = (p[(i + 1) % 3] - p[i], p[(i + 2) % 3] - p[i]);
        a.dot(&b) / a.cross(&b).norm()
    };
    let obtuse_at = (0..3).find(|&i| (p[(i + 1) % 3] - p[i]).dot(&(p[(i + 2) % 3] - p[i])) < 0.0);
    match obtuse_at {
        None => {
            let cots = [angle_cot(0), angle_cot(1), angle_cot(2)];
            let mut out = [0.0; 3];
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                out[i] = ((p[j] - p[i]).norm_squared() * cots[k] + (p[k] - p[i]).norm_squared() * cots[j]) / 8.0;
            }
            out
        }
        Some(o) => {
            let mut out = [area / 4.0; 3];
            out[o] = area / 2.0;
            out
        }
    }
}

/// Mixed Voronoi area of every slot (the patch's own triangles only).
pub fn slot_masses(c: &PlateauComplex) -> Vec<f64> {
    let mut mass = vec![0.0; c.num_slots()];
    for (t, tv) in c.triangles().iter().enumerate() {
        let p = c.triangle_patch(t);
        let corners = mixed_corner_areas([c.vertex(tv[0]), c.vertex(tv[1]), c.vertex(tv[2])]);
        for k in 0..3 {
            let s = c.slot_of(tv[k], p).expect("triangle corner has a slot");
            mass[s] += corners[k];
        }
    }
    mass
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_areas_partition_the_triangle() {
        let acute = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.1, 0.0), Vec3::new(0.4, 0.9, 0.0)];
        let obtuse = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.5, 0.1, 0.0)];
        for p in [acute, obtuse] {
            let area = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
            let sum: f64 = mixed_corner_areas(p).iter().sum();
            assert!((sum - area).abs() < 1e-15, "{sum} vs {area}");
        }
        let a = mixed_corner_areas(obtuse);
        assert!((a[2] - 0.025).abs() < 1e-15);
    }
}
