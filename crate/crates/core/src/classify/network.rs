use serde::{Deserialize, Serialize};

use crate::complex::{PlateauComplex, Vec3};
use crate::error::{PlateauError, Result};
use crate::funcspace::normal_plane;

/// Edge of the cross-section network: the image of one patch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub patch: usize,
    pub from: usize,
    /// Second node of a segment; `None` for a ray.
    pub to: Option<usize>,
    /// Unit direction leaving `from`.
    pub direction: [f64; 2],
}

/// Planar network whose product with a line is the complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarNetwork {
    /// Common line direction in ℝ³ and the plane basis used for projection.
    pub axis: [f64; 3],
    pub basis: [[f64; 3]; 2],
    pub nodes: Vec<[f64; 2]>,
    pub edges: Vec<NetworkEdge>,
    /// ‖Σ unit edge directions‖ per node.
    pub balance: Vec<f64>,
    /// Largest |angle − 2π/3| between neighbouring edges at degree-3 nodes.
    pub max_triple_angle_error: f64,
}

impl PlanarNetwork {
    pub fn max_balance(&self) -> f64 {
        self.balance.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serialization cannot fail")
    }
}

fn projection(msg: String) -> PlateauError {
    PlateauError::Projection(msg)
}

/// Project a product complex along its common line direction.
pub fn extract_network(c: &PlateauComplex, tol_angle: f64) -> Result<PlanarNetwork> {
    let curves = c.junctions();
    if curves.is_empty() {
        return Err(projection("no junction curve fixes a line direction".into()));
    }
    let chord = |k: usize| {
        let vs = &curves[k].vertices;
        (c.vertex(*vs.last().expect("curve vertices")) - c.vertex(vs[0])).normalize()
    };
    let mut axis = chord(0);
    if axis.iter().find(|x| x.abs() > 1e-12).is_some_and(|x| *x < 0.0) {
        axis = -axis;
    }
    for k in 0..curves.len() {
        if chord(k).cross(&axis).norm() > tol_angle {
            return Err(projection(format!("junction curve {k} is not parallel to curve 0")));
        }
    }
    for (p, patch) in c.patches().iter().enumerate() {
        for &t in &patch.triangles {
            if c.face_cross(t).normalize().dot(&axis).abs() > tol_angle {
                return Err(projection(format!("patch {p} is not parallel to the common direction")));
            }
        }
    }
    let (e1, e2) = normal_plane(&axis);
    let flat = |x: Vec3| [x.dot(&e1), x.dot(&e2)];
    let nodes: Vec<[f64; 2]> = curves.iter().map(|j| flat(c.vertex(j.vertices[0]))).collect();

    let mut edges = Vec::new();
    for (p, patch) in c.patches().iter().enumerate() {
        let touching: Vec<usize> = (0..curves.len()).filter(|&k| curves[k].patches.contains(&p)).collect();
        let area: f64 = patch.triangles.iter().map(|&t| c.triangle_area(t)).sum();
        let centroid: Vec3 = patch
            .triangles
            .iter()
            .map(|&t| {
                let tv = c.triangles()[t];
                (c.vertex(tv[0]) + c.vertex(tv[1]) + c.vertex(tv[2])) * (c.triangle_area(t) / 3.0)
            })
            .sum::<Vec3>()
            / area;
        let unit = |from: [f64; 2], to: [f64; 2]| {
            let (dx, dy) = (to[0] - from[0], to[1] - from[1]);
            let n = (dx * dx + dy * dy).sqrt();
            [dx / n, dy / n]
        };
        match touching.as_slice() {
            [k] => edges.push(NetworkEdge { patch: p, from: *k, to: None, direction: unit(nodes[*k], flat(centroid)) }),
            [a, b] => edges.push(NetworkEdge { patch: p, from: *a, to: Some(*b), direction: unit(nodes[*a], nodes[*b]) }),
            other => return Err(projection(format!("patch {p} touches {} junction lines", other.len()))),
        }
    }

    let mut balance = vec![0.0; nodes.len()];
    let mut max_triple = 0.0f64;
    for (k, b) in balance.iter_mut().enumerate() {
        let mut dirs: Vec<[f64; 2]> = Vec::new();
        for e in &edges {
            if e.from == k {
                dirs.push(e.direction);
            }
            if e.to == Some(k) {
                dirs.push([-e.direction[0], -e.direction[1]]);
            }
        }
        let sx: f64 = dirs.iter().map(|d| d[0]).sum();
        let sy: f64 = dirs.iter().map(|d| d[1]).sum();
        *b = (sx * sx + sy * sy).sqrt();
        if dirs.len() == 3 {
            let mut ang: Vec<f64> = dirs.iter().map(|d| d[1].atan2(d[0])).collect();
            ang.sort_by(f64::total_cmp);
            let tau = std::f64::consts::TAU;
            let gaps = [ang[1] - ang[0], ang[2] - ang[1], ang[0] + tau - ang[2]];
            for g in gaps {
                max_triple = max_triple.max((g - tau / 3.0).abs());
            }
        }
    }
    Ok(PlanarNetwork {
        axis: axis.into(),
        basis: [e1.into(), e2.into()],
        nodes,
        edges,
        balance,
        max_triple_angle_error: max_triple,
    })
}
