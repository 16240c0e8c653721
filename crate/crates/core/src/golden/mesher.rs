//! Meshing of convex planar faces that share sampled edges, plus a vertex
//! pool for structured sheets.

use std::collections::HashMap;

use crate::complex::{MeshFile, TriangleRecord, Vec3};

/// Vertex pool. Structured generators deduplicate by exact coordinates so
/// that sheets computed independently share their seam vertices.
#[derive(Default)]
pub struct Pool {
    pub points: Vec<Vec3>,
    index: HashMap<[u64; 3], usize>,
}

impl Pool {
    pub fn add(&mut self, p: Vec3) -> usize {
        self.points.push(p);
        self.points.len() - 1
    }

    pub fn shared(&mut self, p: Vec3) -> usize {
        // -0.0 and 0.0 must coincide.
        let key = [(p.x + 0.0).to_bits(), (p.y + 0.0).to_bits(), (p.z + 0.0).to_bits()];
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.add(p);
        self.index.insert(key, id);
        id
    }
}

/// Collects labeled triangles over a pool and emits an interchange file.
#[derive(Default)]
pub struct MeshBuilder {
    pub pool: Pool,
    pub triangles: Vec<([usize; 3], u32)>,
    edges: HashMap<(usize, usize), Vec<usize>>,
    pub h: f64,
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Delaunay triangulation with robust predicates; returns CCW index triples
/// in a canonical order.
pub fn delaunay(points: &[[f64; 2]]) -> Vec<[usize; 3]> {
    use spade::{DelaunayTriangulation, Point2, Triangulation};
    let mut dt: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    let mut index = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let handle = dt.insert(Point2::new(p[0], p[1])).expect("finite sample point");
        index.insert(handle.index(), i);
    }
    let mut tris: Vec<[usize; 3]> = dt
        .inner_faces()
        .map(|f| {
            let v = f.vertices();
            let mut t = [index[&v[0].fix().index()], index[&v[1].fix().index()], index[&v[2].fix().index()]];
            if orient(points[t[0]], points[t[1]], points[t[2]]) < 0.0 {
                t.swap(1, 2);
            }
            let r = (0..3).min_by_key(|&k| t[k]).unwrap();
            [t[r], t[(r + 1) % 3], t[(r + 2) % 3]]
        })
        .collect();
    tris.sort_unstable();
    tris
}

impl MeshBuilder {
    pub fn new(h: f64) -> Self {
        MeshBuilder { h, ..Default::default() }
    }

    pub fn corner(&mut self, p: Vec3) -> usize {
        self.pool.shared(p)
    }

    /// Sample points of the straight edge a→b (inclusive), shared between
    /// every face that uses it.
    pub fn edge(&mut self, a: usize, b: usize) -> Vec<usize> {
        if let Some(s) = self.edges.get(&(a, b)) {
            return s.clone();
        }
        if let Some(s) = self.edges.get(&(b, a)) {
            return s.iter().rev().copied().collect();
        }
        let (pa, pb) = (self.pool.points[a], self.pool.points[b]);
        let n = ((pb - pa).norm() / self.h).ceil().max(1.0) as usize;
        let mut ids = vec![a];
        for k in 1..n {
            let t = k as f64 / n as f64;
            ids.push(self.pool.add(pa + (pb - pa) * t));
        }
        ids.push(b);
        self.edges.insert((a, b), ids.clone());
        ids
    }

    /// Mesh the convex planar polygon with the given corners. The emitted
    /// triangles are wound so their normal agrees with `normal`.
    pub fn face(&mut self, corners: &[usize], label: u32, normal: Vec3) {
        let h = self.h;
        let m = corners.len();
        let mut ring: Vec<usize> = Vec::new();
        for k in 0..m {
            let e = self.edge(corners[k], corners[(k + 1) % m]);
            ring.extend_from_slice(&e[..e.len() - 1]);
        }
        let origin = self.pool.points[corners[0]];
        let mut newell = Vec3::zeros();
        for k in 0..m {
            newell += self.pool.points[corners[k]].cross(&self.pool.points[corners[(k + 1) % m]]);
        }
        let n = newell.normalize();
        let e1 = (self.pool.points[corners[1]] - origin).normalize();
        let e2 = n.cross(&e1);
        let to2 = |p: &Vec3| [(p - origin).dot(&e1), (p - origin).dot(&e2)];
        let ring2: Vec<[f64; 2]> = ring.iter().map(|&v| to2(&self.pool.points[v])).collect();

        let nr = ring.len();

        // Bulge each maximal straight run outward along a parabola so the
        // boundary is strictly convex for the triangulator.
        let mut flat2 = ring2.clone();
        let is_straight = |k: usize| {
            let (a, b, c) = (ring2[(k + nr - 1) % nr], ring2[k], ring2[(k + 1) % nr]);
            let len = ((c[0] - a[0]).powi(2) + (c[1] - a[1]).powi(2)).sqrt();
            orient(a, b, c).abs() <= 1e-9 * len * len
        };
        let straight: Vec<bool> = (0..nr).map(is_straight).collect();
        let mut k0 = 0;
        while k0 < nr && straight[k0] {
            k0 += 1;
        }
        if k0 < nr {
            let mut k = k0;
            loop {
                // Run from a non-straight point k to the next non-straight point.
                let mut run = vec![k];
                let mut j = (k + 1) % nr;
                while straight[j] {
                    run.push(j);
                    j = (j + 1) % nr;
                }
                run.push(j);
                if run.len() > 2 {
                    let (a, b) = (ring2[run[0]], ring2[*run.last().unwrap()]);
                    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                    let dir = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
                    // Outward normal of a CCW polygon edge.
                    let out = [dir[1], -dir[0]];
                    for &r in &run[1..run.len() - 1] {
                        let p = ring2[r];
                        let t = ((p[0] - a[0]) * dir[0] + (p[1] - a[1]) * dir[1]) / len;
                        let bump = 4e-6 * len * t * (1.0 - t);
                        flat2[r] = [p[0] + out[0] * bump, p[1] + out[1] * bump];
                    }
                }
                k = j;
                if k == k0 {
                    break;
                }
            }
        }

        // Interior triangular lattice at distance ≥ 0.6h from the boundary.
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &ring2 {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let corner2: Vec<[f64; 2]> = corners.iter().map(|&v| to2(&self.pool.points[v])).collect();
        let dist_inside = |p: [f64; 2]| -> f64 {
            (0..m)
                .map(|k| {
                    let (a, b) = (corner2[k], corner2[(k + 1) % m]);
                    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                    orient(a, b, p) / len
                })
                .fold(f64::INFINITY, f64::min)
        };
        let mut interior: Vec<[f64; 2]> = Vec::new();
        let dy = h * 3f64.sqrt() / 2.0;
        let rows = ((hi[1] - lo[1]) / dy).ceil() as i64 + 1;
        let cols = ((hi[0] - lo[0]) / h).ceil() as i64 + 2;
        for j in 0..rows {
            for i in -1..cols {
                let x = lo[0] + i as f64 * h + if j % 2 == 1 { h / 2.0 } else { 0.0 };
                let y = lo[1] + j as f64 * dy;
                if dist_inside([x, y]) >= 0.6 * h {
                    interior.push([x, y]);
                }
            }
        }
        let mut tri_pts = flat2;
        tri_pts.extend_from_slice(&interior);
        let mut ids = ring.clone();
        for p in &interior {
            ids.push(self.pool.add(origin + e1 * p[0] + e2 * p[1]));
        }
        let flip = n.dot(&normal) < 0.0;
        for t in delaunay(&tri_pts) {
            let mut tri = [ids[t[0]], ids[t[1]], ids[t[2]]];
            if flip {
                tri.swap(1, 2);
            }
            self.triangles.push((tri, label));
        }
    }

    /// Add a structured sheet with `ns × nt` cells whose grid point `(i, j)`
    /// sits at `f(i, j)`; seam vertices are shared through exact coordinates.
    pub fn sheet(&mut self, ns: usize, nt: usize, label: u32, f: impl Fn(usize, usize) -> Vec3) {
        let mut ids = vec![vec![0usize; nt + 1]; ns + 1];
        for (i, row) in ids.iter_mut().enumerate() {
            for (j, id) in row.iter_mut().enumerate() {
                *id = self.pool.shared(f(i, j));
            }
        }
        self.grid_triangles(&ids, label);
    }

    /// Triangulate a grid of vertex ids cell by cell.
    pub fn grid_triangles(&mut self, ids: &[Vec<usize>], label: u32) {
        for i in 0..ids.len() - 1 {
            for j in 0..ids[i].len() - 1 {
                let (a, b, c, d) = (ids[i][j], ids[i + 1][j], ids[i + 1][j + 1], ids[i][j + 1]);
                // Alternate diagonals to avoid a directional bias.
                if (i + j) % 2 == 0 {
                    self.triangles.push(([a, b, c], label));
                    self.triangles.push(([a, c, d], label));
                } else {
                    self.triangles.push(([a, b, d], label));
                    self.triangles.push(([b, c, d], label));
                }
            }
        }
    }

    pub fn finish(self) -> MeshFile {
        MeshFile {
            vertices: self.pool.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
            triangles: self
                .triangles
                .into_iter()
                .map(|(v, l)| TriangleRecord::Labeled { v, patch: Some(l) })
                .collect(),
            junctions: None,
            t_points: None,
            normal_side: Default::default(),
            extends: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delaunay_of_a_square_with_center() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let tris = delaunay(&pts);
        assert_eq!(tris.len(), 4);
        let area: f64 = tris.iter().map(|t| orient(pts[t[0]], pts[t[1]], pts[t[2]]) / 2.0).sum();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_face_covers_its_area() {
        let mut b = MeshBuilder::new(0.1);
        let c: Vec<usize> = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]
            .iter()
            .map(|p| b.corner(Vec3::from(*p)))
            .collect();
        b.face(&c, 0, Vec3::z());
        let pts = b.pool.points.clone();
        let total: f64 = b
            .triangles
            .iter()
            .map(|(t, _)| {
                let n = (pts[t[1]] - pts[t[0]]).cross(&(pts[t[2]] - pts[t[0]]));
                assert!(n.z > 0.0);
                n.norm() / 2.0
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
        // Every boundary sample is used.
        assert_eq!(b.edge(c[0], c[1]).len(), 11);
    }
}
