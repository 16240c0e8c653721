//! Exact (analytic-vertex) meshes of the model configurations: cones,
//! the double-T, prisms over stationary networks, catenoid seeds, and the
//! invalid Möbius gluing.

mod mesher;

use std::f64::consts::PI;

pub use mesher::{delaunay, MeshBuilder, Pool};

use crate::complex::{MeshFile, TriangleRecord, Vec3};
use crate::error::{PlateauError, Result};
use crate::multijunction::{MultiFile, SheetRecord};

/// Names accepted by [`generate_golden`].
pub const CORPUS: [&str; 8] =
    ["plane", "y-cone", "t-cone", "double-t", "network-prism", "y-catenoid-seed", "mobius", "weighted-book"];

#[derive(Clone, Debug)]
pub enum GoldenMesh {
    Plateau(MeshFile),
    Multi(MultiFile),
}

impl GoldenMesh {
    pub fn to_json(&self) -> String {
        match self {
            GoldenMesh::Plateau(m) => m.to_json(),
            GoldenMesh::Multi(m) => m.to_json(),
        }
    }
}

/// Generate a corpus member at the given target edge length.
pub fn generate_golden(name: &str, resolution: f64) -> Result<GoldenMesh> {
    let h = resolution;
    if !(h > 0.0 && h.is_finite()) {
        return Err(PlateauError::Parse(format!("resolution must be positive, got {h}")));
    }
    Ok(match name {
        "plane" => GoldenMesh::Plateau(plane(h, 1.5)),
        "y-cone" => GoldenMesh::Plateau(y_cone(h, 1.5)),
        "t-cone" => GoldenMesh::Plateau(t_cone(h, 1.5)),
        "double-t" => GoldenMesh::Plateau(double_t(h, 1.0, 1.5)),
        "network-prism" => GoldenMesh::Plateau(network_prism(h, 1.0, 1.5, 1.0)),
        "y-catenoid-seed" => GoldenMesh::Plateau(y_catenoid_seed(h, 0.6)),
        "mobius" => GoldenMesh::Plateau(mobius(h)),
        "weighted-book" => GoldenMesh::Multi(weighted_book(h, [1.0, 1.5, 2.0], 1.5, 1.0)),
        other => return Err(PlateauError::UnknownCorpus(other.to_string())),
    })
}

/// The four ray directions of the T cone, `pᵢ/|pᵢ|`.
pub fn tetrahedral_directions() -> [Vec3; 4] {
    let s = 1.0 / 3f64.sqrt();
    [
        Vec3::new(1.0, 1.0, 1.0) * s,
        Vec3::new(-1.0, -1.0, 1.0) * s,
        Vec3::new(-1.0, 1.0, -1.0) * s,
        Vec3::new(1.0, -1.0, -1.0) * s,
    ]
}

/// Corners of the circular sector of radius `r` about `apex` from direction
/// `u` to direction `v` (angle < π), arc approximated by chords of length ≈ h.
fn sector_corners(b: &mut MeshBuilder, apex: usize, r: f64, u: Vec3, v: Vec3) -> Vec<usize> {
    let o = b.pool.points[apex];
    let w = (v - u * u.dot(&v)).normalize();
    let alpha = u.dot(&v).clamp(-1.0, 1.0).acos();
    let k = ((r * alpha / b.h).ceil() as usize).max(2);
    let mut corners = vec![apex, b.corner(o + u * r)];
    for i in 1..k {
        let phi = alpha * i as f64 / k as f64;
        corners.push(b.corner(o + (u * phi.cos() + w * phi.sin()) * r));
    }
    corners.push(b.corner(o + v * r));
    corners
}

/// Flat disk of radius `r` in the plane x₃ = 0.
pub fn plane(h: f64, r: f64) -> MeshFile {
    let mut b = MeshBuilder::new(h);
    let k = ((2.0 * PI * r / h).ceil() as usize).max(6);
    let corners: Vec<usize> = (0..k)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / k as f64;
            b.corner(Vec3::new(r * a.cos(), r * a.sin(), 0.0))
        })
        .collect();
    b.face(&corners, 0, Vec3::z());
    b.finish()
}

/// Two parallel disks of radius `r`, `gap` apart along x₃.
pub fn parallel_planes(h: f64, r: f64, gap: f64) -> MeshFile {
    let mut b = MeshBuilder::new(h);
    let k = ((2.0 * PI * r / h).ceil() as usize).max(6);
    for (label, z) in [(0u32, 0.0), (1u32, gap)] {
        let corners: Vec<usize> = (0..k)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / k as f64;
                b.corner(Vec3::new(r * a.cos(), r * a.sin(), z))
            })
            .collect();
        b.face(&corners, label, Vec3::z());
    }
    b.finish()
}

/// Y cone: three half-disks of radius `r` meeting along the x₃-axis at
/// θ = 0, 2π/3, 4π/3, normals e₃ × u_θ.
pub fn y_cone(h: f64, r: f64) -> MeshFile {
    y_cone_with_angles(h, r, [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0])
}

/// Three half-disks on the x₃-axis at arbitrary azimuths.
pub fn y_cone_with_angles(h: f64, r: f64, angles: [f64; 3]) -> MeshFile {
    let mut b = MeshBuilder::new(h);
    let origin = b.corner(Vec3::zeros());
    let top = b.corner(Vec3::z() * r);
    let bottom = b.corner(-Vec3::z() * r);
    for (label, &theta) in angles.iter().enumerate() {
        let u = Vec3::new(theta.cos(), theta.sin(), 0.0);
        let k = ((PI * r / h).ceil() as usize).max(4);
        let mut corners = vec![origin, bottom];
        for i in 1..k {
            let psi = -PI / 2.0 + PI * i as f64 / k as f64;
            corners.push(b.corner(u * (r * psi.cos()) + Vec3::z() * (r * psi.sin())));
        }
        corners.push(top);
        b.face(&corners, label as u32, Vec3::z().cross(&u));
    }
    b.finish()
}

fn t_cone_into(b: &mut MeshBuilder, apex: Vec3, r: f64, first_label: u32) {
    let d = tetrahedral_directions();
    let o = b.corner(apex);
    let mut label = first_label;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let corners = sector_corners(b, o, r, d[i], d[j]);
            b.face(&corners, label, d[i].cross(&d[j]));
            label += 1;
        }
    }
}

/// T cone: the six planar sectors spanned by pairs of p₁..p₄, truncated at radius `r`.
pub fn t_cone(h: f64, r: f64) -> MeshFile {
    let mut b = MeshBuilder::new(h);
    t_cone_into(&mut b, Vec3::zeros(), r, 0);
    b.finish()
}

/// Three disjoint T cones (a flat complex with three T-points).
pub fn triple_t(h: f64) -> MeshFile {
    let mut b = MeshBuilder::new(h);
    for k in 0..3 {
        t_cone_into(&mut b, Vec3::new(3.0 * k as f64, 0.0, 0.0), 0.8, 6 * k as u32);
    }
    b.finish()
}

/// Two T cones glued along the segment from p₁ = 0 to p₂ = L·d₁. The cone at
/// p₂ is the mirror image of the one at p₁ in the bisecting plane, so the
/// three sheets through the segment continue as three-sided regions.
pub fn double_t(h: f64, segment: f64, r: f64) -> MeshFile {
    let d = tetrahedral_directions();
    let axis = d[0];
    let mirrored: Vec<Vec3> = d.iter().map(|v| v - axis * (2.0 * v.dot(&axis))).collect();
    let mut b = MeshBuilder::new(h);
    let p1 = b.corner(Vec3::zeros());
    let p2 = b.corner(axis * segment);
    let p2v = b.pool.points[p2];
    let mut label = 0u32;
    for k in 1..4 {
        let far1 = b.corner(d[k] * r);
        let far2 = b.corner(p2v + mirrored[k] * r);
        b.face(&[far1, p1, p2, far2], label, axis.cross(&d[k]));
        label += 1;
    }
    for (apex, dirs) in [(p1, &d[..]), (p2, &mirrored[..])] {
        for i in 1..4 {
            for j in (i + 1)..4 {
                let corners = sector_corners(&mut b, apex, r, dirs[i], dirs[j]);
                b.face(&corners, label, dirs[i].cross(&dirs[j]));
                label += 1;
            }
        }
    }
    b.finish()
}

/// Prism over a planar network: every edge (segment or truncated ray) times
/// `[-z, z]`.
fn network_prism_from_edges(h: f64, edges: &[(Vec3, Vec3)], z: f64) -> MeshFile {
    let mut b = MeshBuilder::new(h);
    for (label, (p, q)) in edges.iter().enumerate() {
        let lift = |v: &Vec3, s: f64| Vec3::new(v.x, v.y, s);
        let c = [b.corner(lift(p, -z)), b.corner(lift(q, -z)), b.corner(lift(q, z)), b.corner(lift(p, z))];
        b.face(&c, label as u32, (q - p).cross(&Vec3::z()));
    }
    b.finish()
}

/// Prism over the H-shaped stationary network: two triple points joined by
/// a segment of length `segment`, four rays of length `ray`.
pub fn network_prism(h: f64, segment: f64, ray: f64, z: f64) -> MeshFile {
    let q1 = Vec3::new(-segment / 2.0, 0.0, 0.0);
    let q2 = Vec3::new(segment / 2.0, 0.0, 0.0);
    let s3 = 3f64.sqrt() / 2.0;
    let edges = [
        (q1, q2),
        (q1, q1 + Vec3::new(-0.5, s3, 0.0) * ray),
        (q1, q1 + Vec3::new(-0.5, -s3, 0.0) * ray),
        (q2, q2 + Vec3::new(0.5, s3, 0.0) * ray),
        (q2, q2 + Vec3::new(0.5, -s3, 0.0) * ray),
    ];
    network_prism_from_edges(h, &edges, z)
}

/// Prism over one honeycomb cell with its six outgoing edges.
pub fn honeycomb_slab(h: f64, side: f64, ray: f64, z: f64) -> MeshFile {
    let corners: Vec<Vec3> = (0..6)
        .map(|k| {
            let a = PI / 3.0 * k as f64;
            Vec3::new(side * a.cos(), side * a.sin(), 0.0)
        })
        .collect();
    let mut edges = Vec::new();
    for k in 0..6 {
        edges.push((corners[k], corners[(k + 1) % 6]));
    }
    for c in &corners {
        edges.push((*c, c + c.normalize() * ray));
    }
    network_prism_from_edges(h, &edges, z)
}

/// Three rectangular sheets of width `r` and height `2z` hinged on the
/// x₃-axis at the given azimuths.
pub fn y_book(h: f64, angles: &[f64], r: f64, z: f64) -> MeshFile {
    let mut b = MeshBuilder::new(h);
    let bottom = b.corner(Vec3::new(0.0, 0.0, -z));
    let top = b.corner(Vec3::new(0.0, 0.0, z));
    for (label, &theta) in angles.iter().enumerate() {
        let u = Vec3::new(theta.cos(), theta.sin(), 0.0);
        let c = [bottom, b.corner(u * r - Vec3::z() * z), b.corner(u * r + Vec3::z() * z), top];
        b.face(&c, label as u32, Vec3::z().cross(&u));
    }
    b.finish()
}

/// Parameters of the exact Y-shaped catenoid with junction circle of radius
/// 1 in x₃ = 0: sheets r(x₃) = a·cosh((|x₃| − z₀)/a).
pub fn y_catenoid_profile() -> (f64, f64) {
    let a = 3f64.sqrt() / 2.0;
    let z0 = -a * (1.0 / 3f64.sqrt()).asinh();
    (a, z0)
}

/// Initial guess for the Y-shaped catenoid: a unit disk in x₃ = 0 plus two
/// frustum sheets joining its rim to the exact catenoid rims at x₃ = ±height.
/// Rims are the truncation boundary; relaxation bends the frusta.
pub fn y_catenoid_seed(h: f64, height: f64) -> MeshFile {
    let (a, z0) = y_catenoid_profile();
    let rim = a * ((height - z0) / a).cosh();
    let m = ((2.0 * PI / h).ceil() as usize).max(12);
    let rings = ((((rim - 1.0).powi(2) + height * height).sqrt() / h).ceil() as usize).max(2);
    let ring_point = |radius: f64, j: usize, z: f64| {
        let ang = 2.0 * PI * (j % m) as f64 / m as f64;
        Vec3::new(radius * ang.cos(), radius * ang.sin(), z)
    };
    let mut b = MeshBuilder::new(h);
    for (label, sign) in [(1u32, 1.0), (2u32, -1.0)] {
        b.sheet(rings, m, label, |i, j| {
            let s = i as f64 / rings as f64;
            ring_point(1.0 + (rim - 1.0) * s, j, sign * height * s)
        });
    }
    let corners: Vec<usize> = (0..m).map(|j| b.corner(ring_point(1.0, j, 0.0))).collect();
    // Rim chords must not be subdivided: they are shared with the sheets.
    b.h = 1.0001 * (ring_point(1.0, 1, 0.0) - ring_point(1.0, 0, 0.0)).norm();
    b.face(&corners, 0, Vec3::z());
    b.finish()
}

/// Symmetric catenoid annulus r = a·cosh(x₃/a), |x₃| ≤ half_height.
pub fn catenoid(h: f64, a: f64, half_height: f64) -> MeshFile {
    let m = ((2.0 * PI * a / h).ceil() as usize).max(12);
    let rings = ((2.0 * half_height / h).ceil() as usize).max(2);
    let mut b = MeshBuilder::new(h);
    b.sheet(rings, m, 0, |i, j| {
        let z = -half_height + 2.0 * half_height * i as f64 / rings as f64;
        let r = a * (z / a).cosh();
        let ang = 2.0 * PI * (j % m) as f64 / m as f64;
        Vec3::new(r * ang.cos(), r * ang.sin(), z)
    });
    b.finish()
}

/// Geodesic sphere: icosahedron subdivided `levels` times, projected to
/// the unit sphere.
pub fn icosphere(levels: usize) -> MeshFile {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<Vec3> = [
        [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
        [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
        [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|p| Vec3::from(*p).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..levels {
        let mut mid = std::collections::HashMap::new();
        let mut midpoint = |a: usize, b: usize, pts: &mut Vec<Vec3>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                pts.push(((pts[a] + pts[b]) * 0.5).normalize());
                pts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut pts);
            let bc = midpoint(b, c, &mut pts);
            let ca = midpoint(c, a, &mut pts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    MeshFile {
        vertices: pts.iter().map(|p| [p.x, p.y, p.z]).collect(),
        triangles: faces.into_iter().map(|v| TriangleRecord::Labeled { v, patch: Some(0) }).collect(),
        junctions: None,
        t_points: None,
        normal_side: Default::default(),
        extends: None,
    }
}

/// Möbius band glued from a strip whose ends are identified with a flip.
/// Written without patch labels; loading must fail on orientability.
pub fn mobius(h: f64) -> MeshFile {
    let nu = ((2.0 * PI / h).ceil() as usize).max(12);
    let nv = ((1.0 / h).ceil() as usize).max(2);
    let point = |u: f64, v: f64| {
        let w = 1.0 + 0.5 * v * (u / 2.0).cos();
        Vec3::new(w * u.cos(), w * u.sin(), 0.5 * v * (u / 2.0).sin())
    };
    let mut pool = Pool::default();
    let mut ids = vec![vec![0usize; nv + 1]; nu + 1];
    for i in 0..nu {
        for j in 0..=nv {
            let u = 2.0 * PI * i as f64 / nu as f64;
            let v = -1.0 + 2.0 * j as f64 / nv as f64;
            ids[i][j] = pool.add(point(u, v));
        }
    }
    for j in 0..=nv {
        ids[nu][j] = ids[0][nv - j];
    }
    let mut b = MeshBuilder::new(h);
    b.pool = pool;
    b.grid_triangles(&ids, 0);
    let mut file = b.finish();
    for t in file.triangles.iter_mut() {
        *t = TriangleRecord::Bare(t.vertices());
    }
    file
}

/// Sheet azimuths balancing densities θ: Σ θⁱ uⁱ = 0 (triangle of forces).
pub fn balanced_angles(theta: [f64; 3]) -> [f64; 3] {
    let [t1, t2, t3] = theta;
    let g12 = ((t3 * t3 - t1 * t1 - t2 * t2) / (2.0 * t1 * t2)).acos();
    let g13 = ((t2 * t2 - t1 * t1 - t3 * t3) / (2.0 * t1 * t3)).acos();
    [0.0, g12, -g13]
}

fn book_file(h: f64, theta: &[f64], r: f64, z: f64, azimuth: impl Fn(usize, f64) -> f64) -> MultiFile {
    let nt = ((2.0 * z / h).ceil() as usize).max(2);
    let ns = ((r / h).ceil() as usize).max(2);
    let mut b = MeshBuilder::new(h);
    for sheet in 0..theta.len() {
        b.sheet(ns, nt, sheet as u32, |i, j| {
            let zz = -z + 2.0 * z * j as f64 / nt as f64;
            let phi = azimuth(sheet, zz);
            let s = r * i as f64 / ns as f64;
            Vec3::new(s * phi.cos(), s * phi.sin(), zz)
        });
    }
    let gamma: Vec<usize> =
        (0..=nt).map(|j| b.pool.shared(Vec3::new(0.0, 0.0, -z + 2.0 * z * j as f64 / nt as f64))).collect();
    multi_file(b, theta, gamma)
}

fn multi_file(b: MeshBuilder, theta: &[f64], gamma: Vec<usize>) -> MultiFile {
    let mut sheets: Vec<SheetRecord> = theta
        .iter()
        .map(|&t| SheetRecord { theta: t, triangles: Vec::new(), normal_side: None })
        .collect();
    for (tri, label) in &b.triangles {
        sheets[*label as usize].triangles.push(*tri);
    }
    MultiFile { vertices: b.pool.points.iter().map(|p| [p.x, p.y, p.z]).collect(), sheets, gamma }
}

/// Two coplanar sheets of equal density meeting along the circle of radius
/// `r_gamma` in x₃ = 0: the inner disk and the annulus out to `r_out`.
pub fn split_disk(h: f64, r_gamma: f64, r_out: f64, theta: f64) -> MultiFile {
    let m = ((2.0 * PI * r_gamma / h).ceil() as usize).max(12);
    let rings = (((r_out - r_gamma) / h).ceil() as usize).max(2);
    let ring_point = |radius: f64, j: usize| {
        let ang = 2.0 * PI * (j % m) as f64 / m as f64;
        Vec3::new(radius * ang.cos(), radius * ang.sin(), 0.0)
    };
    let mut b = MeshBuilder::new(h);
    b.sheet(rings, m, 1, |i, j| ring_point(r_gamma + (r_out - r_gamma) * i as f64 / rings as f64, j));
    let corners: Vec<usize> = (0..m).map(|j| b.corner(ring_point(r_gamma, j))).collect();
    b.h = 1.0001 * (ring_point(r_gamma, 1) - ring_point(r_gamma, 0)).norm();
    b.face(&corners, 0, Vec3::z());
    let mut gamma = corners;
    gamma.push(gamma[0]);
    multi_file(b, &[theta, theta], gamma)
}

/// Flat book of three rectangular sheets with densities θ at force-balance
/// azimuths.
pub fn weighted_book(h: f64, theta: [f64; 3], r: f64, z: f64) -> MultiFile {
    let ang = balanced_angles(theta);
    book_file(h, &theta, r, z, |s, _| ang[s])
}

/// Flat book with q unit-density sheets at the given azimuths.
pub fn flat_book(h: f64, angles: &[f64], r: f64, z: f64) -> MultiFile {
    let theta = vec![1.0; angles.len()];
    book_file(h, &theta, r, z, |s, _| angles[s])
}

/// Y book whose third sheet turns by `twist` radians along the hinge.
pub fn twisted_book(h: f64, twist: f64, r: f64, z: f64) -> MultiFile {
    let base = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
    book_file(h, &[1.0; 3], r, z, |s, zz| if s == 2 { base[2] + twist * (zz + z) / (2.0 * z) } else { base[s] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_angles_balance() {
        let theta = [1.0, 1.5, 2.0];
        let a = balanced_angles(theta);
        let sum: Vec3 = (0..3).map(|i| Vec3::new(a[i].cos(), a[i].sin(), 0.0) * theta[i]).sum();
        assert!(sum.norm() < 1e-14);
        let eq = balanced_angles([1.0; 3]);
        assert!((eq[1] - 2.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(generate_golden("torus", 0.1), Err(PlateauError::UnknownCorpus(_))));
    }
}
