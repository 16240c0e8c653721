use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{CurveEnd, PlateauComplex, Vec3, VertexKind};
use crate::error::{PlateauError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegionType {
    HalfPlane,
    Strip,
    Angular,
    ThreeSided,
    Plane,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SideKind {
    Segment,
    Ray,
    Line,
}

/// One straight boundary piece of a patch: a junction curve or a chain of
/// non-artificial boundary edges.
#[derive(Clone, Debug, Serialize)]
pub struct Side {
    pub kind: SideKind,
    /// Finite end (the first one for segments); any point for lines.
    pub start: [f64; 3],
    /// Other finite end of a segment, or a far sample point otherwise.
    pub end: [f64; 3],
    pub direction: [f64; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionReport {
    pub region: RegionType,
    pub sides: Vec<Side>,
    /// Interior angles at finite corners (radians).
    pub corner_angles: Vec<f64>,
}

struct Piece {
    vertices: Vec<usize>,
    start_finite: bool,
    end_finite: bool,
}

fn unrecognized(patch: usize, reason: String) -> PlateauError {
    PlateauError::UnrecognizedRegion { patch, reason }
}

/// Chains of the patch's non-artificial boundary edges, split where they turn.
fn finite_chains(c: &PlateauComplex, patch: usize, tol_angle: f64) -> Vec<Vec<usize>> {
    let edges: Vec<(usize, usize)> = c
        .finite_edges()
        .iter()
        .copied()
        .filter(|&(a, b)| c.edge_triangles(a, b).iter().any(|&t| c.triangle_patch(t) == patch))
        .collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut chains = Vec::new();
    let starts: Vec<usize> = adj.iter().filter(|(_, n)| n.len() != 2).map(|(&v, _)| v).chain(adj.keys().copied()).collect();
    for s in starts {
        for &first in adj[&s].clone().iter() {
            if used.contains(&key(s, first)) {
                continue;
            }
            let mut chain = vec![s, first];
            used.insert(key(s, first));
            loop {
                let cur = *chain.last().unwrap();
                let prev = chain[chain.len() - 2];
                let next = adj[&cur].iter().copied().find(|&w| w != prev && !used.contains(&key(cur, w)));
                match next {
                    Some(w) if adj[&cur].len() == 2 => {
                        used.insert(key(cur, w));
                        chain.push(w);
                    }
                    _ => break,
                }
            }
            chains.push(chain);
        }
    }
    // Split at corners.
    let mut out = Vec::new();
    for chain in chains {
        let mut piece = vec![chain[0]];
        for k in 1..chain.len() {
            piece.push(chain[k]);
            if k + 1 < chain.len() {
                let a = (c.vertex(chain[k]) - c.vertex(chain[k - 1])).normalize();
                let b = (c.vertex(chain[k + 1]) - c.vertex(chain[k])).normalize();
                if a.dot(&b).clamp(-1.0, 1.0).acos() > tol_angle {
                    out.push(std::mem::replace(&mut piece, vec![chain[k]]));
                }
            }
        }
        out.push(piece);
    }
    out
}

fn straight(c: &PlateauComplex, vs: &[usize], tol_angle: f64) -> bool {
    let (a, b) = (c.vertex(vs[0]), c.vertex(*vs.last().unwrap()));
    let len = (b - a).norm();
    let d = (b - a) / len;
    vs.iter().all(|&v| {
        let x = c.vertex(v) - a;
        (x - d * x.dot(&d)).norm() <= tol_angle * len
    })
}

/// Planar region type of one patch from the number and position of its
/// straight boundary pieces.
pub fn region_type(c: &PlateauComplex, patch: usize, tol_angle: f64) -> Result<RegionReport> {
    if patch >= c.patches().len() {
        return Err(PlateauError::Structure(format!("patch {patch} does not exist")));
    }
    let tris = &c.patches()[patch].triangles;
    let mean: Vec3 = tris.iter().map(|&t| c.face_cross(t)).sum::<Vec3>().normalize();
    if tris.iter().any(|&t| c.face_cross(t).normalize().cross(&mean).norm() > tol_angle) {
        return Err(PlateauError::NotFlat(patch));
    }

    let mut pieces: Vec<Piece> = Vec::new();
    for (k, j) in c.junctions().iter().enumerate() {
        if !j.patches.contains(&patch) {
            continue;
        }
        if j.closed {
            return Err(unrecognized(patch, format!("bounded by the closed junction curve {k}")));
        }
        let fin = |e: &CurveEnd| matches!(e, CurveEnd::TPoint(_));
        pieces.push(Piece { vertices: j.vertices.clone(), start_finite: fin(&j.start), end_finite: fin(&j.end) });
    }
    for chain in finite_chains(c, patch, tol_angle) {
        pieces.push(Piece { vertices: chain, start_finite: false, end_finite: false });
    }
    // Ends shared by two pieces, or lying at a T-point, are corners.
    let mut end_count: BTreeMap<usize, usize> = BTreeMap::new();
    for p in &pieces {
        *end_count.entry(p.vertices[0]).or_default() += 1;
        *end_count.entry(*p.vertices.last().unwrap()).or_default() += 1;
    }
    for p in &mut pieces {
        let (s, e) = (p.vertices[0], *p.vertices.last().unwrap());
        p.start_finite |= end_count[&s] > 1 || c.kind(s) == VertexKind::TPoint;
        p.end_finite |= end_count[&e] > 1 || c.kind(e) == VertexKind::TPoint;
    }

    let mut sides = Vec::with_capacity(pieces.len());
    for p in &pieces {
        if !straight(c, &p.vertices, tol_angle) {
            return Err(unrecognized(patch, "a boundary piece is not straight".into()));
        }
        let (mut a, mut b) = (c.vertex(p.vertices[0]), c.vertex(*p.vertices.last().unwrap()));
        let kind = match (p.start_finite, p.end_finite) {
            (true, true) => SideKind::Segment,
            (false, false) => SideKind::Line,
            (false, true) => {
                std::mem::swap(&mut a, &mut b);
                SideKind::Ray
            }
            (true, false) => SideKind::Ray,
        };
        let d = (b - a).normalize();
        sides.push(Side { kind, start: a.into(), end: b.into(), direction: d.into() });
    }

    let v = |x: [f64; 3]| Vec3::from(x);
    let target = (-1.0f64 / 3.0).acos();
    let angle = |a: Vec3, b: Vec3| a.dot(&b).clamp(-1.0, 1.0).acos();
    let count = |k: SideKind| sides.iter().filter(|s| s.kind == k).count();
    let scale = c.bbox_diameter().max(1e-300);
    let region = match (sides.len(), count(SideKind::Line), count(SideKind::Ray), count(SideKind::Segment)) {
        (0, ..) => (RegionType::Plane, vec![]),
        (1, 1, 0, 0) => (RegionType::HalfPlane, vec![]),
        (2, 2, 0, 0) => {
            if v(sides[0].direction).cross(&v(sides[1].direction)).norm() > tol_angle {
                return Err(unrecognized(patch, "two boundary lines are not parallel".into()));
            }
            (RegionType::Strip, vec![])
        }
        (2, 0, 2, 0) => {
            if (v(sides[0].start) - v(sides[1].start)).norm() > tol_angle * scale {
                return Err(unrecognized(patch, "two rays do not share their origin".into()));
            }
            let a = angle(v(sides[0].direction), v(sides[1].direction));
            if (a - target).abs() > tol_angle {
                return Err(unrecognized(patch, format!("sector angle {a} differs from arccos(-1/3)")));
            }
            (RegionType::Angular, vec![a])
        }
        (3, 0, 2, 1) => {
            let seg = sides.iter().find(|s| s.kind == SideKind::Segment).expect("segment");
            let (p, q) = (v(seg.start), v(seg.end));
            let axis = (q - p).normalize();
            let mut angles = Vec::new();
            let mut perp = Vec::new();
            for ray in sides.iter().filter(|s| s.kind == SideKind::Ray) {
                let o = v(ray.start);
                let d = v(ray.direction);
                let toward = if (o - p).norm() <= tol_angle * scale {
                    axis
                } else if (o - q).norm() <= tol_angle * scale {
                    -axis
                } else {
                    return Err(unrecognized(patch, "a ray does not start at the segment".into()));
                };
                angles.push(angle(toward, d));
                perp.push(d - axis * d.dot(&axis));
            }
            if perp[0].dot(&perp[1]) <= 0.0 {
                return Err(unrecognized(patch, "rays leave the segment on opposite sides".into()));
            }
            if angles.iter().any(|a| (a - target).abs() > tol_angle) {
                return Err(unrecognized(patch, format!("corner angles {angles:?} differ from arccos(-1/3)")));
            }
            (RegionType::ThreeSided, angles)
        }
        (n, l, r, s) => {
            return Err(unrecognized(patch, format!("{n} boundary pieces ({l} lines, {r} rays, {s} segments)")));
        }
    };
    Ok(RegionReport { region: region.0, sides, corner_angles: region.1 })
}
