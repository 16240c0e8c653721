//! Connected components of a box minus the complex, found by flood fill on
//! an offset background grid.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{PlateauComplex, UnionFind, Vec3};
use crate::error::{PlateauError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Aabb {
    pub fn cube(center: Vec3, half: f64) -> Self {
        let d = Vec3::repeat(half);
        Aabb { lo: center - d, hi: center + d }
    }
    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.lo[k] && p[k] <= self.hi[k])
    }
}

#[derive(Clone, Debug)]
pub struct RegionOptions {
    /// Probe box; defaults to a cube well inside the truncation boundary.
    pub bbox: Option<Aabb>,
    /// Grid nodes per axis.
    pub cells: usize,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions { bbox: None, cells: 32 }
    }
}

#[derive(Clone, Debug)]
pub struct ComplementRegions {
    pub count: usize,
    /// Grid nodes per region.
    pub region_sizes: Vec<usize>,
    /// Per patch: the region its normal points into, and the region behind it.
    pub patch_sides: Vec<[Option<usize>; 2]>,
    pub bbox: Aabb,
    pub cells: usize,
    /// Smallest winning share over all side votes.
    pub min_vote_share: f64,
}

impl ComplementRegions {
    /// +1 if `region` lies on the side the normal of `patch` points into, -1
    /// if it lies behind, 0 if the patch does not bound it (or bounds it on
    /// both sides).
    pub fn facing(&self, patch: usize, region: usize) -> i8 {
        let [front, back] = self.patch_sides[patch];
        match (front == Some(region), back == Some(region)) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        }
    }
}

/// Segment/triangle intersection (Möller–Trumbore). Returns the barycentric
/// parameters (t, u, v) of the hit.
fn segment_hit(p: &Vec3, q: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<(f64, f64, f64)> {
    let dir = q - p;
    let e1 = b - a;
    let e2 = c - a;
    let pv = dir.cross(&e2);
    let det = e1.dot(&pv);
    let scale = e1.norm() * e2.norm() * dir.norm();
    if det.abs() <= 1e-14 * scale {
        return None;
    }
    let inv = 1.0 / det;
    let tv = p - a;
    let u = tv.dot(&pv) * inv;
    let qv = tv.cross(&e1);
    let v = dir.dot(&qv) * inv;
    let t = e2.dot(&qv) * inv;
    Some((t, u, v))
}

fn blocks(p: &Vec3, q: &Vec3, tri: [&Vec3; 3]) -> bool {
    const EPS: f64 = 1e-12;
    match segment_hit(p, q, tri[0], tri[1], tri[2]) {
        Some((t, u, v)) => {
            t >= -EPS && t <= 1.0 + EPS && u >= -EPS && v >= -EPS && u + v <= 1.0 + EPS
        }
        None => false,
    }
}

const OFFSET: [f64; 3] = [
    0.5 + 0.0123 * std::f64::consts::SQRT_2,
    0.5 - 0.0171 * 1.732_050_807_568_877_2,
    0.5 + 0.0093 * 2.236_067_977_499_79,
];

struct Grid {
    lo: Vec3,
    h: Vec3,
    n: usize,
}

impl Grid {
    fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        Vec3::new(
            self.lo.x + (i as f64 + OFFSET[0]) * self.h.x,
            self.lo.y + (j as f64 + OFFSET[1]) * self.h.y,
            self.lo.z + (k as f64 + OFFSET[2]) * self.h.z,
        )
    }
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }
    /// Continuous node coordinates of a point.
    fn coords(&self, p: &Vec3) -> Vec3 {
        Vec3::new(
            (p.x - self.lo.x) / self.h.x - OFFSET[0],
            (p.y - self.lo.y) / self.h.y - OFFSET[1],
            (p.z - self.lo.z) / self.h.z - OFFSET[2],
        )
    }
    fn clamp_range(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        let a = lo.ceil().max(0.0);
        let b = hi.floor().min(self.n as f64 - 1.0);
        (a <= b).then(|| (a as usize, b as usize))
    }
}

/// Default probe box: a cube centered at the bounding-box center, inscribed
/// with margin in the largest ball that avoids the truncation boundary.
pub fn default_probe_box(c: &PlateauComplex) -> Aabb {
    let mut lo = c.vertex(0);
    let mut hi = lo;
    for p in c.vertices() {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let center = (lo + hi) * 0.5;
    let reach = c
        .vertices()
        .iter()
        .enumerate()
        .filter(|(v, _)| c.is_boundary_vertex(*v))
        .map(|(_, p)| (p - center).norm())
        .fold(f64::INFINITY, f64::min);
    if reach.is_finite() {
        Aabb::cube(center, 0.9 * reach / 3f64.sqrt())
    } else {
        let pad = (hi - lo) * 0.1 + Vec3::repeat(1e-9);
        Aabb { lo: lo - pad, hi: hi + pad }
    }
}

/// Label the components of `box ∖ Σ` and record which component each side
/// of every patch faces.
pub fn complement_regions(c: &PlateauComplex, options: &RegionOptions) -> Result<ComplementRegions> {
    check_embedding(c)?;
    let bbox = options.bbox.unwrap_or_else(|| default_probe_box(c));
    let n = options.cells.max(4);
    let grid = Grid { lo: bbox.lo, h: (bbox.hi - bbox.lo) / n as f64, n };
    let nodes = n * n * n;
    let tris = c.triangles();
    let verts = c.vertices();

    // Blocked grid edges, one flag array per axis.
    let mut blocked = vec![vec![false; nodes]; 3];
    let mut bins: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        let pts = [&verts[t[0]], &verts[t[1]], &verts[t[2]]];
        let u: Vec<Vec3> = pts.iter().map(|p| grid.coords(p)).collect();
        let umin = u[0].inf(&u[1]).inf(&u[2]);
        let umax = u[0].sup(&u[1]).sup(&u[2]);
        if (0..3).any(|k| umax[k] < -1.0 || umin[k] > n as f64) {
            continue;
        }
        for cx in (umin.x.floor() as i64 - 1)..=(umax.x.floor() as i64 + 1) {
            for cy in (umin.y.floor() as i64 - 1)..=(umax.y.floor() as i64 + 1) {
                for cz in (umin.z.floor() as i64 - 1)..=(umax.z.floor() as i64 + 1) {
                    bins.entry((cx, cy, cz)).or_default().push(ti);
                }
            }
        }
        for axis in 0..3 {
            let (o1, o2) = ((axis + 1) % 3, (axis + 2) % 3);
            let Some((a0, a1)) = grid.clamp_range(umin[axis] - 1.0, umax[axis]) else { continue };
            let Some((b0, b1)) = grid.clamp_range(umin[o1], umax[o1]) else { continue };
            let Some((c0, c1)) = grid.clamp_range(umin[o2], umax[o2]) else { continue };
            for ia in a0..=a1.min(n - 2) {
                for ib in b0..=b1 {
                    for ic in c0..=c1 {
                        let mut idx = [0usize; 3];
                        idx[axis] = ia;
                        idx[o1] = ib;
                        idx[o2] = ic;
                        let p = grid.node(idx[0], idx[1], idx[2]);
                        idx[axis] += 1;
                        let q = grid.node(idx[0], idx[1], idx[2]);
                        idx[axis] -= 1;
                        if blocks(&p, &q, pts) {
                            blocked[axis][grid.index(idx[0], idx[1], idx[2])] = true;
                        }
                    }
                }
            }
        }
    }

    let mut uf = UnionFind::new(nodes);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let id = grid.index(i, j, k);
                if i + 1 < n && !blocked[0][id] {
                    uf.union(id, grid.index(i + 1, j, k));
                }
                if j + 1 < n && !blocked[1][id] {
                    uf.union(id, grid.index(i, j + 1, k));
                }
                if k + 1 < n && !blocked[2][id] {
                    uf.union(id, grid.index(i, j, k + 1));
                }
            }
        }
    }

    let segment_clear = |p: &Vec3, q: &Vec3| -> bool {
        let up = grid.coords(p);
        let uq = grid.coords(q);
        let lo = up.inf(&uq);
        let hi = up.sup(&uq);
        let mut seen = BTreeSet::new();
        for cx in lo.x.floor() as i64..=hi.x.floor() as i64 {
            for cy in lo.y.floor() as i64..=hi.y.floor() as i64 {
                for cz in lo.z.floor() as i64..=hi.z.floor() as i64 {
                    if let Some(list) = bins.get(&(cx, cy, cz)) {
                        for &t in list {
                            if seen.insert(t) {
                                let tv = tris[t];
                                if blocks(p, q, [&verts[tv[0]], &verts[tv[1]], &verts[tv[2]]]) {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    };

    // Probe both sides of every triangle inside the box.
    let hmin = grid.h.min();
    let mut votes: Vec<[BTreeMap<usize, usize>; 2]> = vec![[BTreeMap::new(), BTreeMap::new()]; c.patches().len()];
    for (ti, t) in tris.iter().enumerate() {
        let centroid = (verts[t[0]] + verts[t[1]] + verts[t[2]]) / 3.0;
        if !bbox.contains(&centroid) {
            continue;
        }
        let cross = c.face_cross(ti);
        let area = 0.5 * cross.norm();
        let normal = cross / (2.0 * area);
        let delta = (0.25 * hmin).min(0.1 * area.sqrt());
        for (side, sgn) in [(0usize, 1.0), (1usize, -1.0)] {
            let probe = centroid + normal * (sgn * delta);
            if !bbox.contains(&probe) {
                continue;
            }
            let u = grid.coords(&probe);
            let base = [u.x.floor() as i64, u.y.floor() as i64, u.z.floor() as i64];
            let mut cand: Vec<(f64, usize, usize, usize)> = Vec::with_capacity(64);
            for di in -1..=2 {
                for dj in -1..=2 {
                    for dk in -1..=2 {
                        let (i, j, k) = (base[0] + di, base[1] + dj, base[2] + dk);
                        if i < 0 || j < 0 || k < 0 || i >= n as i64 || j >= n as i64 || k >= n as i64 {
                            continue;
                        }
                        let (i, j, k) = (i as usize, j as usize, k as usize);
                        cand.push(((grid.node(i, j, k) - probe).norm_squared(), i, j, k));
                    }
                }
            }
            cand.sort_by(|a, b| a.0.total_cmp(&b.0));
            let hit = cand
                .iter()
                .find(|&&(_, i, j, k)| segment_clear(&probe, &grid.node(i, j, k)));
            if let Some(&(_, i, j, k)) = hit {
                let root = uf.find(grid.index(i, j, k));
                *votes[c.triangle_patch(ti)][side].entry(root).or_insert(0) += 1;
            }
        }
    }

    let mut winners: Vec<[Option<usize>; 2]> = Vec::with_capacity(votes.len());
    let mut min_share = 1.0f64;
    for (p, sides) in votes.iter().enumerate() {
        let mut w = [None, None];
        for side in 0..2 {
            let total: usize = sides[side].values().sum();
            if total == 0 {
                continue;
            }
            let (&root, &best) = sides[side].iter().max_by_key(|(r, cnt)| (**cnt, std::cmp::Reverse(**r))).unwrap();
            let share = best as f64 / total as f64;
            min_share = min_share.min(share);
            if share < 0.9 {
                return Err(PlateauError::Resolution(format!(
                    "patch {} side {side}: only {:.0}% of probes agree on one region; refine the grid",
                    c.patches()[p].label,
                    share * 100.0
                )));
            }
            w[side] = Some(root);
        }
        winners.push(w);
    }

    // Keep referenced components, numbered by their smallest node.
    let referenced: BTreeSet<usize> = winners.iter().flat_map(|w| w.iter().flatten().copied()).collect();
    let mut roots: Vec<usize> = referenced.into_iter().collect();
    roots.sort_unstable();
    let region_of: BTreeMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut region_sizes = vec![0usize; roots.len()];
    for id in 0..nodes {
        if let Some(&r) = region_of.get(&uf.find(id)) {
            region_sizes[r] += 1;
        }
    }
    let patch_sides = winners
        .iter()
        .map(|w| [w[0].map(|r| region_of[&r]), w[1].map(|r| region_of[&r])])
        .collect();
    Ok(ComplementRegions {
        count: roots.len(),
        region_sizes,
        patch_sides,
        bbox,
        cells: n,
        min_vote_share: min_share,
    })
}

/// Reject complexes whose triangles cross each other away from shared
/// simplices.
pub fn check_embedding(c: &PlateauComplex) -> Result<()> {
    let tris = c.triangles();
    let verts = c.vertices();
    let cell = c.max_edge_length().max(f64::MIN_POSITIVE);
    let key = |p: &Vec3| -> (i64, i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64, (p.z / cell).floor() as i64)
    };
    let mut bins: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        let ks: Vec<(i64, i64, i64)> = t.iter().map(|&v| key(&verts[v])).collect();
        let lo = (ks.iter().map(|k| k.0).min().unwrap(), ks.iter().map(|k| k.1).min().unwrap(), ks.iter().map(|k| k.2).min().unwrap());
        let hi = (ks.iter().map(|k| k.0).max().unwrap(), ks.iter().map(|k| k.1).max().unwrap(), ks.iter().map(|k| k.2).max().unwrap());
        for x in lo.0..=hi.0 {
            for y in lo.1..=hi.1 {
                for z in lo.2..=hi.2 {
                    bins.entry((x, y, z)).or_default().push(ti);
                }
            }
        }
    }
    let tol = 1e-9;
    let crosses = |edge: (usize, usize), t: usize| -> bool {
        let tv = tris[t];
        match segment_hit(&verts[edge.0], &verts[edge.1], &verts[tv[0]], &verts[tv[1]], &verts[tv[2]]) {
            Some((s, u, v)) => s > tol && s < 1.0 - tol && u > tol && v > tol && u + v < 1.0 - tol,
            None => false,
        }
    };
    let mut keys: Vec<&(i64, i64, i64)> = bins.keys().collect();
    keys.sort_unstable();
    let mut tested: BTreeSet<(usize, usize)> = BTreeSet::new();
    for k in keys {
        let list = &bins[k];
        for (ia, &a) in list.iter().enumerate() {
            for &b in &list[ia + 1..] {
                let pair = (a.min(b), a.max(b));
                if !tested.insert(pair) {
                    continue;
                }
                let (ta, tb) = (tris[a], tris[b]);
                let shared: Vec<usize> = ta.iter().copied().filter(|v| tb.contains(v)).collect();
                if shared.len() >= 2 {
                    continue;
                }
                let edges_of = |t: [usize; 3]| -> Vec<(usize, usize)> {
                    (0..3)
                        .map(|m| (t[m], t[(m + 1) % 3]))
                        .filter(|(x, y)| !shared.contains(x) && !shared.contains(y))
                        .collect()
                };
                let hit = edges_of(ta).into_iter().any(|e| crosses(e, b))
                    || edges_of(tb).into_iter().any(|e| crosses(e, a));
                if hit {
                    return Err(PlateauError::Embedding(format!("triangles {a} and {b} intersect")));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RawComplex;

    fn square(z: f64, offset: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
        let v = vec![
            Vec3::new(-1.0, -1.0, z),
            Vec3::new(1.0, -1.0, z),
            Vec3::new(1.0, 1.0, z),
            Vec3::new(-1.0, 1.0, z),
        ];
        (v, vec![[offset, offset + 1, offset + 2], [offset, offset + 2, offset + 3]])
    }

    #[test]
    fn square_splits_a_box_in_two() {
        let (v, t) = square(0.0, 0);
        let c = PlateauComplex::build(RawComplex { vertices: v, triangles: t, ..Default::default() }).unwrap();
        let opts = RegionOptions { bbox: Some(Aabb::cube(Vec3::zeros(), 0.5)), cells: 8 };
        let r = complement_regions(&c, &opts).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!(r.facing(0, r.patch_sides[0][0].unwrap()), 1);
        assert_ne!(r.patch_sides[0][0], r.patch_sides[0][1]);
    }

    #[test]
    fn crossing_squares_are_not_embedded() {
        let (mut v, mut t) = square(0.0, 0);
        // A vertical square through the first one.
        let base = v.len();
        v.extend([
            Vec3::new(-0.5, 0.1, -1.0),
            Vec3::new(0.5, 0.1, -1.0),
            Vec3::new(0.5, 0.1, 1.0),
            Vec3::new(-0.5, 0.1, 1.0),
        ]);
        t.extend([[base, base + 1, base + 2], [base, base + 2, base + 3]]);
        let c = PlateauComplex::build(RawComplex { vertices: v, triangles: t, ..Default::default() }).unwrap();
        assert!(matches!(check_embedding(&c), Err(PlateauError::Embedding(_))));
    }
}
