//! Non-manifold triangulated 2-complexes with labeled patches, junction
//! curves, T-points and artificial truncation boundary.

mod io;
mod regions;
mod signs;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::Vector3;

use crate::error::{PlateauError, Result};
use crate::tolerances;

pub use io::{load_complex, parse_complex, save_complex, MeshFile, TriangleRecord};
pub use regions::{complement_regions, check_embedding, Aabb, ComplementRegions, RegionOptions};
pub use signs::{assign_signs, SignAssignment, TPointSigns};

pub type Vec3 = Vector3<f64>;

/// Local model of a vertex star.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum LocalModel {
    P,
    Y,
    T,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Interior,
    Junction,
    TPoint,
    Boundary,
}

/// How junction curves are validated: Plateau complexes require exactly three
/// sheets per junction edge; multiple-junction surfaces share one curve among
/// `q` sheets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JunctionMode {
    Plateau,
    Multi,
}

#[derive(Clone, Debug)]
pub struct Patch {
    /// Label as read from (or written to) the interchange file.
    pub label: u32,
    pub triangles: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveEnd {
    TPoint(usize),
    Boundary,
    Closed,
}

#[derive(Clone, Debug)]
pub struct JunctionCurve {
    /// Ordered polyline; for closed curves the first vertex is not repeated.
    pub vertices: Vec<usize>,
    /// Incident patches, ascending.
    pub patches: Vec<usize>,
    pub closed: bool,
    pub start: CurveEnd,
    pub end: CurveEnd,
}

impl JunctionCurve {
    /// Consecutive vertex pairs, including the closing edge of a loop.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertices.len();
        let mut out: Vec<(usize, usize)> = self.vertices.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed && n > 2 {
            out.push((self.vertices[n - 1], self.vertices[0]));
        }
        out
    }

    pub fn position_of(&self, patch: usize) -> Option<usize> {
        self.patches.iter().position(|&p| p == patch)
    }
}

#[derive(Clone, Debug)]
pub struct TPoint {
    pub vertex: usize,
    /// The four junction curves ending here, ascending.
    pub curves: [usize; 4],
    /// `pair_patch[i][j]` is the patch bounded by curves `i` and `j` (local indices).
    pub pair_patch: [[usize; 4]; 4],
}

impl TPoint {
    pub fn local_curve(&self, curve: usize) -> Option<usize> {
        self.curves.iter().position(|&c| c == curve)
    }

    /// The six patches in pair order (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
    pub fn patches(&self) -> [usize; 6] {
        let p = &self.pair_patch;
        [p[0][1], p[0][2], p[0][3], p[1][2], p[1][3], p[2][3]]
    }
}

/// A (vertex, patch) incidence; scalar fields carry one value per slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub vertex: usize,
    pub patch: usize,
}

/// Unvalidated input to [`PlateauComplex::build`].
#[derive(Clone, Debug, Default)]
pub struct RawComplex {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub patch_labels: Option<Vec<u32>>,
    pub junctions: Option<Vec<Vec<usize>>>,
    pub t_points: Option<Vec<usize>>,
    pub normal_side: BTreeMap<u32, i8>,
    pub extends: Option<Vec<[usize; 2]>>,
    pub tol_geom: Option<f64>,
}

/// A validated complex. Immutable once built; geometry changes go through
/// [`PlateauComplex::with_vertices`], which keeps the combinatorics.
#[derive(Clone, Debug)]
pub struct PlateauComplex {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    triangle_patch: Vec<usize>,
    patches: Vec<Patch>,
    junctions: Vec<JunctionCurve>,
    t_points: Vec<TPoint>,
    boundary_chains: Vec<Vec<usize>>,
    kinds: Vec<VertexKind>,
    slots: Vec<Slot>,
    vertex_slot_start: Vec<usize>,
    vertex_triangles: Vec<Vec<usize>>,
    edges: BTreeMap<(usize, usize), Vec<usize>>,
    finite_edges: BTreeSet<(usize, usize)>,
    has_extends: bool,
    tol_geom: f64,
    mode: JunctionMode,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn lex_less(a: &Vec3, ia: usize, b: &Vec3, ib: usize) -> bool {
    for k in 0..3 {
        if a[k] < b[k] {
            return true;
        }
        if a[k] > b[k] {
            return false;
        }
    }
    ia < ib
}

fn structure<T>(msg: impl Into<String>) -> Result<T> {
    Err(PlateauError::Structure(msg.into()))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl PlateauComplex {
    /// Validate a raw Plateau complex.
    pub fn build(raw: RawComplex) -> Result<Self> {
        Self::build_with_mode(raw, JunctionMode::Plateau, None)
    }

    /// Validate a multiple-junction surface: `q` sheets (the patches) sharing
    /// the single polyline `gamma`.
    pub fn build_multi(raw: RawComplex, gamma: Vec<usize>) -> Result<Self> {
        Self::build_with_mode(raw, JunctionMode::Multi, Some(gamma))
    }

    fn build_with_mode(raw: RawComplex, mode: JunctionMode, gamma: Option<Vec<usize>>) -> Result<Self> {
        let RawComplex {
            vertices,
            mut triangles,
            patch_labels,
            junctions: declared_junctions,
            t_points: declared_t_points,
            normal_side,
            extends,
            tol_geom,
        } = raw;
        let nv = vertices.len();
        if triangles.is_empty() {
            return structure("complex has no triangles");
        }
        for (ti, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= nv) {
                return Err(PlateauError::Parse(format!("triangle {ti} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return structure(format!("triangle {ti} repeats a vertex"));
            }
        }
        if vertices.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
            return Err(PlateauError::Parse("non-finite vertex coordinate".into()));
        }
        if let Some(labels) = &patch_labels {
            if labels.len() != triangles.len() {
                return Err(PlateauError::Parse("patch label count differs from triangle count".into()));
            }
        }

        let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                edges.entry(edge_key(t[k], t[(k + 1) % 3])).or_default().push(ti);
            }
        }
        let gamma_edges: BTreeSet<(usize, usize)> = match &gamma {
            Some(g) => g.windows(2).map(|w| edge_key(w[0], w[1])).collect(),
            None => BTreeSet::new(),
        };

        // Patch labels: given, or inferred from edge valence.
        let labels: Vec<u32> = match patch_labels {
            Some(l) => l,
            None => {
                let mut uf = UnionFind::new(triangles.len());
                for (key, ts) in &edges {
                    if ts.len() == 2 && !gamma_edges.contains(key) {
                        uf.union(ts[0], ts[1]);
                    }
                }
                let mut root_label: BTreeMap<usize, u32> = BTreeMap::new();
                (0..triangles.len())
                    .map(|ti| {
                        let r = uf.find(ti);
                        let next = root_label.len() as u32;
                        *root_label.entry(r).or_insert(next)
                    })
                    .collect()
            }
        };
        let distinct: BTreeSet<u32> = labels.iter().copied().collect();
        let label_index: BTreeMap<u32, usize> = distinct.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let triangle_patch: Vec<usize> = labels.iter().map(|l| label_index[l]).collect();
        let n_patches = distinct.len();

        // Edge valence rules.
        let mut junction_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut boundary_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (&key, ts) in &edges {
            let ps: BTreeSet<usize> = ts.iter().map(|&t| triangle_patch[t]).collect();
            match mode {
                JunctionMode::Plateau => match ts.len() {
                    1 => {
                        boundary_edges.insert(key);
                    }
                    2 => {
                        if ps.len() != 1 {
                            return structure(format!(
                                "edge {key:?} joins two different patches without a junction"
                            ));
                        }
                    }
                    3 => {
                        if ps.len() != 3 {
                            return structure(format!(
                                "junction edge {key:?} is not adjacent to three distinct patches"
                            ));
                        }
                        junction_edges.insert(key);
                    }
                    k => return structure(format!("edge {key:?} has valence {k}")),
                },
                JunctionMode::Multi => {
                    if gamma_edges.contains(&key) {
                        if ps.len() != n_patches || ts.len() != n_patches {
                            return structure(format!(
                                "edge {key:?} of the shared curve is not bounded once by every sheet"
                            ));
                        }
                        junction_edges.insert(key);
                    } else {
                        match ts.len() {
                            1 => {
                                boundary_edges.insert(key);
                            }
                            2 if ps.len() == 1 => {}
                            k => {
                                return structure(format!(
                                    "edge {key:?} off the shared curve has valence {k} across {} sheets",
                                    ps.len()
                                ))
                            }
                        }
                    }
                }
            }
        }
        if mode == JunctionMode::Multi && n_patches < 2 {
            return structure("a multiple-junction surface needs at least two sheets");
        }

        // Orient each patch consistently, then apply normal_side flips.
        let mut patch_tris: Vec<Vec<usize>> = vec![Vec::new(); n_patches];
        for (ti, &p) in triangle_patch.iter().enumerate() {
            patch_tris[p].push(ti);
        }
        let mut oriented = vec![false; triangles.len()];
        for (p, tris) in patch_tris.iter().enumerate() {
            let seed = tris[0];
            oriented[seed] = true;
            let mut queue = VecDeque::from([seed]);
            let mut seen = 1usize;
            while let Some(t) = queue.pop_front() {
                let tv = triangles[t];
                for k in 0..3 {
                    let (a, b) = (tv[k], tv[(k + 1) % 3]);
                    let key = edge_key(a, b);
                    let same: Vec<usize> = edges[&key]
                        .iter()
                        .copied()
                        .filter(|&o| o != t && triangle_patch[o] == p)
                        .collect();
                    if same.len() != 1 || junction_edges.contains(&key) {
                        continue;
                    }
                    let o = same[0];
                    let ov = triangles[o];
                    let traverses_same = (0..3).any(|m| ov[m] == a && ov[(m + 1) % 3] == b);
                    if oriented[o] {
                        if traverses_same {
                            return Err(PlateauError::Orientability(format!(
                                "patch {} admits no consistent unit normal (conflict across edge {key:?})",
                                distinct.iter().nth(p).copied().unwrap_or(0)
                            )));
                        }
                    } else {
                        if traverses_same {
                            triangles[o].swap(1, 2);
                        }
                        oriented[o] = true;
                        seen += 1;
                        queue.push_back(o);
                    }
                }
            }
            if seen != tris.len() {
                return structure(format!("patch {p} is not edge-connected"));
            }
        }
        for (label, &side) in &normal_side {
            let Some(&p) = label_index.get(label) else {
                return Err(PlateauError::Parse(format!("normal_side names unknown patch {label}")));
            };
            match side {
                1 => {}
                -1 => {
                    for &t in &patch_tris[p] {
                        triangles[t].swap(1, 2);
                    }
                }
                s => return Err(PlateauError::Parse(format!("normal_side must be +1 or -1, got {s}"))),
            }
        }

        // Vertex-triangle incidence.
        let mut vertex_triangles: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (ti, t) in triangles.iter().enumerate() {
            for &v in t {
                vertex_triangles[v].push(ti);
            }
        }
        if let Some(v) = vertex_triangles.iter().position(|ts| ts.is_empty()) {
            return structure(format!("vertex {v} is not used by any triangle"));
        }

        // Vertex kinds from boundary and junction degree.
        let mut on_boundary = vec![false; nv];
        for &(a, b) in &boundary_edges {
            on_boundary[a] = true;
            on_boundary[b] = true;
        }
        let mut jdeg = vec![0usize; nv];
        let mut jadj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for &(a, b) in &junction_edges {
            jdeg[a] += 1;
            jdeg[b] += 1;
            jadj[a].push(b);
            jadj[b].push(a);
        }
        let mut kinds = vec![VertexKind::Interior; nv];
        for v in 0..nv {
            kinds[v] = if on_boundary[v] {
                VertexKind::Boundary
            } else {
                match (jdeg[v], mode) {
                    (0, _) => VertexKind::Interior,
                    (2, _) => VertexKind::Junction,
                    (4, JunctionMode::Plateau) => VertexKind::TPoint,
                    (d, _) => {
                        return structure(format!(
                            "vertex {v} has {d} incident junction edges (expected 0, 2 or 4)"
                        ))
                    }
                }
            };
        }

        // Trace junction curves.
        let is_end = |v: usize| matches!(kinds[v], VertexKind::Boundary | VertexKind::TPoint);
        let mut visited: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut polylines: Vec<(Vec<usize>, bool)> = Vec::new();
        for start in 0..nv {
            if !is_end(start) {
                continue;
            }
            let mut nbrs = jadj[start].clone();
            nbrs.sort_unstable();
            for first in nbrs {
                if visited.contains(&edge_key(start, first)) {
                    continue;
                }
                let mut line = vec![start];
                let (mut prev, mut cur) = (start, first);
                visited.insert(edge_key(prev, cur));
                loop {
                    line.push(cur);
                    if is_end(cur) {
                        break;
                    }
                    let next = jadj[cur].iter().copied().find(|&w| w != prev && !visited.contains(&edge_key(cur, w)));
                    match next {
                        Some(w) => {
                            visited.insert(edge_key(cur, w));
                            prev = cur;
                            cur = w;
                        }
                        None => return structure(format!("junction curve breaks off at vertex {cur}")),
                    }
                }
                polylines.push((line, false));
            }
        }
        for &(a, b) in &junction_edges {
            if visited.contains(&(a, b)) {
                continue;
            }
            // Closed loop through degree-2 vertices.
            let mut line = vec![a];
            let (mut prev, mut cur) = (a, b);
            visited.insert((a, b));
            while cur != a {
                line.push(cur);
                let next = jadj[cur]
                    .iter()
                    .copied()
                    .find(|&w| w != prev && !visited.contains(&edge_key(cur, w)))
                    .or_else(|| jadj[cur].iter().copied().find(|&w| w == a && prev != a));
                match next {
                    Some(w) => {
                        visited.insert(edge_key(cur, w));
                        prev = cur;
                        cur = w;
                    }
                    None => return structure(format!("junction loop breaks off at vertex {cur}")),
                }
            }
            polylines.push((line, true));
        }

        // Normalize orientation: lexicographically smallest endpoint first.
        let mut junctions: Vec<JunctionCurve> = Vec::new();
        for (mut line, closed) in polylines {
            if closed {
                let (imin, _) = line
                    .iter()
                    .enumerate()
                    .min_by(|(_, &a), (_, &b)| {
                        if lex_less(&vertices[a], a, &vertices[b], b) {
                            std::cmp::Ordering::Less
                        } else {
                            std::cmp::Ordering::Greater
                        }
                    })
                    .unwrap();
                line.rotate_left(imin);
                let n = line.len();
                let (fwd, back) = (line[1 % n], line[n - 1]);
                if lex_less(&vertices[back], back, &vertices[fwd], fwd) {
                    line[1..].reverse();
                }
            } else {
                let (a, b) = (line[0], *line.last().unwrap());
                if a == b {
                    return structure(format!("junction curve starts and ends at vertex {a}"));
                }
                if lex_less(&vertices[b], b, &vertices[a], a) {
                    line.reverse();
                }
            }
            let mut patch_set: Option<BTreeSet<usize>> = None;
            let n = line.len();
            let nedges = if closed { n } else { n - 1 };
            for k in 0..nedges {
                let key = edge_key(line[k], line[(k + 1) % n]);
                let ps: BTreeSet<usize> = edges[&key].iter().map(|&t| triangle_patch[t]).collect();
                match &patch_set {
                    None => patch_set = Some(ps),
                    Some(prev) if *prev != ps => {
                        return structure(format!(
                            "junction curve through vertex {} changes its adjacent patches",
                            line[k]
                        ))
                    }
                    _ => {}
                }
            }
            junctions.push(JunctionCurve {
                vertices: line,
                patches: patch_set.unwrap().into_iter().collect(),
                closed,
                start: CurveEnd::Boundary,
                end: CurveEnd::Boundary,
            });
        }
        junctions.sort_by(|a, b| (a.vertices[0], a.vertices[1]).cmp(&(b.vertices[0], b.vertices[1])));

        if mode == JunctionMode::Multi {
            if junctions.len() != 1 {
                return structure(format!(
                    "a multiple-junction surface needs one shared curve, found {}",
                    junctions.len()
                ));
            }
            let g = gamma.as_ref().unwrap();
            let declared: BTreeSet<usize> = g.iter().copied().collect();
            let traced: BTreeSet<usize> = junctions[0].vertices.iter().copied().collect();
            if declared != traced {
                return structure("declared shared curve does not match the traced curve");
            }
        }

        // T-points.
        let mut t_points: Vec<TPoint> = Vec::new();
        for v in 0..nv {
            if kinds[v] != VertexKind::TPoint {
                continue;
            }
            let curves: Vec<usize> = junctions
                .iter()
                .enumerate()
                .flat_map(|(ci, c)| {
                    let mut hits = Vec::new();
                    if !c.closed && c.vertices[0] == v {
                        hits.push(ci);
                    }
                    if !c.closed && *c.vertices.last().unwrap() == v {
                        hits.push(ci);
                    }
                    hits
                })
                .collect();
            let unique: BTreeSet<usize> = curves.iter().copied().collect();
            if curves.len() != 4 || unique.len() != 4 {
                return structure(format!("T-point {v} is not the endpoint of four distinct junction curves"));
            }
            let curves: [usize; 4] = [curves[0], curves[1], curves[2], curves[3]];
            let all: BTreeSet<usize> = curves.iter().flat_map(|&c| junctions[c].patches.iter().copied()).collect();
            if all.len() != 6 {
                return structure(format!("T-point {v} is adjacent to {} patches, expected 6", all.len()));
            }
            let mut pair_patch = [[usize::MAX; 4]; 4];
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let pi: BTreeSet<usize> = junctions[curves[i]].patches.iter().copied().collect();
                    let shared: Vec<usize> =
                        junctions[curves[j]].patches.iter().copied().filter(|p| pi.contains(p)).collect();
                    if shared.len() != 1 {
                        return structure(format!(
                            "junction curves {} and {} share {} patches at T-point {v}",
                            curves[i],
                            curves[j],
                            shared.len()
                        ));
                    }
                    pair_patch[i][j] = shared[0];
                    pair_patch[j][i] = shared[0];
                }
            }
            t_points.push(TPoint { vertex: v, curves, pair_patch });
        }
        for (ti, tp) in t_points.iter().enumerate() {
            for &c in &tp.curves {
                let curve = &mut junctions[c];
                if curve.vertices[0] == tp.vertex {
                    curve.start = CurveEnd::TPoint(ti);
                } else {
                    curve.end = CurveEnd::TPoint(ti);
                }
            }
        }
        for c in junctions.iter_mut().filter(|c| c.closed) {
            c.start = CurveEnd::Closed;
            c.end = CurveEnd::Closed;
        }

        // Declared labels must agree with the structural inference.
        if let Some(decl) = declared_junctions {
            let declared: BTreeSet<(usize, usize)> = decl
                .iter()
                .flat_map(|line| line.windows(2).map(|w| edge_key(w[0], w[1])).collect::<Vec<_>>())
                .collect();
            // Closing edges of loops may be left implicit.
            let closing: BTreeSet<(usize, usize)> = junctions
                .iter()
                .filter(|c| c.closed)
                .map(|c| edge_key(*c.vertices.last().unwrap(), c.vertices[0]))
                .collect();
            let consistent = declared.is_subset(&junction_edges)
                && junction_edges.iter().all(|e| declared.contains(e) || closing.contains(e));
            if !consistent {
                return structure("declared junctions disagree with edge valence");
            }
        }
        if let Some(decl) = declared_t_points {
            let declared: BTreeSet<usize> = decl.into_iter().collect();
            let inferred: BTreeSet<usize> = t_points.iter().map(|t| t.vertex).collect();
            if declared != inferred {
                return structure("declared t_points disagree with the junction structure");
            }
        }

        // Slots.
        let mut slots = Vec::new();
        let mut vertex_slot_start = Vec::with_capacity(nv + 1);
        for v in 0..nv {
            vertex_slot_start.push(slots.len());
            let ps: BTreeSet<usize> = vertex_triangles[v].iter().map(|&t| triangle_patch[t]).collect();
            for p in ps {
                slots.push(Slot { vertex: v, patch: p });
            }
        }
        vertex_slot_start.push(slots.len());

        // Boundary chains.
        let mut badj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for &(a, b) in &boundary_edges {
            badj[a].push(b);
            badj[b].push(a);
        }
        let mut bvisited: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut boundary_chains = Vec::new();
        for start in 0..nv {
            if badj[start].is_empty() || badj[start].len() == 2 {
                continue;
            }
            let mut nb = badj[start].clone();
            nb.sort_unstable();
            for first in nb {
                if bvisited.contains(&edge_key(start, first)) {
                    continue;
                }
                let mut chain = vec![start];
                let (mut prev, mut cur) = (start, first);
                bvisited.insert(edge_key(prev, cur));
                loop {
                    chain.push(cur);
                    if badj[cur].len() != 2 {
                        break;
                    }
                    let next = badj[cur].iter().copied().find(|&w| w != prev).unwrap();
                    if bvisited.contains(&edge_key(cur, next)) {
                        break;
                    }
                    bvisited.insert(edge_key(cur, next));
                    prev = cur;
                    cur = next;
                }
                boundary_chains.push(chain);
            }
        }
        for &(a, b) in &boundary_edges {
            if bvisited.contains(&(a, b)) {
                continue;
            }
            let mut chain = vec![a];
            let (mut prev, mut cur) = (a, b);
            bvisited.insert((a, b));
            while cur != a {
                chain.push(cur);
                let next = badj[cur].iter().copied().find(|&w| w != prev).unwrap();
                bvisited.insert(edge_key(cur, next));
                prev = cur;
                cur = next;
            }
            chain.push(a);
            boundary_chains.push(chain);
        }

        let has_extends = extends.is_some();
        let finite_edges: BTreeSet<(usize, usize)> = match extends {
            None => BTreeSet::new(),
            Some(ext) => {
                let marked: BTreeSet<(usize, usize)> = ext.iter().map(|e| edge_key(e[0], e[1])).collect();
                if let Some(e) = marked.iter().find(|e| !boundary_edges.contains(e)) {
                    return structure(format!("extends flag on {e:?}, which is not a boundary edge"));
                }
                boundary_edges.difference(&marked).copied().collect()
            }
        };

        let patches: Vec<Patch> = distinct
            .iter()
            .zip(patch_tris)
            .map(|(&label, triangles)| Patch { label, triangles })
            .collect();

        let tol_geom = match tol_geom {
            Some(t) => t,
            None => tolerances::GEOM_REL * bbox_diameter(&vertices),
        };

        let complex = PlateauComplex {
            vertices,
            triangles,
            triangle_patch,
            patches,
            junctions,
            t_points,
            boundary_chains,
            kinds,
            slots,
            vertex_slot_start,
            vertex_triangles,
            edges,
            finite_edges,
            has_extends,
            tol_geom,
            mode,
        };
        for v in 0..nv {
            complex.classify_local_model(v)?;
        }
        Ok(complex)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }
    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn triangle_patch(&self, t: usize) -> usize {
        self.triangle_patch[t]
    }
    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }
    pub fn junctions(&self) -> &[JunctionCurve] {
        &self.junctions
    }
    pub fn t_points(&self) -> &[TPoint] {
        &self.t_points
    }
    pub fn boundary_chains(&self) -> &[Vec<usize>] {
        &self.boundary_chains
    }
    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }
    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }
    pub fn tol_geom(&self) -> f64 {
        self.tol_geom
    }
    pub fn mode(&self) -> JunctionMode {
        self.mode
    }
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }
    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }
    pub fn vertex_slots(&self, v: usize) -> std::ops::Range<usize> {
        self.vertex_slot_start[v]..self.vertex_slot_start[v + 1]
    }
    pub fn slot_of(&self, vertex: usize, patch: usize) -> Option<usize> {
        self.vertex_slots(vertex).find(|&s| self.slots[s].patch == patch)
    }
    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }
    pub fn edge_triangles(&self, a: usize, b: usize) -> &[usize] {
        self.edges.get(&edge_key(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }
    pub fn edges(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<usize>)> {
        self.edges.iter()
    }
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.kinds[v] == VertexKind::Boundary
    }
    /// Boundary edges not flagged as artificial truncation. Empty unless the
    /// file carried an explicit `extends` list.
    pub fn finite_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.finite_edges
    }
    pub fn has_extends(&self) -> bool {
        self.has_extends
    }
    pub fn patch_labels(&self) -> Vec<u32> {
        self.patches.iter().map(|p| p.label).collect()
    }

    /// Unnormalized face normal (twice the area, oriented by winding).
    pub fn face_cross(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t];
        (self.vertices[b] - self.vertices[a]).cross(&(self.vertices[c] - self.vertices[a]))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * self.face_cross(t).norm()
    }

    /// Area-weighted unit normal of `patch` at vertex `v`.
    pub fn fan_normal(&self, v: usize, patch: usize) -> Vec3 {
        let mut n = Vec3::zeros();
        for &t in &self.vertex_triangles[v] {
            if self.triangle_patch[t] == patch {
                n += self.face_cross(t);
            }
        }
        let len = n.norm();
        if len > 0.0 {
            n / len
        } else {
            n
        }
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn mean_edge_length(&self) -> f64 {
        let (sum, n) = self
            .edges
            .keys()
            .fold((0.0, 0usize), |(s, n), &(a, b)| (s + (self.vertices[a] - self.vertices[b]).norm(), n + 1));
        sum / n.max(1) as f64
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .keys()
            .map(|&(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    pub fn bbox_diameter(&self) -> f64 {
        bbox_diameter(&self.vertices)
    }

    /// Classify the star of `v` against the P/Y/T local models.
    pub fn classify_local_model(&self, v: usize) -> Result<LocalModel> {
        let slots = self.vertex_slots(v);
        let n_patches = slots.len();
        let mut paths = 0usize;
        let mut cycles = 0usize;
        for s in slots {
            let p = self.slots[s].patch;
            let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &t in &self.vertex_triangles[v] {
                if self.triangle_patch[t] != p {
                    continue;
                }
                let tv = self.triangles[t];
                let others: Vec<usize> = tv.iter().copied().filter(|&w| w != v).collect();
                adj.entry(others[0]).or_default().push(others[1]);
                adj.entry(others[1]).or_default().push(others[0]);
            }
            if adj.values().any(|n| n.len() > 2) {
                return structure(format!("vertex {v}: link in patch {p} branches"));
            }
            let ends = adj.values().filter(|n| n.len() == 1).count();
            // Connectivity of the link graph.
            let start = *adj.keys().next().unwrap();
            let mut seen = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &adj[&x] {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != adj.len() {
                return structure(format!("vertex {v}: patch {p} is pinched at this vertex"));
            }
            match ends {
                0 => cycles += 1,
                2 => paths += 1,
                _ => return structure(format!("vertex {v}: malformed link in patch {p}")),
            }
        }
        let model = match self.kinds[v] {
            VertexKind::Boundary => {
                if cycles > 0 {
                    return structure(format!("boundary vertex {v} has a closed link"));
                }
                LocalModel::Boundary
            }
            VertexKind::Interior if n_patches == 1 && cycles == 1 => LocalModel::P,
            VertexKind::Junction
                if cycles == 0
                    && (n_patches == 3 || (self.mode == JunctionMode::Multi && n_patches >= 2)) =>
            {
                LocalModel::Y
            }
            VertexKind::TPoint if n_patches == 6 && cycles == 0 => LocalModel::T,
            _ => {
                return structure(format!(
                    "vertex {v}: star with {n_patches} patches ({paths} open, {cycles} closed links) matches no local model"
                ))
            }
        };
        Ok(model)
    }

    /// Same combinatorics, new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> PlateauComplex {
        assert_eq!(vertices.len(), self.vertices.len());
        let mut c = self.clone();
        c.vertices = vertices;
        c
    }

    /// Apply a map to every vertex (rigid motions, scalings).
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> PlateauComplex {
        let mut c = self.with_vertices(self.vertices.iter().map(f).collect());
        c.tol_geom = tolerances::GEOM_REL * c.bbox_diameter();
        c
    }

    pub fn set_tol_geom(&mut self, tol: f64) {
        self.tol_geom = tol;
    }

    /// Per-vertex count summary used by reports.
    pub fn counts(&self) -> ComplexCounts {
        ComplexCounts {
            vertices: self.vertices.len(),
            triangles: self.triangles.len(),
            patches: self.patches.len(),
            junction_curves: self.junctions.len(),
            t_points: self.t_points.len(),
            boundary_chains: self.boundary_chains.len(),
            slots: self.slots.len(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ComplexCounts {
    pub vertices: usize,
    pub triangles: usize,
    pub patches: usize,
    pub junction_curves: usize,
    pub t_points: usize,
    pub boundary_chains: usize,
    pub slots: usize,
}

pub(crate) fn bbox_diameter(vertices: &[Vec3]) -> f64 {
    if vertices.is_empty() {
        return 0.0;
    }
    let mut lo = vertices[0];
    let mut hi = vertices[0];
    for p in vertices {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}
