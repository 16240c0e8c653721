//! Compatible function spaces: per-patch scalar fields, ambient vector
//! fields, and the correspondence f = V·ν between them.

mod io;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use io::{load_field, FieldEntry, FieldFile};

use crate::complex::{ComplementRegions, JunctionMode, PlateauComplex, SignAssignment, Vec3, VertexKind};
use crate::error::{PlateauError, Result};
use crate::geometry::slot_normals;
use crate::tolerances;

/// One value per slot (vertex, patch): junction vertices carry one value per
/// incident patch.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(c: &PlateauComplex) -> Self {
        ScalarField { values: vec![0.0; c.num_slots()] }
    }

    /// Slots with a nonzero value.
    pub fn support(&self) -> Vec<bool> {
        self.values.iter().map(|v| *v != 0.0).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_diff(&self, other: &ScalarField) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// One ambient vector per vertex, shared by all patches through it.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub vectors: Vec<Vec3>,
}

impl VectorField {
    pub fn zeros(c: &PlateauComplex) -> Self {
        VectorField { vectors: vec![Vec3::zeros(); c.vertices().len()] }
    }

    pub fn support(&self) -> Vec<bool> {
        self.vectors.iter().map(|v| *v != Vec3::zeros()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    /// Interior or boundary vertex of a junction curve: one sign row.
    Junction { curve: usize },
    /// T-point: one row per incident curve over its six slots.
    TPoint { index: usize },
    /// Vertex of the shared curve of a multiple-junction surface: rows span
    /// the complement of the values reachable as W·νⁱ with W normal to Γ.
    Gamma { curve: usize },
}

/// Linear compatibility conditions coupling the slots of one vertex.
#[derive(Clone, Debug)]
pub struct ConstraintBlock {
    pub vertex: usize,
    pub kind: BlockKind,
    pub slots: Vec<usize>,
    /// Rows over `slots`; the field is compatible at this vertex iff every
    /// row annihilates it.
    pub rows: Vec<Vec<f64>>,
    /// Orthonormal basis of the row space.
    pub basis: DMatrix<f64>,
}

impl ConstraintBlock {
    fn new(vertex: usize, kind: BlockKind, slots: Vec<usize>, rows: Vec<Vec<f64>>) -> Self {
        let basis = row_space_basis(&rows, slots.len());
        ConstraintBlock { vertex, kind, slots, rows, basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Largest |row·f| over the block.
    pub fn residual(&self, values: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().zip(&self.slots).map(|(a, &s)| a * values[s]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// Orthonormal basis of the compatible values of this block (columns).
    pub fn null_space(&self) -> DMatrix<f64> {
        let k = self.slots.len();
        complement_basis(&self.basis, k)
    }
}

/// Orthonormal basis (columns) of the span of `rows`, rank decided relative
/// to the largest singular value.
fn row_space_basis(rows: &[Vec<f64>], width: usize) -> DMatrix<f64> {
    if rows.is_empty() {
        return DMatrix::zeros(width, 0);
    }
    let a = DMatrix::from_fn(width, rows.len(), |i, j| rows[j][i]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-10 * smax.max(1e-300)).collect();
    DMatrix::from_fn(width, keep.len(), |i, j| u[(i, keep[j])])
}

/// Orthonormal completion of the columns of `basis` in ℝᵏ.
fn complement_basis(basis: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut proj = DMatrix::<f64>::identity(k, k);
    if basis.ncols() > 0 {
        proj -= basis * basis.transpose();
    }
    let eig = proj.symmetric_eigen();
    let keep: Vec<usize> = (0..k).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    let mut out = DMatrix::from_fn(k, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])]);
    // Fix the sign of each column for reproducibility.
    for j in 0..out.ncols() {
        let pivot = (0..k).max_by(|&a, &b| out[(a, j)].abs().total_cmp(&out[(b, j)].abs())).unwrap_or(0);
        if out[(pivot, j)] < 0.0 {
            out.column_mut(j).neg_mut();
        }
    }
    out
}

/// Unit vectors spanning the plane normal to a tangent.
pub fn normal_plane(t: &Vec3) -> (Vec3, Vec3) {
    let helper = if t.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = t.cross(&helper).normalize();
    (e1, t.cross(&e1))
}

/// Compatibility blocks of the complex: one per junction-curve vertex and
/// one per T-point.
pub fn constraint_blocks(c: &PlateauComplex, s: &SignAssignment) -> Vec<ConstraintBlock> {
    let normals = slot_normals(c);
    let mut blocks = Vec::new();
    for (ci, curve) in c.junctions().iter().enumerate() {
        let tangents = crate::geometry::curve_tangents(c, ci);
        for (k, &v) in curve.vertices.iter().enumerate() {
            if c.kind(v) == VertexKind::TPoint {
                continue;
            }
            let slots: Vec<usize> =
                curve.patches.iter().map(|&p| c.slot_of(v, p).expect("curve vertex lies on its patches")).collect();
            match c.mode() {
                JunctionMode::Plateau => {
                    let row = s.curve_signs[ci].iter().map(|&x| f64::from(x)).collect();
                    blocks.push(ConstraintBlock::new(v, BlockKind::Junction { curve: ci }, slots, vec![row]));
                }
                JunctionMode::Multi => {
                    let (e1, e2) = normal_plane(&tangents[k]);
                    let q = slots.len();
                    let n = DMatrix::from_fn(q, 2, |i, j| normals[slots[i]].dot(if j == 0 { &e1 } else { &e2 }));
                    let range = row_space_basis(&[n.column(0).iter().copied().collect(), n.column(1).iter().copied().collect()], q);
                    let comp = complement_basis(&range, q);
                    let rows = (0..comp.ncols()).map(|j| comp.column(j).iter().copied().collect()).collect();
                    blocks.push(ConstraintBlock::new(v, BlockKind::Gamma { curve: ci }, slots, rows));
                }
            }
        }
    }
    for (ti, tp) in c.t_points().iter().enumerate() {
        let patches = tp.patches();
        let slots: Vec<usize> = patches.iter().map(|&p| c.slot_of(tp.vertex, p).expect("T-point lies on its patches")).collect();
        let sg = &s.t_signs[ti].sign;
        let rows = (0..4)
            .map(|j| {
                let mut row = vec![0.0; 6];
                for i in (0..4).filter(|&i| i != j) {
                    let pos = patches.iter().position(|&p| p == tp.pair_patch[i][j]).expect("pair patch");
                    row[pos] = f64::from(sg[i][j]);
                }
                row
            })
            .collect();
        blocks.push(ConstraintBlock::new(tp.vertex, BlockKind::TPoint { index: ti }, slots, rows));
    }
    blocks
}

/// Threshold for compatibility checks.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CompatTolerance {
    pub abs: f64,
    /// Scale the threshold by max |f| (for relaxed inputs).
    pub relative: bool,
}

impl Default for CompatTolerance {
    fn default() -> Self {
        CompatTolerance { abs: tolerances::COMPAT_ABS, relative: false }
    }
}

impl CompatTolerance {
    pub fn threshold(&self, f: &ScalarField) -> f64 {
        if self.relative {
            self.abs * f.max_abs().max(f64::MIN_POSITIVE)
        } else {
            self.abs
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatReport {
    pub max_junction_residual: f64,
    pub max_t_residual: f64,
    pub tol: f64,
    pub compatible: bool,
}

impl CompatReport {
    pub fn max_residual(&self) -> f64 {
        self.max_junction_residual.max(self.max_t_residual)
    }
}

pub fn check_compatible(c: &PlateauComplex, s: &SignAssignment, f: &ScalarField, tol: CompatTolerance) -> CompatReport {
    check_with_blocks(&constraint_blocks(c, s), f, tol)
}

pub fn check_with_blocks(blocks: &[ConstraintBlock], f: &ScalarField, tol: CompatTolerance) -> CompatReport {
    let (mut junction, mut t) = (0.0f64, 0.0f64);
    for b in blocks {
        let r = b.residual(&f.values);
        match b.kind {
            BlockKind::TPoint { .. } => t = t.max(r),
            _ => junction = junction.max(r),
        }
    }
    let threshold = tol.threshold(f);
    CompatReport {
        max_junction_residual: junction,
        max_t_residual: t,
        tol: threshold,
        compatible: junction <= threshold && t <= threshold,
    }
}

/// Project every block of `f` onto its compatible values.
pub fn project_compatible(blocks: &[ConstraintBlock], f: &mut ScalarField) {
    for b in blocks {
        if b.basis.ncols() == 0 {
            continue;
        }
        let x = DVector::from_iterator(b.slots.len(), b.slots.iter().map(|&s| f.values[s]));
        let y = &x - &b.basis * (b.basis.transpose() * &x);
        for (k, &s) in b.slots.iter().enumerate() {
            f.values[s] = y[k];
        }
    }
}

/// f_Λ = V·ν_Λ at every slot, projected blockwise so that the result is
/// compatible by construction.
pub fn restrict_normal_component(c: &PlateauComplex, s: &SignAssignment, v: &VectorField) -> ScalarField {
    let normals = slot_normals(c);
    let mut f = ScalarField {
        values: c.slots().iter().zip(&normals).map(|(slot, n)| v.vectors[slot.vertex].dot(n)).collect(),
    };
    project_compatible(&constraint_blocks(c, s), &mut f);
    f
}

/// Ambient vector realizing a compatible field at one vertex.
fn anchor_vector(c: &PlateauComplex, normals: &[Vec3], b: &ConstraintBlock, f: &ScalarField) -> Vec3 {
    match b.kind {
        BlockKind::Junction { .. } => {
            b.slots.iter().map(|&s| normals[s] * f.values[s]).sum::<Vec3>() * (2.0 / 3.0)
        }
        BlockKind::TPoint { .. } => b.slots.iter().map(|&s| normals[s] * f.values[s]).sum::<Vec3>() * 0.5,
        BlockKind::Gamma { curve } => {
            // Least-squares W in the normal plane of Γ; exact for compatible f.
            let k = c.junctions()[curve].vertices.iter().position(|&w| w == b.vertex).expect("vertex on Γ");
            let t = crate::geometry::curve_tangents(c, curve)[k];
            let (e1, e2) = normal_plane(&t);
            let q = b.slots.len();
            let a = DMatrix::from_fn(q, 2, |i, j| normals[b.slots[i]].dot(if j == 0 { &e1 } else { &e2 }));
            let rhs = DVector::from_iterator(q, b.slots.iter().map(|&s| f.values[s]));
            let w = a.svd(true, true).solve(&rhs, 1e-12).expect("SVD solve");
            e1 * w[0] + e2 * w[1]
        }
    }
}

/// Build V with V·ν_Λ = f_Λ: f ν at single-patch vertices, (2/3)Σ fⁱνⁱ on
/// junction curves, (1/2)Σ fⁱʲνⁱʲ at T-points. Single-patch vertices within
/// the blend radius of a singular vertex also inherit the tangential part of
/// the nearest singular vector (T-points take precedence), faded linearly
/// to zero at the radius. The normal component is never altered.
pub fn lift_to_vector_field(
    c: &PlateauComplex,
    s: &SignAssignment,
    f: &ScalarField,
    tol: CompatTolerance,
) -> Result<VectorField> {
    let blocks = constraint_blocks(c, s);
    let report = check_with_blocks(&blocks, f, tol);
    if !report.compatible {
        return Err(PlateauError::IncompatibleField { residual: report.max_residual(), tol: report.tol });
    }
    let normals = slot_normals(c);
    let mut v = VectorField::zeros(c);
    let mut anchors: Vec<(usize, bool)> = Vec::with_capacity(blocks.len());
    for b in &blocks {
        v.vectors[b.vertex] = anchor_vector(c, &normals, b, f);
        anchors.push((b.vertex, matches!(b.kind, BlockKind::TPoint { .. })));
    }
    let radius = tolerances::BLEND_EDGES * c.mean_edge_length();
    for vert in 0..c.vertices().len() {
        let range = c.vertex_slots(vert);
        if range.len() != 1 {
            continue;
        }
        let slot = range.start;
        let n = normals[slot];
        let p = c.vertex(vert);
        let mut out = n * f.values[slot];
        let nearest = |want_t: bool| {
            anchors
                .iter()
                .filter(|(_, is_t)| !want_t || *is_t)
                .map(|&(a, _)| (a, (c.vertex(a) - p).norm()))
                .filter(|&(_, d)| d < radius)
                .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)))
        };
        if let Some((a, d)) = nearest(true).or_else(|| nearest(false)) {
            let va = v.vectors[a];
            out += (va - n * va.dot(&n)) * (1.0 - d / radius);
        }
        v.vectors[vert] = out;
    }
    Ok(v)
}

/// f^Ω: +1 on patches whose normal points into Ω, −1 on patches whose normal
/// points out of it, 0 elsewhere and on the truncation boundary.
pub fn locally_constant_field(c: &PlateauComplex, regions: &ComplementRegions, region: usize) -> Result<ScalarField> {
    if region >= regions.count {
        return Err(PlateauError::RegionUnknown(region));
    }
    Ok(ScalarField {
        values: c
            .slots()
            .iter()
            .map(|slot| {
                if c.kind(slot.vertex) == VertexKind::Boundary {
                    0.0
                } else {
                    f64::from(regions.facing(slot.patch, region))
                }
            })
            .collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerProductReport {
    /// max |νⁱ·νʲ + ½ signⁱ signʲ| over junction vertices, i ≠ j.
    pub max_y_residual: f64,
    /// max deviation from the three-case table at T-points.
    pub max_t_residual: f64,
    /// max |νⁱʲ·νᵏˡ| over complementary pairs (the permutation case).
    pub max_t_permutation: f64,
    pub junction_vertices: usize,
    pub t_points: usize,
}

/// Expected νⁱʲ·νᵏˡ at a T-point from the sign table, for local curve pairs.
pub fn t_table_entry(sign: &[[i8; 4]; 4], (i, j): (usize, usize), (k, l): (usize, usize)) -> f64 {
    let a = [i, j];
    let b = [k, l];
    let shared: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
    match shared.len() {
        2 => 1.0,
        1 => {
            let m = shared[0];
            let p = if i == m { j } else { i };
            let q = if k == m { l } else { k };
            -0.5 * f64::from(sign[p][m]) * f64::from(sign[q][m])
        }
        _ => 0.0,
    }
}

pub fn verify_inner_product_tables(c: &PlateauComplex, s: &SignAssignment) -> InnerProductReport {
    let mut max_y = 0.0f64;
    let mut count = 0;
    for (ci, curve) in c.junctions().iter().enumerate() {
        for &v in &curve.vertices {
            if c.kind(v) == VertexKind::TPoint {
                continue;
            }
            count += 1;
            let n: Vec<Vec3> = curve.patches.iter().map(|&p| c.fan_normal(v, p)).collect();
            for i in 0..n.len() {
                for j in (i + 1)..n.len() {
                    let expected = -0.5 * f64::from(s.curve_signs[ci][i]) * f64::from(s.curve_signs[ci][j]);
                    max_y = max_y.max((n[i].dot(&n[j]) - expected).abs());
                }
            }
        }
    }
    let (mut max_t, mut max_perm) = (0.0f64, 0.0f64);
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for (ti, tp) in c.t_points().iter().enumerate() {
        let n: Vec<Vec3> = PAIRS.iter().map(|&(i, j)| c.fan_normal(tp.vertex, tp.pair_patch[i][j])).collect();
        for (x, &pa) in PAIRS.iter().enumerate() {
            for (y, &pb) in PAIRS.iter().enumerate() {
                let dot = n[x].dot(&n[y]);
                let expected = t_table_entry(&s.t_signs[ti].sign, pa, pb);
                max_t = max_t.max((dot - expected).abs());
                if pa.0 != pb.0 && pa.0 != pb.1 && pa.1 != pb.0 && pa.1 != pb.1 {
                    max_perm = max_perm.max(dot.abs());
                }
            }
        }
    }
    InnerProductReport {
        max_y_residual: max_y,
        max_t_residual: max_t,
        max_t_permutation: max_perm,
        junction_vertices: count,
        t_points: c.t_points().len(),
    }
}
