use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rayon::prelude::*;

use crate::complex::{assign_signs, PlateauComplex, SignAssignment, VertexKind};
use crate::error::Result;
use crate::funcspace::{constraint_blocks, ConstraintBlock, ScalarField};
use crate::geometry::{compute_curvature, compute_frames, CurvatureData, JunctionFrames};

/// Signs, curvature and junction frames of a complex, computed once.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub signs: SignAssignment,
    pub curvature: CurvatureData,
    pub frames: JunctionFrames,
}

impl Analysis {
    pub fn new(c: &PlateauComplex) -> Result<Self> {
        let signs = assign_signs(c)?;
        let curvature = compute_curvature(c)?;
        let frames = compute_frames(c, &signs)?;
        Ok(Analysis { signs, curvature, frames })
    }
}

/// Assembly options: per-patch density weights and an optional constant
/// replacing |A|² everywhere.
#[derive(Clone, Debug, Default)]
pub struct FormOptions {
    pub weights: Option<Vec<f64>>,
    pub a2_override: Option<f64>,
}

/// Second variation as a sparse symmetric form over the non-boundary slots.
#[derive(Clone, Debug)]
pub struct VariationForm {
    /// Full form `stiffness − curvature − curve` over dofs.
    pub q: CsrMatrix<f64>,
    /// Weighted Dirichlet part.
    pub stiffness: CsrMatrix<f64>,
    /// Diagonal of the |A|² term (entered with a minus sign in `q`).
    pub curvature_diag: Vec<f64>,
    /// Diagonal of the junction term Σ w (𝑯·τ) (entered with a minus sign).
    pub curve_diag: Vec<f64>,
    /// Lumped mass per dof.
    pub mass: Vec<f64>,
    pub dof_slots: Vec<usize>,
    pub slot_dofs: Vec<Option<usize>>,
    /// Compatibility blocks whose slots are all dofs.
    pub blocks: Vec<ConstraintBlock>,
}

impl VariationForm {
    pub fn dofs(&self) -> usize {
        self.dof_slots.len()
    }

    /// Restrict a slot field to the dof vector (boundary slots dropped).
    pub fn dof_vector(&self, f: &ScalarField) -> Vec<f64> {
        self.dof_slots.iter().map(|&s| f.values[s]).collect()
    }

    pub fn slot_field(&self, num_slots: usize, x: &[f64]) -> ScalarField {
        let mut f = ScalarField { values: vec![0.0; num_slots] };
        for (d, &s) in self.dof_slots.iter().enumerate() {
            f.values[s] = x[d];
        }
        f
    }

    /// φᵀQφ.
    pub fn quadratic(&self, f: &ScalarField) -> f64 {
        let x = self.dof_vector(f);
        let mut total = 0.0;
        for (i, row) in self.q.row_iter().enumerate() {
            let mut acc = 0.0;
            for (&j, &v) in row.col_indices().iter().zip(row.values()) {
                acc += v * x[j];
            }
            total += x[i] * acc;
        }
        total
    }

    /// Constraint matrix over dofs: one row per compatibility condition.
    pub fn constraint_matrix(&self) -> CsrMatrix<f64> {
        let nrows: usize = self.blocks.iter().map(|b| b.rows.len()).sum();
        let mut coo = CooMatrix::new(nrows, self.dofs());
        let mut r = 0;
        for b in &self.blocks {
            for row in &b.rows {
                for (k, &s) in b.slots.iter().enumerate() {
                    if row[k] != 0.0 {
                        coo.push(r, self.slot_dofs[s].expect("block slot is a dof"), row[k]);
                    }
                }
                r += 1;
            }
        }
        CsrMatrix::from(&coo)
    }

    /// Largest absolute entry of Q − Qᵀ.
    pub fn asymmetry(&self) -> f64 {
        let t = self.q.transpose();
        let diff = &self.q - &t;
        diff.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn cot(a: &crate::Vec3, b: &crate::Vec3) -> f64 {
    a.dot(b) / a.cross(b).norm()
}

/// Assemble Σ_Λ θ_Λ ∫(|∇φ|² − |A|²φ²) − Σ_L Σᵢ θⁱ ∫(φⁱ)² 𝑯_L·τⁱ with linear
/// elements per patch; dofs are slots off the truncation boundary.
pub fn assemble_second_variation(c: &PlateauComplex, an: &Analysis, opts: &FormOptions) -> VariationForm {
    let ns = c.num_slots();
    let weight = |patch: usize| opts.weights.as_ref().map_or(1.0, |w| w[patch]);
    let mut slot_dofs = vec![None; ns];
    let mut dof_slots = Vec::new();
    for (s, slot) in c.slots().iter().enumerate() {
        if c.kind(slot.vertex) != VertexKind::Boundary {
            slot_dofs[s] = Some(dof_slots.len());
            dof_slots.push(s);
        }
    }
    let n = dof_slots.len();

    // Element stiffness contributions, computed in parallel and summed in
    // triangle order.
    let local: Vec<[(usize, usize, f64); 9]> = (0..c.triangles().len())
        .into_par_iter()
        .map(|t| {
            let tv = c.triangles()[t];
            let p = c.triangle_patch(t);
            let x = [c.vertex(tv[0]), c.vertex(tv[1]), c.vertex(tv[2])];
            let slots = [0, 1, 2].map(|k| c.slot_of(tv[k], p).expect("corner slot"));
            let th = weight(p);
            let mut out = [(0, 0, 0.0); 9];
            let mut idx = 0;
            for i in 0..3 {
                for j in 0..3 {
                    let val = if i == j {
                        let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                        0.5 * (cot(&(x[i] - x[b]), &(x[a] - x[b])) + cot(&(x[i] - x[a]), &(x[b] - x[a])))
                    } else {
                        let k = 3 - i - j;
                        -0.5 * cot(&(x[i] - x[k]), &(x[j] - x[k]))
                    };
                    out[idx] = (slots[i], slots[j], th * val);
                    idx += 1;
                }
            }
            out
        })
        .collect();
    let mut coo = CooMatrix::new(n, n);
    for block in &local {
        for &(a, b, v) in block {
            if let (Some(i), Some(j)) = (slot_dofs[a], slot_dofs[b]) {
                coo.push(i, j, v);
            }
        }
    }
    let stiffness = CsrMatrix::from(&coo);

    let curv = &an.curvature;
    let mut curvature_diag = vec![0.0; n];
    let mut mass = vec![0.0; n];
    for (d, &s) in dof_slots.iter().enumerate() {
        let th = weight(c.slots()[s].patch);
        let a2 = opts.a2_override.unwrap_or(curv.a2[s]);
        curvature_diag[d] = th * a2 * curv.mass[s];
        mass[d] = th * curv.mass[s];
    }
    let mut curve_diag = vec![0.0; n];
    for (ci, frames) in an.frames.curves.iter().enumerate() {
        let curve = &c.junctions()[ci];
        for f in frames {
            for (i, &p) in curve.patches.iter().enumerate() {
                let s = c.slot_of(f.vertex, p).expect("curve slot");
                if let Some(d) = slot_dofs[s] {
                    curve_diag[d] += weight(p) * f.weight * f.curvature.dot(&f.conormals[i]);
                }
            }
        }
    }

    let mut full = CooMatrix::new(n, n);
    for (i, j, v) in stiffness.triplet_iter() {
        full.push(i, j, *v);
    }
    for d in 0..n {
        full.push(d, d, -curvature_diag[d] - curve_diag[d]);
    }
    let q = CsrMatrix::from(&full);

    let blocks = constraint_blocks(c, &an.signs)
        .into_iter()
        .filter(|b| b.slots.iter().all(|&s| slot_dofs[s].is_some()))
        .collect();
    VariationForm { q, stiffness, curvature_diag, curve_diag, mass, dof_slots, slot_dofs, blocks }
}

/// The same functional evaluated directly: per-triangle gradients of the
/// piecewise-linear φ, pointwise |A|² quadrature and trapezoid sums along
/// junction curves. Slots on the truncation boundary must carry zero.
pub fn direct_second_variation(c: &PlateauComplex, an: &Analysis, opts: &FormOptions, f: &ScalarField) -> f64 {
    let weight = |patch: usize| opts.weights.as_ref().map_or(1.0, |w| w[patch]);
    let grad: Vec<f64> = (0..c.triangles().len())
        .into_par_iter()
        .map(|t| {
            let tv = c.triangles()[t];
            let p = c.triangle_patch(t);
            let x = [c.vertex(tv[0]), c.vertex(tv[1]), c.vertex(tv[2])];
            let phi = [0, 1, 2].map(|k| f.values[c.slot_of(tv[k], p).expect("corner slot")]);
            let nrm = (x[1] - x[0]).cross(&(x[2] - x[0]));
            let area2 = nrm.norm();
            let nhat = nrm / area2;
            // ∇φ = Σ φ_k (n̂ × e_k) / (2·area), e_k the edge opposite corner k.
            let mut g = crate::Vec3::zeros();
            for k in 0..3 {
                let e = x[(k + 2) % 3] - x[(k + 1) % 3];
                g += nhat.cross(&e) * (phi[k] / area2);
            }
            weight(p) * 0.5 * area2 * g.norm_squared()
        })
        .collect();
    let mut total: f64 = grad.iter().sum();
    for (s, slot) in c.slots().iter().enumerate() {
        let a2 = opts.a2_override.unwrap_or(an.curvature.a2[s]);
        if c.kind(slot.vertex) != VertexKind::Boundary {
            total -= weight(slot.patch) * a2 * f.values[s] * f.values[s] * an.curvature.mass[s];
        }
    }
    for (ci, frames) in an.frames.curves.iter().enumerate() {
        let curve = &c.junctions()[ci];
        for fr in frames {
            if c.kind(fr.vertex) == VertexKind::Boundary {
                continue;
            }
            for (i, &p) in curve.patches.iter().enumerate() {
                let phi = f.values[c.slot_of(fr.vertex, p).expect("curve slot")];
                total -= weight(p) * fr.weight * phi * phi * fr.curvature.dot(&fr.conormals[i]);
            }
        }
    }
    total
}
