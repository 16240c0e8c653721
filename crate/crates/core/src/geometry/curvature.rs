use std::collections::{BTreeSet, VecDeque};

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::complex::{PlateauComplex, Vec3, VertexKind};
use crate::error::{PlateauError, Result};

use super::{check_triangles, slot_masses};

#[derive(Clone, Debug)]
pub struct CurvatureData {
    /// Shape operator per slot in an orthonormal tangent frame.
    pub shape: Vec<Matrix2<f64>>,
    /// Mean curvature per slot (sum of principal curvatures, signed by ν).
    pub mean: Vec<f64>,
    /// |A|² per slot.
    pub a2: Vec<f64>,
    /// Mixed Voronoi area per slot.
    pub mass: Vec<f64>,
    /// True where the value comes from a fit at the slot itself rather than
    /// from the nearest patch-interior vertex.
    pub fitted: Vec<bool>,
    pub patch_area: Vec<f64>,
}

impl CurvatureData {
    /// max |H| over directly fitted slots.
    pub fn max_abs_mean(&self) -> f64 {
        self.mean.iter().zip(&self.fitted).filter(|(_, &f)| f).map(|(h, _)| h.abs()).fold(0.0, f64::max)
    }
    /// max |A|² over directly fitted slots.
    pub fn max_a2(&self) -> f64 {
        self.a2.iter().zip(&self.fitted).filter(|(_, &f)| f).map(|(a, _)| *a).fold(0.0, f64::max)
    }
}

fn patch_neighbors(c: &PlateauComplex, v: usize, patch: usize) -> BTreeSet<usize> {
    c.vertex_triangles(v)
        .iter()
        .filter(|&&t| c.triangle_patch(t) == patch)
        .flat_map(|&t| c.triangles()[t])
        .filter(|&w| w != v)
        .collect()
}

/// Fit z = ax² + bxy + cy² + dx + ey to the neighbors of `v` within `patch`
/// in the frame of the fan normal; returns the shape operator.
fn fit_shape(c: &PlateauComplex, v: usize, patch: usize) -> Result<Matrix2<f64>> {
    let n = c.fan_normal(v, patch);
    let mut ring = patch_neighbors(c, v, patch);
    if ring.len() < 5 {
        let first: Vec<usize> = ring.iter().copied().collect();
        for w in first {
            ring.extend(patch_neighbors(c, w, patch));
        }
        ring.remove(&v);
    }
    if ring.len() < 5 || n.norm() == 0.0 {
        return Err(PlateauError::FitRank { vertex: v, patch });
    }
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    let origin = c.vertex(v);
    let scale = ring.iter().map(|&w| (c.vertex(w) - origin).norm()).sum::<f64>() / ring.len() as f64;
    let mut a = DMatrix::<f64>::zeros(ring.len(), 5);
    let mut rhs = DVector::<f64>::zeros(ring.len());
    for (row, &w) in ring.iter().enumerate() {
        let d = (c.vertex(w) - origin) / scale;
        let (x, y, z) = (d.dot(&e1), d.dot(&e2), d.dot(&n));
        a.row_mut(row).copy_from_slice(&[x * x, x * y, y * y, x, y]);
        rhs[row] = z;
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-10 * smax {
        return Err(PlateauError::FitRank { vertex: v, patch });
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|_| PlateauError::FitRank { vertex: v, patch })?;
    // Undo the length scaling: second-order coefficients carry 1/scale.
    let (qa, qb, qc) = (coef[0] / scale, coef[1] / scale, coef[2] / scale);
    let (gd, ge) = (coef[3], coef[4]);
    let w = (1.0 + gd * gd + ge * ge).sqrt();
    let first = Matrix2::new(1.0 + gd * gd, gd * ge, gd * ge, 1.0 + ge * ge);
    let second = Matrix2::new(2.0 * qa, qb, qb, 2.0 * qc) / w;
    // Symmetric form I^{-1/2} II I^{-1/2}.
    let eig = first.symmetric_eigen();
    let inv_sqrt = eig.eigenvectors
        * Matrix2::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    let s = inv_sqrt * second * inv_sqrt;
    Ok((s + s.transpose()) * 0.5)
}

/// Shape operator, H and |A|² per slot. Patch-interior vertices are fitted
/// directly; junction, T-point and boundary slots take the value of the
/// nearest patch-interior vertex (graph distance within the patch).
pub fn compute_curvature(c: &PlateauComplex) -> Result<CurvatureData> {
    check_triangles(c)?;
    use rayon::prelude::*;
    let ns = c.num_slots();
    let fits: Vec<Option<Result<Matrix2<f64>>>> = (0..ns)
        .into_par_iter()
        .map(|s| {
            let slot = c.slots()[s];
            (c.kind(slot.vertex) == VertexKind::Interior).then(|| fit_shape(c, slot.vertex, slot.patch))
        })
        .collect();
    let mut shape: Vec<Option<Matrix2<f64>>> = vec![None; ns];
    let mut fitted = vec![false; ns];
    for (s, f) in fits.into_iter().enumerate() {
        if let Some(r) = f {
            shape[s] = Some(r?);
            fitted[s] = true;
        }
    }
    // Multi-source BFS inside each patch to extend values to unfitted slots.
    let mut queue: VecDeque<usize> = (0..ns).filter(|&s| fitted[s]).collect();
    while let Some(s) = queue.pop_front() {
        let slot = c.slots()[s];
        for w in patch_neighbors(c, slot.vertex, slot.patch) {
            let ws = c.slot_of(w, slot.patch).expect("neighbor lies on the patch");
            if shape[ws].is_none() {
                shape[ws] = shape[s];
                queue.push_back(ws);
            }
        }
    }
    let shape: Vec<Matrix2<f64>> = shape.into_iter().map(|m| m.unwrap_or_else(Matrix2::zeros)).collect();
    let mean = shape.iter().map(|m| m.trace()).collect();
    let a2 = shape.iter().map(|m| (m * m).trace()).collect();
    let mut patch_area = vec![0.0; c.patches().len()];
    for t in 0..c.triangles().len() {
        patch_area[c.triangle_patch(t)] += c.triangle_area(t);
    }
    Ok(CurvatureData { shape, mean, a2, mass: slot_masses(c), fitted, patch_area })
}
