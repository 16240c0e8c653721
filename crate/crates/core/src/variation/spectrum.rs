use std::collections::HashSet;

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};
use serde::Serialize;

use super::form::VariationForm;
use crate::error::{PlateauError, Result};
use crate::funcspace::ScalarField;
use crate::tolerances;

/// Smallest constrained eigenpairs of (Q, M) on the compatible subspace.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    /// Ascending; at most the requested count.
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<ScalarField>,
    /// Largest |eigenvalue| of the reduced problem (spectral norm of Q in
    /// the mass metric).
    pub q_norm: f64,
    pub tol_eig: f64,
    pub stable: bool,
    pub dofs: usize,
    pub reduced_dim: usize,
    pub negative_count: usize,
}

/// Columns of an M-orthonormal basis W of the compatible subspace (as a
/// sparse dofs × r matrix): the null space of each block, orthonormalized in
/// the lumped mass metric.
pub fn compatible_basis(form: &VariationForm) -> Result<CsrMatrix<f64>> {
    let n = form.dofs();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut col = 0;
    let mut covered = HashSet::new();
    for b in &form.blocks {
        let dofs: Vec<usize> = b.slots.iter().map(|&s| form.slot_dofs[s].expect("block dof")).collect();
        covered.extend(dofs.iter().copied());
        let z = b.null_space();
        if z.ncols() == 0 {
            continue;
        }
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dofs.len(), dofs.iter().map(|&d| form.mass[d])));
        let gram = z.transpose() * m * &z;
        let chol = gram
            .cholesky()
            .ok_or_else(|| PlateauError::Solver(format!("mass Gram matrix of block at vertex {} is singular", b.vertex)))?;
        // W_b = Z L⁻ᵀ, so W_bᵀ M W_b = I.
        let linv_t = chol.l().try_inverse().expect("triangular factor is invertible").transpose();
        let w = &z * linv_t;
        for j in 0..w.ncols() {
            for (i, &d) in dofs.iter().enumerate() {
                if w[(i, j)] != 0.0 {
                    entries.push((d, col + j, w[(i, j)]));
                }
            }
        }
        col += w.ncols();
    }
    for d in 0..n {
        if !covered.contains(&d) {
            entries.push((d, col, 1.0 / form.mass[d].sqrt()));
            col += 1;
        }
    }
    let mut coo = CooMatrix::new(n, col);
    for (i, j, v) in entries {
        coo.push(i, j, v);
    }
    Ok(CsrMatrix::from(&coo))
}

/// Dense reduced matrix WᵀQW.
pub fn reduced_matrix(form: &VariationForm) -> Result<(CsrMatrix<f64>, DMatrix<f64>)> {
    let w = compatible_basis(form)?;
    let r = w.ncols();
    if r == 0 {
        return Err(PlateauError::EmptySubspace);
    }
    if r > tolerances::MAX_DENSE_DIM {
        return Err(PlateauError::Solver(format!(
            "reduced dimension {r} exceeds the dense eigensolver limit {}",
            tolerances::MAX_DENSE_DIM
        )));
    }
    let wt = w.transpose();
    let qw = &form.q * &w;
    let c = &wt * &qw;
    let cc = CscMatrix::from(&c);
    let mut dense = DMatrix::zeros(r, r);
    for (i, j, v) in cc.triplet_iter() {
        dense[(i, j)] = *v;
    }
    let sym = (&dense + dense.transpose()) * 0.5;
    Ok((w, sym))
}

/// The `k` smallest generalized eigenvalues of Q on the compatible,
/// boundary-zero subspace, with eigenfields.
pub fn stability_spectrum(form: &VariationForm, num_slots: usize, k: usize, eig_rel: f64) -> Result<Spectrum> {
    let (w, reduced) = reduced_matrix(form)?;
    let r = reduced.nrows();
    let eig = reduced.symmetric_eigen();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let q_norm = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol_eig = eig_rel * q_norm;
    let take = k.min(r);
    let eigenvalues: Vec<f64> = order[..take].iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order[..take]
        .iter()
        .map(|&i| {
            let y = eig.eigenvectors.column(i);
            let mut x = vec![0.0; form.dofs()];
            for (row, xr) in x.iter_mut().enumerate() {
                let lane = w.row(row);
                *xr = lane.col_indices().iter().zip(lane.values()).map(|(&j, &v)| v * y[j]).sum();
            }
            form.slot_field(num_slots, &x)
        })
        .collect();
    let negative_count = eig.eigenvalues.iter().filter(|&&l| l < -tol_eig).count();
    let lambda1 = eigenvalues.first().copied().unwrap_or(0.0);
    Ok(Spectrum {
        stable: lambda1 >= -tol_eig,
        eigenvalues,
        eigenvectors,
        q_norm,
        tol_eig,
        dofs: form.dofs(),
        reduced_dim: r,
        negative_count,
    })
}
