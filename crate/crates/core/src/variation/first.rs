use serde::Serialize;

use super::form::Analysis;
use crate::complex::{PlateauComplex, VertexKind};
use crate::funcspace::VectorField;
use crate::geometry::slot_normals;

/// −Σ_Λ ∫ H_Λ φ + Σ_L Σᵢ ∫ τⁱ·V with φ = V·ν, by slot masses and trapezoid
/// weights along junction curves.
pub fn first_variation(c: &PlateauComplex, an: &Analysis, v: &VectorField) -> f64 {
    let normals = slot_normals(c);
    let mut total = 0.0;
    for (s, slot) in c.slots().iter().enumerate() {
        let phi = v.vectors[slot.vertex].dot(&normals[s]);
        total -= an.curvature.mean[s] * phi * an.curvature.mass[s];
    }
    for frames in &an.frames.curves {
        for f in frames {
            total += f.weight * f.conormal_sum().dot(&v.vectors[f.vertex]);
        }
    }
    total
}

/// Bound on |δA(V)| per unit sup-norm of V: ∫|H| + ∫_L ‖Στⁱ‖, restricted to
/// vertices off the truncation boundary.
#[derive(Clone, Debug, Serialize)]
pub struct StationarityReport {
    pub mean_curvature_integral: f64,
    pub junction_integral: f64,
    pub residual: f64,
    pub max_abs_mean: f64,
    pub max_conormal_sum: f64,
    pub tol: f64,
    pub stationary: bool,
}

pub fn stationarity(c: &PlateauComplex, an: &Analysis, stat_rel: f64) -> StationarityReport {
    let mut mean_int = 0.0;
    let mut max_h = 0.0f64;
    for (s, slot) in c.slots().iter().enumerate() {
        if c.kind(slot.vertex) == VertexKind::Boundary {
            continue;
        }
        let h = an.curvature.mean[s].abs();
        mean_int += h * an.curvature.mass[s];
        if an.curvature.fitted[s] {
            max_h = max_h.max(h);
        }
    }
    let mut junction_int = 0.0;
    let mut max_tau = 0.0f64;
    for frames in &an.frames.curves {
        for f in frames {
            if c.kind(f.vertex) == VertexKind::Boundary {
                continue;
            }
            let r = f.conormal_sum().norm();
            junction_int += f.weight * r;
            max_tau = max_tau.max(r);
        }
    }
    let residual = mean_int + junction_int;
    let tol = stat_rel * c.total_area();
    StationarityReport {
        mean_curvature_integral: mean_int,
        junction_integral: junction_int,
        residual,
        max_abs_mean: max_h,
        max_conormal_sum: max_tau,
        tol,
        stationary: residual <= tol,
    }
}
