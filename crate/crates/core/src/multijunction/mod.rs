//! Weighted multiple-junction surfaces: sheets with densities θⁱ sharing one
//! boundary curve Γ.

mod angles;
mod distance;
mod io;
mod paired;

pub use angles::{check_equilibrium_angles, directed_angle, EquilibriumReport, PairAngles};
pub use distance::{intrinsic_distance, intrinsic_distances};
pub use io::{load_multi, MultiFile, SheetRecord};
pub use paired::{
    appendix_bernstein_test, build_paired_test_fields, curve_term_cancellation, AppendixBernsteinReport, PairedFields,
};

use crate::complex::{JunctionMode, PlateauComplex, VertexKind};
use crate::error::{PlateauError, Result};
use crate::variation::{assemble_second_variation, Analysis, FormOptions, StationarityReport, VariationForm};

/// A point of the surface: a mesh vertex taken on one sheet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfacePoint {
    pub sheet: usize,
    pub vertex: usize,
}

/// Sheets, densities and the geometric analysis of a multiple-junction
/// surface.
#[derive(Clone, Debug)]
pub struct MultiJunctionSurface {
    complex: PlateauComplex,
    theta: Vec<f64>,
    analysis: Analysis,
}

impl MultiJunctionSurface {
    /// Wraps any complex whose patches carry the given densities. Plateau
    /// complexes are accepted so that θ ≡ 1 surfaces can be compared with
    /// their unweighted counterparts.
    pub fn new(complex: PlateauComplex, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != complex.patches().len() {
            return Err(PlateauError::Structure(format!(
                "{} densities for {} sheets",
                theta.len(),
                complex.patches().len()
            )));
        }
        if let Some(bad) = theta.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(PlateauError::Parse(format!("density {bad} is not positive")));
        }
        let analysis = Analysis::new(&complex)?;
        Ok(MultiJunctionSurface { complex, theta, analysis })
    }

    pub fn from_file(file: MultiFile) -> Result<Self> {
        let (c, theta) = file.into_complex()?;
        Self::new(c, theta)
    }

    pub fn complex(&self) -> &PlateauComplex {
        &self.complex
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn analysis(&self) -> &Analysis {
        &self.analysis
    }

    pub fn is_multi(&self) -> bool {
        self.complex.mode() == JunctionMode::Multi
    }

    /// Slot of a surface point.
    pub fn slot(&self, p: SurfacePoint) -> Result<usize> {
        if p.sheet >= self.complex.patches().len() || p.vertex >= self.complex.vertices().len() {
            return Err(PlateauError::Structure(format!("surface point {p:?} is out of range")));
        }
        self.complex
            .slot_of(p.vertex, p.sheet)
            .ok_or_else(|| PlateauError::Structure(format!("vertex {} does not lie on sheet {}", p.vertex, p.sheet)))
    }

    /// ∫|H|θ + ∫_Γ ‖Σ θⁱτⁱ‖ off the truncation boundary, against
    /// `stat_rel` times the weighted area.
    pub fn weighted_stationarity(&self, stat_rel: f64) -> StationarityReport {
        let c = &self.complex;
        let an = &self.analysis;
        let mut mean_int = 0.0;
        let mut max_h = 0.0f64;
        for (s, slot) in c.slots().iter().enumerate() {
            if c.kind(slot.vertex) == VertexKind::Boundary {
                continue;
            }
            let h = an.curvature.mean[s].abs();
            mean_int += self.theta[slot.patch] * h * an.curvature.mass[s];
            if an.curvature.fitted[s] {
                max_h = max_h.max(h);
            }
        }
        let mut junction_int = 0.0;
        let mut max_tau = 0.0f64;
        for (ci, frames) in an.frames.curves.iter().enumerate() {
            let patches = &c.junctions()[ci].patches;
            for f in frames {
                if c.kind(f.vertex) == VertexKind::Boundary {
                    continue;
                }
                let sum: crate::Vec3 = f.conormals.iter().zip(patches).map(|(t, &p)| t * self.theta[p]).sum();
                junction_int += f.weight * sum.norm();
                max_tau = max_tau.max(sum.norm());
            }
        }
        let weighted_area: f64 =
            (0..c.triangles().len()).map(|t| self.theta[c.triangle_patch(t)] * c.triangle_area(t)).sum();
        let residual = mean_int + junction_int;
        let tol = stat_rel * weighted_area;
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
}

/// Second variation with every term weighted by the sheet density. On a
/// multiple-junction complex the compatibility blocks are the W-field
/// conditions along Γ.
pub fn weighted_stability_form(m: &MultiJunctionSurface) -> VariationForm {
    let opts = FormOptions { weights: Some(m.theta.clone()), a2_override: None };
    assemble_second_variation(&m.complex, &m.analysis, &opts)
}
