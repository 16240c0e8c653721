use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::angles::check_equilibrium_angles;
use super::distance::intrinsic_distances;
use super::{MultiJunctionSurface, SurfacePoint};
use crate::complex::VertexKind;
use crate::error::{PlateauError, Result};
use crate::funcspace::{constraint_blocks, ScalarField};
use crate::tolerances;
use crate::variation::{cone_link_angles, cutoff_gradient_sq, loglog_slope, zeta, BernsteinRow, CutoffMode, StationarityReport};

/// The two test fields φⱼⁱ = cⱼⁱ ζ(ρ) with cⱼⁱ = Wⱼ·νⁱ constant per sheet.
#[derive(Clone, Debug, Serialize)]
pub struct PairedFields {
    /// Directed angle of W₁ from the normal of the reference sheet.
    pub w1_angle: f64,
    /// Grid angles tried after the requested one.
    pub retries: usize,
    pub reference_sheet: usize,
    /// Mean directed normal angle of each sheet from the reference sheet.
    pub sheet_angles: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub center_slot: usize,
    pub n: f64,
    #[serde(skip)]
    pub rho: Vec<f64>,
    #[serde(skip)]
    pub phi1: ScalarField,
    #[serde(skip)]
    pub phi2: ScalarField,
    /// Largest spread over sheets of (φ₁ⁱ)² + (φ₂ⁱ)² at a Γ vertex.
    pub identity_spread: f64,
    /// Largest least-squares residual of φⱼⁱ = W·νⁱ over Γ vertices.
    pub compat_residual: f64,
}

fn coefficients(alpha: f64, beta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let c1 = beta.iter().map(|b| (alpha - b).cos()).collect();
    let c2 = beta.iter().map(|b| (alpha + FRAC_PI_2 - b).cos()).collect();
    (c1, c2)
}

/// Build the paired fields about `p0`. W₁ starts at `w1_angle`; if some
/// cⱼⁱ vanishes, angles k·11.25° are tried in turn.
pub fn build_paired_test_fields(
    m: &MultiJunctionSurface,
    p0: SurfacePoint,
    n: f64,
    w1_angle: f64,
    tol_angle: f64,
) -> Result<PairedFields> {
    let c = m.complex();
    if c.junctions().len() != 1 {
        return Err(PlateauError::Structure(format!(
            "paired test fields need exactly one junction curve, found {}",
            c.junctions().len()
        )));
    }
    let eq = check_equilibrium_angles(m, tol_angle);
    if !eq.equilibrium {
        return Err(PlateauError::NoEquilibrium { deviation: eq.max_deviation, tol: tol_angle });
    }
    let patches = &c.junctions()[0].patches;
    let reference = patches[0];
    let mut beta = vec![0.0; c.patches().len()];
    for pair in eq.pairs.iter().filter(|p| p.i == reference) {
        beta[pair.j] = pair.mean;
    }

    let degenerate = |(c1, c2): &(Vec<f64>, Vec<f64>)| {
        patches.iter().any(|&p| c1[p].abs() < tolerances::ANGLE_EXACT || c2[p].abs() < tolerances::ANGLE_EXACT)
    };
    let mut alpha = w1_angle;
    let mut coeff = coefficients(alpha, &beta);
    let mut retries = 0;
    while degenerate(&coeff) {
        if retries == tolerances::W1_MAX_RETRIES {
            return Err(PlateauError::AngleDegeneracy { retries });
        }
        alpha = (retries as f64 * tolerances::W1_GRID_STEP_DEG).to_radians();
        coeff = coefficients(alpha, &beta);
        retries += 1;
    }
    let (c1, c2) = coeff;

    let center_slot = m.slot(p0)?;
    let rho = intrinsic_distances(m, p0)?;
    let mut phi1 = ScalarField::zeros(c);
    let mut phi2 = ScalarField::zeros(c);
    for (s, slot) in c.slots().iter().enumerate() {
        let z = zeta(rho[s], n);
        phi1.values[s] = c1[slot.patch] * z;
        phi2.values[s] = c2[slot.patch] * z;
    }

    let mut spread = 0.0f64;
    for &v in &c.junctions()[0].vertices {
        let sums: Vec<f64> = c.vertex_slots(v).map(|s| phi1.values[s].powi(2) + phi2.values[s].powi(2)).collect();
        let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
        spread = spread.max(hi - lo);
    }
    let blocks = constraint_blocks(c, &m.analysis().signs);
    let compat_residual = blocks
        .iter()
        .flat_map(|b| [&phi1, &phi2].map(|f| b.residual(&f.values)))
        .fold(0.0, f64::max);

    Ok(PairedFields {
        w1_angle: alpha,
        retries,
        reference_sheet: reference,
        sheet_angles: beta,
        c1,
        c2,
        center_slot,
        n,
        rho,
        phi1,
        phi2,
        identity_spread: spread,
        compat_residual,
    })
}

/// Largest |Σᵢ [(φ₁ⁱ)² + (φ₂ⁱ)²] 𝑯_Γ·τⁱ θⁱ| over Γ vertices, with the
/// largest single summand for scale.
pub fn curve_term_cancellation(m: &MultiJunctionSurface, f: &PairedFields) -> (f64, f64) {
    let c = m.complex();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for (ci, frames) in m.analysis().frames.curves.iter().enumerate() {
        let patches = &c.junctions()[ci].patches;
        for fr in frames {
            let mut total = 0.0;
            for (k, &p) in patches.iter().enumerate() {
                let s = c.slot_of(fr.vertex, p).expect("curve slot");
                let term = (f.phi1.values[s].powi(2) + f.phi2.values[s].powi(2))
                    * fr.curvature.dot(&fr.conormals[k])
                    * m.theta()[p];
                scale = scale.max(term.abs());
                total += term;
            }
            worst = worst.max(total.abs());
        }
    }
    (worst, scale)
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixBernsteinReport {
    pub mode: CutoffMode,
    pub center: [f64; 3],
    pub fields: PairedFields,
    /// [(c₁ⁱ)² + (c₂ⁱ)²] θⁱ per sheet.
    pub sheet_weights: Vec<f64>,
    pub link_angles: Option<Vec<f64>>,
    pub rows: Vec<BernsteinRow>,
    pub slope: f64,
    pub holds: bool,
    pub stationarity: StationarityReport,
}

/// Both sides of the weighted logarithmic-cutoff inequality evaluated with
/// the paired fields about `p0`.
pub fn appendix_bernstein_test(
    m: &MultiJunctionSurface,
    p0: SurfacePoint,
    ns: &[f64],
    mode: CutoffMode,
    w1_angle: f64,
    stat_rel: f64,
    tol_angle: f64,
) -> Result<AppendixBernsteinReport> {
    let c = m.complex();
    let stat = m.weighted_stationarity(stat_rel);
    if !stat.stationary {
        return Err(PlateauError::NotStationary { residual: stat.residual, tol: stat.tol });
    }
    let n0 = ns.first().copied().unwrap_or(1.0);
    let fields = build_paired_test_fields(m, p0, n0, w1_angle, tol_angle)?;
    let weights: Vec<f64> = (0..c.patches().len())
        .map(|p| (fields.c1[p].powi(2) + fields.c2[p].powi(2)) * m.theta()[p])
        .collect();
    let center = c.vertex(p0.vertex);
    let link = match mode {
        CutoffMode::AnalyticCone => Some(cone_link_angles(c, &center)?),
        CutoffMode::Mesh => None,
    };
    let reach = c
        .slots()
        .iter()
        .enumerate()
        .filter(|(_, s)| c.kind(s.vertex) == VertexKind::Boundary)
        .map(|(k, _)| fields.rho[k])
        .fold(f64::INFINITY, f64::min);

    let an = m.analysis();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let row = match &link {
            Some(angles) => {
                let rhs: f64 = weights.iter().zip(angles).map(|(w, a)| w * a).sum::<f64>() / n;
                BernsteinRow { n, lhs: 0.0, rhs, rhs_times_n: rhs * n, curve_term: 0.0 }
            }
            None => {
                if n.exp() > reach {
                    return Err(PlateauError::Extent { radius: n.exp(), reach });
                }
                let (mut area, mut rhs) = (0.0, 0.0);
                for (s, slot) in c.slots().iter().enumerate() {
                    let w = weights[slot.patch] * an.curvature.mass[s];
                    if fields.rho[s] <= 1.0 {
                        area += w * an.curvature.a2[s];
                    }
                    rhs += w * cutoff_gradient_sq(fields.rho[s], n);
                }
                let mut curve = 0.0;
                for (ci, frames) in an.frames.curves.iter().enumerate() {
                    for f in frames {
                        for (k, &p) in c.junctions()[ci].patches.iter().enumerate() {
                            let s = c.slot_of(f.vertex, p).expect("curve slot");
                            let z = zeta(fields.rho[s], n);
                            curve += weights[p] * z * z * f.weight * f.curvature.dot(&f.conormals[k]);
                        }
                    }
                }
                BernsteinRow { n, lhs: area + curve, rhs, rhs_times_n: rhs * n, curve_term: curve }
            }
        };
        rows.push(row);
    }
    let slope = loglog_slope(
        &rows.iter().map(|r| r.n).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.rhs).collect::<Vec<_>>(),
    );
    let holds = rows.iter().all(|r| r.lhs <= r.rhs + 1e-12 * r.rhs.abs().max(1.0));
    Ok(AppendixBernsteinReport {
        mode,
        center: [center.x, center.y, center.z],
        fields,
        sheet_weights: weights,
        link_angles: link,
        rows,
        slope,
        holds,
        stationarity: stat,
    })
}
