use std::f64::consts::TAU;

use serde::Serialize;

use super::first::{stationarity, StationarityReport};
use super::form::Analysis;
use crate::complex::{complement_regions, ComplementRegions, PlateauComplex, RegionOptions, Vec3, VertexKind};
use crate::error::{PlateauError, Result};

/// ζ(ρ) = 1 on ρ ≤ 1, 1 − log ρ / n on 1 < ρ < eⁿ, 0 beyond.
pub fn zeta(rho: f64, n: f64) -> f64 {
    if rho <= 1.0 {
        1.0
    } else if rho.ln() >= n {
        0.0
    } else {
        1.0 - rho.ln() / n
    }
}

/// |∇ζ|² bound 1/(n²ρ²) on the annulus 1 < ρ < eⁿ, zero elsewhere.
pub fn cutoff_gradient_sq(rho: f64, n: f64) -> f64 {
    if rho > 1.0 && rho.ln() < n {
        1.0 / (n * n * rho * rho)
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CutoffMode {
    /// Evaluate on the mesh; the mesh must reach radius eⁿ.
    Mesh,
    /// Integrate radially over the exact cone; no reach requirement.
    AnalyticCone,
}

#[derive(Clone, Debug)]
pub struct CutoffField {
    pub center: Vec3,
    pub n: f64,
    /// ζ at every vertex.
    pub values: Vec<f64>,
}

/// Distance from `center` to the truncation boundary (∞ without boundary).
pub fn mesh_reach(c: &PlateauComplex, center: &Vec3) -> f64 {
    (0..c.vertices().len())
        .filter(|&v| c.kind(v) == VertexKind::Boundary)
        .map(|v| (c.vertex(v) - center).norm())
        .fold(f64::INFINITY, f64::min)
}

pub fn log_cutoff(c: &PlateauComplex, center: Vec3, n: f64, mode: CutoffMode) -> Result<CutoffField> {
    if mode == CutoffMode::Mesh {
        let reach = mesh_reach(c, &center);
        let radius = n.exp();
        if radius > reach {
            return Err(PlateauError::Extent { radius, reach });
        }
    }
    let values = c.vertices().iter().map(|p| zeta((p - center).norm(), n)).collect();
    Ok(CutoffField { center, n, values })
}

/// Angular measure of each patch of an exact cone seen from its apex.
/// Fails unless every patch is a planar sector through `apex`.
pub fn cone_link_angles(c: &PlateauComplex, apex: &Vec3) -> Result<Vec<f64>> {
    let scale = c.bbox_diameter().max(1.0);
    let tol = 1e-9 * scale;
    let not_cone = |why: String| PlateauError::Structure(format!("not an exact cone with apex {apex:?}: {why}"));
    let mut intervals: Vec<Vec<(f64, f64)>> = vec![Vec::new(); c.patches().len()];
    let mut frames: Vec<Option<(Vec3, Vec3, Vec3)>> = vec![None; c.patches().len()];
    for (t, tv) in c.triangles().iter().enumerate() {
        let p = c.triangle_patch(t);
        let nt = c.face_cross(t).normalize();
        let (e1, e2, n) = *frames[p].get_or_insert_with(|| {
            let (a, b) = crate::funcspace::normal_plane(&nt);
            (a, b, nt)
        });
        if n.cross(&nt).norm() > 1e-9 {
            return Err(not_cone(format!("patch {} is not planar", c.patches()[p].label)));
        }
        let x: Vec<Vec3> = tv.iter().map(|&v| c.vertex(v) - apex).collect();
        if x.iter().any(|d| d.dot(&n).abs() > tol) {
            return Err(not_cone(format!("plane of patch {} misses the apex", c.patches()[p].label)));
        }
        let q: Vec<[f64; 2]> = x.iter().map(|d| [d.dot(&e1), d.dot(&e2)]).collect();
        intervals[p].push(triangle_arc(&q, tol));
    }
    Ok(intervals.into_iter().map(union_length).collect())
}

fn wrap(a: f64) -> f64 {
    let mut x = a % TAU;
    if x > std::f64::consts::PI {
        x -= TAU;
    } else if x <= -std::f64::consts::PI {
        x += TAU;
    }
    x
}

/// Arc [start, start + len] of directions from the origin covered by a
/// planar triangle.
fn triangle_arc(q: &[[f64; 2]], tol: f64) -> (f64, f64) {
    let orient = |a: [f64; 2], b: [f64; 2], p: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let o = [0.0, 0.0];
    let d: Vec<f64> = (0..3).map(|k| orient(q[k], q[(k + 1) % 3], o)).collect();
    let area2 = orient(q[0], q[1], q[2]);
    let s = area2.signum();
    let near = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt() <= tol;
    if q.iter().all(|v| !near(*v)) && d.iter().all(|x| x * s > 0.0) {
        return (0.0, TAU);
    }
    let pts: Vec<[f64; 2]> = q.iter().copied().filter(|v| !near(*v)).collect();
    let ang: Vec<f64> = pts.iter().map(|v| v[1].atan2(v[0])).collect();
    // Apex on an edge (not a vertex): a closed half-plane toward the third corner.
    if pts.len() == 3 {
        for k in 0..3 {
            let (a, b) = (q[k], q[(k + 1) % 3]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            if d[k].abs() <= tol * len && a[0] * b[0] + a[1] * b[1] < 0.0 {
                let third = ang[(k + 2) % 3];
                let start = if wrap(third - ang[k]) > 0.0 { ang[k] } else { ang[(k + 1) % 3] };
                return (start, std::f64::consts::PI);
            }
        }
    }
    let base = ang[0];
    let rel: Vec<f64> = ang.iter().map(|a| wrap(a - base)).collect();
    let lo = rel.iter().copied().fold(0.0, f64::min);
    let hi = rel.iter().copied().fold(0.0, f64::max);
    (base + lo, hi - lo)
}

fn union_length(arcs: Vec<(f64, f64)>) -> f64 {
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for (start, len) in arcs {
        if len >= TAU {
            return TAU;
        }
        let s = start.rem_euclid(TAU);
        let e = s + len;
        if e > TAU {
            pieces.push((s, TAU));
            pieces.push((0.0, e - TAU));
        } else {
            pieces.push((s, e));
        }
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (s, e) in pieces {
        match cur {
            Some((cs, ce)) if s <= ce + 1e-12 => cur = Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                total += ce - cs;
                cur = Some((s, e));
            }
            None => cur = Some((s, e)),
        }
    }
    if let Some((cs, ce)) = cur {
        total += ce - cs;
    }
    total.min(TAU)
}

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinRow {
    pub n: f64,
    /// ½Σⱼ[Σ_Λ∫_{B₁}|A|²(fʲ)² + Σ_L Σᵢ∫ζ²(fʲᵢ)² 𝑯·τⁱ].
    pub lhs: f64,
    /// ½Σⱼ Σ_Λ ∫(fʲ)²(n²ρ²)⁻¹ over the annulus 1 < ρ < eⁿ.
    pub rhs: f64,
    pub rhs_times_n: f64,
    /// The junction part of `lhs` alone.
    pub curve_term: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinReport {
    pub mode: CutoffMode,
    pub center: [f64; 3],
    pub regions: usize,
    /// Σⱼ(fʲ_Λ)² per patch.
    pub multiplicity: Vec<u32>,
    /// Per-patch link angle (analytic mode).
    pub link_angles: Option<Vec<f64>>,
    /// ½ΣΛ multiplicity·angle (analytic mode).
    pub link_length: Option<f64>,
    pub rows: Vec<BernsteinRow>,
    /// Least-squares slope of log rhs against log n.
    pub slope: f64,
    pub holds: bool,
    pub stationarity: StationarityReport,
}

fn multiplicities(c: &PlateauComplex, regions: &ComplementRegions) -> Vec<u32> {
    (0..c.patches().len())
        .map(|p| (0..regions.count).map(|j| (regions.facing(p, j) as i32).pow(2) as u32).sum())
        .collect()
}

pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(_, &y)| y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Evaluate both sides of the logarithmic-cutoff inequality with test
/// fields fʲζ over all complement regions j.
pub fn bernstein_test(
    c: &PlateauComplex,
    an: &Analysis,
    center: Vec3,
    ns: &[f64],
    mode: CutoffMode,
    stat_rel: f64,
) -> Result<BernsteinReport> {
    let stat = stationarity(c, an, stat_rel);
    let link = match mode {
        CutoffMode::AnalyticCone => Some(cone_link_angles(c, &center)?),
        CutoffMode::Mesh => {
            if !stat.stationary {
                return Err(PlateauError::NotStationary { residual: stat.residual, tol: stat.tol });
            }
            None
        }
    };
    let regions = complement_regions(c, &RegionOptions::default())?;
    let mult = multiplicities(c, &regions);
    let half: Vec<f64> = mult.iter().map(|&m| 0.5 * f64::from(m)).collect();
    let link_length = link.as_ref().map(|a| a.iter().zip(&half).map(|(a, h)| a * h).sum::<f64>());

    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let (lhs_area, rhs, curve_term) = match mode {
            CutoffMode::AnalyticCone => {
                // Planar sectors: |A| = 0 and straight junction rays, so the
                // left side vanishes; ∫_{1}^{eⁿ}(n²ρ²)⁻¹ρ dρ = n/n².
                (0.0, link_length.expect("analytic link") * n / (n * n), 0.0)
            }
            CutoffMode::Mesh => {
                let reach = mesh_reach(c, &center);
                if n.exp() > reach {
                    return Err(PlateauError::Extent { radius: n.exp(), reach });
                }
                let mut area = 0.0;
                let mut rhs = 0.0;
                for (s, slot) in c.slots().iter().enumerate() {
                    let rho = (c.vertex(slot.vertex) - center).norm();
                    let w = half[slot.patch] * an.curvature.mass[s];
                    if rho <= 1.0 {
                        area += w * an.curvature.a2[s];
                    }
                    rhs += w * cutoff_gradient_sq(rho, n);
                }
                let mut curve = 0.0;
                for (ci, frames) in an.frames.curves.iter().enumerate() {
                    for f in frames {
                        let z = zeta((c.vertex(f.vertex) - center).norm(), n);
                        for (i, &p) in c.junctions()[ci].patches.iter().enumerate() {
                            curve += half[p] * z * z * f.weight * f.curvature.dot(&f.conormals[i]);
                        }
                    }
                }
                (area, rhs, curve)
            }
        };
        rows.push(BernsteinRow { n, lhs: lhs_area + curve_term, rhs, rhs_times_n: rhs * n, curve_term });
    }
    let slope = loglog_slope(
        &rows.iter().map(|r| r.n).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.rhs).collect::<Vec<_>>(),
    );
    let holds = rows.iter().all(|r| r.lhs <= r.rhs + 1e-12 * r.rhs.abs().max(1.0));
    Ok(BernsteinReport {
        mode,
        center: [center.x, center.y, center.z],
        regions: regions.count,
        multiplicity: mult,
        link_angles: link,
        link_length,
        rows,
        slope,
        holds,
        stationarity: stat,
    })
}
