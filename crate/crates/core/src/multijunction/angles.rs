use std::f64::consts::PI;

use serde::Serialize;

use super::MultiJunctionSurface;
use crate::complex::Vec3;

/// Angle from `a` to `b` in the plane normal to `t`, counterclockwise about
/// `t`, in (−π, π].
pub fn directed_angle(a: &Vec3, b: &Vec3, t: &Vec3) -> f64 {
    t.dot(&a.cross(b)).atan2(a.dot(b))
}

fn unwrap_to(prev: f64, raw: f64) -> f64 {
    let d = (raw - prev + PI).rem_euclid(2.0 * PI) - PI;
    prev + d
}

/// Directed angles from sheet `i` to sheet `j` along Γ.
#[derive(Clone, Debug, Serialize)]
pub struct PairAngles {
    pub i: usize,
    pub j: usize,
    /// One sample per Γ vertex, unwrapped along the curve.
    pub samples: Vec<f64>,
    pub mean: f64,
    /// max − min of the samples.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumReport {
    pub pairs: Vec<PairAngles>,
    pub max_deviation: f64,
    pub tol: f64,
    pub equilibrium: bool,
    /// The same measurement for the conormals τⁱ (diagnostic only).
    pub conormal_pairs: Vec<PairAngles>,
}

fn pair_angles(m: &MultiJunctionSurface, pick: impl Fn(&crate::geometry::JunctionVertexFrame, usize) -> Vec3) -> Vec<PairAngles> {
    let c = m.complex();
    let mut out = Vec::new();
    for (ci, frames) in m.analysis().frames.curves.iter().enumerate() {
        let patches = &c.junctions()[ci].patches;
        for a in 0..patches.len() {
            for b in (a + 1)..patches.len() {
                let mut samples: Vec<f64> = Vec::with_capacity(frames.len());
                for f in frames {
                    let raw = directed_angle(&pick(f, a), &pick(f, b), &f.tangent);
                    samples.push(match samples.last() {
                        Some(&prev) => unwrap_to(prev, raw),
                        None => raw,
                    });
                }
                let mean = samples.iter().sum::<f64>() / samples.len().max(1) as f64;
                let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                out.push(PairAngles { i: patches[a], j: patches[b], samples, mean, deviation: (hi - lo).max(0.0) });
            }
        }
    }
    out
}

/// Pairwise directed normal angles along Γ, oriented by the curve direction.
pub fn check_equilibrium_angles(m: &MultiJunctionSurface, tol_angle: f64) -> EquilibriumReport {
    let pairs = pair_angles(m, |f, k| f.normals[k]);
    let conormal_pairs = pair_angles(m, |f, k| f.conormals[k]);
    let max_deviation = pairs.iter().map(|p| p.deviation).fold(0.0, f64::max);
    EquilibriumReport { equilibrium: max_deviation <= tol_angle, pairs, max_deviation, tol: tol_angle, conormal_pairs }
}
