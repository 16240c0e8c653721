use serde::Serialize;

use super::first::stationarity;
use super::form::Analysis;
use crate::complex::{PlateauComplex, Vec3, VertexKind};
use crate::error::{PlateauError, Result};
use crate::geometry::curve_tangents;
use crate::tolerances;

/// Gradient of the total area with respect to every vertex position.
pub fn area_gradient(c: &PlateauComplex, positions: &[Vec3]) -> Vec<Vec3> {
    let mut g = vec![Vec3::zeros(); positions.len()];
    for tv in c.triangles() {
        let x = [positions[tv[0]], positions[tv[1]], positions[tv[2]]];
        let n = (x[1] - x[0]).cross(&(x[2] - x[0]));
        let len = n.norm();
        if len == 0.0 {
            continue;
        }
        let nhat = n / len;
        for k in 0..3 {
            g[tv[k]] += nhat.cross(&(x[(k + 2) % 3] - x[(k + 1) % 3])) * 0.5;
        }
    }
    g
}

fn total_area(c: &PlateauComplex, positions: &[Vec3]) -> f64 {
    c.triangles()
        .iter()
        .map(|tv| 0.5 * (positions[tv[1]] - positions[tv[0]]).cross(&(positions[tv[2]] - positions[tv[0]])).norm())
        .sum()
}

/// Junction and curvature diagnostics of a complex, off the truncation
/// boundary.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeDiagnostics {
    pub area: f64,
    pub max_abs_mean: f64,
    pub max_conormal_sum: f64,
    /// Largest |angle(τⁱ, τʲ) − 120°| in degrees over three-sheet junction vertices.
    pub max_angle_deviation_deg: f64,
}

pub fn shape_diagnostics(c: &PlateauComplex) -> Result<ShapeDiagnostics> {
    let an = Analysis::new(c)?;
    let stat = stationarity(c, &an, tolerances::STAT_REL);
    let mut dev = 0.0f64;
    for frames in &an.frames.curves {
        for f in frames {
            if c.kind(f.vertex) != VertexKind::Junction || f.conormals.len() != 3 {
                continue;
            }
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let ang = f.conormals[i].dot(&f.conormals[j]).clamp(-1.0, 1.0).acos().to_degrees();
                    dev = dev.max((ang - 120.0).abs());
                }
            }
        }
    }
    Ok(ShapeDiagnostics {
        area: c.total_area(),
        max_abs_mean: stat.max_abs_mean,
        max_conormal_sum: stat.max_conormal_sum,
        max_angle_deviation_deg: dev,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelaxReport {
    pub steps: usize,
    pub dt: f64,
    pub initial: ShapeDiagnostics,
    #[serde(rename = "final")]
    pub last: ShapeDiagnostics,
    /// Largest vertex displacement in the last step.
    pub last_step_motion: f64,
    pub area_history: Vec<f64>,
}

/// A step size inside the explicit stability range, 0.05·(shortest edge)².
pub fn suggested_dt(c: &PlateauComplex) -> f64 {
    let min_edge = c
        .edges()
        .map(|(&(a, b), _)| (c.vertex(a) - c.vertex(b)).norm())
        .fold(f64::INFINITY, f64::min);
    0.05 * min_edge * min_edge
}

/// Area descent: velocity −∇A / (lumped vertex area). Patch-interior
/// vertices move along their normal, junction vertices orthogonally to the
/// curve, T-points freely; truncation-boundary vertices stay fixed. Fails
/// once the area exceeds its initial value or rises for too many
/// consecutive steps.
pub fn relax_to_minimal(c: &PlateauComplex, steps: usize, dt: f64) -> Result<(PlateauComplex, RelaxReport)> {
    let initial = shape_diagnostics(c)?;
    let mut cur = c.clone();
    let mut pos: Vec<Vec3> = c.vertices().to_vec();
    let mut area = total_area(c, &pos);
    let mut history = vec![area];
    let mut increases = 0;
    let mut last_motion = 0.0;
    let mut junction_of = vec![None; pos.len()];
    for (ci, curve) in c.junctions().iter().enumerate() {
        for (k, &v) in curve.vertices.iter().enumerate() {
            junction_of[v] = Some((ci, k));
        }
    }
    let ceiling = area * (1.0 + 1e-6);
    for step in 1..=steps {
        let g = area_gradient(c, &pos);
        let mut mass = vec![0.0; pos.len()];
        for tv in c.triangles() {
            let a = 0.5 * (pos[tv[1]] - pos[tv[0]]).cross(&(pos[tv[2]] - pos[tv[0]])).norm();
            for &v in tv {
                mass[v] += a / 3.0;
            }
        }
        let tangents: Vec<Vec<Vec3>> = (0..c.junctions().len()).map(|ci| curve_tangents(&cur, ci)).collect();
        let mut motion = 0.0f64;
        let mut next = pos.clone();
        for v in 0..pos.len() {
            let mut u = -g[v] / mass[v];
            match c.kind(v) {
                VertexKind::Boundary => continue,
                VertexKind::Interior => {
                    let p = c.slots()[c.vertex_slots(v).start].patch;
                    let n = cur.fan_normal(v, p);
                    u = n * u.dot(&n);
                }
                VertexKind::Junction => {
                    let (ci, k) = junction_of[v].expect("junction vertex lies on a curve");
                    let t = tangents[ci][k];
                    u -= t * u.dot(&t);
                }
                VertexKind::TPoint => {}
            }
            next[v] = pos[v] + u * dt;
            motion = motion.max((u * dt).norm());
        }
        let new_area = total_area(c, &next);
        if !new_area.is_finite() || new_area > ceiling {
            return Err(PlateauError::StepDivergence(step));
        }
        if new_area > area {
            increases += 1;
            if increases >= tolerances::DIVERGENCE_STEPS {
                return Err(PlateauError::StepDivergence(step));
            }
        } else {
            increases = 0;
        }
        pos = next;
        area = new_area;
        history.push(area);
        last_motion = motion;
        cur = c.with_vertices(pos.clone());
    }
    let last = shape_diagnostics(&cur)?;
    Ok((cur, RelaxReport { steps, dt, initial, last, last_step_motion: last_motion, area_history: history }))
}
