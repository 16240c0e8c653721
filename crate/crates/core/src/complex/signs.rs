use super::{PlateauComplex, Vec3};
use crate::error::{PlateauError, Result};

/// Signs at a T-point in local curve indices: `sign[i][j]` is the sign of the
/// patch bounded by curves `i` and `j`, taken on curve `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPointSigns {
    pub sign: [[i8; 4]; 4],
}

#[derive(Clone, Debug)]
pub struct SignAssignment {
    /// Per junction curve, one sign per incident patch (aligned with
    /// `JunctionCurve::patches`).
    pub curve_signs: Vec<Vec<i8>>,
    pub t_signs: Vec<TPointSigns>,
    /// Per junction curve and curve vertex, `|Σ sign·ν|` with fan normals.
    pub residuals: Vec<Vec<f64>>,
    pub max_residual: f64,
}

impl SignAssignment {
    pub fn sign(&self, curve: usize, local_patch: usize) -> i8 {
        self.curve_signs[curve][local_patch]
    }

    /// Sign of a global patch on a curve, if the patch is incident to it.
    pub fn sign_of_patch(&self, c: &PlateauComplex, curve: usize, patch: usize) -> Option<i8> {
        c.junctions()[curve].position_of(patch).map(|i| self.curve_signs[curve][i])
    }
}

/// Sign of each incident patch along each junction curve: +1 where a patch
/// triangle traverses the curve edge in the curve's direction (its induced
/// boundary orientation agrees), -1 otherwise.
pub fn assign_signs(c: &PlateauComplex) -> Result<SignAssignment> {
    let mut curve_signs = Vec::with_capacity(c.junctions().len());
    let mut residuals = Vec::with_capacity(c.junctions().len());
    let mut max_residual = 0.0f64;
    for (ci, curve) in c.junctions().iter().enumerate() {
        let mut signs: Vec<Option<i8>> = vec![None; curve.patches.len()];
        for (a, b) in curve.edges() {
            for &t in c.edge_triangles(a, b) {
                let p = c.triangle_patch(t);
                let Some(i) = curve.position_of(p) else { continue };
                let tv = c.triangles()[t];
                let forward = (0..3).any(|k| tv[k] == a && tv[(k + 1) % 3] == b);
                let s = if forward { 1 } else { -1 };
                match signs[i] {
                    None => signs[i] = Some(s),
                    Some(prev) if prev != s => {
                        return Err(PlateauError::Orientability(format!(
                            "sign of patch {} flips along junction curve {ci}",
                            c.patches()[p].label
                        )))
                    }
                    _ => {}
                }
            }
        }
        let signs: Vec<i8> = signs.into_iter().map(|s| s.expect("every curve patch touches the curve")).collect();
        let res: Vec<f64> = curve
            .vertices
            .iter()
            .map(|&v| {
                let sum: Vec3 = curve
                    .patches
                    .iter()
                    .zip(&signs)
                    .map(|(&p, &s)| c.fan_normal(v, p) * f64::from(s))
                    .sum();
                sum.norm()
            })
            .collect();
        max_residual = res.iter().copied().fold(max_residual, f64::max);
        curve_signs.push(signs);
        residuals.push(res);
    }
    let t_signs = c
        .t_points()
        .iter()
        .map(|tp| {
            let mut sign = [[0i8; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        let curve = tp.curves[j];
                        let patch = tp.pair_patch[i][j];
                        let local = c.junctions()[curve].position_of(patch).expect("pair patch lies on the curve");
                        sign[i][j] = curve_signs[curve][local];
                    }
                }
            }
            TPointSigns { sign }
        })
        .collect();
    Ok(SignAssignment { curve_signs, t_signs, residuals, max_residual })
}
