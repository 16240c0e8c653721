use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{PlateauComplex, Vec3};
use crate::tolerances;

/// Closest point of triangle `abc` to `p` (Ericson, Real-Time Collision
/// Detection, 5.1.5).
fn closest_point(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

fn tri_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Area of the polygon cut from a small triangle by the ball, with the
/// sphere replaced by chords between edge crossings.
fn chord_clip(p: [Vec3; 3], center: &Vec3, r: f64) -> f64 {
    let inside = |q: &Vec3| (q - center).norm_squared() <= r * r;
    let mut poly: Vec<Vec3> = Vec::with_capacity(5);
    for k in 0..3 {
        let (a, b) = (p[k], p[(k + 1) % 3]);
        let (ia, ib) = (inside(&a), inside(&b));
        if ia {
            poly.push(a);
        }
        if ia != ib {
            // |a + t(b−a) − center|² = r²
            let d = b - a;
            let f = a - center;
            let (qa, qb, qc) = (d.dot(&d), 2.0 * f.dot(&d), f.dot(&f) - r * r);
            let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
            let t1 = (-qb - disc) / (2.0 * qa);
            let t2 = (-qb + disc) / (2.0 * qa);
            // Leaving the ball takes the larger root, entering the smaller.
            let t = if ia { t2 } else { t1 }.clamp(0.0, 1.0);
            poly.push(a + d * t);
        }
    }
    if poly.len() < 3 {
        return 0.0;
    }
    let mut sum = Vec3::zeros();
    for k in 1..poly.len() - 1 {
        sum += (poly[k] - poly[0]).cross(&(poly[k + 1] - poly[0]));
    }
    0.5 * sum.norm()
}

fn clipped_area(p: [Vec3; 3], center: &Vec3, r: f64, depth: u32) -> f64 {
    let r2 = r * r;
    if p.iter().all(|q| (q - center).norm_squared() <= r2) {
        return tri_area(&p[0], &p[1], &p[2]);
    }
    if (closest_point(center, &p[0], &p[1], &p[2]) - center).norm_squared() >= r2 {
        return 0.0;
    }
    if depth == 0 {
        return chord_clip(p, center, r);
    }
    let m01 = (p[0] + p[1]) * 0.5;
    let m12 = (p[1] + p[2]) * 0.5;
    let m20 = (p[2] + p[0]) * 0.5;
    [[p[0], m01, m20], [m01, p[1], m12], [m20, m12, p[2]], [m01, m12, m20]]
        .into_iter()
        .map(|q| clipped_area(q, center, r, depth - 1))
        .sum()
}

/// Area of the complex inside the closed ball `B_r(center)`.
pub fn area_in_ball(c: &PlateauComplex, center: &Vec3, r: f64) -> f64 {
    assert!(r > 0.0, "radius must be positive");
    let parts: Vec<f64> = c
        .triangles()
        .par_iter()
        .map(|t| clipped_area([c.vertex(t[0]), c.vertex(t[1]), c.vertex(t[2])], center, r, tolerances::CLIP_DEPTH))
        .collect();
    parts.iter().sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaGrowth {
    pub radii: Vec<f64>,
    pub areas: Vec<f64>,
    /// max area/r² over the probed radii.
    pub c_fit: f64,
}

pub fn area_growth_constant(c: &PlateauComplex, center: &Vec3, radii: &[f64]) -> AreaGrowth {
    let areas: Vec<f64> = radii.iter().map(|&r| area_in_ball(c, center, r)).collect();
    let c_fit = areas.iter().zip(radii).map(|(a, r)| a / (r * r)).fold(0.0, f64::max);
    AreaGrowth { radii: radii.to_vec(), areas, c_fit }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closest_point_regions() {
        let (a, b, c) = (Vec3::zeros(), Vec3::x(), Vec3::y());
        let inner = closest_point(&Vec3::new(0.2, 0.2, 1.0), &a, &b, &c);
        assert!((inner - Vec3::new(0.2, 0.2, 0.0)).norm() < 1e-15);
        assert_eq!(closest_point(&Vec3::new(-1.0, -1.0, 0.0), &a, &b, &c), a);
        let e = closest_point(&Vec3::new(1.0, 1.0, 0.0), &a, &b, &c);
        assert!((e - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn quarter_disk_from_a_big_triangle() {
        // Right triangle with legs 2 contains the quarter disk of radius 1 at its right-angle corner.
        let p = [Vec3::zeros(), Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0)];
        let area = clipped_area(p, &Vec3::zeros(), 1.0, 6);
        assert!((area - std::f64::consts::FRAC_PI_4).abs() < 1e-3, "{area}");
    }
}
