mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::{Rotation3, Unit, Vector3};
use plateau::complex::{MeshFile, TriangleRecord};
use plateau::geometry::*;
use plateau::golden;
use plateau::{PlateauComplex, PlateauError, Vec3};

fn t_cone_area_at_one() -> f64 {
    // Six sectors, each with opening angle arccos(−1/3), area angle·r²/2.
    6.0 * (-1.0f64 / 3.0).acos() / 2.0
}

#[test]
fn ball_areas_of_cones() {
    let o = Vec3::zeros();
    let y = golden("y-cone", 0.05);
    let a = area_in_ball(&y, &o, 1.0);
    assert!((a / (1.5 * PI) - 1.0).abs() < 0.01, "{a}");
    let t = golden("t-cone", 0.05);
    let a = area_in_ball(&t, &o, 1.0);
    assert!((a - 5.7318).abs() < 1e-4 + 0.01 * 5.7318);
    assert!((a / t_cone_area_at_one() - 1.0).abs() < 0.01, "{a}");
    let p = golden("plane", 0.05);
    let a = area_in_ball(&p, &o, 0.8);
    assert!((a / (PI * 0.64) - 1.0).abs() < 0.01, "{a}");
    assert_eq!(area_in_ball(&p, &Vec3::new(0.0, 0.0, 5.0), 1.0), 0.0);
}

#[test]
fn growth_constants_and_monotonicity() {
    let o = Vec3::zeros();
    let radii = [0.25, 0.5, 0.75, 1.0, 1.25];
    for (name, expected) in [("plane", PI), ("y-cone", 1.5 * PI), ("t-cone", t_cone_area_at_one())] {
        let c = golden(name, 0.05);
        let g = area_growth_constant(&c, &o, &radii);
        assert!((g.c_fit / expected - 1.0).abs() < 0.01, "{name}: {}", g.c_fit);
        assert!(g.areas.windows(2).all(|w| w[0] <= w[1]));
        // On an exact cone about its apex, area/r² is constant up to clipping error.
        for (a, r) in g.areas.iter().zip(&radii) {
            assert!((a / (r * r) / expected - 1.0).abs() < 0.01);
        }
    }
}

#[test]
fn exact_cones_have_balanced_frames() {
    for name in ["y-cone", "t-cone", "double-t", "network-prism"] {
        let c = golden(name, 0.1);
        let s = with_signs(&c);
        let f = compute_frames(&c, &s).unwrap();
        assert!(f.max_stationarity <= 1e-12, "{name}: {}", f.max_stationarity);
        assert!(f.max_sign_residual <= 1e-12);
        assert!(f.max_orthogonality <= c.tol_geom());
        for frames in &f.curves {
            for fr in frames {
                assert!(fr.curvature.norm() <= 1e-9, "straight junctions have no curvature");
            }
        }
    }
}

#[test]
fn rotated_sheet_conormal_sum_matches_vector_oracle() {
    let deg = PI / 180.0;
    let angles = [0.0, 110.0 * deg, 235.0 * deg];
    let c = build(golden::y_cone_with_angles(0.1, 1.5, angles));
    let f = compute_frames(&c, &with_signs(&c)).unwrap();
    // Conormals point from each sheet toward the axis: −u_θ.
    let oracle: Vec3 = angles.iter().map(|a| -Vec3::new(a.cos(), a.sin(), 0.0)).sum();
    for fr in &f.curves[0] {
        assert!((fr.conormal_sum() - oracle).norm() < 1e-12);
    }
    assert!((f.max_stationarity - oracle.norm()).abs() < 1e-12);
    assert!(oracle.norm() > 0.1);
}

fn inward_sphere() -> PlateauComplex {
    let mut m = golden::icosphere(4);
    let c = build(m.clone());
    let v = c.triangles()[0][0];
    if c.fan_normal(v, 0).dot(&c.vertex(v)) > 0.0 {
        m.normal_side.insert(0, -1);
    }
    build(m)
}

#[test]
fn sphere_mean_curvature_is_two_with_inward_normal() {
    let c = inward_sphere();
    let k = compute_curvature(&c).unwrap();
    let worst = k.mean.iter().map(|h| (h - 2.0).abs()).fold(0.0, f64::max);
    assert!(worst <= 0.05, "{worst}");
    for (a2, h) in k.a2.iter().zip(&k.mean) {
        assert!(*a2 >= h * h / 2.0 - 1e-12);
        assert!((a2 - 2.0).abs() < 0.1);
    }
}

#[test]
fn catenoid_is_minimal_and_curved() {
    let c = build(golden::catenoid(0.08, 1.0, 1.0));
    let k = compute_curvature(&c).unwrap();
    assert!(k.max_abs_mean() <= 0.05, "{}", k.max_abs_mean());
    // Analytic |A|² = 2/cosh⁴z; compare on fitted slots.
    for (s, slot) in c.slots().iter().enumerate() {
        if k.fitted[s] {
            let z = c.vertex(slot.vertex).z;
            let exact = 2.0 / z.cosh().powi(4);
            assert!((k.a2[s] - exact).abs() < 0.1 * exact + 0.02, "{} vs {exact}", k.a2[s]);
        }
    }
}

#[test]
fn flat_patches_have_no_second_fundamental_form() {
    for name in ["plane", "y-cone", "t-cone"] {
        let c = golden(name, 0.1);
        let k = compute_curvature(&c).unwrap();
        assert!(k.a2.iter().all(|a| *a < 1e-20), "{name}");
    }
}

#[test]
fn rigid_motions_leave_geometry_unchanged() {
    let c = build(golden::y_cone_with_angles(0.1, 1.5, [0.0, 2.0, 4.2]));
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(0.3, -0.5, 0.8)), 0.7);
    let shift = Vec3::new(1.0, -2.0, 0.5);
    let moved = c.map_vertices(|p| rot * p + shift);
    let (s0, s1) = (with_signs(&c), with_signs(&moved));
    let (f0, f1) = (compute_frames(&c, &s0).unwrap(), compute_frames(&moved, &s1).unwrap());
    assert!((f0.max_stationarity - f1.max_stationarity).abs() < 1e-10);
    for (a, b) in f0.curves[0].iter().zip(&f1.curves[0]) {
        for (x, y) in a.conormals.iter().zip(&b.conormals) {
            assert!((rot * x - y).norm() < 1e-10);
        }
    }
    let (k0, k1) = (compute_curvature(&c).unwrap(), compute_curvature(&moved).unwrap());
    for (a, b) in k0.mean.iter().zip(&k1.mean) {
        assert!((a - b).abs() < 1e-10);
    }
    let a0 = area_in_ball(&c, &Vec3::zeros(), 1.0);
    let a1 = area_in_ball(&moved, &shift, 1.0);
    assert!((a0 - a1).abs() < 1e-10);
    for v in 0..c.vertices().len() {
        assert_eq!(c.classify_local_model(v).unwrap(), moved.classify_local_model(v).unwrap());
    }
}

#[test]
fn degenerate_and_underdetermined_inputs_are_reported() {
    let sliver = MeshFile {
        vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        triangles: vec![
            TriangleRecord::Labeled { v: [0, 1, 2], patch: Some(0) },
            TriangleRecord::Labeled { v: [0, 2, 3], patch: Some(0) },
        ],
        junctions: None,
        t_points: None,
        normal_side: Default::default(),
        extends: None,
    };
    let c = build(sliver);
    assert!(matches!(compute_curvature(&c), Err(PlateauError::DegenerateTriangle { triangle: 0, .. })));

    // An interior vertex with a three-triangle star cannot support a quadric fit.
    let fan = MeshFile {
        vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [-0.5, 0.8, 0.0], [-0.5, -0.8, 0.0]],
        triangles: vec![
            TriangleRecord::Labeled { v: [0, 1, 2], patch: Some(0) },
            TriangleRecord::Labeled { v: [0, 2, 3], patch: Some(0) },
            TriangleRecord::Labeled { v: [0, 3, 1], patch: Some(0) },
        ],
        junctions: None,
        t_points: None,
        normal_side: Default::default(),
        extends: None,
    };
    let c = build(fan);
    assert!(matches!(compute_curvature(&c), Err(PlateauError::FitRank { vertex: 0, .. })));
}
