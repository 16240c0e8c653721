mod common;

use common::*;
use nalgebra::DMatrix;
use plateau::complex::{complement_regions, RegionOptions, VertexKind};
use plateau::funcspace::*;
use plateau::golden;
use plateau::{PlateauError, Vec3};

fn axis_vertex(c: &plateau::PlateauComplex) -> usize {
    (0..c.vertices().len()).find(|&v| c.kind(v) == VertexKind::Junction).unwrap()
}

#[test]
fn y_signs_are_all_positive_and_flip_with_a_normal() {
    let c = golden("y-cone", 0.2);
    let s = with_signs(&c);
    assert_eq!(s.curve_signs, vec![vec![1, 1, 1]]);
    assert!(s.max_residual < 1e-12);

    let mut m = golden::y_cone(0.2, 1.5);
    m.normal_side.insert(1, -1);
    let flipped = build(m);
    let s = with_signs(&flipped);
    assert_eq!(s.curve_signs, vec![vec![1, -1, 1]]);
    assert!(s.max_residual < 1e-12);
}

#[test]
fn compatibility_of_simple_junction_values() {
    let c = golden("y-cone", 0.2);
    let s = with_signs(&c);
    let v = axis_vertex(&c);
    let slots: Vec<usize> = c.vertex_slots(v).collect();
    let mut f = ScalarField::zeros(&c);
    for (slot, val) in slots.iter().zip([1.0, -1.0, 0.0]) {
        f.values[*slot] = val;
    }
    let r = check_compatible(&c, &s, &f, CompatTolerance::default());
    assert!(r.compatible && r.max_residual() == 0.0);
    for slot in &slots {
        f.values[*slot] = 1.0;
    }
    let r = check_compatible(&c, &s, &f, CompatTolerance::default());
    assert!(!r.compatible);
    assert!((r.max_junction_residual - 3.0).abs() < 1e-15);
    assert!(matches!(
        lift_to_vector_field(&c, &s, &f, CompatTolerance::default()),
        Err(PlateauError::IncompatibleField { .. })
    ));
}

#[test]
fn y_lift_matches_the_two_thirds_formula() {
    let c = golden("y-cone", 0.2);
    let s = with_signs(&c);
    let v = axis_vertex(&c);
    let slots: Vec<usize> = c.vertex_slots(v).collect();
    let mut f = ScalarField::zeros(&c);
    f.values[slots[0]] = 1.0;
    f.values[slots[1]] = -1.0;
    let lifted = lift_to_vector_field(&c, &s, &f, CompatTolerance::default()).unwrap();
    let n: Vec<Vec3> = slots.iter().map(|&k| c.fan_normal(v, c.slots()[k].patch)).collect();
    let expected = (n[0] - n[1]) * (2.0 / 3.0);
    assert!((lifted.vectors[v] - expected).norm() < 1e-15);
    assert!((lifted.vectors[v].dot(&n[0]) - 1.0).abs() < 1e-12);
    assert!((lifted.vectors[v].dot(&n[1]) + 1.0).abs() < 1e-12);
    assert!(lifted.vectors[v].dot(&n[2]).abs() < 1e-12);

    let zero = lift_to_vector_field(&c, &s, &ScalarField::zeros(&c), CompatTolerance::default()).unwrap();
    assert!(zero.vectors.iter().all(|v| *v == Vec3::zeros()));
}

#[test]
fn restriction_examples() {
    let c = golden("y-cone", 0.2);
    let s = with_signs(&c);
    let up = VectorField { vectors: vec![Vec3::z(); c.vertices().len()] };
    let f = restrict_normal_component(&c, &s, &up);
    assert!(f.max_abs() < 1e-15);

    // A vector field equal to the normal of patch 0 on that patch restricts to 1 there.
    let mut v = VectorField::zeros(&c);
    let n0 = c.fan_normal(c.patches()[0].triangles.iter().map(|&t| c.triangles()[t][0]).next().unwrap(), 0);
    for slot in c.slots().iter().filter(|s| s.patch == 0) {
        v.vectors[slot.vertex] = n0;
    }
    let f = restrict_normal_component(&c, &s, &v);
    for (k, slot) in c.slots().iter().enumerate() {
        if slot.patch == 0 && c.kind(slot.vertex) == VertexKind::Interior {
            assert!((f.values[k] - 1.0).abs() < 1e-12);
        }
    }
    assert!(check_compatible(&c, &s, &f, CompatTolerance::default()).max_residual() < 1e-15);
}

#[test]
fn lift_and_restrict_round_trip_and_are_linear() {
    for name in ["y-cone", "t-cone", "double-t"] {
        let c = golden(name, 0.2);
        let s = with_signs(&c);
        let mut r = rng(7);
        for _ in 0..10 {
            let f = random_compatible(&c, &s, &mut r);
            let g = random_compatible(&c, &s, &mut r);
            let vf = lift_to_vector_field(&c, &s, &f, CompatTolerance::default()).unwrap();
            let back = restrict_normal_component(&c, &s, &vf);
            assert!(back.max_diff(&f) <= 1e-10, "{name}: {}", back.max_diff(&f));

            let combo = ScalarField { values: f.values.iter().zip(&g.values).map(|(a, b)| 2.0 * a - 0.5 * b).collect() };
            let vg = lift_to_vector_field(&c, &s, &g, CompatTolerance::default()).unwrap();
            let vc = lift_to_vector_field(&c, &s, &combo, CompatTolerance::default()).unwrap();
            for k in 0..c.vertices().len() {
                let lin = vf.vectors[k] * 2.0 - vg.vectors[k] * 0.5;
                assert!((vc.vectors[k] - lin).norm() <= 1e-12);
            }
        }
    }
}

#[test]
fn compatible_subspace_dimensions() {
    let y = golden("y-cone", 0.2);
    let blocks = constraint_blocks(&y, &with_signs(&y));
    let junction = blocks.iter().find(|b| matches!(b.kind, BlockKind::Junction { .. })).unwrap();
    assert_eq!(junction.slots.len() - junction.rank(), 2);

    let t = golden("t-cone", 0.2);
    let blocks = constraint_blocks(&t, &with_signs(&t));
    let tb = blocks.iter().find(|b| matches!(b.kind, BlockKind::TPoint { .. })).unwrap();
    // Dense rank of the 4×6 curve conditions, computed independently.
    let a = DMatrix::from_fn(4, 6, |i, j| tb.rows[i][j]);
    let rank = a.svd(false, false).singular_values.iter().filter(|&&x| x > 1e-10).count();
    assert_eq!(rank, 3);
    assert_eq!(tb.rank(), 3);
    assert_eq!(tb.null_space().ncols(), 3);
}

/// The T-point table, checked against direct dot products of the exact
/// planar normals rather than mesh normals.
#[test]
fn t_table_against_exact_normals() {
    let c = golden("t-cone", 0.2);
    let s = with_signs(&c);
    let r = verify_inner_product_tables(&c, &s);
    assert!(r.max_t_residual <= 1e-12, "{}", r.max_t_residual);
    assert!(r.max_t_permutation <= 1e-12);
    assert!(r.max_y_residual <= 1e-12);

    let d = golden::tetrahedral_directions();
    let tp = &c.t_points()[0];
    let origin = tp.vertex;
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let p = tp.pair_patch[i][j];
            let n = c.fan_normal(origin, p);
            // The sector is spanned by two of the four directions; its normal is ± their cross product.
            let dirs: Vec<&Vec3> = d.iter().filter(|dk| (n.dot(dk)).abs() < 1e-12).collect();
            assert_eq!(dirs.len(), 2);
            assert!((n.cross(&dirs[0].cross(dirs[1]).normalize())).norm() < 1e-12);
        }
    }
}

#[test]
fn perturbed_y_table_residual_matches_angle_oracle() {
    let deg = std::f64::consts::PI / 180.0;
    let angles = [0.0, 121.0 * deg, 240.0 * deg];
    let c = build(golden::y_cone_with_angles(0.2, 1.5, angles));
    let s = with_signs(&c);
    let r = verify_inner_product_tables(&c, &s);
    // Normals e3×u_θ: νⁱ·νʲ = cos(θⱼ − θᵢ); compare with −1/2.
    let oracle = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| ((angles[j] - angles[i]).cos() + 0.5).abs())
        .fold(0.0, f64::max);
    assert!((r.max_y_residual - oracle).abs() < 1e-12, "{} vs {oracle}", r.max_y_residual);
    assert!(r.max_y_residual > 0.5 * (1.0 * deg).sin());
}

#[test]
fn locally_constant_fields_are_compatible() {
    for (name, regions_expected) in [("plane", 2), ("y-cone", 3), ("t-cone", 4)] {
        let c = golden(name, 0.2);
        let s = with_signs(&c);
        let regions = complement_regions(&c, &RegionOptions::default()).unwrap();
        assert_eq!(regions.count, regions_expected, "{name}");
        let mut sum = ScalarField::zeros(&c);
        for r in 0..regions.count {
            let f = locally_constant_field(&c, &regions, r).unwrap();
            let rep = check_compatible(&c, &s, &f, CompatTolerance::default());
            assert!(rep.compatible && rep.max_residual() == 0.0, "{name} region {r}");
            for (a, b) in sum.values.iter_mut().zip(&f.values) {
                *a += b;
            }
            let v = lift_to_vector_field(&c, &s, &f, CompatTolerance::default()).unwrap();
            assert!(restrict_normal_component(&c, &s, &v).max_diff(&f) <= 1e-12);
        }
        // Each patch faces two regions with opposite signs.
        assert!(sum.max_abs() == 0.0);
        assert!(matches!(
            locally_constant_field(&c, &regions, regions.count),
            Err(PlateauError::RegionUnknown(_))
        ));
    }
}

#[test]
fn plane_upper_region_has_plus_one() {
    let c = golden("plane", 0.2);
    let regions = complement_regions(&c, &RegionOptions::default()).unwrap();
    // Normal is +e3; the region its normal points into is the upper half-space.
    let upper = regions.patch_sides[0][0].unwrap();
    let f = locally_constant_field(&c, &regions, upper).unwrap();
    for (k, slot) in c.slots().iter().enumerate() {
        if c.kind(slot.vertex) == VertexKind::Interior {
            assert_eq!(f.values[k], 1.0);
        }
    }
}

#[test]
fn field_documents_round_trip() {
    let c = golden("y-cone", 0.3);
    let s = with_signs(&c);
    let f = random_compatible(&c, &s, &mut rng(3));
    let doc = FieldFile::from_scalar(&c, &f).to_json();
    assert_eq!(FieldFile::parse(&doc).unwrap().into_scalar(&c).unwrap(), f);
    let v = lift_to_vector_field(&c, &s, &f, CompatTolerance::default()).unwrap();
    let doc = FieldFile::from_vector(&v).to_json();
    assert_eq!(FieldFile::parse(&doc).unwrap().into_vector(&c).unwrap(), v);
    assert!(FieldFile::parse("{\"kind\":\"scalar\"}").is_err());
}
