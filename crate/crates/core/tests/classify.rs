mod common;

use common::*;
use nalgebra::{Rotation3, Unit, Vector3};
use plateau::classify::*;
use plateau::complex::{CurveEnd, PlateauComplex};
use plateau::geometry::compute_curvature;
use plateau::golden;
use plateau::tolerances::{ANGLE_EXACT, FLAT};
use plateau::variation::relax_to_minimal;
use plateau::{PlateauError, Vec3};

fn classify(c: &PlateauComplex) -> plateau::Result<FlatClassification> {
    classify_flat(c, &compute_curvature(c).unwrap(), FLAT, ANGLE_EXACT)
}

fn corpus() -> Vec<(&'static str, PlateauComplex, FlatTag)> {
    vec![
        ("plane", golden("plane", 0.2), FlatTag::ParallelPlanes),
        ("parallel planes", build(golden::parallel_planes(0.25, 1.0, 0.5)), FlatTag::ParallelPlanes),
        ("y-cone", golden("y-cone", 0.2), FlatTag::NetworkTimesR),
        ("network-prism", golden("network-prism", 0.2), FlatTag::NetworkTimesR),
        ("t-cone", golden("t-cone", 0.2), FlatTag::TCone),
        ("double-t", golden("double-t", 0.2), FlatTag::DoubleT),
    ]
}

#[test]
fn corpus_instances_classify_to_their_tags() {
    for (name, c, tag) in corpus() {
        let out = classify(&c).unwrap();
        assert_eq!(out.tag, tag, "{name}");
        assert!(out.flatness.flat && out.flatness.max_a2 < 1e-20 && out.flatness.max_turning < 1e-12);
    }
}

/// The branch predicates of the decision tree, read off independently.
fn predicates(c: &PlateauComplex) -> [bool; 4] {
    let plane = (0..c.patches().len()).any(|p| {
        matches!(region_type(c, p, ANGLE_EXACT), Ok(RegionReport { region: RegionType::Plane, .. }))
    });
    let line = c.junctions().iter().any(|j| j.start == CurveEnd::Boundary && j.end == CurveEnd::Boundary);
    [plane, line, c.t_points().len() == 1, c.t_points().len() == 2]
}

#[test]
fn each_instance_satisfies_exactly_its_branch() {
    for (name, c, tag) in corpus() {
        let expected = match tag {
            FlatTag::ParallelPlanes => 0,
            FlatTag::NetworkTimesR => 1,
            FlatTag::TCone => 2,
            FlatTag::DoubleT => 3,
            _ => unreachable!(),
        };
        let p = predicates(&c);
        for (k, hit) in p.iter().enumerate() {
            assert_eq!(*hit, k == expected, "{name}: predicate {k}");
        }
    }
}

#[test]
fn three_t_points_and_curved_inputs() {
    let err = classify(&build(golden::triple_t(0.3))).unwrap_err();
    assert!(matches!(err, PlateauError::Structure(ref m) if m.contains("3 T-points")), "{err}");
    for c in [build(golden::catenoid(0.15, 1.0, 1.0)), golden("y-catenoid-seed", 0.15)] {
        let curv = compute_curvature(&c).unwrap();
        assert!(!is_flat(&c, &curv, FLAT).flat);
        assert_eq!(classify(&c).unwrap().tag, FlatTag::NonFlat);
    }
    let y = golden("y-cone", 0.2);
    let f = is_flat(&y, &compute_curvature(&y).unwrap(), FLAT);
    assert!(f.flat && f.max_a2 < 1e-20 && f.max_turning < 1e-12);
}

#[test]
fn relaxed_bump_is_flat_at_relaxed_tolerance() {
    let c = golden("y-cone", 0.15);
    let bumped = c.map_vertices(|p| {
        let s = (p.x * p.x + p.y * p.y + p.z * p.z) / 0.64;
        let lift = if s < 1.0 { 0.02 * (1.0 - s).powi(2) } else { 0.0 };
        // Move the first sheet (azimuth 0) off its plane.
        if p.y.abs() < 1e-12 && p.x > 1e-12 {
            p + Vec3::y() * lift
        } else {
            *p
        }
    });
    let before = is_flat(&bumped, &compute_curvature(&bumped).unwrap(), 1e-4);
    assert!(!before.flat);
    let (relaxed, _) = relax_to_minimal(&bumped, 600, 0.05 * 0.15 * 0.15 * 0.5).unwrap();
    let after = is_flat(&relaxed, &compute_curvature(&relaxed).unwrap(), 1e-4);
    assert!(after.flat, "{after:?}");
    assert!(after.max_a2 > 0.0);
}

#[test]
fn region_types_of_the_corpus() {
    let acos = (-1.0f64 / 3.0).acos();
    let t = golden("t-cone", 0.2);
    for p in 0..6 {
        let r = region_type(&t, p, ANGLE_EXACT).unwrap();
        assert_eq!(r.region, RegionType::Angular);
        assert!((r.corner_angles[0] - acos).abs() < 1e-9);
        assert!((acos - 1.91063).abs() < 1e-5);
    }
    let prism = golden("network-prism", 0.2);
    let kinds: Vec<RegionType> = (0..5).map(|p| region_type(&prism, p, ANGLE_EXACT).unwrap().region).collect();
    assert_eq!(kinds.iter().filter(|k| **k == RegionType::Strip).count(), 1);
    assert_eq!(kinds.iter().filter(|k| **k == RegionType::HalfPlane).count(), 4);

    let d = golden("double-t", 0.2);
    let mut three = 0;
    for p in 0..d.patches().len() {
        let r = region_type(&d, p, ANGLE_EXACT).unwrap();
        match r.region {
            RegionType::Angular => {}
            RegionType::ThreeSided => {
                three += 1;
                // x₂ + a > 2√2|x₁|, x₂ > 0: both corners have cosine −1/3.
                for a in &r.corner_angles {
                    assert!((a.cos() + 1.0 / 3.0).abs() < 1e-9);
                }
            }
            other => panic!("double-T face {p} is {other:?}"),
        }
    }
    assert_eq!(three, 3);
    let out = classify(&d).unwrap();
    assert_eq!(out.t_points.len(), 2);
    let sep = (Vec3::from(out.t_points[0]) - Vec3::from(out.t_points[1])).norm();
    assert!((sep - 1.0).abs() < 1e-12);

    assert!(matches!(region_type(&golden("plane", 0.3), 0, ANGLE_EXACT).unwrap().region, RegionType::Plane));
    let cat = build(golden::catenoid(0.2, 1.0, 1.0));
    assert!(matches!(region_type(&cat, 0, ANGLE_EXACT), Err(PlateauError::NotFlat(0))));
}

#[test]
fn skewed_sectors_are_not_recognized() {
    let c = build(golden::y_cone_with_angles(0.2, 1.0, [0.0, 2.0, 4.0]));
    // Half-planes are still half-planes; the skew shows in the network instead.
    let out = classify(&c).unwrap();
    assert_eq!(out.tag, FlatTag::NetworkTimesR);
    let net = out.network.unwrap();
    assert!(net.max_balance() > 0.1);
    assert!(net.max_triple_angle_error > 0.05);
}

#[test]
fn networks_balance_at_every_node() {
    let y = extract_network(&golden("y-cone", 0.2), ANGLE_EXACT).unwrap();
    assert_eq!((y.nodes.len(), y.edges.len()), (1, 3));
    assert!(y.edges.iter().all(|e| e.to.is_none()));
    assert!(y.max_balance() < 1e-12 && y.max_triple_angle_error < 1e-12);

    let side = 1.0;
    let slab = build(golden::honeycomb_slab(0.25, side, 1.0, 0.5));
    let net = extract_network(&slab, ANGLE_EXACT).unwrap();
    assert_eq!((net.nodes.len(), net.edges.len()), (6, 12));
    assert!(net.max_balance() <= 1e-8);
    assert!(net.max_triple_angle_error <= 1e-8);
    // Oracle: the nodes form a regular hexagon of the given side.
    let centre = net.nodes.iter().fold([0.0, 0.0], |a, n| [a[0] + n[0] / 6.0, a[1] + n[1] / 6.0]);
    for n in &net.nodes {
        assert!(((n[0] - centre[0]).hypot(n[1] - centre[1]) - side).abs() < 1e-12);
    }
    for e in net.edges.iter().filter(|e| e.to.is_some()) {
        let (a, b) = (net.nodes[e.from], net.nodes[e.to.unwrap()]);
        assert!(((a[0] - b[0]).hypot(a[1] - b[1]) - side).abs() < 1e-12);
    }
    let json = net.to_json();
    let back: PlanarNetwork = serde_json::from_str(&json).unwrap();
    assert_eq!(back, net);

    assert!(matches!(extract_network(&golden("t-cone", 0.3), ANGLE_EXACT), Err(PlateauError::Projection(_))));
}

#[test]
fn tags_survive_rigid_motion_and_scaling() {
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(1.0, 2.0, -0.5)), 1.1);
    for (name, c, tag) in corpus() {
        for scale in [0.5, 3.0] {
            let moved = c.map_vertices(|p| rot * p * scale + Vec3::new(0.3, -1.0, 2.0));
            assert_eq!(classify(&moved).unwrap().tag, tag, "{name} at scale {scale}");
        }
    }
}
