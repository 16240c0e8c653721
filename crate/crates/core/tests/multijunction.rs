mod common;

use std::f64::consts::PI;

use common::*;
use plateau::complex::{MeshFile, PlateauComplex, TriangleRecord};
use plateau::golden;
use plateau::multijunction::*;
use plateau::tolerances::{ANGLE_EXACT, EIG_REL, STAT_REL};
use plateau::variation::{assemble_second_variation, stability_spectrum, Analysis, CutoffMode, FormOptions};
use plateau::{PlateauError, Vec3};
use rand::Rng;

fn surface(f: MultiFile) -> MultiJunctionSurface {
    MultiJunctionSurface::from_file(f).unwrap()
}

fn y_book() -> MultiFile {
    golden::flat_book(0.2, &[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0], 1.5, 1.0)
}

/// The same sheets read as an ordinary Plateau complex.
fn as_plateau(f: &MultiFile) -> PlateauComplex {
    let triangles = f
        .sheets
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.triangles.iter().map(move |&v| TriangleRecord::Labeled { v, patch: Some(i as u32) }))
        .collect();
    build(MeshFile {
        vertices: f.vertices.clone(),
        triangles,
        junctions: None,
        t_points: None,
        normal_side: Default::default(),
        extends: None,
    })
}

fn point_at(m: &MultiJunctionSurface, sheet: usize, p: Vec3) -> SurfacePoint {
    let c = m.complex();
    let vertex = c
        .slots()
        .iter()
        .filter(|s| s.patch == sheet)
        .map(|s| s.vertex)
        .min_by(|&a, &b| (c.vertex(a) - p).norm().total_cmp(&(c.vertex(b) - p).norm()))
        .unwrap();
    SurfacePoint { sheet, vertex }
}

fn gamma_midpoint(m: &MultiJunctionSurface) -> SurfacePoint {
    let curve = &m.complex().junctions()[0];
    SurfacePoint { sheet: curve.patches[0], vertex: curve.vertices[curve.vertices.len() / 2] }
}

#[test]
fn intrinsic_distance_follows_chains_through_gamma() {
    let m = surface(y_book());
    let a = 0.75;
    let angles = [0.0, 2.0 * PI / 3.0];
    let x = point_at(&m, 0, Vec3::new(a * angles[0].cos(), a * angles[0].sin(), 0.0));
    let y = point_at(&m, 1, Vec3::new(a * angles[1].cos(), a * angles[1].sin(), 0.0));
    assert!((intrinsic_distance(&m, x, y).unwrap() - 2.0 * a).abs() < 1e-12);

    // Along one sheet the edge-graph distance is within mesh error of Euclidean.
    let c = m.complex();
    let h = c.max_edge_length();
    let z = point_at(&m, 0, Vec3::new(1.2, 0.0, 0.6));
    let d = intrinsic_distance(&m, x, z).unwrap();
    let e = (c.vertex(x.vertex) - c.vertex(z.vertex)).norm();
    assert!(d >= e - 1e-12 && d <= e + 2.0 * h, "{d} vs {e}");

    let three = MultiJunctionSurface::new(build(golden::triple_t(0.3)), vec![1.0; 18]).unwrap();
    let far = three.complex().t_points()[2].vertex;
    let near = three.complex().t_points()[0].vertex;
    let p = SurfacePoint { sheet: three.complex().slots()[three.complex().vertex_slots(near).start].patch, vertex: near };
    let q = SurfacePoint { sheet: three.complex().slots()[three.complex().vertex_slots(far).start].patch, vertex: far };
    assert!(matches!(intrinsic_distance(&three, p, q), Err(PlateauError::Disconnected { .. })));
    assert!(intrinsic_distances(&three, p).unwrap().iter().any(|d| d.is_infinite()));
}

#[test]
fn intrinsic_distance_is_a_metric() {
    let m = surface(golden::twisted_book(0.2, 0.3, 1.5, 1.0));
    let c = m.complex();
    let slack = 2.0 * c.max_edge_length();
    let mut r = rng(11);
    let mut pick = || {
        let s = &c.slots()[r.gen_range(0..c.num_slots())];
        SurfacePoint { sheet: s.patch, vertex: s.vertex }
    };
    for _ in 0..30 {
        let (x, y, z) = (pick(), pick(), pick());
        let dxy = intrinsic_distance(&m, x, y).unwrap();
        assert!((dxy - intrinsic_distance(&m, y, x).unwrap()).abs() < 1e-12);
        let dxz = intrinsic_distance(&m, x, z).unwrap();
        let dzy = intrinsic_distance(&m, z, y).unwrap();
        assert!(dxy <= dxz + dzy + slack);
        assert_eq!(intrinsic_distance(&m, x, x).unwrap(), 0.0);
    }
}

#[test]
fn equilibrium_angles_detect_twist() {
    let flat = surface(y_book());
    let rep = check_equilibrium_angles(&flat, ANGLE_EXACT);
    assert!(rep.equilibrium && rep.max_deviation < 1e-12);
    assert_eq!(rep.pairs.len(), 3);
    for p in &rep.pairs {
        assert!((p.mean.abs() - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    let twist = 10f64.to_radians();
    let bent = surface(golden::twisted_book(0.1, twist, 1.5, 1.0));
    let rep = check_equilibrium_angles(&bent, ANGLE_EXACT);
    assert!(!rep.equilibrium);
    // End normals average over the first cell, so the last of 20 cells is lost.
    assert!((rep.max_deviation - twist).abs() < 0.06 * twist, "{}", rep.max_deviation.to_degrees());
    let untouched = rep.pairs.iter().find(|p| p.i == 0 && p.j == 1).unwrap();
    assert!(untouched.deviation < 1e-12);
    assert!(matches!(
        build_paired_test_fields(&bent, gamma_midpoint(&bent), 2.0, 0.5, ANGLE_EXACT),
        Err(PlateauError::NoEquilibrium { .. })
    ));
}

#[test]
fn paired_fields_satisfy_the_key_identity() {
    let m = surface(y_book());
    let p0 = gamma_midpoint(&m);
    // At 30° one coefficient is cos 270° = 0, so the grid takes over.
    let f = build_paired_test_fields(&m, p0, 1.0, 30f64.to_radians(), ANGLE_EXACT).unwrap();
    assert!(f.retries > 0);
    let mut pattern: Vec<f64> = f.sheet_angles.iter().map(|b| (30f64.to_radians() - b).cos().abs()).collect();
    pattern.sort_by(f64::total_cmp);
    assert!(pattern[0] < 1e-12);
    assert!((pattern[1] - 0.5f64.sqrt() * 1.5f64.sqrt()).abs() < 1e-12);

    let alpha = 20f64.to_radians();
    let f = build_paired_test_fields(&m, p0, 1.0, alpha, ANGLE_EXACT).unwrap();
    assert_eq!(f.retries, 0);
    assert_eq!(f.w1_angle, alpha);
    for i in 0..3 {
        assert!((f.c1[i] - (alpha - f.sheet_angles[i]).cos()).abs() < 1e-15);
        assert!((f.c2[i] + (alpha - f.sheet_angles[i]).sin()).abs() < 1e-15);
        assert!((f.c1[i].powi(2) + f.c2[i].powi(2) - 1.0).abs() < 1e-14);
    }
    assert!(f.identity_spread <= 1e-10);
    assert!(f.compat_residual <= 1e-10);

    let c = m.complex();
    for s in 0..c.num_slots() {
        if f.rho[s] >= 1f64.exp() {
            assert_eq!(f.phi1.values[s], 0.0);
            assert_eq!(f.phi2.values[s], 0.0);
        }
    }
    let wide = build_paired_test_fields(&m, p0, 1e6, alpha, ANGLE_EXACT).unwrap();
    for (s, slot) in c.slots().iter().enumerate() {
        assert!((wide.phi1.values[s] - wide.c1[slot.patch]).abs() < 1e-5);
    }

    // W₁ along a sheet normal forces a retry on the fixed grid.
    let f = build_paired_test_fields(&m, p0, 1.0, 0.0, ANGLE_EXACT).unwrap();
    assert!(f.retries > 0);
    assert!(f.c1.iter().chain(&f.c2).all(|x| x.abs() >= ANGLE_EXACT));
}

#[test]
fn dense_sheet_fans_exhaust_the_angle_grid() {
    let angles: Vec<f64> = (0..8).map(|k| (k as f64 * 11.25f64).to_radians()).collect();
    let m = surface(golden::flat_book(0.3, &angles, 1.0, 0.6));
    let p0 = gamma_midpoint(&m);
    assert!(matches!(
        build_paired_test_fields(&m, p0, 1.0, 0.0, ANGLE_EXACT),
        Err(PlateauError::AngleDegeneracy { retries: 16 })
    ));
}

#[test]
fn unit_densities_reproduce_the_plateau_form() {
    let file = y_book();
    let plain = as_plateau(&file);
    let m = surface(file);
    let weighted = weighted_stability_form(&m);
    let an = Analysis::new(&plain).unwrap();
    let reference = assemble_second_variation(&plain, &an, &FormOptions::default());
    assert_eq!(weighted.dof_slots, reference.dof_slots);
    let diff = &weighted.q - &reference.q;
    assert!(diff.values().iter().all(|v| v.abs() <= 1e-12));
    for (a, b) in weighted.mass.iter().zip(&reference.mass) {
        assert!((a - b).abs() <= 1e-12);
    }
    let s1 = stability_spectrum(&weighted, m.complex().num_slots(), 4, EIG_REL).unwrap();
    let s2 = stability_spectrum(&reference, plain.num_slots(), 4, EIG_REL).unwrap();
    assert_eq!(s1.reduced_dim, s2.reduced_dim);
    for (a, b) in s1.eigenvalues.iter().zip(&s2.eigenvalues) {
        assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
    }
}

#[test]
fn weighted_book_is_stationary_and_stable() {
    let theta = [1.0, 1.5, 2.0];
    let m = surface(golden::weighted_book(0.15, theta, 1.5, 1.0));
    let stat = m.weighted_stationarity(STAT_REL);
    assert!(stat.stationary && stat.max_conormal_sum < 1e-12);
    let form = weighted_stability_form(&m);
    let sp = stability_spectrum(&form, m.complex().num_slots(), 2, EIG_REL).unwrap();
    assert!(sp.stable && sp.eigenvalues[0] > 0.0);

    // Unit densities at the same azimuths are out of balance.
    let unbalanced = MultiJunctionSurface::new(m.complex().clone(), vec![1.0; 3]).unwrap();
    assert!(!unbalanced.weighted_stationarity(STAT_REL).stationary);
}

#[test]
fn curve_terms_cancel_on_a_curved_junction() {
    let m = surface(golden::split_disk(0.1, 1.0, 2.0, 1.5));
    assert!(m.weighted_stationarity(STAT_REL).max_conormal_sum < 1e-12);
    let p0 = gamma_midpoint(&m);
    let f = build_paired_test_fields(&m, p0, 2.0, 0.4, ANGLE_EXACT).unwrap();
    let (residual, scale) = curve_term_cancellation(&m, &f);
    assert!(scale > 0.1, "{scale}");
    assert!(residual <= 1e-8, "{residual}");
}

#[test]
fn analytic_appendix_cutoff_decays_like_one_over_n() {
    let ns: Vec<f64> = (1..=8).map(f64::from).collect();
    let m = surface(y_book());
    let rep =
        appendix_bernstein_test(&m, gamma_midpoint(&m), &ns, CutoffMode::AnalyticCone, 0.5, STAT_REL, ANGLE_EXACT)
            .unwrap();
    assert!((rep.slope + 1.0).abs() < 1e-12);
    for row in &rep.rows {
        assert_eq!(row.lhs, 0.0);
        assert!((row.rhs - 3.0 * PI / row.n).abs() < 1e-12);
    }

    let theta = [1.0, 1.5, 2.0];
    let rhs = |scale: f64| {
        let mut f = golden::weighted_book(0.2, theta, 1.5, 1.0);
        for s in &mut f.sheets {
            s.theta *= scale;
        }
        let m = surface(f);
        appendix_bernstein_test(&m, gamma_midpoint(&m), &ns, CutoffMode::AnalyticCone, 0.5, STAT_REL, ANGLE_EXACT)
            .unwrap()
    };
    let one = rhs(1.0);
    let two = rhs(2.0);
    for (a, b) in one.rows.iter().zip(&two.rows) {
        assert!((a.rhs - PI * 4.5 / a.n).abs() < 1e-12);
        assert!((b.rhs - 2.0 * a.rhs).abs() < 1e-12);
    }
}

#[test]
fn mesh_appendix_cutoff_tracks_the_analytic_value() {
    let m = surface(golden::flat_book(0.2, &[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0], 4.0, 4.0));
    let ns = [0.75, 1.0, 1.25];
    let rep = appendix_bernstein_test(&m, gamma_midpoint(&m), &ns, CutoffMode::Mesh, 0.5, STAT_REL, ANGLE_EXACT)
        .unwrap();
    for row in &rep.rows {
        let exact = 3.0 * PI / row.n;
        assert!((row.rhs / exact - 1.0).abs() < 0.15, "n = {}: {} vs {exact}", row.n, row.rhs);
        assert!(row.lhs.abs() < 1e-12);
    }
    assert!(rep.holds);
    assert!(matches!(
        appendix_bernstein_test(&m, gamma_midpoint(&m), &[2.0], CutoffMode::Mesh, 0.5, STAT_REL, ANGLE_EXACT),
        Err(PlateauError::Extent { .. })
    ));
}
