mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::{DMatrix, DVector};
use plateau::complex::PlateauComplex;
use plateau::funcspace::{check_compatible, CompatTolerance, VectorField};
use plateau::golden;
use plateau::tolerances::{EIG_REL, STAT_REL};
use plateau::variation::*;
use plateau::{PlateauError, Vec3};

/// First zero of the Bessel function J₀.
const J01: f64 = 2.404825557695773;

fn lambda1(c: &PlateauComplex, opts: &FormOptions) -> Spectrum {
    let an = Analysis::new(c).unwrap();
    let form = assemble_second_variation(c, &an, opts);
    stability_spectrum(&form, c.num_slots(), 3, EIG_REL).unwrap()
}

#[test]
fn disk_eigenvalue_matches_bessel_zero() {
    let c = build(golden::plane(0.1, 1.5));
    let sp = lambda1(&c, &FormOptions::default());
    let exact = J01 * J01 / 2.25;
    assert!((sp.eigenvalues[0] / exact - 1.0).abs() < 0.02, "{} vs {exact}", sp.eigenvalues[0]);
    assert!(sp.stable);
}

#[test]
fn flat_cones_are_stable_with_compatible_eigenfields() {
    // On the Y, the lowest mode lives on two half-disks glued into a flat disk.
    let y = build(golden::y_cone(0.12, 1.5));
    let sp = lambda1(&y, &FormOptions::default());
    let exact = J01 * J01 / 2.25;
    assert!((sp.eigenvalues[0] / exact - 1.0).abs() < 0.02, "{}", sp.eigenvalues[0]);
    // The two-dimensional compatible space at each junction vertex doubles the mode.
    assert!((sp.eigenvalues[1] / sp.eigenvalues[0] - 1.0).abs() < 1e-3);

    for c in [y, golden("t-cone", 0.15), golden("double-t", 0.15)] {
        let sp = lambda1(&c, &FormOptions::default());
        assert!(sp.stable && sp.eigenvalues[0] > 0.0);
        assert_eq!(sp.negative_count, 0);
        let s = with_signs(&c);
        let f = &sp.eigenvectors[0];
        let tol = CompatTolerance { abs: 1e-9, relative: true };
        assert!(check_compatible(&c, &s, f, tol).compatible);
    }
}

#[test]
fn constant_curvature_shift_moves_the_spectrum() {
    let c = build(golden::y_cone(0.15, 1.5));
    let base = lambda1(&c, &FormOptions::default()).eigenvalues;
    for shift in [0.5, 2.0 * base[0]] {
        let sp = lambda1(&c, &FormOptions { a2_override: Some(shift), ..Default::default() });
        for (a, b) in sp.eigenvalues.iter().zip(&base) {
            assert!((a - (b - shift)).abs() < 1e-9 * b.abs().max(1.0));
        }
        assert_eq!(sp.stable, shift < base[0]);
    }
}

/// Lowest eigenvalue of −φ'' − 2 sech²(z) φ = λ cosh²(z) φ on (−T, T) with
/// Dirichlet ends, by second-order finite differences. This is the Jacobi
/// operator of the unit catenoid restricted to rotationally symmetric fields,
/// which carry its ground state.
fn catenoid_oracle(half_height: f64) -> f64 {
    let n = 800;
    let dz = 2.0 * half_height / n as f64;
    let z = |i: usize| -half_height + dz * (i + 1) as f64;
    let m = n - 1;
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = 2.0 / (dz * dz) - 2.0 / z(i).cosh().powi(2);
        if i + 1 < m {
            a[(i, i + 1)] = -1.0 / (dz * dz);
            a[(i + 1, i)] = -1.0 / (dz * dz);
        }
    }
    let w = DVector::from_iterator(m, (0..m).map(|i| 1.0 / z(i).cosh()));
    let sym = DMatrix::from_diagonal(&w) * a * DMatrix::from_diagonal(&w);
    sym.symmetric_eigen().eigenvalues.min()
}

#[test]
fn catenoid_stability_changes_sign_like_the_jacobi_oracle() {
    for (half, stable) in [(1.0, true), (1.5, false)] {
        let oracle = catenoid_oracle(half);
        assert_eq!(oracle > 0.0, stable);
        let c = build(golden::catenoid(0.1, 1.0, half));
        let sp = lambda1(&c, &FormOptions::default());
        assert_eq!(sp.stable, stable, "half height {half}: {}", sp.eigenvalues[0]);
        assert!((sp.eigenvalues[0] - oracle).abs() < 0.05 * oracle.abs().max(0.2), "{} vs {oracle}", sp.eigenvalues[0]);
    }
}

#[test]
fn assembled_form_agrees_with_direct_integration() {
    let cases = [
        golden("y-cone", 0.15),
        golden("t-cone", 0.2),
        build(golden::catenoid(0.12, 1.0, 1.0)),
        build(golden::y_catenoid_seed(0.15, 0.6)),
        build(golden::y_cone_with_angles(0.15, 1.0, [0.0, 1.9, 4.1])),
    ];
    let mut r = rng(7);
    for c in &cases {
        let an = Analysis::new(c).unwrap();
        let opts = FormOptions::default();
        let form = assemble_second_variation(c, &an, &opts);
        let scale = form.q.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(form.asymmetry() <= 1e-12 * scale);
        for _ in 0..20 {
            let f = random_compatible(c, &an.signs, &mut r);
            let q = form.quadratic(&f);
            let d = direct_second_variation(c, &an, &opts, &f);
            assert!((q - d).abs() <= 1e-8 * q.abs().max(d.abs()).max(1e-12), "{q} vs {d}");
        }
    }
}

#[test]
fn spectrum_scales_inversely_with_area() {
    let c = build(golden::catenoid(0.15, 1.0, 1.0));
    let base = lambda1(&c, &FormOptions::default()).eigenvalues;
    for t in [0.5, 2.0] {
        let scaled = c.map_vertices(|p| p * t);
        let sp = lambda1(&scaled, &FormOptions::default()).eigenvalues;
        for (a, b) in sp.iter().zip(&base) {
            assert!((a * t * t - b).abs() < 1e-8 * b.abs().max(1.0), "{a} {b}");
        }
        let an = Analysis::new(&scaled).unwrap();
        let form = assemble_second_variation(&scaled, &an, &FormOptions::default());
        assert!(form.asymmetry() < 1e-10);
    }
    let y = golden("y-cone", 0.2);
    let ns = [1.0, 2.0, 4.0];
    let rhs = |c: &PlateauComplex| {
        let an = Analysis::new(c).unwrap();
        bernstein_test(c, &an, Vec3::zeros(), &ns, CutoffMode::AnalyticCone, STAT_REL).unwrap().rows
    };
    let base = rhs(&y);
    for t in [0.5, 2.0] {
        for (a, b) in rhs(&y.map_vertices(|p| p * t)).iter().zip(&base) {
            assert!((a.rhs - b.rhs).abs() < 1e-12);
        }
    }
}

fn bump(p: &Vec3, rho: f64) -> f64 {
    let s = p.norm_squared() / (rho * rho);
    if s < 1.0 {
        (1.0 - s).powi(2)
    } else {
        0.0
    }
}

#[test]
fn first_variation_of_flat_cones() {
    let y = golden("y-cone", 0.1);
    let an = Analysis::new(&y).unwrap();
    let mut r = rng(3);
    use rand::Rng;
    let v = VectorField {
        vectors: y
            .vertices()
            .iter()
            .map(|p| Vec3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * bump(p, 0.9))
            .collect(),
    };
    assert!(first_variation(&y, &an, &v).abs() < 1e-12);

    // Unbalanced azimuths: only the junction term survives, ∫ Στ·V along the axis.
    let deg = PI / 180.0;
    let angles = [0.0, 110.0 * deg, 235.0 * deg];
    let c = build(golden::y_cone_with_angles(0.05, 1.0, angles));
    let an = Analysis::new(&c).unwrap();
    let sum: Vec3 = angles.iter().map(|a| -Vec3::new(a.cos(), a.sin(), 0.0)).sum();
    let rho = 0.8;
    for e in [Vec3::x(), Vec3::y(), Vec3::new(0.3, -0.7, 0.2)] {
        let v = VectorField { vectors: c.vertices().iter().map(|p| e * bump(p, rho)).collect() };
        // ∫_{−ρ}^{ρ} (1 − z²/ρ²)² dz = 16ρ/15.
        let exact = sum.dot(&e) * 16.0 * rho / 15.0;
        let got = first_variation(&c, &an, &v);
        assert!((got - exact).abs() < 2e-3 * sum.norm(), "{got} vs {exact}");
    }
}

#[test]
fn first_variation_of_sphere_dilation() {
    let mut m = golden::icosphere(4);
    m.normal_side.insert(0, -1);
    let mut c = build(m.clone());
    let v = c.triangles()[0][0];
    if c.fan_normal(v, 0).dot(&c.vertex(v)) > 0.0 {
        m.normal_side.insert(0, 1);
        c = build(m);
    }
    let an = Analysis::new(&c).unwrap();
    let dilation = VectorField { vectors: c.vertices().to_vec() };
    // d/dε of 4π(1+ε)² at ε = 0.
    let got = first_variation(&c, &an, &dilation);
    assert!((got / (8.0 * PI) - 1.0).abs() < 0.03, "{got}");
}

#[test]
fn cutoff_profile_and_reach() {
    let n = 2.0;
    assert_eq!(zeta(0.5, n), 1.0);
    assert_eq!(zeta(1.0, n), 1.0);
    assert!((zeta(1.0f64.exp(), n) - 0.5).abs() < 1e-15);
    assert_eq!(zeta(3f64.exp(), n), 0.0);
    assert!((cutoff_gradient_sq(1.0f64.exp(), n) - 1.0 / (4.0 * 2f64.exp())).abs() < 1e-15);
    assert_eq!(cutoff_gradient_sq(0.5, n), 0.0);

    let c = golden("y-cone", 0.2);
    assert!((mesh_reach(&c, &Vec3::zeros()) - 1.5).abs() < 1e-12);
    let f = log_cutoff(&c, Vec3::zeros(), 0.5, CutoffMode::AnalyticCone).unwrap();
    assert_eq!(f.values.len(), c.vertices().len());
    for (p, &z) in c.vertices().iter().zip(&f.values) {
        let rho = p.norm();
        let expect = if rho <= 1.0 { 1.0 } else { (1.0 - 2.0 * rho.ln()).max(0.0) };
        assert!((z - expect).abs() < 1e-15, "rho {rho}: {z} vs {expect}");
    }
    assert!(f.values.iter().any(|&z| z < 1.0));
    match log_cutoff(&c, Vec3::zeros(), 0.5, CutoffMode::Mesh) {
        Err(PlateauError::Extent { radius, reach }) => {
            assert!((radius - 0.5f64.exp()).abs() < 1e-12 && (reach - 1.5).abs() < 1e-12)
        }
        other => panic!("expected an extent error, got {other:?}"),
    }
}

#[test]
fn analytic_cutoff_bounds_on_cones() {
    let ns = [1.0, 2.0, 4.0, 8.0, 16.0];
    let acos = (-1.0f64 / 3.0).acos();
    for (name, regions, link) in [("plane", 2, 2.0 * PI), ("y-cone", 3, 3.0 * PI), ("t-cone", 4, 6.0 * acos)] {
        let c = golden(name, 0.2);
        let an = Analysis::new(&c).unwrap();
        let rep = bernstein_test(&c, &an, Vec3::zeros(), &ns, CutoffMode::AnalyticCone, STAT_REL).unwrap();
        assert_eq!(rep.regions, regions);
        assert!(rep.multiplicity.iter().all(|&m| m == 2));
        assert!((rep.link_length.unwrap() - link).abs() < 1e-9, "{name}");
        for row in &rep.rows {
            assert!((row.rhs - link / row.n).abs() < 1e-9);
            assert_eq!(row.lhs, 0.0);
        }
        assert!((rep.slope + 1.0).abs() < 1e-12);
        assert!(rep.holds);
    }
    let curved = build(golden::catenoid(0.2, 1.0, 1.0));
    let an = Analysis::new(&curved).unwrap();
    assert!(bernstein_test(&curved, &an, Vec3::zeros(), &ns, CutoffMode::AnalyticCone, STAT_REL).is_err());
}

#[test]
fn mesh_cutoff_matches_analytic_link() {
    let c = build(golden::y_cone(0.25, 8.0));
    let an = Analysis::new(&c).unwrap();
    let ns = [1.0, 1.5, 2.0];
    let rep = bernstein_test(&c, &an, Vec3::zeros(), &ns, CutoffMode::Mesh, STAT_REL).unwrap();
    for row in &rep.rows {
        let exact = 3.0 * PI / row.n;
        assert!((row.rhs / exact - 1.0).abs() < 0.05, "n = {}: {} vs {exact}", row.n, row.rhs);
        assert!(row.lhs.abs() < 1e-12);
    }
    assert!(rep.holds);
    assert!(matches!(
        bernstein_test(&c, &an, Vec3::zeros(), &[2.5], CutoffMode::Mesh, STAT_REL),
        Err(PlateauError::Extent { .. })
    ));
    let curved = build(golden::y_catenoid_seed(0.2, 0.6));
    let an = Analysis::new(&curved).unwrap();
    assert!(matches!(
        bernstein_test(&curved, &an, Vec3::zeros(), &[0.1], CutoffMode::Mesh, STAT_REL),
        Err(PlateauError::NotStationary { .. })
    ));
}

#[test]
fn relaxation_fixes_minimal_cones() {
    let c = golden("y-cone", 0.15);
    let (out, rep) = relax_to_minimal(&c, 50, suggested_dt(&c)).unwrap();
    let moved = c.vertices().iter().zip(out.vertices()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(moved < 1e-3, "{moved}");
    assert!(rep.last.max_conormal_sum < 1e-6);
    assert!(rep.area_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn relaxation_balances_a_skewed_book() {
    let deg = PI / 180.0;
    let c = build(golden::y_book(0.1, &[0.0, 115.0 * deg, 230.0 * deg], 1.0, 3.0));
    let (_, rep) = relax_to_minimal(&c, 1400, 0.0007).unwrap();
    assert!(rep.last.max_conormal_sum * 10.0 <= rep.initial.max_conormal_sum, "{rep:?}");
    assert!(rep.last.max_angle_deviation_deg < 1.0);
    assert!(rep.last.area < rep.initial.area);
}

#[test]
fn relaxation_bends_the_catenoid_seed() {
    let c = build(golden::y_catenoid_seed(0.08, 0.6));
    let (_, rep) = relax_to_minimal(&c, 5000, 0.0006).unwrap();
    assert!(rep.last.max_abs_mean * 10.0 <= rep.initial.max_abs_mean);
    assert!(rep.last.max_angle_deviation_deg < 0.5);
    assert!(rep.last.area < rep.initial.area);
}

#[test]
fn oversized_steps_are_reported() {
    let c = build(golden::y_catenoid_seed(0.1, 0.6));
    assert!(matches!(relax_to_minimal(&c, 2000, 0.05), Err(PlateauError::StepDivergence(_))));
}
