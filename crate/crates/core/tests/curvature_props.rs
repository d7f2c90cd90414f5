//! Curvature formulas against independent oracles: the parametric-patch
//! Weingarten map of `(x, y, f(x, y))`, brute-force extremes over θ, and
//! frame invariance.

use approx::assert_relative_eq;
use proptest::prelude::*;

use umbilic_core::curvature::{
    dk_dtheta_jet, normal_curvature_jet, normal_curvature_theta_jet, normalized_discriminant, principal_data, thm2_vectorfield,
    thm3_vectorfield, umbilic_residuals_jet, PlaneField,
};
use umbilic_core::patch::{principal, PatchJet, Vec3};
use umbilic_core::{Direction, Family, Jet2, Point2, ScalarField};

fn graph_patch_jet(j: &Jet2) -> PatchJet {
    PatchJet {
        p: Vec3::new(0.0, 0.0, j.f),
        pu: Vec3::new(1.0, 0.0, j.f1),
        pv: Vec3::new(0.0, 1.0, j.f2),
        puu: Vec3::new(0.0, 0.0, j.f11),
        puv: Vec3::new(0.0, 0.0, j.f12),
        pvv: Vec3::new(0.0, 0.0, j.f22),
    }
}

fn jet() -> impl Strategy<Value = Jet2> {
    (-2.0..2.0f64, -2.0..2.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(f1, f2, f11, f12, f22)| Jet2::new(0.0, f1, f2, f11, f12, f22))
}

proptest! {
    #[test]
    fn principal_curvatures_match_patch_weingarten(j in jet()) {
        let pd = principal_data(&j);
        let sp = principal(&graph_patch_jet(&j)).unwrap();
        // patch convention dn(X) = kX with the upward normal flips the sign
        let (mut a, mut b) = (-sp.k2, -sp.k1);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let scale = 1.0 + pd.k1.abs().max(pd.k2.abs());
        prop_assert!((pd.k1 - a).abs() < 1e-12 * scale, "{} vs {}", pd.k1, a);
        prop_assert!((pd.k2 - b).abs() < 1e-12 * scale, "{} vs {}", pd.k2, b);
    }

    #[test]
    fn principal_curvatures_bound_normal_curvature(j in jet(), theta in 0.0..std::f64::consts::TAU) {
        let pd = principal_data(&j);
        let k = normal_curvature_theta_jet(&j, theta);
        let slack = 1e-12 * (1.0 + pd.k2.abs());
        prop_assert!(k >= pd.k1 - slack && k <= pd.k2 + slack);
    }

    #[test]
    fn principal_directions_are_stationary(j in jet()) {
        let pd = principal_data(&j);
        prop_assume!(!pd.umbilic && pd.k2 - pd.k1 > 1e-3);
        for (e, k) in [(pd.e1, pd.k1), (pd.e2, pd.k2)] {
            let theta = e[1].atan2(e[0]);
            let scale = 1.0 + pd.k2.abs();
            prop_assert!((normal_curvature_theta_jet(&j, theta) - k).abs() < 1e-10 * scale);
            prop_assert!(dk_dtheta_jet(&j, theta).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn direction_and_angle_forms_agree(j in jet(), theta in -10.0..10.0f64) {
        let a = normal_curvature_jet(&j, Direction::new(theta));
        let b = normal_curvature_theta_jet(&j, theta);
        assert_relative_eq!(a, b, epsilon = 1e-13, max_relative = 1e-13);
    }

    #[test]
    fn normalized_discriminant_is_frame_invariant(j in jet(), theta in 0.0..std::f64::consts::TAU) {
        let d0 = normalized_discriminant(&j);
        let d1 = normalized_discriminant(&j.rotate_frame(theta));
        let pd = principal_data(&j);
        let scale = (pd.k1.abs() + pd.k2.abs()).powi(2) + 1e-300;
        prop_assert!((d0 - d1).abs() <= 1e-11 * scale, "{d0} vs {d1}");
        prop_assert!(d0 >= -1e-12 * scale);
        prop_assert!((d0 - (pd.k2 - pd.k1).powi(2)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn p1_vanishes_exactly_when_x_axis_is_principal(f1 in -2.0..2.0f64, f2 in -2.0..2.0f64, f11 in -3.0..3.0f64, f22 in -3.0..3.0f64) {
        // choose f12 so that P1 = (1+f1²)f12 − f1f2f11 = 0
        let f12 = f1 * f2 * f11 / (1.0 + f1 * f1);
        let j = Jet2::new(0.0, f1, f2, f11, f12, f22);
        prop_assert!(umbilic_residuals_jet(&j).p1.abs() < 1e-12);
        prop_assert!(dk_dtheta_jet(&j, 0.0).abs() < 1e-12);
    }
}

fn family_and_point() -> impl Strategy<Value = (Family, Point2)> {
    let fs = Family::all_default();
    (0..fs.len(), -2.5..2.5f64, -2.5..2.5f64)
        .prop_map(move |(i, x, y)| (fs[i], Point2::new(x, y)))
        .prop_filter("inside the domain", |(f, p)| f.contains(*p) && f.jet(*p).grad_sq() < 1e4)
}

proptest! {
    #[test]
    fn normal_curvature_has_period_pi(j in jet(), theta in 0.0..std::f64::consts::TAU) {
        let (a, b) = (normal_curvature_theta_jet(&j, theta), normal_curvature_theta_jet(&j, theta + std::f64::consts::PI));
        prop_assert!((a - b).abs() < 1e-13 * (1.0 + a.abs()));
    }

    #[test]
    fn thm3_stated_integrand_is_twice_the_weighted_divergence((f, p) in family_and_point(), theta0 in 0.0..std::f64::consts::TAU) {
        let v = thm3_vectorfield(f, theta0);
        let r = f.jet(p).rotate_frame(theta0);
        let expected = 2.0 * (1.0 + r.f1 * r.f1).sqrt() * v.sample(p).1;
        let stated = v.stated_integrand(p);
        let scale = (1.0 + r.f1 * r.f1) * (r.f12.abs() + (r.f1 * r.f2 * r.f11).abs()) + 1e-300;
        prop_assert!((stated - expected).abs() <= 1e-12 * scale.max(1.0), "{stated} vs {expected}");
    }

    #[test]
    fn thm2_stated_integrand_equals_divergence((f, p) in family_and_point(), x in 0.0..std::f64::consts::TAU, y in 0.0..std::f64::consts::TAU) {
        let v = thm2_vectorfield(f, Direction::new(x), Direction::new(y));
        let j = f.jet(p);
        let ((fx, fxx), (fy, fyy)) = (j.directional(Direction::new(x)), j.directional(Direction::new(y)));
        let scale = (fxx * (1.0 + fy * fy)).abs() + (fyy * (1.0 + fx * fx)).abs();
        prop_assert!((v.stated_integrand(p) - v.sample(p).1).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn p1_is_a_conservative_derivative((f, p) in family_and_point()) {
        // P1/(1+f₁²)^{3/2} = ∂/∂x (f₂/√(1+f₁²))
        let g = |q: Point2| {
            let j = f.jet(q);
            j.f2 / (1.0 + j.f1 * j.f1).sqrt()
        };
        let h = 1e-5;
        let (a, b) = (p.offset(h, 0.0), p.offset(-h, 0.0));
        prop_assume!(f.contains(a) && f.contains(b));
        let fd = (g(a) - g(b)) / (2.0 * h);
        let j = f.jet(p);
        let lhs = umbilic_residuals_jet(&j).p1 / (1.0 + j.f1 * j.f1).powf(1.5);
        prop_assert!((lhs - fd).abs() < 1e-6 * (1.0 + lhs.abs()), "{lhs} vs {fd}");
    }
}

#[test]
fn sphere_cap_is_totally_umbilic() {
    let pd = principal_data(&Family::SphereCap.jet(Point2::new(0.3, 0.1)));
    assert_relative_eq!(pd.k1, 1.0, epsilon = 1e-12);
    assert_relative_eq!(pd.k2, 1.0, epsilon = 1e-12);
    assert!(pd.umbilic);
}

#[test]
fn family_jets_match_finite_differences() {
    let h = 1e-4;
    for f in Family::all_default() {
        for p in [Point2::new(0.31, -0.22), Point2::new(-0.4, 0.55), Point2::new(0.05, 0.6)] {
            if !f.contains(p) {
                continue;
            }
            let j = f.jet(p);
            let g = |dx: f64, dy: f64| f.value(p.offset(dx, dy));
            let f1 = (g(h, 0.0) - g(-h, 0.0)) / (2.0 * h);
            let f2 = (g(0.0, h) - g(0.0, -h)) / (2.0 * h);
            let f11 = (g(h, 0.0) - 2.0 * g(0.0, 0.0) + g(-h, 0.0)) / (h * h);
            let f22 = (g(0.0, h) - 2.0 * g(0.0, 0.0) + g(0.0, -h)) / (h * h);
            let f12 = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4.0 * h * h);
            let scale = 1.0 + j.f1.abs() + j.f2.abs() + j.f11.abs() + j.f12.abs() + j.f22.abs();
            for (name, a, b, tol) in [
                ("f", j.f, g(0.0, 0.0), 1e-14),
                ("f1", j.f1, f1, 1e-7),
                ("f2", j.f2, f2, 1e-7),
                ("f11", j.f11, f11, 1e-5),
                ("f12", j.f12, f12, 1e-5),
                ("f22", j.f22, f22, 1e-5),
            ] {
                assert!((a - b).abs() < tol * scale, "{f} {name} at {p:?}: {a} vs {b}");
            }
        }
    }
}
