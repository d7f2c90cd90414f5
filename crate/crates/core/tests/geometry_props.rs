//! Inversion, support-function bodies and zero-set extraction against
//! closed forms.

use approx::assert_relative_eq;
use proptest::prelude::*;

use umbilic_core::convexbody::{body_point, find_umbilics, radii_of_curvature, SupportBody};
use umbilic_core::patch::Vec3;
use umbilic_core::scan::{contours, grid_field_with, umbilic_search, Grid, Region, Residual, ResidualParams};
use umbilic_core::transform::{graph_condition, invert_local_graph, invert_point, pushforward_inversion};
use umbilic_core::{Exec, Family, Point2, ScalarField};

fn nonzero_vec() -> impl Strategy<Value = Vec3> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(x, y, z)| Vec3::new(x, y, z))
        .prop_filter("away from the origin", |v| v.norm() > 1e-2)
}

fn unit_vec() -> impl Strategy<Value = Vec3> {
    nonzero_vec().prop_map(|v| v.normalize())
}

proptest! {
    #[test]
    fn inversion_is_an_involution(q in nonzero_vec()) {
        let back = invert_point(invert_point(q).unwrap()).unwrap();
        prop_assert!((back - q).norm() < 1e-14 * q.norm());
    }

    #[test]
    fn inversion_differential_is_conformal(q in nonzero_vec(), a in nonzero_vec(), b in nonzero_vec()) {
        let (da, db) = (pushforward_inversion(q, a).unwrap(), pushforward_inversion(q, b).unwrap());
        let s = 1.0 / q.norm_squared();
        assert_relative_eq!(da.norm(), s * a.norm(), max_relative = 1e-12);
        let cos = |x: Vec3, y: Vec3| x.dot(&y) / (x.norm() * y.norm());
        prop_assert!((cos(da, db) - cos(a, b)).abs() < 1e-12);
    }

    #[test]
    fn pushforward_matches_finite_difference(q in nonzero_vec(), w in unit_vec()) {
        let h = 1e-6 * q.norm();
        let fd = (invert_point(q + w * h).unwrap() - invert_point(q - w * h).unwrap()) / (2.0 * h);
        let exact = pushforward_inversion(q, w).unwrap();
        prop_assert!((fd - exact).norm() < 1e-6 * exact.norm());
    }

    #[test]
    fn support_value_is_attained_at_the_body_point(eps in -0.1..0.1f64, u in unit_vec(), v in unit_vec()) {
        let body = SupportBody::axial(eps);
        let x = body_point(&body, u).unwrap();
        // h(u) = ⟨X(u), u⟩ and h(v) ≥ ⟨X(u), v⟩ for convex bodies
        assert_relative_eq!(x.dot(&u), body.support(u), epsilon = 1e-14);
        prop_assert!(body.support(v) >= x.dot(&v) - 1e-12);
    }

    #[test]
    fn radii_sum_matches_closed_form(eps in 0.0..0.1f64, u in unit_vec()) {
        let body = SupportBody::axial(eps);
        let (r1, r2) = radii_of_curvature(&body, u).unwrap();
        prop_assert!(r1 > 0.0 && r1 <= r2);
        // ρ₁ + ρ₂ = 2h + Δ_S h, which for h = 1 + ε(3u_z² − 1) is 2 − 4ε(3u_z² − 1)
        assert_relative_eq!(r1 + r2, 2.0 - 4.0 * eps * (3.0 * u.z * u.z - 1.0), epsilon = 1e-13);
    }

    #[test]
    fn triaxial_umbilics_follow_rotations(angle in 0.0..std::f64::consts::PI, axis in unit_vec()) {
        let body = SupportBody::triaxial(-0.05, 0.01, 0.04);
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).into_inner();
        let base = find_umbilics(&body, 32).unwrap();
        let turned = find_umbilics(&body.rotate(&rot), 32).unwrap();
        prop_assert_eq!(base.len(), 4);
        prop_assert_eq!(turned.len(), 4);
        for s in &base {
            let image = rot * s.u;
            let nearest = turned.iter().map(|t| (t.u - image).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-8, "{nearest}");
        }
    }
}

#[test]
fn sphere_cap_inverts_to_a_plane_at_one_half() {
    let g = invert_local_graph(Family::SphereCap, 0.5).unwrap();
    for (rb, th) in [(2.0, 0.1), (17.0, 2.0), (900.0, 5.5)] {
        let s = g.eval(rb, th).unwrap();
        assert_relative_eq!(s.fbar, 0.5, epsilon = 1e-12);
        assert!(s.fbar_rbar.abs() < 1e-12 && s.fbar_theta.abs() < 1e-12);
    }
    let report = graph_condition(&Family::SphereCap, 0.5, 256).unwrap();
    assert!(report.sup_fr < 1.0);
    assert!(!graph_condition(&Family::SphereCap, 0.9, 256).unwrap().passes);
    assert!(invert_local_graph(Family::SphereCap, 0.9).is_err());
}

#[test]
fn exterior_graph_matches_direct_inversion_of_the_paraboloid() {
    // the graph point (r, θ, r²) inverts to radius r/(r²+r⁴) and height r²/(r²+r⁴) = 1/(1+r²)
    let g = invert_local_graph(Family::Paraboloid, 0.4).unwrap();
    for r in [0.01f64, 0.1, 0.35] {
        let rb = r / (r * r + r.powi(4));
        let s = g.eval(rb, 0.7).unwrap();
        assert_relative_eq!(s.r, r, max_relative = 1e-12);
        assert_relative_eq!(s.fbar, 1.0 / (1.0 + r * r), max_relative = 1e-12);
    }
    assert_eq!(g.asymptotic_constant(), Some(1.0));
}

#[test]
fn circle_contour_tracks_the_unit_circle() {
    let g = Grid::from_fn(Region::square(2.0).unwrap(), 81, 81, |p| p.x * p.x + p.y * p.y - 1.0).unwrap();
    let c = contours(&g, 0.0);
    assert_eq!(c.lines.len(), 1);
    assert!(c.lines[0].closed);
    for p in &c.lines[0].points {
        assert!((p.norm() - 1.0).abs() < 2e-3, "{p:?}");
    }
}

#[test]
fn grid_sampling_is_thread_independent() {
    let region = Region::square(3.0).unwrap();
    let params = ResidualParams::default();
    let a = grid_field_with(Exec::Serial, &Family::AsymBump, Residual::DkDtheta, region, 64, 48, params).unwrap();
    let b = grid_field_with(Exec::Parallel, &Family::AsymBump, Residual::DkDtheta, region, 64, 48, params).unwrap();
    assert_eq!(a, b);
}

#[test]
fn saddle_has_no_umbilics_and_the_paraboloid_exactly_one() {
    let region = Region::square(2.0).unwrap();
    assert!(umbilic_search(&Family::Saddle, region, 41, 1e-2).unwrap().candidates.is_empty());
    let s = umbilic_search(&Family::Paraboloid, region, 40, 1e-2).unwrap();
    assert_eq!(s.candidates.len(), 1);
    assert!(s.candidates[0].p.norm() < 1e-8);
    assert!(Family::Paraboloid.contains(Point2::new(1e9, -1e9)));
}
