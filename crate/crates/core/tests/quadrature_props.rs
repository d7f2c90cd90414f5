//! Quadrature against closed-form integrals, and serial/parallel agreement.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use umbilic_core::curvature::{thm2_vectorfield, FnPlaneField};
use umbilic_core::par::ordered_sum;
use umbilic_core::quad::{
    boundary_flux, disk_integral, disk_integral_with, divergence_consistency, gauss_legendre, verify_thm2_with, QuadScheme,
};
use umbilic_core::{Direction, Exec, Family};

proptest! {
    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1(n in 2usize..24, coeffs in prop::collection::vec(-1.0..1.0f64, 1..48)) {
        let degree = (2 * n - 1).min(coeffs.len() - 1);
        let (x, w) = gauss_legendre(n);
        let p = |t: f64| coeffs[..=degree].iter().rev().fold(0.0, |acc, c| acc * t + c);
        let quad: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * p(*xi)).sum();
        // ∫_{-1}^{1} t^k = 2/(k+1) for even k
        let exact: f64 = coeffs[..=degree].iter().enumerate().filter(|(k, _)| k % 2 == 0).map(|(k, c)| 2.0 * c / (k as f64 + 1.0)).sum();
        prop_assert!((quad - exact).abs() < 1e-13, "{quad} vs {exact}");
    }

    #[test]
    fn gaussian_disk_integral_matches_closed_form(r in 0.1..9.0f64) {
        let got = disk_integral(|p| (-(p.x * p.x + p.y * p.y)).exp(), r, QuadScheme::default()).unwrap();
        assert_relative_eq!(got, PI * (1.0 - (-r * r).exp()), max_relative = 1e-13);
    }

    #[test]
    fn monomial_moments(r in 0.1..5.0f64, a in 0u32..5, b in 0u32..5) {
        // ∫_{B_r} x^{2a} y^{2b} = 2 r^{2a+2b+2} Γ(a+½)Γ(b+½)/((2a+2b+2) Γ(a+b+1))
        let got = disk_integral(|p| p.x.powi(2 * a as i32) * p.y.powi(2 * b as i32), r, QuadScheme::default()).unwrap();
        let half_gamma = |k: u32| (0..k).fold(PI.sqrt(), |g, i| g * (i as f64 + 0.5));
        let fact = |k: u32| (1..=k).fold(1.0, |g, i| g * i as f64);
        let m = (a + b + 1) as f64;
        let exact = 2.0 * r.powf(2.0 * m) * half_gamma(a) * half_gamma(b) / (2.0 * m * fact(a + b));
        assert_relative_eq!(got, exact, max_relative = 1e-12);
    }

    #[test]
    fn ordered_sum_is_exact_on_dyadic_inputs(v in prop::collection::vec(-1e6..1e6f64, 0..400)) {
        // multiples of 2^-10 below 2^20 add without rounding, so every order gives the same sum
        let ints: Vec<f64> = v.iter().map(|x| (x * 1024.0).round() / 1024.0).collect();
        let mut rev = ints.clone();
        rev.reverse();
        prop_assert_eq!(ordered_sum(&ints), ints.iter().sum::<f64>());
        prop_assert_eq!(ordered_sum(&ints), ordered_sum(&rev));
    }

    #[test]
    fn ordered_sum_cancels_mirrored_terms(v in prop::collection::vec(-1e3..1e3f64, 0..200)) {
        let mut all = v.clone();
        all.extend(v.iter().map(|x| -x));
        prop_assert_eq!(ordered_sum(&all), 0.0);
    }
}

#[test]
fn divergence_theorem_on_polynomial_fields() {
    let s = QuadScheme::default();
    let v = FnPlaneField(|p: umbilic_core::Point2| ([p.x * p.x * p.y, p.y * p.y * p.y], 2.0 * p.x * p.y + 3.0 * p.y * p.y));
    for r in [0.5, 1.0, 3.7] {
        assert!(divergence_consistency(&v, r, s).unwrap() < 1e-12 * r.powi(4));
        // ∮ V·n = ∫ 3y² = 3πr⁴/4
        assert_relative_eq!(boundary_flux(&v, r, s.n_theta).unwrap(), 0.75 * PI * r.powi(4), max_relative = 1e-13);
    }
}

#[test]
fn serial_and_parallel_are_bitwise_equal() {
    let s = QuadScheme::default();
    let g = |p: umbilic_core::Point2| (p.x * 3.0).sin() * (-(p.x * p.x + p.y * p.y) / 5.0).exp();
    let a = disk_integral_with(Exec::Serial, g, 6.5, s).unwrap();
    let b = disk_integral_with(Exec::Parallel, g, 6.5, s).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    let radii = [2.0, 4.0, 8.0];
    let ta = verify_thm2_with(Exec::Serial, Family::AsymBump, Direction::e_x(), Direction::e_y(), &radii, s).unwrap();
    let tb = verify_thm2_with(Exec::Parallel, Family::AsymBump, Direction::e_x(), Direction::e_y(), &radii, s).unwrap();
    assert_eq!(ta, tb);
}

#[test]
fn thm2_flux_of_product_field_vanishes_pointwise() {
    // f = xy has f_xx = f_yy = 0, so the divergence is identically zero
    let v = thm2_vectorfield(Family::Saddle, Direction::e_x(), Direction::e_y());
    let got = disk_integral(|p| umbilic_core::curvature::PlaneField::sample(&v, p).1, 5.0, QuadScheme::default()).unwrap();
    assert_eq!(got, 0.0);
}
