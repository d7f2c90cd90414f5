//! Curvature of the graph `z = f(x, y)`.
//!
//! Everything here is a pure function of a [`Jet2`]; the `*_at` style wrappers
//! taking a field simply evaluate the jet first. Sign conventions: the graph is
//! oriented by the upward normal, so `f = x² + y²` has curvature `+2` at the origin.

use crate::field::{Direction, Jet2, Point2, ScalarField};

/// Default umbilic threshold on `D/(1+q)³ = 4(H² − K)`.
pub const UMBILIC_TOL: f64 = 1e-10;

/// Normal curvature of the graph along the tangent vector projecting to `dir`.
pub fn normal_curvature_jet(j: &Jet2, dir: Direction) -> f64 {
    let (fx, fxx) = j.directional(dir);
    fxx / ((1.0 + fx * fx) * (1.0 + j.grad_sq()).sqrt())
}

pub fn normal_curvature<F: ScalarField + ?Sized>(field: &F, p: Point2, dir: Direction) -> f64 {
    normal_curvature_jet(&field.jet(p), dir)
}

/// The same normal curvature written out in `θ`, as used for the rotation argument.
pub fn normal_curvature_theta_jet(j: &Jet2, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let num = j.f11 * c * c + j.f12 * (2.0 * theta).sin() + j.f22 * s * s;
    let slope = j.f1 * c + j.f2 * s;
    num / (1.0 + slope * slope) / (1.0 + j.grad_sq()).sqrt()
}

pub fn normal_curvature_theta<F: ScalarField + ?Sized>(field: &F, p: Point2, theta: f64) -> f64 {
    normal_curvature_theta_jet(&field.jet(p), theta)
}

/// `∂k/∂θ` at `θ₀`, evaluated in the frame rotated so that `X(θ₀)` is the first axis.
pub fn dk_dtheta_jet(j: &Jet2, theta0: f64) -> f64 {
    let r = j.rotate_frame(theta0);
    let a = 1.0 + r.f1 * r.f1;
    2.0 * (a * r.f12 - r.f2 * r.f1 * r.f11) / (a * a * (1.0 + r.grad_sq()).sqrt())
}

pub fn dk_dtheta<F: ScalarField + ?Sized>(field: &F, p: Point2, theta0: f64) -> f64 {
    dk_dtheta_jet(&field.jet(p), theta0)
}

/// Principal curvatures and projected principal directions at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalData {
    pub k1: f64,
    pub k2: f64,
    /// Unit (Euclidean) direction in the graph plane for `k1`.
    pub e1: [f64; 2],
    /// Unit (Euclidean) direction in the graph plane for `k2`.
    pub e2: [f64; 2],
    pub mean: f64,
    pub gauss: f64,
    /// Directions are arbitrary when set; `e1`, `e2` then hold the coordinate axes.
    pub umbilic: bool,
}

/// Shape operator `S = g⁻¹h` in graph coordinates, row major.
pub fn shape_matrix(j: &Jet2) -> [[f64; 2]; 2] {
    let q1 = 1.0 + j.grad_sq();
    let w = q1.sqrt();
    // ∇fᵀ Hf
    let t1 = j.f1 * j.f11 + j.f2 * j.f12;
    let t2 = j.f1 * j.f12 + j.f2 * j.f22;
    [[(j.f11 - j.f1 * t1 / q1) / w, (j.f12 - j.f1 * t2 / q1) / w], [(j.f12 - j.f2 * t1 / q1) / w, (j.f22 - j.f2 * t2 / q1) / w]]
}

pub fn principal_data(j: &Jet2) -> PrincipalData {
    let s = shape_matrix(j);
    let mean = 0.5 * (s[0][0] + s[1][1]);
    let gauss = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let half_gap = 0.5 * (s[0][0] - s[1][1]);
    let disc = (half_gap * half_gap + s[0][1] * s[1][0]).max(0.0);
    let root = disc.sqrt();
    let (k1, k2) = (mean - root, mean + root);
    let umbilic = normalized_discriminant(j) < UMBILIC_TOL;
    if umbilic {
        return PrincipalData { k1, k2, e1: [1.0, 0.0], e2: [0.0, 1.0], mean, gauss, umbilic };
    }
    // columns of S − kᵢI span the eigenspace of the other eigenvalue
    let e2 = dominant_column(&s, k1);
    let e1 = dominant_column(&s, k2);
    PrincipalData { k1, k2, e1, e2, mean, gauss, umbilic }
}

fn dominant_column(s: &[[f64; 2]; 2], k: f64) -> [f64; 2] {
    let c0 = [s[0][0] - k, s[1][0]];
    let c1 = [s[0][1], s[1][1] - k];
    let v = if c0[0].hypot(c0[1]) >= c1[0].hypot(c1[1]) { c0 } else { c1 };
    let n = v[0].hypot(v[1]);
    let mut e = [v[0] / n, v[1] / n];
    if e[0] < 0.0 || (e[0] == 0.0 && e[1] < 0.0) {
        e = [-e[0], -e[1]];
    }
    e
}

pub fn shape_operator<F: ScalarField + ?Sized>(field: &F, p: Point2) -> PrincipalData {
    principal_data(&field.jet(p))
}

/// Left-hand sides of the umbilic system and its single-equation form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmbilicResiduals {
    /// `(1+f₁²)f₁₂ − f₁f₂f₁₁`: vanishes iff `(1,0)` is principal.
    pub p1: f64,
    /// `(1+f₁²)f₂₂ − (1+f₂²)f₁₁`: vanishes iff `k(e_x) = k(e_y)`.
    pub p2: f64,
    /// `(f₂₂(1+f₁²) − 2f₁f₂f₁₂ + f₁₁(1+f₂²))² − 4(1+q)(f₁₁f₂₂ − f₁₂²)`.
    pub d: f64,
}

pub fn umbilic_residuals_jet(j: &Jet2) -> UmbilicResiduals {
    let a = 1.0 + j.f1 * j.f1;
    let p1 = a * j.f12 - j.f1 * j.f2 * j.f11;
    // grouped so the unit parts cancel exactly before the gradient terms are added
    let p2 = (j.f22 - j.f11) + (j.f1 * j.f1 * j.f22 - j.f2 * j.f2 * j.f11);
    let trace_term = (j.f22 + j.f11) + (j.f1 * j.f1 * j.f22 - 2.0 * j.f1 * j.f2 * j.f12 + j.f2 * j.f2 * j.f11);
    let det = j.f11 * j.f22 - j.f12 * j.f12;
    let d = trace_term * trace_term - 4.0 * (1.0 + j.grad_sq()) * det;
    UmbilicResiduals { p1, p2, d }
}

pub fn umbilic_residuals<F: ScalarField + ?Sized>(field: &F, p: Point2) -> UmbilicResiduals {
    umbilic_residuals_jet(&field.jet(p))
}

/// `D/(1+q)³`, which equals `4(H² − K)`.
pub fn normalized_discriminant(j: &Jet2) -> f64 {
    umbilic_residuals_jet(j).d / (1.0 + j.grad_sq()).powi(3)
}

/// `max(|P1|, |P2|)/(1+q)^{3/2}`.
pub fn normalized_system_residual(j: &Jet2) -> f64 {
    let r = umbilic_residuals_jet(j);
    r.p1.abs().max(r.p2.abs()) / (1.0 + j.grad_sq()).powf(1.5)
}

/// Magnitude of the terms that make up `D`, the natural scale for comparing it.
pub fn discriminant_scale(j: &Jet2) -> f64 {
    let a = 1.0 + j.f1 * j.f1;
    let b = 1.0 + j.f2 * j.f2;
    let t = (j.f22 * a).abs() + (2.0 * j.f1 * j.f2 * j.f12).abs() + (j.f11 * b).abs();
    t * t + 4.0 * (1.0 + j.grad_sq()) * ((j.f11 * j.f22).abs() + j.f12 * j.f12)
}

/// `∇·(∇f/√(1+q))`, expanded analytically from the jet.
pub fn gradient_flux_divergence(j: &Jet2) -> f64 {
    let q1 = 1.0 + j.grad_sq();
    let w = q1.sqrt();
    let laplacian = j.f11 + j.f22;
    let hess_grad = j.f1 * j.f1 * j.f11 + 2.0 * j.f1 * j.f2 * j.f12 + j.f2 * j.f2 * j.f22;
    laplacian / w - hess_grad / (q1 * w)
}

/// `(∇·(∇f/√(1+q)))² − 4 det Hess f/(1+q)²`, equal to `4(H² − K)`.
pub fn coordinate_free_discriminant(j: &Jet2) -> f64 {
    let div = gradient_flux_divergence(j);
    let q1 = 1.0 + j.grad_sq();
    div * div - 4.0 * (j.f11 * j.f22 - j.f12 * j.f12) / (q1 * q1)
}

/// A vector field on the plane together with its divergence.
pub trait PlaneField: Send + Sync {
    /// `(V(p), ∇·V(p))`
    fn sample(&self, p: Point2) -> ([f64; 2], f64);
}

/// Closure-backed plane field.
pub struct FnPlaneField<F>(pub F);

impl<F: Fn(Point2) -> ([f64; 2], f64) + Send + Sync> PlaneField for FnPlaneField<F> {
    fn sample(&self, p: Point2) -> ([f64; 2], f64) {
        (self.0)(p)
    }
}

/// The field `(uX¹ − vY¹, uX² − vY²)` with `u = f_X(1+f_Y²)`, `v = f_Y(1+f_X²)`.
///
/// Its divergence is `f_XX(1+f_Y²) − f_YY(1+f_X²)`, which is the normal curvature
/// difference `(k_X − k_Y)` weighted by `(1+f_X²)(1+f_Y²)` and the area element.
pub struct CurvatureDifferenceField<F> {
    pub field: F,
    pub x: Direction,
    pub y: Direction,
}

pub fn thm2_vectorfield<F: ScalarField>(field: F, x: Direction, y: Direction) -> CurvatureDifferenceField<F> {
    CurvatureDifferenceField { field, x, y }
}

impl<F: ScalarField> CurvatureDifferenceField<F> {
    /// `(k_X − k_Y)(1+f_X²)(1+f_Y²)√(1+q)`, computed from the normal curvatures.
    pub fn stated_integrand(&self, p: Point2) -> f64 {
        let j = self.field.jet(p);
        let (fx, _) = j.directional(self.x);
        let (fy, _) = j.directional(self.y);
        let dk = normal_curvature_jet(&j, self.x) - normal_curvature_jet(&j, self.y);
        dk * (1.0 + fx * fx) * (1.0 + fy * fy) * (1.0 + j.grad_sq()).sqrt()
    }
}

impl<F: ScalarField> PlaneField for CurvatureDifferenceField<F> {
    fn sample(&self, p: Point2) -> ([f64; 2], f64) {
        let j = self.field.jet(p);
        let (fx, fxx) = j.directional(self.x);
        let (fy, fyy) = j.directional(self.y);
        let u = fx * (1.0 + fy * fy);
        let v = fy * (1.0 + fx * fx);
        let [x1, x2] = self.x.vector();
        let [y1, y2] = self.y.vector();
        let div = fxx * (1.0 + fy * fy) - fyy * (1.0 + fx * fx);
        ([u * x1 - v * y1, u * x2 - v * y2], div)
    }
}

/// The field `(f₂/√(1+f₁²), 0)` written in the frame rotated by `θ₀` and mapped
/// back to base coordinates. Its divergence vanishes exactly where `X(θ₀)` is principal.
pub struct PrincipalAngleField<F> {
    pub field: F,
    pub theta0: f64,
}

pub fn thm3_vectorfield<F: ScalarField>(field: F, theta0: f64) -> PrincipalAngleField<F> {
    PrincipalAngleField { field, theta0 }
}

impl<F: ScalarField> PrincipalAngleField<F> {
    /// `(∂k/∂θ)(1+f_X²)√(1+q)` at `θ₀`.
    pub fn stated_integrand(&self, p: Point2) -> f64 {
        let j = self.field.jet(p);
        let r = j.rotate_frame(self.theta0);
        dk_dtheta_jet(&j, self.theta0) * (1.0 + r.f1 * r.f1) * (1.0 + j.grad_sq()).sqrt()
    }
}

impl<F: ScalarField> PlaneField for PrincipalAngleField<F> {
    fn sample(&self, p: Point2) -> ([f64; 2], f64) {
        let r = self.field.jet(p).rotate_frame(self.theta0);
        let a = 1.0 + r.f1 * r.f1;
        let along = r.f2 / a.sqrt();
        let div = (a * r.f12 - r.f1 * r.f2 * r.f11) / (a * a.sqrt());
        let (s, c) = self.theta0.sin_cos();
        ([along * c, along * s], div)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn normal_curvature_examples() {
        let o = Point2::ORIGIN;
        for t in [0.0, 0.7, 2.5] {
            assert!((normal_curvature(&Family::Paraboloid, o, Direction::new(t)) - 2.0).abs() < 1e-15);
        }
        assert!((normal_curvature(&Family::Saddle, o, Direction::new(FRAC_PI_4)) - 1.0).abs() < 1e-15);
        let cyl = Family::Cylinder { a: 1.0 };
        assert_eq!(normal_curvature(&cyl, Point2::new(0.4, -2.0), Direction::e_y()), 0.0);
    }

    #[test]
    fn theta_form_examples() {
        let o = Point2::ORIGIN;
        let vals: Vec<f64> = [0.0, FRAC_PI_4, FRAC_PI_2].iter().map(|&t| normal_curvature_theta(&Family::Saddle, o, t)).collect();
        assert!(vals[0].abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15 && vals[2].abs() < 1e-15);
        assert!((normal_curvature_theta(&Family::Paraboloid, o, 1.23) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dk_dtheta_examples() {
        assert!((dk_dtheta(&Family::Saddle, Point2::ORIGIN, 0.0) - 2.0).abs() < 1e-15);
        assert_eq!(dk_dtheta(&Family::Paraboloid, Point2::new(1.0, 0.0), 0.0), 0.0);
    }

    #[test]
    fn shape_operator_examples() {
        let par = shape_operator(&Family::Paraboloid, Point2::ORIGIN);
        assert!(par.umbilic);
        assert_eq!((par.k1, par.k2, par.mean, par.gauss), (2.0, 2.0, 2.0, 4.0));

        let sad = shape_operator(&Family::Saddle, Point2::ORIGIN);
        assert!(!sad.umbilic);
        assert_eq!((sad.k1, sad.k2, sad.mean, sad.gauss), (-1.0, 1.0, 0.0, -1.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sad.e1[0] - h).abs() < 1e-15 && (sad.e1[1] + h).abs() < 1e-15);
        assert!((sad.e2[0] - h).abs() < 1e-15 && (sad.e2[1] - h).abs() < 1e-15);

        let cap = shape_operator(&Family::SphereCap, Point2::new(0.3, 0.1));
        assert!(cap.umbilic);
        assert!((cap.k1 - 1.0).abs() < 1e-7 && (cap.k2 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn residual_examples() {
        let r = umbilic_residuals(&Family::Saddle, Point2::ORIGIN);
        assert_eq!((r.p1, r.p2, r.d), (1.0, 0.0, 4.0));
        let (x, y) = (0.7, -0.3);
        let r = umbilic_residuals(&Family::Paraboloid, Point2::new(x, y));
        assert!((r.p1 + 8.0 * x * y).abs() < 1e-14);
        assert!((r.p2 - 8.0 * (x * x - y * y)).abs() < 1e-14);
    }

    #[test]
    fn cone_type_first_equation_closed_form() {
        use crate::families::Profile;
        let lambda = 0.1;
        let f = Family::ConeType { lambda };
        for &(x, y) in &[(0.0, 0.0), (-3.0, 2.0), (5.0, -7.5), (-20.0, -20.0)] {
            let (_, g1, g2) = Profile::Cone.eval(x);
            let (_, h1, _) = Profile::Cone.eval(y);
            let expect = -lambda.powi(3) * g1 * h1 * g2;
            let p1 = umbilic_residuals(&f, Point2::new(x, y)).p1;
            assert!(p1 < 0.0);
            assert!((p1 - expect).abs() <= 1e-15 * expect.abs());
        }
    }

    #[test]
    fn thm2_field_examples() {
        let v = thm2_vectorfield(Family::Saddle, Direction::e_x(), Direction::e_y());
        assert_eq!(v.sample(Point2::new(0.3, -1.2)).1, 0.0);
        let g = thm2_vectorfield(Family::GaussianBump, Direction::e_x(), Direction::e_y());
        assert!(g.sample(Point2::new(0.6, 0.6)).1.abs() < 1e-15);
        let a = g.sample(Point2::new(0.2, 0.9)).1;
        let b = g.sample(Point2::new(0.9, 0.2)).1;
        assert!((a + b).abs() < 1e-15);
    }

    #[test]
    fn thm3_field_examples() {
        let v = thm3_vectorfield(Family::Paraboloid, 0.0);
        let (vec, _) = v.sample(Point2::new(1.0, 1.0));
        assert!((vec[0] - 2.0 / 5f64.sqrt()).abs() < 1e-15 && vec[1] == 0.0);
        let c = thm3_vectorfield(Family::Cylinder { a: 1.5 }, 0.0);
        assert_eq!(c.sample(Point2::new(-0.4, 3.0)).1, 0.0);
    }

    #[test]
    fn planar_points_count_as_umbilic() {
        let pd = shape_operator(&Family::LoglogTail, Point2::new(0.5, 0.5));
        assert!(pd.umbilic && pd.mean == 0.0 && pd.gauss == 0.0);
    }
}
