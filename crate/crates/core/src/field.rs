//! Scalar fields on the plane and their second-order jets.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::par::ordered_sum;

/// A point of the graph plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: r * c, y: r * s }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_polar(self) -> PolarPoint {
        PolarPoint::new(self.norm(), self.y.atan2(self.x))
    }

    pub fn offset(self, dx: f64, dy: f64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }
}

/// Polar coordinates with `theta` reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        debug_assert!(r >= 0.0, "negative polar radius {r}");
        Self { r, theta: reduce_angle(theta) }
    }

    pub fn to_cartesian(self) -> Point2 {
        Point2::from_polar(self.r, self.theta)
    }
}

/// Reduces an angle into `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A unit direction `X(θ) = (cos θ, sin θ)` of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    cos: f64,
    sin: f64,
}

impl Direction {
    pub fn new(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self { theta, cos, sin }
    }

    pub fn e_x() -> Self {
        Self { theta: 0.0, cos: 1.0, sin: 0.0 }
    }

    pub fn e_y() -> Self {
        Self { theta: std::f64::consts::FRAC_PI_2, cos: 0.0, sin: 1.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn vector(&self) -> [f64; 2] {
        [self.cos, self.sin]
    }

    /// The direction rotated by +π/2.
    pub fn perp(&self) -> Self {
        Self { theta: self.theta + std::f64::consts::FRAC_PI_2, cos: -self.sin, sin: self.cos }
    }
}

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
    pub f11: f64,
    pub f12: f64,
    pub f22: f64,
}

impl Jet2 {
    pub const fn new(f: f64, f1: f64, f2: f64, f11: f64, f12: f64, f22: f64) -> Self {
        Self { f, f1, f2, f11, f12, f22 }
    }

    pub fn nan() -> Self {
        Self::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    }

    /// Squared gradient norm `q = |∇f|²`.
    pub fn grad_sq(&self) -> f64 {
        self.f1 * self.f1 + self.f2 * self.f2
    }

    pub fn is_finite(&self) -> bool {
        [self.f, self.f1, self.f2, self.f11, self.f12, self.f22].iter().all(|v| v.is_finite())
    }

    /// First and second directional derivatives along `dir`.
    pub fn directional(&self, dir: Direction) -> (f64, f64) {
        let [c, s] = dir.vector();
        let fx = self.f1 * c + self.f2 * s;
        let fxx = self.f11 * c * c + 2.0 * self.f12 * c * s + self.f22 * s * s;
        (fx, fxx)
    }

    /// Mixed second derivative `f_XY = Xᵀ H Y`.
    pub fn mixed(&self, x: Direction, y: Direction) -> f64 {
        let [a, b] = x.vector();
        let [c, d] = y.vector();
        self.f11 * a * c + self.f12 * (a * d + b * c) + self.f22 * b * d
    }

    /// Expresses the jet in coordinates whose first axis is `X(theta0)`.
    pub fn rotate_frame(&self, theta0: f64) -> Jet2 {
        let (s, c) = theta0.sin_cos();
        let f1 = c * self.f1 + s * self.f2;
        let f2 = -s * self.f1 + c * self.f2;
        let f11 = c * c * self.f11 + 2.0 * c * s * self.f12 + s * s * self.f22;
        let f12 = c * s * (self.f22 - self.f11) + (c * c - s * s) * self.f12;
        let f22 = s * s * self.f11 - 2.0 * c * s * self.f12 + c * c * self.f22;
        Jet2::new(self.f, f1, f2, f11, f12, f22)
    }
}

/// A `C²` scalar field on (a subset of) the plane.
///
/// Implementors must be pure: the same point always yields the same jet.
pub trait ScalarField: Send + Sync {
    fn name(&self) -> String;

    fn value(&self, p: Point2) -> f64;

    /// Full second-order jet. Outside [`ScalarField::contains`] the result is unspecified
    /// (typically NaN); use [`eval_jet`] for a checked evaluation.
    fn jet(&self, p: Point2) -> Jet2;

    /// Value and gradient. Implementors with a cheaper first-order path override this.
    fn value_grad(&self, p: Point2) -> (f64, [f64; 2]) {
        let j = self.jet(p);
        (j.f, [j.f1, j.f2])
    }

    fn contains(&self, _p: Point2) -> bool {
        true
    }

    /// The limit of `f` at infinity, when the field is known to have one.
    fn asymptotic_constant(&self) -> Option<f64> {
        None
    }
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn name(&self) -> String {
        (**self).name()
    }
    fn value(&self, p: Point2) -> f64 {
        (**self).value(p)
    }
    fn jet(&self, p: Point2) -> Jet2 {
        (**self).jet(p)
    }
    fn value_grad(&self, p: Point2) -> (f64, [f64; 2]) {
        (**self).value_grad(p)
    }
    fn contains(&self, p: Point2) -> bool {
        (**self).contains(p)
    }
    fn asymptotic_constant(&self) -> Option<f64> {
        (**self).asymptotic_constant()
    }
}

impl<F: ScalarField + ?Sized> ScalarField for Box<F> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn value(&self, p: Point2) -> f64 {
        (**self).value(p)
    }
    fn jet(&self, p: Point2) -> Jet2 {
        (**self).jet(p)
    }
    fn value_grad(&self, p: Point2) -> (f64, [f64; 2]) {
        (**self).value_grad(p)
    }
    fn contains(&self, p: Point2) -> bool {
        (**self).contains(p)
    }
    fn asymptotic_constant(&self) -> Option<f64> {
        (**self).asymptotic_constant()
    }
}

/// Checked jet evaluation.
pub fn eval_jet<F: ScalarField + ?Sized>(field: &F, p: Point2) -> Result<Jet2> {
    if !p.is_finite() || !field.contains(p) {
        return Err(Error::Domain { x: p.x, y: p.y });
    }
    Ok(field.jet(p))
}

/// Central finite differences with the round-off balanced step sizes
/// `h₁ = ε^{1/2}·max(1,|p|)` (gradient) and `h₂ = ε^{1/3}·max(1,|p|)` (Hessian).
pub mod fd {
    use super::{Jet2, Point2};

    pub fn gradient_step(p: Point2) -> f64 {
        f64::EPSILON.sqrt() * p.norm().max(1.0)
    }

    pub fn hessian_step(p: Point2) -> f64 {
        f64::EPSILON.cbrt() * p.norm().max(1.0)
    }

    pub fn gradient_with_step<F: Fn(Point2) -> f64>(f: &F, p: Point2, h: f64) -> [f64; 2] {
        [(f(p.offset(h, 0.0)) - f(p.offset(-h, 0.0))) / (2.0 * h), (f(p.offset(0.0, h)) - f(p.offset(0.0, -h))) / (2.0 * h)]
    }

    pub fn hessian_with_step<F: Fn(Point2) -> f64>(f: &F, p: Point2, h: f64) -> [f64; 3] {
        let f0 = f(p);
        let f11 = (f(p.offset(h, 0.0)) - 2.0 * f0 + f(p.offset(-h, 0.0))) / (h * h);
        let f22 = (f(p.offset(0.0, h)) - 2.0 * f0 + f(p.offset(0.0, -h))) / (h * h);
        let f12 = (f(p.offset(h, h)) - f(p.offset(h, -h)) - f(p.offset(-h, h)) + f(p.offset(-h, -h))) / (4.0 * h * h);
        [f11, f12, f22]
    }

    /// Finite-difference jet of an arbitrary function.
    pub fn jet<F: Fn(Point2) -> f64>(f: &F, p: Point2) -> Jet2 {
        let [f1, f2] = gradient_with_step(f, p, gradient_step(p));
        let [f11, f12, f22] = hessian_with_step(f, p, hessian_step(p));
        Jet2::new(f(p), f1, f2, f11, f12, f22)
    }

    /// Jet from an exact gradient: second derivatives by central differences of the gradient.
    pub fn jet_from_gradient<G: Fn(Point2) -> (f64, [f64; 2])>(g: &G, p: Point2) -> Jet2 {
        let h = hessian_step(p);
        let (f, [f1, f2]) = g(p);
        let (_, gxp) = g(p.offset(h, 0.0));
        let (_, gxm) = g(p.offset(-h, 0.0));
        let (_, gyp) = g(p.offset(0.0, h));
        let (_, gym) = g(p.offset(0.0, -h));
        let f11 = (gxp[0] - gxm[0]) / (2.0 * h);
        let f22 = (gyp[1] - gym[1]) / (2.0 * h);
        let f12 = 0.5 * ((gxp[1] - gxm[1]) + (gyp[0] - gym[0])) / (2.0 * h);
        Jet2::new(f, f1, f2, f11, f12, f22)
    }
}

/// A field given by a closure, differentiated numerically.
pub struct FnField<F> {
    name: String,
    f: F,
    constant: Option<f64>,
}

impl<F: Fn(Point2) -> f64 + Send + Sync> FnField<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f, constant: None }
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }
}

impl<F: Fn(Point2) -> f64 + Send + Sync> ScalarField for FnField<F> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn value(&self, p: Point2) -> f64 {
        (self.f)(p)
    }
    fn jet(&self, p: Point2) -> Jet2 {
        fd::jet(&self.f, p)
    }
    fn asymptotic_constant(&self) -> Option<f64> {
        self.constant
    }
}

/// Samples on a rectangular lattice, interpolated by bicubic Catmull-Rom
/// splines and differentiated numerically.
#[derive(Debug, Clone)]
pub struct TabulatedField {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    nx: usize,
    ny: usize,
    /// Row-major, `values[j * nx + i]` at `(x0 + i·dx, y0 + j·dy)`.
    values: Vec<f64>,
}

impl TabulatedField {
    pub fn new(region: [f64; 4], nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        let [x0, y0, x1, y1] = region;
        if nx < 2 || ny < 2 || values.len() != nx * ny {
            return Err(Error::InvalidParameter(format!(
                "tabulated field needs nx, ny >= 2 and nx*ny values (got {nx}x{ny}, {})",
                values.len()
            )));
        }
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::InvalidParameter("degenerate tabulation region".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tabulated samples must be finite".into()));
        }
        Ok(Self { x0, y0, x1, y1, nx, ny, values })
    }

    /// Tabulates another field on a lattice.
    pub fn sample<F: ScalarField + ?Sized>(field: &F, region: [f64; 4], nx: usize, ny: usize) -> Result<Self> {
        let [x0, y0, x1, y1] = region;
        let dx = (x1 - x0) / (nx.max(2) - 1) as f64;
        let dy = (y1 - y0) / (ny.max(2) - 1) as f64;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(field.value(Point2::new(x0 + i as f64 * dx, y0 + j as f64 * dy)));
            }
        }
        Self::new(region, nx, ny, values)
    }

    fn at(&self, i: isize, j: isize) -> f64 {
        let i = i.clamp(0, self.nx as isize - 1) as usize;
        let j = j.clamp(0, self.ny as isize - 1) as usize;
        self.values[j * self.nx + i]
    }

    fn interpolate(&self, p: Point2) -> f64 {
        let px = p.x.clamp(self.x0, self.x1);
        let py = p.y.clamp(self.y0, self.y1);
        let gx = (px - self.x0) / (self.x1 - self.x0) * (self.nx - 1) as f64;
        let gy = (py - self.y0) / (self.y1 - self.y0) * (self.ny - 1) as f64;
        let i = (gx.floor() as isize).min(self.nx as isize - 2);
        let j = (gy.floor() as isize).min(self.ny as isize - 2);
        let tx = gx - i as f64;
        let ty = gy - j as f64;
        let mut rows = [0.0; 4];
        for (k, row) in rows.iter_mut().enumerate() {
            let jj = j - 1 + k as isize;
            *row = catmull_rom([self.at(i - 1, jj), self.at(i, jj), self.at(i + 1, jj), self.at(i + 2, jj)], tx);
        }
        catmull_rom(rows, ty)
    }
}

fn catmull_rom(p: [f64; 4], t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    0.5 * (2.0 * p[1]
        + (p[2] - p[0]) * t
        + (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * t2
        + (3.0 * p[1] - p[0] - 3.0 * p[2] + p[3]) * t3)
}

impl ScalarField for TabulatedField {
    fn name(&self) -> String {
        format!("tabulated[{}x{}]", self.nx, self.ny)
    }
    fn value(&self, p: Point2) -> f64 {
        if self.contains(p) {
            self.interpolate(p)
        } else {
            f64::NAN
        }
    }
    fn jet(&self, p: Point2) -> Jet2 {
        if !self.contains(p) {
            return Jet2::nan();
        }
        // stencil points past the hull read the clamped interpolant
        fd::jet(&|q| self.interpolate(q), p)
    }
    fn contains(&self, p: Point2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

/// Where the asymptotic constant of a decay profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantSource {
    Metadata,
    /// Mean of `f` over the largest sampled ring.
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub r: f64,
    /// Sampled `sup_θ |f(r,θ) − c|` (a lower bound of the true supremum).
    pub sup_deviation: f64,
    /// Sampled `sup_θ r·|∇f(r,θ)|`.
    pub sup_r_grad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    pub rows: Vec<DecayRow>,
    pub constant: f64,
    pub constant_source: ConstantSource,
    /// Variance of `f` over the largest ring; zero when `c` comes from metadata.
    pub constant_variance: f64,
}

/// Samples `|f − c|` and `r·|∇f|` on rings of the given radii.
pub fn decay_profile<F: ScalarField + ?Sized>(field: &F, radii: &[f64], n_theta: usize) -> Result<DecayProfile> {
    if n_theta < 8 {
        return Err(Error::InvalidParameter(format!("n_theta must be >= 8, got {n_theta}")));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must be positive and strictly increasing".into()));
    }
    let ring = |r: f64| -> Vec<(f64, [f64; 2])> {
        (0..n_theta).map(|k| field.value_grad(Point2::from_polar(r, TAU * k as f64 / n_theta as f64))).collect()
    };
    let (constant, constant_source, constant_variance) = match field.asymptotic_constant() {
        Some(c) => (c, ConstantSource::Metadata, 0.0),
        None => {
            let outer = ring(*radii.last().unwrap());
            let base = outer[0].0;
            let shifted: Vec<f64> = outer.iter().map(|(f, _)| f - base).collect();
            let mean_shift = ordered_sum(&shifted) / n_theta as f64;
            let sq: Vec<f64> = shifted.iter().map(|d| (d - mean_shift).powi(2)).collect();
            (base + mean_shift, ConstantSource::Estimated, ordered_sum(&sq) / n_theta as f64)
        }
    };
    let rows = radii
        .iter()
        .map(|&r| {
            let samples = ring(r);
            let mut sup_deviation: f64 = 0.0;
            let mut sup_r_grad: f64 = 0.0;
            for (f, g) in samples {
                sup_deviation = sup_deviation.max((f - constant).abs());
                sup_r_grad = sup_r_grad.max(r * g[0].hypot(g[1]));
            }
            DecayRow { r, sup_deviation, sup_r_grad }
        })
        .collect();
    Ok(DecayProfile { rows, constant, constant_source, constant_variance })
}
