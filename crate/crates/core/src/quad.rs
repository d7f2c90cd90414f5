//! Polar-grid quadrature over disks and circles, and the decay verifiers
//! built on the divergence theorem.
//!
//! Disk integrals use a Gauss–Legendre rule on each radial annulus of width
//! at most one, composited out to `r`, times a uniform trapezoid in `θ`.
//! All reductions go through [`ordered_sum`] in node order, so results do
//! not depend on the number of worker threads.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::curvature::{thm2_vectorfield, thm3_vectorfield, PlaneField};
use crate::error::{Error, Result};
use crate::field::{Direction, Point2, ScalarField};
use crate::par::{map_indexed, ordered_sum, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadScheme {
    /// Gauss–Legendre nodes per unit annulus.
    pub n_r: usize,
    /// Uniform angular nodes.
    pub n_theta: usize,
}

impl Default for QuadScheme {
    fn default() -> Self {
        QuadScheme { n_r: 16, n_theta: 128 }
    }
}

impl QuadScheme {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 4 {
            return Err(Error::InvalidParameter(format!("n_r must be at least 4, got {n_r}")));
        }
        if n_theta < 16 || !n_theta.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("n_theta must be even and at least 16, got {n_theta}")));
        }
        Ok(QuadScheme { n_r, n_theta })
    }

    /// The same rule with both node counts doubled.
    pub fn doubled(self) -> Self {
        QuadScheme { n_r: 2 * self.n_r, n_theta: 2 * self.n_theta }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, z).1;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (z * p1 - p0) / (z * z - 1.0))
}

/// `(cos θ_j, sin θ_j)` for `θ_j = 2πj/n`.
///
/// When `8 | n` only the first octant is evaluated and the rest is filled
/// in by reflections, so the node set is exactly invariant under `x ↔ y`
/// and sign flips; integrands with an exact symmetry then cancel exactly.
pub fn unit_circle(n: usize) -> Vec<[f64; 2]> {
    let direct = |j: usize| {
        let (s, c) = (TAU * j as f64 / n as f64).sin_cos();
        [c, s]
    };
    if !n.is_multiple_of(8) {
        return (0..n).map(direct).collect();
    }
    let q = n / 4;
    (0..n)
        .map(|j| {
            let k = j % q;
            let [c, s] = if 2 * k == q {
                [FRAC_1_SQRT_2, FRAC_1_SQRT_2]
            } else if 2 * k < q {
                direct(k)
            } else {
                let [c, s] = direct(q - k);
                [s, c]
            };
            // quarter turns (x, y) ↦ (−y, x) are exact
            match j / q {
                0 => [c, s],
                1 => [-s, c],
                2 => [-c, -s],
                _ => [s, -c],
            }
        })
        .collect()
}

/// Quadrature nodes `(ρ, θ)` with weights that include the `ρ dρ dθ` Jacobian.
#[derive(Debug, Clone)]
pub struct PolarRule {
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
    /// Unit vectors of the angular nodes.
    pub directions: Vec<[f64; 2]>,
    pub angular_weight: f64,
}

impl PolarRule {
    pub fn new(r: f64, s: QuadScheme) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
        }
        let annuli = r.ceil().max(1.0) as usize;
        let width = r / annuli as f64;
        let (x, w) = gauss_legendre(s.n_r);
        let mut radii = Vec::with_capacity(annuli * s.n_r);
        let mut radial_weights = Vec::with_capacity(annuli * s.n_r);
        for a in 0..annuli {
            let lo = a as f64 * width;
            for (xi, wi) in x.iter().zip(&w) {
                let rho = lo + 0.5 * width * (xi + 1.0);
                radii.push(rho);
                radial_weights.push(0.5 * width * wi * rho);
            }
        }
        Ok(PolarRule { radii, radial_weights, directions: unit_circle(s.n_theta), angular_weight: TAU / s.n_theta as f64 })
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `i` in radial-major order and its full weight.
    pub fn node(&self, i: usize) -> (Point2, f64) {
        let nt = self.directions.len();
        let (a, b) = (i / nt, i % nt);
        let ([c, s], rho) = (self.directions[b], self.radii[a]);
        (Point2::new(rho * c, rho * s), self.radial_weights[a] * self.angular_weight)
    }
}

/// Integrates several integrands over `B_r` in one pass over the nodes.
pub fn disk_integrals_with<const K: usize, G>(exec: Exec, g: G, r: f64, s: QuadScheme) -> Result<[f64; K]>
where
    G: Fn(Point2) -> [f64; K] + Sync + Send,
{
    let rule = PolarRule::new(r, s)?;
    let terms = map_indexed(exec, rule.len(), |i| {
        let (p, w) = rule.node(i);
        g(p).map(|v| v * w)
    });
    let mut out = [0.0; K];
    let mut column = vec![0.0; terms.len()];
    for (k, slot) in out.iter_mut().enumerate() {
        for (c, t) in column.iter_mut().zip(&terms) {
            *c = t[k];
        }
        *slot = ordered_sum(&column);
    }
    Ok(out)
}

pub fn disk_integral_with<G>(exec: Exec, g: G, r: f64, s: QuadScheme) -> Result<f64>
where
    G: Fn(Point2) -> f64 + Sync + Send,
{
    Ok(disk_integrals_with(exec, |p| [g(p)], r, s)?[0])
}

/// `∫_{B_r} g dx dy`.
pub fn disk_integral<G>(g: G, r: f64, s: QuadScheme) -> Result<f64>
where
    G: Fn(Point2) -> f64 + Sync + Send,
{
    disk_integral_with(Exec::default(), g, r, s)
}

/// Outward flux and the majorant `∫‖V‖ r dθ` over the circle of radius `r`.
pub fn flux_and_majorant<V: PlaneField + ?Sized>(v: &V, r: f64, n_theta: usize) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if n_theta == 0 {
        return Err(Error::InvalidParameter("n_theta must be positive".into()));
    }
    let h = TAU / n_theta as f64;
    let (flux, norm): (Vec<f64>, Vec<f64>) = unit_circle(n_theta)
        .into_iter()
        .map(|[c, s]| {
            let ([v1, v2], _) = v.sample(Point2::new(r * c, r * s));
            ((v1 * c + v2 * s) * r * h, v1.hypot(v2) * r * h)
        })
        .unzip();
    Ok((ordered_sum(&flux), ordered_sum(&norm)))
}

/// `∮_{∂B_r} V·n ds` by the uniform trapezoid rule.
pub fn boundary_flux<V: PlaneField + ?Sized>(v: &V, r: f64, n_theta: usize) -> Result<f64> {
    Ok(flux_and_majorant(v, r, n_theta)?.0)
}

pub fn divergence_consistency_with<V: PlaneField + ?Sized>(exec: Exec, v: &V, r: f64, s: QuadScheme) -> Result<f64> {
    let area = disk_integral_with(exec, |p| v.sample(p).1, r, s)?;
    Ok((area - boundary_flux(v, r, s.n_theta)?).abs())
}

/// `|∫_{B_r} ∇·V − ∮_{∂B_r} V·n|`: the quadrature validation residual.
pub fn divergence_consistency<V: PlaneField + ?Sized>(v: &V, r: f64, s: QuadScheme) -> Result<f64> {
    divergence_consistency_with(Exec::default(), v, r, s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub r: f64,
    /// `∫_{B_r} ∇·V dx dy`.
    pub area_integral: f64,
    pub boundary_flux: f64,
    /// `∫₀^{2π} ‖V(r,θ)‖ r dθ`.
    pub majorant: f64,
    /// Area integral of the integrand as originally written, where it differs
    /// from the divergence.
    pub stated_integral: Option<f64>,
}

impl DecayRow {
    /// `stated_integral / area_integral`.
    pub fn stated_ratio(&self) -> Option<f64> {
        self.stated_integral.map(|s| s / self.area_integral)
    }

    pub fn consistency(&self) -> f64 {
        (self.area_integral - self.boundary_flux).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// Largest pointwise gap between the original integrand and the
    /// divergence over every node visited.
    pub identity_residual: f64,
}

impl DecayTable {
    /// True when `|area_integral|` strictly decreases down the table.
    pub fn area_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].area_integral.abs() < w[0].area_integral.abs())
    }

    pub fn max_consistency(&self) -> f64 {
        self.rows.iter().map(DecayRow::consistency).fold(0.0, f64::max)
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("radius ladder is empty".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("radii must be positive and strictly increasing: {radii:?}")));
    }
    Ok(())
}

pub fn verify_thm2_with<F: ScalarField>(
    exec: Exec,
    field: F,
    x: Direction,
    y: Direction,
    radii: &[f64],
    s: QuadScheme,
) -> Result<DecayTable> {
    check_radii(radii)?;
    let v = thm2_vectorfield(field, x, y);
    let mut rows = Vec::with_capacity(radii.len());
    let mut identity: f64 = 0.0;
    for &r in radii {
        let rule = PolarRule::new(r, s)?;
        let (terms, gaps): (Vec<f64>, Vec<f64>) = map_indexed(exec, rule.len(), |i| {
            let (p, w) = rule.node(i);
            let div = v.sample(p).1;
            (div * w, (v.stated_integrand(p) - div).abs())
        })
        .into_iter()
        .unzip();
        let area = ordered_sum(&terms);
        identity = gaps.into_iter().fold(identity, f64::max);
        let (flux, majorant) = flux_and_majorant(&v, r, s.n_theta)?;
        rows.push(DecayRow { r, area_integral: area, boundary_flux: flux, majorant, stated_integral: None });
    }
    Ok(DecayTable { rows, identity_residual: identity })
}

/// Decay table for the curvature-difference field of `field` in directions `x`, `y`.
pub fn verify_thm2<F: ScalarField>(field: F, x: Direction, y: Direction, radii: &[f64], s: QuadScheme) -> Result<DecayTable> {
    verify_thm2_with(Exec::default(), field, x, y, radii, s)
}

pub fn verify_thm3_with<F: ScalarField>(exec: Exec, field: F, theta0: f64, radii: &[f64], s: QuadScheme) -> Result<DecayTable> {
    check_radii(radii)?;
    let v = thm3_vectorfield(field, theta0);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let [area, stated] = disk_integrals_with(exec, |p| [v.sample(p).1, v.stated_integrand(p)], r, s)?;
        let (flux, majorant) = flux_and_majorant(&v, r, s.n_theta)?;
        rows.push(DecayRow { r, area_integral: area, boundary_flux: flux, majorant, stated_integral: Some(stated) });
    }
    Ok(DecayTable { rows, identity_residual: f64::NAN })
}

/// Decay table for the principal-angle field of `field` at angle `theta0`.
///
/// The divergence form is the primary column; the integral of `∂k/∂θ`
/// weighted as originally written is carried alongside.
pub fn verify_thm3<F: ScalarField>(field: F, theta0: f64, radii: &[f64], s: QuadScheme) -> Result<DecayTable> {
    verify_thm3_with(Exec::default(), field, theta0, radii, s)
}
