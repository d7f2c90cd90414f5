//! Möbius inversion `q ↦ q/|q|²` and outer parallel surfaces.
//!
//! Two levels are covered: the inversion of a local graph `z = f(x,y)` through
//! a vertex at the origin, which turns a neighbourhood of the vertex into an
//! exterior graph `f̄` defined far from the origin, and inversion/offset of
//! parametric patches, used to check that principal directions are carried to
//! principal directions.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::field::{fd, Jet2, Point2, ScalarField};
use crate::patch::{normal_derivatives, principal, unit_normal, Patch3, PatchJet, Vec3};

pub type Point3 = Vec3;
pub type Vector3 = Vec3;

pub fn invert_point(q: Point3) -> Result<Point3> {
    let n2 = q.norm_squared();
    if n2 == 0.0 {
        return Err(Error::Origin);
    }
    Ok(q / n2)
}

/// Differential of the inversion, `dm_q(w) = w/|q|² − 2⟨q,w⟩q/|q|⁴`.
pub fn pushforward_inversion(q: Point3, w: Vector3) -> Result<Vector3> {
    let n2 = q.norm_squared();
    if n2 == 0.0 {
        return Err(Error::Origin);
    }
    Ok(w / n2 - q * (2.0 * q.dot(&w) / (n2 * n2)))
}

/// Second differential `d²m_q[a, b]`.
fn inversion_hessian(q: Point3, a: Vector3, b: Vector3) -> Vector3 {
    let n2 = q.norm_squared();
    let n4 = n2 * n2;
    let (qa, qb) = (q.dot(&a), q.dot(&b));
    (a * qb + b * qa + q * a.dot(&b)) * (-2.0 / n4) + q * (8.0 * qa * qb / (n4 * n2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphConditionReport {
    pub passes: bool,
    /// Sampled `sup |∂f/∂r|` over `B_{r0}`.
    pub sup_fr: f64,
    pub r0: f64,
}

/// Tolerance on `|f(o)|` and `|∇f(o)|` for a field to count as posed at the origin.
pub const ORIGIN_TOL: f64 = 1e-10;

/// Checks the sufficient condition `sup |∂f/∂r| < 1` on `B_{r0}` under which the
/// inversion of `graph(f|B_{r0})` meets every vertical line at most once.
pub fn graph_condition<F: ScalarField + ?Sized>(field: &F, r0: f64, n_samples: usize) -> Result<GraphConditionReport> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidParameter(format!("r0 must be positive, got {r0}")));
    }
    let (value, [g1, g2]) = field.value_grad(Point2::ORIGIN);
    let gradient = g1.hypot(g2);
    if !(value.abs() <= ORIGIN_TOL && gradient <= ORIGIN_TOL) {
        return Err(Error::NotNormalizedAtOrigin { value, gradient });
    }
    let n = n_samples.max(4);
    let mut sup_fr: f64 = 0.0;
    for i in 1..=n {
        let r = r0 * i as f64 / n as f64;
        for k in 0..n {
            let p = Point2::from_polar(r, TAU * k as f64 / n as f64);
            let fr = if field.contains(p) {
                let (_, [f1, f2]) = field.value_grad(p);
                ((p.x * f1 + p.y * f2) / r).abs()
            } else {
                f64::INFINITY
            };
            // NaN counts as a failure
            sup_fr = if fr.is_nan() { f64::INFINITY } else { sup_fr.max(fr) };
        }
    }
    Ok(GraphConditionReport { passes: sup_fr < 1.0, sup_fr, r0 })
}

/// The field `s·f(p/s)`: the graph of `f` scaled by `s` about the origin.
#[derive(Debug, Clone, Copy)]
pub struct Rescaled<F> {
    pub field: F,
    pub scale: f64,
}

impl<F: ScalarField> ScalarField for Rescaled<F> {
    fn name(&self) -> String {
        format!("{}*{}", self.scale, self.field.name())
    }
    fn value(&self, p: Point2) -> f64 {
        self.scale * self.field.value(Point2::new(p.x / self.scale, p.y / self.scale))
    }
    fn jet(&self, p: Point2) -> Jet2 {
        let s = self.scale;
        let j = self.field.jet(Point2::new(p.x / s, p.y / s));
        Jet2::new(s * j.f, j.f1, j.f2, j.f11 / s, j.f12 / s, j.f22 / s)
    }
    fn contains(&self, p: Point2) -> bool {
        self.field.contains(Point2::new(p.x / self.scale, p.y / self.scale))
    }
}

/// Rescales a field with a positively curved umbilic at the origin so that its
/// principal curvature there is 2, i.e. `f − r²` vanishes to second order.
pub fn normalize_umbilic<F: ScalarField>(field: F) -> Result<Rescaled<F>> {
    let kappa = vertex_curvature(&field)?;
    Ok(Rescaled { field, scale: kappa / 2.0 })
}

/// Principal curvature at an umbilic vertex posed at the origin.
pub fn vertex_curvature<F: ScalarField + ?Sized>(field: &F) -> Result<f64> {
    let j = field.jet(Point2::ORIGIN);
    let kappa = 0.5 * (j.f11 + j.f22);
    let spread = (0.5 * (j.f11 - j.f22)).hypot(j.f12);
    if !(kappa > 0.0) || spread > 1e-8 * kappa {
        return Err(Error::InvalidParameter(format!(
            "origin is not a positively curved umbilic (f11={}, f12={}, f22={})",
            j.f11, j.f12, j.f22
        )));
    }
    Ok(kappa)
}

/// One evaluation of an exterior graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorSample {
    pub fbar: f64,
    /// `∂f̄/∂r̄` at fixed `θ`.
    pub fbar_rbar: f64,
    /// `∂f̄/∂θ` at fixed `r̄`.
    pub fbar_theta: f64,
    /// Radius of the preimage point on the original graph.
    pub r: f64,
}

/// The inverted graph `m(graph(f|B_{r0})) = graph(f̄)`, defined for `r̄ ≥ r̄_min`.
///
/// The correspondence `r(r̄, θ)` is solved by bisection on every call.
#[derive(Debug, Clone)]
pub struct ExteriorGraph<F> {
    field: F,
    r0: f64,
    rbar_min: f64,
    limit: Option<f64>,
}

pub const BISECTION_CAP: usize = 200;

/// Inverts the local graph of `field` over `B_{r0}` through the origin.
pub fn invert_local_graph<F: ScalarField>(field: F, r0: f64) -> Result<ExteriorGraph<F>> {
    let report = graph_condition(&field, r0, 64)?;
    if !report.passes {
        return Err(Error::GraphCondition { r0, sup_fr: report.sup_fr });
    }
    // r̄ = r/(r² + f²) on the rim; the largest value over θ bounds the domain from below
    let n_theta = 512;
    let rim_max = (0..n_theta)
        .map(|k| {
            let f = field.value(Point2::from_polar(r0, TAU * k as f64 / n_theta as f64));
            r0 / (r0 * r0 + f * f)
        })
        .fold(0.0, f64::max);
    let limit = vertex_curvature(&field).ok().map(|k| k / 2.0);
    Ok(ExteriorGraph { field, r0, rbar_min: rim_max * (1.0 + 1e-6), limit })
}

impl<F: ScalarField> ExteriorGraph<F> {
    pub fn rbar_min(&self) -> f64 {
        self.rbar_min
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn source(&self) -> &F {
        &self.field
    }

    /// Solves `r/(r² + f(r,θ)²) = r̄` on `[1/(2r̄), min(1/r̄, r0)]`.
    pub fn solve_r(&self, rbar: f64, theta: f64) -> Result<f64> {
        if !(rbar >= self.rbar_min) {
            return Err(Error::Domain { x: rbar * theta.cos(), y: rbar * theta.sin() });
        }
        let (s, c) = theta.sin_cos();
        let g = |r: f64| {
            let f = self.field.value(Point2::new(r * c, r * s));
            r / (r * r + f * f) - rbar
        };
        let mut lo = 0.5 / rbar;
        let mut hi = (1.0 / rbar).min(self.r0);
        let (g_lo, g_hi) = (g(lo), g(hi));
        if g_hi == 0.0 {
            return Ok(hi);
        }
        if !(g_lo >= 0.0 && g_hi < 0.0) {
            return Err(Error::NonConvergence(format!(
                "r-bracket [{lo}, {hi}] does not straddle r̄ = {rbar} at θ = {theta} (graph condition breached?)"
            )));
        }
        for _ in 0..BISECTION_CAP {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = 0.5 * (lo + hi);
        if hi - lo > 4.0 * f64::EPSILON * hi {
            return Err(Error::NonConvergence(format!("bisection stalled at r̄ = {rbar}, θ = {theta}")));
        }
        debug_assert!(r >= 0.5 / rbar && r <= 1.0 / rbar * (1.0 + 1e-12));
        Ok(r)
    }

    /// `f̄`, `∂f̄/∂r̄` and `∂f̄/∂θ` by the chain rule through the solved `r`.
    pub fn eval(&self, rbar: f64, theta: f64) -> Result<ExteriorSample> {
        let r = self.solve_r(rbar, theta)?;
        let p = Point2::from_polar(r, theta);
        let (f, [f1, f2]) = self.field.value_grad(p);
        let f_r = (p.x * f1 + p.y * f2) / r;
        let f_t = -p.y * f1 + p.x * f2;
        let s = r * r + f * f;
        let fbar = f / s;
        // numerators of ∂(·)/∂r over the common denominator s²
        let dfbar_dr = r * r * f_r - 2.0 * r * f - f * f * f_r;
        let drbar_dr = f * f - r * r - 2.0 * r * f * f_r;
        let fbar_rbar = dfbar_dr / drbar_dr;
        // at fixed r̄ the preimage radius moves with θ: dr/dθ = −(∂r̄/∂θ)/(∂r̄/∂r)
        let dfbar_dt = (r * r - f * f) * f_t;
        let drbar_dt = -2.0 * r * f * f_t;
        let fbar_theta = (dfbar_dt - dfbar_dr * drbar_dt / drbar_dr) / (s * s);
        Ok(ExteriorSample { fbar, fbar_rbar, fbar_theta, r })
    }
}

/// `exterior_eval` in free-function form.
pub fn exterior_eval<F: ScalarField>(g: &ExteriorGraph<F>, rbar: f64, theta: f64) -> Result<ExteriorSample> {
    g.eval(rbar, theta)
}

impl<F: ScalarField> ScalarField for ExteriorGraph<F> {
    fn name(&self) -> String {
        format!("inverted({})", self.field.name())
    }

    fn value(&self, p: Point2) -> f64 {
        let pp = p.to_polar();
        self.eval(pp.r, pp.theta).map(|s| s.fbar).unwrap_or(f64::NAN)
    }

    fn value_grad(&self, p: Point2) -> (f64, [f64; 2]) {
        let pp = p.to_polar();
        match self.eval(pp.r, pp.theta) {
            Ok(s) => {
                let (sn, cs) = pp.theta.sin_cos();
                let tangential = s.fbar_theta / pp.r;
                (s.fbar, [s.fbar_rbar * cs - tangential * sn, s.fbar_rbar * sn + tangential * cs])
            }
            Err(_) => (f64::NAN, [f64::NAN; 2]),
        }
    }

    /// Second derivatives are central differences of the chain-rule gradient.
    fn jet(&self, p: Point2) -> Jet2 {
        fd::jet_from_gradient(&|q| self.value_grad(q), p)
    }

    fn contains(&self, p: Point2) -> bool {
        p.norm() >= self.rbar_min
    }

    fn asymptotic_constant(&self) -> Option<f64> {
        self.limit
    }
}

/// Outer parallel surface `P + r·n`.
///
/// First derivatives come from the Weingarten equations; the second
/// derivatives of the normal are central differences of those.
#[derive(Debug, Clone, Copy)]
pub struct ParallelPatch<P> {
    pub base: P,
    pub r: f64,
}

const NORMAL_FD_STEP: f64 = 1e-5;

/// Builds the parallel patch at distance `r`, rejecting offsets where `1 + r·k`
/// vanishes for a sampled principal curvature `k`.
pub fn parallel_patch<P: Patch3>(base: P, r: f64) -> Result<ParallelPatch<P>> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("offset must be non-negative, got {r}")));
    }
    let ([u0, u1], [v0, v1]) = base.domain();
    let n = 16;
    for i in 0..=n {
        for k in 0..=n {
            let u = u0 + (u1 - u0) * i as f64 / n as f64;
            let v = v0 + (v1 - v0) * k as f64 / n as f64;
            let pd = principal(&base.jet(u, v))?;
            for kk in [pd.k1, pd.k2] {
                let value = 1.0 + r * kk;
                if value.abs() < 1e-12 {
                    return Err(Error::Regularity { value });
                }
            }
        }
    }
    Ok(ParallelPatch { base, r })
}

impl<P: Patch3> ParallelPatch<P> {
    fn normal_partials(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        normal_derivatives(&self.base.jet(u, v)).unwrap_or((Vec3::from_element(f64::NAN), Vec3::from_element(f64::NAN)))
    }
}

impl<P: Patch3> Patch3 for ParallelPatch<P> {
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let b = self.base.jet(u, v);
        let r = self.r;
        let n = unit_normal(&b).unwrap_or(Vec3::from_element(f64::NAN));
        let (nu, nv) = self.normal_partials(u, v);
        let h = NORMAL_FD_STEP;
        let (nu_up, nv_up) = self.normal_partials(u + h, v);
        let (nu_um, nv_um) = self.normal_partials(u - h, v);
        let (nu_vp, nv_vp) = self.normal_partials(u, v + h);
        let (nu_vm, nv_vm) = self.normal_partials(u, v - h);
        let nuu = (nu_up - nu_um) / (2.0 * h);
        let nvv = (nv_vp - nv_vm) / (2.0 * h);
        let nuv = ((nu_vp - nu_vm) + (nv_up - nv_um)) / (4.0 * h);
        PatchJet {
            p: b.p + n * r,
            pu: b.pu + nu * r,
            pv: b.pv + nv * r,
            puu: b.puu + nuu * r,
            puv: b.puv + nuv * r,
            pvv: b.pvv + nvv * r,
        }
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        self.base.domain()
    }
}

/// The patch `m ∘ P`, with derivatives by the chain rule through `dm` and `d²m`.
#[derive(Debug, Clone, Copy)]
pub struct InvertedPatch<P> {
    pub base: P,
}

impl<P: Patch3> Patch3 for InvertedPatch<P> {
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let b = self.base.jet(u, v);
        let q = b.p;
        let n2 = q.norm_squared();
        let dm = |w: Vec3| w / n2 - q * (2.0 * q.dot(&w) / (n2 * n2));
        PatchJet {
            p: q / n2,
            pu: dm(b.pu),
            pv: dm(b.pv),
            puu: inversion_hessian(q, b.pu, b.pu) + dm(b.puu),
            puv: inversion_hessian(q, b.pu, b.pv) + dm(b.puv),
            pvv: inversion_hessian(q, b.pv, b.pv) + dm(b.pvv),
        }
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        self.base.domain()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Inversion,
    Parallel(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreservationReport {
    /// Largest angle (radians, lines mod π) between a mapped principal
    /// direction and the nearest recomputed one.
    pub max_angle_error: f64,
    pub usable: usize,
    pub skipped_umbilic: usize,
}

/// Samples closer to an umbilic than this relative gap `|k₂ − k₁|/max(1,|H|)` are skipped.
pub const UMBILIC_GAP: f64 = 1e-4;

fn line_angle(a: Vec3, b: Vec3) -> f64 {
    let c = (a.dot(&b) / (a.norm() * b.norm())).abs().min(1.0);
    let s = a.cross(&b).norm() / (a.norm() * b.norm());
    s.atan2(c)
}

/// Maps the principal directions of `patch` through the transform differential
/// and measures how far they are from the principal directions recomputed on
/// the transformed patch.
pub fn principal_preservation_check<P: Patch3>(patch: P, transform: Transform, samples: usize) -> Result<PreservationReport> {
    let ([u0, u1], [v0, v1]) = patch.domain();
    let mapped: Box<dyn Patch3 + '_> = match transform {
        Transform::Inversion => Box::new(InvertedPatch { base: &patch }),
        Transform::Parallel(r) => Box::new(parallel_patch(&patch, r)?),
    };
    let mut report = PreservationReport { max_angle_error: 0.0, usable: 0, skipped_umbilic: 0 };
    // additive recurrence with golden-ratio increments: deterministic and well spread
    let (a1, a2) = (0.754_877_666_246_692_8, 0.569_840_290_998_053_3);
    let mut k = 0usize;
    while report.usable < samples && k < 50 * samples.max(1) {
        k += 1;
        let u = u0 + (u1 - u0) * (0.5 + a1 * k as f64).fract();
        let v = v0 + (v1 - v0) * (0.5 + a2 * k as f64).fract();
        let before_jet = patch.jet(u, v);
        if transform == Transform::Inversion && before_jet.p.norm_squared() < 1e-24 {
            return Err(Error::Origin);
        }
        let before = principal(&before_jet)?;
        let after_jet = mapped.jet(u, v);
        let after = principal(&after_jet)?;
        let gap_before = before.gap() / (0.5 * (before.k1 + before.k2)).abs().max(1.0);
        let gap_after = after.gap() / (0.5 * (after.k1 + after.k2)).abs().max(1.0);
        if gap_before < UMBILIC_GAP || gap_after < UMBILIC_GAP {
            report.skipped_umbilic += 1;
            continue;
        }
        for d in [before.d1, before.d2] {
            let image = match transform {
                Transform::Inversion => pushforward_inversion(before_jet.p, d)?,
                Transform::Parallel(_) => {
                    // d = a·P_u + b·P_v maps to a·Q_u + b·Q_v
                    let (a, b) = tangent_coordinates(&before_jet, d);
                    after_jet.pu * a + after_jet.pv * b
                }
            };
            let err = line_angle(image, after.d1).min(line_angle(image, after.d2));
            report.max_angle_error = report.max_angle_error.max(err);
        }
        report.usable += 1;
    }
    Ok(report)
}

fn tangent_coordinates(j: &PatchJet, d: Vec3) -> (f64, f64) {
    let (e, f, g) = (j.pu.dot(&j.pu), j.pu.dot(&j.pv), j.pv.dot(&j.pv));
    let (du, dv) = (d.dot(&j.pu), d.dot(&j.pv));
    let det = e * g - f * f;
    ((g * du - f * dv) / det, (e * dv - f * du) / det)
}
