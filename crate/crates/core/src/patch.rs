//! Parametric surface patches in R³ and their principal data.

use nalgebra::Vector3;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Position and first and second partial derivatives at a parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchJet {
    pub p: Vec3,
    pub pu: Vec3,
    pub pv: Vec3,
    pub puu: Vec3,
    pub puv: Vec3,
    pub pvv: Vec3,
}

/// A regular `C²` map `(u, v) ↦ R³`. The unit normal is `P_u × P_v` normalized.
pub trait Patch3: Send + Sync {
    fn jet(&self, u: f64, v: f64) -> PatchJet;

    /// `([u_min, u_max], [v_min, v_max])`
    fn domain(&self) -> ([f64; 2], [f64; 2]);

    fn point(&self, u: f64, v: f64) -> Vec3 {
        self.jet(u, v).p
    }
}

impl<P: Patch3 + ?Sized> Patch3 for &P {
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        (**self).jet(u, v)
    }
    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        (**self).domain()
    }
}

/// Principal data of a patch at one parameter point.
///
/// Curvatures follow `dn(X) = k·X`, so a sphere with its outward normal has `k = 1/R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePrincipal {
    pub normal: Vec3,
    pub k1: f64,
    pub k2: f64,
    /// Principal directions in parameter coordinates `(a, b)` ↔ `a·P_u + b·P_v`.
    pub uv1: [f64; 2],
    pub uv2: [f64; 2],
    /// Unit tangent vectors in R³.
    pub d1: Vec3,
    pub d2: Vec3,
    /// Shape operator in parameter coordinates, `W = I⁻¹·II`, row major.
    pub weingarten: [[f64; 2]; 2],
}

impl SurfacePrincipal {
    pub fn gap(&self) -> f64 {
        self.k2 - self.k1
    }
}

pub fn unit_normal(j: &PatchJet) -> Result<Vec3> {
    let n = j.pu.cross(&j.pv);
    let len = n.norm();
    if !(len > 1e-12) {
        return Err(Error::Regularity { value: len });
    }
    Ok(n / len)
}

pub fn principal(j: &PatchJet) -> Result<SurfacePrincipal> {
    let n = unit_normal(j)?;
    let (e, f, g) = (j.pu.dot(&j.pu), j.pu.dot(&j.pv), j.pv.dot(&j.pv));
    let (l, m, nn) = (-j.puu.dot(&n), -j.puv.dot(&n), -j.pvv.dot(&n));
    let det = e * g - f * f;
    let w = [[(g * l - f * m) / det, (g * m - f * nn) / det], [(e * m - f * l) / det, (e * nn - f * m) / det]];
    let mean = 0.5 * (w[0][0] + w[1][1]);
    let half_gap = 0.5 * (w[0][0] - w[1][1]);
    let root = (half_gap * half_gap + w[0][1] * w[1][0]).max(0.0).sqrt();
    let (k1, k2) = (mean - root, mean + root);
    let uv2 = dominant_column(&w, k1);
    let uv1 = dominant_column(&w, k2);
    let to3 = |c: [f64; 2]| {
        let t = j.pu * c[0] + j.pv * c[1];
        t / t.norm()
    };
    Ok(SurfacePrincipal { normal: n, k1, k2, uv1, uv2, d1: to3(uv1), d2: to3(uv2), weingarten: w })
}

fn dominant_column(w: &[[f64; 2]; 2], k: f64) -> [f64; 2] {
    let c0 = [w[0][0] - k, w[1][0]];
    let c1 = [w[0][1], w[1][1] - k];
    let v = if c0[0].hypot(c0[1]) >= c1[0].hypot(c1[1]) { c0 } else { c1 };
    let n = v[0].hypot(v[1]);
    if n == 0.0 {
        return [1.0, 0.0];
    }
    [v[0] / n, v[1] / n]
}

/// Derivatives of the unit normal, `(n_u, n_v)`, by the Weingarten equations.
pub fn normal_derivatives(j: &PatchJet) -> Result<(Vec3, Vec3)> {
    let sp = principal(j)?;
    let w = sp.weingarten;
    Ok((j.pu * w[0][0] + j.pv * w[1][0], j.pu * w[0][1] + j.pv * w[1][1]))
}

pub(crate) fn sphere_frame(u: f64, v: f64) -> [Vec3; 6] {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    let s = Vec3::new(su * cv, su * sv, cu);
    let s_u = Vec3::new(cu * cv, cu * sv, -su);
    let s_v = Vec3::new(-su * sv, su * cv, 0.0);
    let s_uu = -s;
    let s_uv = Vec3::new(-cu * sv, cu * cv, 0.0);
    let s_vv = Vec3::new(-su * cv, -su * sv, 0.0);
    [s, s_u, s_v, s_uu, s_uv, s_vv]
}

const POLE_MARGIN: f64 = 0.15;

fn sphere_domain() -> ([f64; 2], [f64; 2]) {
    ([POLE_MARGIN, PI - POLE_MARGIN], [0.0, 2.0 * PI])
}

/// Round sphere in spherical coordinates (`u` polar angle, `v` azimuth).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePatch {
    pub center: Vec3,
    pub radius: f64,
}

impl Patch3 for SpherePatch {
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let [s, s_u, s_v, s_uu, s_uv, s_vv] = sphere_frame(u, v);
        let r = self.radius;
        PatchJet { p: self.center + s * r, pu: s_u * r, pv: s_v * r, puu: s_uu * r, puv: s_uv * r, pvv: s_vv * r }
    }
    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        sphere_domain()
    }
}

/// Affine plane `o + u·a + v·b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePatch {
    pub origin: Vec3,
    pub a: Vec3,
    pub b: Vec3,
}

impl Patch3 for PlanePatch {
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let z = Vec3::zeros();
        PatchJet { p: self.origin + self.a * u + self.b * v, pu: self.a, pv: self.b, puu: z, puv: z, pvv: z }
    }
    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        ([-1.0, 1.0], [-1.0, 1.0])
    }
}

/// Axis-aligned ellipsoid with semi-axes `(a, b, c)`, centred at `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidPatch {
    pub center: Vec3,
    pub axes: Vec3,
}

impl Patch3 for EllipsoidPatch {
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let [s, s_u, s_v, s_uu, s_uv, s_vv] = sphere_frame(u, v);
        let d = |w: Vec3| w.component_mul(&self.axes);
        PatchJet { p: self.center + d(s), pu: d(s_u), pv: d(s_v), puu: d(s_uu), puv: d(s_uv), pvv: d(s_vv) }
    }
    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        sphere_domain()
    }
}

/// Radial graph `R(u,v)·s(u,v)` over the unit sphere with
/// `R = 1 + ε(0.6(x² − y²) + 0.4z)` in terms of the unit vector `s = (x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedSpherePatch {
    pub center: Vec3,
    pub eps: f64,
}

impl Patch3 for PerturbedSpherePatch {
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let [s, s_u, s_v, s_uu, s_uv, s_vv] = sphere_frame(u, v);
        let (su, cu) = u.sin_cos();
        let (s2u, c2u) = (2.0 * u).sin_cos();
        let (s2v, c2v) = (2.0 * v).sin_cos();
        let e = self.eps;
        let r = 1.0 + e * (0.6 * su * su * c2v + 0.4 * cu);
        let r_u = e * (0.6 * s2u * c2v - 0.4 * su);
        let r_v = e * (-1.2 * su * su * s2v);
        let r_uu = e * (1.2 * c2u * c2v - 0.4 * cu);
        let r_uv = e * (-1.2 * s2u * s2v);
        let r_vv = e * (-2.4 * su * su * c2v);
        PatchJet {
            p: self.center + s * r,
            pu: s * r_u + s_u * r,
            pv: s * r_v + s_v * r,
            puu: s * r_uu + s_u * (2.0 * r_u) + s_uu * r,
            puv: s * r_uv + s_u * r_v + s_v * r_u + s_uv * r,
            pvv: s * r_vv + s_v * (2.0 * r_v) + s_vv * r,
        }
    }
    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        sphere_domain()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check<P: Patch3>(patch: &P, u: f64, v: f64) {
        let h = 1e-5;
        let j = patch.jet(u, v);
        let ju = |d: f64| patch.jet(u + d, v);
        let jv = |d: f64| patch.jet(u, v + d);
        assert!(((ju(h).p - ju(-h).p) / (2.0 * h) - j.pu).norm() < 1e-8);
        assert!(((jv(h).p - jv(-h).p) / (2.0 * h) - j.pv).norm() < 1e-8);
        assert!(((ju(h).pu - ju(-h).pu) / (2.0 * h) - j.puu).norm() < 1e-8);
        assert!(((jv(h).pu - jv(-h).pu) / (2.0 * h) - j.puv).norm() < 1e-8);
        assert!(((jv(h).pv - jv(-h).pv) / (2.0 * h) - j.pvv).norm() < 1e-8);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for (u, v) in [(0.5, 0.3), (1.7, 4.0), (2.6, 2.2)] {
            fd_check(&PerturbedSpherePatch { center: Vec3::zeros(), eps: 0.2 }, u, v);
            fd_check(&EllipsoidPatch { center: Vec3::new(0.0, 1.0, 0.0), axes: Vec3::new(1.0, 2.0, 3.0) }, u, v);
            fd_check(&SpherePatch { center: Vec3::zeros(), radius: 2.0 }, u, v);
        }
    }

    #[test]
    fn sphere_curvature_is_inverse_radius() {
        let s = SpherePatch { center: Vec3::new(1.0, 2.0, 3.0), radius: 2.0 };
        let pd = principal(&s.jet(1.1, 0.4)).unwrap();
        assert!((pd.k1 - 0.5).abs() < 1e-14 && (pd.k2 - 0.5).abs() < 1e-14);
        let p = s.point(1.1, 0.4) - s.center;
        assert!((pd.normal - p / p.norm()).norm() < 1e-14);
    }

    #[test]
    fn ellipsoid_principal_directions_are_orthogonal_tangents() {
        let e = EllipsoidPatch { center: Vec3::zeros(), axes: Vec3::new(1.0, 1.5, 2.5) };
        let pd = principal(&e.jet(0.9, 0.7)).unwrap();
        assert!(pd.d1.dot(&pd.d2).abs() < 1e-12);
        assert!(pd.d1.dot(&pd.normal).abs() < 1e-14);
        assert!(pd.k1 > 0.0 && pd.k2 > pd.k1);
    }

    #[test]
    fn plane_is_flat() {
        let p = PlanePatch { origin: Vec3::zeros(), a: Vec3::x(), b: Vec3::y() };
        let pd = principal(&p.jet(0.2, 0.1)).unwrap();
        assert_eq!((pd.k1, pd.k2), (0.0, 0.0));
    }
}
