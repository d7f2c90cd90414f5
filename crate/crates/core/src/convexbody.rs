//! Closed convex surfaces given by support functions, their umbilics, and
//! the blow-up of an umbilic into an asymptotically flat graph.
//!
//! Bodies have support functions `h(u) = c + ⟨a, u⟩ + uᵀQu` on the unit
//! sphere. The 1-homogeneous extension `H(x) = c|x| + ⟨a, x⟩ + xᵀQx/|x|` gives
//! the boundary point with outward normal `u` as `∇H(u)` and the radii of
//! curvature as the eigenvalues of `∇²H(u)` on the tangent plane.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::par::{map_indexed, Exec};
use crate::patch::{sphere_frame, Patch3, PatchJet, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBody {
    pub c: f64,
    pub a: Vec3,
    /// Symmetric.
    pub q: Matrix3<f64>,
}

impl SupportBody {
    pub fn new(c: f64, a: Vec3, q: Matrix3<f64>) -> Result<Self> {
        if !(c.is_finite() && a.iter().all(|v| v.is_finite()) && q.iter().all(|v| v.is_finite())) {
            return Err(Error::InvalidParameter("support function coefficients must be finite".into()));
        }
        if (q - q.transpose()).amax() > 1e-14 * q.amax().max(1.0) {
            return Err(Error::InvalidParameter("quadratic part must be symmetric".into()));
        }
        Ok(SupportBody { c, a, q })
    }

    /// Ball of radius `radius` centred at the origin.
    pub fn round(radius: f64) -> Self {
        SupportBody { c: radius, a: Vec3::zeros(), q: Matrix3::zeros() }
    }

    /// `h = 1 + ε(3u_z² − 1)`, written with a trace-free quadratic part.
    pub fn axial(eps: f64) -> Self {
        SupportBody { c: 1.0, a: Vec3::zeros(), q: Matrix3::from_diagonal(&Vec3::new(-eps, -eps, 2.0 * eps)) }
    }

    /// `h = 1 + αu_x² + βu_y² + γu_z²`.
    pub fn triaxial(alpha: f64, beta: f64, gamma: f64) -> Self {
        SupportBody { c: 1.0, a: Vec3::zeros(), q: Matrix3::from_diagonal(&Vec3::new(alpha, beta, gamma)) }
    }

    pub fn support(&self, u: Vec3) -> f64 {
        self.c + self.a.dot(&u) + u.dot(&(self.q * u))
    }

    /// The body rotated by `r`: `h'(u) = h(rᵀu)`.
    pub fn rotate(&self, r: &Matrix3<f64>) -> Self {
        SupportBody { c: self.c, a: r * self.a, q: r * self.q * r.transpose() }
    }

    /// The body translated by `t`: `h'(u) = h(u) + ⟨t, u⟩`.
    pub fn translate(&self, t: Vec3) -> Self {
        SupportBody { c: self.c, a: self.a + t, q: self.q }
    }

    /// Polynomial extension of the point map, exact on the unit sphere.
    fn point_map(&self, x: Vec3) -> Vec3 {
        let qx = self.q * x;
        x * self.c + self.a + qx * 2.0 - x * x.dot(&qx)
    }

    fn point_map_d1(&self, x: Vec3, w: Vec3) -> Vec3 {
        let qx = self.q * x;
        w * (self.c - x.dot(&qx)) + self.q * w * 2.0 - x * (2.0 * qx.dot(&w))
    }

    fn point_map_d2(&self, x: Vec3, w1: Vec3, w2: Vec3) -> Vec3 {
        let qx = self.q * x;
        x * (-2.0 * w1.dot(&(self.q * w2))) - w2 * (2.0 * qx.dot(&w1)) - w1 * (2.0 * qx.dot(&w2))
    }

    /// Tangent-plane matrix `∇²H` in the frame `(t1, t2)` at `u`.
    fn curvature_matrix(&self, u: Vec3, t1: Vec3, t2: Vec3) -> [[f64; 2]; 2] {
        let base = self.c - u.dot(&(self.q * u));
        let (q1, q2) = (self.q * t1, self.q * t2);
        [[base + 2.0 * t1.dot(&q1), 2.0 * t1.dot(&q2)], [2.0 * t2.dot(&q1), base + 2.0 * t2.dot(&q2)]]
    }
}

impl fmt::Display for SupportBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.q;
        write!(
            f,
            "c={} a=({},{},{}) Q=[{},{},{};{},{},{};{},{},{}]",
            self.c,
            self.a.x,
            self.a.y,
            self.a.z,
            q[(0, 0)],
            q[(0, 1)],
            q[(0, 2)],
            q[(1, 0)],
            q[(1, 1)],
            q[(1, 2)],
            q[(2, 0)],
            q[(2, 1)],
            q[(2, 2)]
        )
    }
}

impl FromStr for SupportBody {
    type Err = Error;

    /// `round[:radius]`, `axial[:eps]` or `triaxial:α,β,γ`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidParameter(format!("body '{s}': {e}")))?
        };
        match (name.trim(), nums.as_slice()) {
            ("round", []) => Ok(SupportBody::round(1.0)),
            ("round", [r]) if *r > 0.0 => Ok(SupportBody::round(*r)),
            ("axial", []) => Ok(SupportBody::axial(0.05)),
            ("axial", [e]) => Ok(SupportBody::axial(*e)),
            ("triaxial", [a, b, g]) => Ok(SupportBody::triaxial(*a, *b, *g)),
            _ => Err(Error::InvalidParameter(format!("unknown body '{s}' (expected round[:r], axial[:eps], triaxial:a,b,c)"))),
        }
    }
}

/// An orthonormal tangent frame at `u`, built from the coordinate axis least
/// aligned with `u`.
fn tangent_frame(u: Vec3) -> (Vec3, Vec3) {
    let seed = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
        Vec3::x()
    } else if u.y.abs() <= u.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    frame_from(u, seed)
}

fn frame_from(u: Vec3, seed: Vec3) -> (Vec3, Vec3) {
    let t1 = (seed - u * seed.dot(&u)).normalize();
    (t1, u.cross(&t1))
}

fn check_unit(u: Vec3) -> Result<()> {
    if !((u.norm() - 1.0).abs() < 1e-9) {
        return Err(Error::InvalidParameter(format!("normal ({}, {}, {}) is not a unit vector", u.x, u.y, u.z)));
    }
    Ok(())
}

/// The boundary point with outward normal `u`.
pub fn body_point(b: &SupportBody, u: Vec3) -> Result<Vec3> {
    check_unit(u)?;
    Ok(b.point_map(u))
}

fn sym_eigen(m: [[f64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half = (0.5 * (m[0][0] - m[1][1])).hypot(0.5 * (m[0][1] + m[1][0]));
    (mean - half, mean + half)
}

/// Principal radii `(ρ₁, ρ₂)`, `ρ₁ ≤ ρ₂`, at the point with normal `u`.
pub fn radii_of_curvature(b: &SupportBody, u: Vec3) -> Result<(f64, f64)> {
    check_unit(u)?;
    let (t1, t2) = tangent_frame(u);
    let (r1, r2) = sym_eigen(b.curvature_matrix(u, t1, t2));
    if !(r1 > 0.0) {
        return Err(Error::NotConvex { radius: r1 });
    }
    Ok((r1, r2))
}

/// `(M₁₁ − M₂₂, 2M₁₂)` in the frame `(t1, t2)`; its length is `ρ₂ − ρ₁`.
fn umbilic_residual(b: &SupportBody, t1: Vec3, t2: Vec3) -> [f64; 2] {
    // the isotropic parts cancel analytically, so only Q enters
    let (q1, q2) = (b.q * t1, b.q * t2);
    [2.0 * (t1 - t2).dot(&(q1 + q2)), 4.0 * t1.dot(&q2)]
}

/// Unit normals on a latitude–longitude lattice with `n` rows of cell-centred
/// polar angles and `2n` longitudes.
fn sphere_lattice(n: usize) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        let th = PI * (i as f64 + 0.5) / n as f64;
        for j in 0..2 * n {
            let ph = PI * j as f64 / n as f64;
            out.push(Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()));
        }
    }
    out
}

/// Smallest radius of curvature over a sampling lattice; errors when it is not positive.
pub fn check_convex(b: &SupportBody, n: usize) -> Result<f64> {
    let mut min = f64::INFINITY;
    for u in sphere_lattice(n.max(4)) {
        let (t1, t2) = tangent_frame(u);
        let (r1, _) = sym_eigen(b.curvature_matrix(u, t1, t2));
        if !(r1 > 0.0) {
            return Err(Error::NotConvex { radius: r1 });
        }
        min = min.min(r1);
    }
    Ok(min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmbilicSite {
    pub u: Vec3,
    /// `ρ₂ − ρ₁` at `u`.
    pub residual: f64,
}

const NEWTON_CAP: usize = 100;

/// Newton on the umbilic residual in a tangent chart around the current
/// iterate, with backtracking, until the residual stops decreasing.
pub fn refine_body_umbilic(b: &SupportBody, start: Vec3) -> UmbilicSite {
    let chart = |u0: Vec3, e1: Vec3, e2: Vec3, s: f64, t: f64| -> (Vec3, [f64; 2]) {
        let u = (u0 + e1 * s + e2 * t).normalize();
        // frame transported smoothly from the chart
        let (t1, t2) = frame_from(u, e1);
        (u, umbilic_residual(b, t1, t2))
    };
    let norm = |f: [f64; 2]| f[0].hypot(f[1]);
    let mut u = start.normalize();
    let (e1, e2) = tangent_frame(u);
    let mut f = chart(u, e1, e2, 0.0, 0.0).1;
    for _ in 0..NEWTON_CAP {
        let r = norm(f);
        if r == 0.0 {
            break;
        }
        let (e1, e2) = tangent_frame(u);
        let h = 1e-7;
        let fsp = chart(u, e1, e2, h, 0.0).1;
        let fsm = chart(u, e1, e2, -h, 0.0).1;
        let ftp = chart(u, e1, e2, 0.0, h).1;
        let ftm = chart(u, e1, e2, 0.0, -h).1;
        // residuals are compared in a common frame, so re-evaluate the base point in it
        let f0 = chart(u, e1, e2, 0.0, 0.0).1;
        let j = [
            [(fsp[0] - fsm[0]) / (2.0 * h), (ftp[0] - ftm[0]) / (2.0 * h)],
            [(fsp[1] - fsm[1]) / (2.0 * h), (ftp[1] - ftm[1]) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let ds = -(j[1][1] * f0[0] - j[0][1] * f0[1]) / det;
        let dt = -(-j[1][0] * f0[0] + j[0][0] * f0[1]) / det;
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let (un, fnew) = chart(u, e1, e2, step * ds, step * dt);
            if norm(fnew) < r {
                accepted = Some((un, fnew));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((un, fnew)) => {
                u = un;
                f = fnew;
            }
            None => break,
        }
    }
    UmbilicSite { u, residual: norm(f) }
}

/// All umbilics found from lattice minima of `ρ₂ − ρ₁`, refined and merged,
/// sorted by residual. A totally umbilic body yields the single site `−e_z`.
pub fn find_umbilics(b: &SupportBody, grid_n: usize) -> Result<Vec<UmbilicSite>> {
    if grid_n < 4 {
        return Err(Error::InvalidParameter(format!("grid_n must be at least 4, got {grid_n}")));
    }
    check_convex(b, grid_n)?;
    let n = grid_n;
    let lattice = sphere_lattice(n);
    let gaps: Vec<f64> = lattice
        .iter()
        .map(|&u| {
            let (t1, t2) = tangent_frame(u);
            let f = umbilic_residual(b, t1, t2);
            f[0].hypot(f[1])
        })
        .collect();
    let scale = b.c.abs() + b.q.amax();
    if gaps.iter().all(|g| *g <= 1e-14 * scale) {
        return Ok(vec![UmbilicSite { u: -Vec3::z(), residual: 0.0 }]);
    }
    let cols = 2 * n;
    let at = |i: isize, j: isize| -> Option<f64> {
        if i < 0 || i >= n as isize {
            return None;
        }
        let j = j.rem_euclid(cols as isize) as usize;
        Some(gaps[i as usize * cols + j])
    };
    let mut starts: Vec<(f64, usize)> = Vec::new();
    for i in 0..n as isize {
        for j in 0..cols as isize {
            let g = at(i, j).unwrap();
            let is_min = (-1..=1).all(|di| (-1..=1).all(|dj| (di == 0 && dj == 0) || at(i + di, j + dj).is_none_or(|v| g <= v)));
            if is_min {
                starts.push((g, i as usize * cols + j as usize));
            }
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    starts.truncate(64);
    let mut sites: Vec<UmbilicSite> = Vec::new();
    for (_, k) in starts {
        let s = refine_body_umbilic(b, lattice[k]);
        match sites.iter_mut().find(|o| line_angle(o.u, s.u) < 1e-6 && o.u.dot(&s.u) > 0.0) {
            Some(o) => {
                if s.residual < o.residual {
                    *o = s;
                }
            }
            None => sites.push(s),
        }
    }
    sites.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    Ok(sites)
}

fn line_angle(a: Vec3, b: Vec3) -> f64 {
    a.cross(&b).norm().atan2(a.dot(&b))
}

/// The best umbilic. Refinement runs to stall; the call fails, reporting the
/// residual, when the best site is above `refine_tol`.
pub fn find_umbilic(b: &SupportBody, grid_n: usize, refine_tol: f64) -> Result<UmbilicSite> {
    let sites = find_umbilics(b, grid_n)?;
    let best = sites[0];
    if best.residual > refine_tol {
        return Err(Error::NonConvergence(format!(
            "no umbilic within tolerance {refine_tol}: best residual ρ₂ − ρ₁ = {} at ({}, {}, {})",
            best.residual, best.u.x, best.u.y, best.u.z
        )));
    }
    Ok(best)
}

/// A body moved rigidly so that the point with normal `u*` sits at the origin
/// with outward normal `−e_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosedBody {
    pub body: SupportBody,
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
    pub umbilic: Vec3,
}

/// Rotation sending `u*` to `−e_z`. The azimuthal reference is the tangent
/// part of `Qu*`, so the pose follows the body under rotations; when that
/// vanishes the body is symmetric about `u*` and any reference will do.
fn pose_rotation(b: &SupportBody, u: Vec3) -> Matrix3<f64> {
    let qu = b.q * u;
    let tangential = qu - u * qu.dot(&u);
    // located umbilics carry ~1e-8 angular noise; below this the reference is noise
    let t = if b.q.amax() > 0.0 && tangential.norm() > 1e-6 * b.q.amax() { tangential.normalize() } else { tangent_frame(u).0 };
    let down = -u;
    let w = down.cross(&t);
    Matrix3::from_rows(&[t.transpose(), w.transpose(), down.transpose()])
}

pub fn pose_at_umbilic(b: &SupportBody, u_star: Vec3) -> Result<PosedBody> {
    check_unit(u_star)?;
    let u = u_star.normalize();
    let rotation = pose_rotation(b, u);
    let rotated = b.rotate(&rotation);
    let translation = -rotated.point_map(-Vec3::z());
    Ok(PosedBody { body: rotated.translate(translation), rotation, translation, umbilic: u })
}

/// Support function `h + r`, optionally divided by `1 + r`.
pub fn parallel_body(b: &SupportBody, r: f64, rescale: bool) -> Result<SupportBody> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("offset must be non-negative, got {r}")));
    }
    let out = SupportBody { c: b.c + r, a: b.a, q: b.q };
    if !rescale {
        return Ok(out);
    }
    let s = 1.0 + r;
    Ok(SupportBody { c: out.c / s, a: out.a / s, q: out.q / s })
}

/// The boundary surface parametrized by the spherical angles of its normal:
/// `u` polar angle, `v` azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPatch {
    pub body: SupportBody,
}

impl Patch3 for SupportPatch {
    fn jet(&self, u: f64, v: f64) -> PatchJet {
        let [n, nu, nv, nuu, nuv, nvv] = sphere_frame(u, v);
        let b = &self.body;
        PatchJet {
            p: b.point_map(n),
            pu: b.point_map_d1(n, nu),
            pv: b.point_map_d1(n, nv),
            puu: b.point_map_d2(n, nu, nu) + b.point_map_d1(n, nuu),
            puv: b.point_map_d2(n, nu, nv) + b.point_map_d1(n, nuv),
            pvv: b.point_map_d2(n, nv, nv) + b.point_map_d1(n, nvv),
        }
    }

    fn domain(&self) -> ([f64; 2], [f64; 2]) {
        ([0.15, PI - 0.15], [0.0, TAU])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    /// Parallel offset; `None` means ten times the largest sampled support value.
    pub offset: Option<f64>,
    pub grid_n: usize,
    pub n_azimuth: usize,
    /// Residual accepted for the located umbilic.
    pub umbilic_tol: f64,
    pub exec: Exec,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { offset: None, grid_n: 48, n_azimuth: 512, umbilic_tol: 1e-8, exec: Exec::default() }
    }
}

pub const DEFAULT_BINS: [f64; 3] = [10.0, 100.0, 1000.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineRow {
    pub r_bar: f64,
    /// `sup_θ |height − c|` on the circle of horizontal radius `r̄`.
    pub sup_height_deviation: f64,
    /// `sup_θ r̄·slope`.
    pub sup_rbar_slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub umbilic: Vec3,
    pub umbilic_residual: f64,
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
    pub offset: f64,
    /// Radius of curvature at the posed umbilic after offset and rescale.
    pub rho_star: f64,
    /// Limiting height `1/(2ρ*)` of the inverted surface.
    pub limit: f64,
    pub rows: Vec<PipelineRow>,
}

impl PipelineReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].sup_height_deviation < w[0].sup_height_deviation && w[1].sup_rbar_slope < w[0].sup_rbar_slope)
    }
}

/// One sample of the inverted surface along a meridian of normals.
#[derive(Debug, Clone, Copy)]
struct InvertedSample {
    r_bar: f64,
    height: f64,
    normal_z: f64,
    slope: f64,
}

/// Inverts the posed point with normal at angle `alpha` from `−e_z` and azimuth `(cφ, sφ)`.
fn inverted_sample(b: &SupportBody, alpha: f64, cphi: f64, sphi: f64) -> InvertedSample {
    let (sa, ca) = alpha.sin_cos();
    let n_star = -Vec3::z();
    let n = Vec3::new(sa * cphi, sa * sphi, -ca);
    let half = (0.5 * alpha).sin();
    // n − n*, with 1 − cos α written without cancellation
    let d = Vec3::new(sa * cphi, sa * sphi, 2.0 * half * half);
    let qn = n.dot(&(b.q * n));
    let q = d * (b.c - qn) + b.q * d * 2.0 - n_star * d.dot(&(b.q * (n + n_star)));
    let q2 = q.norm_squared();
    let m = q / q2;
    let qhat = q / q2.sqrt();
    let n_inv = n - qhat * (2.0 * qhat.dot(&n));
    let horizontal = n_inv.x.hypot(n_inv.y);
    InvertedSample { r_bar: m.x.hypot(m.y), height: m.z, normal_z: n_inv.z, slope: horizontal / n_inv.z.abs() }
}

const MERIDIAN_SAMPLES: usize = 256;

/// Umbilic → rigid pose → parallel offset and rescale → inversion, with decay
/// metrics of the inverted surface measured on circles of radius `bins`.
pub fn theorem1_pipeline(b: &SupportBody, bins: &[f64], opts: PipelineOptions) -> Result<PipelineReport> {
    if bins.is_empty() || bins.iter().any(|r| !(*r > 0.0)) || bins.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("radius bins must be positive and increasing: {bins:?}")));
    }
    if opts.n_azimuth < 4 {
        return Err(Error::InvalidParameter("need at least 4 azimuths".into()));
    }
    check_convex(b, opts.grid_n)?;
    let site = find_umbilic(b, opts.grid_n, opts.umbilic_tol)?;
    let offset = match opts.offset {
        Some(r) => r,
        None => 10.0 * sphere_lattice(opts.grid_n).into_iter().map(|u| b.support(u)).fold(f64::NEG_INFINITY, f64::max),
    };
    let par = parallel_body(b, offset, true)?;
    let posed = pose_at_umbilic(&par, site.u)?;
    let pb = posed.body;
    let (r1, r2) = radii_of_curvature(&pb, -Vec3::z())?;
    let rho_star = 0.5 * (r1 + r2);
    let limit = 0.5 / rho_star;

    let r_min = bins[0];
    let r_max = *bins.last().unwrap();
    let alpha_start = 0.25 / (r2.max(r1) * r_max);
    let ratio = (PI / alpha_start).powf(1.0 / (MERIDIAN_SAMPLES - 1) as f64);

    let per_azimuth = map_indexed(opts.exec, opts.n_azimuth, |k| -> Result<Vec<InvertedSample>> {
        let phi = TAU * k as f64 / opts.n_azimuth as f64;
        let (sphi, cphi) = phi.sin_cos();
        let mut prev: Option<(f64, InvertedSample)> = None;
        let mut hits = Vec::with_capacity(bins.len());
        let mut pending = bins.iter().rev().peekable();
        for i in 0..MERIDIAN_SAMPLES {
            let alpha = (alpha_start * ratio.powi(i as i32)).min(PI);
            let s = inverted_sample(&pb, alpha, cphi, sphi);
            if let Some((_, p)) = prev {
                if !(s.r_bar < p.r_bar) || s.normal_z.signum() != p.normal_z.signum() || s.normal_z == 0.0 {
                    return Err(Error::NotAGraph(format!(
                        "inverted surface folds over at azimuth {phi:.6} (normal angle {alpha:.6e})"
                    )));
                }
            } else if !(s.r_bar > r_max) {
                return Err(Error::NotAGraph(format!("innermost sample at azimuth {phi:.6} does not reach r̄ = {r_max}")));
            }
            // bins are met in decreasing order of r̄ as α grows
            while let Some(&&target) = pending.peek() {
                let (a_prev, p) = match prev {
                    Some(v) => v,
                    None => break,
                };
                if !(p.r_bar >= target && s.r_bar < target) {
                    break;
                }
                let (mut lo, mut hi) = (a_prev, alpha);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if inverted_sample(&pb, mid, cphi, sphi).r_bar >= target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hits.push(inverted_sample(&pb, 0.5 * (lo + hi), cphi, sphi));
                pending.next();
            }
            if pending.peek().is_none() && s.r_bar < 0.5 * r_min {
                break;
            }
            prev = Some((alpha, s));
        }
        if pending.peek().is_some() {
            return Err(Error::NotAGraph(format!("meridian at azimuth {phi:.6} never reaches r̄ = {r_min}")));
        }
        hits.reverse();
        Ok(hits)
    });
    let per_azimuth = per_azimuth.into_iter().collect::<Result<Vec<_>>>()?;
    let rows = bins
        .iter()
        .enumerate()
        .map(|(bi, &r_bar)| {
            let mut row = PipelineRow { r_bar, sup_height_deviation: 0.0, sup_rbar_slope: 0.0 };
            for hits in &per_azimuth {
                let s = hits[bi];
                row.sup_height_deviation = row.sup_height_deviation.max((s.height - limit).abs());
                row.sup_rbar_slope = row.sup_rbar_slope.max(r_bar * s.slope);
            }
            row
        })
        .collect();
    Ok(PipelineReport {
        umbilic: site.u,
        umbilic_residual: site.residual,
        rotation: posed.rotation,
        translation: posed.translation,
        offset,
        rho_star,
        limit,
        rows,
    })
}
