//! Grid sampling of residual fields, zero-set extraction, sign witnesses and
//! umbilic search.

use std::fmt;
use std::str::FromStr;

use crate::curvature::{
    dk_dtheta_jet, normal_curvature_jet, normalized_discriminant, normalized_system_residual, umbilic_residuals_jet,
};
use crate::error::{Error, Result};
use crate::field::{Direction, Jet2, Point2, ScalarField};
use crate::par::{map_indexed, Exec};

/// The scalar quantity sampled on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Residual {
    /// `k(·, X) − k(·, Y)`
    DeltaK,
    /// `∂k/∂θ` at `θ₀`
    DkDtheta,
    P1,
    P2,
    D,
}

impl Residual {
    pub const ALL: [Residual; 5] = [Residual::DeltaK, Residual::DkDtheta, Residual::P1, Residual::P2, Residual::D];

    pub fn as_str(self) -> &'static str {
        match self {
            Residual::DeltaK => "delta_k",
            Residual::DkDtheta => "dk_dtheta",
            Residual::P1 => "p1",
            Residual::P2 => "p2",
            Residual::D => "d",
        }
    }

    pub fn eval(self, j: &Jet2, params: &ResidualParams) -> f64 {
        match self {
            Residual::DeltaK => normal_curvature_jet(j, params.x) - normal_curvature_jet(j, params.y),
            Residual::DkDtheta => dk_dtheta_jet(j, params.theta0),
            Residual::P1 => umbilic_residuals_jet(j).p1,
            Residual::P2 => umbilic_residuals_jet(j).p2,
            Residual::D => umbilic_residuals_jet(j).d,
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Residual {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Residual::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown residual '{s}' (expected delta_k, dk_dtheta, p1, p2 or d)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualParams {
    pub x: Direction,
    pub y: Direction,
    pub theta0: f64,
}

impl Default for ResidualParams {
    fn default() -> Self {
        ResidualParams { x: Direction::e_x(), y: Direction::e_y(), theta0: 0.0 }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Region {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!("degenerate region [{x0}, {x1}] × [{y0}, {y1}]")));
        }
        Ok(Region { x0, y0, x1, y1 })
    }

    /// `[−h, h]²`
    pub fn square(h: f64) -> Result<Self> {
        Region::new(-h, -h, h, h)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

impl FromStr for Region {
    type Err = Error;

    /// `x0,y0,x1,y1`
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("region '{s}': {e}")))?;
        match v.as_slice() {
            [x0, y0, x1, y1] => Region::new(*x0, *y0, *x1, *y1),
            _ => Err(Error::InvalidParameter(format!("region '{s}' needs four numbers x0,y0,x1,y1"))),
        }
    }
}

/// Samples on an `nx × ny` lattice including the region corners, stored
/// row-major (`values[j·nx + i]` at `x_i`, `y_j`).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    /// Samples at cell centres, `(nx−1)·(ny−1)` of them, used to resolve
    /// saddle cells. When absent the corner mean is used.
    pub centers: Option<Vec<f64>>,
}

impl Grid {
    pub fn from_fn<G: Fn(Point2) -> f64>(region: Region, nx: usize, ny: usize, g: G) -> Result<Self> {
        check_dims(nx, ny)?;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(g(lattice_point(&region, nx, ny, i as f64, j as f64)));
            }
        }
        let mut centers = Vec::with_capacity((nx - 1) * (ny - 1));
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                centers.push(g(lattice_point(&region, nx, ny, i as f64 + 0.5, j as f64 + 0.5)));
            }
        }
        Ok(Grid { region, nx, ny, values, centers: Some(centers) })
    }

    pub fn point(&self, i: usize, j: usize) -> Point2 {
        lattice_point(&self.region, self.nx, self.ny, i as f64, j as f64)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn dx(&self) -> f64 {
        (self.region.x1 - self.region.x0) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.region.y1 - self.region.y0) / (self.ny - 1) as f64
    }

    fn center(&self, i: usize, j: usize) -> f64 {
        match &self.centers {
            Some(c) => c[j * (self.nx - 1) + i],
            None => 0.25 * (self.value(i, j) + self.value(i + 1, j) + self.value(i, j + 1) + self.value(i + 1, j + 1)),
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

fn check_dims(nx: usize, ny: usize) -> Result<()> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter(format!("grid needs at least 2×2 samples, got {nx}×{ny}")));
    }
    Ok(())
}

fn lattice_point(r: &Region, nx: usize, ny: usize, i: f64, j: f64) -> Point2 {
    Point2::new(r.x0 + (r.x1 - r.x0) * i / (nx - 1) as f64, r.y0 + (r.y1 - r.y0) * j / (ny - 1) as f64)
}

pub fn grid_field_with<F: ScalarField + ?Sized>(
    exec: Exec,
    field: &F,
    residual: Residual,
    region: Region,
    nx: usize,
    ny: usize,
    params: ResidualParams,
) -> Result<Grid> {
    check_dims(nx, ny)?;
    let sample = |p: Point2| -> Result<f64> {
        let v = if field.contains(p) { residual.eval(&field.jet(p), &params) } else { f64::NAN };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain { x: p.x, y: p.y })
        }
    };
    let values = map_indexed(exec, nx * ny, |k| sample(lattice_point(&region, nx, ny, (k % nx) as f64, (k / nx) as f64)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let cx = nx - 1;
    let centers = map_indexed(exec, cx * (ny - 1), |k| {
        let p = lattice_point(&region, nx, ny, (k % cx) as f64 + 0.5, (k / cx) as f64 + 0.5);
        sample(p).ok()
    });
    // a centre outside the domain falls back to the corner mean
    let centers = if centers.iter().all(Option::is_some) { Some(centers.into_iter().flatten().collect()) } else { None };
    Ok(Grid { region, nx, ny, values, centers })
}

/// Samples `residual` of `field` on the lattice. Fails with a domain error if
/// any lattice sample is not finite.
pub fn grid_field<F: ScalarField + ?Sized>(
    field: &F,
    residual: Residual,
    region: Region,
    nx: usize,
    ny: usize,
    params: ResidualParams,
) -> Result<Grid> {
    grid_field_with(Exec::default(), field, residual, region, nx, ny, params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point2>,
    /// Closed polylines repeat no vertex; the last point joins the first.
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContourSet {
    pub lines: Vec<Polyline>,
}

impl ContourSet {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.lines.iter().map(|l| l.points.len()).sum()
    }
}

/// Identifies a lattice edge: horizontal edges first, then vertical ones.
struct EdgeIndex {
    nx: usize,
    ny: usize,
}

impl EdgeIndex {
    fn horizontal(&self, i: usize, j: usize) -> usize {
        j * (self.nx - 1) + i
    }
    fn vertical(&self, i: usize, j: usize) -> usize {
        (self.nx - 1) * self.ny + j * self.nx + i
    }
    fn count(&self) -> usize {
        (self.nx - 1) * self.ny + self.nx * (self.ny - 1)
    }
    fn endpoints(&self, e: usize) -> ((usize, usize), (usize, usize)) {
        let h = (self.nx - 1) * self.ny;
        if e < h {
            let (i, j) = (e % (self.nx - 1), e / (self.nx - 1));
            ((i, j), (i + 1, j))
        } else {
            let e = e - h;
            let (i, j) = (e % self.nx, e / self.nx);
            ((i, j), (i, j + 1))
        }
    }
}

/// Marching squares at `level`. Corners with value `≥ level` count as inside;
/// saddle cells are split according to the cell-centre sample.
pub fn contours(g: &Grid, level: f64) -> ContourSet {
    let idx = EdgeIndex { nx: g.nx, ny: g.ny };
    let inside = |i: usize, j: usize| g.value(i, j) >= level;
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let (c00, c10, c11, c01) = (inside(i, j), inside(i + 1, j), inside(i + 1, j + 1), inside(i, j + 1));
            let bottom = idx.horizontal(i, j);
            let right = idx.vertical(i + 1, j);
            let top = idx.horizontal(i, j + 1);
            let left = idx.vertical(i, j);
            let mut crossings = Vec::with_capacity(4);
            if c00 != c10 {
                crossings.push(bottom);
            }
            if c10 != c11 {
                crossings.push(right);
            }
            if c11 != c01 {
                crossings.push(top);
            }
            if c01 != c00 {
                crossings.push(left);
            }
            match crossings.len() {
                2 => segments.push((crossings[0], crossings[1])),
                4 => {
                    if (g.center(i, j) >= level) == c00 {
                        // the c00/c11 diagonal is connected; cut off the other two corners
                        segments.push((bottom, right));
                        segments.push((top, left));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => {}
            }
        }
    }

    let vertex = |e: usize| -> Point2 {
        let ((i0, j0), (i1, j1)) = idx.endpoints(e);
        let (v0, v1) = (g.value(i0, j0) - level, g.value(i1, j1) - level);
        let t = if v0 == v1 { 0.5 } else { (v0 / (v0 - v1)).clamp(0.0, 1.0) };
        let (p0, p1) = (g.point(i0, j0), g.point(i1, j1));
        Point2::new(p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y))
    };

    // each edge touches at most two segments, so the segment graph is a union of paths and cycles
    let mut incident: Vec<[usize; 2]> = vec![[usize::MAX; 2]; idx.count()];
    let mut attach = |e: usize, s: usize| {
        let slot = &mut incident[e];
        if slot[0] == usize::MAX {
            slot[0] = s;
        } else {
            slot[1] = s;
        }
    };
    for (s, &(a, b)) in segments.iter().enumerate() {
        attach(a, s);
        attach(b, s);
    }
    let degree = |e: usize| incident[e].iter().filter(|&&s| s != usize::MAX).count();
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start_edge: usize, first_seg: usize, used: &mut Vec<bool>| -> (Vec<usize>, usize) {
        let mut edges = vec![start_edge];
        let mut edge = start_edge;
        let mut seg = first_seg;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            edge = if a == edge { b } else { a };
            edges.push(edge);
            let next = incident[edge].iter().copied().find(|&s| s != usize::MAX && !used[s]);
            match next {
                Some(s) => seg = s,
                None => break,
            }
        }
        (edges, edge)
    };

    // open chains start at edges with a single segment (the grid boundary)
    for e in 0..idx.count() {
        if degree(e) == 1 && !used[incident[e][0]] {
            let (edges, _) = walk(e, incident[e][0], &mut used);
            lines.push(Polyline { points: edges.into_iter().map(vertex).collect(), closed: false });
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            let start = segments[s].0;
            let (mut edges, last) = walk(start, s, &mut used);
            if last == start {
                edges.pop();
            }
            lines.push(Polyline { points: edges.into_iter().map(vertex).collect(), closed: last == start });
        }
    }
    ContourSet { lines }
}

/// The largest positive and the most negative sample, when both exist.
pub fn sign_witness(g: &Grid) -> Option<(Point2, Point2)> {
    let mut best_pos: Option<(usize, f64)> = None;
    let mut best_neg: Option<(usize, f64)> = None;
    for (k, &v) in g.values.iter().enumerate() {
        if v > 0.0 && best_pos.is_none_or(|(_, b)| v > b) {
            best_pos = Some((k, v));
        }
        if v < 0.0 && best_neg.is_none_or(|(_, b)| v < b) {
            best_neg = Some((k, v));
        }
    }
    let at = |k: usize| g.point(k % g.nx, k / g.nx);
    Some((at(best_pos?.0), at(best_neg?.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmbilicCandidate {
    pub p: Point2,
    /// `D/(1+q)³`
    pub d_normalized: f64,
    /// `max(|P1|, |P2|)/(1+q)^{3/2}`
    pub system_residual: f64,
    /// False when refinement did not reach [`REFINED_TOL`]: a coarse minimum only.
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UmbilicSearch {
    pub candidates: Vec<UmbilicCandidate>,
    /// Set when more than half the grid is below tolerance: the region is
    /// (numerically) totally umbilic and no point list is given.
    pub totally_umbilic: bool,
}

impl UmbilicSearch {
    pub fn refined(&self) -> impl Iterator<Item = &UmbilicCandidate> {
        self.candidates.iter().filter(|c| c.refined)
    }
}

pub const REFINED_TOL: f64 = 1e-8;
/// Candidate threshold on `D/(1+q)³` that works for fields of unit curvature scale.
pub const DEFAULT_SEARCH_TOL: f64 = 1e-2;
pub const MERGE_DISTANCE: f64 = 1e-6;
const NEWTON_CAP: usize = 200;

fn system(field: &(impl ScalarField + ?Sized), p: Point2) -> [f64; 2] {
    let r = umbilic_residuals_jet(&field.jet(p));
    [r.p1, r.p2]
}

/// Damped Newton on `(P1, P2) = 0` with a central-difference Jacobian,
/// iterated until the residual stops decreasing.
pub fn refine_umbilic<F: ScalarField + ?Sized>(field: &F, start: Point2, region: &Region) -> Point2 {
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    let mut p = start;
    let mut fp = system(field, p);
    for _ in 0..NEWTON_CAP {
        let r = norm(fp);
        if r == 0.0 || !r.is_finite() {
            break;
        }
        let h = 1e-7 * p.norm().clamp(1e-3, 1.0);
        let fxp = system(field, p.offset(h, 0.0));
        let fxm = system(field, p.offset(-h, 0.0));
        let fyp = system(field, p.offset(0.0, h));
        let fym = system(field, p.offset(0.0, -h));
        let j = [
            [(fxp[0] - fxm[0]) / (2.0 * h), (fyp[0] - fym[0]) / (2.0 * h)],
            [(fxp[1] - fxm[1]) / (2.0 * h), (fyp[1] - fym[1]) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = -(j[1][1] * fp[0] - j[0][1] * fp[1]) / det;
        let dy = -(-j[1][0] * fp[0] + j[0][0] * fp[1]) / det;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let q = p.offset(t * dx, t * dy);
            if region.contains(q) && field.contains(q) {
                let fq = system(field, q);
                if norm(fq) < r {
                    accepted = Some((q, fq));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((q, fq)) => {
                p = q;
                fp = fq;
            }
            None => break,
        }
    }
    p
}

/// Grid search for umbilics: local minima of `D/(1+q)³` below `tol` are
/// refined by [`refine_umbilic`] and merged when within [`MERGE_DISTANCE`].
pub fn umbilic_search_with<F: ScalarField + ?Sized>(
    exec: Exec,
    field: &F,
    region: Region,
    n: usize,
    tol: f64,
) -> Result<UmbilicSearch> {
    check_dims(n, n)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let values = map_indexed(exec, n * n, |k| {
        let p = lattice_point(&region, n, n, (k % n) as f64, (k / n) as f64);
        if field.contains(p) {
            normalized_discriminant(&field.jet(p))
        } else {
            f64::NAN
        }
    });
    let finite = values.iter().filter(|v| v.is_finite()).count();
    let below = values.iter().filter(|v| v.abs() < tol).count();
    if finite > 0 && 2 * below > finite {
        return Ok(UmbilicSearch { candidates: Vec::new(), totally_umbilic: true });
    }
    let at = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
            f64::INFINITY
        } else {
            let v = values[j as usize * n + i as usize];
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        }
    };
    let mut starts = Vec::new();
    for j in 0..n as isize {
        for i in 0..n as isize {
            let v = at(i, j);
            if !(v < tol) {
                continue;
            }
            let is_min = (-1..=1).all(|dj| (-1..=1).all(|di| (di == 0 && dj == 0) || v <= at(i + di, j + dj)));
            if is_min {
                starts.push(lattice_point(&region, n, n, i as f64, j as f64));
            }
        }
    }
    let refined = map_indexed(exec, starts.len(), |k| {
        let p = refine_umbilic(field, starts[k], &region);
        let j = field.jet(p);
        let system_residual = normalized_system_residual(&j);
        if system_residual < REFINED_TOL {
            UmbilicCandidate { p, d_normalized: normalized_discriminant(&j), system_residual, refined: true }
        } else {
            let j0 = field.jet(starts[k]);
            UmbilicCandidate {
                p: starts[k],
                d_normalized: normalized_discriminant(&j0),
                system_residual: normalized_system_residual(&j0),
                refined: false,
            }
        }
    });
    let mut out: Vec<UmbilicCandidate> = Vec::new();
    for c in refined {
        match out.iter_mut().find(|o| (o.p.x - c.p.x).hypot(o.p.y - c.p.y) <= MERGE_DISTANCE) {
            Some(o) => {
                if c.system_residual < o.system_residual {
                    *o = c;
                }
            }
            None => out.push(c),
        }
    }
    // coarse minima that sit next to a refined point are the same basin
    let spacing = (region.x1 - region.x0).max(region.y1 - region.y0) / (n - 1) as f64;
    let refined_pts: Vec<Point2> = out.iter().filter(|c| c.refined).map(|c| c.p).collect();
    out.retain(|c| c.refined || refined_pts.iter().all(|q| (q.x - c.p.x).hypot(q.y - c.p.y) > 2.0 * spacing));
    Ok(UmbilicSearch { candidates: out, totally_umbilic: false })
}

pub fn umbilic_search<F: ScalarField + ?Sized>(field: &F, region: Region, n: usize, tol: f64) -> Result<UmbilicSearch> {
    umbilic_search_with(Exec::default(), field, region, n, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floor {
    /// `min max(|P1|, |P2|)/(1+q)^{3/2}` over the grid.
    pub value: f64,
    pub argmin: Point2,
}

pub fn umbilic_free_floor_with<F: ScalarField + ?Sized>(exec: Exec, field: &F, region: Region, n: usize) -> Result<Floor> {
    check_dims(n, n)?;
    let values = map_indexed(exec, n * n, |k| {
        let p = lattice_point(&region, n, n, (k % n) as f64, (k / n) as f64);
        if field.contains(p) {
            normalized_system_residual(&field.jet(p))
        } else {
            f64::NAN
        }
    });
    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in values.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|(_, b)| v < b) {
            best = Some((k, v));
        }
    }
    let (k, value) = best.ok_or(Error::Domain { x: region.x0, y: region.y0 })?;
    Ok(Floor { value, argmin: lattice_point(&region, n, n, (k % n) as f64, (k / n) as f64) })
}

/// Smallest normalized umbilic-system residual on an `n × n` grid. A positive
/// floor is evidence, not proof, that the region holds no umbilic.
pub fn umbilic_free_floor<F: ScalarField + ?Sized>(field: &F, region: Region, n: usize) -> Result<Floor> {
    umbilic_free_floor_with(Exec::default(), field, region, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;

    #[test]
    fn saddle_p1_grid_is_closed_form() {
        let g = grid_field(&Family::Saddle, Residual::P1, Region::square(1.0).unwrap(), 3, 3, ResidualParams::default()).unwrap();
        for j in 0..3 {
            for i in 0..3 {
                let y = g.point(i, j).y;
                assert!((g.value(i, j) - (1.0 + y * y)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn paraboloid_discriminant_vanishes_at_origin() {
        let g =
            grid_field(&Family::Paraboloid, Residual::D, Region::square(1.0).unwrap(), 5, 5, ResidualParams::default()).unwrap();
        let (lo, _) = g.min_max();
        assert_eq!(lo, 0.0);
        assert_eq!(g.value(2, 2), 0.0);
    }

    #[test]
    fn radial_delta_k_is_antisymmetric_under_swap() {
        let g =
            grid_field(&Family::GaussianBump, Residual::DeltaK, Region::square(2.0).unwrap(), 9, 9, ResidualParams::default())
                .unwrap();
        for j in 0..9 {
            for i in 0..9 {
                assert!((g.value(i, j) + g.value(j, i)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn contour_examples() {
        let r = Region::square(1.0).unwrap();
        let line = contours(&Grid::from_fn(r, 11, 11, |p| p.x).unwrap(), 0.0);
        assert_eq!(line.lines.len(), 1);
        assert!(!line.lines[0].closed);
        assert!(line.lines[0].points.iter().all(|p| p.x.abs() < 1e-12));

        assert!(contours(&Grid::from_fn(r, 11, 11, |_| 1.0).unwrap(), 0.0).is_empty());

        let g = Grid::from_fn(r, 41, 41, |p| p.x * p.x + p.y * p.y - 0.25).unwrap();
        let c = contours(&g, 0.0);
        assert_eq!(c.lines.len(), 1);
        assert!(c.lines[0].closed);
        let diag = g.dx().hypot(g.dy());
        assert!(c.lines[0].points.iter().all(|p| (p.norm() - 0.5).abs() < diag));
    }

    #[test]
    fn saddle_cell_follows_center_sample() {
        // corners + − + − around a single cell
        let r = Region::square(1.0).unwrap();
        let mut g = Grid::from_fn(r, 2, 2, |p| p.x * p.y).unwrap();
        g.centers = Some(vec![1.0]);
        let joined = contours(&g, 0.0);
        g.centers = Some(vec![-1.0]);
        let split = contours(&g, 0.0);
        assert_eq!(joined.lines.len(), 2);
        assert_eq!(split.lines.len(), 2);
        assert_ne!(joined, split);
    }

    #[test]
    fn sign_witness_examples() {
        let r = Region::square(1.0).unwrap();
        let (pos, neg) = sign_witness(&Grid::from_fn(r, 5, 5, |p| p.x).unwrap()).unwrap();
        assert!(pos.x > 0.0 && neg.x < 0.0);
        assert!(sign_witness(&Grid::from_fn(r, 5, 5, |_| 1.0).unwrap()).is_none());
    }

    #[test]
    fn umbilic_search_examples() {
        let r = Region::square(2.0).unwrap();
        let par = umbilic_search(&Family::Paraboloid, r, 40, DEFAULT_SEARCH_TOL).unwrap();
        assert_eq!(par.candidates.len(), 1, "{par:?}");
        assert!(par.candidates[0].refined && par.candidates[0].p.norm() < 1e-8, "{par:?}");

        let saddle = umbilic_search(&Family::Saddle, r, 41, DEFAULT_SEARCH_TOL).unwrap();
        assert!(saddle.candidates.is_empty() && !saddle.totally_umbilic);

        let cap = umbilic_search(&Family::SphereCap, Region::square(0.5).unwrap(), 21, 1e-8).unwrap();
        assert!(cap.totally_umbilic);
    }

    #[test]
    fn floors() {
        let r = Region::square(2.0).unwrap();
        let f = umbilic_free_floor(&Family::Paraboloid, r, 41).unwrap();
        assert_eq!(f.value, 0.0);
        assert_eq!(f.argmin, Point2::ORIGIN);
        let ridge = umbilic_free_floor(&Family::Ridge { lambda: 0.1 }, r, 41).unwrap();
        assert!(ridge.value > 0.0);
    }

    #[test]
    fn names_round_trip() {
        for r in Residual::ALL {
            assert_eq!(r.to_string().parse::<Residual>().unwrap(), r);
        }
        assert!("1,2,3".parse::<Region>().is_err());
        assert!("0,0,0,1".parse::<Region>().is_err());
        assert_eq!("-1,-2,3,4".parse::<Region>().unwrap(), Region::new(-1.0, -2.0, 3.0, 4.0).unwrap());
    }
}
