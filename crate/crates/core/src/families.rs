//! Registry of named test fields with closed-form jets.
//!
//! Field names and parameters form the `--field name[:key=value,...]`
//! vocabulary of the command-line tool, e.g. `ridge:lambda=0.1`.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{Jet2, Point2, ScalarField};

/// A one-variable profile `g` with `g′ ≠ 0` and `g″ > 0`, used by the separable family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `√(1+x²) + x`
    Cone,
    /// `eˣ`
    Exp,
}

impl Profile {
    /// `(g, g′, g″)` at `x`.
    pub fn eval(self, x: f64) -> (f64, f64, f64) {
        match self {
            Profile::Cone => {
                let s = (1.0 + x * x).sqrt();
                // s + x and 1 + x/s cancel for x < 0; use (s + x)(s − x) = 1
                let (g, gp) = if x < 0.0 { (1.0 / (s - x), 1.0 / (s * (s - x))) } else { (s + x, 1.0 + x / s) };
                (g, gp, 1.0 / (s * s * s))
            }
            Profile::Exp => {
                let e = x.exp();
                (e, e, e)
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            Profile::Cone => "cone",
            Profile::Exp => "exp",
        }
    }
}

impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cone" => Ok(Profile::Cone),
            "exp" => Ok(Profile::Exp),
            other => Err(Error::InvalidParameter(format!("unknown profile `{other}` (expected cone|exp)"))),
        }
    }
}

/// Closed-form fields with analytic jets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `xy`
    Saddle,
    /// `a·x²`
    Cylinder { a: f64 },
    /// `x² + y²`
    Paraboloid,
    /// `1 − √(1 − r²)` on the open unit disk
    SphereCap,
    /// `e^{−r²}`
    GaussianBump,
    /// `1 / (1 + r²)`
    InverseQuadratic,
    /// `χ(r)·ln ln r` with a quintic smoothstep `χ` rising on `[e, e+1]`
    LoglogTail,
    /// `1 + λ s/√(1+s²)` with `s = x + y²`
    BatesLike { lambda: f64 },
    /// `1 + λ√(1+x²)`
    Ridge { lambda: f64 },
    /// `1 + λ(√(1+x²) + x + √(1+y²) + y)`
    ConeType { lambda: f64 },
    /// `1 + λ(g(x) + h(y))`
    Separable { lambda: f64, g: Profile, h: Profile },
    /// `e^{−r²}(1 + 0.3x + 0.2xy)`
    AsymBump,
}

/// Registry entry describing a family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub formula: &'static str,
    pub domain: &'static str,
    pub asymptotically_constant: bool,
    /// `Some(true)` when the graph is expected to carry no umbilic at all.
    pub umbilic_free: Option<bool>,
    pub positively_curved: bool,
    /// Field appears in the source material (as opposed to a test-only construction).
    pub from_source: bool,
}

const REGISTRY: &[FamilySpec] = &[
    FamilySpec {
        name: "saddle",
        params: &[],
        formula: "x*y",
        domain: "R^2",
        asymptotically_constant: false,
        umbilic_free: Some(true),
        positively_curved: false,
        from_source: true,
    },
    FamilySpec {
        name: "cylinder",
        params: &["a"],
        formula: "a*x^2",
        domain: "R^2",
        asymptotically_constant: false,
        umbilic_free: Some(true),
        positively_curved: false,
        from_source: true,
    },
    FamilySpec {
        name: "paraboloid",
        params: &[],
        formula: "x^2+y^2",
        domain: "R^2",
        asymptotically_constant: false,
        umbilic_free: Some(false),
        positively_curved: true,
        from_source: true,
    },
    FamilySpec {
        name: "sphere_cap",
        params: &[],
        formula: "1-sqrt(1-r^2)",
        domain: "r<1",
        asymptotically_constant: false,
        umbilic_free: Some(false),
        positively_curved: true,
        from_source: true,
    },
    FamilySpec {
        name: "gaussian_bump",
        params: &[],
        formula: "exp(-r^2)",
        domain: "R^2",
        asymptotically_constant: true,
        umbilic_free: Some(false),
        positively_curved: false,
        from_source: false,
    },
    FamilySpec {
        name: "inverse_quadratic",
        params: &[],
        formula: "1/(1+r^2)",
        domain: "R^2",
        asymptotically_constant: true,
        umbilic_free: Some(false),
        positively_curved: false,
        from_source: false,
    },
    FamilySpec {
        name: "loglog_tail",
        params: &[],
        formula: "chi(r)*ln(ln r), chi quintic smoothstep on [e,e+1]",
        domain: "R^2",
        asymptotically_constant: false,
        umbilic_free: Some(false),
        positively_curved: false,
        from_source: true,
    },
    FamilySpec {
        name: "bates_like",
        params: &["lambda"],
        formula: "1+lambda*(x+y^2)/sqrt(1+(x+y^2)^2)",
        domain: "R^2",
        asymptotically_constant: false,
        umbilic_free: Some(true),
        positively_curved: false,
        from_source: true,
    },
    FamilySpec {
        name: "ridge",
        params: &["lambda"],
        formula: "1+lambda*sqrt(1+x^2)",
        domain: "R^2",
        asymptotically_constant: false,
        umbilic_free: Some(true),
        positively_curved: false,
        from_source: true,
    },
    FamilySpec {
        name: "cone_type",
        params: &["lambda"],
        formula: "1+lambda*(sqrt(1+x^2)+x+sqrt(1+y^2)+y)",
        domain: "R^2",
        asymptotically_constant: false,
        umbilic_free: Some(true),
        positively_curved: true,
        from_source: true,
    },
    FamilySpec {
        name: "separable",
        params: &["lambda", "g", "h"],
        formula: "1+lambda*(g(x)+h(y)), g,h in {cone,exp}",
        domain: "R^2",
        asymptotically_constant: false,
        umbilic_free: Some(true),
        positively_curved: true,
        from_source: true,
    },
    FamilySpec {
        name: "asym_bump",
        params: &[],
        formula: "exp(-r^2)*(1+0.3x+0.2xy)",
        domain: "R^2",
        asymptotically_constant: true,
        umbilic_free: None,
        positively_curved: false,
        from_source: false,
    },
];

/// Every registered family with its metadata.
pub fn list_families() -> &'static [FamilySpec] {
    REGISTRY
}

const DEFAULT_LAMBDA: f64 = 0.1;

/// Builds a family from its registry name and `key=value` parameters.
pub fn make_field(name: &str, params: &[(&str, &str)]) -> Result<Family> {
    let spec = REGISTRY.iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownFamily(name.to_string()))?;
    for (key, _) in params {
        let key = canonical_key(key);
        if !spec.params.contains(&key) {
            return Err(Error::InvalidParameter(format!("family `{name}` has no parameter `{key}`")));
        }
    }
    let lookup = |key: &str| params.iter().find(|(k, _)| canonical_key(k) == key).map(|(_, v)| *v);
    let number = |key: &str, default: f64| -> Result<f64> {
        match lookup(key) {
            None => Ok(default),
            Some(v) => v.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("`{key}={v}` is not a number"))),
        }
    };
    let positive_lambda = || -> Result<f64> {
        let lambda = number("lambda", DEFAULT_LAMBDA)?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("family `{name}` requires lambda > 0, got {lambda}")));
        }
        Ok(lambda)
    };
    Ok(match name {
        "saddle" => Family::Saddle,
        "cylinder" => {
            let a = number("a", 1.0)?;
            if a == 0.0 || !a.is_finite() {
                return Err(Error::InvalidParameter("cylinder requires a finite a != 0".into()));
            }
            Family::Cylinder { a }
        }
        "paraboloid" => Family::Paraboloid,
        "sphere_cap" => Family::SphereCap,
        "gaussian_bump" => Family::GaussianBump,
        "inverse_quadratic" => Family::InverseQuadratic,
        "loglog_tail" => Family::LoglogTail,
        "bates_like" => Family::BatesLike { lambda: positive_lambda()? },
        "ridge" => Family::Ridge { lambda: positive_lambda()? },
        "cone_type" => Family::ConeType { lambda: positive_lambda()? },
        "separable" => Family::Separable {
            lambda: positive_lambda()?,
            g: lookup("g").unwrap_or("cone").parse()?,
            h: lookup("h").unwrap_or("exp").parse()?,
        },
        "asym_bump" => Family::AsymBump,
        _ => unreachable!("registry and constructor out of sync for `{name}`"),
    })
}

fn canonical_key(key: &str) -> &str {
    match key.trim() {
        "λ" | "l" | "lam" => "lambda",
        k => k,
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `name` or `name:key=value,key=value`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s.trim(), None),
        };
        let mut params = Vec::new();
        if let Some(rest) = rest {
            for item in rest.split(',').filter(|i| !i.trim().is_empty()) {
                let (k, v) =
                    item.split_once('=').ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{item}`")))?;
                params.push((k.trim(), v.trim()));
            }
        }
        make_field(name, &params)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cylinder { a } => write!(f, "cylinder:a={a}"),
            Family::BatesLike { lambda } => write!(f, "bates_like:lambda={lambda}"),
            Family::Ridge { lambda } => write!(f, "ridge:lambda={lambda}"),
            Family::ConeType { lambda } => write!(f, "cone_type:lambda={lambda}"),
            Family::Separable { lambda, g, h } => {
                write!(f, "separable:lambda={lambda},g={},h={}", g.name(), h.name())
            }
            other => f.write_str(other.spec().name),
        }
    }
}

impl Family {
    pub fn spec(&self) -> &'static FamilySpec {
        let name = match self {
            Family::Saddle => "saddle",
            Family::Cylinder { .. } => "cylinder",
            Family::Paraboloid => "paraboloid",
            Family::SphereCap => "sphere_cap",
            Family::GaussianBump => "gaussian_bump",
            Family::InverseQuadratic => "inverse_quadratic",
            Family::LoglogTail => "loglog_tail",
            Family::BatesLike { .. } => "bates_like",
            Family::Ridge { .. } => "ridge",
            Family::ConeType { .. } => "cone_type",
            Family::Separable { .. } => "separable",
            Family::AsymBump => "asym_bump",
        };
        REGISTRY.iter().find(|s| s.name == name).expect("every variant is registered")
    }

    /// All families with default parameters, in registry order.
    pub fn all_default() -> Vec<Family> {
        REGISTRY.iter().map(|s| make_field(s.name, &[]).expect("defaults are valid")).collect()
    }

    /// Limit of `f` along the ray at angle `theta`, where known in closed form.
    pub fn limit_along(&self, theta: f64) -> Option<f64> {
        match *self {
            Family::GaussianBump | Family::InverseQuadratic | Family::AsymBump => Some(0.0),
            Family::BatesLike { lambda } => {
                // s = x + y² → −∞ only along the negative x-axis
                let (s, c) = theta.sin_cos();
                if s.abs() < 1e-15 && c < 0.0 {
                    Some(1.0 - lambda)
                } else {
                    Some(1.0 + lambda)
                }
            }
            _ => None,
        }
    }
}

/// Jet of a radial field from `F(r)`, `F′(r)/r` and `F″(r)`.
fn radial_jet(p: Point2, f: f64, fp_over_r: f64, fpp: f64) -> Jet2 {
    let r2 = p.x * p.x + p.y * p.y;
    let (f11, f12, f22) = if r2 == 0.0 {
        (fp_over_r, 0.0, fp_over_r)
    } else {
        let d = (fpp - fp_over_r) / r2;
        (fp_over_r + d * p.x * p.x, d * p.x * p.y, fp_over_r + d * p.y * p.y)
    };
    Jet2::new(f, fp_over_r * p.x, fp_over_r * p.y, f11, f12, f22)
}

fn smoothstep5(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let t2 = t * t;
        let t3 = t2 * t;
        (t3 * (10.0 - 15.0 * t + 6.0 * t2), 30.0 * t2 * (1.0 - t) * (1.0 - t), 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t))
    }
}

impl ScalarField for Family {
    fn name(&self) -> String {
        self.to_string()
    }

    fn value(&self, p: Point2) -> f64 {
        match *self {
            Family::Saddle => p.x * p.y,
            Family::Cylinder { a } => a * p.x * p.x,
            Family::Paraboloid => p.x * p.x + p.y * p.y,
            Family::SphereCap => {
                let r2 = p.x * p.x + p.y * p.y;
                if r2 < 1.0 {
                    // 1 − √(1−r²) = r²/(1 + √(1−r²)), stable near the vertex
                    r2 / (1.0 + (1.0 - r2).sqrt())
                } else {
                    f64::NAN
                }
            }
            Family::GaussianBump => (-(p.x * p.x + p.y * p.y)).exp(),
            Family::InverseQuadratic => 1.0 / (1.0 + p.x * p.x + p.y * p.y),
            Family::AsymBump => (-(p.x * p.x + p.y * p.y)).exp() * (1.0 + 0.3 * p.x + 0.2 * p.x * p.y),
            _ => self.jet(p).f,
        }
    }

    fn jet(&self, p: Point2) -> Jet2 {
        let (x, y) = (p.x, p.y);
        match *self {
            Family::Saddle => Jet2::new(x * y, y, x, 0.0, 1.0, 0.0),
            Family::Cylinder { a } => Jet2::new(a * x * x, 2.0 * a * x, 0.0, 2.0 * a, 0.0, 0.0),
            Family::Paraboloid => Jet2::new(x * x + y * y, 2.0 * x, 2.0 * y, 2.0, 0.0, 2.0),
            Family::SphereCap => {
                let r2 = x * x + y * y;
                if r2 >= 1.0 {
                    return Jet2::nan();
                }
                let w = (1.0 - r2).sqrt();
                radial_jet(p, r2 / (1.0 + w), 1.0 / w, 1.0 / (w * w * w))
            }
            Family::GaussianBump => {
                let r2 = x * x + y * y;
                let e = (-r2).exp();
                radial_jet(p, e, -2.0 * e, (4.0 * r2 - 2.0) * e)
            }
            Family::InverseQuadratic => {
                let r2 = x * x + y * y;
                let d = 1.0 / (1.0 + r2);
                radial_jet(p, d, -2.0 * d * d, (6.0 * r2 - 2.0) * d * d * d)
            }
            Family::LoglogTail => {
                let r = p.norm();
                if r <= E {
                    return Jet2::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
                }
                let lr = r.ln();
                let l = lr.ln();
                let lp = 1.0 / (r * lr);
                let lpp = -(lr + 1.0) / (r * lr).powi(2);
                let (s, sp, spp) = smoothstep5(r - E);
                let f = s * l;
                let fp = sp * l + s * lp;
                let fpp = spp * l + 2.0 * sp * lp + s * lpp;
                radial_jet(p, f, fp / r, fpp)
            }
            Family::BatesLike { lambda } => {
                let s = x + y * y;
                let w = 1.0 + s * s;
                let phi = s / w.sqrt();
                let phi1 = w.powf(-1.5);
                let phi2 = -3.0 * s * w.powf(-2.5);
                Jet2::new(
                    1.0 + lambda * phi,
                    lambda * phi1,
                    lambda * phi1 * 2.0 * y,
                    lambda * phi2,
                    lambda * phi2 * 2.0 * y,
                    lambda * (phi2 * 4.0 * y * y + 2.0 * phi1),
                )
            }
            Family::Ridge { lambda } => {
                let w = (1.0 + x * x).sqrt();
                Jet2::new(1.0 + lambda * w, lambda * x / w, 0.0, lambda / (w * w * w), 0.0, 0.0)
            }
            Family::ConeType { lambda } => separable_jet(lambda, Profile::Cone, Profile::Cone, p),
            Family::Separable { lambda, g, h } => separable_jet(lambda, g, h, p),
            Family::AsymBump => {
                let g = (-(x * x + y * y)).exp();
                let (g1, g2) = (-2.0 * x * g, -2.0 * y * g);
                let (g11, g12, g22) = ((4.0 * x * x - 2.0) * g, 4.0 * x * y * g, (4.0 * y * y - 2.0) * g);
                let l = 1.0 + 0.3 * x + 0.2 * x * y;
                let (l1, l2) = (0.3 + 0.2 * y, 0.2 * x);
                let l12 = 0.2;
                Jet2::new(
                    g * l,
                    g1 * l + g * l1,
                    g2 * l + g * l2,
                    g11 * l + 2.0 * g1 * l1,
                    g12 * l + g1 * l2 + g2 * l1 + g * l12,
                    g22 * l + 2.0 * g2 * l2,
                )
            }
        }
    }

    fn contains(&self, p: Point2) -> bool {
        match self {
            Family::SphereCap => p.x * p.x + p.y * p.y < 1.0,
            _ => true,
        }
    }

    fn asymptotic_constant(&self) -> Option<f64> {
        match self {
            Family::GaussianBump | Family::InverseQuadratic | Family::AsymBump => Some(0.0),
            _ => None,
        }
    }
}

fn separable_jet(lambda: f64, g: Profile, h: Profile, p: Point2) -> Jet2 {
    let (gv, g1, g2) = g.eval(p.x);
    let (hv, h1, h2) = h.eval(p.y);
    Jet2::new(1.0 + lambda * (gv + hv), lambda * g1, lambda * h1, lambda * g2, 0.0, lambda * h2)
}
