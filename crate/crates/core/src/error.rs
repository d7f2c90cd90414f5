use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the field domain")]
    Domain { x: f64, y: f64 },

    #[error("inversion is undefined at the origin")]
    Origin,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown field family `{0}`")]
    UnknownFamily(String),

    #[error("graph condition precondition violated: |f(o)| = {value:e}, |grad f(o)| = {gradient:e}")]
    NotNormalizedAtOrigin { value: f64, gradient: f64 },

    #[error("graph condition fails: sampled sup |df/dr| = {sup_fr} >= 1 on B_{r0}")]
    GraphCondition { r0: f64, sup_fr: f64 },

    #[error("root solve did not converge: {0}")]
    NonConvergence(String),

    #[error("convexity violated: radius of curvature {radius} <= 0")]
    NotConvex { radius: f64 },

    #[error("parallel surface loses regularity: 1 + r k = {value:e}")]
    Regularity { value: f64 },

    #[error("inverted surface is not a graph over the xy-plane: {0}")]
    NotAGraph(String),
}

pub type Result<T> = std::result::Result<T, Error>;
