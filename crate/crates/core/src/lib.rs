//! Numerical differential geometry of graph surfaces `z = f(x, y)`.
//!
//! The crate evaluates normal and principal curvature fields, the residual
//! systems whose common zeros are umbilics, the divergence-form vector fields
//! whose disk integrals vanish in the limit for fields with fast-decaying
//! gradients, Möbius inversion of local graphs and parametric patches, and the
//! blow-up of an umbilic on a convex body given by its support function.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convexbody;
pub mod curvature;
pub mod error;
pub mod families;
pub mod field;
pub mod par;
pub mod patch;
pub mod quad;
pub mod scan;
pub mod transform;

pub use error::{Error, Result};
pub use families::{list_families, make_field, Family, FamilySpec};
pub use field::{decay_profile, eval_jet, Direction, Jet2, Point2, PolarPoint, ScalarField};
pub use par::Exec;
