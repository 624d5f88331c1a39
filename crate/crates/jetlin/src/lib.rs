//! Decides whether a second-order ODE that is cubic in the first derivative,
//!
//! ```text
//!     y'' = u0(x,y) + u1(x,y) y' + u2(x,y) y'^2 + u3(x,y) y'^3,
//! ```
//!
//! can be mapped to y'' = 0 by a point transformation (x,y) -> (f1(x,y), f2(x,y)).
//!
//! The decision procedure works on jets of the coefficient 4-tuple over the plane:
//! equations are identified with sections of a rank-4 bundle, point transformations
//! and vector fields are lifted to jet space, and the failure of a canonical
//! second-order horizontal frame to close under the Lie bracket produces two scalar
//! invariants `F1`, `F2`. Both vanish identically exactly when the equation is
//! linearizable.
//!
//! Module map:
//! * [`symexpr`]: small exact expression kernel (parse, differentiate, evaluate,
//!   canonical rational normal form, zero test with sampling fallback).
//! * [`series`]: truncated two-variable power series and map jets (multiply, divide,
//!   compose, invert); the arithmetic backbone for jet transformations.
//! * [`jetspace`]: multi-indices, sections, jet points, jet evaluation/projection.
//! * [`pointmap`]: point transformations, inverse jets, pushforward of equations,
//!   lifted jets, and the solution-curve oracle.
//! * [`fieldlift`]: lifted vector fields, the generating function of the lift,
//!   total derivatives, brackets, and the flow oracle.
//! * [`isotropy`]: exact linear algebra over the rationals, isotropy algebras and
//!   spaces, the symbol, prolongations, and the Spencer complex.
//! * [`obstruction`]: horizontal frames, the invariants F1/F2 by both the closed-form
//!   and the constructive route, the linearizability verdict, and invariance checks.
//! * [`selftest`]: seeded end-to-end checks shared by the CLI and the acceptance suite.
//!
//! Everything numeric is generic over [`scalar::Scalar`]; the exact lane uses
//! arbitrary-precision rationals ([`Rat`]) and the oracle lane uses `f64`. Operations
//! that must be exact (isotropy solves, frames, constructive invariants) accept the
//! rational types only.

pub mod error;
pub mod fieldlift;
pub mod isotropy;
pub mod jetspace;
pub mod numeric;
pub mod obstruction;
pub mod pointmap;
pub mod scalar;
pub mod selftest;
pub mod series;
pub mod symexpr;

pub use error::Error;
pub use scalar::Scalar;

/// Arbitrary-precision rational scalar of the exact lane.
pub type Rat = num_rational::BigRational;

/// Jet of a section with exact rational coordinates.
pub type RatJet = jetspace::JetPoint<Rat>;
/// Jet of a section with float coordinates (oracle lane).
pub type F64Jet = jetspace::JetPoint<f64>;
/// Taylor data of a plane vector field with exact rational coefficients.
pub type RatFieldJet = fieldlift::VectorFieldJet<Rat>;
/// Taylor data of a plane vector field with float coefficients.
pub type F64FieldJet = fieldlift::VectorFieldJet<f64>;

pub(crate) fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub(crate) fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}
