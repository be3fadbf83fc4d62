//! Verification and classification toolkit for flat left-invariant affine
//! structures (FLIAS) on the affine group of the real line.
//!
//! A flat left-invariant affine structure on a Lie group is equivalent to a
//! left-symmetric product on its Lie algebra compatible with the bracket.
//! This crate implements, for `Aff(R)` and its relatives:
//!
//! * left-symmetric / associative axiom checkers over structure constants
//!   ([`algebra`]),
//! * curvature, torsion, Levi-Civita, Hessian / symplectic / Kähler structure
//!   detectors and the cotangent pseudo-Kähler extension ([`connection`]),
//! * the two-parameter polynomial variety of left-symmetric products on
//!   `aff(R)`, its three components, canonical families and isomorphism
//!   testing ([`atlas`]),
//! * the closed-form étale affine representations of `Aff(R)_0` and their
//!   verification contracts ([`reps`]),
//! * geodesics in the invariant frame, closed-form catalogs and completeness
//!   probes ([`geodesics`]),
//! * the affine transformation groups of each structure ([`transform`]),
//! * flat projective criteria and trace-zero subalgebras ([`projective`]).
//!
//! Everything is numeric (`f64`) with explicit tolerances; brute-force
//! oracles in the test suite are backed by exact rational arithmetic
//! ([`exact`]).

pub mod algebra;
pub mod atlas;
pub mod connection;
mod dopri;
pub mod error;
pub mod exact;
pub mod geodesics;
pub mod io;
pub mod projective;
pub mod reps;
pub mod transform;
pub mod verify;

mod tensor;

pub use error::{Error, Result};
pub use tensor::{Tensor3, Tensor4};

/// Default tolerances; see the individual checkers for which one applies.
pub mod tol {
    /// Exact-input contexts: structure constants are small integers or
    /// rationals, so residuals are pure floating-point noise.
    pub const EXACT: f64 = 1e-12;
    /// After linear-algebra pipelines (least squares, null spaces, ODE).
    pub const NUMERIC: f64 = 1e-9;
    /// Finite-difference derivative checks.
    pub const DERIVATIVE: f64 = 1e-6;
}
