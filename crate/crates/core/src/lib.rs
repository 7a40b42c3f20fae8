//! Construction and numerical verification of a one-parameter class of
//! Kähler–Einstein structures `(G, J)` on the cotangent bundle of a
//! constant-curvature Riemannian manifold.
//!
//! The crate is organised around the objects it checks:
//!
//! * [`spaceform`] — explicit coordinate charts of constant-curvature bases
//!   with analytic metric, Christoffel and curvature evaluation, plus
//!   finite-difference oracles for each.
//! * [`params`] — λ-parameter families and every scalar coefficient of the
//!   lifted structures as functions of the energy density `t`, with
//!   admissibility checking.
//! * [`bundle`] — points of `T*M`, the adapted frame, and assembly of the
//!   `J`, `G`, `H` and φ blocks at a point.
//! * [`geometry`] — Nijenhuis tensor, Levi-Civita connection of `G`,
//!   curvature and Ricci blocks, covariant derivative of curvature, and
//!   holomorphic sectional curvature, each paired with an independent
//!   numeric oracle.
//! * [`harness`] — configuration loading, deterministic point sampling, the
//!   named check suite, and report emission (text / JSON / CSV).
//!
//! Every closed-form quantity here has a second, independent evaluation
//! path (finite differences of defining formulas, bracket definitions,
//! transvection, …); the harness runs both and reports residuals.

pub mod bundle;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod harness;
pub mod params;
pub mod spaceform;
pub mod structure;
pub mod tensor;

pub use error::{Error, Result};
pub use structure::StructureField;
