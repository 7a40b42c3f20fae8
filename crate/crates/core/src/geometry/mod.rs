//! Differential geometry of the lifted structure: Nijenhuis tensor,
//! Levi-Civita connection, curvature, Ricci, covariant derivative of
//! curvature, fundamental form, and holomorphic sectional curvature.
//!
//! Every closed-form evaluation here is paired with an independent numeric
//! route (bracket definitions, the Koszul formula, finite-difference
//! composition of the connection, a coordinate exterior derivative); the
//! verification harness compares the two sides pointwise.

mod connection;
mod curvature;
mod form;
mod frame;
mod nijenhuis;
mod symmetry;

pub use connection::{
    connection_coeffs, connection_space_form, frame_connection, koszul_oracle,
    metric_compatibility_residual, nabla_j_residual, torsion_residual, ConnectionCoeffs,
    FrameConnection, KoszulComparison,
};
pub use curvature::{
    curvature_blocks, curvature_oracle, curvature_skew_residual, einstein_residual,
    holomorphic_sectional_curvature, ricci_blocks, CurvatureBlocks, RicciBlocks,
};
pub use form::{dphi_closed_form_adapted, dphi_residual, DphiComparison};
pub use frame::{
    frame_bracket, horizontal_energy_derivative, vertical_energy_derivative_residual,
    FrameDirection,
};
pub use nijenhuis::{
    nijenhuis_closed_form, nijenhuis_compare, nijenhuis_oracle, NijenhuisBlocks,
    NijenhuisComparison,
};
pub use symmetry::nabla_k_residual;
