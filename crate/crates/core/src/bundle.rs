//! Points of `T*M`, the adapted frame, and the block components of the
//! lifted structures at a point.
//!
//! # Frame layout
//!
//! The adapted frame on `TT*M` splits into the horizontal fields
//! `δ/δq^i = ∂/∂q^i + Γ⁰_{ih} ∂/∂p_h` and the vertical fields `∂/∂p_i`.
//! Every 2n-indexed object in this crate uses slots `0..n` for the
//! horizontal directions and `n..2n` for the vertical ones.
//!
//! The structure blocks follow the component displays of the lifted pair:
//!
//! ```text
//! J(δ/δq^i) =  J1_{ij} ∂/∂p_j        J1 = a₁ g + b₁ p⊗p
//! J(∂/∂p_i) = −J2^{ij} δ/δq^j        J2 = a₂ g⁻¹ + b₂ g⁰⊗g⁰
//! G(δ/δq^i, δ/δq^j) = G1_{ij}        G1 = c₁ g + d₁ p⊗p
//! G(∂/∂p_i, ∂/∂p_j) = G2^{ij}        G2 = c₂ g⁻¹ + d₂ g⁰⊗g⁰
//! ```
//!
//! with `g⁰` the raised covector `g^{0i} = p_h g^{hi}`. `H1`, `H2` are the
//! closed-form inverses of `G1`, `G2`, and φ is stored as the mixed matrix
//! `φ(∂/∂p_i, δ/δq^j) = λ δ^i_j + μ g^{0i} p_j`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::params::CoefficientSet;
use crate::spaceform::MetricSample;

/// A point of the cotangent bundle: base coordinates `x` and covector
/// components `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentPoint {
    pub x: DVector<f64>,
    pub p: DVector<f64>,
}

impl CotangentPoint {
    pub fn new(x: DVector<f64>, p: DVector<f64>) -> Self {
        assert_eq!(x.len(), p.len());
        Self { x, p }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The point shifted by `s` along a coordinate direction of `R^{2n}`
    /// (first n slots move `x`, last n slots move `p`).
    pub fn shifted(&self, direction: &DVector<f64>, s: f64) -> Self {
        let n = self.dim();
        let mut x = self.x.clone();
        let mut p = self.p.clone();
        for i in 0..n {
            x[i] += s * direction[i];
            p[i] += s * direction[n + i];
        }
        Self { x, p }
    }
}

/// Energy density `t = ½ g^{ik} p_i p_k ≥ 0`; zero exactly when `p = 0`.
pub fn energy_density(ms: &MetricSample, p: &DVector<f64>) -> f64 {
    0.5 * (p.transpose() * &ms.g_inv * p)[(0, 0)]
}

/// The adapted frame data at a point: `Γ⁰_{ih} = p_k Γ^k_{ih}`, the raised
/// covector `g^{0i}`, and the basis-change matrix expressing the adapted
/// frame in the coordinate frame.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    /// `gamma0[(i, h)] = Γ⁰_{ih}`; symmetric.
    pub gamma0: DMatrix<f64>,
    /// Columns are the adapted fields in coordinate components; block
    /// structure `[[I, 0], [Γ⁰, I]]`, so the inverse is obtained by
    /// negating `Γ⁰`.
    pub basis_change: DMatrix<f64>,
    /// `g0[i] = g^{0i} = p_h g^{hi}`.
    pub g0: DVector<f64>,
}

impl AdaptedFrame {
    pub fn basis_change_inverse(&self) -> DMatrix<f64> {
        let n = self.gamma0.nrows();
        let mut inv = DMatrix::identity(2 * n, 2 * n);
        for h in 0..n {
            for a in 0..n {
                inv[(n + h, a)] = -self.gamma0[(a, h)];
            }
        }
        inv
    }
}

pub fn adapted_frame(ms: &MetricSample, pt: &CotangentPoint) -> AdaptedFrame {
    let n = pt.dim();
    let mut gamma0 = DMatrix::zeros(n, n);
    for i in 0..n {
        for h in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += pt.p[k] * ms.gamma[(k, i, h)];
            }
            gamma0[(i, h)] = s;
        }
    }
    let mut basis_change = DMatrix::identity(2 * n, 2 * n);
    for a in 0..n {
        for h in 0..n {
            basis_change[(n + h, a)] = gamma0[(a, h)];
        }
    }
    let g0 = &ms.g_inv * &pt.p;
    AdaptedFrame {
        gamma0,
        basis_change,
        g0,
    }
}

/// The n×n blocks of `J`, `G`, `H` and the mixed φ matrix at a point.
#[derive(Debug, Clone)]
pub struct StructureTensors {
    pub j1: DMatrix<f64>,
    pub j2: DMatrix<f64>,
    pub g1: DMatrix<f64>,
    pub g2: DMatrix<f64>,
    pub h1: DMatrix<f64>,
    pub h2: DMatrix<f64>,
    /// `phi[(i, j)] = φ(∂/∂p_i, δ/δq^j)`.
    pub phi: DMatrix<f64>,
    pub t: f64,
}

fn rank_one(u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    u * v.transpose()
}

fn definiteness_ok(m: &DMatrix<f64>) -> bool {
    let eigen = m.clone().symmetric_eigenvalues();
    let max = eigen.iter().fold(f64::MIN, |a, &b| a.max(b));
    let min = eigen.iter().fold(f64::MAX, |a, &b| a.min(b));
    min > 1e-12 * max.max(0.0)
}

/// Assembles the structure blocks at a point. The caller supplies the
/// coefficient set for the point's own energy density; a mismatch beyond
/// 1e-12 relative is rejected rather than silently recomputed.
pub fn structure_tensors(
    coeffs: &CoefficientSet,
    ms: &MetricSample,
    pt: &CotangentPoint,
) -> Result<StructureTensors> {
    let n = pt.dim();
    let t = energy_density(ms, &pt.p);
    if (t - coeffs.t).abs() > 1e-12 * t.abs().max(1.0) {
        return Err(Error::EnergyMismatch {
            coeff_t: coeffs.t,
            point_t: t,
        });
    }
    let g0 = &ms.g_inv * &pt.p;

    let j1 = coeffs.a1 * &ms.g + coeffs.b1 * rank_one(&pt.p, &pt.p);
    let j2 = coeffs.a2 * &ms.g_inv + coeffs.b2 * rank_one(&g0, &g0);
    let g1 = coeffs.c1 * &ms.g + coeffs.d1 * rank_one(&pt.p, &pt.p);
    let g2 = coeffs.c2 * &ms.g_inv + coeffs.d2 * rank_one(&g0, &g0);

    if !definiteness_ok(&g1) || !definiteness_ok(&g2) {
        return Err(Error::InadmissiblePoint(format!(
            "metric block not positive definite at t = {t:.6}"
        )));
    }

    let c1_slope = coeffs.c1 + 2.0 * t * coeffs.d1;
    let c2_slope = coeffs.c2 + 2.0 * t * coeffs.d2;
    let h1 = (1.0 / coeffs.c1) * &ms.g_inv
        - (coeffs.d1 / (coeffs.c1 * c1_slope)) * rank_one(&g0, &g0);
    let h2 = (1.0 / coeffs.c2) * &ms.g
        - (coeffs.d2 / (coeffs.c2 * c2_slope)) * rank_one(&pt.p, &pt.p);

    let mut phi = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            phi[(i, j)] = coeffs.lambda * if i == j { 1.0 } else { 0.0 }
                + coeffs.mu * g0[i] * pt.p[j];
        }
    }

    Ok(StructureTensors {
        j1,
        j2,
        g1,
        g2,
        h1,
        h2,
        phi,
        t,
    })
}

/// The 2n×2n adapted-frame matrices of `J` and `G`:
/// `J = [[0, −J2], [J1, 0]]` (columns act on frame vectors) and
/// `G = diag(G1, G2)`.
pub fn full_matrices(st: &StructureTensors) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = st.j1.nrows();
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for k in 0..n {
            j[(n + k, i)] = st.j1[(i, k)];
            j[(k, n + i)] = -st.j2[(i, k)];
            g[(i, k)] = st.g1[(i, k)];
            g[(n + i, n + k)] = st.g2[(i, k)];
        }
    }
    (j, g)
}

/// Result of expressing a symmetric matrix as `u·g + v·p⊗p` by
/// transvection with `g⁻¹` and the raised covector. `residual` is the
/// max-abs entry of `M − u·g − v·p⊗p`; a decomposable `M` leaves it at
/// rounding level, anything else leaves the evidence here.
#[derive(Debug, Clone, Copy)]
pub struct MetricRankOneSplit {
    pub u: f64,
    pub v: f64,
    pub residual: f64,
}

impl MetricRankOneSplit {
    pub fn exact(&self, tol: f64) -> Option<(f64, f64)> {
        (self.residual <= tol).then_some((self.u, self.v))
    }
}

/// Recovers `(u, v)` with `M = u·g + v·p⊗p` by contracting with `g^{ij}`
/// and `g^{0i} g^{0j}`, the transvection that proves such splittings are
/// unique for `n > 1`. Requires `p ≠ 0` (the rank-one direction is
/// otherwise invisible).
pub fn decompose_metric_rank_one(
    m: &DMatrix<f64>,
    ms: &MetricSample,
    p: &DVector<f64>,
) -> Result<MetricRankOneSplit> {
    let n = p.len();
    if p.norm() == 0.0 {
        return Err(Error::ZeroCovector(
            "rank-one coefficient is unrecoverable at p = 0",
        ));
    }
    let g0 = &ms.g_inv * p;
    let two_t = (p.transpose() * &g0)[(0, 0)];

    // Contractions: g^{ij} M_{ij} = u n + 2t v, g^{0i}g^{0j} M_{ij} = 2t u + 4t² v.
    let s1 = (&ms.g_inv * m).trace();
    let s2 = (g0.transpose() * m * &g0)[(0, 0)];
    let det = two_t * two_t * (n as f64 - 1.0);
    if det.abs() < 1e-28 {
        return Err(Error::ZeroCovector("transvection system is singular"));
    }
    let u = (s1 * two_t * two_t - s2 * two_t) / det;
    let v = (n as f64 * s2 - two_t * s1) / det;

    let reconstructed = u * &ms.g + v * rank_one(p, p);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            residual = residual.max((m[(i, j)] - reconstructed[(i, j)]).abs());
        }
    }
    Ok(MetricRankOneSplit { u, v, residual })
}
