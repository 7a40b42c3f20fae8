//! Coordinate charts of constant-curvature Riemannian manifolds.
//!
//! The base `(M, g)` is modelled by a single projective-conformal chart
//!
//! ```text
//! g_ij(x) = δ_ij / (1 + (c/4)|x|²)²
//! ```
//!
//! which covers a neighbourhood of the origin for every sign of the
//! sectional curvature `c`. For `c ≠ 0` the chart domain is
//! `{x : 1 + (c/4)|x|² > 0}`.
//!
//! # Curvature convention
//!
//! This is the one place where the curvature sign convention is pinned.
//! `riemann[(h, k, i, j)]` stores `R^h_{kij}`, the `∂_h`-component of
//! `R(∂_i, ∂_j) ∂_k` with `R(X, Y) = ∇_X ∇_Y − ∇_Y ∇_X − ∇_[X,Y]`, i.e.
//!
//! ```text
//! R^h_{kij} = ∂_i Γ^h_{jk} − ∂_j Γ^h_{ik} + Γ^h_{il} Γ^l_{jk} − Γ^h_{jl} Γ^l_{ik}.
//! ```
//!
//! With this sign a metric of constant sectional curvature `c` satisfies
//! `R^h_{kij} = c (δ^h_i g_{jk} − δ^h_j g_{ik})`, and the plane-curvature
//! quotient `g(R(u,v)v, u) / (|u|²|v|² − g(u,v)²)` evaluates to `c`; the
//! tests below hold the convention in place.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fd;
use crate::tensor::{Tensor3, Tensor4};

/// Default finite-difference step scale for the chart oracles.
pub const DEFAULT_STEP: f64 = 1e-5;
/// Richardson disagreement above this triggers a diagnostic error.
pub const STEP_DIAGNOSTIC: f64 = 1e-6;

/// Tag for the coordinate model of the base. A single model is provided;
/// the tag keeps chart data self-describing in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub enum ChartModel {
    #[default]
    ProjectiveConformal,
}

/// A coordinate model of the base `(M, g)` with constant sectional
/// curvature `c` in dimension `n ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceFormChart {
    n: usize,
    c: f64,
    model: ChartModel,
}

impl SpaceFormChart {
    /// Constant-curvature rigidity holds automatically only from dimension
    /// three on; `n = 2` is accepted but flagged through
    /// [`Self::rigid_dimension`].
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        Ok(Self {
            n,
            c,
            model: ChartModel::ProjectiveConformal,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn curvature(&self) -> f64 {
        self.c
    }

    pub fn model(&self) -> ChartModel {
        self.model
    }

    /// True when the dimension is large enough for Schur-type rigidity of
    /// the curvature; callers may want to surface a caveat for `n = 2`.
    pub fn rigid_dimension(&self) -> bool {
        self.n >= 3
    }

    /// `1 + (c/4)|x|²`; must stay positive inside the chart.
    pub fn domain_factor(&self, x: &DVector<f64>) -> f64 {
        1.0 + 0.25 * self.c * x.norm_squared()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.domain_factor(x) > 0.0
    }

    /// Radius of the sampling ball: well inside the chart for `c > 0`,
    /// backed off from the chart boundary for `c < 0` so that the
    /// conformal factor stays conditioned.
    pub fn sampling_radius(&self) -> f64 {
        if self.c > 0.0 {
            1.0
        } else if self.c == 0.0 {
            2.0
        } else {
            (2.0f64).min(0.9 * 2.0 / (-self.c).sqrt())
        }
    }

    fn check_domain(&self, x: &DVector<f64>) -> Result<f64> {
        let factor = self.domain_factor(x);
        if factor <= 0.0 {
            return Err(Error::OutsideChartDomain { factor });
        }
        Ok(factor)
    }
}

/// Metric data at a base point: `g`, `g⁻¹`, Christoffel symbols
/// `gamma[(k, i, j)] = Γ^k_{ij}` and curvature components
/// `riemann[(h, k, i, j)] = R^h_{kij}` (see the module docs for the
/// convention).
#[derive(Debug, Clone)]
pub struct MetricSample {
    pub x: DVector<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub gamma: Tensor3,
    pub riemann: Tensor4,
}

impl MetricSample {
    /// `R^0_{kij} = p_h R^h_{kij}` for a covector `p`.
    pub fn riemann_contracted(&self, p: &DVector<f64>) -> Tensor3 {
        let n = self.x.len();
        let mut r0 = Tensor3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for h in 0..n {
                        s += p[h] * self.riemann[(h, k, i, j)];
                    }
                    r0[(k, i, j)] = s;
                }
            }
        }
        r0
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Evaluates the chart analytically at `x`: metric, inverse, Christoffel
/// symbols and curvature. The curvature is assembled from the analytic
/// Christoffel derivatives, not from the constant-curvature shortcut, so
/// the space-form identity is a genuine consistency check on the output.
pub fn metric_at(chart: &SpaceFormChart, x: &DVector<f64>) -> Result<MetricSample> {
    let n = chart.dim();
    let c = chart.curvature();
    let factor = chart.check_domain(x)?;
    let sigma = 1.0 / factor;

    let g = DMatrix::from_diagonal_element(n, n, sigma * sigma);
    let g_inv = DMatrix::from_diagonal_element(n, n, factor * factor);

    // Γ^k_{ij} = δ_ki φ_j + δ_kj φ_i − δ_ij φ_k with φ_i = ∂_i ln σ.
    let phi: Vec<f64> = (0..n).map(|i| -0.5 * c * x[i] * sigma).collect();
    let mut gamma = Tensor3::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma[(k, i, j)] =
                    delta(k, i) * phi[j] + delta(k, j) * phi[i] - delta(i, j) * phi[k];
            }
        }
    }

    // ∂_l φ_i, then ∂_l Γ^k_{ij}, then the curvature combination.
    let mut dphi_m = DMatrix::zeros(n, n); // [l][i] = ∂_l φ_i
    for l in 0..n {
        for i in 0..n {
            dphi_m[(l, i)] =
                -0.5 * c * delta(i, l) * sigma + 0.25 * c * c * x[i] * x[l] * sigma * sigma;
        }
    }

    let dgamma = |l: usize, k: usize, i: usize, j: usize| {
        delta(k, i) * dphi_m[(l, j)] + delta(k, j) * dphi_m[(l, i)] - delta(i, j) * dphi_m[(l, k)]
    };

    let mut riemann = Tensor4::zeros(n);
    for h in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut value = dgamma(i, h, j, k) - dgamma(j, h, i, k);
                    for l in 0..n {
                        value += gamma[(h, i, l)] * gamma[(l, j, k)]
                            - gamma[(h, j, l)] * gamma[(l, i, k)];
                    }
                    riemann[(h, k, i, j)] = value;
                }
            }
        }
    }

    Ok(MetricSample {
        x: x.clone(),
        g,
        g_inv,
        gamma,
        riemann,
    })
}

/// Central-difference Christoffel oracle:
/// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`
/// with Richardson-extrapolated metric derivatives. Independent of the
/// analytic `gamma` in [`metric_at`].
pub fn fd_christoffel_oracle(chart: &SpaceFormChart, x: &DVector<f64>, h: f64) -> Result<Tensor3> {
    let n = chart.dim();
    chart.check_domain(x)?;

    // dg[(l, i, j)] = ∂_l g_{ij}
    let mut dg = Tensor3::zeros(n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let (value, disagreement) = fd::richardson(
                    |s| {
                        let mut xs = x.clone();
                        xs[l] = s;
                        let factor = chart.domain_factor(&xs);
                        let sigma = 1.0 / factor;
                        sigma * sigma * delta(i, j)
                    },
                    x[l],
                    h,
                );
                if disagreement > STEP_DIAGNOSTIC {
                    return Err(Error::StepUnreliable {
                        context: format!("metric derivative d_{l} g_{i}{j}"),
                        disagreement,
                    });
                }
                dg[(l, i, j)] = value;
            }
        }
    }

    let factor = chart.domain_factor(x);
    let ginv_diag = factor * factor;
    let mut gamma = Tensor3::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                // g^{kl} is diagonal in this chart.
                gamma[(k, i, j)] =
                    0.5 * ginv_diag * (dg[(i, j, k)] + dg[(j, i, k)] - dg[(k, i, j)]);
            }
        }
    }
    Ok(gamma)
}

/// Default step for the chart oracles at a given point.
pub fn default_step(x: &DVector<f64>) -> f64 {
    DEFAULT_STEP * x.norm().max(1.0)
}

/// Sectional curvature of the plane spanned by `u`, `v`:
/// `g(R(u,v)v, u) / (g(u,u) g(v,v) − g(u,v)²)`. Must equal the chart's
/// `c` for every nondegenerate plane.
pub fn sectional_curvature(
    chart: &SpaceFormChart,
    x: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<f64> {
    let ms = metric_at(chart, x)?;
    let n = chart.dim();

    let gu_u = (u.transpose() * &ms.g * u)[(0, 0)];
    let gv_v = (v.transpose() * &ms.g * v)[(0, 0)];
    let gu_v = (u.transpose() * &ms.g * v)[(0, 0)];
    let denom = gu_u * gv_v - gu_v * gu_v;
    if denom.abs() < 1e-14 {
        return Err(Error::DegeneratePlane(denom));
    }

    // w^h = R^h_{kij} u^i v^j v^k, numerator = g(w, u).
    let mut numer = 0.0;
    for h in 0..n {
        let mut w_h = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    w_h += ms.riemann[(h, k, i, j)] * u[i] * v[j] * v[k];
                }
            }
        }
        for m in 0..n {
            numer += ms.g[(h, m)] * w_h * u[m];
        }
    }

    Ok(numer / denom)
}
