//! Levi-Civita connection of the lifted metric `G`.
//!
//! Two closed-form routes plus one numeric oracle:
//!
//! * [`connection_coeffs`] — the generic route: the frame Koszul formula
//!   reduced to fiber derivatives of the `G` blocks, with those
//!   derivatives taken analytically from the block closed forms. This is
//!   the ground truth used by curvature, parallelism and symmetry checks.
//! * [`connection_space_form`] — the specialized constant-curvature
//!   closed form as printed, kept verbatim so the harness can report how
//!   it compares against the generic route (`P` and `S` agree to rounding;
//!   the printed `Q` coefficients do not, see the `eq28-literal-match`
//!   check).
//! * [`koszul_oracle`] — the full Koszul right-hand side with
//!   finite-difference directional derivatives of the frame metric
//!   functions and exact brackets, solved for the connection components.
//!
//! In the adapted frame the connection acts as
//!
//! ```text
//! ∇_{∂/∂p_i} ∂/∂p_j = Q^{ij}_h ∂/∂p_h
//! ∇_{∂/∂p_i} δ/δq^j = P^{hi}_j δ/δq^h
//! ∇_{δ/δq^i} ∂/∂p_j = −Γ^j_{ih} ∂/∂p_h + P^{hj}_i δ/δq^h
//! ∇_{δ/δq^i} δ/δq^j = Γ^h_{ij} δ/δq^h + S_{hij} ∂/∂p_h
//! ```
//!
//! with index layouts `q[(h, i, j)] = Q^{ij}_h`, `p[(h, i, j)] = P^{hi}_j`,
//! `s[(h, i, j)] = S_{hij}`.

use nalgebra::{DMatrix, DVector};

use crate::bundle::{full_matrices, CotangentPoint};
use crate::error::{Error, Result};
use crate::params::{coefficient_derivatives, MuMode};
use crate::structure::{PointData, StructureField};
use crate::tensor::Tensor3;

use super::frame::{frame_bracket, frame_derivative, FrameDirection};

#[derive(Debug, Clone)]
pub struct ConnectionCoeffs {
    pub q: Tensor3,
    pub p: Tensor3,
    pub s: Tensor3,
    /// Base Christoffel symbols at the point, `gamma[(k, i, j)] = Γ^k_{ij}`.
    pub gamma: Tensor3,
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn require_closed_structure(field: &StructureField) -> Result<()> {
    match field.options().mu {
        MuMode::LambdaPrime => Ok(()),
        MuMode::OffsetFromLambdaPrime(delta) if delta == 0.0 => Ok(()),
        _ => Err(Error::InvalidConfig(
            "connection formulas require the closed structure (mu = lambda')".into(),
        )),
    }
}

/// Ground-truth connection via the generic route.
pub fn connection_coeffs(field: &StructureField, pt: &CotangentPoint) -> Result<ConnectionCoeffs> {
    let data = field.point_data(pt)?;
    connection_coeffs_at(field, pt, &data)
}

pub(crate) fn connection_coeffs_at(
    field: &StructureField,
    pt: &CotangentPoint,
    data: &PointData,
) -> Result<ConnectionCoeffs> {
    require_closed_structure(field)?;
    let n = field.dim();
    let coeffs = &data.coeffs;
    let derivs = coefficient_derivatives(field.family(), field.curvature(), coeffs.t)?;
    let g = &data.metric.g;
    let g_inv = &data.metric.g_inv;
    let g0 = &data.frame.g0;
    let p_cov = &pt.p;
    let r0 = data.metric.riemann_contracted(p_cov);

    // Fiber derivatives of the metric blocks:
    // ∂p_k G1_{ij} and ∂p_k G2^{ij}, with ∂p_k t = g^{0k} and
    // ∂p_k g^{0i} = g^{ik}.
    let mut dg1 = Tensor3::zeros(n);
    let mut dg2 = Tensor3::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                dg1[(k, i, j)] = derivs.c1 * g0[k] * g[(i, j)]
                    + derivs.d1 * g0[k] * p_cov[i] * p_cov[j]
                    + coeffs.d1 * (delta(k, i) * p_cov[j] + delta(k, j) * p_cov[i]);
                dg2[(k, i, j)] = derivs.c2 * g0[k] * g_inv[(i, j)]
                    + derivs.d2 * g0[k] * g0[i] * g0[j]
                    + coeffs.d2 * (g_inv[(i, k)] * g0[j] + g_inv[(j, k)] * g0[i]);
            }
        }
    }

    let h1 = &data.tensors.h1;
    let h2 = &data.tensors.h2;
    let g2 = &data.tensors.g2;

    let mut q = Tensor3::zeros(n);
    let mut p = Tensor3::zeros(n);
    let mut s = Tensor3::zeros(n);
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut q_sum = 0.0;
                let mut p_sum = 0.0;
                let mut s_sum = 0.0;
                for k in 0..n {
                    q_sum +=
                        h2[(h, k)] * (dg2[(i, j, k)] + dg2[(j, i, k)] - dg2[(k, i, j)]);
                    let mut lowered = 0.0;
                    for l in 0..n {
                        lowered += g2[(i, l)] * r0[(l, j, k)];
                    }
                    p_sum += h1[(h, k)] * (dg1[(i, j, k)] - lowered);
                    s_sum += h2[(h, k)] * dg1[(k, i, j)];
                }
                q[(h, i, j)] = 0.5 * q_sum;
                p[(h, i, j)] = 0.5 * p_sum;
                s[(h, i, j)] = -0.5 * s_sum + 0.5 * r0[(h, i, j)];
            }
        }
    }

    Ok(ConnectionCoeffs {
        q,
        p,
        s,
        gamma: data.metric.gamma.clone(),
    })
}

/// The specialized constant-curvature closed form, coefficients as
/// printed. `P` and `S` reproduce the generic route exactly; the printed
/// `Q` is reported, not trusted.
pub fn connection_space_form(
    field: &StructureField,
    pt: &CotangentPoint,
) -> Result<ConnectionCoeffs> {
    require_closed_structure(field)?;
    let n = field.dim();
    let a = field.scale();
    let c = field.curvature();
    let data = field.point_data(pt)?;
    let coeffs = &data.coeffs;
    let g0 = &data.frame.g0;
    let j1 = &data.tensors.j1;
    let j2 = &data.tensors.j2;

    let lambda = coeffs.lambda;
    let prime = coeffs.lambda_prime;
    let ell = lambda + 2.0 * coeffs.t * prime;
    let kappa = (c * lambda.powi(3) + a * a * prime) / (a * lambda * ell);
    let mid = prime / (lambda * lambda);
    let tail = (lambda * prime - 3.0 * prime * prime) / (lambda * ell);

    let mut q = Tensor3::zeros(n);
    let mut p = Tensor3::zeros(n);
    let mut s = Tensor3::zeros(n);
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                q[(h, i, j)] = kappa * j2[(i, j)] * pt.p[h]
                    + mid * (delta(h, i) * g0[j] + delta(h, j) * g0[i])
                    + tail * g0[i] * g0[j] * pt.p[h];
                p[(h, i, j)] = -(c * lambda / a) * j2[(h, i)] * pt.p[j];
                s[(h, i, j)] = (c * lambda / a) * j1[(h, j)] * pt.p[i];
            }
        }
    }

    Ok(ConnectionCoeffs {
        q,
        p,
        s,
        gamma: data.metric.gamma.clone(),
    })
}

/// The connection as a frame-indexed array:
/// `omega[(d, a, b)]` is the `E_d` component of `∇_{E_a} E_b`.
#[derive(Debug, Clone)]
pub struct FrameConnection {
    pub omega: Vec<f64>,
    pub dim: usize,
}

impl FrameConnection {
    pub fn get(&self, d: usize, a: usize, b: usize) -> f64 {
        self.omega[(d * self.dim + a) * self.dim + b]
    }

    fn set(&mut self, d: usize, a: usize, b: usize, value: f64) {
        self.omega[(d * self.dim + a) * self.dim + b] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.omega
    }
}

/// Assembles the frame-indexed connection array from the coefficient
/// tensors.
pub fn frame_connection(n: usize, cc: &ConnectionCoeffs) -> FrameConnection {
    let dim = 2 * n;
    let mut fc = FrameConnection {
        omega: vec![0.0; dim * dim * dim],
        dim,
    };
    for i in 0..n {
        for j in 0..n {
            for h in 0..n {
                // ∇_{δ_i} δ_j
                fc.set(h, i, j, cc.gamma[(h, i, j)]);
                fc.set(n + h, i, j, cc.s[(h, i, j)]);
                // ∇_{δ_i} ∂p_j
                fc.set(n + h, i, n + j, -cc.gamma[(j, i, h)]);
                fc.set(h, i, n + j, cc.p[(h, j, i)]);
                // ∇_{∂p_i} δ_j
                fc.set(h, n + i, j, cc.p[(h, i, j)]);
                // ∇_{∂p_i} ∂p_j
                fc.set(n + h, n + i, n + j, cc.q[(h, i, j)]);
            }
        }
    }
    fc
}

/// Koszul finite-difference oracle versus the closed-form connection.
#[derive(Debug, Clone, Copy)]
pub struct KoszulComparison {
    /// Max-abs difference between oracle and closed connection components.
    pub residual: f64,
    /// Worst Richardson disagreement in the metric derivatives.
    pub disagreement: f64,
}

fn g_matrix_flat(field: &StructureField, q: &CotangentPoint) -> Result<Vec<f64>> {
    let data = field.point_data(q)?;
    let (_, g) = full_matrices(&data.tensors);
    Ok(g.as_slice().to_vec())
}

/// Directional derivatives of the frame metric matrix along every frame
/// direction. Shared by the Koszul oracle and the parallelism residuals.
fn metric_derivatives(
    field: &StructureField,
    pt: &CotangentPoint,
    data: &PointData,
    h: f64,
) -> Result<(Vec<DMatrix<f64>>, f64)> {
    let dim = 2 * field.dim();
    let mut dg: Vec<DMatrix<f64>> = Vec::with_capacity(dim);
    let mut disagreement: f64 = 0.0;
    for d in 0..dim {
        let (flat, gap) = frame_derivative(data, pt, FrameDirection(d), h, |q| {
            g_matrix_flat(field, q)
        })?;
        disagreement = disagreement.max(gap);
        dg.push(DMatrix::from_column_slice(dim, dim, &flat));
    }
    Ok((dg, disagreement))
}

/// Solves the Koszul right-hand side for the connection on all frame
/// pairs and compares with the closed form.
pub fn koszul_oracle(
    field: &StructureField,
    pt: &CotangentPoint,
    h: f64,
) -> Result<KoszulComparison> {
    let n = field.dim();
    let dim = 2 * n;
    let data = field.point_data(pt)?;
    let cc = connection_coeffs_at(field, pt, &data)?;
    let closed = frame_connection(n, &cc);
    let r0 = data.metric.riemann_contracted(&pt.p);
    let (_, g_mat) = full_matrices(&data.tensors);

    let (dg, disagreement) = metric_derivatives(field, pt, &data, h)?;
    let g_scale = g_mat.abs().max().max(1.0);
    if disagreement > 1e-4 * g_scale {
        return Err(Error::StepUnreliable {
            context: "Koszul oracle: metric derivatives".into(),
            disagreement,
        });
    }

    let g_decomposition = g_mat.clone().lu();

    // G(bracket, E_c): brackets are vertical, so only the lower metric
    // block contributes.
    let bracket_pairing = |va: usize, vb: usize, c: usize| -> f64 {
        let vertical = frame_bracket(&data, FrameDirection(va), FrameDirection(vb), &r0);
        let mut s = 0.0;
        for k in 0..n {
            s += vertical[k] * g_mat[(n + k, c)];
        }
        s
    };

    let mut residual: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let mut rhs = DVector::zeros(dim);
            for c in 0..dim {
                let value = dg[a][(b, c)] + dg[b][(a, c)] - dg[c][(a, b)]
                    + bracket_pairing(a, b, c)
                    - bracket_pairing(a, c, b)
                    - bracket_pairing(b, c, a);
                rhs[c] = 0.5 * value;
            }
            let solved = g_decomposition.solve(&rhs).ok_or_else(|| {
                Error::InadmissiblePoint("frame metric is numerically singular".into())
            })?;
            for d in 0..dim {
                residual = residual.max((solved[d] - closed.get(d, a, b)).abs());
            }
        }
    }

    Ok(KoszulComparison {
        residual,
        disagreement,
    })
}

/// `∇_X Y − ∇_Y X − [X, Y]` on all frame pairs; algebraic in the closed
/// forms, so the tolerance is rounding-level.
pub fn torsion_residual(field: &StructureField, pt: &CotangentPoint) -> Result<f64> {
    let n = field.dim();
    let data = field.point_data(pt)?;
    let cc = connection_coeffs_at(field, pt, &data)?;
    let fc = frame_connection(n, &cc);
    let r0 = data.metric.riemann_contracted(&pt.p);
    let dim = 2 * n;

    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let vertical = frame_bracket(&data, FrameDirection(a), FrameDirection(b), &r0);
            for d in 0..dim {
                let bracket_component = if d < n { 0.0 } else { vertical[d - n] };
                let value = fc.get(d, a, b) - fc.get(d, b, a) - bracket_component;
                worst = worst.max(value.abs());
            }
        }
    }
    Ok(worst)
}

/// Finite-difference residual of `∇G = 0` on frame triples.
pub fn metric_compatibility_residual(
    field: &StructureField,
    pt: &CotangentPoint,
    h: f64,
) -> Result<f64> {
    let n = field.dim();
    let dim = 2 * n;
    let data = field.point_data(pt)?;
    let cc = connection_coeffs_at(field, pt, &data)?;
    let fc = frame_connection(n, &cc);
    let (_, g_mat) = full_matrices(&data.tensors);
    let (dg, _) = metric_derivatives(field, pt, &data, h)?;

    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let mut value = dg[a][(b, c)];
                for e in 0..dim {
                    value -= fc.get(e, a, b) * g_mat[(e, c)] + fc.get(e, a, c) * g_mat[(b, e)];
                }
                worst = worst.max(value.abs());
            }
        }
    }
    Ok(worst)
}

/// Finite-difference residual of `∇J = 0` on frame pairs.
pub fn nabla_j_residual(field: &StructureField, pt: &CotangentPoint, h: f64) -> Result<f64> {
    let n = field.dim();
    let dim = 2 * n;
    let data = field.point_data(pt)?;
    let cc = connection_coeffs_at(field, pt, &data)?;
    let fc = frame_connection(n, &cc);
    let (j_mat, _) = full_matrices(&data.tensors);

    let mut dj: Vec<DMatrix<f64>> = Vec::with_capacity(dim);
    for d in 0..dim {
        let (flat, _) = frame_derivative(&data, pt, FrameDirection(d), h, |q| {
            let point = field.point_data(q)?;
            let (j, _) = full_matrices(&point.tensors);
            Ok(j.as_slice().to_vec())
        })?;
        dj.push(DMatrix::from_column_slice(dim, dim, &flat));
    }

    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for d in 0..dim {
            for c in 0..dim {
                // (∇_a J)^d_c = E_a(J^d_c) + Ω^d_{ae} J^e_c − Ω^e_{ac} J^d_e
                let mut value = dj[a][(d, c)];
                for e in 0..dim {
                    value += fc.get(d, a, e) * j_mat[(e, c)] - fc.get(e, a, c) * j_mat[(d, e)];
                }
                worst = worst.max(value.abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::LambdaFamily;
    use crate::spaceform::SpaceFormChart;
    use crate::tensor::max_abs_diff;

    fn point(x: &[f64], p: &[f64]) -> CotangentPoint {
        CotangentPoint::new(DVector::from_column_slice(x), DVector::from_column_slice(p))
    }

    fn flat_constant_field() -> StructureField {
        let chart = SpaceFormChart::new(2, 0.0).unwrap();
        let family = LambdaFamily::constant(1.0, 1.0).unwrap();
        StructureField::new(chart, family)
    }

    fn hyperbolic_linear_field() -> StructureField {
        let chart = SpaceFormChart::new(2, -1.0).unwrap();
        let family = LambdaFamily::power_plus_constant(1.0, 1.0, 1.0).unwrap();
        StructureField::new(chart, family)
    }

    fn spherical_field() -> StructureField {
        let chart = SpaceFormChart::new(2, 1.0).unwrap();
        let family = LambdaFamily::inverse_sqrt(1.0, 1.0, 1.0).unwrap();
        StructureField::new(chart, family)
    }

    #[test]
    fn flat_constant_connection_vanishes() {
        let field = flat_constant_field();
        let pt = point(&[0.3, 0.1], &[0.8, -0.5]);
        let cc = connection_coeffs(&field, &pt).unwrap();
        assert_eq!(cc.q.max_abs(), 0.0);
        assert_eq!(cc.p.max_abs(), 0.0);
        assert_eq!(cc.s.max_abs(), 0.0);
    }

    #[test]
    fn specialized_p_and_s_match_generic_route() {
        let fields = [hyperbolic_linear_field(), spherical_field()];
        for field in &fields {
            let pt = point(&[0.2, -0.3], &[0.7, 0.4]);
            let generic = connection_coeffs(field, &pt).unwrap();
            let literal = connection_space_form(field, &pt).unwrap();
            let p_gap = max_abs_diff(
                &generic.p.iter().copied().collect::<Vec<_>>(),
                &literal.p.iter().copied().collect::<Vec<_>>(),
            );
            let s_gap = max_abs_diff(
                &generic.s.iter().copied().collect::<Vec<_>>(),
                &literal.s.iter().copied().collect::<Vec<_>>(),
            );
            assert!(p_gap < 1e-9, "P mismatch {p_gap:.3e}");
            assert!(s_gap < 1e-9, "S mismatch {s_gap:.3e}");
        }
    }

    #[test]
    fn printed_q_matches_generic_route_only_for_constant_lambda() {
        // With λ′ = 0 every extra Q term vanishes and the printed form
        // agrees; with λ′ ≠ 0 the printed coefficients drift from the
        // ground truth, which the harness reports separately.
        let flat = flat_constant_field();
        let pt = point(&[0.1, 0.2], &[0.4, 0.9]);
        let generic = connection_coeffs(&flat, &pt).unwrap();
        let literal = connection_space_form(&flat, &pt).unwrap();
        let gap = max_abs_diff(
            &generic.q.iter().copied().collect::<Vec<_>>(),
            &literal.q.iter().copied().collect::<Vec<_>>(),
        );
        assert!(gap < 1e-12);
    }

    #[test]
    fn koszul_oracle_flat_constant_is_exact() {
        let field = flat_constant_field();
        let pt = point(&[0.5, -0.1], &[0.3, 0.9]);
        let comparison = koszul_oracle(&field, &pt, 1e-4).unwrap();
        assert_eq!(comparison.residual, 0.0);
    }

    #[test]
    fn koszul_oracle_matches_closed_connection() {
        for field in [hyperbolic_linear_field(), spherical_field()] {
            let pt = point(&[0.2, -0.25], &[0.6, 0.35]);
            let h = field.fd_step(&pt, None);
            let comparison = koszul_oracle(&field, &pt, h).unwrap();
            assert!(
                comparison.residual < 1e-6,
                "Koszul residual {:.3e}",
                comparison.residual
            );
        }
    }

    #[test]
    fn torsion_vanishes_algebraically() {
        for field in [flat_constant_field(), hyperbolic_linear_field(), spherical_field()] {
            let pt = point(&[0.15, -0.2], &[0.5, 0.8]);
            let residual = torsion_residual(&field, &pt).unwrap();
            assert!(residual < 1e-10, "torsion residual {residual:.3e}");
        }
    }

    #[test]
    fn metric_and_complex_structure_are_parallel() {
        for field in [hyperbolic_linear_field(), spherical_field()] {
            let pt = point(&[0.3, 0.1], &[0.45, -0.6]);
            let h = field.fd_step(&pt, None);
            let g_residual = metric_compatibility_residual(&field, &pt, h).unwrap();
            let j_residual = nabla_j_residual(&field, &pt, h).unwrap();
            assert!(g_residual < 1e-6, "nabla G residual {g_residual:.3e}");
            assert!(j_residual < 1e-6, "nabla J residual {j_residual:.3e}");
        }
    }

    #[test]
    fn mu_offset_configurations_are_rejected() {
        let field = spherical_field().with_mu_offset(1.0);
        let pt = point(&[0.2, 0.2], &[0.3, 0.3]);
        assert!(matches!(
            connection_coeffs(&field, &pt),
            Err(Error::InvalidConfig(_))
        ));
    }
}
