//! Curvature of the lifted metric: the six closed-form component blocks,
//! the finite-difference composition oracle
//! `K(X, Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_{[X,Y]} Z`, the Ricci trace, and
//! holomorphic sectional curvature.
//!
//! Block index order is `[(output, first input, second input, argument)]`
//! with base-range indices; the names encode the input/argument types,
//! e.g. `vh_v` takes a vertical and a horizontal input, acts on a
//! horizontal argument and produces a vertical output.

use nalgebra::{DMatrix, DVector};

use crate::bundle::{full_matrices, CotangentPoint};
use crate::error::{Error, Result};
use crate::structure::StructureField;
use crate::tensor::Tensor4;

use super::connection::{connection_coeffs_at, frame_connection};
use super::frame::{frame_bracket, frame_derivative, FrameDirection};

#[derive(Debug, Clone)]
pub struct CurvatureBlocks {
    /// `K(δ_i, δ_j) δ_k`, horizontal output.
    pub hh_h: Tensor4,
    /// `K(δ_i, δ_j) ∂p_k`, vertical output.
    pub hh_v: Tensor4,
    /// `K(∂p_i, ∂p_j) δ_k`, horizontal output.
    pub vv_h: Tensor4,
    /// `K(∂p_i, ∂p_j) ∂p_k`, vertical output.
    pub vv_v: Tensor4,
    /// `K(∂p_i, δ_j) δ_k`, vertical output.
    pub vh_v: Tensor4,
    /// `K(∂p_i, δ_j) ∂p_k`, horizontal output.
    pub vh_h: Tensor4,
}

impl CurvatureBlocks {
    pub fn max_abs(&self) -> f64 {
        self.hh_h
            .max_abs()
            .max(self.hh_v.max_abs())
            .max(self.vv_h.max_abs())
            .max(self.vv_v.max_abs())
            .max(self.vh_v.max_abs())
            .max(self.vh_h.max_abs())
    }

    /// The full operator `K[(d, a, b, c)]` on frame indices, assembled
    /// with `K(X, Y) = −K(Y, X)` for the mixed pairs.
    pub fn full_operator(&self) -> Tensor4 {
        let n = self.hh_h.dim();
        let dim = 2 * n;
        let mut k_full = Tensor4::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for h in 0..n {
                        // horizontal-horizontal inputs
                        k_full[(h, i, j, k)] = self.hh_h[(h, i, j, k)];
                        k_full[(n + h, i, j, n + k)] = self.hh_v[(h, i, j, k)];
                        // vertical-vertical inputs
                        k_full[(h, n + i, n + j, k)] = self.vv_h[(h, i, j, k)];
                        k_full[(n + h, n + i, n + j, n + k)] = self.vv_v[(h, i, j, k)];
                        // vertical-horizontal inputs and their mirrors
                        k_full[(n + h, n + i, j, k)] = self.vh_v[(h, i, j, k)];
                        k_full[(h, n + i, j, n + k)] = self.vh_h[(h, i, j, k)];
                        k_full[(n + h, j, n + i, k)] = -self.vh_v[(h, i, j, k)];
                        k_full[(h, j, n + i, n + k)] = -self.vh_h[(h, i, j, k)];
                    }
                }
            }
        }
        k_full
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Closed-form curvature blocks at a point.
pub fn curvature_blocks(field: &StructureField, pt: &CotangentPoint) -> Result<CurvatureBlocks> {
    let n = field.dim();
    let a = field.scale();
    let c = field.curvature();
    let data = field.point_data(pt)?;
    let st = &data.tensors;
    let coeffs = &data.coeffs;
    let g0 = &data.frame.g0;
    let ca = c / a;

    // ∂/∂p_i (λ p_j) = λ′ g^{0i} p_j + λ δ^i_j, the mixed-line factor.
    let mut dlam = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            dlam[(i, j)] =
                coeffs.lambda_prime * g0[i] * pt.p[j] + coeffs.lambda * delta(i, j);
        }
    }

    let mut blocks = CurvatureBlocks {
        hh_h: Tensor4::zeros(n),
        hh_v: Tensor4::zeros(n),
        vv_h: Tensor4::zeros(n),
        vv_v: Tensor4::zeros(n),
        vh_v: Tensor4::zeros(n),
        vh_h: Tensor4::zeros(n),
    };

    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    blocks.hh_h[(h, i, j, k)] =
                        ca * (delta(h, i) * st.g1[(j, k)] - delta(h, j) * st.g1[(i, k)]);
                    blocks.vv_v[(h, i, j, k)] =
                        ca * (delta(h, i) * st.g2[(j, k)] - delta(h, j) * st.g2[(i, k)]);

                    let mut hh_v = 0.0;
                    let mut vv_h = 0.0;
                    for s in 0..n {
                        hh_v += st.g2[(s, k)]
                            * (st.j1[(j, s)] * st.j1[(i, h)] - st.j1[(i, s)] * st.j1[(j, h)]);
                        vv_h += st.g1[(s, k)]
                            * (st.j2[(j, s)] * st.j2[(i, h)] - st.j2[(i, s)] * st.j2[(j, h)]);
                    }
                    blocks.hh_v[(h, i, j, k)] = ca * hh_v;
                    blocks.vv_h[(h, i, j, k)] = ca * vv_h;

                    blocks.vh_v[(h, i, j, k)] = ca * st.j1[(k, h)] * dlam[(i, j)];
                    blocks.vh_h[(h, i, j, k)] = -ca * st.j2[(k, h)] * dlam[(i, j)];
                }
            }
        }
    }

    Ok(blocks)
}

/// Oracle output: the composed operator, plus the relative residual
/// against the closed-form blocks and the worst Richardson disagreement.
#[derive(Debug, Clone)]
pub struct CurvatureOracleOutput {
    pub operator: Tensor4,
    pub relative_residual: f64,
    pub disagreement: f64,
}

/// Finite-difference composition of the closed-form connection along
/// frame directions, with exact frame-field derivative corrections.
pub fn curvature_oracle(
    field: &StructureField,
    pt: &CotangentPoint,
    h: f64,
) -> Result<CurvatureOracleOutput> {
    let n = field.dim();
    let dim = 2 * n;
    let data = field.point_data(pt)?;
    let cc = connection_coeffs_at(field, pt, &data)?;
    let omega = frame_connection(n, &cc);
    let r0 = data.metric.riemann_contracted(&pt.p);

    // Derivatives of the frame connection along every frame direction.
    let mut domega: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut disagreement: f64 = 0.0;
    for d in 0..dim {
        let (flat, gap) = frame_derivative(&data, pt, FrameDirection(d), h, |q| {
            let point = field.point_data(q)?;
            let cc_q = connection_coeffs_at(field, q, &point)?;
            Ok(frame_connection(n, &cc_q).as_slice().to_vec())
        })?;
        disagreement = disagreement.max(gap);
        domega.push(flat);
    }
    let omega_scale = omega
        .as_slice()
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    if disagreement > 1e-3 * omega_scale {
        return Err(Error::StepUnreliable {
            context: "curvature oracle: connection derivatives".into(),
            disagreement,
        });
    }

    let idx = |d: usize, a: usize, b: usize| (d * dim + a) * dim + b;

    let mut operator = Tensor4::zeros(dim);
    for a in 0..dim {
        for b in 0..dim {
            let bracket = frame_bracket(&data, FrameDirection(a), FrameDirection(b), &r0);
            for c in 0..dim {
                for d in 0..dim {
                    let mut value = domega[a][idx(d, b, c)] - domega[b][idx(d, a, c)];
                    for e in 0..dim {
                        value += omega.get(e, b, c) * omega.get(d, a, e)
                            - omega.get(e, a, c) * omega.get(d, b, e);
                    }
                    for k in 0..n {
                        value -= bracket[k] * omega.get(d, n + k, c);
                    }
                    operator[(d, a, b, c)] = value;
                }
            }
        }
    }

    let closed = curvature_blocks(field, pt)?.full_operator();
    let scale = closed.max_abs().max(1.0);
    let mut worst: f64 = 0.0;
    for (a, b) in operator.as_slice().iter().zip(closed.as_slice()) {
        worst = worst.max((a - b).abs());
    }

    Ok(CurvatureOracleOutput {
        operator,
        relative_residual: worst / scale,
        disagreement,
    })
}

/// Ricci blocks from tracing the curvature operator over the frame.
#[derive(Debug, Clone)]
pub struct RicciBlocks {
    pub ric_hh: DMatrix<f64>,
    pub ric_vv: DMatrix<f64>,
    /// `Ric(∂p_i, δ_j)`; structurally zero for this family.
    pub ric_mixed: DMatrix<f64>,
}

pub fn ricci_blocks(blocks: &CurvatureBlocks) -> RicciBlocks {
    let n = blocks.hh_h.dim();
    let k_full = blocks.full_operator();
    let dim = 2 * n;
    let trace = |b: usize, c: usize| -> f64 {
        let mut s = 0.0;
        for a in 0..dim {
            s += k_full[(a, a, b, c)];
        }
        s
    };

    let mut ric_hh = DMatrix::zeros(n, n);
    let mut ric_vv = DMatrix::zeros(n, n);
    let mut ric_mixed = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            ric_hh[(i, j)] = trace(i, j);
            ric_vv[(i, j)] = trace(n + i, n + j);
            ric_mixed[(i, j)] = trace(n + i, j);
        }
    }
    RicciBlocks {
        ric_hh,
        ric_vv,
        ric_mixed,
    }
}

/// Blockwise max-abs residual of `Ric − (c n / A) G`.
pub fn einstein_residual(field: &StructureField, pt: &CotangentPoint) -> Result<f64> {
    let n = field.dim();
    let data = field.point_data(pt)?;
    let blocks = curvature_blocks(field, pt)?;
    let ricci = ricci_blocks(&blocks);
    let factor = field.curvature() * n as f64 / field.scale();

    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst
                .max((ricci.ric_hh[(i, j)] - factor * data.tensors.g1[(i, j)]).abs())
                .max((ricci.ric_vv[(i, j)] - factor * data.tensors.g2[(i, j)]).abs())
                .max(ricci.ric_mixed[(i, j)].abs());
        }
    }
    Ok(worst)
}

/// `G(K(X, Y)Z, W) + G(K(X, Y)W, Z)` maximised over frame quadruples.
pub fn curvature_skew_residual(field: &StructureField, pt: &CotangentPoint) -> Result<f64> {
    let n = field.dim();
    let dim = 2 * n;
    let data = field.point_data(pt)?;
    let (_, g_mat) = full_matrices(&data.tensors);
    let k_full = curvature_blocks(field, pt)?.full_operator();

    // lowered[(e, a, b, c)] = G(K(E_a, E_b) E_c, E_e)
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for e in 0..c {
                    let mut first = 0.0;
                    let mut second = 0.0;
                    for d in 0..dim {
                        first += k_full[(d, a, b, c)] * g_mat[(d, e)];
                        second += k_full[(d, a, b, e)] * g_mat[(d, c)];
                    }
                    worst = worst.max((first + second).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Holomorphic sectional curvature
/// `H(X) = G(K(X, JX) JX, X) / G(X, X)²` for a frame-component vector `X`.
pub fn holomorphic_sectional_curvature(
    field: &StructureField,
    pt: &CotangentPoint,
    x: &DVector<f64>,
) -> Result<f64> {
    let data = field.point_data(pt)?;
    let (j_mat, g_mat) = full_matrices(&data.tensors);
    let dim = j_mat.nrows();
    assert_eq!(x.len(), dim);

    let norm_sq = (x.transpose() * &g_mat * x)[(0, 0)];
    if norm_sq < 1e-12 {
        return Err(Error::ZeroCovector("direction has vanishing G-norm"));
    }

    let jx = &j_mat * x;
    let k_full = curvature_blocks(field, pt)?.full_operator();

    // w^d = K^d_{abc} X^a (JX)^b (JX)^c
    let mut w = DVector::zeros(dim);
    for d in 0..dim {
        let mut s = 0.0;
        for a in 0..dim {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..dim {
                if jx[b] == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    s += k_full[(d, a, b, c)] * x[a] * jx[b] * jx[c];
                }
            }
        }
        w[d] = s;
    }
    let numerator = (w.transpose() * &g_mat * x)[(0, 0)];
    Ok(numerator / (norm_sq * norm_sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::LambdaFamily;
    use crate::spaceform::{metric_at, SpaceFormChart};
    use approx::assert_relative_eq;

    fn point(x: &[f64], p: &[f64]) -> CotangentPoint {
        CotangentPoint::new(DVector::from_column_slice(x), DVector::from_column_slice(p))
    }

    fn spherical_field(n: usize, a: f64) -> StructureField {
        let chart = SpaceFormChart::new(n, 1.0).unwrap();
        let family = LambdaFamily::inverse_sqrt(a, 1.0, 1.0).unwrap();
        StructureField::new(chart, family)
    }

    fn hyperbolic_field(n: usize, a: f64) -> StructureField {
        let chart = SpaceFormChart::new(n, -1.0).unwrap();
        let family = LambdaFamily::power_plus_constant(a, 2.0, 1.0).unwrap();
        StructureField::new(chart, family)
    }

    #[test]
    fn flat_curvature_is_exactly_zero() {
        let chart = SpaceFormChart::new(2, 0.0).unwrap();
        let family = LambdaFamily::power_plus_constant(1.0, 2.0, 1.0).unwrap();
        let field = StructureField::new(chart, family);
        let pt = point(&[0.4, -0.7], &[0.9, 0.2]);
        let blocks = curvature_blocks(&field, &pt).unwrap();
        assert_eq!(blocks.max_abs(), 0.0);

        let oracle = curvature_oracle(&field, &pt, 1e-4).unwrap();
        assert!(oracle.operator.max_abs() < 1e-9);
    }

    #[test]
    fn horizontal_block_at_zero_covector_reduces_to_base_curvature() {
        // At p = 0 the first block is (c/A)(δ^h_i G1_{jk} − δ^h_j G1_{ik})
        // with G1 = A g, i.e. the constant-curvature base tensor.
        let field = spherical_field(2, 1.0);
        let x = DVector::from_column_slice(&[0.3, 0.1]);
        let pt = CotangentPoint::new(x.clone(), DVector::zeros(2));
        let blocks = curvature_blocks(&field, &pt).unwrap();
        let ms = metric_at(field.chart(), &x).unwrap();
        for h in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        let expected =
                            delta(h, i) * ms.g[(j, k)] - delta(h, j) * ms.g[(i, k)];
                        assert_relative_eq!(
                            blocks.hh_h[(h, i, j, k)],
                            expected,
                            epsilon = 1e-12
                        );
                        assert_relative_eq!(
                            blocks.hh_h[(h, i, j, k)],
                            ms.riemann[(h, k, i, j)],
                            epsilon = 1e-10
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_matches_closed_blocks_spherical() {
        let field = spherical_field(2, 1.0);
        let pt = point(&[0.2, -0.1], &[0.6, 0.5]);
        let h = field.fd_step(&pt, None);
        let oracle = curvature_oracle(&field, &pt, h).unwrap();
        assert!(
            oracle.relative_residual < 1e-6,
            "relative residual {:.3e}",
            oracle.relative_residual
        );
    }

    #[test]
    fn oracle_matches_closed_blocks_hyperbolic() {
        let field = hyperbolic_field(2, 1.0);
        let pt = point(&[0.25, 0.3], &[0.4, -0.7]);
        let h = field.fd_step(&pt, None);
        let oracle = curvature_oracle(&field, &pt, h).unwrap();
        assert!(
            oracle.relative_residual < 1e-5,
            "relative residual {:.3e}",
            oracle.relative_residual
        );
    }

    #[test]
    fn oracle_operator_is_antisymmetric_in_inputs() {
        let field = spherical_field(2, 1.0);
        let pt = point(&[0.15, 0.2], &[0.5, 0.3]);
        let oracle = curvature_oracle(&field, &pt, field.fd_step(&pt, None)).unwrap();
        let dim = 4;
        let mut worst: f64 = 0.0;
        for d in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    for c in 0..dim {
                        worst = worst.max(
                            (oracle.operator[(d, a, b, c)] + oracle.operator[(d, b, a, c)])
                                .abs(),
                        );
                    }
                }
            }
        }
        assert!(worst < 1e-8, "antisymmetry residual {worst:.3e}");
    }

    #[test]
    fn einstein_constants_match_dimension_and_scale() {
        // (n, c, A) = (2, 1, 1): Ric = 2 G1 on the horizontal block.
        let field = spherical_field(2, 1.0);
        let pt = point(&[0.2, 0.2], &[0.4, -0.3]);
        let data = field.point_data(&pt).unwrap();
        let blocks = curvature_blocks(&field, &pt).unwrap();
        let ricci = ricci_blocks(&blocks);
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(
                    ricci.ric_hh[(i, j)],
                    2.0 * data.tensors.g1[(i, j)],
                    epsilon = 1e-9
                );
            }
        }

        // (n, c, A) = (3, −1, 2): Ric = −(3/2) G2 on the vertical block.
        let field = hyperbolic_field(3, 2.0);
        let pt = point(&[0.2, -0.1, 0.3], &[0.5, 0.4, -0.2]);
        let data = field.point_data(&pt).unwrap();
        let blocks = curvature_blocks(&field, &pt).unwrap();
        let ricci = ricci_blocks(&blocks);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(
                    ricci.ric_vv[(i, j)],
                    -1.5 * data.tensors.g2[(i, j)],
                    epsilon = 1e-9
                );
                assert!(ricci.ric_mixed[(i, j)].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn flat_ricci_vanishes() {
        let chart = SpaceFormChart::new(2, 0.0).unwrap();
        let family = LambdaFamily::constant(1.0, 1.0).unwrap();
        let field = StructureField::new(chart, family);
        let pt = point(&[0.3, 0.4], &[0.2, 0.9]);
        let blocks = curvature_blocks(&field, &pt).unwrap();
        let ricci = ricci_blocks(&blocks);
        assert_eq!(ricci.ric_hh.abs().max(), 0.0);
        assert_eq!(ricci.ric_vv.abs().max(), 0.0);
        assert_eq!(ricci.ric_mixed.abs().max(), 0.0);
    }

    #[test]
    fn skew_symmetry_of_lowered_curvature() {
        for field in [spherical_field(2, 1.0), hyperbolic_field(2, 1.0)] {
            let pt = point(&[0.2, -0.3], &[0.55, 0.35]);
            let residual = curvature_skew_residual(&field, &pt).unwrap();
            assert!(residual < 1e-9, "skew residual {residual:.3e}");
        }
    }

    #[test]
    fn hsc_flat_is_zero_and_scale_invariant_elsewhere() {
        let chart = SpaceFormChart::new(2, 0.0).unwrap();
        let family = LambdaFamily::constant(1.0, 1.0).unwrap();
        let flat = StructureField::new(chart, family);
        let pt = point(&[0.1, 0.1], &[0.4, 0.6]);
        let x = DVector::from_column_slice(&[1.0, -0.4, 0.2, 0.7]);
        assert_eq!(
            holomorphic_sectional_curvature(&flat, &pt, &x).unwrap(),
            0.0
        );

        let field = spherical_field(2, 1.0);
        let value = holomorphic_sectional_curvature(&field, &pt, &x).unwrap();
        let doubled = holomorphic_sectional_curvature(&field, &pt, &(2.0 * &x)).unwrap();
        assert!((value - doubled).abs() < 1e-10);
    }

    #[test]
    fn hsc_differs_between_horizontal_and_vertical_directions() {
        let field = spherical_field(2, 1.0);
        let pt = point(&[0.2, -0.1], &[0.7, 0.4]);
        let horizontal = DVector::from_column_slice(&[1.0, 0.3, 0.0, 0.0]);
        let vertical = DVector::from_column_slice(&[0.0, 0.0, 1.0, -0.2]);
        let h_value = holomorphic_sectional_curvature(&field, &pt, &horizontal).unwrap();
        let v_value = holomorphic_sectional_curvature(&field, &pt, &vertical).unwrap();
        let spread = (h_value - v_value).abs() / h_value.abs().max(v_value.abs());
        assert!(spread > 1e-3, "spread {spread:.3e}");
    }

    #[test]
    fn zero_direction_is_rejected() {
        let field = spherical_field(2, 1.0);
        let pt = point(&[0.2, -0.1], &[0.7, 0.4]);
        let x = DVector::zeros(4);
        assert!(matches!(
            holomorphic_sectional_curvature(&field, &pt, &x),
            Err(Error::ZeroCovector(_))
        ));
    }
}
