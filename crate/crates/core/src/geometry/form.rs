//! The fundamental 2-form `φ(X, Y) = G(X, JY)` and its exterior
//! derivative.
//!
//! `dφ` is evaluated numerically: φ is expressed in the coordinate coframe
//! `(dq, dp)` at points near the evaluation point, the coordinate exterior
//! derivative is applied by Richardson central differences, and the
//! max-abs 3-form component is returned. The closed structure (μ = λ′)
//! must leave this at rounding level; an injected μ = λ′ + δ must instead
//! reproduce the closed-form
//! `dφ = ½ (λ′ − μ) g^{0h} Dp_h ∧ Dp_i ∧ dq^i`.

use nalgebra::{DMatrix, DVector};

use crate::bundle::{adapted_frame, CotangentPoint};
use crate::error::{Error, Result};
use crate::structure::StructureField;
use crate::tensor::Tensor3;

/// φ in the coordinate frame at a point, flattened column-major.
fn phi_coordinate_flat(field: &StructureField, q: &CotangentPoint) -> Result<Vec<f64>> {
    let n = field.dim();
    let dim = 2 * n;
    let data = field.point_data(q)?;

    // Frame matrix of φ: φ(δ_i, δ_j) = φ(∂p_i, ∂p_j) = 0 and
    // φ(∂p_i, δ_j) = phi[(i, j)].
    let mut phi_frame = DMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            phi_frame[(n + i, j)] = data.tensors.phi[(i, j)];
            phi_frame[(j, n + i)] = -data.tensors.phi[(i, j)];
        }
    }

    let t_inv = data.frame.basis_change_inverse();
    let phi_coord = t_inv.transpose() * phi_frame * t_inv;
    Ok(phi_coord.as_slice().to_vec())
}

/// Numeric `dφ` and its comparison against the closed 3-form.
#[derive(Debug, Clone, Copy)]
pub struct DphiComparison {
    /// Max-abs coordinate component of the finite-difference `dφ`.
    pub fd_max: f64,
    /// Max-abs adapted component of the closed-form `dφ`.
    pub closed_max: f64,
    /// Max-abs difference between the numeric `dφ` (converted to the
    /// adapted frame) and the closed form.
    pub closed_match_residual: f64,
    pub disagreement: f64,
}

/// Closed-form `dφ` evaluated on adapted frame triples:
/// `½ (λ′ − μ) g^{0h} Dp_h ∧ Dp_i ∧ dq^i`, returned as the fully
/// antisymmetric component array over frame indices.
pub fn dphi_closed_form_adapted(field: &StructureField, pt: &CotangentPoint) -> Result<Tensor3> {
    let n = field.dim();
    let dim = 2 * n;
    let data = field.point_data(pt)?;
    let factor = 0.5 * (data.coeffs.lambda_prime - data.coeffs.mu);
    let g0 = &data.frame.g0;

    // Coframe pairings on frame fields: Dp_h(E_a) = δ_{a, n+h},
    // dq^i(E_a) = δ_{a, i}.
    let dp_pairing = |h: usize, a: usize| -> f64 {
        if a == n + h {
            1.0
        } else {
            0.0
        }
    };
    let dq_pairing = |i: usize, a: usize| -> f64 {
        if a == i {
            1.0
        } else {
            0.0
        }
    };

    let mut out = Tensor3::zeros(dim);
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let mut value = 0.0;
                for h in 0..n {
                    if g0[h] == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        // det of the 3×3 pairing matrix of (Dp_h, Dp_i, dq^i)
                        // against (E_a, E_b, E_c).
                        let row0 = [dp_pairing(h, a), dp_pairing(h, b), dp_pairing(h, c)];
                        let row1 = [dp_pairing(i, a), dp_pairing(i, b), dp_pairing(i, c)];
                        let row2 = [dq_pairing(i, a), dq_pairing(i, b), dq_pairing(i, c)];
                        let det = row0[0] * (row1[1] * row2[2] - row1[2] * row2[1])
                            - row0[1] * (row1[0] * row2[2] - row1[2] * row2[0])
                            + row0[2] * (row1[0] * row2[1] - row1[1] * row2[0]);
                        value += g0[h] * det;
                    }
                }
                out[(a, b, c)] = factor * value;
            }
        }
    }
    Ok(out)
}

/// Finite-difference exterior derivative of φ at a point.
pub fn dphi_residual(field: &StructureField, pt: &CotangentPoint, h: f64) -> Result<DphiComparison> {
    let n = field.dim();
    let dim = 2 * n;

    // Coordinate-direction derivatives of the coordinate φ matrix.
    let mut dphi: Vec<DMatrix<f64>> = Vec::with_capacity(dim);
    let mut disagreement: f64 = 0.0;
    for alpha in 0..dim {
        let mut direction = DVector::zeros(dim);
        direction[alpha] = 1.0;
        let (flat, gap) = fd_vec_along(field, pt, &direction, h)?;
        disagreement = disagreement.max(gap);
        dphi.push(DMatrix::from_column_slice(dim, dim, &flat));
    }
    if disagreement > 1e-3 {
        return Err(Error::StepUnreliable {
            context: "exterior derivative of phi".into(),
            disagreement,
        });
    }

    // (dφ)_{αβγ} = ∂_α φ_{βγ} + ∂_β φ_{γα} + ∂_γ φ_{αβ}
    let mut dphi_coord = Tensor3::zeros(dim);
    let mut fd_max: f64 = 0.0;
    for alpha in 0..dim {
        for beta in 0..dim {
            for gamma in 0..dim {
                let value = dphi[alpha][(beta, gamma)]
                    + dphi[beta][(gamma, alpha)]
                    + dphi[gamma][(alpha, beta)];
                dphi_coord[(alpha, beta, gamma)] = value;
                fd_max = fd_max.max(value.abs());
            }
        }
    }

    // Convert to adapted frame components for the closed-form comparison.
    let ms = field.metric(&pt.x)?;
    let frame = adapted_frame(&ms, pt);
    let t = &frame.basis_change;
    let closed = dphi_closed_form_adapted(field, pt)?;
    let mut closed_match_residual: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let mut adapted = 0.0;
                for alpha in 0..dim {
                    if t[(alpha, a)] == 0.0 {
                        continue;
                    }
                    for beta in 0..dim {
                        if t[(beta, b)] == 0.0 {
                            continue;
                        }
                        for gamma in 0..dim {
                            adapted += t[(alpha, a)]
                                * t[(beta, b)]
                                * t[(gamma, c)]
                                * dphi_coord[(alpha, beta, gamma)];
                        }
                    }
                }
                closed_match_residual =
                    closed_match_residual.max((adapted - closed[(a, b, c)]).abs());
            }
        }
    }

    Ok(DphiComparison {
        fd_max,
        closed_max: closed.max_abs(),
        closed_match_residual,
        disagreement,
    })
}

fn fd_vec_along(
    field: &StructureField,
    pt: &CotangentPoint,
    direction: &DVector<f64>,
    h: f64,
) -> Result<(Vec<f64>, f64)> {
    let plus = phi_coordinate_flat(field, &pt.shifted(direction, h))?;
    let minus = phi_coordinate_flat(field, &pt.shifted(direction, -h))?;
    let plus_half = phi_coordinate_flat(field, &pt.shifted(direction, h / 2.0))?;
    let minus_half = phi_coordinate_flat(field, &pt.shifted(direction, -h / 2.0))?;
    let len = plus.len();
    let mut out = Vec::with_capacity(len);
    let mut disagreement: f64 = 0.0;
    for i in 0..len {
        let coarse = (plus[i] - minus[i]) / (2.0 * h);
        let fine = (plus_half[i] - minus_half[i]) / h;
        out.push((4.0 * fine - coarse) / 3.0);
        disagreement = disagreement.max((fine - coarse).abs());
    }
    Ok((out, disagreement))
}
