//! Directional derivatives along the adapted frame, and the exact frame
//! brackets.
//!
//! Scalar functions on `T*M` are differentiated along straight coordinate
//! lines: the horizontal direction `δ/δq^k` is the line through
//! `(x + s e_k, p + s Γ⁰_{k·}(x, p))` — its tangent at `s = 0` realises
//! `∂/∂q^k + Γ⁰_{kh} ∂/∂p_h` — and the vertical direction `∂/∂p_k` is the
//! line moving `p` alone. One Richardson level is applied throughout.
//!
//! The brackets of the frame fields are exact:
//!
//! ```text
//! [∂/∂p_i, ∂/∂p_j] = 0
//! [∂/∂p_i, δ/δq^j] = Γ^i_{jk} ∂/∂p_k
//! [δ/δq^i, δ/δq^j] = R⁰_{kij} ∂/∂p_k
//! ```

use nalgebra::DVector;

use crate::bundle::CotangentPoint;
use crate::error::Result;
use crate::structure::{PointData, StructureField};
use crate::tensor::Tensor3;

/// An adapted-frame direction index: `0..n` horizontal, `n..2n` vertical.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameDirection(pub usize);

impl FrameDirection {
    pub fn is_horizontal(self, n: usize) -> bool {
        self.0 < n
    }
}

/// Straight-line realisation of a frame direction at a point, as a
/// `2n`-vector `(dx, dp)`.
pub fn direction_vector(
    data: &PointData,
    pt: &CotangentPoint,
    dir: FrameDirection,
) -> DVector<f64> {
    let n = pt.dim();
    let mut v = DVector::zeros(2 * n);
    if dir.0 < n {
        let k = dir.0;
        v[k] = 1.0;
        for h in 0..n {
            v[n + h] = data.frame.gamma0[(k, h)];
        }
    } else {
        v[n + (dir.0 - n)] = 1.0;
    }
    v
}

/// Richardson directional derivative of a vector-valued function of the
/// bundle point along a frame direction. Returns the derivative and the
/// max-abs disagreement between the two central-difference levels.
pub fn frame_derivative<F>(
    data: &PointData,
    pt: &CotangentPoint,
    dir: FrameDirection,
    h: f64,
    f: F,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&CotangentPoint) -> Result<Vec<f64>>,
{
    let line = direction_vector(data, pt, dir);
    let plus = f(&pt.shifted(&line, h))?;
    let minus = f(&pt.shifted(&line, -h))?;
    let plus_half = f(&pt.shifted(&line, h / 2.0))?;
    let minus_half = f(&pt.shifted(&line, -h / 2.0))?;

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

/// Exact bracket `[E_a, E_b]` of two adapted frame fields at a point;
/// always vertical, returned as its n vertical components. `r0` carries
/// `R⁰_{kij} = p_h R^h_{kij}` at the point.
pub fn frame_bracket(
    data: &PointData,
    a: FrameDirection,
    b: FrameDirection,
    r0: &Tensor3,
) -> DVector<f64> {
    let n = data.frame.gamma0.nrows();
    let mut vertical = DVector::zeros(n);
    match (a.0 < n, b.0 < n) {
        (true, true) => {
            // [δ/δq^i, δ/δq^j] = R⁰_{kij} ∂/∂p_k
            let (i, j) = (a.0, b.0);
            for k in 0..n {
                vertical[k] = r0[(k, i, j)];
            }
        }
        (false, true) => {
            // [∂/∂p_i, δ/δq^j] = Γ^i_{jk} ∂/∂p_k
            let (i, j) = (a.0 - n, b.0);
            for k in 0..n {
                vertical[k] = data.metric.gamma[(i, j, k)];
            }
        }
        (true, false) => {
            let (i, j) = (b.0 - n, a.0);
            for k in 0..n {
                vertical[k] = -data.metric.gamma[(i, j, k)];
            }
        }
        (false, false) => {}
    }
    vertical
}

/// Horizontal derivative of the energy density; must vanish, which makes
/// it a self-test of the chain-rule machinery used everywhere else.
pub fn horizontal_energy_derivative(
    field: &StructureField,
    pt: &CotangentPoint,
    h: f64,
) -> Result<f64> {
    let data = field.point_data(pt)?;
    let n = field.dim();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let (derivative, _) = frame_derivative(&data, pt, FrameDirection(k), h, |q| {
            let ms = field.metric(&q.x)?;
            Ok(vec![crate::bundle::energy_density(&ms, &q.p)])
        })?;
        worst = worst.max(derivative[0].abs());
    }
    Ok(worst)
}

/// Vertical derivative of the energy density along `∂/∂p_k` must be the
/// raised covector component `g^{0k}`; exposed for the same self-test
/// purpose.
pub fn vertical_energy_derivative_residual(
    field: &StructureField,
    pt: &CotangentPoint,
    h: f64,
) -> Result<f64> {
    let data = field.point_data(pt)?;
    let n = field.dim();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let (derivative, _) = frame_derivative(&data, pt, FrameDirection(n + k), h, |q| {
            let ms = field.metric(&q.x)?;
            Ok(vec![crate::bundle::energy_density(&ms, &q.p)])
        })?;
        worst = worst.max((derivative[0] - data.frame.g0[k]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd;
    use crate::params::LambdaFamily;
    use crate::spaceform::SpaceFormChart;

    fn test_field() -> StructureField {
        let chart = SpaceFormChart::new(2, -1.0).unwrap();
        let family = LambdaFamily::power_plus_constant(1.0, 2.0, 1.0).unwrap();
        StructureField::new(chart, family)
    }

    fn test_point() -> CotangentPoint {
        CotangentPoint::new(
            DVector::from_column_slice(&[0.3, -0.2]),
            DVector::from_column_slice(&[0.6, 0.9]),
        )
    }

    #[test]
    fn horizontal_derivative_of_energy_vanishes() {
        let field = test_field();
        let pt = test_point();
        let residual = horizontal_energy_derivative(&field, &pt, 1e-4).unwrap();
        assert!(residual < 1e-9, "residual {residual:.3e}");
    }

    #[test]
    fn vertical_derivative_of_energy_is_raised_covector() {
        let field = test_field();
        let pt = test_point();
        let residual = vertical_energy_derivative_residual(&field, &pt, 1e-4).unwrap();
        assert!(residual < 1e-9, "residual {residual:.3e}");
    }

    /// The two nontrivial bracket families, recomputed from scratch in the
    /// coordinate frame by finite differences. This pins both the bracket
    /// table and the curvature sign convention feeding `R⁰`.
    #[test]
    fn exact_brackets_match_coordinate_frame_differences() {
        let field = test_field();
        let pt = test_point();
        let data = field.point_data(&pt).unwrap();
        let n = 2;
        let r0 = data.metric.riemann_contracted(&pt.p);

        // Coordinate components of the frame fields as functions of the
        // point: horizontal a -> (e_a, Γ⁰_{a·}), vertical -> (0, e_{a-n}).
        let frame_components = |q: &CotangentPoint, a: usize| -> Vec<f64> {
            let ms = field.metric(&q.x).unwrap();
            let frame = crate::bundle::adapted_frame(&ms, q);
            let mut out = vec![0.0; 2 * n];
            if a < n {
                out[a] = 1.0;
                for h in 0..n {
                    out[n + h] = frame.gamma0[(a, h)];
                }
            } else {
                out[a] = 1.0;
            }
            out
        };

        // Coordinate bracket [U, V]^c = U^d ∂_d V^c − V^d ∂_d U^c with
        // plain coordinate partials.
        let coordinate_bracket = |a: usize, b: usize| -> Vec<f64> {
            let h = 1e-5;
            let mut result = vec![0.0; 2 * n];
            for d in 0..2 * n {
                let mut dir = DVector::zeros(2 * n);
                dir[d] = 1.0;
                let (dv, _) =
                    fd::richardson_vec(|s| frame_components(&pt.shifted(&dir, s), b), h);
                let (du, _) =
                    fd::richardson_vec(|s| frame_components(&pt.shifted(&dir, s), a), h);
                let ua = frame_components(&pt, a)[d];
                let vb = frame_components(&pt, b)[d];
                for c in 0..2 * n {
                    result[c] += ua * dv[c] - vb * du[c];
                }
            }
            result
        };

        for a in 0..2 * n {
            for b in 0..2 * n {
                let numeric = coordinate_bracket(a, b);
                let exact_vertical =
                    frame_bracket(&data, FrameDirection(a), FrameDirection(b), &r0);
                for c in 0..2 * n {
                    let expected = if c < n { 0.0 } else { exact_vertical[c - n] };
                    assert!(
                        (numeric[c] - expected).abs() < 1e-7,
                        "bracket [{a}, {b}] component {c}: numeric {} vs exact {}",
                        numeric[c],
                        expected
                    );
                }
            }
        }
    }
}
