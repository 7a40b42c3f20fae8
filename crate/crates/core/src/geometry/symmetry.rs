//! Local symmetry: the covariant derivative of the curvature tensor.
//!
//! `(∇_W K)(X, Y)Z` is evaluated on all frame-direction combinations via
//! finite differences of the closed-form curvature blocks plus exact
//! connection contractions on all four slots. The closed structure must
//! leave every component at rounding level; the derived-coefficient
//! perturbation control must not.

use crate::bundle::CotangentPoint;
use crate::error::{Error, Result};
use crate::structure::StructureField;

use super::connection::{connection_coeffs_at, frame_connection};
use super::curvature::curvature_blocks;
use super::frame::{frame_derivative, FrameDirection};

/// Max-abs component of `∇K` over all `(2n)^5` frame slots.
pub fn nabla_k_residual(field: &StructureField, pt: &CotangentPoint, h: f64) -> Result<f64> {
    let n = field.dim();
    let dim = 2 * n;
    let data = field.point_data(pt)?;
    let cc = connection_coeffs_at(field, pt, &data)?;
    let omega = frame_connection(n, &cc);
    let k_full = curvature_blocks(field, pt)?.full_operator();

    // Derivatives of the full curvature operator along each direction.
    let mut dk: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut disagreement: f64 = 0.0;
    for w in 0..dim {
        let (flat, gap) = frame_derivative(&data, pt, FrameDirection(w), h, |q| {
            Ok(curvature_blocks(field, q)?.full_operator().as_slice().to_vec())
        })?;
        disagreement = disagreement.max(gap);
        dk.push(flat);
    }
    let k_scale = k_full.max_abs().max(1.0);
    if disagreement > 1e-3 * k_scale {
        return Err(Error::StepUnreliable {
            context: "covariant derivative of curvature".into(),
            disagreement,
        });
    }

    let idx = |d: usize, a: usize, b: usize, c: usize| ((d * dim + a) * dim + b) * dim + c;

    let mut worst: f64 = 0.0;
    for w in 0..dim {
        for d in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    for c in 0..dim {
                        let mut value = dk[w][idx(d, a, b, c)];
                        for e in 0..dim {
                            value += k_full[(e, a, b, c)] * omega.get(d, w, e)
                                - omega.get(e, w, a) * k_full[(d, e, b, c)]
                                - omega.get(e, w, b) * k_full[(d, a, e, c)]
                                - omega.get(e, w, c) * k_full[(d, a, b, e)];
                        }
                        worst = worst.max(value.abs());
                    }
                }
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
    use nalgebra::DVector;

    fn point(x: &[f64], p: &[f64]) -> CotangentPoint {
        CotangentPoint::new(DVector::from_column_slice(x), DVector::from_column_slice(p))
    }

    #[test]
    fn flat_structure_is_trivially_symmetric() {
        let chart = SpaceFormChart::new(2, 0.0).unwrap();
        let family = LambdaFamily::constant(1.0, 1.0).unwrap();
        let field = StructureField::new(chart, family);
        let pt = point(&[0.2, 0.5], &[0.7, -0.3]);
        let residual = nabla_k_residual(&field, &pt, 1e-4).unwrap();
        assert_eq!(residual, 0.0);
    }

    #[test]
    fn spherical_structure_is_locally_symmetric() {
        let chart = SpaceFormChart::new(2, 1.0).unwrap();
        let family = LambdaFamily::inverse_sqrt(1.0, 1.0, 1.0).unwrap();
        let field = StructureField::new(chart, family);
        let pt = point(&[0.25, -0.15], &[0.5, 0.6]);
        let h = field.fd_step(&pt, None);
        let residual = nabla_k_residual(&field, &pt, h).unwrap();
        assert!(residual < 1e-5, "nabla K residual {residual:.3e}");
    }

    #[test]
    fn hyperbolic_structure_is_locally_symmetric() {
        let chart = SpaceFormChart::new(2, -1.0).unwrap();
        let family = LambdaFamily::power_plus_constant(1.0, 2.0, 1.0).unwrap();
        let field = StructureField::new(chart, family);
        let pt = point(&[0.3, 0.2], &[0.4, -0.5]);
        let h = field.fd_step(&pt, None);
        let residual = nabla_k_residual(&field, &pt, h).unwrap();
        assert!(residual < 1e-5, "nabla K residual {residual:.3e}");
    }

    #[test]
    fn perturbed_metric_coefficient_breaks_symmetry() {
        let chart = SpaceFormChart::new(2, 1.0).unwrap();
        let family = LambdaFamily::inverse_sqrt(1.0, 1.0, 1.0).unwrap();
        let field = StructureField::new(chart, family).with_d2_offset(0.1);
        let pt = point(&[0.25, -0.15], &[0.5, 0.6]);
        let h = field.fd_step(&pt, None);
        let residual = nabla_k_residual(&field, &pt, h).unwrap();
        assert!(residual > 1e-3, "control residual too small: {residual:.3e}");
    }
}
