//! A `(G, J)` structure as a field over `T*M`: one chart, one λ-family,
//! and the evaluation plumbing shared by the geometry routines and their
//! finite-difference oracles.

use nalgebra::{DMatrix, DVector};

use crate::bundle::{
    adapted_frame, energy_density, full_matrices, structure_tensors, AdaptedFrame,
    CotangentPoint, StructureTensors,
};
use crate::error::Result;
use crate::params::{
    coefficients_with, CoefficientOptions, CoefficientSet, LambdaFamily, MuMode,
};
use crate::spaceform::{metric_at, MetricSample, SpaceFormChart};

/// Default finite-difference step factor for bundle-level oracles.
pub const DEFAULT_GEOMETRY_STEP: f64 = 1e-4;

/// Everything evaluated at one bundle point.
#[derive(Debug, Clone)]
pub struct PointData {
    pub metric: MetricSample,
    pub frame: AdaptedFrame,
    pub coeffs: CoefficientSet,
    pub tensors: StructureTensors,
}

impl PointData {
    pub fn t(&self) -> f64 {
        self.coeffs.t
    }
}

/// The configured structure: chart, family and coefficient options.
/// All geometry operations take a field plus a point.
#[derive(Debug, Clone)]
pub struct StructureField {
    chart: SpaceFormChart,
    family: LambdaFamily,
    options: CoefficientOptions,
}

impl StructureField {
    pub fn new(chart: SpaceFormChart, family: LambdaFamily) -> Self {
        Self {
            chart,
            family,
            options: CoefficientOptions::default(),
        }
    }

    pub fn with_options(mut self, options: CoefficientOptions) -> Self {
        self.options = options;
        self
    }

    /// Same field with the integrable b₁ shifted by `delta`.
    pub fn with_b1_offset(mut self, delta: f64) -> Self {
        self.options.b1_offset = delta;
        self
    }

    /// Same field with the derived d₂ shifted by `delta`.
    pub fn with_d2_offset(mut self, delta: f64) -> Self {
        self.options.d2_offset = delta;
        self
    }

    /// Same field with μ = λ′ + delta instead of μ = λ′.
    pub fn with_mu_offset(mut self, delta: f64) -> Self {
        self.options.mu = MuMode::OffsetFromLambdaPrime(delta);
        self
    }

    pub fn chart(&self) -> &SpaceFormChart {
        &self.chart
    }

    pub fn family(&self) -> &LambdaFamily {
        &self.family
    }

    pub fn options(&self) -> &CoefficientOptions {
        &self.options
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn curvature(&self) -> f64 {
        self.chart.curvature()
    }

    pub fn scale(&self) -> f64 {
        self.family.scale()
    }

    pub fn metric(&self, x: &DVector<f64>) -> Result<MetricSample> {
        metric_at(&self.chart, x)
    }

    pub fn coefficients(&self, t: f64) -> Result<CoefficientSet> {
        coefficients_with(&self.family, self.chart.curvature(), t, &self.options)
    }

    pub fn point_data(&self, pt: &CotangentPoint) -> Result<PointData> {
        let metric = self.metric(&pt.x)?;
        let t = energy_density(&metric, &pt.p);
        let coeffs = self.coefficients(t)?;
        let frame = adapted_frame(&metric, pt);
        let tensors = structure_tensors(&coeffs, &metric, pt)?;
        Ok(PointData {
            metric,
            frame,
            coeffs,
            tensors,
        })
    }

    /// Adapted-frame matrices of `J` and `G` at a point.
    pub fn frame_matrices(&self, pt: &CotangentPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        Ok(full_matrices(&self.point_data(pt)?.tensors))
    }

    /// Finite-difference step for oracles at this point, honouring an
    /// optional override of the step factor.
    pub fn fd_step(&self, pt: &CotangentPoint, factor_override: Option<f64>) -> f64 {
        let scale = pt.x.norm().max(pt.p.norm()).max(1.0);
        factor_override.unwrap_or(DEFAULT_GEOMETRY_STEP) * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::FamilyKind;

    #[test]
    fn point_data_is_self_consistent() {
        let chart = SpaceFormChart::new(2, -1.0).unwrap();
        let family = LambdaFamily::power_plus_constant(1.0, 2.0, 1.0).unwrap();
        let field = StructureField::new(chart, family);
        let pt = CotangentPoint::new(
            DVector::from_column_slice(&[0.3, -0.2]),
            DVector::from_column_slice(&[0.7, 0.4]),
        );
        let data = field.point_data(&pt).unwrap();
        assert_eq!(data.coeffs.t, data.tensors.t);
        assert!(matches!(
            field.family().kind(),
            FamilyKind::PowerPlusConstant { .. }
        ));
    }

    #[test]
    fn option_builders_compose() {
        let chart = SpaceFormChart::new(2, 0.0).unwrap();
        let family = LambdaFamily::constant(1.0, 1.0).unwrap();
        let field = StructureField::new(chart, family)
            .with_b1_offset(0.1)
            .with_mu_offset(1.0);
        assert_eq!(field.options().b1_offset, 0.1);
        assert!(matches!(
            field.options().mu,
            MuMode::OffsetFromLambdaPrime(delta) if delta == 1.0
        ));
    }
}
