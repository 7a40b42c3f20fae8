//! λ-parameter families and the scalar coefficients of the lifted
//! structures as functions of the energy density `t`.
//!
//! A family supplies `λ(t) > 0` and its derivative; everything else —
//! `a₁, a₂, b₁, b₂` for the almost complex structure and
//! `c₁, c₂, d₁, d₂` for the metric — is derived here. Three named
//! families cover the admissible cases per curvature sign:
//!
//! * constant `λ ≡ B` (flat base),
//! * `λ = t^m + B` (negative curvature),
//! * `λ = A / sqrt(2ct + B)` (positive curvature),
//!
//! plus a custom variant taking `(λ, λ′)` as a closure. Custom derivatives
//! are validated by finite differences, never derived symbolically.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fd;

/// Evaluation of `(λ, λ′)` supplied by a custom family.
pub type FamilyEval = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
pub enum FamilyKind {
    /// λ ≡ value
    Constant { value: f64 },
    /// λ = t^m + B, with m, B > 0
    PowerPlusConstant { m: f64, b: f64 },
    /// λ = A / sqrt(2ct + B), with B > 0; depends on the chart curvature
    InverseSqrt { c: f64, b: f64 },
    /// λ, λ′ from a user closure
    Custom { eval: FamilyEval },
}

impl fmt::Debug for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Constant { value } => write!(f, "Constant {{ value: {value} }}"),
            FamilyKind::PowerPlusConstant { m, b } => {
                write!(f, "PowerPlusConstant {{ m: {m}, b: {b} }}")
            }
            FamilyKind::InverseSqrt { c, b } => write!(f, "InverseSqrt {{ c: {c}, b: {b} }}"),
            FamilyKind::Custom { .. } => write!(f, "Custom {{ .. }}"),
        }
    }
}

/// A λ-family together with the scale constant `A > 0`.
#[derive(Debug, Clone)]
pub struct LambdaFamily {
    a: f64,
    kind: FamilyKind,
}

impl LambdaFamily {
    pub fn new(a: f64, kind: FamilyKind) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "scale constant A must be positive, got {a}"
            )));
        }
        match &kind {
            FamilyKind::Constant { value } if !(*value > 0.0) => {
                return Err(Error::InvalidConfig(format!(
                    "constant family needs a positive value, got {value}"
                )));
            }
            FamilyKind::PowerPlusConstant { m, b } if !(*m > 0.0 && *b > 0.0) => {
                return Err(Error::InvalidConfig(format!(
                    "power family needs m > 0 and B > 0, got m = {m}, B = {b}"
                )));
            }
            FamilyKind::InverseSqrt { b, .. } if !(*b > 0.0) => {
                return Err(Error::InvalidConfig(format!(
                    "inverse-sqrt family needs B > 0, got B = {b}"
                )));
            }
            _ => {}
        }
        Ok(Self { a, kind })
    }

    pub fn constant(a: f64, value: f64) -> Result<Self> {
        Self::new(a, FamilyKind::Constant { value })
    }

    pub fn power_plus_constant(a: f64, m: f64, b: f64) -> Result<Self> {
        Self::new(a, FamilyKind::PowerPlusConstant { m, b })
    }

    pub fn inverse_sqrt(a: f64, c: f64, b: f64) -> Result<Self> {
        Self::new(a, FamilyKind::InverseSqrt { c, b })
    }

    pub fn custom(a: f64, eval: FamilyEval) -> Result<Self> {
        Self::new(a, FamilyKind::Custom { eval })
    }

    pub fn scale(&self) -> f64 {
        self.a
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn lambda(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    pub fn lambda_prime(&self, t: f64) -> f64 {
        self.eval(t).1
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        match &self.kind {
            FamilyKind::Constant { value } => (*value, 0.0),
            FamilyKind::PowerPlusConstant { m, b } => {
                let lambda = t.powf(*m) + b;
                let prime = if t == 0.0 {
                    // t^(m-1) is singular at 0 for m < 1; the named
                    // acceptance families use m >= 1.
                    if (*m - 1.0).abs() < 1e-15 {
                        1.0
                    } else if *m > 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    m * t.powf(m - 1.0)
                };
                (lambda, prime)
            }
            FamilyKind::InverseSqrt { c, b } => {
                let lambda = self.a * (2.0 * c * t + b).powf(-0.5);
                // λ′ = −(c/A²) λ³, written so the numerator of b₁ cancels
                // exactly in floating point for this family.
                let prime = -(c / (self.a * self.a)) * lambda * lambda * lambda;
                (lambda, prime)
            }
            FamilyKind::Custom { eval } => eval(t),
        }
    }

    /// Second derivative of λ: analytic for the named kinds, Richardson
    /// central difference of λ′ for custom families (which only supply
    /// first derivatives).
    pub fn lambda_second(&self, t: f64) -> f64 {
        match &self.kind {
            FamilyKind::Constant { .. } => 0.0,
            FamilyKind::PowerPlusConstant { m, b: _ } => {
                if t == 0.0 {
                    if (*m - 2.0).abs() < 1e-15 {
                        2.0
                    } else if *m > 2.0 || (*m - 1.0).abs() < 1e-15 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    m * (m - 1.0) * t.powf(m - 2.0)
                }
            }
            FamilyKind::InverseSqrt { c, .. } => {
                let (lambda, prime) = self.eval(t);
                // λ″ = −(3c/A²) λ² λ′
                -(3.0 * c / (self.a * self.a)) * lambda * lambda * prime
            }
            FamilyKind::Custom { eval } => {
                let h = 1e-4 * t.abs().max(1.0);
                if t - h < 0.0 {
                    fd::one_sided(|s| eval(s).1, t, h)
                } else {
                    fd::richardson(|s| eval(s).1, t, h).0
                }
            }
        }
    }
}

/// Mode for the Hermitian proportionality parameter μ. The closed (Kähler)
/// structures use μ = λ′; the offset variant keeps the pre-Kähler
/// Hermitian stage testable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MuMode {
    #[default]
    LambdaPrime,
    /// μ = λ′ + δ
    OffsetFromLambdaPrime(f64),
}

/// Knobs for building a [`CoefficientSet`]. All defaults give the closed
/// Kähler structure; the offsets exist so the verification suite can
/// demonstrate that its checks have power against broken structures.
#[derive(Debug, Clone, Copy, Default)]
pub struct CoefficientOptions {
    pub mu: MuMode,
    /// Added to the integrable value of b₁.
    pub b1_offset: f64,
    /// Added to the derived value of d₂.
    pub d2_offset: f64,
}

/// All scalar coefficients of `(J, G)` at one energy density.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientSet {
    pub t: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub mu: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Derives every coefficient at energy density `t` for base curvature `c`,
/// with μ = λ′ and no perturbations.
pub fn coefficients(family: &LambdaFamily, c: f64, t: f64) -> Result<CoefficientSet> {
    coefficients_with(family, c, t, &CoefficientOptions::default())
}

/// Same as [`coefficients`] but honouring μ-mode and perturbation offsets.
pub fn coefficients_with(
    family: &LambdaFamily,
    c: f64,
    t: f64,
    options: &CoefficientOptions,
) -> Result<CoefficientSet> {
    if !(t >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "energy density must be nonnegative, got {t}"
        )));
    }
    let a = family.scale();
    let (lambda, lambda_prime) = family.eval(t);
    if !(lambda > 0.0) {
        return Err(Error::SingularParameter {
            expression: "lambda",
            value: lambda,
            t,
        });
    }

    let ell = lambda + 2.0 * t * lambda_prime;
    if ell.abs() < 1e-14 {
        return Err(Error::SingularParameter {
            expression: "lambda + 2 t lambda'",
            value: ell,
            t,
        });
    }
    let disc = a * a - 2.0 * c * t * lambda * lambda;
    if disc.abs() < 1e-14 {
        return Err(Error::SingularParameter {
            expression: "A^2 - 2 c t lambda^2",
            value: disc,
            t,
        });
    }

    let a1 = a / lambda;
    let a2 = lambda / a;
    let b1 = -(c * lambda.powi(3) + a * a * lambda_prime) / (a * lambda * ell)
        + options.b1_offset;

    let b2_denom = a * (a + 2.0 * t * lambda * b1);
    if b2_denom.abs() < 1e-14 {
        return Err(Error::SingularParameter {
            expression: "A (A + 2 t lambda b1)",
            value: b2_denom,
            t,
        });
    }
    let b2 = -(lambda * lambda * b1) / b2_denom;

    let mu = match options.mu {
        MuMode::LambdaPrime => lambda_prime,
        MuMode::OffsetFromLambdaPrime(delta) => lambda_prime + delta,
    };

    let c1 = lambda * a1; // = A
    let c2 = lambda * a2; // = λ²/A
    let d1 = (-(c * lambda.powi(3) + a * a * lambda_prime) + mu * disc) / (a * ell);
    let d2 = (lambda * (c * lambda.powi(3) + a * a * lambda_prime)
        + mu * a * a * (lambda + 2.0 * lambda_prime * t))
        / (a * disc)
        + options.d2_offset;

    Ok(CoefficientSet {
        t,
        lambda,
        lambda_prime,
        mu,
        a1,
        a2,
        b1,
        b2,
        c1,
        c2,
        d1,
        d2,
    })
}

/// t-derivatives of the metric coefficient functions of the closed
/// (μ = λ′) structure, used by the generic connection path. Needs λ″.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientDerivatives {
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn coefficient_derivatives(
    family: &LambdaFamily,
    c: f64,
    t: f64,
) -> Result<CoefficientDerivatives> {
    let a = family.scale();
    let (lambda, prime) = family.eval(t);
    let second = family.lambda_second(t);
    let ell = lambda + 2.0 * t * prime;
    let disc = a * a - 2.0 * c * t * lambda * lambda;
    if disc.abs() < 1e-14 {
        return Err(Error::SingularParameter {
            expression: "A^2 - 2 c t lambda^2",
            value: disc,
            t,
        });
    }

    // c₁ = A, c₂ = λ²/A, d₁ = −cλ²/A and
    // d₂ = (cλ⁴ + 2A²λ′(λ + λ′t)) / (A (A² − 2ctλ²)).
    let c2 = 2.0 * lambda * prime / a;
    let d1 = -2.0 * c * lambda * prime / a;

    let numer = c * lambda.powi(4) + 2.0 * a * a * prime * (lambda + prime * t);
    let numer_dt =
        4.0 * c * lambda.powi(3) * prime + 2.0 * a * a * (second * ell + 2.0 * prime * prime);
    let disc_dt = -2.0 * c * lambda * lambda - 4.0 * c * t * lambda * prime;
    let d2 = (numer_dt * disc - numer * disc_dt) / (a * disc * disc);

    Ok(CoefficientDerivatives { c1: 0.0, c2, d1, d2 })
}

/// One admissibility condition evaluated on a t-grid.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionResult {
    pub name: String,
    pub pass: bool,
    /// First grid value of `t` where the condition fails, with the
    /// offending value.
    pub first_failure: Option<(f64, f64)>,
}

/// Admissibility of a family over `[0, t_max]`: positivity of λ, of the
/// discriminant `A² − 2ctλ²` and of `λ + 2tλ′`, the Hermitian-stage ratio
/// of the two, and positive definiteness of the induced metric
/// coefficients.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AdmissibilityReport {
    pub t_max: f64,
    pub samples: usize,
    pub conditions: Vec<ConditionResult>,
    pub all_pass: bool,
}

impl AdmissibilityReport {
    pub fn first_failure(&self) -> Option<(&str, f64)> {
        self.conditions
            .iter()
            .filter_map(|c| c.first_failure.map(|(t, _)| (c.name.as_str(), t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "admissibility over [0, {}] ({} samples)\n",
            self.t_max, self.samples
        ));
        for cond in &self.conditions {
            match cond.first_failure {
                None => out.push_str(&format!("  PASS  {}\n", cond.name)),
                Some((t, value)) => out.push_str(&format!(
                    "  FAIL  {} at t = {} (value = {:.6e})\n",
                    cond.name, t, value
                )),
            }
        }
        out.push_str(if self.all_pass {
            "  all conditions hold\n"
        } else {
            "  family rejected\n"
        });
        out
    }
}

/// Evaluates the admissibility conditions on an evenly spaced t-grid.
/// Failures are report content, not errors.
pub fn check_admissibility(
    family: &LambdaFamily,
    c: f64,
    t_max: f64,
    samples: usize,
) -> Result<AdmissibilityReport> {
    if samples < 2 {
        return Err(Error::InvalidConfig(format!(
            "admissibility grid needs at least 2 samples, got {samples}"
        )));
    }
    if !(t_max > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "t_max must be positive, got {t_max}"
        )));
    }

    let a = family.scale();
    let names = [
        "lambda > 0",
        "A^2 - 2 c t lambda^2 > 0",
        "lambda + 2 t lambda' > 0",
        "(A^2 - 2 c t lambda^2)/(lambda + 2 t lambda') > 0",
        "c1 > 0",
        "c2 > 0",
        "c1 + 2 t d1 > 0",
        "c2 + 2 t d2 > 0",
    ];
    let mut failures: Vec<Option<(f64, f64)>> = vec![None; names.len()];

    for step in 0..samples {
        let t = t_max * step as f64 / (samples - 1) as f64;
        let (lambda, prime) = family.eval(t);
        let ell = lambda + 2.0 * t * prime;
        let disc = a * a - 2.0 * c * t * lambda * lambda;
        let values3 = [lambda, disc, ell];
        for (idx, &value) in values3.iter().enumerate() {
            if !(value > 0.0) && failures[idx].is_none() {
                failures[idx] = Some((t, value));
            }
        }
        let ratio = if ell != 0.0 { disc / ell } else { f64::NEG_INFINITY };
        if !(ratio > 0.0) && failures[3].is_none() {
            failures[3] = Some((t, ratio));
        }

        match coefficients(family, c, t) {
            Ok(set) => {
                let induced = [
                    set.c1,
                    set.c2,
                    set.c1 + 2.0 * t * set.d1,
                    set.c2 + 2.0 * t * set.d2,
                ];
                for (offset, &value) in induced.iter().enumerate() {
                    if !(value > 0.0) && failures[4 + offset].is_none() {
                        failures[4 + offset] = Some((t, value));
                    }
                }
            }
            Err(_) => {
                for offset in 0..4 {
                    if failures[4 + offset].is_none() {
                        failures[4 + offset] = Some((t, f64::NAN));
                    }
                }
            }
        }
    }

    let conditions: Vec<ConditionResult> = names
        .iter()
        .zip(failures)
        .map(|(name, first_failure)| ConditionResult {
            name: (*name).to_string(),
            pass: first_failure.is_none(),
            first_failure,
        })
        .collect();
    let all_pass = conditions.iter().all(|c| c.pass);

    Ok(AdmissibilityReport {
        t_max,
        samples,
        conditions,
        all_pass,
    })
}

/// |central difference of λ at t − λ′(t)|; guards user-supplied families.
/// Falls back to a one-sided difference when `t − h < 0`.
pub fn fd_lambda_prime_check(family: &LambdaFamily, t: f64) -> f64 {
    let h = 1e-5 * t.abs().max(1.0);
    let numeric = if t - h < 0.0 {
        fd::one_sided(|s| family.lambda(s), t, h)
    } else {
        fd::richardson(|s| family.lambda(s), t, h).0
    };
    (numeric - family.lambda_prime(t)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn flat_constant_family_is_trivial() {
        let family = LambdaFamily::constant(1.0, 1.0).unwrap();
        for &t in &[0.0, 0.3, 2.0, 17.5] {
            let set = coefficients(&family, 0.0, t).unwrap();
            assert_eq!(set.a1, 1.0);
            assert_eq!(set.a2, 1.0);
            assert_eq!(set.b1, 0.0);
            assert_eq!(set.b2, 0.0);
            assert_eq!(set.c1, 1.0);
            assert_eq!(set.c2, 1.0);
            assert_eq!(set.d1, 0.0);
            assert_eq!(set.d2, 0.0);
        }
    }

    #[test]
    fn inverse_sqrt_family_values_at_t_one() {
        // λ = (2t+1)^(-1/2), c = 1, A = 1: λ′ = −λ³ exactly, so b₁ = 0,
        // d₁ = −λ²c/A = −1/3 and d₂ = −λ⁴ = −1/9.
        let family = LambdaFamily::inverse_sqrt(1.0, 1.0, 1.0).unwrap();
        let set = coefficients(&family, 1.0, 1.0).unwrap();
        assert_eq!(set.b1, 0.0);
        assert_relative_eq!(set.d1, -1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(set.d2, -1.0 / 9.0, epsilon = 1e-15);
        // Independent route for d₁: the closed structure reduces it to
        // −cλ²/A.
        assert_relative_eq!(set.d1, -set.lambda * set.lambda, epsilon = 1e-15);
    }

    #[test]
    fn power_family_b1_at_t_one() {
        // λ = t + 1, c = −1, A = 1, t = 1: b₁ = −(−8 + 1)/(1·2·4) = 7/8.
        let family = LambdaFamily::power_plus_constant(1.0, 1.0, 1.0).unwrap();
        let set = coefficients(&family, -1.0, 1.0).unwrap();
        assert_relative_eq!(set.b1, 7.0 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn singular_denominator_is_reported_by_name() {
        // λ = 2 − t has λ + 2tλ′ = 2 − 3t, vanishing at t = 2/3.
        let family = LambdaFamily::custom(1.0, Arc::new(|t| (2.0 - t, -1.0))).unwrap();
        let err = coefficients(&family, 0.0, 2.0 / 3.0).unwrap_err();
        match err {
            Error::SingularParameter { expression, .. } => {
                assert_eq!(expression, "lambda + 2 t lambda'");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn admissibility_of_named_families() {
        // λ = t² + 1 with c = −1 passes on [0, 10].
        let power = LambdaFamily::power_plus_constant(1.0, 2.0, 1.0).unwrap();
        let report = check_admissibility(&power, -1.0, 10.0, 101).unwrap();
        assert!(report.all_pass, "{}", report.render_text());

        // λ = A/sqrt(2ct + B) with c = 1 passes; the discriminant reduces
        // to B/(2ct + B).
        let inv = LambdaFamily::inverse_sqrt(1.0, 1.0, 1.0).unwrap();
        let report = check_admissibility(&inv, 1.0, 10.0, 101).unwrap();
        assert!(report.all_pass, "{}", report.render_text());

        // Constant λ with c = 1 fails the discriminant at t = 0.5.
        let constant = LambdaFamily::constant(1.0, 1.0).unwrap();
        let report = check_admissibility(&constant, 1.0, 1.0, 101).unwrap();
        assert!(!report.all_pass);
        let (name, t) = report.first_failure().unwrap();
        assert_eq!(name, "A^2 - 2 c t lambda^2 > 0");
        assert_relative_eq!(t, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn lambda_prime_validation() {
        let constant = LambdaFamily::constant(1.0, 1.0).unwrap();
        assert_eq!(fd_lambda_prime_check(&constant, 3.0), 0.0);

        let linear = LambdaFamily::power_plus_constant(1.0, 1.0, 1.0).unwrap();
        assert!(fd_lambda_prime_check(&linear, 0.0) < 1e-10);

        let inv = LambdaFamily::inverse_sqrt(1.0, 1.0, 1.0).unwrap();
        assert!(fd_lambda_prime_check(&inv, 2.0) < 1e-8);
    }

    #[test]
    fn lambda_second_matches_fd_for_named_families() {
        let families = [
            LambdaFamily::power_plus_constant(1.0, 2.0, 1.0).unwrap(),
            LambdaFamily::inverse_sqrt(2.0, 1.0, 1.0).unwrap(),
            LambdaFamily::inverse_sqrt(1.0, -1.0, 3.0).unwrap(),
        ];
        for family in &families {
            for &t in &[0.1, 0.5, 1.0, 2.0] {
                let fd_second = fd::richardson(|s| family.lambda_prime(s), t, 1e-4).0;
                assert_relative_eq!(
                    family.lambda_second(t),
                    fd_second,
                    epsilon = 1e-8,
                    max_relative = 1e-8
                );
            }
        }
    }

    #[test]
    fn custom_family_lambda_second_uses_differences() {
        let family = LambdaFamily::custom(
            1.0,
            Arc::new(|t| ((t * t + 1.0), 2.0 * t)),
        )
        .unwrap();
        assert_relative_eq!(family.lambda_second(0.7), 2.0, epsilon = 1e-8);
        assert_relative_eq!(family.lambda_second(0.0), 2.0, epsilon = 1e-6);
    }

    #[test]
    fn derived_d1_matches_simplified_form() {
        // The general-μ expression evaluated at μ = λ′ must collapse to
        // −cλ²/A; a mismatch here would invalidate the whole formula chain,
        // so fail with a loud message.
        let families = [
            (LambdaFamily::power_plus_constant(1.0, 2.0, 1.0).unwrap(), -1.0),
            (LambdaFamily::inverse_sqrt(1.0, 1.0, 1.0).unwrap(), 1.0),
            (LambdaFamily::power_plus_constant(2.0, 3.0, 2.0).unwrap(), -0.5),
        ];
        for (family, c) in &families {
            for step in 0..40 {
                let t = step as f64 * 0.25;
                let set = coefficients(family, *c, t).unwrap();
                let simplified = -c * set.lambda * set.lambda / family.scale();
                assert!(
                    (set.d1 - simplified).abs()
                        <= 1e-12 * simplified.abs().max(1.0),
                    "d1 formula chain broken: general-mu route gives {}, \
                     simplified closed form gives {} at t = {t}",
                    set.d1,
                    simplified
                );
            }
        }
    }

    #[test]
    fn eq9_positivity_on_admissible_samples() {
        let families = [
            (LambdaFamily::power_plus_constant(1.0, 2.0, 1.0).unwrap(), -1.0),
            (LambdaFamily::inverse_sqrt(1.0, 1.0, 1.0).unwrap(), 1.0),
            (LambdaFamily::constant(1.0, 1.0).unwrap(), 0.0),
        ];
        for (family, c) in &families {
            for step in 0..=100 {
                let t = step as f64 * 0.1;
                let set = coefficients(family, *c, t).unwrap();
                assert!(family.scale() + 2.0 * t * set.lambda * set.b1 > 0.0);
            }
        }
    }

    proptest! {
        /// Almost-complex coefficient identities on random admissible
        /// (family, t): a₁a₂ = 1 and (a₁ + 2tb₁)(a₂ + 2tb₂) = 1.
        #[test]
        fn unit_product_identities(
            choice in 0usize..3,
            a in 0.5f64..3.0,
            m in 1.0f64..3.0,
            b in 0.5f64..2.0,
            t in 0.0f64..5.0,
        ) {
            let (family, c) = match choice {
                0 => (LambdaFamily::constant(a, b).unwrap(), 0.0),
                1 => (LambdaFamily::power_plus_constant(a, m, b).unwrap(), -1.0),
                _ => (LambdaFamily::inverse_sqrt(a, 1.0, b).unwrap(), 1.0),
            };
            let set = coefficients(&family, c, t).unwrap();
            let first = set.a1 * set.a2;
            let second = (set.a1 + 2.0 * t * set.b1) * (set.a2 + 2.0 * t * set.b2);
            prop_assert!((first - 1.0).abs() < 1e-12);
            prop_assert!((second - 1.0).abs() < 1e-12);
        }

        /// Proportionality between the metric and complex-structure
        /// coefficient combinations with μ = λ′.
        #[test]
        fn proportionality_identities(
            choice in 0usize..3,
            a in 0.5f64..3.0,
            m in 1.0f64..3.0,
            b in 0.5f64..2.0,
            t in 0.0f64..5.0,
        ) {
            let (family, c) = match choice {
                0 => (LambdaFamily::constant(a, b).unwrap(), 0.0),
                1 => (LambdaFamily::power_plus_constant(a, m, b).unwrap(), -1.0),
                _ => (LambdaFamily::inverse_sqrt(a, 1.0, b).unwrap(), 1.0),
            };
            let set = coefficients(&family, c, t).unwrap();
            let factor = set.lambda + 2.0 * t * set.mu;
            let lhs1 = set.c1 + 2.0 * t * set.d1;
            let rhs1 = factor * (set.a1 + 2.0 * t * set.b1);
            let lhs2 = set.c2 + 2.0 * t * set.d2;
            let rhs2 = factor * (set.a2 + 2.0 * t * set.b2);
            prop_assert!((lhs1 - rhs1).abs() <= 1e-11 * rhs1.abs().max(1.0));
            prop_assert!((lhs2 - rhs2).abs() <= 1e-11 * rhs2.abs().max(1.0));
        }
    }
}
