//! Central differences with one Richardson extrapolation level.
//!
//! Every numeric oracle in the crate is built on these two routines. The
//! `disagreement` returned alongside each estimate is the gap between the
//! step-h and step-h/2 central differences; a large value flags either a
//! too-small step (rounding noise) or a function rougher than the oracle
//! tolerances assume.

/// Central difference of a scalar function of one variable.
pub fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Richardson-extrapolated central difference: returns the fourth-order
/// estimate and the |coarse − fine| disagreement between the two
/// second-order estimates it combines.
pub fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> (f64, f64) {
    let coarse = central(&f, x, h);
    let fine = central(&f, x, h / 2.0);
    ((4.0 * fine - coarse) / 3.0, (fine - coarse).abs())
}

/// Richardson-extrapolated directional derivative of a vector-valued
/// function, evaluated with four function calls. Returns the extrapolated
/// component array and the max-abs disagreement across components.
pub fn richardson_vec<F: Fn(f64) -> Vec<f64>>(f: F, h: f64) -> (Vec<f64>, f64) {
    let fp = f(h);
    let fm = f(-h);
    let fp2 = f(h / 2.0);
    let fm2 = f(-h / 2.0);
    let len = fp.len();
    let mut out = Vec::with_capacity(len);
    let mut disagreement: f64 = 0.0;
    for i in 0..len {
        let coarse = (fp[i] - fm[i]) / (2.0 * h);
        let fine = (fp2[i] - fm2[i]) / h;
        out.push((4.0 * fine - coarse) / 3.0);
        disagreement = disagreement.max((fine - coarse).abs());
    }
    (out, disagreement)
}

/// Second-order one-sided difference, used where the domain boundary t = 0
/// forbids stepping left.
pub fn one_sided<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_quadratic_is_exact() {
        let d = central(|x| x * x, 3.0, 1e-3);
        assert!((d - 6.0).abs() < 1e-9);
    }

    #[test]
    fn richardson_beats_central_on_transcendental() {
        let f = |x: f64| x.sin() * x.exp();
        let exact = (1.0_f64.cos() + 1.0_f64.sin()) * 1.0_f64.exp();
        let plain = central(f, 1.0, 1e-3);
        let (extrapolated, disagreement) = richardson(f, 1.0, 1e-3);
        assert!((extrapolated - exact).abs() < (plain - exact).abs());
        assert!((extrapolated - exact).abs() < 1e-11);
        assert!(disagreement < 1e-6);
    }

    #[test]
    fn one_sided_linear_is_exact() {
        let d = one_sided(|x| 2.0 * x + 1.0, 0.0, 1e-5);
        assert!((d - 2.0).abs() < 1e-10);
    }
}
