//! Existence-horizon formulas on the sub-Poisson exponent scale.
//!
//! `horizon_t` is the two-exponent horizon
//! `T(theta, theta0) = ((theta - theta0)/b_bar) exp(theta0 - <phi> e^theta)`;
//! its supremum over `theta > theta0` is `tau(theta0) =
//! (delta/b_bar) exp(theta0 - 1/delta)` with `delta e^delta = e^{-theta0}/<phi>`.

use crate::error::{Error, Result};

/// Principal branch of `w e^w = z` for `z >= 0`.
///
/// Newton from `w0 = log(1 + z)` (an upper bound, so the iteration descends
/// monotonically on the convex branch); falls back to bisection on the rare
/// non-finite step.
pub fn lambert_w(z: f64) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambert_w needs a finite z >= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let mut w = z.ln_1p();
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - z;
        let step = f / (ew * (1.0 + w));
        let next = w - step;
        if !next.is_finite() {
            return Ok(bisect_w(z));
        }
        if (next - w).abs() <= 1e-16 * (1.0 + next.abs()) {
            return Ok(next);
        }
        w = next;
    }
    Ok(bisect_w(z))
}

fn bisect_w(z: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = z.ln_1p().max(1.0);
    while hi * hi.exp() < z {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() > z {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `T(theta, theta0)` for `theta > theta0`.
pub fn horizon_t(theta0: f64, theta: f64, b_bar: f64, phi_l1: f64) -> Result<f64> {
    if !theta0.is_finite() {
        return Err(Error::InfiniteTheta);
    }
    if !(theta > theta0) {
        return Err(Error::OrderViolation { theta, theta0 });
    }
    validate_rates(b_bar, phi_l1)?;
    Ok((theta - theta0) / b_bar * (theta0 - phi_l1 * theta.exp()).exp())
}

/// Optimal horizon `(delta, tau)` at the exponent `theta0`.
///
/// `tau` is evaluated as `(delta/b_bar) exp(theta0 - 1/delta)` and
/// cross-checked against the equivalent `exp(-delta - 1/delta)/(b_bar <phi>)`
/// form to 1e-12 relative.
pub fn horizon_tau(theta0: f64, b_bar: f64, phi_l1: f64) -> Result<(f64, f64)> {
    if !theta0.is_finite() {
        return Err(Error::InfiniteTheta);
    }
    validate_rates(b_bar, phi_l1)?;
    let delta = lambert_w((-theta0).exp() / phi_l1)?;
    let tau = delta / b_bar * (theta0 - 1.0 / delta).exp();
    let tau_alt = (-delta - 1.0 / delta).exp() / (b_bar * phi_l1);
    debug_assert!(
        (tau - tau_alt).abs() <= 1e-12 * tau.max(tau_alt),
        "horizon forms disagree: {tau} vs {tau_alt}"
    );
    Ok((delta, tau))
}

fn validate_rates(b_bar: f64, phi_l1: f64) -> Result<()> {
    if !(b_bar > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "b_bar must be positive, got {b_bar}"
        )));
    }
    if !(phi_l1 > 0.0) {
        return Err(Error::AssumptionViolation(format!(
            "horizon formulas need <phi> > 0, got {phi_l1}"
        )));
    }
    Ok(())
}

/// Validated bundle of horizon inputs and the derived `(delta, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonParams {
    pub theta0: f64,
    pub b_bar: f64,
    pub phi_l1: f64,
    pub delta: f64,
    pub tau: f64,
}

impl HorizonParams {
    pub fn new(theta0: f64, b_bar: f64, phi_l1: f64) -> Result<Self> {
        let (delta, tau) = horizon_tau(theta0, b_bar, phi_l1)?;
        // defining equation residual, relative form
        let defining = delta * delta.exp() * phi_l1 * theta0.exp() - 1.0;
        if defining.abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "delta residual {defining} exceeds 1e-12"
            )));
        }
        let tau_alt = (-delta - 1.0 / delta).exp() / (b_bar * phi_l1);
        if (tau - tau_alt).abs() > 1e-12 * tau.max(tau_alt) {
            return Err(Error::InvalidParameter(format!(
                "tau forms disagree: {tau} vs {tau_alt}"
            )));
        }
        Ok(Self {
            theta0,
            b_bar,
            phi_l1,
            delta,
            tau,
        })
    }

    /// Two-exponent horizon rooted at this `theta0`.
    pub fn horizon_to(&self, theta: f64) -> Result<f64> {
        horizon_t(self.theta0, theta, self.b_bar, self.phi_l1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn lambert_fixed_points() {
        assert_eq!(lambert_w(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            lambert_w(std::f64::consts::E).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn lambert_against_bisection_oracle() {
        // independent bracketing oracle on w e^w = 1
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert_relative_eq!(oracle, 0.5671432904, epsilon = 1e-10);
        assert_relative_eq!(lambert_w(1.0).unwrap(), oracle, epsilon = 1e-13);
    }

    #[test]
    fn horizon_t_substitution() {
        // ((1-0)/1) exp(0 - e) = e^{-e}
        let t = horizon_t(0.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(t, (-std::f64::consts::E).exp(), epsilon = 1e-14);
        assert_relative_eq!(t, 0.065988, epsilon = 1e-6);
    }

    #[test]
    fn horizon_t_vanishing_gap() {
        let t = horizon_t(0.0, 1e-12, 1.0, 1.0).unwrap();
        assert!(t < 1e-11);
        assert!(matches!(
            horizon_t(0.0, 0.0, 1.0, 1.0),
            Err(Error::OrderViolation { .. })
        ));
        assert!(matches!(
            horizon_t(0.0, -1.0, 1.0, 1.0),
            Err(Error::OrderViolation { .. })
        ));
    }

    #[test]
    fn tau_example() {
        // <phi> = 1, theta0 = -1 gives delta = 1 and tau = e^{-2}
        let (delta, tau) = horizon_tau(-1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(delta, 1.0, epsilon = 1e-13);
        assert_relative_eq!(tau, (-2.0f64).exp(), epsilon = 1e-13);
        assert_relative_eq!(tau, 0.135335, epsilon = 1e-6);
    }

    #[test]
    fn bisection_fallback_agrees_with_newton() {
        for z in [0.3, 1.0, 7.5, 42.0] {
            assert_relative_eq!(bisect_w(z), lambert_w(z).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn infinite_theta_needs_surrogate() {
        assert!(matches!(
            horizon_tau(f64::NEG_INFINITY, 1.0, 1.0),
            Err(Error::InfiniteTheta)
        ));
    }

    proptest! {
        #[test]
        fn lambert_residual_small(z in 0.0f64..100.0) {
            let w = lambert_w(z).unwrap();
            prop_assert!((w * w.exp() - z).abs() <= 1e-12);
        }

        #[test]
        fn tau_forms_agree(
            theta0 in -3.0f64..2.0,
            b_bar in 0.1f64..5.0,
            phi_l1 in 0.2f64..5.0,
        ) {
            let (delta, tau) = horizon_tau(theta0, b_bar, phi_l1).unwrap();
            let alt = (-delta - 1.0 / delta).exp() / (b_bar * phi_l1);
            prop_assert!((tau - alt).abs() <= 1e-12 * tau.max(alt));
            // defining equation
            prop_assert!((delta * delta.exp() * phi_l1 * theta0.exp() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn horizon_t_below_tau(
            theta0 in -2.0f64..1.0,
            gap in 0.01f64..4.0,
            b_bar in 0.1f64..5.0,
            phi_l1 in 0.2f64..5.0,
        ) {
            let (_, tau) = horizon_tau(theta0, b_bar, phi_l1).unwrap();
            let t = horizon_t(theta0, theta0 + gap, b_bar, phi_l1).unwrap();
            prop_assert!(t <= tau * (1.0 + 1e-12));
        }
    }
}
