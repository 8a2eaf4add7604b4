//! Two-patch system
//! `d/dt rho_A = b_A exp(-alpha rho_A - rho_B)`,
//! `d/dt rho_B = b_B exp(-rho_A - alpha rho_B)`
//! from the zero initial condition, with its conserved invariant, explicit
//! solutions, and the pattern-formation asymptote.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchParams {
    pub b_a: f64,
    pub b_b: f64,
    /// Self-coupling relative to the unit cross-coupling; `alpha < 1` means
    /// the other patch repels more strongly than one's own.
    pub alpha: f64,
}

impl PatchParams {
    pub fn new(b_a: f64, b_b: f64, alpha: f64) -> Result<Self> {
        if !(b_a > 0.0 && b_b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "patch rates must be positive, got ({b_a}, {b_b})"
            )));
        }
        if !(alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be nonnegative, got {alpha}"
            )));
        }
        Ok(Self { b_a, b_b, alpha })
    }

    pub fn b_max(&self) -> f64 {
        self.b_a.max(self.b_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchState {
    pub t: f64,
    pub rho_a: f64,
    pub rho_b: f64,
}

/// Right-hand side of the two-patch system.
pub fn rhs_patch(p: &PatchParams, s: &PatchState) -> (f64, f64) {
    (
        p.b_a * (-p.alpha * s.rho_a - s.rho_b).exp(),
        p.b_b * (-s.rho_a - p.alpha * s.rho_b).exp(),
    )
}

/// RK4 trajectory from the zero initial condition, sampled at `snapshots`
/// (sorted, within `[0, t_end]`); steps shorten to land on snapshot times.
pub fn solve_patch(
    p: &PatchParams,
    t_end: f64,
    dt: f64,
    snapshots: &[f64],
) -> Result<Vec<PatchState>> {
    let mut out = Vec::with_capacity(snapshots.len());
    march(p, t_end, dt, |s| {
        if snapshots.iter().any(|q| (q - s.t).abs() < 1e-9) {
            out.push(*s);
        }
    })?;
    Ok(out)
}

/// Largest `|invariant residual|` seen at any RK4 step of the trajectory;
/// probes conservation of the first integral along the numerical flow.
pub fn max_invariant_residual(p: &PatchParams, t_end: f64, dt: f64) -> Result<f64> {
    if p.alpha == 1.0 {
        return Err(Error::AlphaOne);
    }
    let mut worst = 0.0f64;
    march(p, t_end, dt, |s| {
        let r = invariant_residual_unchecked(p, s);
        worst = worst.max(r.abs());
    })?;
    Ok(worst)
}

fn march(p: &PatchParams, t_end: f64, dt: f64, mut observe: impl FnMut(&PatchState)) -> Result<()> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let prod = dt * p.b_max();
    if prod > 0.05 {
        return Err(Error::StepTooLarge(prod));
    }
    let mut s = PatchState {
        t: 0.0,
        rho_a: 0.0,
        rho_b: 0.0,
    };
    observe(&s);
    let steps = (t_end / dt).ceil() as u64;
    for k in 1..=steps {
        let target = if k == steps { t_end } else { k as f64 * dt };
        let h = target - s.t;
        let (a1, b1) = rhs_patch(p, &s);
        let mid1 = PatchState {
            t: s.t + 0.5 * h,
            rho_a: s.rho_a + 0.5 * h * a1,
            rho_b: s.rho_b + 0.5 * h * b1,
        };
        let (a2, b2) = rhs_patch(p, &mid1);
        let mid2 = PatchState {
            t: s.t + 0.5 * h,
            rho_a: s.rho_a + 0.5 * h * a2,
            rho_b: s.rho_b + 0.5 * h * b2,
        };
        let (a3, b3) = rhs_patch(p, &mid2);
        let end = PatchState {
            t: s.t + h,
            rho_a: s.rho_a + h * a3,
            rho_b: s.rho_b + h * b3,
        };
        let (a4, b4) = rhs_patch(p, &end);
        s = PatchState {
            t: target,
            rho_a: s.rho_a + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            rho_b: s.rho_b + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        };
        observe(&s);
    }
    Ok(())
}

/// First integral of the system for `alpha != 1`:
/// `[e^{(alpha-1) rho_A} - 1] - (b_A/b_B) [e^{(alpha-1) rho_B} - 1]`,
/// identically zero along exact trajectories from the zero initial condition.
pub fn invariant_residual(p: &PatchParams, s: &PatchState) -> Result<f64> {
    if p.alpha == 1.0 {
        return Err(Error::AlphaOne);
    }
    Ok(invariant_residual_unchecked(p, s))
}

fn invariant_residual_unchecked(p: &PatchParams, s: &PatchState) -> f64 {
    let c = p.alpha - 1.0;
    (c * s.rho_a).exp_m1() - p.b_a / p.b_b * (c * s.rho_b).exp_m1()
}

/// Explicit solution at `alpha = 1`:
/// `rho_A = b_A/(b_A+b_B) log(1 + (b_A+b_B) t)` and symmetrically for B.
pub fn explicit_alpha1(b_a: f64, b_b: f64, t: f64) -> PatchState {
    let total = b_a + b_b;
    let common = (total * t).ln_1p() / total;
    PatchState {
        t,
        rho_a: b_a * common,
        rho_b: b_b * common,
    }
}

/// Equal-rate closed form for any `alpha`:
/// `rho = log(1 + (1+alpha) b t) / (1+alpha)`.
pub fn homogeneous_patch(b_star: f64, alpha: f64, t: f64) -> f64 {
    ((1.0 + alpha) * b_star * t).ln_1p() / (1.0 + alpha)
}

/// Saturation level of the weaker patch in the unstable regime
/// (`alpha < 1`, `b_A < b_B`): `[log b_B - log(b_B - b_A)]/(1 - alpha)`.
pub fn asymptote_a(p: &PatchParams) -> Result<f64> {
    if !(p.alpha < 1.0 && p.b_a < p.b_b) {
        return Err(Error::NotUnstableRegime);
    }
    Ok((p.b_b.ln() - (p.b_b - p.b_a).ln()) / (1.0 - p.alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rhs_at_origin_is_the_rates() {
        let p = PatchParams::new(1.3, 0.4, 0.7).unwrap();
        let s = PatchState {
            t: 0.0,
            rho_a: 0.0,
            rho_b: 0.0,
        };
        assert_eq!(rhs_patch(&p, &s), (1.3, 0.4));
    }

    #[test]
    fn rhs_alpha_zero_ignores_self_density() {
        let p = PatchParams::new(1.0, 1.0, 0.0).unwrap();
        let s1 = PatchState {
            t: 0.0,
            rho_a: 0.3,
            rho_b: 0.8,
        };
        let s2 = PatchState {
            t: 0.0,
            rho_a: 7.0,
            rho_b: 0.8,
        };
        assert_eq!(rhs_patch(&p, &s1).0, rhs_patch(&p, &s2).0);
    }

    #[test]
    fn rhs_symmetric_inputs_give_equal_components() {
        let p = PatchParams::new(0.9, 0.9, 1.7).unwrap();
        let s = PatchState {
            t: 0.0,
            rho_a: 0.41,
            rho_b: 0.41,
        };
        let (da, db) = rhs_patch(&p, &s);
        assert_eq!(da, db);
    }

    #[test]
    fn alpha_one_explicit_solution_reached() {
        let t_star = (std::f64::consts::E.powi(2) - 1.0) / 2.0;
        let p = PatchParams::new(1.0, 1.0, 1.0).unwrap();
        let traj = solve_patch(&p, t_star, 0.01, &[t_star]).unwrap();
        let last = traj.last().unwrap();
        assert_relative_eq!(last.rho_a, 1.0, epsilon = 1e-6);
        assert_relative_eq!(last.rho_b, 1.0, epsilon = 1e-6);
        let exact = explicit_alpha1(1.0, 1.0, t_star);
        assert_relative_eq!(exact.rho_a, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn explicit_alpha1_basics() {
        let s = explicit_alpha1(1.0, 3.0, 0.0);
        assert_eq!((s.rho_a, s.rho_b), (0.0, 0.0));
        for t in [0.1, 1.0, 14.0] {
            let s = explicit_alpha1(0.7, 1.9, t);
            assert_relative_eq!(s.rho_a / s.rho_b, 0.7 / 1.9, epsilon = 1e-12);
        }
    }

    #[test]
    fn homogeneous_closed_form_matches_integrator() {
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let p = PatchParams::new(0.8, 0.8, alpha).unwrap();
            let traj = solve_patch(&p, 6.0, 0.01, &[6.0]).unwrap();
            let expect = homogeneous_patch(0.8, alpha, 6.0);
            assert_relative_eq!(traj[0].rho_a, expect, epsilon = 1e-6);
            assert_relative_eq!(traj[0].rho_b, expect, epsilon = 1e-6);
        }
    }

    #[test]
    fn invariant_zero_at_origin_and_conserved() {
        let p = PatchParams::new(1.0, 2.0, 0.5).unwrap();
        let origin = PatchState {
            t: 0.0,
            rho_a: 0.0,
            rho_b: 0.0,
        };
        assert_eq!(invariant_residual(&p, &origin).unwrap(), 0.0);
        let worst = max_invariant_residual(&p, 50.0, 0.01).unwrap();
        assert!(worst <= 1e-8, "invariant drifted to {worst}");
    }

    #[test]
    fn alpha_one_invariant_degenerates() {
        let p = PatchParams::new(1.0, 2.0, 1.0).unwrap();
        let s = PatchState {
            t: 1.0,
            rho_a: 0.5,
            rho_b: 0.9,
        };
        assert!(matches!(invariant_residual(&p, &s), Err(Error::AlphaOne)));
    }

    #[test]
    fn asymptote_examples() {
        let p = PatchParams::new(1.0, 2.0, 0.5).unwrap();
        assert_relative_eq!(asymptote_a(&p).unwrap(), 2.0 * 2.0f64.ln(), epsilon = 1e-14);
        // vanishing weak rate sends the asymptote to zero
        let p2 = PatchParams::new(1e-9, 2.0, 0.5).unwrap();
        assert!(asymptote_a(&p2).unwrap() < 1e-8);
        let p3 = PatchParams::new(1.0, 2.0, 1.5).unwrap();
        assert!(matches!(asymptote_a(&p3), Err(Error::NotUnstableRegime)));
    }

    #[test]
    fn asymptote_against_long_run_oracle() {
        // long-horizon integration approaches the closed form from below
        let p = PatchParams::new(1.0, 2.0, 0.5).unwrap();
        let traj = solve_patch(&p, 1e4, 0.01, &[1e3, 1e4]).unwrap();
        let a_inf = asymptote_a(&p).unwrap();
        assert!(traj[1].rho_a < a_inf);
        assert!(traj[1].rho_a > 0.9 * a_inf);
        // Cauchy-style increment bound rather than absolute proximity
        assert!(traj[1].rho_a - traj[0].rho_a <= 0.05 * a_inf);
    }

    #[test]
    fn near_homogeneous_stable_regime_stays_balanced() {
        // alpha >= 1 with rates within 1%: no clear difference between patches
        for alpha in [1.0, 1.5] {
            let p = PatchParams::new(1.0, 1.01, alpha).unwrap();
            let traj = solve_patch(&p, 200.0, 0.01, &[1.0, 10.0, 100.0, 200.0]).unwrap();
            for s in traj.iter().skip(1) {
                let ratio = s.rho_a / s.rho_b;
                assert!(
                    (0.95..=1.05).contains(&ratio),
                    "ratio {ratio} at t = {}",
                    s.t
                );
            }
        }
    }

    #[test]
    fn step_too_large_rejected() {
        let p = PatchParams::new(3.0, 1.0, 0.5).unwrap();
        assert!(matches!(
            solve_patch(&p, 1.0, 0.02, &[1.0]),
            Err(Error::StepTooLarge(_))
        ));
    }

    proptest! {
        #[test]
        fn trajectories_are_monotone(
            b_a in 0.2f64..2.0,
            b_b in 0.2f64..2.0,
            alpha in 0.0f64..2.0,
        ) {
            let p = PatchParams::new(b_a, b_b, alpha).unwrap();
            let snaps: Vec<f64> = (0..=10).map(|k| k as f64 * 0.5).collect();
            let traj = solve_patch(&p, 5.0, 0.02, &snaps).unwrap();
            for w in traj.windows(2) {
                prop_assert!(w[1].rho_a >= w[0].rho_a);
                prop_assert!(w[1].rho_b >= w[0].rho_b);
            }
        }

        #[test]
        fn invariant_conserved_for_random_params(
            b_a in 0.2f64..2.0,
            b_b in 0.2f64..2.0,
            alpha in 0.0f64..0.95,
        ) {
            let p = PatchParams::new(b_a, b_b, alpha).unwrap();
            let worst = max_invariant_residual(&p, 10.0, 0.01).unwrap();
            prop_assert!(worst <= 1e-8, "drift {worst}");
        }
    }
}
