//! Closed-form envelopes sandwiching `<phi>(rho_t - rho_0)` uniformly in
//! space, and the bound verifier for solved trajectories.
//!
//! All quantities here use the kernel's discrete grid mass so the sandwich
//! holds exactly for the semi-discrete system the solver integrates.

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::kinetic::{Convolver, KineticSolution};
use crate::rate::RateField;

/// Effective extremal rates `b-` and `b+` with evaluable envelopes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeBounds {
    pub b_minus: f64,
    pub b_plus: f64,
}

impl EnvelopeBounds {
    pub fn new(b_minus: f64, b_plus: f64) -> Result<Self> {
        if !(0.0 <= b_minus && b_minus <= b_plus) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= b_minus <= b_plus, got ({b_minus}, {b_plus})"
            )));
        }
        Ok(Self { b_minus, b_plus })
    }

    /// `(omega_minus(t), omega_plus(t))`.
    ///
    /// For `b+ > b-`: `omega_- = log(b+/(b+-b-) - b-/(b+-b-) e^{-(b+-b-)t})`
    /// and `omega_+ = omega_- + (b+-b-) t`; both collapse to `log(1 + b t)`
    /// when the rates coincide. Evaluated through `exp_m1`/`ln_1p` so the
    /// coincident limit is seamless.
    pub fn omega(&self, t: f64) -> (f64, f64) {
        let gap = self.b_plus - self.b_minus;
        let growth = if gap == 0.0 {
            t
        } else {
            -(-gap * t).exp_m1() / gap
        };
        let lo = (self.b_minus * growth).ln_1p();
        (lo, lo + gap * t)
    }
}

/// Extremal rates of the substituted problem:
/// `b± = <phi>_h inf/sup_x b(x) exp(-(phi * rho_0)(x))` over the grid.
pub fn effective_rates(
    rate: &RateField,
    conv: &Convolver,
    initial: &ScalarField,
) -> Result<EnvelopeBounds> {
    let dom = conv.domain();
    if initial.domain() != dom {
        return Err(Error::DomainMismatch);
    }
    let damp = conv.apply(initial)?;
    let b = rate.discretize(&dom);
    let eff = b.zip_map(&damp, |bv, c| bv * (-c).exp())?;
    EnvelopeBounds::new(conv.mass() * eff.min(), conv.mass() * eff.max())
}

/// Convenience wrapper returning the raw pair `(omega_-, omega_+)`.
pub fn envelopes(b_minus: f64, b_plus: f64, t: f64) -> Result<(f64, f64)> {
    Ok(EnvelopeBounds::new(b_minus, b_plus)?.omega(t))
}

/// Per-snapshot slack against the envelope sandwich.
#[derive(Debug, Clone, Copy)]
pub struct BoundRow {
    pub t: f64,
    pub omega_minus: f64,
    pub omega_plus: f64,
    /// min over cells of `rho_t - rho_0 - omega_-/<phi>` (lower-bound slack).
    pub min_slack: f64,
    /// min over cells of `rho_0 + omega_+/<phi> - rho_t`, reported as the
    /// upper-bound slack maximum offender.
    pub max_slack: f64,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub worst_slack: f64,
    pub pass: bool,
    pub tolerance: f64,
}

/// Evaluate the sandwich at every snapshot and cell.
pub fn bound_report(
    sol: &KineticSolution,
    env: &EnvelopeBounds,
    initial: &ScalarField,
    tolerance: f64,
) -> Result<BoundReport> {
    let inv_mass = 1.0 / sol.kernel_mass;
    let mut rows = Vec::with_capacity(sol.times.len());
    let mut worst = f64::INFINITY;
    for (t, rho) in sol.times.iter().zip(&sol.densities) {
        if rho.domain() != initial.domain() {
            return Err(Error::DomainMismatch);
        }
        let (om, op) = env.omega(*t);
        let mut min_lower = f64::INFINITY;
        let mut min_upper = f64::INFINITY;
        for i in 0..rho.len() {
            let lower = rho.get(i) - initial.get(i) - om * inv_mass;
            let upper = initial.get(i) + op * inv_mass - rho.get(i);
            min_lower = min_lower.min(lower);
            min_upper = min_upper.min(upper);
        }
        worst = worst.min(min_lower).min(min_upper);
        rows.push(BoundRow {
            t: *t,
            omega_minus: om,
            omega_plus: op,
            min_slack: min_lower,
            max_slack: min_upper,
        });
    }
    Ok(BoundReport {
        rows,
        worst_slack: worst,
        pass: worst >= -tolerance,
        tolerance,
    })
}

/// As [`bound_report`], but the worst offender becomes a hard error.
pub fn verify_bounds(
    sol: &KineticSolution,
    env: &EnvelopeBounds,
    initial: &ScalarField,
    tolerance: f64,
) -> Result<BoundReport> {
    let report = bound_report(sol, env, initial, tolerance)?;
    if !report.pass {
        let row = report
            .rows
            .iter()
            .min_by(|a, b| {
                let sa = a.min_slack.min(a.max_slack);
                let sb = b.min_slack.min(b.max_slack);
                sa.partial_cmp(&sb).unwrap()
            })
            .expect("report has rows");
        // locate the worst cell at the offending time
        let idx = sol
            .times
            .iter()
            .position(|t| *t == row.t)
            .expect("row time from solution");
        let rho = &sol.densities[idx];
        let inv_mass = 1.0 / sol.kernel_mass;
        let (om, op) = env.omega(row.t);
        let mut cell = 0;
        let mut slack = f64::INFINITY;
        for i in 0..rho.len() {
            let lower = rho.get(i) - initial.get(i) - om * inv_mass;
            let upper = initial.get(i) + op * inv_mass - rho.get(i);
            if lower.min(upper) < slack {
                slack = lower.min(upper);
                cell = i;
            }
        }
        return Err(Error::BoundViolation {
            t: row.t,
            cell,
            slack,
        });
    }
    Ok(report)
}
