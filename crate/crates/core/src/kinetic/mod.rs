//! Grid solver for the kinetic density equation
//! `d/dt rho_t(x) = b(x) exp(-(phi * rho_t)(x))` and its decoupled variant,
//! plus analytic reference solutions, envelope bounds, and horizon formulas.

pub mod convolve;
pub mod envelope;
pub mod horizon;
pub mod picard;

pub use convolve::Convolver;
pub use envelope::{bound_report, effective_rates, envelopes, verify_bounds, EnvelopeBounds};
pub use horizon::{horizon_t, horizon_tau, lambert_w, HorizonParams};
pub use picard::{solve_picard, PicardOptions};

use crate::error::{Error, Result};
use crate::grid::{ScalarField, TorusDomain};
use crate::potential::Potential;
use crate::rate::RateField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Picard,
}

/// Which convolution kernel drives the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsVariant {
    /// Kernel `phi`, the mean-field equation itself.
    Kinetic,
    /// Kernel `1 - exp(-phi)`, the naive decoupling of the first hierarchy
    /// equation; dominates the kinetic solution pointwise.
    Closure,
}

#[derive(Clone)]
pub struct KineticConfig {
    pub domain: TorusDomain,
    pub potential: Potential,
    pub rate: RateField,
    pub initial: ScalarField,
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    pub rhs_variant: RhsVariant,
    /// Snapshot times; `None` stores about a hundred evenly spaced ones.
    pub snapshot_times: Option<Vec<f64>>,
}

impl KineticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial.domain() != self.domain {
            return Err(Error::DomainMismatch);
        }
        if let Some((cell, &value)) = self
            .initial
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| **v < 0.0 || !v.is_finite())
        {
            return Err(Error::NegativeDensity { cell, value });
        }
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need dt > 0 and t_end >= 0, got dt = {}, t_end = {}",
                self.dt, self.t_end
            )));
        }
        let prod = self.dt * self.rate.b_bar();
        if prod > 0.05 {
            return Err(Error::StepTooLarge(prod));
        }
        Ok(())
    }

    pub(crate) fn snapshots(&self) -> Vec<f64> {
        let mut times = match &self.snapshot_times {
            Some(t) => t.clone(),
            None => {
                let n = 100;
                (0..=n).map(|k| self.t_end * k as f64 / n as f64).collect()
            }
        };
        times.retain(|t| *t >= 0.0 && *t <= self.t_end + 1e-12);
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if times.is_empty() {
            times.push(self.t_end);
        }
        times
    }
}

/// Densities stored at increasing snapshot times.
#[derive(Debug, Clone)]
pub struct KineticSolution {
    pub times: Vec<f64>,
    pub densities: Vec<ScalarField>,
    pub variant: RhsVariant,
    /// Discrete kernel mass `<phi>_h` used inside the convolutions.
    pub kernel_mass: f64,
}

impl KineticSolution {
    pub fn last(&self) -> &ScalarField {
        self.densities.last().expect("solution has snapshots")
    }

    /// Largest pointwise gap against another solution at shared times.
    pub fn sup_distance(&self, other: &KineticSolution) -> f64 {
        let mut worst = 0.0f64;
        for (t, rho) in self.times.iter().zip(&self.densities) {
            if let Some(j) = other.times.iter().position(|s| (s - t).abs() < 1e-9) {
                worst = worst.max(rho.sup_distance(&other.densities[j]));
            }
        }
        worst
    }
}

/// Right-hand side evaluator with a cached kernel and rate samples.
pub struct KineticRhs {
    b: ScalarField,
    conv: Convolver,
}

impl KineticRhs {
    pub fn new(
        dom: &TorusDomain,
        rate: &RateField,
        pot: &Potential,
        variant: RhsVariant,
    ) -> Result<Self> {
        let base = Convolver::new(dom, pot)?;
        let conv = match variant {
            RhsVariant::Kinetic => base,
            RhsVariant::Closure => base.closure_variant()?,
        };
        Ok(Self {
            b: rate.discretize(dom),
            conv,
        })
    }

    pub fn kernel_mass(&self) -> f64 {
        self.conv.mass()
    }

    pub fn convolver(&self) -> &Convolver {
        &self.conv
    }

    pub fn rate_samples(&self) -> &ScalarField {
        &self.b
    }

    /// `b(x) exp(-(kernel * rho)(x))`; rejects negative densities.
    pub fn eval(&self, rho: &ScalarField) -> Result<ScalarField> {
        if let Some((cell, &value)) = rho.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeDensity { cell, value });
        }
        Ok(self.eval_unchecked(rho))
    }

    fn eval_unchecked(&self, rho: &ScalarField) -> ScalarField {
        let conv = self.conv.apply(rho).expect("domain checked at build");
        self.b
            .zip_map(&conv, |b, c| b * (-c).exp())
            .expect("domains match")
    }
}

/// One-off kinetic right-hand side `b(x) exp(-(phi * rho)(x))`.
pub fn rhs_kinetic(rate: &RateField, pot: &Potential, rho: &ScalarField) -> Result<ScalarField> {
    KineticRhs::new(&rho.domain(), rate, pot, RhsVariant::Kinetic)?.eval(rho)
}

/// One-off decoupled right-hand side with kernel `1 - exp(-phi)`.
pub fn rhs_closure(rate: &RateField, pot: &Potential, rho: &ScalarField) -> Result<ScalarField> {
    KineticRhs::new(&rho.domain(), rate, pot, RhsVariant::Closure)?.eval(rho)
}

/// Explicit homogeneous solution `log(1 + b <phi> t) / <phi>` from the zero
/// initial condition.
pub fn homogeneous_exact(b_star: f64, phi_l1: f64, t: f64) -> Result<f64> {
    if !(phi_l1 > 0.0) {
        return Err(Error::AssumptionViolation(format!(
            "homogeneous solution needs <phi> > 0, got {phi_l1}"
        )));
    }
    if b_star < 0.0 || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need b >= 0 and t >= 0, got b = {b_star}, t = {t}"
        )));
    }
    Ok((b_star * phi_l1 * t).ln_1p() / phi_l1)
}

/// Solve the configured problem, dispatching on the method.
pub fn solve(cfg: &KineticConfig) -> Result<KineticSolution> {
    match cfg.method {
        Method::Rk4 => solve_rk4(cfg),
        Method::Picard => solve_picard(cfg, PicardOptions::default()),
    }
}

/// Classical fixed-step RK4 march; steps shorten to land exactly on
/// snapshot times and on `t_end`.
pub fn solve_rk4(cfg: &KineticConfig) -> Result<KineticSolution> {
    cfg.validate()?;
    let rhs = KineticRhs::new(&cfg.domain, &cfg.rate, &cfg.potential, cfg.rhs_variant)?;
    rhs.eval(&cfg.initial)?; // surface NegativeDensity before marching
    let snaps = cfg.snapshots();

    let mut rho = cfg.initial.clone();
    let mut t = 0.0f64;
    let mut times = Vec::with_capacity(snaps.len());
    let mut densities = Vec::with_capacity(snaps.len());
    let mut next_snap = 0usize;

    if snaps[0] <= 1e-12 {
        times.push(0.0);
        densities.push(rho.clone());
        next_snap = 1;
    }

    while next_snap < snaps.len() {
        let target = snaps[next_snap];
        while t < target - 1e-12 {
            let dt = cfg.dt.min(target - t);
            rk4_step(&rhs, &mut rho, dt);
            t += dt;
        }
        t = target;
        times.push(t);
        densities.push(rho.clone());
        next_snap += 1;
    }

    Ok(KineticSolution {
        times,
        densities,
        variant: cfg.rhs_variant,
        kernel_mass: rhs.kernel_mass(),
    })
}

fn rk4_step(rhs: &KineticRhs, rho: &mut ScalarField, dt: f64) {
    let k1 = rhs.eval_unchecked(rho);
    let mut stage = rho.clone();
    stage.axpy(0.5 * dt, &k1);
    let k2 = rhs.eval_unchecked(&stage);
    stage = rho.clone();
    stage.axpy(0.5 * dt, &k2);
    let k3 = rhs.eval_unchecked(&stage);
    stage = rho.clone();
    stage.axpy(dt, &k3);
    let k4 = rhs.eval_unchecked(&stage);
    rho.axpy(dt / 6.0, &k1);
    rho.axpy(dt / 3.0, &k2);
    rho.axpy(dt / 3.0, &k3);
    rho.axpy(dt / 6.0, &k4);
}
