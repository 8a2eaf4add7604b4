//! Mesoscopic scaling ladder: weaken the repulsion to `eps phi` while
//! raising the intensity to `b/eps`, estimate rescaled empirical densities,
//! and quantify convergence of the rescaled micro-evolution toward the
//! kinetic solution on a finite horizon.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ScalarField, TorusDomain};
use crate::kinetic::horizon::horizon_tau;
use crate::kinetic::{Convolver, KineticSolution};
use crate::microsim::{simulate, EventLog};
use crate::potential::Potential;
use crate::rate::RateField;

/// Scaled kernels `tau_x^eps(y) = e^{-eps phi}` and
/// `t_x^eps(y) = (e^{-eps phi} - 1)/eps`, evaluable at a displacement.
#[derive(Debug, Clone)]
pub struct ScalingSpec {
    pub ladder: Vec<f64>,
    pub rate: RateField,
    pub potential: Potential,
}

impl ScalingSpec {
    pub fn new(ladder: Vec<f64>, rate: RateField, potential: Potential) -> Result<Self> {
        if ladder.is_empty() {
            return Err(Error::InvalidParameter("empty epsilon ladder".into()));
        }
        for &e in &ladder {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::EpsilonOutOfRange(e));
            }
        }
        if ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "epsilon ladder must decrease strictly".into(),
            ));
        }
        Ok(Self {
            ladder,
            rate,
            potential,
        })
    }

    /// `tau_x^eps` at radial distance `r`.
    pub fn tau_eps(&self, r: f64, eps: f64) -> f64 {
        (-eps * self.potential.eval_radial(r)).exp()
    }

    /// `t_x^eps` at radial distance `r`; tends to `-phi(r)` as `eps -> 0`.
    pub fn t_eps(&self, r: f64, eps: f64) -> f64 {
        (-eps * self.potential.eval_radial(r)).exp_m1() / eps
    }
}

/// The micro model seen at scale `eps`: potential `eps phi`, intensity
/// `b/eps` (majorant `b_bar/eps`). Identity at `eps = 1`.
pub fn scaled_model(rate: &RateField, pot: &Potential, eps: f64) -> Result<(RateField, Potential)> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    if eps == 1.0 {
        return Ok((rate.clone(), pot.clone()));
    }
    Ok((rate.scaled(1.0 / eps), pot.scaled(eps)))
}

/// Rescaled per-cell density estimate `eps * count / (replicas * cell volume)`.
#[derive(Debug, Clone)]
pub struct EmpiricalDensity {
    pub field: ScalarField,
    pub stderr: ScalarField,
    pub replicas: usize,
}

/// Estimate the rescaled density at time `t` from replica logs of the
/// `eps`-scaled model, binned on the kinetic grid's cells.
pub fn estimate_density(
    logs: &[EventLog],
    grid: &TorusDomain,
    t: f64,
    eps: f64,
) -> Result<EmpiricalDensity> {
    if logs.len() < 2 {
        return Err(Error::TooFewReplicas {
            need: 2,
            got: logs.len(),
        });
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let cells = grid.cell_count();
    let mut sum = vec![0.0f64; cells];
    let mut sum_sq = vec![0.0f64; cells];
    let mut counts = vec![0.0f64; cells];
    for log in logs {
        counts.iter_mut().for_each(|c| *c = 0.0);
        let n = log.count_total(t)?;
        for e in &log.events[..n] {
            counts[grid.cell_of(e.position)] += 1.0;
        }
        for (i, &c) in counts.iter().enumerate() {
            sum[i] += c;
            sum_sq[i] += c * c;
        }
    }
    let r = logs.len() as f64;
    let v = grid.cell_volume();
    let mut field = vec![0.0f64; cells];
    let mut stderr = vec![0.0f64; cells];
    for i in 0..cells {
        let mean = sum[i] / r;
        let var = (sum_sq[i] / r - mean * mean).max(0.0) * r / (r - 1.0);
        field[i] = eps * mean / v;
        stderr[i] = eps * (var / r).sqrt() / v;
    }
    Ok(EmpiricalDensity {
        field: ScalarField::new(*grid, field)?,
        stderr: ScalarField::new(*grid, stderr)?,
        replicas: logs.len(),
    })
}

/// Pair-distance histogram normalized by the Poisson expectation for the
/// same mean density.
#[derive(Debug, Clone)]
pub struct PairCorrelation {
    /// `(lo, hi]` distance bins.
    pub bins: Vec<(f64, f64)>,
    pub g2: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Estimate the radial pair correlation at time `t` over `(0, r_max]`.
pub fn estimate_pair_correlation(
    logs: &[EventLog],
    r_max: f64,
    n_bins: usize,
    t: f64,
) -> Result<PairCorrelation> {
    if logs.len() < 50 {
        return Err(Error::TooFewReplicas {
            need: 50,
            got: logs.len(),
        });
    }
    if !(r_max > 0.0) || n_bins == 0 {
        return Err(Error::InvalidParameter(
            "need r_max > 0 and at least one bin".into(),
        ));
    }
    let dom = logs[0].domain;
    if r_max > dom.side() / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "r_max {} exceeds half the box side",
            r_max
        )));
    }
    let width = r_max / n_bins as f64;
    let volume = dom.volume();

    let mut total_points = 0usize;
    let mut per_replica: Vec<Vec<f64>> = Vec::with_capacity(logs.len());
    for log in logs {
        let n = log.count_total(t)?;
        total_points += n;
        let pts = &log.events[..n];
        let mut hist = vec![0.0f64; n_bins];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dom.distance(pts[i].position, pts[j].position);
                if d > 0.0 && d <= r_max {
                    let b = ((d / width).ceil() as usize - 1).min(n_bins - 1);
                    hist[b] += 1.0;
                }
            }
        }
        per_replica.push(hist);
    }
    if total_points == 0 {
        return Err(Error::NoPairs);
    }
    let lambda = total_points as f64 / (logs.len() as f64 * volume);

    let mut bins = Vec::with_capacity(n_bins);
    let mut g2 = Vec::with_capacity(n_bins);
    let mut stderr = Vec::with_capacity(n_bins);
    for b in 0..n_bins {
        let lo = b as f64 * width;
        let hi = lo + width;
        // measure of the distance shell on the torus
        let shell = match dom.dim() {
            1 => 2.0 * (hi - lo),
            _ => std::f64::consts::PI * (hi * hi - lo * lo),
        };
        // Poisson expectation of unordered pairs in the bin per replica
        let expect = 0.5 * lambda * lambda * volume * shell;
        let vals: Vec<f64> = per_replica.iter().map(|h| h[b] / expect).collect();
        let r = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / r;
        let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
        bins.push((lo, hi));
        g2.push(mean);
        stderr.push((var / r).sqrt());
    }
    Ok(PairCorrelation { bins, g2, stderr })
}

/// Sup over interior snapshots of `|d rho/dt - b e^{-phi * rho}|`, the
/// defect of the trajectory as a density solution of the hierarchy's
/// Poisson ansatz. Time derivatives use the fourth-order five-point
/// central-difference stencil, so analytic trajectories sampled at spacing
/// `dt` leave a residual of order `dt^4`.
pub fn vlasov_residual(sol: &KineticSolution, pot: &Potential, rate: &RateField) -> Result<f64> {
    if sol.times.len() < 5 {
        return Err(Error::TooFewSnapshots {
            need: 5,
            got: sol.times.len(),
        });
    }
    let dt = sol.times[1] - sol.times[0];
    for w in sol.times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "vlasov residual needs uniformly spaced snapshots".into(),
            ));
        }
    }
    let dom = sol.densities[0].domain();
    let conv = Convolver::new(&dom, pot)?;
    let b = rate.discretize(&dom);
    let mut worst = 0.0f64;
    for k in 2..sol.times.len() - 2 {
        let rhs = b.zip_map(&conv.apply(&sol.densities[k])?, |bv, c| bv * (-c).exp())?;
        let d0 = &sol.densities[k - 2];
        let d1 = &sol.densities[k - 1];
        let d3 = &sol.densities[k + 1];
        let d4 = &sol.densities[k + 2];
        for i in 0..rhs.len() {
            let deriv = (-d4.get(i) + 8.0 * d3.get(i) - 8.0 * d1.get(i) + d0.get(i)) / (12.0 * dt);
            worst = worst.max((deriv - rhs.get(i)).abs());
        }
    }
    Ok(worst)
}

/// Scaling-comparison window: half the optimal existence horizon,
/// `tau(theta0)/2`.
pub fn comparison_horizon(theta0: f64, b_bar: f64, phi_l1: f64) -> Result<f64> {
    Ok(horizon_tau(theta0, b_bar, phi_l1)?.1 / 2.0)
}

#[derive(Debug, Clone)]
pub struct ComparisonEntry {
    pub eps: f64,
    /// Sup over sampled times and cells of the density gap.
    pub sup_error: f64,
    /// Largest volume-weighted l1 gap over the sampled times.
    pub l1_error: f64,
    /// Cell-pooled density stderr at the worst time.
    pub pooled_stderr: f64,
    /// Per-time rows `(t, sup, l1, pooled stderr)` for reporting.
    pub rows: Vec<(f64, f64, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub entries: Vec<ComparisonEntry>,
    pub horizon: f64,
    /// Errors nonincreasing along the ladder up to two pooled standard
    /// errors per consecutive pair.
    pub monotone_within_2se: bool,
}

/// Run the scaling experiment and compare the rescaled empirical densities
/// against the kinetic solution at its snapshot times restricted to `[0, T]`.
pub fn convergence_report(
    rate: &RateField,
    pot: &Potential,
    kinetic: &KineticSolution,
    horizon: f64,
    ladder: &[f64],
    replicas: usize,
    master_seed: u64,
) -> Result<ComparisonReport> {
    if replicas < 2 {
        return Err(Error::TooFewReplicas {
            need: 2,
            got: replicas,
        });
    }
    let grid = kinetic.densities[0].domain();
    let times: Vec<(usize, f64)> = kinetic
        .times
        .iter()
        .enumerate()
        .filter(|(_, t)| **t > 0.0 && **t <= horizon + 1e-12)
        .map(|(k, t)| (k, *t))
        .collect();
    if times.is_empty() {
        return Err(Error::InvalidParameter(
            "no kinetic snapshots inside the comparison horizon".into(),
        ));
    }

    let mut entries = Vec::with_capacity(ladder.len());
    for (li, &eps) in ladder.iter().enumerate() {
        let (b_eps, pot_eps) = scaled_model(rate, pot, eps)?;
        // distinct stream block per ladder entry keeps replicas independent
        let base = (li * replicas) as u64;
        let logs: Vec<EventLog> = (0..replicas as u64)
            .into_par_iter()
            .map(|s| simulate(&grid, &b_eps, &pot_eps, horizon, master_seed, base + s))
            .collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(times.len());
        let mut sup_error = 0.0f64;
        let mut l1_error = 0.0f64;
        let mut pooled_at_worst = 0.0f64;
        for &(k, t) in &times {
            let est = estimate_density(&logs, &grid, t, eps)?;
            let gap = est.field.zip_map(&kinetic.densities[k], |a, b| a - b)?;
            let sup = gap.sup_norm();
            let l1 = gap.l1_norm();
            let pooled = (est.stderr.values().iter().map(|s| s * s).sum::<f64>()
                / est.stderr.len() as f64)
                .sqrt();
            rows.push((t, sup, l1, pooled));
            if sup > sup_error {
                sup_error = sup;
                pooled_at_worst = pooled;
            }
            l1_error = l1_error.max(l1);
        }
        entries.push(ComparisonEntry {
            eps,
            sup_error,
            l1_error,
            pooled_stderr: pooled_at_worst,
            rows,
        });
    }

    let monotone = entries.windows(2).all(|w| {
        let allowance = 2.0 * (w[0].pooled_stderr.powi(2) + w[1].pooled_stderr.powi(2)).sqrt();
        w[1].sup_error <= w[0].sup_error + allowance
    });
    Ok(ComparisonReport {
        entries,
        horizon,
        monotone_within_2se: monotone,
    })
}
