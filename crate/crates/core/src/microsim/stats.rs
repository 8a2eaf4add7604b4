//! Moment observables of replica ensembles and the logarithmic growth bound.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::microsim::{EventLog, WindowSpec};

#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
}

fn sample_stats(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var, (var / n).sqrt())
}

/// Per-time sample statistics of the window count over replicas.
pub fn mean_trajectory(
    logs: &[EventLog],
    w: &WindowSpec,
    times: &[f64],
) -> Result<Vec<TrajectoryPoint>> {
    if logs.len() < 2 {
        return Err(Error::TooFewReplicas {
            need: 2,
            got: logs.len(),
        });
    }
    times
        .iter()
        .map(|&t| {
            let counts: Vec<f64> = logs
                .iter()
                .map(|l| l.count_window(w, t).map(|c| c as f64))
                .collect::<Result<_>>()?;
            let (mean, variance, stderr) = sample_stats(&counts);
            Ok(TrajectoryPoint {
                t,
                mean,
                variance,
                stderr,
            })
        })
        .collect()
}

/// Lattice covering of the window by balls of radius `r/2`, and the volume
/// of one such ball. The count is a conservative upper bound on the true
/// minimal covering number: boxes of the inscribed square side `r/sqrt(d)`
/// tile the window.
pub fn covering_bound(w: &WindowSpec, r: f64, dim: usize) -> Result<(usize, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "covering radius parameter must be positive, got {r}"
        )));
    }
    let tile = r / (dim as f64).sqrt();
    let mut m = 1usize;
    for k in 0..dim {
        m *= ((w.hi[k] - w.lo[k]) / tile - 1e-12).ceil().max(1.0) as usize;
    }
    let upsilon = match dim {
        1 => r,
        _ => std::f64::consts::PI * (r / 2.0) * (r / 2.0),
    };
    Ok((m, upsilon))
}

/// Logarithmic ceiling on the expected window count:
/// `(m/phi_star) log(C0 + (e^{phi_star} - 1) b_bar upsilon t)`.
pub fn log_growth_bound(
    m: usize,
    upsilon: f64,
    phi_star: f64,
    b_bar: f64,
    c0: f64,
    t: f64,
) -> Result<f64> {
    if !(phi_star > 0.0) {
        return Err(Error::AssumptionViolation(format!(
            "bound needs phi_star > 0, got {phi_star}"
        )));
    }
    if !(c0 >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "C0 must be at least 1, got {c0}"
        )));
    }
    Ok(m as f64 / phi_star * (c0 + (phi_star.exp() - 1.0) * b_bar * upsilon * t).ln())
}

/// Exponential-moment ceiling of a sub-Poisson state:
/// `exp((e^alpha - 1) e^theta |Lambda|)`; `theta = -inf` (empty state)
/// gives 1.
pub fn moment_constant(alpha: f64, theta: f64, volume: f64) -> f64 {
    ((alpha.exp() - 1.0) * theta.exp() * volume).exp()
}

#[derive(Debug, Clone, Copy)]
pub struct ExpMomentPoint {
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Empirical `E[e^{phi_star N_w(t)}]` flagged against the linear-in-time
/// ceiling `C0 + (e^{phi_star} - 1) b_bar upsilon t` with a 3-stderr
/// allowance. The window must fit in a ball of radius `r/2`.
pub fn exp_moment_series(
    logs: &[EventLog],
    w: &WindowSpec,
    r: f64,
    phi_star: f64,
    c0: f64,
    times: &[f64],
) -> Result<Vec<ExpMomentPoint>> {
    if logs.len() < 2 {
        return Err(Error::TooFewReplicas {
            need: 2,
            got: logs.len(),
        });
    }
    if w.circumradius() > r / 2.0 + 1e-12 {
        return Err(Error::WindowTooLarge {
            circumradius: w.circumradius(),
            limit: r / 2.0,
        });
    }
    let b_bar = logs[0].b_bar;
    let dim = logs[0].domain.dim();
    let upsilon = match dim {
        1 => r,
        _ => std::f64::consts::PI * (r / 2.0) * (r / 2.0),
    };
    times
        .iter()
        .map(|&t| {
            let vals: Vec<f64> = logs
                .iter()
                .map(|l| l.count_window(w, t).map(|c| (phi_star * c as f64).exp()))
                .collect::<Result<_>>()?;
            let (mean, _, stderr) = sample_stats(&vals);
            let bound = c0 + (phi_star.exp() - 1.0) * b_bar * upsilon * t;
            Ok(ExpMomentPoint {
                t,
                mean,
                stderr,
                bound,
                pass: mean <= bound + 3.0 * stderr,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct FactorialMoment {
    pub order: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Sub-Poisson ceiling `(e^{theta_t} |Lambda|)^m` with
    /// `theta_t = log(e^{theta0} + b_bar t)`.
    pub ceiling: f64,
}

/// Empirical factorial moments `E[N (N-1) ... (N-m+1)]` up to `max_m <= 4`.
///
/// `theta0 = -inf` encodes the empty initial state, for which the ceiling
/// reduces to `(b_bar t |Lambda|)^m`.
pub fn factorial_moments(
    logs: &[EventLog],
    w: &WindowSpec,
    t: f64,
    max_m: usize,
    theta0: f64,
    b_bar: f64,
) -> Result<Vec<FactorialMoment>> {
    if logs.len() < 2 {
        return Err(Error::TooFewReplicas {
            need: 2,
            got: logs.len(),
        });
    }
    if max_m == 0 || max_m > 4 {
        return Err(Error::InvalidParameter(format!(
            "factorial moment order must be in 1..=4, got {max_m}"
        )));
    }
    let counts: Vec<usize> = logs
        .iter()
        .map(|l| l.count_window(w, t))
        .collect::<Result<_>>()?;
    let kappa_t = theta0.exp() + b_bar * t;
    (1..=max_m)
        .map(|m| {
            let vals: Vec<f64> = counts
                .iter()
                .map(|&n| (0..m).fold(1.0, |acc, j| acc * (n as f64 - j as f64).max(0.0)))
                .collect();
            let (mean, _, stderr) = sample_stats(&vals);
            Ok(FactorialMoment {
                order: m,
                mean,
                stderr,
                ceiling: (kappa_t * w.volume()).powi(m as i32),
            })
        })
        .collect()
}

/// Sub-Poisson check bundle: exponent `alpha` (typically `phi_star`),
/// exponent `theta`, window, and the resulting constant.
#[derive(Debug, Clone, Copy)]
pub struct MomentCheck {
    pub alpha: f64,
    pub theta: f64,
    pub window: WindowSpec,
    pub constant: f64,
}

impl MomentCheck {
    pub fn new(alpha: f64, theta: f64, window: WindowSpec) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponent alpha must be positive, got {alpha}"
            )));
        }
        let constant = moment_constant(alpha, theta, window.volume());
        Ok(Self {
            alpha,
            theta,
            window,
            constant,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GofResult {
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Chi-square goodness of fit of integer counts against Poisson(`lambda`),
/// with tail bins merged until every expected count is at least five.
pub fn chi_square_poisson_gof(counts: &[usize], lambda: f64) -> Result<GofResult> {
    if counts.len() < 20 {
        return Err(Error::TooFewReplicas {
            need: 20,
            got: counts.len(),
        });
    }
    let n = counts.len() as f64;
    let k_max = *counts.iter().max().unwrap();
    // Poisson pmf by upward recurrence
    let mut pmf = Vec::with_capacity(k_max + 1);
    let mut p = (-lambda).exp();
    pmf.push(p);
    for k in 0..k_max {
        p *= lambda / (k + 1) as f64;
        pmf.push(p);
    }
    let mut observed = vec![0.0f64; k_max + 2];
    for &c in counts {
        observed[c] += 1.0;
    }
    // expected mass of the open upper tail goes to the last slot
    let mut expected: Vec<f64> = pmf.iter().map(|q| q * n).collect();
    expected.push((1.0 - pmf.iter().sum::<f64>()).max(0.0) * n);

    // merge adjacent bins until every expected count reaches 5
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (o, e) in observed.iter().zip(&expected) {
        acc_o += o;
        acc_e += e;
        if acc_e >= 5.0 {
            bins.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        if let Some(last) = bins.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            bins.push((acc_o, acc_e));
        }
    }
    if bins.len() < 2 {
        return Err(Error::InvalidParameter(
            "too few populated bins for a chi-square test".into(),
        ));
    }
    let chi2: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("dof >= 1");
    Ok(GofResult {
        chi2,
        dof,
        p_value: 1.0 - dist.cdf(chi2),
    })
}
