//! Exact stochastic simulation of the pure-birth process with rate density
//! `c_+(x, gamma) = b(x) exp(-sum_{y in gamma} phi(x - y))` on a torus window.
//!
//! Sampling is by thinning: proposals arrive on a homogeneous Poisson clock
//! of intensity `b_bar |domain|` at uniform positions and are accepted with
//! probability `c_+(x, gamma)/b_bar`. The majorant is exact (the rate never
//! exceeds `b_bar`), so the sample path carries no time-discretization bias.

pub mod cell_list;
pub mod stats;

pub use cell_list::CellList;
pub use stats::{
    chi_square_poisson_gof, covering_bound, exp_moment_series, factorial_moments, log_growth_bound,
    mean_trajectory, moment_constant, ExpMomentPoint, FactorialMoment, GofResult, MomentCheck,
    TrajectoryPoint,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Point, TorusDomain};
use crate::potential::Potential;
use crate::rate::RateField;

/// Finite point set in the simulation window.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    domain: TorusDomain,
    points: Vec<Point>,
}

impl Configuration {
    pub fn empty(domain: TorusDomain) -> Self {
        Self {
            domain,
            points: Vec::new(),
        }
    }

    pub fn from_points(domain: TorusDomain, points: Vec<Point>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !domain.contains(**p)) {
            return Err(Error::InvalidParameter(format!(
                "point ({}, {}) outside the domain",
                p[0], p[1]
            )));
        }
        Ok(Self { domain, points })
    }

    pub fn domain(&self) -> TorusDomain {
        self.domain
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Axis-aligned observation window inside the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    dim: usize,
    pub lo: Point,
    pub hi: Point,
}

impl WindowSpec {
    pub fn new(dom: &TorusDomain, lo: Point, hi: Point) -> Result<Self> {
        for k in 0..dom.dim() {
            if !(0.0 <= lo[k] && lo[k] < hi[k] && hi[k] <= dom.side()) {
                return Err(Error::InvalidParameter(format!(
                    "window [{}, {}) invalid on axis {k}",
                    lo[k], hi[k]
                )));
            }
        }
        Ok(Self {
            dim: dom.dim(),
            lo,
            hi,
        })
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|k| self.hi[k] - self.lo[k]).product()
    }

    /// Half-open membership `lo <= x < hi` per axis.
    pub fn contains(&self, x: Point) -> bool {
        (0..self.dim).all(|k| x[k] >= self.lo[k] && x[k] < self.hi[k])
    }

    /// Radius of the smallest ball containing the box.
    pub fn circumradius(&self) -> f64 {
        let mut s = 0.0;
        for k in 0..self.dim {
            let half = 0.5 * (self.hi[k] - self.lo[k]);
            s += half * half;
        }
        s.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirthEvent {
    pub t: f64,
    pub position: Point,
}

/// Timestamped births of one replica, with enough metadata to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub domain: TorusDomain,
    pub master_seed: u64,
    pub stream: u64,
    pub t_end: f64,
    pub b_bar: f64,
    pub events: Vec<BirthEvent>,
}

impl EventLog {
    /// Births inside the window up to and including time `t`.
    pub fn count_window(&self, w: &WindowSpec, t: f64) -> Result<usize> {
        if !(0.0 <= t && t <= self.t_end + 1e-12) {
            return Err(Error::TimeOutOfRange {
                t,
                t_end: self.t_end,
            });
        }
        Ok(self
            .events
            .iter()
            .take_while(|e| e.t <= t)
            .filter(|e| w.contains(e.position))
            .count())
    }

    pub fn count_total(&self, t: f64) -> Result<usize> {
        if !(0.0 <= t && t <= self.t_end + 1e-12) {
            return Err(Error::TimeOutOfRange {
                t,
                t_end: self.t_end,
            });
        }
        Ok(self.events.partition_point(|e| e.t <= t))
    }

    /// Configuration accumulated by time `t` (initial points not tracked;
    /// logs start from the empty configuration unless stated otherwise).
    pub fn configuration_at(&self, t: f64) -> Result<Configuration> {
        let n = self.count_total(t)?;
        Configuration::from_points(
            self.domain,
            self.events[..n].iter().map(|e| e.position).collect(),
        )
    }
}

/// Immigration rate density `b(x) exp(-sum_y phi(x-y))` given a configuration.
pub fn birth_rate_density(
    dom: &TorusDomain,
    rate: &RateField,
    pot: &Potential,
    config: &Configuration,
    x: Point,
) -> f64 {
    let s: f64 = config
        .points()
        .iter()
        .map(|y| pot.eval_radial(dom.distance(x, *y)))
        .sum();
    rate.eval(dom, x) * (-s).exp()
}

/// One exact sample path from the empty configuration.
pub fn simulate(
    dom: &TorusDomain,
    rate: &RateField,
    pot: &Potential,
    t_end: f64,
    master_seed: u64,
    stream: u64,
) -> Result<EventLog> {
    simulate_from(
        dom,
        rate,
        pot,
        &Configuration::empty(*dom),
        t_end,
        master_seed,
        stream,
    )
}

/// One exact sample path from a given initial configuration.
///
/// Per proposal the stream is consumed in a fixed order — waiting time,
/// `dim` position coordinates, acceptance — so replaying the seed
/// reproduces every accept decision bit for bit.
pub fn simulate_from(
    dom: &TorusDomain,
    rate: &RateField,
    pot: &Potential,
    initial: &Configuration,
    t_end: f64,
    master_seed: u64,
    stream: u64,
) -> Result<EventLog> {
    if !(t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be nonnegative, got {t_end}"
        )));
    }
    if pot.range_cutoff() > 0.0 {
        pot.check_domain(dom).or_else(|e| match e {
            // coarse grids are irrelevant here; only wraparound matters
            Error::GridTooCoarse { .. } => Ok(()),
            other => Err(other),
        })?;
    }
    let b_bar = rate.b_bar();
    let mut log = EventLog {
        domain: *dom,
        master_seed,
        stream,
        t_end,
        b_bar,
        events: Vec::new(),
    };
    if b_bar == 0.0 || t_end == 0.0 {
        return Ok(log);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    let total_rate = b_bar * dom.volume();
    let interacting = pot.phi_bar() > 0.0;
    let mut cells = CellList::new(*dom, pot.range_cutoff());
    for p in initial.points() {
        cells.insert(*p);
    }

    let mut t = 0.0f64;
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / total_rate;
        if t > t_end {
            break;
        }
        let mut x = [0.0f64; 2];
        for c in x.iter_mut().take(dom.dim()) {
            *c = rng.random::<f64>() * dom.side();
        }
        let u_accept: f64 = rng.random();
        let suppression = if interacting {
            (-cells.potential_sum(pot, x)).exp()
        } else {
            1.0
        };
        let p_accept = rate.eval(dom, x) / b_bar * suppression;
        if u_accept < p_accept {
            cells.insert(x);
            log.events.push(BirthEvent { t, position: x });
        }
    }
    Ok(log)
}

/// Independent replicas on per-replica streams of the master seed, run in
/// parallel; output order is by replica index, so aggregation is
/// deterministic regardless of scheduling.
pub fn simulate_replicas(
    dom: &TorusDomain,
    rate: &RateField,
    pot: &Potential,
    t_end: f64,
    master_seed: u64,
    replicas: usize,
) -> Result<Vec<EventLog>> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|stream| simulate(dom, rate, pot, t_end, master_seed, stream))
        .collect()
}

/// Re-run the proposal stream of a log and verify that every accept
/// decision, time, and position reproduces exactly.
pub fn replay_matches(log: &EventLog, rate: &RateField, pot: &Potential) -> Result<bool> {
    let fresh = simulate(
        &log.domain,
        rate,
        pot,
        log.t_end,
        log.master_seed,
        log.stream,
    )?;
    Ok(fresh == *log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dom() -> TorusDomain {
        TorusDomain::new(1, 10.0, 64).unwrap()
    }

    #[test]
    fn rate_density_empty_configuration() {
        let d = dom();
        let rate = RateField::sinusoid(1.0, 0.5).unwrap();
        let pot = Potential::top_hat(1.0, 1.0).unwrap();
        let gamma = Configuration::empty(d);
        let x = [2.5, 0.0];
        assert_relative_eq!(
            birth_rate_density(&d, &rate, &pot, &gamma, x),
            rate.eval(&d, x),
            epsilon = 1e-15
        );
    }

    #[test]
    fn rate_density_single_neighbor() {
        // phi(x - y) = 0.3 at distance 0 via a tabulated profile
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let pot = Potential::tabulated(vec![0.0, 1.0], vec![0.3, 0.3], None).unwrap();
        let gamma = Configuration::from_points(d, vec![[3.0, 0.0]]).unwrap();
        let v = birth_rate_density(&d, &rate, &pot, &gamma, [3.5, 0.0]);
        assert_relative_eq!(v, (-0.3f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(v, 0.740818, epsilon = 1e-6);
    }

    #[test]
    fn rate_density_free_case_ignores_configuration() {
        let d = dom();
        let rate = RateField::constant(2.0).unwrap();
        let pot = Potential::zero();
        let pts = (0..50).map(|k| [k as f64 * 0.2, 0.0]).collect();
        let gamma = Configuration::from_points(d, pts).unwrap();
        assert_eq!(birth_rate_density(&d, &rate, &pot, &gamma, [1.0, 0.0]), 2.0);
    }

    #[test]
    fn same_seed_bit_identical() {
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let pot = Potential::top_hat(1.0, 1.0).unwrap();
        let a = simulate(&d, &rate, &pot, 20.0, 42, 0).unwrap();
        let b = simulate(&d, &rate, &pot, 20.0, 42, 0).unwrap();
        assert_eq!(a, b);
        let c = simulate(&d, &rate, &pot, 20.0, 42, 1).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn t_end_zero_no_events() {
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let log = simulate(&d, &rate, &Potential::zero(), 0.0, 7, 0).unwrap();
        assert!(log.events.is_empty());
    }

    #[test]
    fn event_times_strictly_increase() {
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let log = simulate(&d, &rate, &Potential::zero(), 50.0, 11, 3).unwrap();
        assert!(log.events.windows(2).all(|w| w[0].t < w[1].t));
        assert!(log.events.iter().all(|e| d.contains(e.position)));
    }

    #[test]
    fn count_window_basics() {
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let log = simulate(&d, &rate, &Potential::zero(), 30.0, 5, 0).unwrap();
        let whole = WindowSpec::new(&d, [0.0, 0.0], [10.0, 0.0]).unwrap();
        assert_eq!(log.count_window(&whole, 0.0).unwrap(), 0);
        assert_eq!(log.count_window(&whole, 30.0).unwrap(), log.events.len());
        // nondecreasing in t
        let mut prev = 0;
        for k in 0..=30 {
            let c = log.count_window(&whole, k as f64).unwrap();
            assert!(c >= prev);
            prev = c;
        }
        assert!(matches!(
            log.count_window(&whole, 31.0),
            Err(Error::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn replay_reproduces_decisions() {
        let d = dom();
        let rate = RateField::sinusoid(1.0, 0.5).unwrap();
        let pot = Potential::top_hat(1.0, 1.0).unwrap();
        let log = simulate(&d, &rate, &pot, 40.0, 99, 2).unwrap();
        assert!(replay_matches(&log, &rate, &pot).unwrap());
        // and every logged acceptance is consistent with the pre-birth
        // configuration it saw
        for (k, e) in log.events.iter().enumerate() {
            let pre = if k == 0 {
                Configuration::empty(d)
            } else {
                log.configuration_at(log.events[k - 1].t).unwrap()
            };
            assert_eq!(pre.len(), k);
            let c_plus = birth_rate_density(&d, &rate, &pot, &pre, e.position);
            assert!(c_plus > 0.0, "accepted a zero-rate proposal");
        }
    }

    #[test]
    fn initial_configuration_suppresses_births() {
        // a pre-existing population damps the accepted rate; paired seeds
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let pot = Potential::top_hat(1.5, 1.0).unwrap();
        let seeds: Vec<u64> = (0..48).collect();
        let blanket: Vec<Point> = (0..40).map(|k| [k as f64 * 0.25, 0.0]).collect();
        let initial = Configuration::from_points(d, blanket).unwrap();
        let (mut empty_total, mut seeded_total) = (0usize, 0usize);
        for &s in &seeds {
            empty_total += simulate(&d, &rate, &pot, 10.0, 3030, s)
                .unwrap()
                .events
                .len();
            seeded_total += simulate_from(&d, &rate, &pot, &initial, 10.0, 3030, s)
                .unwrap()
                .events
                .len();
        }
        assert!(
            seeded_total < empty_total,
            "initial crowd should suppress births: {seeded_total} vs {empty_total}"
        );
    }

    #[test]
    fn free_case_2d_mean_matches_area_law() {
        let d2 = TorusDomain::new(2, 6.0, 12).unwrap();
        let rate = RateField::constant(0.5).unwrap();
        let logs = simulate_replicas(&d2, &rate, &Potential::zero(), 4.0, 808, 300).unwrap();
        let w = WindowSpec::new(&d2, [1.0, 1.0], [3.0, 4.0]).unwrap();
        // mean = t * b * |w| = 4 * 0.5 * 6 = 12
        let mean = logs
            .iter()
            .map(|l| l.count_window(&w, 4.0).unwrap() as f64)
            .sum::<f64>()
            / logs.len() as f64;
        let se = (12.0f64 / 300.0).sqrt();
        assert!((mean - 12.0).abs() < 4.0 * se, "2d free-case mean {mean}");
    }

    #[test]
    fn moment_check_bundle() {
        let d = dom();
        let w = WindowSpec::new(&d, [0.0, 0.0], [1.0, 0.0]).unwrap();
        let mc = stats::MomentCheck::new(1.0, 0.0, w).unwrap();
        assert!(mc.constant >= 1.0);
        assert!((mc.constant - (std::f64::consts::E - 1.0).exp()).abs() < 1e-12);
        assert!(stats::MomentCheck::new(0.0, 0.0, w).is_err());
    }

    #[test]
    fn repulsion_thins_the_population() {
        // paired seeds: pointwise stronger repulsion cannot produce more
        // points on average
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let weak = Potential::top_hat(0.2, 1.0).unwrap();
        let strong = Potential::top_hat(2.0, 1.0).unwrap();
        let reps = 64;
        let mut sum_weak = 0usize;
        let mut sum_strong = 0usize;
        for s in 0..reps {
            sum_weak += simulate(&d, &rate, &weak, 30.0, 1234, s)
                .unwrap()
                .events
                .len();
            sum_strong += simulate(&d, &rate, &strong, 30.0, 1234, s)
                .unwrap()
                .events
                .len();
        }
        assert!(
            sum_strong < sum_weak,
            "stronger repulsion grew the population: {sum_strong} vs {sum_weak}"
        );
    }

    #[test]
    fn free_case_mean_tracks_t_lambda() {
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let logs = simulate_replicas(&d, &rate, &Potential::zero(), 5.0, 2024, 400).unwrap();
        let w = WindowSpec::new(&d, [0.0, 0.0], [1.0, 0.0]).unwrap();
        let mean = logs
            .iter()
            .map(|l| l.count_window(&w, 5.0).unwrap() as f64)
            .sum::<f64>()
            / logs.len() as f64;
        // Poisson(5): stderr = sqrt(5/400) ~ 0.11
        assert!((mean - 5.0).abs() < 3.0 * (5.0f64 / 400.0).sqrt() * 1.5);
    }

    #[test]
    fn replicas_deterministic_across_thread_counts() {
        let d = dom();
        let rate = RateField::constant(1.0).unwrap();
        let pot = Potential::top_hat(1.0, 1.0).unwrap();
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = pool1.install(|| simulate_replicas(&d, &rate, &pot, 10.0, 77, 16).unwrap());
        let b = pool4.install(|| simulate_replicas(&d, &rate, &pot, 10.0, 77, 16).unwrap());
        assert_eq!(a, b);
    }
}
