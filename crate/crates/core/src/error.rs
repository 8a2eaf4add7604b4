use thiserror::Error;

/// Errors surfaced by the solver and simulator modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),
    #[error(
        "grid too coarse: range cutoff {cutoff} spans fewer than two grid spacings ({spacing})"
    )]
    GridTooCoarse { cutoff: f64, spacing: f64 },
    #[error("fields live on different domains")]
    DomainMismatch,
    #[error("density has a negative value {value} at cell {cell}")]
    NegativeDensity { cell: usize, value: f64 },
    #[error("time step too large: dt*b_bar = {0} exceeds 0.05")]
    StepTooLarge(f64),
    #[error("no contraction: b_plus*T = {0} >= 1")]
    NoContraction(f64),
    #[error("fixed-point iteration did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("theta = {theta} must exceed theta0 = {theta0}")]
    OrderViolation { theta: f64, theta0: f64 },
    #[error("theta0 must be finite; supply a finite surrogate for an empty initial state")]
    InfiniteTheta,
    #[error("invariant degenerates at alpha = 1; use the explicit solution instead")]
    AlphaOne,
    #[error("asymptote requires alpha < 1 and b_A < b_B")]
    NotUnstableRegime,
    #[error("time {t} outside the simulated range [0, {t_end}]")]
    TimeOutOfRange { t: f64, t_end: f64 },
    #[error("need at least {need} replicas, got {got}")]
    TooFewReplicas { need: usize, got: usize },
    #[error("window of circumradius {circumradius} not contained in a ball of radius {limit}")]
    WindowTooLarge { circumradius: f64, limit: f64 },
    #[error("epsilon = {0} outside (0, 1]")]
    EpsilonOutOfRange(f64),
    #[error("need at least {need} uniformly spaced snapshots, got {got}")]
    TooFewSnapshots { need: usize, got: usize },
    #[error("no pairs available at the requested time")]
    NoPairs,
    #[error("bound violated at t = {t}, cell {cell}: slack {slack}")]
    BoundViolation { t: f64, cell: usize, slack: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
