//! CSV emission helpers shared by the CLI and the test harnesses.
//!
//! Floats are written with 17 significant digits and a '.' separator so the
//! artifacts round-trip doubles losslessly.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::grid::ScalarField;
use crate::kinetic::envelope::BoundReport;
use crate::kinetic::KineticSolution;
use crate::meso::{ComparisonReport, PairCorrelation};
use crate::microsim::{EventLog, ExpMomentPoint, TrajectoryPoint};
use crate::patches::{PatchParams, PatchState};

/// 17-significant-digit decimal form of a double.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<P: AsRef<Path>>(
    path: P,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()
}

/// Rows `index,x[,y],value` for a grid field.
pub fn field_rows(field: &ScalarField) -> (String, Vec<String>) {
    let dom = field.domain();
    let header = match dom.dim() {
        1 => "index,x,value".to_string(),
        _ => "index,x,y,value".to_string(),
    };
    let rows = (0..field.len())
        .map(|i| {
            let c = dom.cell_center(i);
            match dom.dim() {
                1 => format!("{i},{},{}", fmt_g17(c[0]), fmt_g17(field.get(i))),
                _ => format!(
                    "{i},{},{},{}",
                    fmt_g17(c[0]),
                    fmt_g17(c[1]),
                    fmt_g17(field.get(i))
                ),
            }
        })
        .collect();
    (header, rows)
}

/// Rows `t,cell_index,rho` for every snapshot of a kinetic solution.
pub fn kinetic_rows(sol: &KineticSolution) -> (String, Vec<String>) {
    let mut rows = Vec::new();
    for (t, rho) in sol.times.iter().zip(&sol.densities) {
        for i in 0..rho.len() {
            rows.push(format!("{},{i},{}", fmt_g17(*t), fmt_g17(rho.get(i))));
        }
    }
    ("t,cell_index,rho".to_string(), rows)
}

/// Rows `t,omega_minus,omega_plus,min_slack,max_slack` of a bound report.
pub fn bound_rows(report: &BoundReport) -> (String, Vec<String>) {
    let rows = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                fmt_g17(r.t),
                fmt_g17(r.omega_minus),
                fmt_g17(r.omega_plus),
                fmt_g17(r.min_slack),
                fmt_g17(r.max_slack)
            )
        })
        .collect();
    (
        "t,omega_minus,omega_plus,min_slack,max_slack".to_string(),
        rows,
    )
}

/// Rows `t,rho_A,rho_B,invariant_residual` for a patch trajectory; the
/// residual column is empty at `alpha = 1`, where the invariant degenerates.
pub fn patch_rows(params: &PatchParams, traj: &[PatchState]) -> (String, Vec<String>) {
    let rows = traj
        .iter()
        .map(|s| {
            let residual = crate::patches::invariant_residual(params, s)
                .map(fmt_g17)
                .unwrap_or_default();
            format!(
                "{},{},{},{residual}",
                fmt_g17(s.t),
                fmt_g17(s.rho_a),
                fmt_g17(s.rho_b)
            )
        })
        .collect();
    ("t,rho_A,rho_B,invariant_residual".to_string(), rows)
}

/// Rows `replica,t,x[,y]` for replica event logs.
pub fn event_rows(logs: &[EventLog]) -> (String, Vec<String>) {
    let dim = logs.first().map_or(1, |l| l.domain.dim());
    let header = match dim {
        1 => "replica,t,x".to_string(),
        _ => "replica,t,x,y".to_string(),
    };
    let mut rows = Vec::new();
    for (r, log) in logs.iter().enumerate() {
        for e in &log.events {
            match dim {
                1 => rows.push(format!("{r},{},{}", fmt_g17(e.t), fmt_g17(e.position[0]))),
                _ => rows.push(format!(
                    "{r},{},{},{}",
                    fmt_g17(e.t),
                    fmt_g17(e.position[0]),
                    fmt_g17(e.position[1])
                )),
            }
        }
    }
    (header, rows)
}

/// Rows `t,mean_N,var_N,stderr,bound32b,pass` for a trajectory report.
pub fn trajectory_rows(points: &[TrajectoryPoint], bounds: &[f64]) -> (String, Vec<String>) {
    let rows = points
        .iter()
        .zip(bounds)
        .map(|(p, b)| {
            let pass = p.mean <= b + 3.0 * p.stderr;
            format!(
                "{},{},{},{},{},{}",
                fmt_g17(p.t),
                fmt_g17(p.mean),
                fmt_g17(p.variance),
                fmt_g17(p.stderr),
                fmt_g17(*b),
                pass
            )
        })
        .collect();
    ("t,mean_N,var_N,stderr,bound32b,pass".to_string(), rows)
}

/// Rows `t,mean_exp,stderr,bound,pass` for the exponential-moment series.
pub fn exp_moment_rows(points: &[ExpMomentPoint]) -> (String, Vec<String>) {
    let rows = points
        .iter()
        .map(|p| {
            format!(
                "{},{},{},{},{}",
                fmt_g17(p.t),
                fmt_g17(p.mean),
                fmt_g17(p.stderr),
                fmt_g17(p.bound),
                p.pass
            )
        })
        .collect();
    ("t,mean_exp,stderr,bound,pass".to_string(), rows)
}

/// Rows `epsilon,t,sup_error,l1_error,stderr` of a convergence report.
pub fn comparison_rows(report: &ComparisonReport) -> (String, Vec<String>) {
    let mut rows = Vec::new();
    for e in &report.entries {
        for (t, sup, l1, se) in &e.rows {
            rows.push(format!(
                "{},{},{},{},{}",
                fmt_g17(e.eps),
                fmt_g17(*t),
                fmt_g17(*sup),
                fmt_g17(*l1),
                fmt_g17(*se)
            ));
        }
    }
    ("epsilon,t,sup_error,l1_error,stderr".to_string(), rows)
}

/// Rows `bin_lo,bin_hi,g2,stderr` for a pair-correlation estimate.
pub fn pair_correlation_rows(pc: &PairCorrelation) -> (String, Vec<String>) {
    let rows = pc
        .bins
        .iter()
        .zip(pc.g2.iter().zip(&pc.stderr))
        .map(|((lo, hi), (g, se))| {
            format!(
                "{},{},{},{}",
                fmt_g17(*lo),
                fmt_g17(*hi),
                fmt_g17(*g),
                fmt_g17(*se)
            )
        })
        .collect();
    ("bin_lo,bin_hi,g2,stderr".to_string(), rows)
}

/// Write rows produced by one of the row builders.
pub fn emit<P: AsRef<Path>>(path: P, header_rows: (String, Vec<String>)) -> Result<()> {
    write_csv(path, &header_rows.0, header_rows.1)
        .map_err(|e| crate::error::Error::InvalidParameter(format!("io error: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_round_trips_doubles() {
        for v in [1.0 / 3.0, std::f64::consts::PI, 1e-300, -7.5e222, 0.1 + 0.2] {
            let s = fmt_g17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s} did not round-trip");
        }
    }

    #[test]
    fn field_rows_shape() {
        let dom = crate::grid::TorusDomain::new(1, 4.0, 4).unwrap();
        let f = crate::grid::ScalarField::constant(dom, 1.0);
        let (header, rows) = field_rows(&f);
        assert_eq!(header, "index,x,value");
        assert_eq!(rows.len(), 4);
        assert!(rows[0].starts_with("0,5.0000000000000000e-1,"));
    }
}
