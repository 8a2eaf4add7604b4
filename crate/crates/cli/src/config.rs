//! JSON run configuration: parsing, strict unknown-key rejection, defaults,
//! and construction of the core model objects.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use repop_core::{
    build_attraction_rate, Method, PatchRegion, Potential, RateField, RhsVariant, TorusDomain,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Kinetic,
    Patches,
    Micro,
    Meso,
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    pub dimension: usize,
    pub side_length: f64,
    pub grid_points_per_side: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialConfig {
    Zero,
    Tophat {
        amplitude: f64,
        radius: f64,
    },
    Gaussian {
        amplitude: f64,
        scale: f64,
        range_cutoff: f64,
    },
    Exponential {
        amplitude: f64,
        scale: f64,
        range_cutoff: f64,
    },
    Tabulated {
        radii: Vec<f64>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        floor_radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        floor_value: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchRegionConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateConfig {
    Constant {
        value: f64,
    },
    Patches {
        patches: Vec<PatchRegionConfig>,
    },
    Sinusoid {
        base: f64,
        amplitude: f64,
    },
    AttractionCenters {
        centers: Vec<Vec<f64>>,
        kernel: Box<PotentialConfig>,
        base: f64,
        cap: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub domain: DomainConfig,
    pub potential: PotentialConfig,
    pub rate: RateConfig,
}

fn default_dt() -> f64 {
    0.01
}

fn default_method() -> String {
    "rk4".into()
}

fn default_rhs() -> String {
    "kinetic".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_rhs")]
    pub rhs_variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

fn default_replicas() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub windows: Vec<WindowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_ladder: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0_surrogate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_bins: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchSection {
    pub b_a: f64,
    pub b_b: f64,
    pub alpha: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonSection {
    pub theta0: f64,
    pub b_bar: f64,
    pub phi_l1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

fn default_out() -> String {
    "out".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub micro: Option<MicroSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patches: Option<PatchSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<HorizonSection>,
    #[serde(default = "default_out")]
    pub output_dir: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Parse a configuration document, rejecting unknown keys in strict mode
/// and relaying module range preconditions.
pub fn parse_config(text: &str, strict: bool) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    if strict {
        check_keys(&value)?;
    }
    let cfg: RunConfig =
        serde_json::from_value(value).map_err(|e| CliError::Parse(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

/// Sections referenced by the chosen subcommand must be present.
fn validate(cfg: &RunConfig) -> Result<()> {
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(CliError::Parse(format!(
                "subcommand {:?} requires the `{what}` section",
                cfg.subcommand
            )))
        }
    };
    match cfg.subcommand {
        Subcommand::Kinetic => {
            need(cfg.model.is_some(), "model")?;
            need(cfg.solver.is_some(), "solver")?;
        }
        Subcommand::Patches => need(cfg.patches.is_some(), "patches")?,
        Subcommand::Micro => {
            need(cfg.model.is_some(), "model")?;
            need(cfg.micro.is_some(), "micro")?;
        }
        Subcommand::Meso => {
            need(cfg.model.is_some(), "model")?;
            need(cfg.solver.is_some(), "solver")?;
            need(cfg.micro.is_some(), "micro")?;
        }
        Subcommand::Horizon => need(cfg.horizon.is_some(), "horizon")?,
    }
    if let Some(solver) = &cfg.solver {
        if !matches!(solver.method.as_str(), "rk4" | "picard") {
            return Err(CliError::Range(format!(
                "solver.method must be rk4 or picard, got `{}`",
                solver.method
            )));
        }
        if !matches!(solver.rhs_variant.as_str(), "kinetic" | "closure") {
            return Err(CliError::Range(format!(
                "solver.rhs_variant must be kinetic or closure, got `{}`",
                solver.rhs_variant
            )));
        }
        // module precondition relayed at parse time
        if let Some(model) = &cfg.model {
            let b_bar = build_rate(&model.rate, &build_domain(&model.domain)?)?.b_bar();
            if solver.dt * b_bar > 0.05 {
                return Err(CliError::Range(format!(
                    "dt * b_bar = {} exceeds 0.05",
                    solver.dt * b_bar
                )));
            }
        }
    }
    Ok(())
}

pub fn build_domain(d: &DomainConfig) -> Result<TorusDomain> {
    TorusDomain::new(d.dimension, d.side_length, d.grid_points_per_side)
        .map_err(|e| CliError::Range(e.to_string()))
}

pub fn build_potential(p: &PotentialConfig) -> Result<Potential> {
    let pot = match p {
        PotentialConfig::Zero => Potential::zero(),
        PotentialConfig::Tophat { amplitude, radius } => Potential::top_hat(*amplitude, *radius)?,
        PotentialConfig::Gaussian {
            amplitude,
            scale,
            range_cutoff,
        } => Potential::gaussian(*amplitude, *scale, *range_cutoff)?,
        PotentialConfig::Exponential {
            amplitude,
            scale,
            range_cutoff,
        } => Potential::exponential(*amplitude, *scale, *range_cutoff)?,
        PotentialConfig::Tabulated {
            radii,
            values,
            floor_radius,
            floor_value,
        } => {
            let floor = match (floor_radius, floor_value) {
                (Some(r), Some(v)) => Some(repop_core::Floor {
                    radius: *r,
                    value: *v,
                }),
                (None, None) => None,
                _ => {
                    return Err(CliError::Parse(
                        "tabulated floor needs both floor_radius and floor_value".into(),
                    ))
                }
            };
            Potential::tabulated(radii.clone(), values.clone(), floor)?
        }
    };
    Ok(pot)
}

fn point_from(v: &[f64]) -> [f64; 2] {
    [
        v.first().copied().unwrap_or(0.0),
        v.get(1).copied().unwrap_or(0.0),
    ]
}

pub fn build_rate(r: &RateConfig, dom: &TorusDomain) -> Result<RateField> {
    let rate = match r {
        RateConfig::Constant { value } => RateField::constant(*value)?,
        RateConfig::Patches { patches } => RateField::patches(
            patches
                .iter()
                .map(|p| PatchRegion {
                    lo: point_from(&p.lo),
                    hi: point_from(&p.hi),
                    value: p.value,
                })
                .collect(),
        )?,
        RateConfig::Sinusoid { base, amplitude } => RateField::sinusoid(*base, *amplitude)?,
        RateConfig::AttractionCenters {
            centers,
            kernel,
            base,
            cap,
        } => {
            let pts: Vec<[f64; 2]> = centers.iter().map(|c| point_from(c)).collect();
            build_attraction_rate(dom, &pts, &build_potential(kernel)?, *base, *cap)?
        }
    };
    Ok(rate)
}

pub fn method_from(s: &str) -> Method {
    match s {
        "picard" => Method::Picard,
        _ => Method::Rk4,
    }
}

pub fn rhs_from(s: &str) -> RhsVariant {
    match s {
        "closure" => RhsVariant::Closure,
        _ => RhsVariant::Kinetic,
    }
}

// ---- strict unknown-key validation ------------------------------------

fn check_keys(root: &Value) -> Result<()> {
    expect_keys(
        root,
        "",
        &[
            "subcommand",
            "model",
            "solver",
            "micro",
            "patches",
            "horizon",
            "output_dir",
            "seed",
        ],
    )?;
    if let Some(model) = root.get("model") {
        expect_keys(model, "model", &["domain", "potential", "rate"])?;
        if let Some(d) = model.get("domain") {
            expect_keys(
                d,
                "model.domain",
                &["dimension", "side_length", "grid_points_per_side"],
            )?;
        }
        if let Some(p) = model.get("potential") {
            check_potential_keys(p, "model.potential")?;
        }
        if let Some(r) = model.get("rate") {
            expect_keys(
                r,
                "model.rate",
                &[
                    "kind",
                    "value",
                    "patches",
                    "base",
                    "amplitude",
                    "centers",
                    "kernel",
                    "cap",
                ],
            )?;
            if let Some(patches) = r.get("patches").and_then(Value::as_array) {
                for (i, p) in patches.iter().enumerate() {
                    expect_keys(
                        p,
                        &format!("model.rate.patches[{i}]"),
                        &["lo", "hi", "value"],
                    )?;
                }
            }
            if let Some(k) = r.get("kernel") {
                check_potential_keys(k, "model.rate.kernel")?;
            }
        }
    }
    if let Some(s) = root.get("solver") {
        expect_keys(
            s,
            "solver",
            &["dt", "t_end", "method", "rhs_variant", "snapshot_times"],
        )?;
    }
    if let Some(m) = root.get("micro") {
        expect_keys(
            m,
            "micro",
            &[
                "seed",
                "replicas",
                "t_end",
                "times",
                "windows",
                "epsilon_ladder",
                "horizon_cap",
                "theta0_surrogate",
                "pair_bins",
            ],
        )?;
        if let Some(ws) = m.get("windows").and_then(Value::as_array) {
            for (i, w) in ws.iter().enumerate() {
                expect_keys(w, &format!("micro.windows[{i}]"), &["lo", "hi"])?;
            }
        }
    }
    if let Some(p) = root.get("patches") {
        expect_keys(
            p,
            "patches",
            &["b_a", "b_b", "alpha", "dt", "t_end", "snapshots"],
        )?;
    }
    if let Some(h) = root.get("horizon") {
        expect_keys(h, "horizon", &["theta0", "b_bar", "phi_l1", "theta"])?;
    }
    Ok(())
}

fn check_potential_keys(p: &Value, path: &str) -> Result<()> {
    expect_keys(
        p,
        path,
        &[
            "kind",
            "amplitude",
            "radius",
            "scale",
            "range_cutoff",
            "radii",
            "values",
            "floor_radius",
            "floor_value",
        ],
    )
}

fn expect_keys(v: &Value, path: &str, allowed: &[&str]) -> Result<()> {
    let Some(obj) = v.as_object() else {
        return Ok(()); // type errors surface during deserialization
    };
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            let full = if path.is_empty() {
                key.clone()
            } else {
                format!("{path}.{key}")
            };
            return Err(CliError::UnknownKey(full));
        }
    }
    Ok(())
}
