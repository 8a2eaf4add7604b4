//! Immigration intensity fields `b(x)` with `0 <= b <= b_bar`.

use crate::error::{Error, Result};
use crate::grid::{Point, ScalarField, TorusDomain};
use crate::potential::Potential;

/// An axis-aligned box carrying a constant rate; zero outside all patches.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchRegion {
    pub lo: Point,
    pub hi: Point,
    pub value: f64,
}

impl PatchRegion {
    fn contains(&self, x: Point, dim: usize) -> bool {
        (0..dim).all(|k| x[k] >= self.lo[k] && x[k] < self.hi[k])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateField {
    Constant {
        value: f64,
    },
    /// First containing patch wins; zero outside every patch.
    Patches {
        patches: Vec<PatchRegion>,
    },
    /// `base + amplitude * sin(2 pi x_0 / L)` along the first axis.
    Sinusoid {
        base: f64,
        amplitude: f64,
    },
    /// Grid samples; evaluation looks up the containing cell.
    Tabulated {
        field: ScalarField,
    },
}

impl RateField {
    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::AssumptionViolation(format!(
                "constant rate {value} must be finite and nonnegative"
            )));
        }
        Ok(Self::Constant { value })
    }

    pub fn patches(patches: Vec<PatchRegion>) -> Result<Self> {
        for p in &patches {
            if !p.value.is_finite() || p.value < 0.0 {
                return Err(Error::AssumptionViolation(format!(
                    "patch rate {} must be finite and nonnegative",
                    p.value
                )));
            }
        }
        Ok(Self::Patches { patches })
    }

    pub fn sinusoid(base: f64, amplitude: f64) -> Result<Self> {
        if !base.is_finite() || !amplitude.is_finite() || base < amplitude.abs() {
            return Err(Error::AssumptionViolation(format!(
                "sinusoid needs base >= |amplitude| to stay nonnegative (base {base}, amplitude {amplitude})"
            )));
        }
        Ok(Self::Sinusoid { base, amplitude })
    }

    pub fn tabulated(field: ScalarField) -> Result<Self> {
        if let Some((cell, &value)) = field
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::NegativeDensity { cell, value });
        }
        Ok(Self::Tabulated { field })
    }

    /// Upper bound `b_bar`.
    pub fn b_bar(&self) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Patches { patches } => patches.iter().map(|p| p.value).fold(0.0, f64::max),
            Self::Sinusoid { base, amplitude } => base + amplitude.abs(),
            Self::Tabulated { field } => field.max().max(0.0),
        }
    }

    /// Evaluate at a position; the domain supplies the period of the sinusoid
    /// and wraps the lookup of tabulated fields.
    pub fn eval(&self, dom: &TorusDomain, x: Point) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Patches { patches } => patches
                .iter()
                .find(|p| p.contains(x, dom.dim()))
                .map_or(0.0, |p| p.value),
            Self::Sinusoid { base, amplitude } => {
                base + amplitude * (2.0 * std::f64::consts::PI * x[0] / dom.side()).sin()
            }
            Self::Tabulated { field } => field.at(x),
        }
    }

    /// Cell-centered samples on the grid.
    pub fn discretize(&self, dom: &TorusDomain) -> ScalarField {
        match self {
            Self::Tabulated { field } if field.domain() == *dom => field.clone(),
            _ => ScalarField::from_fn(*dom, |x| self.eval(dom, x)),
        }
    }

    /// Multiply the intensity by `factor` everywhere.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Self::Constant { value } => Self::Constant {
                value: value * factor,
            },
            Self::Patches { patches } => Self::Patches {
                patches: patches
                    .iter()
                    .map(|p| PatchRegion {
                        lo: p.lo,
                        hi: p.hi,
                        value: p.value * factor,
                    })
                    .collect(),
            },
            Self::Sinusoid { base, amplitude } => Self::Sinusoid {
                base: base * factor,
                amplitude: amplitude * factor,
            },
            Self::Tabulated { field } => Self::Tabulated {
                field: field.map(|v| v * factor),
            },
        }
    }
}

/// Environment-driven rate `b(x) = min(cap, base * exp(sum_y Phi(x - y)))`
/// sampled on the grid, with `y` running over the attraction centers.
///
/// The cap keeps the field bounded, as the standing assumptions require.
/// An empty center list is fine and yields the constant field `base`.
pub fn build_attraction_rate(
    dom: &TorusDomain,
    centers: &[Point],
    kernel: &Potential,
    base: f64,
    cap: f64,
) -> Result<RateField> {
    if !base.is_finite() || base < 0.0 {
        return Err(Error::AssumptionViolation(format!(
            "base rate {base} must be finite and nonnegative"
        )));
    }
    if !(cap >= base) {
        return Err(Error::AssumptionViolation(format!(
            "cap {cap} must be at least the base rate {base}"
        )));
    }
    if centers.is_empty() {
        return RateField::constant(base);
    }
    let field = ScalarField::from_fn(*dom, |x| {
        let s: f64 = centers
            .iter()
            .map(|y| kernel.eval(dom.min_image([x[0] - y[0], x[1] - y[1]]), dom.dim()))
            .sum();
        (base * s.exp()).min(cap)
    });
    RateField::tabulated(field)
}
