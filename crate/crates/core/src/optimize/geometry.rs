//! Ring radius and link scale chosen to minimize the natural frequency.

use serde::{Deserialize, Serialize};

use super::sqp::{sqp_refine, RefineConfig, StopReason};
use super::{Constraint, FnConstraint, FnObjective, LowerBound, UpperBound};
use crate::dynamics::{natural_frequency, relative_difference, DynamicParams};
use crate::error::{Error, Result};
use crate::geometry::{stretched_length, AntennaDesign};

/// How the per-unit mass follows the design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MassModel {
    /// `m = linear_density * total link length`.
    LinkLength { linear_density: f64 },
    /// Mass independent of the design.
    Constant { mass: f64 },
}

impl Default for MassModel {
    fn default() -> Self {
        MassModel::LinkLength { linear_density: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryProblem {
    pub baseline: AntennaDesign,
    pub r_min: f64,
    pub r_max: f64,
    pub scale_min: f64,
    pub scale_max: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub stiffness: f64,
    pub mass_model: MassModel,
    pub refine: RefineConfig,
}

impl Default for GeometryProblem {
    fn default() -> Self {
        GeometryProblem {
            baseline: AntennaDesign::baseline(true),
            r_min: 12.5,
            r_max: 25.0,
            scale_min: 0.9,
            scale_max: 1.1,
            f_lo: 0.02,
            f_hi: 0.03,
            stiffness: 1.0,
            mass_model: MassModel::default(),
            refine: RefineConfig {
                tol_con: 1e-9,
                tol_fun: 1e-15,
                tol_x: 1e-12,
                feasible_iterates: true,
                ..RefineConfig::default()
            },
        }
    }
}

impl GeometryProblem {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.r_min, self.r_max, self.scale_min, self.scale_max, self.f_lo, self.f_hi, self.stiffness]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("geometry problem has non-finite bounds".into()));
        }
        if !(self.r_min > 0.0) || self.r_max < self.r_min {
            return Err(Error::Config(format!(
                "radius bounds [{}, {}] are invalid",
                self.r_min, self.r_max
            )));
        }
        if !(self.scale_min > 0.0) || self.scale_max < self.scale_min {
            return Err(Error::Config("link scale bounds are invalid".into()));
        }
        if !(self.f_lo < self.f_hi) || self.f_lo < 0.0 {
            return Err(Error::Config(format!(
                "frequency window [{}, {}] is invalid",
                self.f_lo, self.f_hi
            )));
        }
        if !(self.stiffness > 0.0) {
            return Err(Error::Config("stiffness must be positive".into()));
        }
        match self.mass_model {
            MassModel::LinkLength { linear_density: v } | MassModel::Constant { mass: v } if v > 0.0 && v.is_finite() => {
                Ok(())
            }
            _ => Err(Error::Config("mass model parameter must be positive".into())),
        }
    }

    /// Design with ring radius `r` and every link scaled by `s`.
    pub fn design(&self, r: f64, s: f64) -> Result<AntennaDesign> {
        let b = &self.baseline;
        let mut d = AntennaDesign::new(
            2.0 * r,
            b.unit_count,
            b.with_links,
            b.unit.deployed_angle_deg,
            b.unit.stowed_angle_deg,
        )?;
        let chord = d.unit.stretched_length;
        d.unit = d.unit.scaled(s);
        d.unit.stretched_length = chord;
        Ok(d)
    }

    pub fn dynamic_params(&self, r: f64, s: f64) -> Result<DynamicParams> {
        let d = self.design(r, s)?;
        let mass = match self.mass_model {
            MassModel::LinkLength { linear_density } => linear_density * d.unit.total_link_length(),
            MassModel::Constant { mass } => mass,
        };
        Ok(DynamicParams {
            mass,
            stiffness: self.stiffness,
            ring_radius: r,
            unit_length: stretched_length(2.0 * r, d.unit_count)?,
            unit_count: d.unit_count,
            ..DynamicParams::default()
        })
    }

    pub fn frequency(&self, r: f64, s: f64) -> Result<f64> {
        Ok(natural_frequency(&self.dynamic_params(r, s)?)?.f_n)
    }

    fn frequency_or_nan(&self, x: &[f64]) -> f64 {
        self.frequency(x[0], x[1]).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintStatus {
    pub name: String,
    /// Signed slack; negative means violated.
    pub slack: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryOutcome {
    pub design: AntennaDesign,
    pub radius: f64,
    pub link_scale: f64,
    pub frequency_hz: f64,
    pub mass: f64,
    pub start: [f64; 2],
    pub start_frequency_hz: f64,
    pub baseline_frequency_hz: f64,
    /// Objective at each accepted iterate.
    pub trace: Vec<f64>,
    pub constraints: Vec<ConstraintStatus>,
    pub iterations: usize,
    pub function_evals: usize,
    pub stop: StopReason,
    pub converged: bool,
    /// The objective does not vary over the box; no optimization was run.
    pub flat_objective: bool,
    pub warnings: Vec<String>,
}

/// Minimize the natural frequency over `x = [R, s]` subject to the radius
/// floor, the frequency window and the box bounds.
pub fn optimize_geometry(p: &GeometryProblem) -> Result<GeometryOutcome> {
    p.validate()?;
    // f_n decreases in both R and s under either mass model.
    let f_max = p.frequency(p.r_min, p.scale_min)?;
    let f_min = p.frequency(p.r_max, p.scale_max)?;
    if f_max < p.f_lo - p.refine.tol_con || f_min > p.f_hi + p.refine.tol_con {
        return Err(Error::Infeasible(format!(
            "frequency window [{}, {}] Hz unreachable: f_n spans [{f_min:.6}, {f_max:.6}] Hz for R in [{}, {}] m",
            p.f_lo, p.f_hi, p.r_min, p.r_max
        )));
    }

    let mut warnings = Vec::new();
    let flat = (f_max - f_min).abs() <= p.refine.tol_fun.max(f64::EPSILON) * f_max.abs().max(1.0) * 16.0;
    let start = if flat {
        let msg = "natural frequency does not depend on the design variables under this mass model; nothing to optimize".to_string();
        log::warn!("{msg}");
        warnings.push(msg);
        [p.baseline.radius().clamp(p.r_min, p.r_max), 1.0f64.clamp(p.scale_min, p.scale_max)]
    } else {
        feasible_start(p)?
    };
    let start_frequency_hz = p.frequency(start[0], start[1])?;

    let lo = LowerBound { index: 0, bound: p.r_min };
    let hi = UpperBound { index: 0, bound: p.r_max };
    let s_lo = LowerBound { index: 1, bound: p.scale_min };
    let s_hi = UpperBound { index: 1, bound: p.scale_max };
    let f_lo = FnConstraint::new("f_n >= f_lo", |x: &[f64]| p.frequency_or_nan(x) - p.f_lo);
    let f_hi = FnConstraint::new("f_n <= f_hi", |x: &[f64]| p.f_hi - p.frequency_or_nan(x));
    let cons: [&dyn Constraint; 6] = [&lo, &hi, &s_lo, &s_hi, &f_lo, &f_hi];

    let (x, trace, iterations, function_evals, stop, converged) = if flat {
        (start.to_vec(), vec![start_frequency_hz], 0, 0, StopReason::FunctionTolerance, true)
    } else {
        let obj = FnObjective::new(2, |x: &[f64]| p.frequency_or_nan(x));
        let r = sqp_refine(&obj, &start, &cons, &p.refine)?;
        (r.x, r.trace, r.iterations, r.function_evals, r.stop, r.converged)
    };

    let constraints: Vec<ConstraintStatus> = cons
        .iter()
        .map(|c| {
            let slack = c.value(&x);
            ConstraintStatus {
                name: c.name(),
                slack,
                satisfied: slack >= -p.refine.tol_con,
            }
        })
        .collect();
    let params = p.dynamic_params(x[0], x[1])?;
    Ok(GeometryOutcome {
        design: p.design(x[0], x[1])?,
        radius: x[0],
        link_scale: x[1],
        frequency_hz: natural_frequency(&params)?.f_n,
        mass: params.mass,
        start,
        start_frequency_hz,
        baseline_frequency_hz: p.frequency(p.baseline.radius(), 1.0)?,
        trace,
        constraints,
        iterations,
        function_evals,
        stop,
        converged,
        flat_objective: flat,
        warnings,
    })
}

/// Point on the diagonal of the box whose frequency is the window midpoint,
/// clamped to the window.
fn feasible_start(p: &GeometryProblem) -> Result<[f64; 2]> {
    let at = |t: f64| {
        [
            p.r_min + t * (p.r_max - p.r_min),
            p.scale_min + t * (p.scale_max - p.scale_min),
        ]
    };
    let target = 0.5 * (p.f_lo + p.f_hi);
    let f = |t: f64| -> Result<f64> {
        let x = at(t);
        p.frequency(x[0], x[1])
    };
    if f(0.0)? <= target {
        return Ok(at(0.0));
    }
    if f(1.0)? >= target {
        return Ok(at(1.0));
    }
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if f(m)? > target {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(at(0.5 * (a + b)))
}

/// Relative difference of a predicted frequency against a simulated one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyComparison {
    pub predicted_hz: f64,
    pub simulated_hz: f64,
    pub relative_difference: f64,
    pub percent: f64,
}

pub fn compare_frequencies(predicted_hz: f64, simulated_hz: f64) -> Result<FrequencyComparison> {
    if !(simulated_hz != 0.0 && simulated_hz.is_finite() && predicted_hz.is_finite()) {
        return Err(Error::Domain(format!(
            "cannot compare {predicted_hz} Hz against {simulated_hz} Hz"
        )));
    }
    let rel = relative_difference(predicted_hz, simulated_hz);
    Ok(FrequencyComparison {
        predicted_hz,
        simulated_hz,
        relative_difference: rel,
        percent: 100.0 * rel,
    })
}
