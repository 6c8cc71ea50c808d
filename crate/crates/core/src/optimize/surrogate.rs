//! GA-then-SQP fitting of the four kinematic curve surrogates.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ga::{ga_optimize, GaConfig, GaResult};
use super::nn::{Architecture, Chromosome, CurveFit};
use super::sqp::{sqp_refine, RefineConfig, StopReason};
use super::Objective;
use crate::error::{Error, Result};
use crate::kinematics::DeploymentProfile;

/// Four curves sampled on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDataset {
    pub t: Vec<f64>,
    /// LV, AV, LA, AA.
    pub curves: [Vec<f64>; 4],
    /// Factors the stored curves were divided by.
    pub scales: [f64; 4],
    pub time_scale: f64,
}

impl CurveDataset {
    pub fn new(t: Vec<f64>, curves: [Vec<f64>; 4]) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::Domain("dataset is empty".into()));
        }
        for c in &curves {
            if c.len() != t.len() {
                return Err(Error::Shape { expected: t.len(), got: c.len() });
            }
        }
        if t.iter().chain(curves.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("dataset has non-finite samples".into()));
        }
        Ok(CurveDataset { t, curves, scales: [1.0; 4], time_scale: 1.0 })
    }

    /// Curves of point `label`, with time mapped to [0, 1] and each curve
    /// divided by its largest magnitude.
    pub fn from_profile(profile: &DeploymentProfile, label: &str) -> Result<Self> {
        let c = profile.curves(label)?;
        let time_scale = if profile.total_duration > 0.0 { profile.total_duration } else { 1.0 };
        let t = c.t.iter().map(|v| v / time_scale).collect();
        let mut ds = CurveDataset::new(
            t,
            [c.linear_velocity, c.angular_velocity, c.linear_acceleration, c.angular_acceleration],
        )?;
        ds.time_scale = time_scale;
        for (curve, scale) in ds.curves.iter_mut().zip(ds.scales.iter_mut()) {
            let m = curve.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if m > 0.0 {
                *scale = m;
                curve.iter_mut().for_each(|v| *v /= m);
            }
        }
        Ok(ds)
    }

    /// Sample the networks of `w` on `t`.
    pub fn from_chromosome(w: &Chromosome, t: Vec<f64>) -> Result<Self> {
        let mut curves: [Vec<f64>; 4] = Default::default();
        for &ti in &t {
            for (c, y) in curves.iter_mut().zip(w.forward(ti)) {
                c.push(y);
            }
        }
        CurveDataset::new(t, curves)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateConfig {
    pub arch: Architecture,
    pub ga: GaConfig,
    pub refine: RefineConfig,
    pub runs: usize,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig {
            arch: Architecture::default(),
            ga: GaConfig::default(),
            refine: RefineConfig::default(),
            runs: 10,
        }
    }
}

/// Storage record of one GA + refinement run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub ga_fitness: f64,
    pub fitness: f64,
    pub block_fitness: [f64; 4],
    pub generations: usize,
    pub ga_evaluations: usize,
    pub refine_evaluations: usize,
    pub refine_stop: [StopReason; 4],
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateFit {
    pub chromosome: Chromosome,
    /// Sum of the four block errors.
    pub fitness: f64,
    pub block_fitness: [f64; 4],
    pub best_run: usize,
    pub ga_trace: Vec<f64>,
    pub refine_traces: [Vec<f64>; 4],
    pub runs: Vec<RunRecord>,
    pub warnings: Vec<String>,
}

fn run_seed(base: u64, run: usize) -> u64 {
    base.wrapping_add((run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct RunOutput {
    record: RunRecord,
    chromosome: Chromosome,
    ga: GaResult,
    traces: [Vec<f64>; 4],
}

fn single_run(fits: &[CurveFit; 4], cfg: &SurrogateConfig, run: usize) -> Result<RunOutput> {
    let start = Instant::now();
    let arch = cfg.arch;
    let block = arch.block_len();
    let seed = run_seed(cfg.ga.seed, run);
    let ga_cfg = GaConfig { seed, ..cfg.ga.clone() };
    let total = |w: &[f64]| -> f64 {
        fits.iter()
            .enumerate()
            .map(|(i, f)| f.value(&w[i * block..(i + 1) * block]))
            .sum()
    };
    let ga = ga_optimize(total, 4 * block, &ga_cfg)?;

    let mut genes = ga.best.clone();
    let mut block_fitness = [0.0; 4];
    let mut stops = [StopReason::MaxIterations; 4];
    let mut traces: [Vec<f64>; 4] = Default::default();
    let mut refine_evaluations = 0;
    for (i, fit) in fits.iter().enumerate() {
        let x0 = &ga.best[i * block..(i + 1) * block];
        let r = sqp_refine(fit, x0, &[], &cfg.refine)?;
        genes[i * block..(i + 1) * block].copy_from_slice(&r.x);
        block_fitness[i] = r.fitness;
        stops[i] = r.stop;
        refine_evaluations += r.function_evals;
        traces[i] = r.trace;
    }
    let fitness = block_fitness.iter().sum();
    Ok(RunOutput {
        record: RunRecord {
            run,
            seed,
            ga_fitness: ga.best_fitness,
            fitness,
            block_fitness,
            generations: ga.generations,
            ga_evaluations: ga.evaluations,
            refine_evaluations,
            refine_stop: stops,
            elapsed: start.elapsed(),
        },
        chromosome: Chromosome { arch, genes },
        ga,
        traces,
    })
}

/// Fit one network per curve: a GA over the whole chromosome, then an
/// independent refinement of each block from the GA best. Repeats `runs`
/// times and keeps the lowest total error.
pub fn fit_kinematics_surrogate(dataset: &CurveDataset, cfg: &SurrogateConfig) -> Result<SurrogateFit> {
    if dataset.is_empty() {
        return Err(Error::Domain("dataset is empty".into()));
    }
    if cfg.runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    if cfg.arch.hidden == 0 {
        return Err(Error::Config("architecture needs at least one hidden neuron".into()));
    }
    cfg.ga.validate()?;
    cfg.refine.validate()?;
    let mut warnings = Vec::new();
    if dataset.len() < cfg.arch.block_len() {
        let msg = format!(
            "{} samples for {} parameters per curve: the fit is underdetermined",
            dataset.len(),
            cfg.arch.block_len()
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let fits: Vec<CurveFit> = dataset
        .curves
        .iter()
        .map(|y| CurveFit::new(cfg.arch, dataset.t.clone(), y.clone()))
        .collect::<Result<_>>()?;
    let fits: [CurveFit; 4] = fits.try_into().map_err(|_| Error::Shape { expected: 4, got: 0 })?;

    let outputs: Vec<RunOutput> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| single_run(&fits, cfg, run))
        .collect::<Result<_>>()?;
    let best = outputs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.record.fitness.total_cmp(&b.1.record.fitness).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("at least one run");
    let runs = outputs.iter().map(|o| o.record.clone()).collect();
    let out = &outputs[best];
    Ok(SurrogateFit {
        chromosome: out.chromosome.clone(),
        fitness: out.record.fitness,
        block_fitness: out.record.block_fitness,
        best_run: best,
        ga_trace: out.ga.trace.clone(),
        refine_traces: out.traces.clone(),
        runs,
        warnings,
    })
}
