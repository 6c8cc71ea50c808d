//! Real-coded genetic algorithm with elitism.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub stall_generation_limit: usize,
    pub fitness_target: f64,
    pub tol_con: f64,
    pub tol_fun: f64,
    pub elitism: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Initial standard deviation of Gaussian mutation; shrinks linearly
    /// over the run.
    pub mutation_scale: f64,
    /// Genes of the initial population are drawn from `[-init_range, init_range]`.
    pub init_range: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 30,
            generations: 20,
            stall_generation_limit: 100,
            fitness_target: 1e-20,
            tol_con: 1e-20,
            tol_fun: 1e-18,
            elitism: 2,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            mutation_scale: 1.0,
            init_range: 5.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be at least 2".into()));
        }
        if self.elitism >= self.population_size {
            return Err(Error::Config("elitism must be below population_size".into()));
        }
        for (name, r) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {r}")));
            }
        }
        if !(self.mutation_scale >= 0.0 && self.mutation_scale.is_finite()) {
            return Err(Error::Config("mutation_scale must be finite and non-negative".into()));
        }
        if !(self.init_range > 0.0 && self.init_range.is_finite()) {
            return Err(Error::Config("init_range must be finite and positive".into()));
        }
        if self.tol_fun < 0.0 || self.tol_con < 0.0 || self.fitness_target.is_nan() {
            return Err(Error::Config("tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaStop {
    FitnessTarget,
    Generations,
    Stall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub best: Vec<f64>,
    pub best_fitness: f64,
    /// Best fitness of each generation, starting with the initial population.
    pub trace: Vec<f64>,
    pub generations: usize,
    pub evaluations: usize,
    pub rejected: usize,
    pub stop: GaStop,
}

fn stream(seed: u64, generation: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | index as u64);
    rng
}

fn evaluate<F>(fitness: &F, pop: &[Vec<f64>]) -> (Vec<f64>, usize)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let raw: Vec<f64> = pop.par_iter().map(|x| fitness(x)).collect();
    let mut rejected = 0;
    let scores = raw
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            if f.is_finite() {
                f
            } else {
                log::warn!("candidate {i} rejected: fitness {f}");
                rejected += 1;
                f64::INFINITY
            }
        })
        .collect();
    (scores, rejected)
}

/// Indices sorted by fitness, ties broken by index.
fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    idx
}

/// Minimize `fitness` over `dim` real genes.
pub fn ga_optimize<F>(fitness: F, dim: usize, cfg: &GaConfig) -> Result<GaResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    ga_optimize_from(fitness, dim, cfg, &[])
}

/// As [`ga_optimize`], with `initial` individuals replacing the first random
/// members of the starting population.
pub fn ga_optimize_from<F>(fitness: F, dim: usize, cfg: &GaConfig, initial: &[Vec<f64>]) -> Result<GaResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    if dim == 0 {
        return Err(Error::Domain("search space has no dimensions".into()));
    }
    let n = cfg.population_size;
    let mut pop: Vec<Vec<f64>> = (0..n)
        .map(|i| match initial.get(i) {
            Some(x) if x.len() == dim => Ok(x.clone()),
            Some(x) => Err(Error::Shape { expected: dim, got: x.len() }),
            None => {
                let mut rng = stream(cfg.seed, 0, i);
                Ok((0..dim)
                    .map(|_| rng.random_range(-cfg.init_range..=cfg.init_range))
                    .collect())
            }
        })
        .collect::<Result<_>>()?;
    let (mut scores, mut rejected) = evaluate(&fitness, &pop);
    let mut evaluations = n;
    let mut order = ranking(&scores);
    let mut trace = vec![scores[order[0]]];
    let mut stall = 0;
    let mut generation = 0;

    let stop = loop {
        let best = scores[order[0]];
        if best <= cfg.fitness_target {
            break GaStop::FitnessTarget;
        }
        if generation >= cfg.generations {
            break GaStop::Generations;
        }
        if stall >= cfg.stall_generation_limit {
            break GaStop::Stall;
        }
        generation += 1;
        let sigma = cfg.mutation_scale * (1.0 - (generation - 1) as f64 / cfg.generations as f64);
        let normal = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).expect("finite sigma");

        let mut next: Vec<Vec<f64>> = order[..cfg.elitism].iter().map(|&i| pop[i].clone()).collect();
        let mut next_scores: Vec<f64> = order[..cfg.elitism].iter().map(|&i| scores[i]).collect();
        let children: Vec<Vec<f64>> = (cfg.elitism..n)
            .map(|i| {
                let mut rng = stream(cfg.seed, generation, i);
                let mut pick = || {
                    let a = rng.random_range(0..n);
                    let b = rng.random_range(0..n);
                    if scores[a] <= scores[b] {
                        a
                    } else {
                        b
                    }
                };
                let (p, q) = (pick(), pick());
                let mut child = pop[p].clone();
                if rng.random::<f64>() < cfg.crossover_rate {
                    for (g, &other) in child.iter_mut().zip(&pop[q]) {
                        if rng.random::<bool>() {
                            *g = other;
                        }
                    }
                }
                for g in child.iter_mut() {
                    if rng.random::<f64>() < cfg.mutation_rate {
                        *g += normal.sample(&mut rng);
                    }
                }
                child
            })
            .collect();
        let (child_scores, r) = evaluate(&fitness, &children);
        rejected += r;
        evaluations += children.len();
        next.extend(children);
        next_scores.extend(child_scores);
        pop = next;
        scores = next_scores;
        order = ranking(&scores);

        let new_best = scores[order[0]];
        if best - new_best > cfg.tol_fun {
            stall = 0;
        } else {
            stall += 1;
        }
        trace.push(new_best);
    };

    Ok(GaResult {
        best: pop[order[0]].clone(),
        best_fitness: scores[order[0]],
        trace,
        generations: generation,
        evaluations,
        rejected,
        stop,
    })
}
