//! Population-based optimizers over a box-bounded search space.
//!
//! Every algorithm runs the same loop: sample an initial population
//! uniformly, evaluate it, then repeatedly propose trial points, evaluate
//! them and let the algorithm select what survives, until the evaluation
//! budget is spent. Fitness is maximized.
//!
//! All random draws of a generation happen in `propose`, before any
//! evaluation. Evaluations of one generation run in parallel on the current
//! rayon pool and their results are consumed in population order, so the
//! thread count never changes the outcome.

mod acor;
mod bat;
mod pso;

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use acor::{aco_r_sample, rank_probabilities, AcoR, AcoRParams, SolutionArchive};
pub use bat::{BatColony, BatParams};
pub use pso::{PsoParams, Swarm};

#[derive(Debug, Error, PartialEq)]
pub enum OptimizerError {
    #[error("invalid optimizer configuration: {0}")]
    Config(String),
    #[error("objective returned non-finite value {value} at evaluation {index}")]
    Evaluation { value: f64, index: usize },
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, OptimizerError> {
    Err(OptimizerError::Config(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, OptimizerError> {
        if lower.is_empty() {
            return config_err("search space needs at least one dimension");
        }
        if lower.len() != upper.len() {
            return config_err("lower and upper bounds differ in length");
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u)) {
            return config_err("every lower bound must be finite and below its upper bound");
        }
        Ok(SearchSpace { lower, upper })
    }

    /// `[0, 1]^dimension`.
    pub fn unit(dimension: usize) -> Result<Self, OptimizerError> {
        Self::new(vec![0.0; dimension], vec![1.0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    pub fn clamp(&self, d: usize, x: f64) -> f64 {
        x.clamp(self.lower[d], self.upper[d])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter().enumerate().all(|(d, v)| self.lower[d] <= *v && *v <= self.upper[d])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dimension())
            .map(|d| self.lower[d] + rng.random::<f64>() * self.width(d))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Algorithm {
    Pso(PsoParams),
    Bat(BatParams),
    #[serde(rename = "acor")]
    AcoR(AcoRParams),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Pso(_) => "pso",
            Algorithm::Bat(_) => "bat",
            Algorithm::AcoR(_) => "acor",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    /// Algorithm with its default parameters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pso" => Ok(Algorithm::Pso(PsoParams::default())),
            "bat" | "ba" => Ok(Algorithm::Bat(BatParams::default())),
            "acor" | "aco" | "aco_r" => Ok(Algorithm::AcoR(AcoRParams::default())),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub population_size: usize,
    pub max_evaluations: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
}

impl OptimizerConfig {
    pub fn new(algorithm: Algorithm, population_size: usize, max_evaluations: usize, seed: u64) -> Self {
        OptimizerConfig { population_size, max_evaluations, seed, algorithm }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.population_size < 2 {
            return config_err("population size must be at least 2");
        }
        if self.max_evaluations < self.population_size {
            return config_err("evaluation budget must cover the initial population");
        }
        match &self.algorithm {
            Algorithm::Pso(p) => p.validate(),
            Algorithm::Bat(p) => p.validate(),
            Algorithm::AcoR(p) => p.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// Best fitness seen so far, one entry per generation (the initial
    /// population is generation 0).
    pub best_fitness_by_generation: Vec<f64>,
    /// Cumulative evaluations at the end of each generation.
    pub evaluations_by_generation: Vec<usize>,
    pub evaluations_used: usize,
    pub wall_time: Duration,
}

impl RunTrace {
    pub fn generations(&self) -> usize {
        self.best_fitness_by_generation.len()
    }

    /// CSV with columns `generation,best_fitness,evaluations`.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["generation", "best_fitness", "evaluations"])?;
        for (g, (f, e)) in self
            .best_fitness_by_generation
            .iter()
            .zip(&self.evaluations_by_generation)
            .enumerate()
        {
            wtr.write_record([g.to_string(), f.to_string(), e.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best_genotype: Vec<f64>,
    pub best_fitness: f64,
    pub trace: RunTrace,
}

/// An evaluation callback. Besides the fitness it may hand back a
/// candidate record, which the driver forwards to the caller's sink in
/// evaluation order.
pub trait Problem: Sync {
    type Candidate: Send;

    fn evaluate(&self, point: &[f64]) -> (f64, Self::Candidate);
}

impl<F> Problem for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    type Candidate = ();

    fn evaluate(&self, point: &[f64]) -> (f64, ()) {
        (self(point), ())
    }
}

/// Algorithm-specific state driven by [`run_with_sink`].
trait Strategy {
    /// Trial points for the next generation. All randomness is drawn here.
    fn propose(&mut self, space: &SearchSpace, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>>;

    /// Fitness of a prefix of the last proposal (shorter only when the
    /// budget runs out).
    fn absorb(&mut self, fitness: &[f64]);
}

pub fn run<F>(space: &SearchSpace, objective: &F, config: &OptimizerConfig) -> Result<RunOutcome, OptimizerError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    run_with_sink(space, objective, config, |_| {})
}

pub fn run_with_sink<P, S>(
    space: &SearchSpace,
    problem: &P,
    config: &OptimizerConfig,
    mut sink: S,
) -> Result<RunOutcome, OptimizerError>
where
    P: Problem,
    S: FnMut(P::Candidate),
{
    config.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut used = 0usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluate = |points: &[Vec<f64>], used: &mut usize, best: &mut Option<(Vec<f64>, f64)>| {
        let results: Vec<(f64, P::Candidate)> =
            points.par_iter().map(|p| problem.evaluate(p)).collect();
        let mut fitness = Vec::with_capacity(results.len());
        for (point, (f, candidate)) in points.iter().zip(results) {
            if !f.is_finite() {
                return Err(OptimizerError::Evaluation { value: f, index: *used });
            }
            *used += 1;
            sink(candidate);
            if best.as_ref().is_none_or(|(_, b)| f > *b) {
                *best = Some((point.clone(), f));
            }
            fitness.push(f);
        }
        Ok(fitness)
    };

    let population: Vec<Vec<f64>> =
        (0..config.population_size).map(|_| space.sample(&mut rng)).collect();
    let fitness = evaluate(&population, &mut used, &mut best)?;

    let mut strategy: Box<dyn Strategy> = match &config.algorithm {
        Algorithm::Pso(p) => Box::new(Swarm::new(p.clone(), population, fitness)),
        Algorithm::Bat(p) => Box::new(BatColony::new(p.clone(), population, fitness)),
        Algorithm::AcoR(p) => Box::new(AcoR::new(p.clone(), population, fitness)),
    };

    let best_fitness = |best: &Option<(Vec<f64>, f64)>| best.as_ref().map(|b| b.1).unwrap_or(f64::NEG_INFINITY);
    let mut trace = RunTrace {
        best_fitness_by_generation: vec![best_fitness(&best)],
        evaluations_by_generation: vec![used],
        evaluations_used: used,
        wall_time: Duration::ZERO,
    };

    while used < config.max_evaluations {
        let mut trials = strategy.propose(space, &mut rng);
        trials.truncate(config.max_evaluations - used);
        let fitness = evaluate(&trials, &mut used, &mut best)?;
        strategy.absorb(&fitness);
        trace.best_fitness_by_generation.push(best_fitness(&best));
        trace.evaluations_by_generation.push(used);
    }

    trace.evaluations_used = used;
    trace.wall_time = start.elapsed();
    let (best_genotype, best_fitness) = best.expect("initial population was evaluated");
    Ok(RunOutcome { best_genotype, best_fitness, trace })
}
