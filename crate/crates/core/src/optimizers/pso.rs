use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{config_err, OptimizerError, SearchSpace, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    /// Inertia weight.
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit as a fraction of each dimension's width.
    pub vmax: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams { inertia: 0.7, cognitive: 1.5, social: 1.5, vmax: 0.5 }
    }
}

impl PsoParams {
    pub(super) fn validate(&self) -> Result<(), OptimizerError> {
        let all = [self.inertia, self.cognitive, self.social, self.vmax];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return config_err("PSO parameters must be finite and non-negative");
        }
        Ok(())
    }
}

/// Particle swarm with personal and global bests.
#[derive(Debug, Clone)]
pub struct Swarm {
    pub params: PsoParams,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub personal_best: Vec<Vec<f64>>,
    pub personal_best_fitness: Vec<f64>,
    pub global_best: Vec<f64>,
    pub global_best_fitness: f64,
}

impl Swarm {
    /// Starts from evaluated positions with zero velocity.
    pub fn new(params: PsoParams, positions: Vec<Vec<f64>>, fitness: Vec<f64>) -> Self {
        let dim = positions[0].len();
        let best = argmax(&fitness);
        Swarm {
            params,
            velocities: vec![vec![0.0; dim]; positions.len()],
            personal_best: positions.clone(),
            personal_best_fitness: fitness.clone(),
            global_best: positions[best].clone(),
            global_best_fitness: fitness[best],
            positions,
        }
    }

    /// Moves every particle once: inertia plus cognitive and social pulls,
    /// velocity limited to `±vmax`, position clamped to the box.
    pub fn step<R: Rng + ?Sized>(&mut self, space: &SearchSpace, rng: &mut R) {
        let PsoParams { inertia, cognitive, social, vmax } = self.params;
        for i in 0..self.positions.len() {
            for d in 0..space.dimension() {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let x = self.positions[i][d];
                let limit = vmax * space.width(d);
                let v = inertia * self.velocities[i][d]
                    + cognitive * r1 * (self.personal_best[i][d] - x)
                    + social * r2 * (self.global_best[d] - x);
                let v = v.clamp(-limit, limit);
                self.velocities[i][d] = v;
                self.positions[i][d] = space.clamp(d, x + v);
            }
        }
    }

    /// Updates bests from the fitness of the first `fitness.len()` particles.
    pub fn absorb(&mut self, fitness: &[f64]) {
        for (i, &f) in fitness.iter().enumerate() {
            if f > self.personal_best_fitness[i] {
                self.personal_best[i].clone_from(&self.positions[i]);
                self.personal_best_fitness[i] = f;
            }
            if f > self.global_best_fitness {
                self.global_best.clone_from(&self.positions[i]);
                self.global_best_fitness = f;
            }
        }
    }
}

impl Strategy for Swarm {
    fn propose(&mut self, space: &SearchSpace, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        self.step(space, rng);
        self.positions.clone()
    }

    fn absorb(&mut self, fitness: &[f64]) {
        Swarm::absorb(self, fitness)
    }
}

/// Index of the largest value, first on ties.
pub(super) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
