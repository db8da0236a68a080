use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pso::argmax;
use super::{config_err, OptimizerError, SearchSpace, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatParams {
    pub frequency_min: f64,
    pub frequency_max: f64,
    /// Initial loudness `A₀`.
    pub loudness: f64,
    /// Initial pulse rate `r₀`.
    pub pulse_rate: f64,
    /// Loudness decay factor applied on every accepted move.
    pub alpha: f64,
    /// Pulse-rate decay exponent: after `k` accepted moves `r = r₀·exp(−γk)`.
    pub gamma: f64,
    /// Local walk radius per unit of mean loudness, as a fraction of each
    /// dimension's width.
    pub walk_scale: f64,
}

impl Default for BatParams {
    fn default() -> Self {
        BatParams {
            frequency_min: 0.0,
            frequency_max: 2.0,
            loudness: 1.0,
            pulse_rate: 0.5,
            alpha: 0.9,
            gamma: 0.9,
            walk_scale: 0.1,
        }
    }
}

impl BatParams {
    pub(super) fn validate(&self) -> Result<(), OptimizerError> {
        let all = [
            self.frequency_min,
            self.frequency_max,
            self.loudness,
            self.pulse_rate,
            self.alpha,
            self.gamma,
            self.walk_scale,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return config_err("bat parameters must be finite");
        }
        if self.frequency_min > self.frequency_max {
            return config_err("bat frequency_min exceeds frequency_max");
        }
        if !(0.0..=1.0).contains(&self.pulse_rate) || self.loudness < 0.0 {
            return config_err("bat pulse rate must lie in [0,1] and loudness be non-negative");
        }
        if !(0.0..=1.0).contains(&self.alpha) || self.gamma < 0.0 || self.walk_scale < 0.0 {
            return config_err("bat alpha must lie in [0,1], gamma and walk_scale be non-negative");
        }
        Ok(())
    }
}

/// Bat algorithm state: frequency-tuned velocities, a loudness-gated
/// acceptance test and a pulse-rate-gated local walk around the best bat.
#[derive(Debug, Clone)]
pub struct BatColony {
    pub params: BatParams,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub loudness: Vec<f64>,
    pub pulse_rate: Vec<f64>,
    accepted: Vec<u32>,
    pub best: Vec<f64>,
    pub best_fitness: f64,
    trials: Vec<Vec<f64>>,
    acceptance_draws: Vec<f64>,
}

impl BatColony {
    pub fn new(params: BatParams, positions: Vec<Vec<f64>>, fitness: Vec<f64>) -> Self {
        let n = positions.len();
        let dim = positions[0].len();
        let best = argmax(&fitness);
        BatColony {
            velocities: vec![vec![0.0; dim]; n],
            loudness: vec![params.loudness; n],
            pulse_rate: vec![params.pulse_rate; n],
            accepted: vec![0; n],
            best: positions[best].clone(),
            best_fitness: fitness[best],
            trials: positions.clone(),
            acceptance_draws: vec![1.0; n],
            params,
            positions,
            fitness,
        }
    }

    /// Generates one trial position per bat. Per bat the draws are, in
    /// order: frequency, pulse gate, one walk offset per dimension, and the
    /// acceptance draw used later by [`BatColony::absorb`].
    pub fn step<R: Rng + ?Sized>(&mut self, space: &SearchSpace, rng: &mut R) -> &[Vec<f64>] {
        let p = &self.params;
        let mean_loudness = self.loudness.iter().sum::<f64>() / self.loudness.len() as f64;
        let dim = space.dimension();
        let mut walk = vec![0.0; dim];
        for i in 0..self.positions.len() {
            let beta: f64 = rng.random();
            let frequency = p.frequency_min + (p.frequency_max - p.frequency_min) * beta;
            let gate: f64 = rng.random();
            for w in walk.iter_mut() {
                *w = rng.random_range(-1.0..=1.0);
            }
            self.acceptance_draws[i] = rng.random();

            let local = gate > self.pulse_rate[i];
            for (d, w) in walk.iter().enumerate() {
                let x = self.positions[i][d];
                self.velocities[i][d] += (x - self.best[d]) * frequency;
                self.trials[i][d] = if local {
                    let step = w * mean_loudness * p.walk_scale * space.width(d);
                    space.clamp(d, self.best[d] + step)
                } else {
                    space.clamp(d, x + self.velocities[i][d])
                };
            }
        }
        &self.trials
    }

    /// A trial replaces its bat when it is strictly better and the
    /// acceptance draw falls below the bat's loudness; accepted bats get
    /// quieter and their pulse rate decays.
    pub fn absorb(&mut self, fitness: &[f64]) {
        let BatParams { alpha, gamma, pulse_rate, .. } = self.params;
        for (i, &f) in fitness.iter().enumerate() {
            if f > self.fitness[i] && self.acceptance_draws[i] < self.loudness[i] {
                self.positions[i].clone_from(&self.trials[i]);
                self.fitness[i] = f;
                self.loudness[i] *= alpha;
                self.accepted[i] += 1;
                self.pulse_rate[i] = pulse_rate * (-gamma * self.accepted[i] as f64).exp();
            }
            if f > self.best_fitness {
                self.best.clone_from(&self.trials[i]);
                self.best_fitness = f;
            }
        }
    }
}

impl Strategy for BatColony {
    fn propose(&mut self, space: &SearchSpace, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        self.step(space, rng).to_vec()
    }

    fn absorb(&mut self, fitness: &[f64]) {
        BatColony::absorb(self, fitness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn colony(params: BatParams) -> BatColony {
        let positions = vec![vec![0.1, 0.9], vec![0.5, 0.5], vec![0.8, 0.2]];
        BatColony::new(params, positions, vec![1.0, 3.0, 2.0])
    }

    #[test]
    fn silent_bats_do_not_move() {
        let params = BatParams { frequency_min: 0.0, frequency_max: 0.0, pulse_rate: 1.0, ..Default::default() };
        let mut c = colony(params);
        let before = c.positions.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let space = SearchSpace::unit(2).unwrap();
        for _ in 0..10 {
            let trials = c.step(&space, &mut rng).to_vec();
            assert_eq!(trials, before);
            c.absorb(&[0.0, 0.0, 0.0]);
        }
        assert_eq!(c.positions, before);
    }

    #[test]
    fn identity_schedules_keep_loudness_and_pulse_rate() {
        let params = BatParams { alpha: 1.0, gamma: 0.0, ..Default::default() };
        let mut c = colony(params);
        let space = SearchSpace::unit(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut accepted = 0;
        for g in 0..50 {
            c.step(&space, &mut rng);
            // always improving so acceptance depends on loudness only
            let before = c.positions.clone();
            c.absorb(&[10.0 + g as f64; 3]);
            accepted += c.positions.iter().zip(&before).filter(|(a, b)| a != b).count();
            assert!(c.loudness.iter().all(|&a| a == 1.0));
            assert!(c.pulse_rate.iter().all(|&r| r == 0.5));
        }
        assert!(accepted > 0);
    }

    #[test]
    fn default_schedules_decay_on_acceptance() {
        let mut c = colony(BatParams::default());
        let space = SearchSpace::unit(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in 0..20 {
            c.step(&space, &mut rng);
            c.absorb(&[10.0 + g as f64; 3]);
        }
        assert!(c.loudness.iter().all(|&a| a < 1.0));
        assert!(c.pulse_rate.iter().all(|&r| r < 0.5));
    }

    #[test]
    fn trials_stay_inside_box() {
        let params = BatParams { frequency_max: 10.0, walk_scale: 5.0, ..Default::default() };
        let mut c = colony(params);
        let space = SearchSpace::unit(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for g in 0..200 {
            let trials = c.step(&space, &mut rng).to_vec();
            assert!(trials.iter().all(|t| space.contains(t)));
            c.absorb(&[g as f64, -(g as f64), 0.5 * g as f64]);
        }
    }
}
