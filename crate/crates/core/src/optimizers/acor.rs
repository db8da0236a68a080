use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{config_err, OptimizerError, SearchSpace, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcoRParams {
    /// Locality of the rank weighting; small values favour the best ranks.
    pub q: f64,
    /// Deviation scale `ξ`.
    pub xi: f64,
}

impl Default for AcoRParams {
    fn default() -> Self {
        AcoRParams { q: 0.1, xi: 0.85 }
    }
}

impl AcoRParams {
    pub(super) fn validate(&self) -> Result<(), OptimizerError> {
        if !(self.q.is_finite() && self.q > 0.0) {
            return config_err("ACO_R q must be positive");
        }
        if !(self.xi.is_finite() && self.xi >= 0.0) {
            return config_err("ACO_R xi must be non-negative");
        }
        Ok(())
    }
}

/// Solutions sorted by descending fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionArchive {
    solutions: Vec<Vec<f64>>,
    fitness: Vec<f64>,
    capacity: usize,
}

impl SolutionArchive {
    pub fn new(solutions: Vec<Vec<f64>>, fitness: Vec<f64>) -> Self {
        let capacity = solutions.len();
        let mut archive = SolutionArchive { solutions: Vec::new(), fitness: Vec::new(), capacity };
        archive.merge(solutions, fitness);
        archive
    }

    /// Adds evaluated points and keeps the best `capacity`. Ties keep the
    /// older entry first.
    pub fn merge(&mut self, solutions: Vec<Vec<f64>>, fitness: Vec<f64>) {
        let mut all: Vec<(Vec<f64>, f64)> = self
            .solutions
            .drain(..)
            .zip(self.fitness.drain(..))
            .chain(solutions.into_iter().zip(fitness))
            .collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1));
        all.truncate(self.capacity);
        (self.solutions, self.fitness) = all.into_iter().unzip();
    }

    pub fn solutions(&self) -> &[Vec<f64>] {
        &self.solutions
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Selection probability of each rank, proportional to a Gaussian of
/// width `q·k` over the rank.
pub fn rank_probabilities(k: usize, q: f64) -> Vec<f64> {
    let denom = 2.0 * (q * k as f64).powi(2);
    let weights: Vec<f64> = (0..k).map(|l| (-((l * l) as f64) / denom).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Draws one candidate: pick a guide by rank, then sample every coordinate
/// from a Gaussian centred on the guide with deviation `ξ` times the mean
/// absolute distance from the guide to the other archive members.
///
/// Consumes one uniform draw and then one standard normal per dimension.
pub fn aco_r_sample<R: Rng + ?Sized>(
    archive: &SolutionArchive,
    probabilities: &[f64],
    xi: f64,
    space: &SearchSpace,
    rng: &mut R,
) -> Vec<f64> {
    let k = archive.len();
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut guide = k - 1;
    for (l, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            guide = l;
            break;
        }
    }
    let centre = &archive.solutions[guide];
    (0..space.dimension())
        .map(|d| {
            let spread: f64 =
                archive.solutions.iter().map(|s| (s[d] - centre[d]).abs()).sum::<f64>() / (k - 1) as f64;
            let z: f64 = rng.sample(StandardNormal);
            space.clamp(d, centre[d] + xi * spread * z)
        })
        .collect()
}

/// Continuous ant colony optimizer. Each generation samples one ant per
/// archive slot and keeps the best `k` of archive and ants.
#[derive(Debug, Clone)]
pub struct AcoR {
    pub params: AcoRParams,
    pub archive: SolutionArchive,
    probabilities: Vec<f64>,
    trials: Vec<Vec<f64>>,
}

impl AcoR {
    pub fn new(params: AcoRParams, population: Vec<Vec<f64>>, fitness: Vec<f64>) -> Self {
        let archive = SolutionArchive::new(population, fitness);
        let probabilities = rank_probabilities(archive.len(), params.q);
        AcoR { params, archive, probabilities, trials: Vec::new() }
    }
}

impl Strategy for AcoR {
    fn propose(&mut self, space: &SearchSpace, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        self.trials = (0..self.archive.len())
            .map(|_| aco_r_sample(&self.archive, &self.probabilities, self.params.xi, space, rng))
            .collect();
        self.trials.clone()
    }

    fn absorb(&mut self, fitness: &[f64]) {
        let trials: Vec<Vec<f64>> = self.trials.drain(..).take(fitness.len()).collect();
        self.archive.merge(trials, fitness.to_vec());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn archive_sorted_and_capped() {
        let mut a = SolutionArchive::new(vec![vec![0.1], vec![0.2], vec![0.3]], vec![1.0, 3.0, 2.0]);
        assert_eq!(a.fitness(), &[3.0, 2.0, 1.0]);
        a.merge(vec![vec![0.9], vec![0.8]], vec![2.5, 0.0]);
        assert_eq!(a.fitness(), &[3.0, 2.5, 2.0]);
        assert_eq!(a.solutions()[1], vec![0.9]);
    }

    #[test]
    fn identical_archive_gives_zero_deviation() {
        let a = SolutionArchive::new(vec![vec![0.4, 0.6]; 5], vec![1.0; 5]);
        let probs = rank_probabilities(5, 0.1);
        let space = SearchSpace::unit(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(aco_r_sample(&a, &probs, 0.85, &space, &mut rng), vec![0.4, 0.6]);
        }
    }

    #[test]
    fn tiny_q_always_guides_from_best() {
        let probs = rank_probabilities(10, 1e-6);
        assert_eq!(probs[0], 1.0);
        assert!(probs[1..].iter().all(|&p| p == 0.0));
        // with xi = 0 the sample is the guide itself
        let sols: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 10.0]).collect();
        let fit: Vec<f64> = (0..10).map(|i| -(i as f64)).collect();
        let a = SolutionArchive::new(sols, fit);
        let space = SearchSpace::unit(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            assert_eq!(aco_r_sample(&a, &probs, 0.0, &space, &mut rng), vec![0.0]);
        }
    }

    #[test]
    fn rank_probabilities_decrease_and_sum_to_one() {
        let p = rank_probabilities(20, 0.1);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn samples_stay_inside_box() {
        let sols = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5]];
        let a = SolutionArchive::new(sols, vec![1.0, 2.0, 3.0]);
        let probs = rank_probabilities(3, 0.5);
        let space = SearchSpace::unit(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            assert!(space.contains(&aco_r_sample(&a, &probs, 5.0, &space, &mut rng)));
        }
    }
}
