//! Mining runs: decode → coverage → measures → fitness, driven by one of
//! the optimizers, plus rule-set export and a planted-rule generator.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ColumnData, Dataset, DatasetError};
use crate::encoding::{DecodeOutcome, Scheme};
use crate::fitness::{
    weighted_sum, ArchiveKey, FitnessError, Measure, Objective, ObjectiveVector, ParetoArchive,
};
use crate::optimizers::{
    run_with_sink, AcoRParams, Algorithm, BatParams, OptimizerConfig, OptimizerError, Problem,
    PsoParams, RunTrace, SearchSpace,
};
use crate::rule::{Condition, InterestingnessVariant, Metrics, Predicate, Rule, RuleRecord};

#[derive(Debug, Error)]
pub enum MineError {
    #[error("invalid mining configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
}

impl MineError {
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            MineError::Config(_) | MineError::Optimizer(OptimizerError::Config(_)) | MineError::Fitness(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoMode {
    WeightedSum,
    Pareto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub scheme: Scheme,
    pub objectives: Vec<Objective>,
    pub mode: MoMode,
    /// One weight per objective. Required for weighted-sum mode; in Pareto
    /// mode they only steer the optimizer and default to equal weights.
    pub weights: Option<Vec<f64>>,
    pub optimizer: OptimizerConfig,
    pub min_support: f64,
    pub min_confidence: f64,
    pub interestingness: InterestingnessVariant,
    pub archive_capacity: usize,
}

impl MiningConfig {
    /// Pareto mode over the given measures with default thresholds.
    pub fn pareto(scheme: Scheme, measures: &[Measure], optimizer: OptimizerConfig) -> Self {
        MiningConfig {
            scheme,
            objectives: measures.iter().copied().map(Objective::single).collect(),
            mode: MoMode::Pareto,
            weights: None,
            optimizer,
            min_support: 0.0,
            min_confidence: 0.0,
            interestingness: InterestingnessVariant::Normalized,
            archive_capacity: ParetoArchive::<Rule>::DEFAULT_CAPACITY,
        }
    }

    pub fn weighted(
        scheme: Scheme,
        measures: &[Measure],
        weights: Vec<f64>,
        optimizer: OptimizerConfig,
    ) -> Self {
        MiningConfig {
            mode: MoMode::WeightedSum,
            weights: Some(weights),
            ..Self::pareto(scheme, measures, optimizer)
        }
    }

    pub fn validate(&self) -> Result<(), MineError> {
        let err = |m: &str| Err(MineError::Config(m.to_string()));
        if self.objectives.is_empty() || self.objectives.iter().any(|o| o.terms.is_empty()) {
            return err("at least one objective is required");
        }
        match (&self.weights, self.mode) {
            (None, MoMode::WeightedSum) => return err("weighted-sum mode requires weights"),
            (Some(w), _) if w.len() != self.objectives.len() => {
                return err("number of weights must match number of objectives")
            }
            (Some(w), _) if w.iter().any(|x| !x.is_finite() || *x < 0.0) => {
                return err("weights must be finite and non-negative")
            }
            _ => {}
        }
        for t in [self.min_support, self.min_confidence] {
            if !(0.0..=1.0).contains(&t) {
                return err("thresholds must lie in [0, 1]");
            }
        }
        if self.archive_capacity == 0 {
            return err("archive capacity must be at least 1");
        }
        self.optimizer.validate()?;
        Ok(())
    }

    /// Weights used to turn an objective vector into the optimizer's fitness.
    pub fn guide_weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| {
            let m = self.objectives.len();
            vec![1.0 / m as f64; m]
        })
    }
}

/// Original algorithm/representation/objective pairings from the NARM
/// literature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Rough PSO: value-part representation, weighted support, confidence
    /// and amplitude.
    Rpsoa,
    /// Multi-objective PSO over confidence, interestingness and
    /// comprehensibility.
    Mopar,
    /// Michigan-style PARCD: confidence and comprehensibility.
    Parcd,
    /// Continuous ACO: centre/spread representation, weighted support,
    /// confidence, interestingness and amplitude.
    AcoR,
    /// Multi-objective bat: cut-point representation, two objectives each a
    /// weighted pair of measures.
    MobArm,
}

pub struct PresetSettings {
    pub algorithm: Algorithm,
    pub scheme: Scheme,
    pub objectives: Vec<Objective>,
    pub mode: MoMode,
    pub weights: Option<Vec<f64>>,
}

impl Preset {
    pub fn settings(self) -> PresetSettings {
        use Measure::*;
        let singles = |ms: &[Measure]| ms.iter().copied().map(Objective::single).collect::<Vec<_>>();
        let equal = |n: usize| Some(vec![1.0 / n as f64; n]);
        match self {
            Preset::Rpsoa => PresetSettings {
                algorithm: Algorithm::Pso(PsoParams::default()),
                scheme: Scheme::AeAv,
                objectives: singles(&[Support, Confidence, Amplitude]),
                mode: MoMode::WeightedSum,
                weights: equal(3),
            },
            Preset::Mopar => PresetSettings {
                algorithm: Algorithm::Pso(PsoParams::default()),
                scheme: Scheme::Triplet,
                objectives: singles(&[Confidence, Interestingness, Comprehensibility]),
                mode: MoMode::Pareto,
                weights: None,
            },
            Preset::Parcd => PresetSettings {
                algorithm: Algorithm::Pso(PsoParams::default()),
                scheme: Scheme::Triplet,
                objectives: singles(&[Confidence, Comprehensibility]),
                mode: MoMode::Pareto,
                weights: None,
            },
            Preset::AcoR => PresetSettings {
                algorithm: Algorithm::AcoR(AcoRParams::default()),
                scheme: Scheme::Gaussian,
                objectives: singles(&[Support, Confidence, Interestingness, Amplitude]),
                mode: MoMode::WeightedSum,
                weights: equal(4),
            },
            Preset::MobArm => PresetSettings {
                algorithm: Algorithm::Bat(BatParams::default()),
                scheme: Scheme::CutPoint,
                objectives: vec![
                    Objective { terms: vec![(Support, 0.5), (Confidence, 0.5)] },
                    Objective { terms: vec![(Comprehensibility, 0.5), (Interestingness, 0.5)] },
                ],
                mode: MoMode::Pareto,
                weights: None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedRule {
    pub rule: Rule,
    pub metrics: Metrics,
    pub objectives: ObjectiveVector,
    /// Weighted score under the run's (guide) weights.
    pub score: f64,
}

impl ArchiveKey for MinedRule {
    fn archive_key(&self) -> String {
        self.rule.canonical_key()
    }
}

impl MinedRule {
    fn passes(&self, config: &MiningConfig) -> bool {
        self.metrics.support >= config.min_support && self.metrics.confidence >= config.min_confidence
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: MiningConfig,
    pub seed: u64,
    pub dataset_fingerprint: String,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<MinedRule>,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct MinedRuleRecord<'a> {
    #[serde(flatten)]
    rule: RuleRecord,
    objectives: &'a ObjectiveVector,
    score: f64,
}

#[derive(Serialize)]
struct RuleSetRecord<'a> {
    provenance: &'a Provenance,
    rules: Vec<MinedRuleRecord<'a>>,
}

impl RuleSet {
    pub fn write_json<W: Write>(&self, dataset: &Dataset, writer: W) -> serde_json::Result<()> {
        let record = RuleSetRecord {
            provenance: &self.provenance,
            rules: self
                .rules
                .iter()
                .map(|r| MinedRuleRecord {
                    rule: RuleRecord::from_rule(&r.rule, dataset, Some(r.metrics)),
                    objectives: &r.objectives,
                    score: r.score,
                })
                .collect(),
        };
        serde_json::to_writer_pretty(writer, &record)
    }

    /// One rule per row: both sides in the rule display form, the five
    /// measures, the weighted score and one `objective:<name>` column per
    /// configured objective.
    pub fn write_csv<W: Write>(&self, dataset: &Dataset, writer: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = [
            "antecedent",
            "consequent",
            "support",
            "confidence",
            "comprehensibility",
            "interestingness",
            "amplitude",
            "score",
        ]
        .map(String::from)
        .to_vec();
        header.extend(self.provenance.config.objectives.iter().map(|o| format!("objective:{o}")));
        wtr.write_record(&header)?;
        for r in &self.rules {
            let text = r.rule.display(dataset).to_string();
            let (a, c) = split_display(&text);
            let m = &r.metrics;
            let mut row = vec![
                a.to_string(),
                c.to_string(),
                m.support.to_string(),
                m.confidence.to_string(),
                m.comprehensibility.to_string(),
                m.interestingness.to_string(),
                m.amplitude.to_string(),
                r.score.to_string(),
            ];
            row.extend(r.objectives.values().iter().map(f64::to_string));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn split_display(text: &str) -> (&str, &str) {
    let body = text.strip_prefix("A: ").unwrap_or(text);
    body.split_once(" => C: ").unwrap_or((body, ""))
}

struct MiningProblem<'a> {
    dataset: &'a Dataset,
    config: &'a MiningConfig,
    weights: Vec<f64>,
}

impl Problem for MiningProblem<'_> {
    type Candidate = Option<MinedRule>;

    /// Infeasible genotypes score 0.
    fn evaluate(&self, point: &[f64]) -> (f64, Option<MinedRule>) {
        let rule = match self.config.scheme.decode(point, self.dataset) {
            Ok(DecodeOutcome::Ok(rule)) => rule,
            Ok(DecodeOutcome::Infeasible(_)) => return (0.0, None),
            Err(e) => unreachable!("search space matches the scheme: {e}"),
        };
        let metrics = Metrics::evaluate(&rule, self.dataset, self.config.interestingness)
            .expect("decoded rules reference valid attributes");
        let objectives = ObjectiveVector::evaluate(&self.config.objectives, &metrics);
        let score = weighted_sum(objectives.values(), &self.weights).expect("weights validated");
        (score, Some(MinedRule { rule, metrics, objectives, score }))
    }
}

/// Result of [`mine_with_trace`].
pub struct MiningRun {
    pub rules: RuleSet,
    pub trace: RunTrace,
    pub best_genotype: Vec<f64>,
}

pub fn mine(dataset: &Dataset, config: &MiningConfig) -> Result<RuleSet, MineError> {
    mine_with_trace(dataset, config).map(|run| run.rules)
}

/// Runs the optimizer and collects rules. Weighted-sum mode keeps every
/// distinct feasible rule evaluated during the run that passes the
/// thresholds; Pareto mode keeps the final archive filtered by the
/// thresholds.
pub fn mine_with_trace(dataset: &Dataset, config: &MiningConfig) -> Result<MiningRun, MineError> {
    config.validate()?;
    if dataset.num_attributes() < 2 {
        return Err(MineError::Config("mining needs at least 2 attributes".into()));
    }
    let space = SearchSpace::unit(config.scheme.dimension(dataset.num_attributes()))?;
    let problem = MiningProblem { dataset, config, weights: config.guide_weights() };

    let mut harvest: HashMap<String, MinedRule> = HashMap::new();
    let mut archive =
        ParetoArchive::<MinedRule>::new(config.objectives.len(), config.archive_capacity)?;
    let mut archive_error = None;

    let outcome = run_with_sink(&space, &problem, &config.optimizer, |candidate| {
        let Some(mined) = candidate else { return };
        match config.mode {
            MoMode::WeightedSum => {
                if !mined.passes(config) {
                    return;
                }
                let key = mined.rule.canonical_key();
                match harvest.get(&key) {
                    Some(prev) if prev.metrics.support >= mined.metrics.support => {}
                    _ => {
                        harvest.insert(key, mined);
                    }
                }
            }
            MoMode::Pareto => {
                let objectives = mined.objectives.clone();
                if let Err(e) = archive.insert(mined, objectives) {
                    archive_error.get_or_insert(e);
                }
            }
        }
    })?;
    if let Some(e) = archive_error {
        return Err(e.into());
    }

    let mut rules: Vec<MinedRule> = match config.mode {
        MoMode::WeightedSum => harvest.into_values().collect(),
        MoMode::Pareto => archive
            .into_entries()
            .into_iter()
            .map(|e| e.item)
            .filter(|r| r.passes(config))
            .collect(),
    };
    rules = dedup(rules);
    sort_rules(&mut rules, config.mode);

    Ok(MiningRun {
        rules: RuleSet {
            rules,
            provenance: Provenance {
                config: config.clone(),
                seed: config.optimizer.seed,
                dataset_fingerprint: dataset.fingerprint(),
                evaluations: outcome.trace.evaluations_used,
            },
        },
        trace: outcome.trace,
        best_genotype: outcome.best_genotype,
    })
}

fn sort_rules(rules: &mut [MinedRule], mode: MoMode) {
    let key_order = |a: &MinedRule, b: &MinedRule| a.rule.canonical_key().cmp(&b.rule.canonical_key());
    match mode {
        MoMode::WeightedSum => {
            rules.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| key_order(a, b)))
        }
        MoMode::Pareto => rules.sort_by(|a, b| {
            b.metrics
                .support
                .total_cmp(&a.metrics.support)
                .then(b.metrics.confidence.total_cmp(&a.metrics.confidence))
                .then_with(|| key_order(a, b))
        }),
    }
}

/// Collapses rules with identical canonical keys, keeping the instance with
/// the higher support (the earlier one on ties). Order of first appearance
/// is preserved.
pub fn dedup(rules: Vec<MinedRule>) -> Vec<MinedRule> {
    let mut position: HashMap<String, usize> = HashMap::new();
    let mut out: Vec<MinedRule> = Vec::with_capacity(rules.len());
    for r in rules {
        let key = r.rule.canonical_key();
        match position.get(&key) {
            Some(&i) => {
                if r.metrics.support > out[i].metrics.support {
                    out[i] = r;
                }
            }
            None => {
                position.insert(key, out.len());
                out.push(r);
            }
        }
    }
    out
}

/// Numeric dataset with a planted implication `a0 ∈ [0, 0.5] ⇒ a1 ∈ [0.5, 1]`.
///
/// With probability `planted_frequency` a row gets `a0 ~ U[0, 0.5)` and
/// `a1 ~ U[0.5, 1)`. Otherwise `a0 ~ U[0, 1)`, and `a1 ~ U[0, 0.5)` when
/// `a0 ≤ 0.5`, else `a1 ~ U[0, 1)`. All other attributes are `U[0, 1)`
/// noise. The returned rule has its intervals clipped to the observed
/// domains so it satisfies the rule invariants; coverage is unaffected.
pub fn generate_planted(
    n_attributes: usize,
    m: usize,
    planted_frequency: f64,
    seed: u64,
) -> Result<(Dataset, Rule), MineError> {
    if n_attributes < 2 {
        return Err(MineError::Config("need at least 2 attributes".into()));
    }
    if m < 20 {
        return Err(MineError::Config("need at least 20 rows".into()));
    }
    if !(planted_frequency > 0.0 && planted_frequency < 1.0) {
        return Err(MineError::Config("planted frequency must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = vec![Vec::with_capacity(m); n_attributes];
    for _ in 0..m {
        let planted = rng.random::<f64>() < planted_frequency;
        let (a0, a1) = if planted {
            (0.5 * rng.random::<f64>(), 0.5 + 0.5 * rng.random::<f64>())
        } else {
            let a0: f64 = rng.random();
            let a1 = if a0 <= 0.5 { 0.5 * rng.random::<f64>() } else { rng.random() };
            (a0, a1)
        };
        columns[0].push(a0);
        columns[1].push(a1);
        for col in columns.iter_mut().skip(2) {
            col.push(rng.random());
        }
    }
    let dataset = Dataset::from_columns(
        columns
            .into_iter()
            .enumerate()
            .map(|(j, v)| (format!("a{j}"), ColumnData::Numeric(v)))
            .collect(),
    )?;
    let clip = |j: usize, lb: f64, ub: f64| {
        let (min, max) = dataset.attributes()[j].bounds().expect("numeric");
        Condition { attribute: j, predicate: Predicate::Interval { lb: lb.max(min), ub: ub.min(max) } }
    };
    let rule = Rule::new(vec![clip(0, 0.0, 0.5)], vec![clip(1, 0.5, 1.0)])
        .expect("two distinct attributes");
    Ok((dataset, rule))
}
