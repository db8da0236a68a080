//! Scalarization and Pareto dominance over rule measures.
//!
//! All objectives are maximized.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rule::Metrics;

#[derive(Debug, Error, PartialEq)]
pub enum FitnessError {
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("archive capacity must be at least 1")]
    Capacity,
    #[error("invalid objective: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Support,
    Confidence,
    Comprehensibility,
    Interestingness,
    Amplitude,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Support,
        Measure::Confidence,
        Measure::Comprehensibility,
        Measure::Interestingness,
        Measure::Amplitude,
    ];

    pub fn of(self, m: &Metrics) -> f64 {
        match self {
            Measure::Support => m.support,
            Measure::Confidence => m.confidence,
            Measure::Comprehensibility => m.comprehensibility,
            Measure::Interestingness => m.interestingness,
            Measure::Amplitude => m.amplitude,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::Support => "support",
            Measure::Confidence => "confidence",
            Measure::Comprehensibility => "comprehensibility",
            Measure::Interestingness => "interestingness",
            Measure::Amplitude => "amplitude",
        }
    }
}

impl FromStr for Measure {
    type Err = FitnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "support" | "supp" => Ok(Measure::Support),
            "confidence" | "conf" => Ok(Measure::Confidence),
            "comprehensibility" | "comp" => Ok(Measure::Comprehensibility),
            "interestingness" | "int" => Ok(Measure::Interestingness),
            "amplitude" | "ampl" => Ok(Measure::Amplitude),
            other => Err(FitnessError::Parse(format!("unknown measure `{other}`"))),
        }
    }
}

/// One objective: a weighted sum of measures. A plain measure is a group
/// with a single term of weight 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub terms: Vec<(Measure, f64)>,
}

impl Objective {
    pub fn single(measure: Measure) -> Self {
        Objective { terms: vec![(measure, 1.0)] }
    }

    pub fn value(&self, metrics: &Metrics) -> f64 {
        self.terms.iter().map(|(m, w)| w * m.of(metrics)).sum()
    }
}

/// Parses `0.5*support+0.5*confidence`; a bare measure name means weight 1.
impl FromStr for Objective {
    type Err = FitnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut terms = Vec::new();
        for term in s.split('+') {
            let (weight, name) = match term.split_once('*') {
                Some((w, name)) => {
                    let w: f64 = w.trim().parse().map_err(|_| {
                        FitnessError::Parse(format!("bad weight `{}`", w.trim()))
                    })?;
                    if !(w.is_finite() && w >= 0.0) {
                        return Err(FitnessError::Parse(format!("weight {w} must be finite and ≥ 0")));
                    }
                    (w, name)
                }
                None => (1.0, term),
            };
            terms.push((name.parse()?, weight));
        }
        Ok(Objective { terms })
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, w)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if *w == 1.0 {
                write!(f, "{}", m.name())?;
            } else {
                write!(f, "{w}*{}", m.name())?;
            }
        }
        Ok(())
    }
}

/// Comma-separated list of objectives.
pub fn parse_objectives(s: &str) -> Result<Vec<Objective>, FitnessError> {
    let objectives: Vec<Objective> =
        s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect::<Result<_, _>>()?;
    if objectives.is_empty() {
        return Err(FitnessError::Parse("no objectives given".into()));
    }
    Ok(objectives)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(pub Vec<f64>);

impl ObjectiveVector {
    pub fn evaluate(objectives: &[Objective], metrics: &Metrics) -> Self {
        ObjectiveVector(objectives.iter().map(|o| o.value(metrics)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn weighted_sum(values: &[f64], weights: &[f64]) -> Result<f64, FitnessError> {
    if values.len() != weights.len() {
        return Err(FitnessError::Dimension { left: values.len(), right: weights.len() });
    }
    Ok(values.iter().zip(weights).map(|(v, w)| v * w).sum())
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool, FitnessError> {
    if a.len() != b.len() {
        return Err(FitnessError::Dimension { left: a.len(), right: b.len() });
    }
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return Ok(false);
        }
        strictly |= x > y;
    }
    Ok(strictly)
}

/// NSGA-II crowding distance of each point. Extremes in any objective get
/// infinity.
#[allow(clippy::needless_range_loop)] // d indexes a column across rows
pub fn crowding_distances(points: &[&[f64]]) -> Vec<f64> {
    let n = points.len();
    let mut distance = vec![0.0; n];
    if n == 0 {
        return distance;
    }
    let dims = points[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for d in 0..dims {
        order.sort_by(|&i, &j| points[i][d].total_cmp(&points[j][d]).then(i.cmp(&j)));
        let lo = points[order[0]][d];
        let hi = points[order[n - 1]][d];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let spread = hi - lo;
        if spread > 0.0 {
            for w in 1..n.saturating_sub(1) {
                let gap = points[order[w + 1]][d] - points[order[w - 1]][d];
                distance[order[w]] += gap / spread;
            }
        }
    }
    distance
}

/// Something with a stable identity for duplicate detection.
pub trait ArchiveKey {
    fn archive_key(&self) -> String;
}

impl ArchiveKey for crate::rule::Rule {
    fn archive_key(&self) -> String {
        self.canonical_key()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertResult {
    Inserted,
    Dominated,
    Duplicate,
}

#[derive(Debug, Clone)]
pub struct ArchiveEntry<T> {
    pub item: T,
    pub objectives: ObjectiveVector,
    key: String,
}

impl<T> ArchiveEntry<T> {
    pub fn key(&self) -> &str {
        &self.key
    }
}

/// Set of mutually non-dominated entries, bounded by `capacity`. When full,
/// the entry with the smallest crowding distance is evicted; ties go to the
/// oldest entry.
#[derive(Debug, Clone)]
pub struct ParetoArchive<T> {
    entries: Vec<ArchiveEntry<T>>,
    keys: HashSet<String>,
    capacity: usize,
    dimension: usize,
}

impl<T: ArchiveKey> ParetoArchive<T> {
    pub const DEFAULT_CAPACITY: usize = 100;

    pub fn new(dimension: usize, capacity: usize) -> Result<Self, FitnessError> {
        if capacity == 0 {
            return Err(FitnessError::Capacity);
        }
        Ok(ParetoArchive { entries: Vec::new(), keys: HashSet::new(), capacity, dimension })
    }

    pub fn unbounded(dimension: usize) -> Self {
        Self::new(dimension, usize::MAX).expect("non-zero capacity")
    }

    pub fn insert(&mut self, item: T, objectives: ObjectiveVector) -> Result<InsertResult, FitnessError> {
        if objectives.len() != self.dimension {
            return Err(FitnessError::Dimension { left: objectives.len(), right: self.dimension });
        }
        for e in &self.entries {
            if dominates(e.objectives.values(), objectives.values())? {
                return Ok(InsertResult::Dominated);
            }
        }
        let key = item.archive_key();
        if self.keys.contains(&key) {
            return Ok(InsertResult::Duplicate);
        }
        let keys = &mut self.keys;
        self.entries.retain(|e| {
            let beaten = dominates(objectives.values(), e.objectives.values()).unwrap_or(false);
            if beaten {
                keys.remove(&e.key);
            }
            !beaten
        });
        self.keys.insert(key.clone());
        self.entries.push(ArchiveEntry { item, objectives, key });
        if self.entries.len() > self.capacity {
            self.evict_most_crowded();
        }
        Ok(InsertResult::Inserted)
    }

    fn evict_most_crowded(&mut self) {
        let points: Vec<&[f64]> = self.entries.iter().map(|e| e.objectives.values()).collect();
        let distance = crowding_distances(&points);
        let victim = (0..distance.len())
            .min_by(|&i, &j| distance[i].total_cmp(&distance[j]).then(i.cmp(&j)))
            .expect("archive is non-empty");
        let removed = self.entries.remove(victim);
        self.keys.remove(&removed.key);
    }
}

impl<T> ParetoArchive<T> {
    pub fn entries(&self) -> &[ArchiveEntry<T>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry<T>> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    impl ArchiveKey for usize {
        fn archive_key(&self) -> String {
            self.to_string()
        }
    }

    fn ov(v: &[f64]) -> ObjectiveVector {
        ObjectiveVector(v.to_vec())
    }

    #[test]
    fn weighted_sum_examples() {
        assert!((weighted_sum(&[0.4, 0.8], &[0.5, 0.5]).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(weighted_sum(&[0.3, 0.7, 0.9], &[1.0, 0.0, 0.0]).unwrap(), 0.3);
        assert_eq!(weighted_sum(&[0.3, 0.7], &[0.0, 0.0]).unwrap(), 0.0);
        assert!(weighted_sum(&[0.3], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[0.9, 0.9], &[0.5, 0.9]).unwrap());
        assert!(!dominates(&[0.9, 0.1], &[0.1, 0.9]).unwrap());
        assert!(!dominates(&[0.1, 0.9], &[0.9, 0.1]).unwrap());
        assert!(!dominates(&[0.4, 0.4], &[0.4, 0.4]).unwrap());
        assert!(dominates(&[0.4], &[0.4, 0.1]).is_err());
    }

    #[test]
    fn archive_basic_transitions() {
        let mut a = ParetoArchive::new(2, 10).unwrap();
        assert_eq!(a.insert(0usize, ov(&[0.5, 0.5])).unwrap(), InsertResult::Inserted);
        assert_eq!(a.len(), 1);
        assert_eq!(a.insert(1, ov(&[0.4, 0.5])).unwrap(), InsertResult::Dominated);
        assert_eq!(a.insert(0, ov(&[0.6, 0.1])).unwrap(), InsertResult::Duplicate);
        assert_eq!(a.len(), 1);
        assert_eq!(a.insert(2, ov(&[0.9, 0.9])).unwrap(), InsertResult::Inserted);
        assert_eq!(a.len(), 1);
        assert_eq!(a.entries()[0].item, 2);
        assert!(a.insert(3, ov(&[0.9])).is_err());
        assert_eq!(ParetoArchive::<usize>::new(2, 0).unwrap_err(), FitnessError::Capacity);
    }

    #[test]
    fn eviction_keeps_extremes() {
        let mut a = ParetoArchive::new(2, 3).unwrap();
        for (i, p) in [[0.0, 1.0], [0.5, 0.5], [1.0, 0.0], [0.45, 0.55]].iter().enumerate() {
            a.insert(i, ov(p)).unwrap();
        }
        let mut kept: Vec<usize> = a.entries().iter().map(|e| e.item).collect();
        kept.sort();
        assert_eq!(a.len(), 3);
        assert!(kept.contains(&0) && kept.contains(&2));
    }

    #[test]
    fn crowding_distance_values() {
        let pts: Vec<&[f64]> = vec![&[0.0, 1.0], &[0.25, 0.75], &[1.0, 0.0]];
        let d = crowding_distances(&pts);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        // (1.0 - 0.0)/1 in both objectives
        assert!((d[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn objective_group_parsing() {
        let objs = parse_objectives("0.5*support+0.5*conf,interestingness").unwrap();
        assert_eq!(objs.len(), 2);
        assert_eq!(objs[0].terms, vec![(Measure::Support, 0.5), (Measure::Confidence, 0.5)]);
        assert_eq!(objs[1], Objective::single(Measure::Interestingness));
        assert_eq!(objs[0].to_string(), "0.5*support+0.5*confidence");
        assert!(parse_objectives("lift").is_err());
        assert!(parse_objectives("").is_err());
        assert!(parse_objectives("-1*support").is_err());
    }

    fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, dim)
    }

    proptest! {
        #[test]
        fn dominance_is_strict_partial_order(
            a in vec_strategy(3), b in vec_strategy(3), c in vec_strategy(3)
        ) {
            prop_assert!(!dominates(&a, &a).unwrap());
            if dominates(&a, &b).unwrap() {
                prop_assert!(!dominates(&b, &a).unwrap());
                if dominates(&b, &c).unwrap() {
                    prop_assert!(dominates(&a, &c).unwrap());
                }
            }
        }

        #[test]
        fn weighted_sum_is_linear(
            v in vec_strategy(4), w1 in vec_strategy(4), w2 in vec_strategy(4), k in 0.1f64..10.0
        ) {
            let sum: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| a + k * b).collect();
            let lhs = weighted_sum(&v, &sum).unwrap();
            let rhs = weighted_sum(&v, &w1).unwrap() + k * weighted_sum(&v, &w2).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn bounded_archive_stays_non_dominated(
            pts in prop::collection::vec(vec_strategy(2), 1..60), cap in 1usize..8
        ) {
            let mut a = ParetoArchive::new(2, cap).unwrap();
            for (i, p) in pts.into_iter().enumerate() {
                a.insert(i, ObjectiveVector(p)).unwrap();
            }
            prop_assert!(a.len() <= cap);
            for x in a.entries() {
                for y in a.entries() {
                    prop_assert!(!dominates(x.objectives.values(), y.objectives.values()).unwrap());
                }
            }
        }
    }
}
