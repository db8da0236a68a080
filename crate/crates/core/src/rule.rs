//! Association rules and the five rule quality measures.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{AttributeKind, CoverageCounts, Dataset, DatasetError};

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("antecedent is empty")]
    EmptyAntecedent,
    #[error("consequent is empty")]
    EmptyConsequent,
    #[error("attribute {0} appears more than once")]
    DuplicateAttribute(usize),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute index {0} out of range")]
    AttributeOutOfRange(usize),
    #[error("attribute `{attribute}`: {reason}")]
    InvalidCondition { attribute: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Predicate {
    /// Closed interval `[lb, ub]` on a numeric attribute.
    Interval { lb: f64, ub: f64 },
    /// Equality with the category at this index.
    Category(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub attribute: usize,
    pub predicate: Predicate,
}

impl Condition {
    pub fn interval(attribute: usize, lb: f64, ub: f64) -> Self {
        Condition { attribute, predicate: Predicate::Interval { lb, ub } }
    }

    pub fn category(attribute: usize, category: usize) -> Self {
        Condition { attribute, predicate: Predicate::Category(category) }
    }

    /// Interval width relative to the attribute domain. Categories and
    /// zero-range attributes give 0.
    pub fn width_ratio(&self, dataset: &Dataset) -> f64 {
        match (self.predicate, dataset.attribute(self.attribute).map(|a| &a.kind)) {
            (Predicate::Interval { lb, ub }, Some(AttributeKind::Numeric { min, max })) => {
                let range = max - min;
                if range > 0.0 {
                    (ub - lb) / range
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// Checks the condition against the attribute it references.
    pub fn validate(&self, dataset: &Dataset) -> Result<(), RuleError> {
        let attr = dataset
            .attribute(self.attribute)
            .ok_or(RuleError::AttributeOutOfRange(self.attribute))?;
        let invalid = |reason: String| RuleError::InvalidCondition {
            attribute: attr.name.clone(),
            reason,
        };
        match (&self.predicate, &attr.kind) {
            (Predicate::Interval { lb, ub }, AttributeKind::Numeric { min, max }) => {
                if !(lb.is_finite() && ub.is_finite()) {
                    return Err(invalid("non-finite bound".into()));
                }
                if lb > ub {
                    return Err(invalid(format!("lower bound {lb} exceeds upper bound {ub}")));
                }
                if lb < min || ub > max {
                    return Err(invalid(format!(
                        "interval [{lb}, {ub}] leaves domain [{min}, {max}]"
                    )));
                }
                Ok(())
            }
            (Predicate::Category(c), AttributeKind::Categorical { categories }) => {
                if *c >= categories.len() {
                    return Err(invalid(format!("category index {c} out of range")));
                }
                Ok(())
            }
            (Predicate::Interval { .. }, _) => Err(invalid("interval on categorical attribute".into())),
            (Predicate::Category(_), _) => Err(invalid("category on numeric attribute".into())),
        }
    }
}

/// `antecedent ⇒ consequent`. Both sides are non-empty and no attribute
/// occurs twice in the rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    antecedent: Vec<Condition>,
    consequent: Vec<Condition>,
}

impl Rule {
    pub fn new(antecedent: Vec<Condition>, consequent: Vec<Condition>) -> Result<Self, RuleError> {
        if antecedent.is_empty() {
            return Err(RuleError::EmptyAntecedent);
        }
        if consequent.is_empty() {
            return Err(RuleError::EmptyConsequent);
        }
        let mut seen = HashSet::new();
        for c in antecedent.iter().chain(&consequent) {
            if !seen.insert(c.attribute) {
                return Err(RuleError::DuplicateAttribute(c.attribute));
            }
        }
        Ok(Rule { antecedent, consequent })
    }

    pub fn antecedent(&self) -> &[Condition] {
        &self.antecedent
    }

    pub fn consequent(&self) -> &[Condition] {
        &self.consequent
    }

    pub fn conditions(&self) -> impl Iterator<Item = &Condition> {
        self.antecedent.iter().chain(&self.consequent)
    }

    pub fn len(&self) -> usize {
        self.antecedent.len() + self.consequent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Validates every condition against `dataset`.
    pub fn validate(&self, dataset: &Dataset) -> Result<(), RuleError> {
        self.conditions().try_for_each(|c| c.validate(dataset))
    }

    /// Key used for deduplication: conditions sorted by attribute within each
    /// side, interval endpoints rounded to six decimals.
    pub fn canonical_key(&self) -> String {
        fn side(conds: &[Condition]) -> String {
            let mut sorted: Vec<&Condition> = conds.iter().collect();
            sorted.sort_by_key(|c| c.attribute);
            sorted
                .iter()
                .map(|c| match c.predicate {
                    Predicate::Interval { lb, ub } => {
                        format!("{}[{:.6},{:.6}]", c.attribute, zero(lb), zero(ub))
                    }
                    Predicate::Category(k) => format!("{}={k}", c.attribute),
                })
                .collect::<Vec<_>>()
                .join(";")
        }
        format!("{}=>{}", side(&self.antecedent), side(&self.consequent))
    }

    /// Human-readable form using the dataset's attribute names.
    pub fn display<'a>(&'a self, dataset: &'a Dataset) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, dataset }
    }
}

// avoids "-0.000000" in keys
fn zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a Rule,
    dataset: &'a Dataset,
}

impl RuleDisplay<'_> {
    fn side(&self, f: &mut fmt::Formatter<'_>, conds: &[Condition]) -> fmt::Result {
        for (i, c) in conds.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let attr = self.dataset.attribute(c.attribute);
            let name = attr.map_or("?", |a| a.name.as_str());
            match c.predicate {
                Predicate::Interval { lb, ub } => write!(f, "{name}∈[{lb},{ub}]")?,
                Predicate::Category(k) => {
                    let cat = attr
                        .and_then(|a| a.categories())
                        .and_then(|cats| cats.get(k))
                        .map_or("?", String::as_str);
                    write!(f, "{name}={cat}")?
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A: ")?;
        self.side(f, &self.rule.antecedent)?;
        write!(f, " => C: ")?;
        self.side(f, &self.rule.consequent)
    }
}

/// Which reading of the interestingness third factor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterestingnessVariant {
    /// `1 - supp(X⇒Y)`
    #[default]
    Normalized,
    /// `1 - supp(X⇒Y) / |D|`
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub support: f64,
    pub confidence: f64,
    pub comprehensibility: f64,
    pub interestingness: f64,
    pub amplitude: f64,
}

impl Metrics {
    pub fn evaluate(
        rule: &Rule,
        dataset: &Dataset,
        variant: InterestingnessVariant,
    ) -> Result<Self, DatasetError> {
        let counts = dataset.coverage(rule)?;
        Ok(Self::from_counts(rule, dataset, &counts, variant))
    }

    pub fn from_counts(
        rule: &Rule,
        dataset: &Dataset,
        counts: &CoverageCounts,
        variant: InterestingnessVariant,
    ) -> Self {
        let m = dataset.len();
        Metrics {
            support: support(counts, m),
            confidence: confidence(counts),
            comprehensibility: comprehensibility(rule),
            interestingness: interestingness(counts, m, variant),
            amplitude: amplitude(rule, dataset),
        }
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "supp={:.6}, conf={:.6}, comp={:.6}, int={:.6}, ampl={:.6}",
            self.support, self.confidence, self.comprehensibility, self.interestingness, self.amplitude
        )
    }
}

pub fn support(counts: &CoverageCounts, m: usize) -> f64 {
    counts.both_count as f64 / m as f64
}

/// Zero when nothing satisfies the antecedent.
pub fn confidence(counts: &CoverageCounts) -> f64 {
    if counts.antecedent_count == 0 {
        0.0
    } else {
        counts.both_count as f64 / counts.antecedent_count as f64
    }
}

pub fn comprehensibility(rule: &Rule) -> f64 {
    comprehensibility_from_sizes(rule.consequent.len(), rule.len())
}

/// `log(1 + consequent) / log(1 + total)` over condition counts.
pub fn comprehensibility_from_sizes(consequent: usize, total: usize) -> f64 {
    (1.0 + consequent as f64).ln() / (1.0 + total as f64).ln()
}

pub fn interestingness(counts: &CoverageCounts, m: usize, variant: InterestingnessVariant) -> f64 {
    if counts.antecedent_count == 0 || counts.consequent_count == 0 {
        return 0.0;
    }
    let m_f = m as f64;
    let s_xy = counts.both_count as f64 / m_f;
    let s_x = counts.antecedent_count as f64 / m_f;
    let s_y = counts.consequent_count as f64 / m_f;
    let rarity = match variant {
        InterestingnessVariant::Normalized => 1.0 - s_xy,
        InterestingnessVariant::Literal => 1.0 - s_xy / m_f,
    };
    (s_xy / s_y) * (s_xy / s_x) * rarity
}

pub fn amplitude(rule: &Rule, dataset: &Dataset) -> f64 {
    let n = rule.len() as f64;
    let total: f64 = rule.conditions().map(|c| c.width_ratio(dataset)).sum();
    1.0 - total / n
}

/// Name-based JSON form of one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConditionRecord {
    Interval { attribute: String, lb: f64, ub: f64 },
    Category { attribute: String, value: String },
}

/// Name-based JSON form of a rule, optionally with its metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub antecedent: Vec<ConditionRecord>,
    pub consequent: Vec<ConditionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
}

impl RuleRecord {
    pub fn from_rule(rule: &Rule, dataset: &Dataset, metrics: Option<Metrics>) -> Self {
        let conv = |c: &Condition| {
            let attr = &dataset.attributes()[c.attribute];
            match c.predicate {
                Predicate::Interval { lb, ub } => {
                    ConditionRecord::Interval { attribute: attr.name.clone(), lb, ub }
                }
                Predicate::Category(k) => ConditionRecord::Category {
                    attribute: attr.name.clone(),
                    value: attr.categories().expect("categorical attribute")[k].clone(),
                },
            }
        };
        RuleRecord {
            antecedent: rule.antecedent.iter().map(conv).collect(),
            consequent: rule.consequent.iter().map(conv).collect(),
            metrics,
        }
    }

    /// Resolves attribute names and category values against `dataset` and
    /// validates the resulting rule.
    pub fn to_rule(&self, dataset: &Dataset) -> Result<Rule, RuleError> {
        let conv = |c: &ConditionRecord| -> Result<Condition, RuleError> {
            let name = match c {
                ConditionRecord::Interval { attribute, .. } => attribute,
                ConditionRecord::Category { attribute, .. } => attribute,
            };
            let index = dataset
                .attribute_index(name)
                .ok_or_else(|| RuleError::UnknownAttribute(name.clone()))?;
            let cond = match c {
                ConditionRecord::Interval { lb, ub, .. } => Condition::interval(index, *lb, *ub),
                ConditionRecord::Category { value, .. } => {
                    let cats = dataset.attributes()[index].categories().ok_or_else(|| {
                        RuleError::InvalidCondition {
                            attribute: name.clone(),
                            reason: "category on numeric attribute".into(),
                        }
                    })?;
                    let k = cats.iter().position(|v| v == value).ok_or_else(|| {
                        RuleError::InvalidCondition {
                            attribute: name.clone(),
                            reason: format!("unknown category `{value}`"),
                        }
                    })?;
                    Condition::category(index, k)
                }
            };
            cond.validate(dataset)?;
            Ok(cond)
        };
        let antecedent = self.antecedent.iter().map(conv).collect::<Result<Vec<_>, _>>()?;
        let consequent = self.consequent.iter().map(conv).collect::<Result<Vec<_>, _>>()?;
        Rule::new(antecedent, consequent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ColumnData;

    fn counts(antecedent: usize, consequent: usize, both: usize) -> CoverageCounts {
        CoverageCounts { antecedent_count: antecedent, consequent_count: consequent, both_count: both }
    }

    fn two_numeric() -> Dataset {
        Dataset::from_columns(vec![
            ("a".into(), ColumnData::Numeric(vec![0.0, 2.0, 4.0])),
            ("b".into(), ColumnData::Numeric(vec![0.0, 5.0, 10.0])),
            ("c".into(), ColumnData::Categorical(vec!["x".into(), "y".into(), "x".into()])),
        ])
        .unwrap()
    }

    #[test]
    fn rule_invariants() {
        let a = Condition::interval(0, 0.0, 1.0);
        let b = Condition::interval(1, 0.0, 1.0);
        assert_eq!(Rule::new(vec![], vec![b]), Err(RuleError::EmptyAntecedent));
        assert_eq!(Rule::new(vec![a], vec![]), Err(RuleError::EmptyConsequent));
        assert_eq!(Rule::new(vec![a], vec![a]), Err(RuleError::DuplicateAttribute(0)));
        assert!(Rule::new(vec![a], vec![b]).is_ok());
    }

    #[test]
    fn support_examples() {
        assert_eq!(support(&counts(3, 3, 0), 10), 0.0);
        assert_eq!(support(&counts(3, 3, 2), 4), 0.5);
        assert_eq!(support(&counts(7, 7, 7), 7), 1.0);
    }

    #[test]
    fn confidence_examples() {
        assert_eq!(confidence(&counts(2, 5, 1)), 0.5);
        assert_eq!(confidence(&counts(3, 5, 3)), 1.0);
        assert_eq!(confidence(&counts(0, 5, 0)), 0.0);
    }

    #[test]
    fn comprehensibility_examples() {
        assert!((comprehensibility_from_sizes(1, 2) - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!((comprehensibility_from_sizes(1, 2) - 0.6309).abs() < 1e-4);
        assert_eq!(comprehensibility_from_sizes(3, 3), 1.0);
        assert!((comprehensibility_from_sizes(1, 4) - 0.4307).abs() < 1e-4);
    }

    #[test]
    fn interestingness_examples() {
        let c = counts(4, 5, 2);
        assert!((interestingness(&c, 10, InterestingnessVariant::Normalized) - 0.16).abs() < 1e-12);
        assert!((interestingness(&c, 10, InterestingnessVariant::Literal) - 0.196).abs() < 1e-12);
        assert_eq!(interestingness(&counts(4, 5, 0), 10, InterestingnessVariant::Normalized), 0.0);
        assert_eq!(interestingness(&counts(0, 5, 0), 10, InterestingnessVariant::Literal), 0.0);
    }

    #[test]
    fn amplitude_examples() {
        let ds = two_numeric();
        let full = Rule::new(
            vec![Condition::interval(0, 0.0, 4.0)],
            vec![Condition::interval(1, 0.0, 10.0)],
        )
        .unwrap();
        assert_eq!(amplitude(&full, &ds), 0.0);
        let points = Rule::new(
            vec![Condition::interval(0, 2.0, 2.0)],
            vec![Condition::interval(1, 5.0, 5.0), Condition::category(2, 1)],
        )
        .unwrap();
        assert_eq!(amplitude(&points, &ds), 1.0);
        // ratios 0.5 and 0.25
        let mixed = Rule::new(
            vec![Condition::interval(0, 1.0, 3.0)],
            vec![Condition::interval(1, 5.0, 7.5)],
        )
        .unwrap();
        assert!((amplitude(&mixed, &ds) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn zero_range_attribute_has_zero_width() {
        let ds = Dataset::from_columns(vec![
            ("k".into(), ColumnData::Numeric(vec![3.0, 3.0])),
            ("b".into(), ColumnData::Numeric(vec![0.0, 1.0])),
        ])
        .unwrap();
        assert_eq!(Condition::interval(0, 3.0, 3.0).width_ratio(&ds), 0.0);
    }

    #[test]
    fn canonical_key_sorts_and_rounds() {
        let r1 = Rule::new(
            vec![Condition::interval(2, 0.1234564, 1.0), Condition::interval(0, 0.0, 1.0)],
            vec![Condition::category(1, 3)],
        )
        .unwrap();
        let r2 = Rule::new(
            vec![Condition::interval(0, -0.0, 1.0), Condition::interval(2, 0.1234561, 1.0)],
            vec![Condition::category(1, 3)],
        )
        .unwrap();
        assert_eq!(r1.canonical_key(), r2.canonical_key());
        assert_eq!(r1.canonical_key(), "0[0.000000,1.000000];2[0.123456,1.000000]=>1=3");
    }

    #[test]
    fn display_line_format() {
        let ds = two_numeric();
        let rule = Rule::new(
            vec![Condition::interval(0, 1.0, 3.0), Condition::category(2, 0)],
            vec![Condition::interval(1, 5.0, 7.5)],
        )
        .unwrap();
        assert_eq!(rule.display(&ds).to_string(), "A: a∈[1,3], c=x => C: b∈[5,7.5]");
    }

    #[test]
    fn record_round_trip_and_validation() {
        let ds = two_numeric();
        let rule = Rule::new(
            vec![Condition::interval(0, 1.0, 3.0), Condition::category(2, 1)],
            vec![Condition::interval(1, 5.0, 7.5)],
        )
        .unwrap();
        let rec = RuleRecord::from_rule(&rule, &ds, None);
        let json = serde_json::to_string(&rec).unwrap();
        let back: RuleRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_rule(&ds).unwrap(), rule);

        let mut unknown = rec.clone();
        unknown.consequent = vec![ConditionRecord::Interval { attribute: "zz".into(), lb: 0.0, ub: 1.0 }];
        assert_eq!(unknown.to_rule(&ds), Err(RuleError::UnknownAttribute("zz".into())));

        let mut outside = rec;
        outside.consequent = vec![ConditionRecord::Interval { attribute: "b".into(), lb: -1.0, ub: 1.0 }];
        assert!(matches!(outside.to_rule(&ds), Err(RuleError::InvalidCondition { .. })));
    }
}
