//! Genotype to rule decoding.
//!
//! Every scheme reads a real vector from the unit box. Components outside
//! `[0, 1]` are clamped first and NaN is read as 0, so decoding never fails
//! on the values themselves, only on the vector length.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{AttributeKind, Dataset};
use crate::rule::{Condition, Rule};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("genotype has length {actual}, scheme expects {expected}")]
pub struct DimensionError {
    pub expected: usize,
    pub actual: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `⟨ACN, lo, hi⟩` per attribute.
    Triplet,
    /// `⟨AE, lo, hi⟩` per attribute: existence flag plus value part.
    AeAv,
    /// `⟨ACN, centre, spread⟩` per attribute.
    Gaussian,
    /// A cut point followed by one attribute index per position.
    CutPoint,
}

impl Scheme {
    /// Genotype length for a dataset with `attributes` columns.
    pub fn dimension(self, attributes: usize) -> usize {
        match self {
            Scheme::Triplet | Scheme::AeAv | Scheme::Gaussian => 3 * attributes,
            Scheme::CutPoint => attributes + 1,
        }
    }

    pub fn decode(self, genes: &[f64], dataset: &Dataset) -> Result<DecodeOutcome, DimensionError> {
        match self {
            Scheme::Triplet => decode_triplet(genes, dataset),
            Scheme::AeAv => decode_ae_av(genes, dataset),
            Scheme::Gaussian => decode_gaussian(genes, dataset),
            Scheme::CutPoint => decode_cutpoint(genes, dataset),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "triplet" => Ok(Scheme::Triplet),
            "aeav" | "ae-av" => Ok(Scheme::AeAv),
            "gaussian" => Ok(Scheme::Gaussian),
            "cutpoint" | "cut-point" => Ok(Scheme::CutPoint),
            other => Err(format!("unknown encoding `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasibility {
    EmptyAntecedent,
    EmptyConsequent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecodeOutcome {
    Ok(Rule),
    Infeasible(Infeasibility),
}

impl DecodeOutcome {
    pub fn rule(&self) -> Option<&Rule> {
        match self {
            DecodeOutcome::Ok(rule) => Some(rule),
            DecodeOutcome::Infeasible(_) => None,
        }
    }

    pub fn into_rule(self) -> Option<Rule> {
        match self {
            DecodeOutcome::Ok(rule) => Some(rule),
            DecodeOutcome::Infeasible(_) => None,
        }
    }
}

/// Role of an attribute as read from an ACN gene.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Antecedent,
    Consequent,
    Absent,
}

/// `≤ 1/3` antecedent, `(1/3, 2/3]` consequent, `> 2/3` absent.
pub fn acn_role(acn: f64) -> Role {
    let acn = unit(acn);
    if acn <= 1.0 / 3.0 {
        Role::Antecedent
    } else if acn <= 2.0 / 3.0 {
        Role::Consequent
    } else {
        Role::Absent
    }
}

fn unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// Maps `t ∈ [0,1]` onto `[min, max]`, exact at both ends.
fn lerp(min: f64, max: f64, t: f64) -> f64 {
    if t <= 0.0 {
        min
    } else if t >= 1.0 {
        max
    } else {
        (min + t * (max - min)).clamp(min, max)
    }
}

fn category_bin(t: f64, count: usize) -> usize {
    ((unit(t) * count as f64).floor() as usize).min(count - 1)
}

fn check_len(genes: &[f64], expected: usize) -> Result<(), DimensionError> {
    if genes.len() != expected {
        return Err(DimensionError { expected, actual: genes.len() });
    }
    Ok(())
}

/// Interval from two value genes, ordered by swapping when needed.
fn ordered_interval(attribute: usize, dataset: &Dataset, a: f64, b: f64) -> Condition {
    match &dataset.attributes()[attribute].kind {
        AttributeKind::Numeric { min, max } => {
            let (lo, hi) = if unit(a) <= unit(b) { (unit(a), unit(b)) } else { (unit(b), unit(a)) };
            Condition::interval(attribute, lerp(*min, *max, lo), lerp(*min, *max, hi))
        }
        AttributeKind::Categorical { categories } => {
            Condition::category(attribute, category_bin(a, categories.len()))
        }
    }
}

/// Interval `centre ± half-width`, clipped to the domain.
fn centred_interval(attribute: usize, dataset: &Dataset, centre: f64, spread: f64) -> Condition {
    match &dataset.attributes()[attribute].kind {
        AttributeKind::Numeric { min, max } => {
            let c = lerp(*min, *max, unit(centre));
            let h = unit(spread) * (max - min) / 2.0;
            Condition::interval(attribute, (c - h).max(*min), (c + h).min(*max))
        }
        AttributeKind::Categorical { categories } => {
            Condition::category(attribute, category_bin(centre, categories.len()))
        }
    }
}

fn full_domain(attribute: usize, dataset: &Dataset, category_gene: f64) -> Condition {
    match &dataset.attributes()[attribute].kind {
        AttributeKind::Numeric { min, max } => Condition::interval(attribute, *min, *max),
        AttributeKind::Categorical { categories } => {
            Condition::category(attribute, category_bin(category_gene, categories.len()))
        }
    }
}

fn assemble(antecedent: Vec<Condition>, consequent: Vec<Condition>) -> DecodeOutcome {
    if antecedent.is_empty() {
        return DecodeOutcome::Infeasible(Infeasibility::EmptyAntecedent);
    }
    if consequent.is_empty() {
        return DecodeOutcome::Infeasible(Infeasibility::EmptyConsequent);
    }
    match Rule::new(antecedent, consequent) {
        Ok(rule) => DecodeOutcome::Ok(rule),
        Err(e) => unreachable!("decoder produced an invalid rule: {e}"),
    }
}

fn decode_with_roles(
    genes: &[f64],
    dataset: &Dataset,
    condition: impl Fn(usize, f64, f64) -> Condition,
) -> Result<DecodeOutcome, DimensionError> {
    let n = dataset.num_attributes();
    check_len(genes, 3 * n)?;
    let mut antecedent = Vec::new();
    let mut consequent = Vec::new();
    for (j, triple) in genes.chunks_exact(3).enumerate() {
        match acn_role(triple[0]) {
            Role::Antecedent => antecedent.push(condition(j, triple[1], triple[2])),
            Role::Consequent => consequent.push(condition(j, triple[1], triple[2])),
            Role::Absent => {}
        }
    }
    Ok(assemble(antecedent, consequent))
}

pub fn decode_triplet(genes: &[f64], dataset: &Dataset) -> Result<DecodeOutcome, DimensionError> {
    decode_with_roles(genes, dataset, |j, a, b| ordered_interval(j, dataset, a, b))
}

pub fn decode_gaussian(genes: &[f64], dataset: &Dataset) -> Result<DecodeOutcome, DimensionError> {
    decode_with_roles(genes, dataset, |j, c, s| centred_interval(j, dataset, c, s))
}

/// Attributes with `AE ≤ 0.5` are included. The included attribute with
/// the largest `AE` (lowest index on ties) forms the consequent; the rest
/// form the antecedent.
pub fn decode_ae_av(genes: &[f64], dataset: &Dataset) -> Result<DecodeOutcome, DimensionError> {
    let n = dataset.num_attributes();
    check_len(genes, 3 * n)?;
    let included: Vec<(usize, f64)> = genes
        .chunks_exact(3)
        .enumerate()
        .map(|(j, t)| (j, unit(t[0])))
        .filter(|&(_, ae)| ae <= 0.5)
        .collect();
    let Some(&(head, _)) = included
        .iter()
        .fold(None::<&(usize, f64)>, |best, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
    else {
        return Ok(DecodeOutcome::Infeasible(Infeasibility::EmptyAntecedent));
    };
    let cond = |j: usize| ordered_interval(j, dataset, genes[3 * j + 1], genes[3 * j + 2]);
    let antecedent = included.iter().filter(|&&(j, _)| j != head).map(|&(j, _)| cond(j)).collect();
    Ok(assemble(antecedent, vec![cond(head)]))
}

/// Position genes select attributes (`0` omits, duplicates are dropped);
/// the cut gene splits the selection into antecedent and consequent.
/// Numeric attributes receive their full domain. For categorical
/// attributes the fractional part of the position gene picks the category.
pub fn decode_cutpoint(genes: &[f64], dataset: &Dataset) -> Result<DecodeOutcome, DimensionError> {
    let n = dataset.num_attributes();
    check_len(genes, n + 1)?;
    let slots = (n + 1) as f64;
    let mut selected: Vec<Condition> = Vec::new();
    let mut seen = vec![false; n];
    for &g in &genes[1..] {
        let scaled = unit(g) * slots;
        let index = (scaled.floor() as usize).min(n);
        if index == 0 || seen[index - 1] {
            continue;
        }
        seen[index - 1] = true;
        let frac = (scaled - index as f64).clamp(0.0, 1.0);
        selected.push(full_domain(index - 1, dataset, frac));
    }
    let k = selected.len();
    match k {
        0 => return Ok(DecodeOutcome::Infeasible(Infeasibility::EmptyAntecedent)),
        1 => return Ok(DecodeOutcome::Infeasible(Infeasibility::EmptyConsequent)),
        _ => {}
    }
    let cut = 1 + ((unit(genes[0]) * (k - 1) as f64).floor() as usize).min(k - 2);
    let consequent = selected.split_off(cut);
    Ok(assemble(selected, consequent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ColumnData;
    use crate::rule::Predicate;

    fn dataset(n: usize) -> Dataset {
        Dataset::from_columns(
            (0..n)
                .map(|j| (format!("a{j}"), ColumnData::Numeric(vec![0.0, 10.0, 5.0])))
                .collect(),
        )
        .unwrap()
    }

    fn attrs(conds: &[Condition]) -> Vec<usize> {
        conds.iter().map(|c| c.attribute).collect()
    }

    #[test]
    fn acn_thresholds() {
        assert_eq!(acn_role(0.2), Role::Antecedent);
        assert_eq!(acn_role(1.0 / 3.0), Role::Antecedent);
        assert_eq!(acn_role(2.0 / 3.0), Role::Consequent);
        assert_eq!(acn_role(0.9), Role::Absent);
    }

    #[test]
    fn triplet_roles_and_interval() {
        let ds = dataset(3);
        let g = [0.2, 0.8, 0.2, 0.5, 0.0, 1.0, 0.9, 0.3, 0.3];
        let rule = decode_triplet(&g, &ds).unwrap().into_rule().unwrap();
        assert_eq!(attrs(rule.antecedent()), vec![0]);
        assert_eq!(attrs(rule.consequent()), vec![1]);
        assert_eq!(rule.antecedent()[0].predicate, Predicate::Interval { lb: 2.0, ub: 8.0 });
        assert_eq!(rule.consequent()[0].predicate, Predicate::Interval { lb: 0.0, ub: 10.0 });
    }

    #[test]
    fn triplet_all_absent_is_infeasible() {
        let ds = dataset(3);
        let g = [0.9; 9];
        assert_eq!(
            decode_triplet(&g, &ds).unwrap(),
            DecodeOutcome::Infeasible(Infeasibility::EmptyAntecedent)
        );
        let only_consequent = [0.5, 0.1, 0.2, 0.9, 0.0, 0.0, 0.9, 0.0, 0.0];
        assert_eq!(
            decode_triplet(&only_consequent, &ds).unwrap(),
            DecodeOutcome::Infeasible(Infeasibility::EmptyAntecedent)
        );
        let only_antecedent = [0.1, 0.1, 0.2, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(
            decode_triplet(&only_antecedent, &ds).unwrap(),
            DecodeOutcome::Infeasible(Infeasibility::EmptyConsequent)
        );
    }

    #[test]
    fn wrong_length_is_dimension_error() {
        let ds = dataset(2);
        for scheme in [Scheme::Triplet, Scheme::AeAv, Scheme::Gaussian, Scheme::CutPoint] {
            let err = scheme.decode(&[0.5; 4], &ds).unwrap_err();
            assert_eq!(err.actual, 4);
            assert_eq!(err.expected, scheme.dimension(2));
        }
    }

    #[test]
    fn ae_av_consequent_is_largest_included() {
        let ds = dataset(3);
        let g = [0.1, 0.0, 1.0, 0.4, 0.2, 0.8, 0.9, 0.0, 1.0];
        let rule = decode_ae_av(&g, &ds).unwrap().into_rule().unwrap();
        assert_eq!(attrs(rule.antecedent()), vec![0]);
        assert_eq!(attrs(rule.consequent()), vec![1]);
        assert_eq!(rule.consequent()[0].predicate, Predicate::Interval { lb: 2.0, ub: 8.0 });
    }

    #[test]
    fn ae_av_infeasible_cases() {
        let ds = dataset(3);
        assert_eq!(
            decode_ae_av(&[0.9; 9], &ds).unwrap(),
            DecodeOutcome::Infeasible(Infeasibility::EmptyAntecedent)
        );
        let one = [0.3, 0.0, 1.0, 0.9, 0.0, 1.0, 0.9, 0.0, 1.0];
        assert_eq!(
            decode_ae_av(&one, &ds).unwrap(),
            DecodeOutcome::Infeasible(Infeasibility::EmptyAntecedent)
        );
    }

    #[test]
    fn gaussian_intervals() {
        let ds = dataset(2);
        let zero_width = decode_gaussian(&[0.1, 0.3, 0.0, 0.5, 0.5, 1.0], &ds).unwrap();
        let rule = zero_width.into_rule().unwrap();
        assert_eq!(rule.antecedent()[0].predicate, Predicate::Interval { lb: 3.0, ub: 3.0 });
        assert_eq!(rule.consequent()[0].predicate, Predicate::Interval { lb: 0.0, ub: 10.0 });

        let edge = decode_gaussian(&[0.1, 0.95, 0.8, 0.5, 0.02, 0.9], &ds).unwrap();
        for c in edge.rule().unwrap().conditions() {
            let Predicate::Interval { lb, ub } = c.predicate else { panic!() };
            assert!(0.0 <= lb && lb <= ub && ub <= 10.0);
        }
    }

    #[test]
    fn cutpoint_selection() {
        let ds = dataset(3);
        // n = 3, slots = 4: 0.55 → index 2, 0.8 → index 3, 0.1 → omitted
        let rule = decode_cutpoint(&[0.0, 0.55, 0.8, 0.1], &ds).unwrap().into_rule().unwrap();
        assert_eq!(attrs(rule.antecedent()), vec![1]);
        assert_eq!(attrs(rule.consequent()), vec![2]);
        assert_eq!(rule.antecedent()[0].predicate, Predicate::Interval { lb: 0.0, ub: 10.0 });
    }

    #[test]
    fn cutpoint_omits_and_drops_duplicates() {
        let ds = dataset(3);
        assert_eq!(
            decode_cutpoint(&[0.5, 0.0, 0.1, 0.2], &ds).unwrap(),
            DecodeOutcome::Infeasible(Infeasibility::EmptyAntecedent)
        );
        assert_eq!(
            decode_cutpoint(&[0.5, 0.3, 0.3, 0.0], &ds).unwrap(),
            DecodeOutcome::Infeasible(Infeasibility::EmptyConsequent)
        );
        let rule = decode_cutpoint(&[1.0, 0.3, 0.3, 0.8], &ds).unwrap().into_rule().unwrap();
        assert_eq!(rule.len(), 2);
    }

    #[test]
    fn cutpoint_cut_spans_all_splits() {
        let ds = dataset(3);
        let sizes: Vec<usize> = [0.0, 0.49, 0.5, 1.0]
            .iter()
            .map(|&cp| {
                decode_cutpoint(&[cp, 0.3, 0.55, 0.8], &ds)
                    .unwrap()
                    .into_rule()
                    .unwrap()
                    .antecedent()
                    .len()
            })
            .collect();
        assert_eq!(sizes, vec![1, 1, 2, 2]);
    }

    #[test]
    fn categorical_binning() {
        let ds = Dataset::from_columns(vec![
            ("c".into(), ColumnData::Categorical(vec!["x".into(), "y".into(), "z".into()])),
            ("n".into(), ColumnData::Numeric(vec![0.0, 1.0, 2.0])),
        ])
        .unwrap();
        for (gene, expected) in [(0.0, 0), (0.34, 1), (0.99, 2), (1.0, 2)] {
            let rule =
                decode_triplet(&[0.0, gene, 0.0, 0.5, 0.0, 1.0], &ds).unwrap().into_rule().unwrap();
            assert_eq!(rule.antecedent()[0].predicate, Predicate::Category(expected));
        }
    }
}
