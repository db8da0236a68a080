//! In-memory transaction table with typed attributes.
//!
//! Columns are stored column-major. Numeric attributes carry their observed
//! bounds, categorical attributes carry their distinct values in order of
//! first occurrence. Cells of categorical columns are stored as indices into
//! that list.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rule::{Predicate, Rule};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("rule references attribute {index}, dataset has {count}")]
    Index { index: usize, count: usize },
    #[error("condition on attribute {index} does not match its kind")]
    KindMismatch { index: usize },
}

impl DatasetError {
    fn format(msg: impl Into<String>) -> Self {
        DatasetError::Format(msg.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindHint {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    Numeric { min: f64, max: f64 },
    Categorical { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttributeKind::Numeric { .. })
    }

    /// `(min, max)` for numeric attributes.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self.kind {
            AttributeKind::Numeric { min, max } => Some((min, max)),
            AttributeKind::Categorical { .. } => None,
        }
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.kind {
            AttributeKind::Categorical { categories } => Some(categories),
            AttributeKind::Numeric { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<usize>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }
}

/// Raw column content used to build a [`Dataset`] programmatically.
#[derive(Debug, Clone)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

/// A single cell value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Numeric(f64),
    Category(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoverageCounts {
    pub antecedent_count: usize,
    pub consequent_count: usize,
    pub both_count: usize,
}

/// Column kind overrides, one `name,kind` line per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub columns: Vec<(String, KindHint)>,
}

impl Schema {
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut columns = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, kind) = line.split_once(',').ok_or_else(|| {
                DatasetError::format(format!("schema line {}: expected `name,kind`", lineno + 1))
            })?;
            let kind = match kind.trim().to_ascii_lowercase().as_str() {
                "numeric" => KindHint::Numeric,
                "categorical" => KindHint::Categorical,
                other => {
                    return Err(DatasetError::format(format!(
                        "schema line {}: unknown kind `{other}`",
                        lineno + 1
                    )))
                }
            };
            columns.push((name.trim().to_string(), kind));
        }
        Ok(Schema { columns })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    attributes: Vec<Attribute>,
    columns: Vec<Column>,
    rows: usize,
}

impl Dataset {
    /// Builds a dataset from named columns, computing numeric bounds and
    /// category lists from the data.
    pub fn from_columns(columns: Vec<(String, ColumnData)>) -> Result<Self, DatasetError> {
        if columns.is_empty() {
            return Err(DatasetError::format("dataset has no columns"));
        }
        let rows = match &columns[0].1 {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        };
        if rows == 0 {
            return Err(DatasetError::format("dataset has no rows"));
        }
        let mut attributes = Vec::with_capacity(columns.len());
        let mut stored = Vec::with_capacity(columns.len());
        for (name, data) in columns {
            let (attribute, column) = match data {
                ColumnData::Numeric(values) => {
                    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                        return Err(DatasetError::format(format!(
                            "column `{name}` contains non-finite value {bad}"
                        )));
                    }
                    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (
                        Attribute { name, kind: AttributeKind::Numeric { min, max } },
                        Column::Numeric(values),
                    )
                }
                ColumnData::Categorical(values) => {
                    let mut categories: Vec<String> = Vec::new();
                    let mut lookup: HashMap<String, usize> = HashMap::new();
                    let mut cells = Vec::with_capacity(values.len());
                    for v in values {
                        let idx = *lookup.entry(v.clone()).or_insert_with(|| {
                            categories.push(v);
                            categories.len() - 1
                        });
                        cells.push(idx);
                    }
                    (
                        Attribute { name, kind: AttributeKind::Categorical { categories } },
                        Column::Categorical(cells),
                    )
                }
            };
            if column.len() != rows {
                return Err(DatasetError::format(format!(
                    "column `{}` has {} rows, expected {rows}",
                    attribute.name,
                    column.len()
                )));
            }
            attributes.push(attribute);
            stored.push(column);
        }
        Ok(Dataset { attributes, columns: stored, rows })
    }

    pub fn load_csv(path: impl AsRef<Path>, header: bool) -> Result<Self, DatasetError> {
        Self::load_csv_with_schema(path, header, None)
    }

    pub fn load_csv_with_schema(
        path: impl AsRef<Path>,
        header: bool,
        schema: Option<&Schema>,
    ) -> Result<Self, DatasetError> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file, header, schema)
    }

    /// Parses CSV text. Kinds are inferred per column unless `schema`
    /// overrides them: a column is numeric when every cell parses as a
    /// finite real.
    pub fn read_csv<R: Read>(
        reader: R,
        header: bool,
        schema: Option<&Schema>,
    ) -> Result<Self, DatasetError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let mut records = rdr.records();
        let mut names: Option<Vec<String>> = None;
        if header {
            match records.next() {
                Some(rec) => {
                    let rec = rec.map_err(csv_error)?;
                    names = Some(rec.iter().map(str::to_string).collect());
                }
                None => return Err(DatasetError::format("empty file")),
            }
        }

        let mut cells: Vec<Vec<String>> = Vec::new();
        let mut width = names.as_ref().map(Vec::len);
        for (i, rec) in records.enumerate() {
            let rec = rec.map_err(csv_error)?;
            let line = i + 1 + usize::from(header);
            let expected = *width.get_or_insert(rec.len());
            if rec.len() != expected {
                return Err(DatasetError::format(format!(
                    "line {line}: {} fields, expected {expected}",
                    rec.len()
                )));
            }
            if cells.is_empty() {
                cells = vec![Vec::new(); expected];
            }
            for (j, field) in rec.iter().enumerate() {
                if field.is_empty() {
                    return Err(DatasetError::format(format!(
                        "line {line}, column {}: blank cell",
                        j + 1
                    )));
                }
                cells[j].push(field.to_string());
            }
        }

        let width = width.unwrap_or(0);
        if cells.is_empty() || cells[0].is_empty() {
            return Err(DatasetError::format("no data rows"));
        }
        if width < 2 {
            return Err(DatasetError::format(format!("need at least 2 columns, found {width}")));
        }

        let names = match (names, schema) {
            (Some(names), Some(schema)) => {
                check_schema(schema, width)?;
                for (name, (sname, _)) in names.iter().zip(&schema.columns) {
                    if name != sname {
                        return Err(DatasetError::format(format!(
                            "schema column `{sname}` does not match header `{name}`"
                        )));
                    }
                }
                names
            }
            (Some(names), None) => names,
            (None, Some(schema)) => {
                check_schema(schema, width)?;
                schema.columns.iter().map(|(n, _)| n.clone()).collect()
            }
            (None, None) => (0..width).map(|j| format!("col{j}")).collect(),
        };

        let mut columns = Vec::with_capacity(width);
        for (j, (name, raw)) in names.into_iter().zip(cells).enumerate() {
            let hint = schema.map(|s| s.columns[j].1);
            let parsed: Option<Vec<f64>> = raw
                .iter()
                .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect();
            let data = match (hint, parsed) {
                (Some(KindHint::Categorical), _) => ColumnData::Categorical(raw),
                (Some(KindHint::Numeric), None) => {
                    return Err(DatasetError::format(format!(
                        "column `{name}` declared numeric but has non-numeric cells"
                    )))
                }
                (_, Some(values)) => ColumnData::Numeric(values),
                (None, None) => ColumnData::Categorical(raw),
            };
            columns.push((name, data));
        }
        Self::from_columns(columns)
    }

    /// Writes the dataset as CSV with a header row. Numeric cells use the
    /// shortest representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DatasetError> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(self.attributes.iter().map(|a| a.name.as_str()))
            .map_err(csv_error)?;
        let mut record = Vec::with_capacity(self.attributes.len());
        for row in 0..self.rows {
            record.clear();
            for (attr, col) in self.attributes.iter().zip(&self.columns) {
                record.push(match col {
                    Column::Numeric(v) => v[row].to_string(),
                    Column::Categorical(v) => {
                        attr.categories().expect("categorical column")[v[row]].clone()
                    }
                });
            }
            wtr.write_record(&record).map_err(csv_error)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> Option<&Attribute> {
        self.attributes.get(index)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    /// Number of transactions, `M`.
    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn value(&self, row: usize, attribute: usize) -> Value {
        match &self.columns[attribute] {
            Column::Numeric(v) => Value::Numeric(v[row]),
            Column::Categorical(v) => Value::Category(v[row]),
        }
    }

    /// SHA-256 over attribute names, kinds and every cell, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.rows as u64).to_le_bytes());
        for (attr, col) in self.attributes.iter().zip(&self.columns) {
            hasher.update(attr.name.as_bytes());
            hasher.update([0u8]);
            match col {
                Column::Numeric(v) => {
                    hasher.update(b"N");
                    for x in v {
                        hasher.update(x.to_bits().to_le_bytes());
                    }
                }
                Column::Categorical(v) => {
                    hasher.update(b"C");
                    let cats = attr.categories().expect("categorical column");
                    for &c in v {
                        hasher.update(cats[c].as_bytes());
                        hasher.update([0u8]);
                    }
                }
            }
        }
        hex::encode(hasher.finalize())
    }

    /// Counts transactions covered by the antecedent, the consequent, and
    /// both. Numeric intervals are closed; categories match exactly.
    pub fn coverage(&self, rule: &Rule) -> Result<CoverageCounts, DatasetError> {
        for cond in rule.conditions() {
            let col = self.columns.get(cond.attribute).ok_or(DatasetError::Index {
                index: cond.attribute,
                count: self.columns.len(),
            })?;
            let ok = matches!(
                (&cond.predicate, col),
                (Predicate::Interval { .. }, Column::Numeric(_))
                    | (Predicate::Category(_), Column::Categorical(_))
            );
            if !ok {
                return Err(DatasetError::KindMismatch { index: cond.attribute });
            }
        }

        let holds = |row: usize, cond: &crate::rule::Condition| -> bool {
            match (&cond.predicate, &self.columns[cond.attribute]) {
                (Predicate::Interval { lb, ub }, Column::Numeric(v)) => {
                    *lb <= v[row] && v[row] <= *ub
                }
                (Predicate::Category(c), Column::Categorical(v)) => v[row] == *c,
                _ => unreachable!("kinds checked above"),
            }
        };

        let mut counts = CoverageCounts::default();
        for row in 0..self.rows {
            let a = rule.antecedent().iter().all(|c| holds(row, c));
            let c = rule.consequent().iter().all(|c| holds(row, c));
            counts.antecedent_count += usize::from(a);
            counts.consequent_count += usize::from(c);
            counts.both_count += usize::from(a && c);
        }
        Ok(counts)
    }
}

fn check_schema(schema: &Schema, width: usize) -> Result<(), DatasetError> {
    if schema.columns.len() != width {
        return Err(DatasetError::format(format!(
            "schema lists {} columns, data has {width}",
            schema.columns.len()
        )));
    }
    Ok(())
}

fn csv_error(err: csv::Error) -> DatasetError {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(e) => DatasetError::Io(e),
            _ => unreachable!(),
        }
    } else {
        DatasetError::Format(err.to_string())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Numeric(x) => write!(f, "{x}"),
            Value::Category(c) => write!(f, "#{c}"),
        }
    }
}
