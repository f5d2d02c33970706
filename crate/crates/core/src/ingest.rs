//! Reading, validating and ordering p-value datasets.
//!
//! Three text layouts are accepted: plain (one value per line, `#` starts a
//! comment line), CSV and TSV (both with a header row). Every p-value must
//! satisfy `0 < p <= 1`; zeros are rejected unless the caller opts into
//! replacing them with a chosen positive value.

use std::collections::HashSet;
use std::io::Read;

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("line {line}: p-value {value:?} is not a number")]
    NonNumeric { line: usize, value: String },
    #[error("line {line}: p-value {value} is outside (0, 1]")]
    OutOfRange { line: usize, value: String },
    #[error("duplicate test id {0:?}")]
    DuplicateId(String),
    #[error("column {0} not found in header")]
    MissingColumn(String),
    #[error("line {line}: row has no field for column {column}")]
    MissingField { line: usize, column: String },
    #[error("clamp_zero must be in (0, 1], got {0}")]
    InvalidClamp(String),
    #[error("malformed delimited input: {0}")]
    Malformed(#[from] csv::Error),
    #[error("reading input: {0}")]
    Io(#[from] std::io::Error),
}

/// One observed p-value with its label.
#[derive(Debug, Clone, PartialEq)]
pub struct TestRecord<T> {
    pub id: String,
    pub p: T,
}

/// Validated p-values in input order. `m() >= 1` and ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueSet<T> {
    records: Vec<TestRecord<T>>,
}

impl<T: Scalar> PValueSet<T> {
    /// Validates the records. Line numbers in errors are 1-based record
    /// positions here, since there is no source file.
    pub fn new(records: Vec<TestRecord<T>>) -> Result<Self, IngestError> {
        if records.is_empty() {
            return Err(IngestError::EmptyInput);
        }
        let mut seen = HashSet::with_capacity(records.len());
        for (idx, rec) in records.iter().enumerate() {
            if !valid_p(rec.p) {
                return Err(IngestError::OutOfRange {
                    line: idx + 1,
                    value: rec.p.to_string(),
                });
            }
            if !seen.insert(rec.id.as_str()) {
                return Err(IngestError::DuplicateId(rec.id.clone()));
            }
        }
        Ok(Self { records })
    }

    /// Builds a set with synthesized ids `test_1`, `test_2`, ...
    pub fn from_pvalues(pvalues: Vec<T>) -> Result<Self, IngestError> {
        let records = pvalues
            .into_iter()
            .enumerate()
            .map(|(idx, p)| TestRecord {
                id: synthetic_id(idx + 1),
                p,
            })
            .collect();
        Self::new(records)
    }

    pub fn records(&self) -> &[TestRecord<T>] {
        &self.records
    }

    pub fn m(&self) -> usize {
        self.records.len()
    }

    pub fn pvalues(&self) -> Vec<T> {
        self.records.iter().map(|r| r.p).collect()
    }
}

/// A test at its position in the ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedTest<T> {
    /// 1-based rank.
    pub rank: usize,
    pub id: String,
    pub p: T,
}

/// p-values in nondecreasing order with consecutive ranks `1..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedTests<T> {
    entries: Vec<OrderedTest<T>>,
}

impl<T: Scalar> OrderedTests<T> {
    pub fn entries(&self) -> &[OrderedTest<T>] {
        &self.entries
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    /// The p-value at 1-based `rank`.
    pub fn p(&self, rank: usize) -> T {
        self.entries[rank - 1].p
    }

    pub fn pvalues(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.p).collect()
    }

    /// Back to a plain set, in rank order.
    pub fn to_set(&self) -> PValueSet<T> {
        PValueSet {
            records: self
                .entries
                .iter()
                .map(|e| TestRecord {
                    id: e.id.clone(),
                    p: e.p,
                })
                .collect(),
        }
    }
}

/// Sorts ascending by p. Ties keep input order, so equal p-values get
/// distinct consecutive ranks.
pub fn order_tests<T: Scalar>(set: &PValueSet<T>) -> OrderedTests<T> {
    let mut records: Vec<&TestRecord<T>> = set.records.iter().collect();
    // validated p-values are never NaN
    records.sort_by(|a, b| a.p.partial_cmp(&b.p).expect("p-values are comparable"));
    let entries = records
        .into_iter()
        .enumerate()
        .map(|(idx, rec)| OrderedTest {
            rank: idx + 1,
            id: rec.id.clone(),
            p: rec.p,
        })
        .collect();
    OrderedTests { entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Plain,
    Csv,
    Tsv,
}

impl Format {
    /// Guess from a file extension: `.csv`, `.tsv`/`.tab`, anything else is plain.
    pub fn from_extension(ext: Option<&str>) -> Self {
        match ext.map(|e| e.to_ascii_lowercase()).as_deref() {
            Some("csv") => Format::Csv,
            Some("tsv") | Some("tab") => Format::Tsv,
            _ => Format::Plain,
        }
    }
}

/// Selects a column of a delimited file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Name(String),
    /// 0-based field index.
    Index(usize),
}

impl Column {
    fn resolve(&self, headers: &csv::StringRecord) -> Option<usize> {
        match self {
            Column::Name(name) => headers.iter().position(|h| h.trim() == name),
            Column::Index(idx) => (*idx < headers.len()).then_some(*idx),
        }
    }

    fn describe(&self) -> String {
        match self {
            Column::Name(name) => format!("{name:?}"),
            Column::Index(idx) => format!("#{idx}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseOptions<T> {
    /// Column holding p. Defaults to the column named `p`.
    pub p_column: Column,
    /// Column holding ids. When unset, a column named `id` is used if the
    /// header has one; otherwise ids are synthesized as `test_<row>`.
    pub id_column: Option<Column>,
    /// Replacement for p-values equal to zero.
    pub clamp_zero: Option<T>,
}

impl<T> Default for ParseOptions<T> {
    fn default() -> Self {
        Self {
            p_column: Column::Name("p".to_string()),
            id_column: None,
            clamp_zero: None,
        }
    }
}

/// Parses a p-value dataset. Errors carry the 1-based line number in the
/// source text of the first offending row.
pub fn parse_pvalues<T: Scalar, R: Read>(
    mut reader: R,
    format: Format,
    options: &ParseOptions<T>,
) -> Result<PValueSet<T>, IngestError> {
    if let Some(c) = options.clamp_zero {
        if !valid_p(c) {
            return Err(IngestError::InvalidClamp(c.to_string()));
        }
    }
    let records = match format {
        Format::Plain => {
            let mut text = String::new();
            reader.read_to_string(&mut text)?;
            parse_plain(&text, options.clamp_zero)?
        }
        Format::Csv => parse_delimited(reader, b',', options)?,
        Format::Tsv => parse_delimited(reader, b'\t', options)?,
    };
    PValueSet::new(records)
}

fn parse_plain<T: Scalar>(text: &str, clamp: Option<T>) -> Result<Vec<TestRecord<T>>, IngestError> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let field = line.trim();
        if field.is_empty() || field.starts_with('#') {
            continue;
        }
        let p = parse_p(field, idx + 1, clamp)?;
        records.push(TestRecord {
            id: synthetic_id(records.len() + 1),
            p,
        });
    }
    if records.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(records)
}

fn parse_delimited<T: Scalar, R: Read>(
    reader: R,
    delimiter: u8,
    options: &ParseOptions<T>,
) -> Result<Vec<TestRecord<T>>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let p_idx = options
        .p_column
        .resolve(&headers)
        .ok_or_else(|| IngestError::MissingColumn(options.p_column.describe()))?;
    let id_idx = match &options.id_column {
        Some(col) => Some(
            col.resolve(&headers)
                .ok_or_else(|| IngestError::MissingColumn(col.describe()))?,
        ),
        None => Column::Name("id".to_string()).resolve(&headers),
    };

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |pos| pos.line() as usize);
        if row.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let field = |idx: usize, col: &dyn Fn() -> String| {
            row.get(idx).ok_or_else(|| IngestError::MissingField {
                line,
                column: col(),
            })
        };
        let p = parse_p(
            field(p_idx, &|| options.p_column.describe())?.trim(),
            line,
            options.clamp_zero,
        )?;
        let id = match id_idx {
            Some(idx) => field(idx, &|| "id".to_string())?.trim().to_string(),
            None => synthetic_id(records.len() + 1),
        };
        records.push(TestRecord { id, p });
    }
    if records.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(records)
}

fn parse_p<T: Scalar>(field: &str, line: usize, clamp: Option<T>) -> Result<T, IngestError> {
    let p: T = field.parse().map_err(|_| IngestError::NonNumeric {
        line,
        value: field.to_string(),
    })?;
    if p.is_nan() {
        return Err(IngestError::NonNumeric {
            line,
            value: field.to_string(),
        });
    }
    match clamp {
        Some(c) if p == T::zero() => Ok(c),
        _ if valid_p(p) => Ok(p),
        _ => Err(IngestError::OutOfRange {
            line,
            value: field.to_string(),
        }),
    }
}

fn valid_p<T: Scalar>(p: T) -> bool {
    p > T::zero() && p <= T::one()
}

pub(crate) fn synthetic_id(row: usize) -> String {
    format!("test_{row}")
}
