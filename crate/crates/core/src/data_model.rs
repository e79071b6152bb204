//! Run tables: CSV ingestion, dimension type inference and role/sampling metadata.
//!
//! A [`RunTable`] is an immutable columnar store. Each column is one
//! [`Dimension`]; each row is one model run. Metadata updates produce a new
//! table that shares the column storage with the original.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::names::string_enum;

/// Default cap on the number of runs a table may hold.
pub const DEFAULT_MAX_RUNS: usize = 1000;

const IMAGE_EXTENSIONS: &[&str] = &[".png", ".jpg", ".jpeg", ".gif", ".webp", ".svg"];

string_enum! {
    /// Storage type of a dimension.
    pub enum DType as "dtype" {
        Quantitative => "Quantitative" | "q" | "scalar",
        Series1D => "Series1D" | "1d" | "series",
        ImageRef2D => "ImageRef2D" | "2d" | "image",
    }
}

string_enum! {
    /// Position of a dimension in the model's data flow.
    pub enum Role as "role" {
        InputControl => "InputControl" | "input" | "control",
        InputEnvironmental => "InputEnvironmental" | "environmental",
        OutputDirect => "OutputDirect" | "output" | "direct",
        OutputDerived => "OutputDerived" | "derived",
        Uncertainty => "Uncertainty",
        Unassigned => "Unassigned",
    }
}

string_enum! {
    /// How the runs were sampled along a dimension.
    pub enum Sampling as "sampling" {
        Regular => "Regular",
        Stochastic => "Stochastic" | "random",
        Unknown => "Unknown",
    }
}

impl Role {
    pub fn is_input(self) -> bool {
        matches!(self, Role::InputControl | Role::InputEnvironmental)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub dtype: DType,
    pub role: Role,
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_length: Option<usize>,
}

impl Dimension {
    pub fn new(name: impl Into<String>, dtype: DType) -> Self {
        Dimension {
            name: name.into(),
            dtype,
            role: Role::Unassigned,
            sampling: Sampling::Unknown,
            series_length: None,
        }
    }

    pub fn series(name: impl Into<String>, length: usize) -> Self {
        Dimension {
            series_length: Some(length),
            ..Dimension::new(name, DType::Series1D)
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }
}

/// Column storage, one variant per [`DType`].
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Quantitative(Vec<f64>),
    Series(Vec<Vec<f64>>),
    /// `None` marks an empty cell, rendered as a placeholder.
    Image(Vec<Option<String>>),
}

impl Column {
    fn empty_for(dtype: DType) -> Column {
        match dtype {
            DType::Quantitative => Column::Quantitative(Vec::new()),
            DType::Series1D => Column::Series(Vec::new()),
            DType::ImageRef2D => Column::Image(Vec::new()),
        }
    }
}

/// One cell of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value<'a> {
    Number(f64),
    Series(&'a [f64]),
    Image(Option<&'a str>),
}

/// Row view over a [`RunTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct Run<'a> {
    pub id: usize,
    pub values: Vec<Value<'a>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("input is empty")]
    EmptyInput,
    #[error("header column {column} has an empty name")]
    EmptyHeaderName { column: usize },
    #[error("duplicate header `{0}`")]
    DuplicateHeader(String),
    #[error("row {row} has {found} cells, header has {expected}")]
    RowArityMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("column `{column}` row {row}: cell does not match the column type")]
    TypeConflict { column: String, row: usize },
    #[error("column `{column}` row {row}: missing value")]
    MissingValue { column: String, row: usize },
    #[error("column `{column}` row {row}: series length differs from earlier rows")]
    SeriesLengthMismatch { column: String, row: usize },
    #[error("{runs} runs exceed the limit of {max}")]
    RunLimitExceeded { runs: usize, max: usize },
    #[error("column `{0}` mixes incompatible cell types")]
    MixedTypes(String),
    #[error("column `{0}` has no values")]
    AllEmpty(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::EmptyInput => "EmptyInput",
            IngestError::EmptyHeaderName { .. } => "EmptyHeaderName",
            IngestError::DuplicateHeader(_) => "DuplicateHeader",
            IngestError::RowArityMismatch { .. } => "RowArityMismatch",
            IngestError::TypeConflict { .. } => "TypeConflict",
            IngestError::MissingValue { .. } => "MissingValue",
            IngestError::SeriesLengthMismatch { .. } => "SeriesLengthMismatch",
            IngestError::RunLimitExceeded { .. } => "RunLimitExceeded",
            IngestError::MixedTypes(_) => "MixedTypes",
            IngestError::AllEmpty(_) => "AllEmpty",
            IngestError::Csv(_) => "Csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetadataError {
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("invalid metadata sidecar: {0}")]
    InvalidSidecar(String),
}

impl MetadataError {
    pub fn code(&self) -> &'static str {
        match self {
            MetadataError::UnknownDimension(_) => "UnknownDimension",
            MetadataError::InvalidSidecar(_) => "InvalidSidecar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    pub max_runs: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            max_runs: DEFAULT_MAX_RUNS,
        }
    }
}

/// Result of [`infer_dtype`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inferred {
    pub dtype: DType,
    /// Length of the first non-empty cell, for `Series1D` columns.
    pub series_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Empty,
    Series(Vec<f64>),
    Image(String),
    Number(f64),
    Other,
}

impl Cell {
    fn dtype(&self) -> Option<DType> {
        match self {
            Cell::Series(_) => Some(DType::Series1D),
            Cell::Image(_) => Some(DType::ImageRef2D),
            Cell::Number(_) => Some(DType::Quantitative),
            Cell::Empty | Cell::Other => None,
        }
    }
}

fn classify(raw: &str) -> Cell {
    let s = raw.trim();
    if s.is_empty() {
        return Cell::Empty;
    }
    if let Some(series) = parse_series(s) {
        return Cell::Series(series);
    }
    if is_image_ref(s) {
        return Cell::Image(s.to_string());
    }
    match parse_number(s) {
        Some(v) => Cell::Number(v),
        None => Cell::Other,
    }
}

fn parse_series(s: &str) -> Option<Vec<f64>> {
    if !(s.starts_with('[') && s.ends_with(']')) {
        return None;
    }
    let normalized = s.replace('\u{2212}', "-");
    let values: Vec<f64> = serde_json::from_str(&normalized).ok()?;
    (!values.is_empty() && values.iter().all(|v| v.is_finite())).then_some(values)
}

fn parse_number(s: &str) -> Option<f64> {
    let normalized = s.replace('\u{2212}', "-");
    let v: f64 = normalized.parse().ok()?;
    v.is_finite().then_some(v)
}

fn is_image_ref(s: &str) -> bool {
    let lower = s.to_ascii_lowercase();
    let path = if lower.starts_with("http://") || lower.starts_with("https://") {
        lower.split(['?', '#']).next().unwrap_or_default()
    } else {
        lower.as_str()
    };
    IMAGE_EXTENSIONS
        .iter()
        .any(|ext| path.len() > ext.len() && path.ends_with(ext))
}

/// Infers the dtype of a column from its raw cells.
///
/// Precedence is `Series1D > ImageRef2D > Quantitative`; empty cells are ignored.
pub fn infer_dtype<S: AsRef<str>>(column: &str, cells: &[S]) -> Result<Inferred, IngestError> {
    let classified: Vec<Cell> = cells.iter().map(|c| classify(c.as_ref())).collect();
    infer_from_cells(column, &classified)
}

fn infer_from_cells(column: &str, cells: &[Cell]) -> Result<Inferred, IngestError> {
    let mut present = cells.iter().filter(|c| **c != Cell::Empty).peekable();
    let first = present
        .peek()
        .copied()
        .ok_or_else(|| IngestError::AllEmpty(column.to_string()))?;
    let all = |dtype: DType| {
        cells
            .iter()
            .filter(|c| **c != Cell::Empty)
            .all(|c| c.dtype() == Some(dtype))
    };
    for dtype in [DType::Series1D, DType::ImageRef2D, DType::Quantitative] {
        if all(dtype) {
            let series_length = match first {
                Cell::Series(v) => Some(v.len()),
                _ => None,
            };
            return Ok(Inferred {
                dtype,
                series_length,
            });
        }
    }
    Err(IngestError::MixedTypes(column.to_string()))
}

/// Parses a comma-delimited, RFC-4180 quoted run table.
pub fn load_csv(text: &str, options: &IngestOptions) -> Result<RunTable, IngestError> {
    if text.trim().is_empty() {
        return Err(IngestError::EmptyInput);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| IngestError::Csv(e.to_string()))?,
        None => return Err(IngestError::EmptyInput),
    };
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    let mut seen = HashSet::new();
    for (column, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(IngestError::EmptyHeaderName { column });
        }
        if !seen.insert(name.as_str()) {
            return Err(IngestError::DuplicateHeader(name.clone()));
        }
    }

    let width = names.len();
    let mut raw_rows: Vec<csv::StringRecord> = Vec::new();
    for (row, record) in records.enumerate() {
        let record = record.map_err(|e| IngestError::Csv(e.to_string()))?;
        if record.len() != width {
            return Err(IngestError::RowArityMismatch {
                row,
                expected: width,
                found: record.len(),
            });
        }
        raw_rows.push(record);
    }
    let run_count = raw_rows.len();
    if run_count > options.max_runs {
        return Err(IngestError::RunLimitExceeded {
            runs: run_count,
            max: options.max_runs,
        });
    }

    let mut dimensions = Vec::with_capacity(width);
    let mut columns = Vec::with_capacity(width);
    for (col, name) in names.iter().enumerate() {
        let cells: Vec<Cell> = raw_rows.iter().map(|r| classify(&r[col])).collect();
        let inferred = match infer_from_cells(name, &cells) {
            Ok(inferred) => inferred,
            Err(IngestError::MixedTypes(_)) => {
                return Err(first_conflict(name, &cells));
            }
            Err(e) => return Err(e),
        };
        let column = build_column(name, inferred, cells)?;
        let mut dim = Dimension::new(name.clone(), inferred.dtype);
        dim.series_length = inferred.series_length;
        dimensions.push(dim);
        columns.push(column);
    }

    Ok(RunTable {
        dimensions,
        columns: columns.into(),
        run_count,
        default_sampling: Sampling::Stochastic,
    })
}

/// Locates the first cell that disagrees with the column's first non-empty cell.
fn first_conflict(column: &str, cells: &[Cell]) -> IngestError {
    let expected = cells.iter().find_map(Cell::dtype);
    let row = cells
        .iter()
        .position(|c| *c != Cell::Empty && (c.dtype().is_none() || c.dtype() != expected))
        .unwrap_or(0);
    IngestError::TypeConflict {
        column: column.to_string(),
        row,
    }
}

fn build_column(name: &str, inferred: Inferred, cells: Vec<Cell>) -> Result<Column, IngestError> {
    let missing = |row| IngestError::MissingValue {
        column: name.to_string(),
        row,
    };
    match inferred.dtype {
        DType::Quantitative => cells
            .into_iter()
            .enumerate()
            .map(|(row, c)| match c {
                Cell::Number(v) => Ok(v),
                _ => Err(missing(row)),
            })
            .collect::<Result<_, _>>()
            .map(Column::Quantitative),
        DType::Series1D => {
            let expected = inferred.series_length.unwrap_or_default();
            cells
                .into_iter()
                .enumerate()
                .map(|(row, c)| match c {
                    Cell::Series(v) if v.len() == expected => Ok(v),
                    Cell::Series(_) => Err(IngestError::SeriesLengthMismatch {
                        column: name.to_string(),
                        row,
                    }),
                    _ => Err(missing(row)),
                })
                .collect::<Result<_, _>>()
                .map(Column::Series)
        }
        DType::ImageRef2D => Ok(Column::Image(
            cells
                .into_iter()
                .map(|c| match c {
                    Cell::Image(path) => Some(path),
                    _ => None,
                })
                .collect(),
        )),
    }
}

/// Immutable table of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTable {
    dimensions: Vec<Dimension>,
    columns: Arc<[Column]>,
    run_count: usize,
    default_sampling: Sampling,
}

/// Per-dimension role/sampling entry of a metadata sidecar.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
}

/// JSON sidecar carrying role/sampling metadata for a CSV run table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(default)]
    pub dimensions: BTreeMap<String, DimensionMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_sampling: Option<Sampling>,
}

impl Sidecar {
    pub fn from_json(text: &str) -> Result<Sidecar, MetadataError> {
        serde_json::from_str(text).map_err(|e| MetadataError::InvalidSidecar(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes")
    }
}

impl RunTable {
    /// A zero-run table carrying only a schema.
    pub fn schema_only(dimensions: Vec<Dimension>) -> Result<RunTable, IngestError> {
        let mut seen = HashSet::new();
        for (column, dim) in dimensions.iter().enumerate() {
            if dim.name.is_empty() {
                return Err(IngestError::EmptyHeaderName { column });
            }
            if !seen.insert(dim.name.as_str()) {
                return Err(IngestError::DuplicateHeader(dim.name.clone()));
            }
        }
        let columns: Vec<Column> = dimensions
            .iter()
            .map(|d| Column::empty_for(d.dtype))
            .collect();
        Ok(RunTable {
            dimensions,
            columns: columns.into(),
            run_count: 0,
            default_sampling: Sampling::Stochastic,
        })
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn run_count(&self) -> usize {
        self.run_count
    }

    pub fn default_sampling(&self) -> Sampling {
        self.default_sampling
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dimensions.iter().position(|d| d.name == name)
    }

    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn numbers(&self, name: &str) -> Option<&[f64]> {
        match self.columns.get(self.index_of(name)?)? {
            Column::Quantitative(v) => Some(v),
            _ => None,
        }
    }

    pub fn series(&self, name: &str) -> Option<&[Vec<f64>]> {
        match self.columns.get(self.index_of(name)?)? {
            Column::Series(v) => Some(v),
            _ => None,
        }
    }

    pub fn images(&self, name: &str) -> Option<&[Option<String>]> {
        match self.columns.get(self.index_of(name)?)? {
            Column::Image(v) => Some(v),
            _ => None,
        }
    }

    /// Sampling of `dim`, falling back to the table default when unknown.
    pub fn effective_sampling(&self, dim: &Dimension) -> Sampling {
        match dim.sampling {
            Sampling::Unknown => self.default_sampling,
            s => s,
        }
    }

    pub fn run(&self, id: usize) -> Option<Run<'_>> {
        (id < self.run_count).then(|| Run {
            id,
            values: self
                .columns
                .iter()
                .map(|col| match col {
                    Column::Quantitative(v) => Value::Number(v[id]),
                    Column::Series(v) => Value::Series(&v[id]),
                    Column::Image(v) => Value::Image(v[id].as_deref()),
                })
                .collect(),
        })
    }

    pub fn runs(&self) -> impl Iterator<Item = Run<'_>> + '_ {
        (0..self.run_count).filter_map(move |id| self.run(id))
    }

    /// Returns a copy with updated metadata for `name`; column storage is shared.
    pub fn set_metadata(
        &self,
        name: &str,
        role: Role,
        sampling: Sampling,
    ) -> Result<RunTable, MetadataError> {
        let idx = self
            .index_of(name)
            .ok_or_else(|| MetadataError::UnknownDimension(name.to_string()))?;
        let mut table = self.clone();
        table.dimensions[idx].role = role;
        table.dimensions[idx].sampling = sampling;
        Ok(table)
    }

    /// Applies every entry of a sidecar. Unknown names are rejected before anything changes.
    pub fn apply_sidecar(&self, sidecar: &Sidecar) -> Result<RunTable, MetadataError> {
        if let Some(missing) = sidecar
            .dimensions
            .keys()
            .find(|n| self.index_of(n).is_none())
        {
            return Err(MetadataError::UnknownDimension(missing.clone()));
        }
        let mut table = self.clone();
        if let Some(s) = sidecar.default_sampling {
            table.default_sampling = s;
        }
        for (name, meta) in &sidecar.dimensions {
            let dim = table
                .dimensions
                .iter_mut()
                .find(|d| &d.name == name)
                .expect("checked above");
            if let Some(role) = meta.role {
                dim.role = role;
            }
            if let Some(sampling) = meta.sampling {
                dim.sampling = sampling;
            }
        }
        Ok(table)
    }

    /// Writes the table back out as CSV. Series cells use the bracketed list syntax.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer
            .write_record(self.dimensions.iter().map(|d| d.name.as_str()))
            .expect("in-memory write");
        for id in 0..self.run_count {
            let record: Vec<String> = self
                .columns
                .iter()
                .map(|col| match col {
                    Column::Quantitative(v) => v[id].to_string(),
                    Column::Series(v) => format_series(&v[id]),
                    Column::Image(v) => v[id].clone().unwrap_or_default(),
                })
                .collect();
            writer.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

pub fn format_series(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(f64::to_string).collect();
    format!("[{}]", items.join(","))
}
