//! Crossfilter evaluation and the statistics behind each chart type.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::{Block, FixedBitSet};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::data_model::{DType, RunTable};
use crate::exec::Exec;

pub const DEFAULT_BINS: usize = 10;
/// Nodes per axis of the density grid.
pub const GRID_SIZE: usize = 64;
/// Probability mass enclosed by each extracted contour.
pub const CONTOUR_MASSES: [f64; 4] = [0.25, 0.5, 0.75, 0.9];

const BLOCK_BITS: usize = Block::BITS as usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("dimension `{0}` is not quantitative and cannot be filtered")]
    NonQuantitativeFilter(String),
    #[error("dimension `{dimension}` is not {expected}")]
    WrongDType { dimension: String, expected: DType },
    #[error("invalid range [{lo}, {hi}] on `{dimension}`")]
    InvalidRange { dimension: String, lo: f64, hi: f64 },
    #[error("bin count must be at least 1")]
    InvalidBinCount,
    #[error("unknown run {0}")]
    UnknownRun(usize),
    #[error("dimension `{0}` has zero extent")]
    DegenerateExtent(String),
    #[error("no run passes the current filters")]
    EmptySelection,
}

impl AnalyticsError {
    pub fn code(&self) -> &'static str {
        match self {
            AnalyticsError::UnknownDimension(_) => "UnknownDimension",
            AnalyticsError::NonQuantitativeFilter(_) => "NonQuantitativeFilter",
            AnalyticsError::WrongDType { .. } => "WrongDType",
            AnalyticsError::InvalidRange { .. } => "InvalidRange",
            AnalyticsError::InvalidBinCount => "InvalidBinCount",
            AnalyticsError::UnknownRun(_) => "UnknownRun",
            AnalyticsError::DegenerateExtent(_) => "DegenerateExtent",
            AnalyticsError::EmptySelection => "EmptySelection",
        }
    }
}

/// Closed per-dimension ranges plus the highlighted run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterState {
    #[serde(default)]
    pub ranges: BTreeMap<String, (f64, f64)>,
    #[serde(default)]
    pub selected_run: Option<usize>,
}

impl FilterState {
    pub fn with_range(mut self, dim: impl Into<String>, lo: f64, hi: f64) -> Self {
        self.ranges.insert(dim.into(), (lo, hi));
        self
    }

    pub fn validate(&self, table: &RunTable) -> Result<(), AnalyticsError> {
        for (name, &(lo, hi)) in &self.ranges {
            quantitative(table, name).map_err(|e| match e {
                AnalyticsError::WrongDType { dimension, .. } => {
                    AnalyticsError::NonQuantitativeFilter(dimension)
                }
                e => e,
            })?;
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(AnalyticsError::InvalidRange {
                    dimension: name.clone(),
                    lo,
                    hi,
                });
            }
        }
        match self.selected_run {
            Some(id) if id >= table.run_count() => Err(AnalyticsError::UnknownRun(id)),
            _ => Ok(()),
        }
    }
}

/// Highlights `id` in every view. Filters are left untouched.
pub fn select_run(
    f: &FilterState,
    table: &RunTable,
    id: usize,
) -> Result<FilterState, AnalyticsError> {
    if id >= table.run_count() {
        return Err(AnalyticsError::UnknownRun(id));
    }
    Ok(FilterState {
        selected_run: Some(id),
        ..f.clone()
    })
}

pub fn clear_selection(f: &FilterState) -> FilterState {
    FilterState {
        selected_run: None,
        ..f.clone()
    }
}

/// Runs passing every range of a [`FilterState`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterResult {
    pub pass: FixedBitSet,
    pub pass_count: usize,
}

impl FilterResult {
    pub fn all(run_count: usize) -> FilterResult {
        let mut pass = FixedBitSet::with_capacity(run_count);
        pass.insert_range(..);
        FilterResult {
            pass,
            pass_count: run_count,
        }
    }

    pub fn passes(&self, id: usize) -> bool {
        self.pass.contains(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.pass.ones()
    }

    pub fn run_count(&self) -> usize {
        self.pass.len()
    }
}

impl Serialize for FilterResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FilterResult", 2)?;
        st.serialize_field("pass", &self.ids().collect::<Vec<_>>())?;
        st.serialize_field("pass_count", &self.pass_count)?;
        st.end()
    }
}

fn quantitative<'t>(table: &'t RunTable, name: &str) -> Result<&'t [f64], AnalyticsError> {
    match table.dimension(name) {
        None => Err(AnalyticsError::UnknownDimension(name.to_string())),
        Some(d) if d.dtype != DType::Quantitative => Err(AnalyticsError::WrongDType {
            dimension: name.to_string(),
            expected: DType::Quantitative,
        }),
        Some(_) => Ok(table.numbers(name).expect("quantitative column")),
    }
}

fn series<'t>(table: &'t RunTable, name: &str) -> Result<&'t [Vec<f64>], AnalyticsError> {
    match table.dimension(name) {
        None => Err(AnalyticsError::UnknownDimension(name.to_string())),
        Some(d) if d.dtype != DType::Series1D => Err(AnalyticsError::WrongDType {
            dimension: name.to_string(),
            expected: DType::Series1D,
        }),
        Some(_) => Ok(table.series(name).expect("series column")),
    }
}

pub fn apply_filters(table: &RunTable, f: &FilterState) -> Result<FilterResult, AnalyticsError> {
    apply_filters_with(Exec::default(), table, f)
}

/// Conjunctive range filtering, one bitset block of runs at a time.
pub fn apply_filters_with(
    exec: Exec,
    table: &RunTable,
    f: &FilterState,
) -> Result<FilterResult, AnalyticsError> {
    f.validate(table)?;
    let n = table.run_count();
    if f.ranges.is_empty() {
        return Ok(FilterResult::all(n));
    }
    let filters: Vec<(&[f64], f64, f64)> = f
        .ranges
        .iter()
        .map(|(name, &(lo, hi))| (table.numbers(name).expect("validated"), lo, hi))
        .collect();
    let mut blocks: Vec<Block> = vec![0; n.div_ceil(BLOCK_BITS)];
    // Sixteen blocks per task keeps the per-task work well above scheduling cost.
    exec.fill_chunks(&mut blocks, 16, |first, chunk| {
        for (k, block) in chunk.iter_mut().enumerate() {
            let start = (first + k) * BLOCK_BITS;
            let end = (start + BLOCK_BITS).min(n);
            let mut word: Block = if end - start == BLOCK_BITS {
                Block::MAX
            } else {
                (1 << (end - start)) - 1
            };
            for &(values, lo, hi) in &filters {
                if word == 0 {
                    break;
                }
                let mut hit: Block = 0;
                for (bit, &v) in values[start..end].iter().enumerate() {
                    hit |= Block::from(lo <= v && v <= hi) << bit;
                }
                word &= hit;
            }
            *block = word;
        }
    });
    let pass = FixedBitSet::with_capacity_and_blocks(n, blocks);
    let pass_count = pass.count_ones(..);
    Ok(FilterResult { pass, pass_count })
}

/// Evaluates many filter states against one table.
pub fn apply_filters_batch(
    exec: Exec,
    table: &RunTable,
    states: &[FilterState],
) -> Vec<Result<FilterResult, AnalyticsError>> {
    exec.map_slice(states, |f| apply_filters_with(Exec::Sequential, table, f))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count_pass: usize,
    pub count_all: usize,
}

/// Equal-width bin edges over the full extent of `values`. The last edge is the maximum itself.
pub fn bin_edges(values: &[f64], bins: usize) -> Vec<f64> {
    let (min, max) = extent(values).unwrap_or((0.0, 0.0));
    let width = (max - min) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|k| min + k as f64 * width).collect();
    edges.push(max);
    edges
}

fn extent(values: &[f64]) -> Option<(f64, f64)> {
    let first = *values.first()?;
    Some(
        values
            .iter()
            .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))),
    )
}

/// Index of the bin holding `v`: right-open bins, the last one closed.
fn bin_index(edges: &[f64], v: f64) -> usize {
    let bins = edges.len() - 1;
    let (min, max) = (edges[0], edges[bins]);
    if max <= min {
        return 0;
    }
    let guess = ((v - min) / (max - min) * bins as f64).floor();
    let mut k = (guess.max(0.0) as usize).min(bins - 1);
    while k > 0 && v < edges[k] {
        k -= 1;
    }
    while k + 1 < bins && v >= edges[k + 1] {
        k += 1;
    }
    k
}

pub fn histogram(
    table: &RunTable,
    dim: &str,
    f: &FilterState,
    bins: usize,
) -> Result<Vec<Bin>, AnalyticsError> {
    let result = apply_filters(table, f)?;
    histogram_masked(table, dim, &result, bins)
}

/// Histogram with the pass set already computed.
pub fn histogram_masked(
    table: &RunTable,
    dim: &str,
    result: &FilterResult,
    bins: usize,
) -> Result<Vec<Bin>, AnalyticsError> {
    if bins == 0 {
        return Err(AnalyticsError::InvalidBinCount);
    }
    let values = quantitative(table, dim)?;
    let edges = bin_edges(values, bins);
    let mut all = vec![0usize; bins];
    let mut pass = vec![0usize; bins];
    for (id, &v) in values.iter().enumerate() {
        let k = bin_index(&edges, v);
        all[k] += 1;
        pass[k] += usize::from(result.passes(id));
    }
    Ok((0..bins)
        .map(|k| Bin {
            lo: edges[k],
            hi: edges[k + 1],
            count_pass: pass[k],
            count_all: all[k],
        })
        .collect())
}

/// Pass set plus one histogram per quantitative dimension, as needed after a slider move.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refresh {
    pub result: FilterResult,
    pub histograms: BTreeMap<String, Vec<Bin>>,
}

pub fn refresh(
    exec: Exec,
    table: &RunTable,
    f: &FilterState,
    bins: usize,
) -> Result<Refresh, AnalyticsError> {
    let result = apply_filters_with(exec, table, f)?;
    let dims: Vec<&str> = table
        .dimensions()
        .iter()
        .filter(|d| d.dtype == DType::Quantitative)
        .map(|d| d.name.as_str())
        .collect();
    let histograms = exec
        .map_slice(&dims, |d| {
            histogram_masked(table, d, &result, bins).map(|h| (d.to_string(), h))
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
    Ok(Refresh { result, histograms })
}

/// Kernel density sampled on a regular grid, normalized to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub bandwidth: (f64, f64),
    /// Row-major, `values[j * nx + i]` at `(x_i, y_j)`.
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Σ density · dx · dy over all nodes.
    pub fn riemann_sum(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx() * self.dy()
    }
}

/// Min-shifted weights scaled to mean 1. A constant weight column yields all ones.
pub fn normalized_weights(raw: &[f64]) -> Vec<f64> {
    let Some((min, _)) = extent(raw) else {
        return Vec::new();
    };
    let shifted: Vec<f64> = raw.iter().map(|w| w - min).collect();
    let mean = shifted.iter().sum::<f64>() / shifted.len() as f64;
    if mean <= 0.0 {
        return vec![1.0; raw.len()];
    }
    shifted.iter().map(|w| w / mean).collect()
}

/// Scott's rule, `σ · n_eff^(-1/6)`, with `n_eff` the Kish effective sample size.
pub fn scott_bandwidth(values: &[f64], weights: &[f64]) -> Option<f64> {
    let total: f64 = weights.iter().sum();
    if values.len() < 2 || total <= 0.0 {
        return None;
    }
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
    let var = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v - mean) * (v - mean))
        .sum::<f64>()
        / total;
    let n_eff = total * total / weights.iter().map(|w| w * w).sum::<f64>();
    let h = var.sqrt() * n_eff.powf(-1.0 / 6.0);
    (h > 0.0 && h.is_finite()).then_some(h)
}

pub fn density_grid(
    table: &RunTable,
    xdim: &str,
    ydim: &str,
    weight: Option<&str>,
    f: &FilterState,
) -> Result<DensityGrid, AnalyticsError> {
    density_grid_with(Exec::default(), table, xdim, ydim, weight, f)
}

pub fn density_grid_with(
    exec: Exec,
    table: &RunTable,
    xdim: &str,
    ydim: &str,
    weight: Option<&str>,
    f: &FilterState,
) -> Result<DensityGrid, AnalyticsError> {
    let xs = quantitative(table, xdim)?;
    let ys = quantitative(table, ydim)?;
    let ws = weight.map(|w| quantitative(table, w)).transpose()?;
    let result = apply_filters_with(exec, table, f)?;
    if result.pass_count == 0 {
        return Err(AnalyticsError::EmptySelection);
    }
    let extent_of = |values: &[f64], name: &str| {
        let (lo, hi) = extent(values).expect("non-empty table");
        if hi > lo {
            Ok((lo, hi))
        } else {
            Err(AnalyticsError::DegenerateExtent(name.to_string()))
        }
    };
    let (x_min, x_max) = extent_of(xs, xdim)?;
    let (y_min, y_max) = extent_of(ys, ydim)?;

    let ids: Vec<usize> = result.ids().collect();
    let px: Vec<f64> = ids.iter().map(|&i| xs[i]).collect();
    let py: Vec<f64> = ids.iter().map(|&i| ys[i]).collect();
    let pw = match ws {
        Some(ws) => normalized_weights(&ids.iter().map(|&i| ws[i]).collect::<Vec<_>>()),
        None => vec![1.0; ids.len()],
    };

    let (nx, ny) = (GRID_SIZE, GRID_SIZE);
    let dx = (x_max - x_min) / (nx - 1) as f64;
    let dy = (y_max - y_min) / (ny - 1) as f64;
    let bandwidth = |values: &[f64], range: f64, spacing: f64| {
        scott_bandwidth(values, &pw)
            .unwrap_or(0.05 * range)
            .max(spacing)
    };
    let hx = bandwidth(&px, x_max - x_min, dx);
    let hy = bandwidth(&py, y_max - y_min, dy);

    // Separable kernel: x factors per grid column, y factors per grid row.
    let kx: Vec<Vec<f64>> = exec.map(nx, |i| {
        let x = x_min + i as f64 * dx;
        px.iter()
            .map(|&xi| (-0.5 * ((x - xi) / hx).powi(2)).exp())
            .collect()
    });
    let mut values = vec![0.0; nx * ny];
    exec.fill_chunks(&mut values, nx, |start, row| {
        let y = y_min + (start / nx) as f64 * dy;
        let ky: Vec<f64> = py
            .iter()
            .zip(&pw)
            .map(|(&yi, &w)| w * (-0.5 * ((y - yi) / hy).powi(2)).exp())
            .collect();
        for (cell, kx) in row.iter_mut().zip(&kx) {
            *cell = kx.iter().zip(&ky).map(|(a, b)| a * b).sum();
        }
    });
    let mass = values.iter().sum::<f64>() * dx * dy;
    if mass > 0.0 {
        values.iter_mut().for_each(|v| *v /= mass);
    }
    Ok(DensityGrid {
        x_min,
        x_max,
        y_min,
        y_max,
        nx,
        ny,
        bandwidth: (hx, hy),
        values,
    })
}

/// Density level whose super-level set holds at least `mass` of the grid's probability.
pub fn hdr_level(grid: &DensityGrid, mass: f64) -> f64 {
    let mut sorted = grid.values.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let cell = grid.dx() * grid.dy();
    let mut acc = 0.0;
    for &v in &sorted {
        acc += v * cell;
        if acc >= mass {
            return v;
        }
    }
    *sorted.last().unwrap_or(&0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourLine {
    /// Probability mass enclosed by the line.
    pub mass: f64,
    /// Density value of the iso-line.
    pub level: f64,
    pub closed: bool,
    pub points: Vec<[f64; 2]>,
}

/// Iso-lines at the [`CONTOUR_MASSES`] levels. An empty selection yields no lines.
pub fn density_contours(
    table: &RunTable,
    xdim: &str,
    ydim: &str,
    weight: Option<&str>,
    f: &FilterState,
) -> Result<Vec<ContourLine>, AnalyticsError> {
    let grid = match density_grid(table, xdim, ydim, weight, f) {
        Err(AnalyticsError::EmptySelection) => return Ok(Vec::new()),
        other => other?,
    };
    let mut lines = Vec::new();
    for mass in CONTOUR_MASSES {
        let level = hdr_level(&grid, mass);
        for (closed, points) in marching_squares(&grid, level) {
            lines.push(ContourLine {
                mass,
                level,
                closed,
                points,
            });
        }
    }
    Ok(lines)
}

/// A grid edge: `(i, j, vertical)` runs from node `(i, j)` to `(i+1, j)` or `(i, j+1)`.
type EdgeKey = (usize, usize, bool);

/// Marching squares over `grid`, joined into polylines. Nodes with value `>= level` are inside.
pub fn marching_squares(grid: &DensityGrid, level: f64) -> Vec<(bool, Vec<[f64; 2]>)> {
    let (nx, ny) = (grid.nx, grid.ny);
    let inside = |i: usize, j: usize| grid.at(i, j) >= level;
    let point = |e: EdgeKey| {
        let (i, j, vertical) = e;
        let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
        let (a, b) = (grid.at(i, j), grid.at(i2, j2));
        let t = if a == b {
            0.5
        } else {
            ((level - a) / (b - a)).clamp(0.0, 1.0)
        };
        let (x0, y0) = (grid.x(i), grid.y(j));
        if vertical {
            [x0, y0 + t * grid.dy()]
        } else {
            [x0 + t * grid.dx(), y0]
        }
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let bottom = (i, j, false);
            let top = (i, j + 1, false);
            let left = (i, j, true);
            let right = (i + 1, j, true);
            let case = usize::from(inside(i, j))
                | usize::from(inside(i + 1, j)) << 1
                | usize::from(inside(i + 1, j + 1)) << 2
                | usize::from(inside(i, j + 1)) << 3;
            let center_inside = || {
                (grid.at(i, j) + grid.at(i + 1, j) + grid.at(i + 1, j + 1) + grid.at(i, j + 1))
                    / 4.0
                    >= level
            };
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 => {
                    if center_inside() {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                10 => {
                    if center_inside() {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    } else {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    }
                }
                _ => unreachable!("four-bit case"),
            }
        }
    }

    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(s);
        by_edge.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let next_from =
        |edge: EdgeKey, used: &[bool]| by_edge[&edge].iter().copied().find(|&s| !used[s]);
    let mut lines = Vec::new();
    // Open chains start at edges touched by a single segment, so they are walked first.
    let mut starts: Vec<usize> = (0..segments.len())
        .filter(|&s| by_edge[&segments[s].0].len() == 1 || by_edge[&segments[s].1].len() == 1)
        .collect();
    starts.extend(0..segments.len());
    for s in starts {
        if used[s] {
            continue;
        }
        used[s] = true;
        let (a, b) = segments[s];
        let (first, mut tail) = if by_edge[&b].len() == 1 {
            (b, a)
        } else {
            (a, b)
        };
        let mut chain = vec![first, tail];
        while let Some(n) = next_from(tail, &used) {
            used[n] = true;
            let (p, q) = segments[n];
            tail = if p == tail { q } else { p };
            chain.push(tail);
        }
        let closed = chain.len() > 2 && chain.first() == chain.last();
        if closed {
            chain.pop();
        }
        lines.push((closed, chain.into_iter().map(point).collect()));
    }
    lines
}

/// Per-position summary of a Series1D dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxStats {
    pub position: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<usize>,
}

/// Linear-interpolation quantile (type 7) of unsorted data; reorders `values`.
pub fn quantile_select(values: &mut [f64], p: f64) -> f64 {
    let h = (values.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let (_, &mut a, right) = values.select_nth_unstable_by(lo, f64::total_cmp);
    if right.is_empty() || h == lo as f64 {
        return a;
    }
    let b = right.iter().copied().fold(f64::INFINITY, f64::min);
    a + (h - lo as f64) * (b - a)
}

pub fn boxplot_series(
    table: &RunTable,
    dim1d: &str,
    f: &FilterState,
) -> Result<Vec<BoxStats>, AnalyticsError> {
    boxplot_series_with(Exec::default(), table, dim1d, f)
}

pub fn boxplot_series_with(
    exec: Exec,
    table: &RunTable,
    dim1d: &str,
    f: &FilterState,
) -> Result<Vec<BoxStats>, AnalyticsError> {
    let data = series(table, dim1d)?;
    let result = apply_filters_with(exec, table, f)?;
    let ids: Vec<usize> = result.ids().collect();
    if ids.is_empty() {
        return Err(AnalyticsError::EmptySelection);
    }
    let length = data[ids[0]].len();
    Ok(exec.map(length, |position| {
        let column: Vec<f64> = ids.iter().map(|&id| data[id][position]).collect();
        let mut scratch = column.clone();
        let q1 = quantile_select(&mut scratch, 0.25);
        let median = quantile_select(&mut scratch, 0.5);
        let q3 = quantile_select(&mut scratch, 0.75);
        let (min, max) = extent(&column).expect("non-empty selection");
        let iqr = q3 - q1;
        let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let within = column
            .iter()
            .copied()
            .filter(|v| (fence_lo..=fence_hi).contains(v));
        let (whisker_lo, whisker_hi) = within
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let (whisker_lo, whisker_hi) = (whisker_lo.min(q1), whisker_hi.max(q3));
        let outliers = ids
            .iter()
            .zip(&column)
            .filter(|(_, v)| !(fence_lo..=fence_hi).contains(*v))
            .map(|(&id, _)| id)
            .collect();
        BoxStats {
            position,
            min,
            q1,
            median,
            q3,
            max,
            whisker_lo,
            whisker_hi,
            outliers,
        }
    }))
}

/// Normalized prefix sums of one run's series. Negative series are shifted up by their minimum.
pub fn cumulative_curve(
    table: &RunTable,
    dim1d: &str,
    run: usize,
) -> Result<Vec<f64>, AnalyticsError> {
    let data = series(table, dim1d)?;
    let values = data.get(run).ok_or(AnalyticsError::UnknownRun(run))?;
    Ok(cumulative(values))
}

pub fn cumulative(values: &[f64]) -> Vec<f64> {
    let shift = values.iter().copied().fold(0.0, f64::min);
    let mut acc = 0.0;
    let mut out: Vec<f64> = values
        .iter()
        .map(|v| {
            acc += v - shift;
            acc
        })
        .collect();
    let n = out.len();
    if acc > 0.0 {
        out.iter_mut().for_each(|v| *v /= acc);
    } else {
        out.iter_mut()
            .enumerate()
            .for_each(|(k, v)| *v = (k + 1) as f64 / n as f64);
    }
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}
