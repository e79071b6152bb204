//! Dashboard documents: placed views, sliders, the edit/analyze mode machine,
//! and emission of renderer-neutral chart specs with their data payloads.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use thiserror::Error;

use crate::analytics::{
    apply_filters, boxplot_series, cumulative, density_contours, histogram_masked, AnalyticsError,
    Bin, BoxStats, ContourLine, FilterResult, FilterState, DEFAULT_BINS,
};
use crate::data_model::{DType, RunTable};
use crate::design_space::{matrix_panels, Category, EncodingState, Field, VisOption};
use crate::layout::{CellSpec, ColumnSource};
use crate::names::string_enum;

pub const DEFAULT_PRESELECT: usize = 3;
pub const DEFAULT_POINT_SIZE: f64 = 3.0;
const DEFAULT_RECT: (u32, u32) = (4, 3);

string_enum! {
    pub enum Mode as "mode" {
        Edit => "edit",
        Analyze => "analyze",
    }
}

string_enum! {
    pub enum ColorScheme as "color scheme" {
        Viridis => "viridis" | "sequential",
        Diverging => "diverging",
        /// Black and white at the two ends of the range.
        Grayscale => "grayscale",
    }
}

string_enum! {
    pub enum BlendMode as "blend mode" {
        Difference => "difference",
        Multiply => "multiply",
        Screen => "screen",
    }
}

/// Position and size in abstract grid units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

/// Per-view style overrides; unset fields fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Style {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color_scheme: Option<ColorScheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blend_mode: Option<BlendMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hide_filtered: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preselect_count: Option<usize>,
}

/// An attribute edit from the single-view editor.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StylePatch {
    #[serde(flatten)]
    pub style: Style,
    #[serde(default)]
    pub remove: bool,
}

impl StylePatch {
    pub fn from_json(value: Json) -> Result<StylePatch, DashboardError> {
        serde_json::from_value(value).map_err(|e| DashboardError::InvalidPatch(e.to_string()))
    }
}

/// What a placed view shows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViewContent {
    /// An MDMV chart, usually copied from a small multiple.
    Cell { cell: CellSpec },
    /// A complex-object chart over one object dimension.
    Object { option: VisOption, object: String },
    /// Third-party chart spec. Only its `"field"` references are checked.
    External { spec: Json },
}

impl ViewContent {
    /// A standalone MDMV chart over `dims`.
    pub fn chart(option: VisOption, dims: &[&str]) -> ViewContent {
        let dims: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
        let (x, y, axes) = if option.is_two_axis() {
            let x = dims.first().cloned();
            let y = dims.get(1).cloned().or_else(|| x.clone());
            (x, y, Vec::new())
        } else {
            (None, None, dims.clone())
        };
        ViewContent::Cell {
            cell: CellSpec {
                option,
                source: ColumnSource::S1,
                spatial: dims,
                x,
                y,
                axes,
                color: None,
                opacity: None,
                tint: None,
                switches: Vec::new(),
            },
        }
    }

    pub fn object(option: VisOption, object: &str) -> ViewContent {
        ViewContent::Object {
            option,
            object: object.to_string(),
        }
    }

    pub fn option(&self) -> Option<VisOption> {
        match self {
            ViewContent::Cell { cell } => Some(cell.option),
            ViewContent::Object { option, .. } => Some(*option),
            ViewContent::External { .. } => None,
        }
    }

    /// Every dimension name the view refers to, in first-use order.
    pub fn referenced(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |d: &String| {
            if !out.contains(d) {
                out.push(d.clone());
            }
        };
        match self {
            ViewContent::Cell { cell } => {
                cell.spatial
                    .iter()
                    .chain(&cell.x)
                    .chain(&cell.y)
                    .chain(&cell.axes)
                    .chain(&cell.color)
                    .chain(&cell.opacity)
                    .for_each(&mut push);
            }
            ViewContent::Object { object, .. } => push(object),
            ViewContent::External { spec } => external_fields(spec).iter().for_each(&mut push),
        }
        out
    }

    fn validate(&self, table: &RunTable) -> Result<(), DashboardError> {
        let bad = |why: String| Err(DashboardError::IncompatibleCell(why));
        for name in self.referenced() {
            let Some(dim) = table.dimension(&name) else {
                return bad(format!("unknown dimension `{name}`"));
            };
            let object_view = matches!(self, ViewContent::Object { .. });
            let external = matches!(self, ViewContent::External { .. });
            if !external && object_view != (dim.dtype != DType::Quantitative) {
                return bad(format!("`{name}` has the wrong type for this view"));
            }
        }
        match self {
            ViewContent::Cell { cell } => {
                let option = cell.option;
                if !option.is_mdmv() {
                    return bad(format!("{option} needs an object dimension"));
                }
                if cell.spatial.is_empty() {
                    return bad(format!("{option} needs at least one spatial dimension"));
                }
                let caps = option.capabilities();
                if option == VisOption::Hist && cell.spatial.len() != caps.spatial_max.unwrap_or(1)
                {
                    return bad("a histogram shows exactly one dimension".into());
                }
                if option.is_two_axis() {
                    let on_axes = [&cell.x, &cell.y]
                        .into_iter()
                        .all(|a| a.as_ref().is_some_and(|d| cell.spatial.contains(d)));
                    if !on_axes {
                        return bad(format!(
                            "{option} needs x and y from its spatial dimensions"
                        ));
                    }
                } else if option != VisOption::Hist && cell.axes != cell.spatial {
                    return bad(format!("{option} axes must list its spatial dimensions"));
                }
                Ok(())
            }
            ViewContent::Object { option, object } => {
                let dtype = table.dimension(object).map(|d| d.dtype);
                if option.object_dtype().is_none() || option.object_dtype() != dtype {
                    return bad(format!("{option} cannot show `{object}`"));
                }
                Ok(())
            }
            ViewContent::External { spec } => {
                if spec.is_object() {
                    Ok(())
                } else {
                    bad("external chart spec must be a JSON object".into())
                }
            }
        }
    }
}

/// String values stored under `"field"` keys anywhere in `spec`.
fn external_fields(spec: &Json) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![spec];
    while let Some(v) = stack.pop() {
        match v {
            Json::Object(map) => {
                if let Some(Json::String(f)) = map.get("field") {
                    out.push(f.clone());
                }
                stack.extend(map.values().rev());
            }
            Json::Array(items) => stack.extend(items.iter().rev()),
            _ => {}
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedView {
    pub view_id: u32,
    pub content: ViewContent,
    pub rect: Rect,
    #[serde(default)]
    pub style: Style,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliderSpec {
    pub dimension: String,
    /// Unfiltered min and max.
    pub extent: (f64, f64),
    pub current: (f64, f64),
    /// Selection-panel field the dimension sat in when its first view was added.
    pub field_color: Option<Field>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DashboardError {
    #[error("the dashboard is in analyze mode")]
    NotEditMode,
    #[error("view cannot be placed: {0}")]
    IncompatibleCell(String),
    #[error("unknown view {0}")]
    UnknownView(u32),
    #[error("rectangle must have positive width and height")]
    InvalidRect,
    #[error("invalid attribute patch: {0}")]
    InvalidPatch(String),
    #[error("invalid dashboard document: {0}")]
    InvalidDocument(String),
    #[error("no placed view encodes {0}, so it has no slider")]
    NoSlider(String),
    #[error(transparent)]
    Filter(#[from] AnalyticsError),
}

impl DashboardError {
    pub fn code(&self) -> &'static str {
        match self {
            DashboardError::NotEditMode => "NotEditMode",
            DashboardError::IncompatibleCell(_) => "IncompatibleCell",
            DashboardError::UnknownView(_) => "UnknownView",
            DashboardError::InvalidRect => "InvalidRect",
            DashboardError::InvalidPatch(_) => "InvalidPatch",
            DashboardError::InvalidDocument(_) => "InvalidDocument",
            DashboardError::NoSlider(_) => "NoSlider",
            DashboardError::Filter(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DashboardDoc {
    pub views: Vec<PlacedView>,
    pub sliders: Vec<SliderSpec>,
    pub mode: Mode,
    pub filter_state: FilterState,
    #[serde(default)]
    pub next_view_id: u32,
}

impl Default for DashboardDoc {
    fn default() -> Self {
        DashboardDoc {
            views: Vec::new(),
            sliders: Vec::new(),
            mode: Mode::Edit,
            filter_state: FilterState::default(),
            next_view_id: 1,
        }
    }
}

impl DashboardDoc {
    pub fn new() -> Self {
        Self::default()
    }

    fn require_edit(&self) -> Result<(), DashboardError> {
        match self.mode {
            Mode::Edit => Ok(()),
            Mode::Analyze => Err(DashboardError::NotEditMode),
        }
    }

    fn view_index(&self, view_id: u32) -> Result<usize, DashboardError> {
        self.views
            .iter()
            .position(|v| v.view_id == view_id)
            .ok_or(DashboardError::UnknownView(view_id))
    }

    pub fn view(&self, view_id: u32) -> Option<&PlacedView> {
        self.views.iter().find(|v| v.view_id == view_id)
    }

    /// Places a view below the existing ones and returns its id.
    pub fn add_view(
        &mut self,
        table: &RunTable,
        enc: &EncodingState,
        content: ViewContent,
    ) -> Result<u32, DashboardError> {
        self.require_edit()?;
        content.validate(table)?;
        let view_id = self.next_view_id.max(1);
        let y = self
            .views
            .iter()
            .map(|v| v.rect.y + v.rect.h)
            .max()
            .unwrap_or(0);
        self.views.push(PlacedView {
            view_id,
            content,
            rect: Rect {
                x: 0,
                y,
                w: DEFAULT_RECT.0,
                h: DEFAULT_RECT.1,
            },
            style: Style::default(),
        });
        self.next_view_id = view_id + 1;
        self.sync_sliders(table, Some(enc));
        Ok(view_id)
    }

    pub fn move_resize(&mut self, view_id: u32, rect: Rect) -> Result<(), DashboardError> {
        self.require_edit()?;
        let idx = self.view_index(view_id)?;
        if rect.w == 0 || rect.h == 0 {
            return Err(DashboardError::InvalidRect);
        }
        self.views[idx].rect = rect;
        Ok(())
    }

    /// Merges style overrides, or removes the view when `patch.remove` is set.
    pub fn edit_attributes(
        &mut self,
        table: &RunTable,
        view_id: u32,
        patch: &StylePatch,
    ) -> Result<(), DashboardError> {
        self.require_edit()?;
        let idx = self.view_index(view_id)?;
        if patch.remove {
            self.views.remove(idx);
            self.sync_sliders(table, None);
            return Ok(());
        }
        let style = &patch.style;
        let option = self.views[idx].content.option();
        let invalid = |why: &str| Err(DashboardError::InvalidPatch(why.to_string()));
        if style.bin_count == Some(0) {
            return invalid("bin_count must be at least 1");
        }
        if style
            .point_size
            .is_some_and(|p| !(p.is_finite() && p > 0.0))
        {
            return invalid("point_size must be positive");
        }
        if style.blend_mode.is_some() && option != Some(VisOption::Sup2D) {
            return invalid("blend_mode applies to superimposed views only");
        }
        if style.hide_filtered.is_some() && option != Some(VisOption::Grid2D) {
            return invalid("hide_filtered applies to image grids only");
        }
        let target = &mut self.views[idx].style;
        macro_rules! merge {
            ($($f:ident),*) => { $( if style.$f.is_some() { target.$f = style.$f; } )* };
        }
        merge!(
            color_scheme,
            bin_count,
            point_size,
            blend_mode,
            hide_filtered,
            preselect_count
        );
        Ok(())
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    /// Replaces the filter state. Allowed in both modes; ranges need a slider.
    pub fn set_filters(&mut self, table: &RunTable, f: FilterState) -> Result<(), DashboardError> {
        f.validate(table)?;
        if let Some(name) = f
            .ranges
            .keys()
            .find(|d| !self.sliders.iter().any(|s| &s.dimension == *d))
        {
            return Err(DashboardError::NoSlider(name.clone()));
        }
        self.filter_state = f;
        self.sync_sliders(table, None);
        Ok(())
    }

    /// Rebuilds the slider list: one per quantitative dimension referenced by any view.
    fn sync_sliders(&mut self, table: &RunTable, enc: Option<&EncodingState>) {
        let mut dims: Vec<String> = Vec::new();
        for view in &self.views {
            for d in view.content.referenced() {
                let quantitative = table
                    .dimension(&d)
                    .is_some_and(|x| x.dtype == DType::Quantitative);
                if quantitative && !dims.contains(&d) {
                    dims.push(d);
                }
            }
        }
        let old: BTreeMap<String, Option<Field>> = self
            .sliders
            .drain(..)
            .map(|s| (s.dimension, s.field_color))
            .collect();
        self.filter_state
            .ranges
            .retain(|name, _| dims.contains(name));
        self.sliders = dims
            .into_iter()
            .map(|d| {
                let values = table.numbers(&d).unwrap_or(&[]);
                let extent = values
                    .iter()
                    .fold(None, |acc: Option<(f64, f64)>, &v| {
                        Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v))))
                    })
                    .unwrap_or((0.0, 0.0));
                let field_color = match old.get(&d) {
                    Some(f) => *f,
                    None => enc
                        .and_then(|e| e.field_of(&d))
                        .filter(|f| *f != Field::Object),
                };
                SliderSpec {
                    current: self.filter_state.ranges.get(&d).copied().unwrap_or(extent),
                    dimension: d,
                    extent,
                    field_color,
                }
            })
            .collect();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dashboard serializes")
    }

    pub fn from_json(text: &str) -> Result<DashboardDoc, DashboardError> {
        let doc: DashboardDoc = serde_json::from_str(text)
            .map_err(|e| DashboardError::InvalidDocument(e.to_string()))?;
        let mut ids: Vec<u32> = doc.views.iter().map(|v| v.view_id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(DashboardError::InvalidDocument("duplicate view_id".into()));
        }
        if doc.views.iter().any(|v| v.rect.w == 0 || v.rect.h == 0) {
            return Err(DashboardError::InvalidRect);
        }
        Ok(doc)
    }

    /// Checks every view, the filters and the slider set against `table`.
    pub fn validate(&self, table: &RunTable) -> Result<(), DashboardError> {
        for v in &self.views {
            v.content.validate(table)?;
        }
        self.filter_state.validate(table)?;
        let mut expected = self.clone();
        expected.sync_sliders(table, None);
        if expected
            .sliders
            .iter()
            .map(|s| &s.dimension)
            .ne(self.sliders.iter().map(|s| &s.dimension))
        {
            return Err(DashboardError::InvalidDocument(
                "sliders do not match the placed views".into(),
            ));
        }
        Ok(())
    }

    /// One spec and payload per view, ordered by view id.
    pub fn emit_specs(&self, table: &RunTable, data_ref: &str) -> Result<Emission, DashboardError> {
        emit_specs(self, table, &self.filter_state, data_ref)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Encodings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub axes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opacity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

/// Fully resolved style of an emitted chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedStyle {
    pub color_scheme: ColorScheme,
    pub bin_count: usize,
    pub point_size: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blend_mode: Option<BlendMode>,
    pub hide_filtered: bool,
    pub preselect_count: usize,
}

impl ResolvedStyle {
    fn of(style: &Style, option: Option<VisOption>) -> ResolvedStyle {
        ResolvedStyle {
            color_scheme: style.color_scheme.unwrap_or(ColorScheme::Viridis),
            bin_count: style.bin_count.unwrap_or(DEFAULT_BINS),
            point_size: style.point_size.unwrap_or(DEFAULT_POINT_SIZE),
            blend_mode: match option {
                Some(VisOption::Sup2D) => Some(style.blend_mode.unwrap_or(BlendMode::Difference)),
                _ => None,
            },
            hide_filtered: style.hide_filtered.unwrap_or(false),
            preselect_count: style.preselect_count.unwrap_or(DEFAULT_PRESELECT),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interaction {
    pub filterable: bool,
    pub selectable: bool,
}

/// Declarative description of one rendered chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisSpec {
    pub view_id: u32,
    /// Option id, or `"external"` for third-party specs.
    pub vis_type: String,
    pub data_ref: String,
    pub encodings: Encodings,
    pub style: ResolvedStyle,
    pub interaction: Interaction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external: Option<Json>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSeries {
    pub id: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageRef {
    pub id: usize,
    pub path: Option<String>,
    pub passes: bool,
}

/// Data a renderer needs for one view, beyond the shared pass set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Points {
        /// Column values per encoded dimension.
        columns: BTreeMap<String, Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        panels: Option<Vec<(usize, usize)>>,
    },
    Histogram {
        dimension: String,
        bins: Vec<Bin>,
    },
    Contours {
        lines: Vec<ContourLine>,
    },
    Series {
        dimension: String,
        runs: Vec<RunSeries>,
    },
    Boxplot {
        dimension: String,
        stats: Vec<BoxStats>,
    },
    Cumulative {
        dimension: String,
        curves: Vec<RunSeries>,
    },
    Images {
        dimension: String,
        images: Vec<ImageRef>,
    },
    External,
    Unavailable {
        code: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmittedView {
    pub spec: VisSpec,
    pub highlighted: Vec<usize>,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Emission {
    pub filter: FilterResult,
    pub selected_run: Option<usize>,
    pub views: Vec<EmittedView>,
}

/// Selected run first, then the first passing runs, up to `count` in total.
pub fn highlighted_runs(
    result: &FilterResult,
    selected: Option<usize>,
    count: usize,
) -> Vec<usize> {
    let mut out: Vec<usize> = selected.into_iter().collect();
    for id in result.ids() {
        if out.len() >= count {
            break;
        }
        if Some(id) != selected {
            out.push(id);
        }
    }
    out
}

pub fn emit_specs(
    doc: &DashboardDoc,
    table: &RunTable,
    f: &FilterState,
    data_ref: &str,
) -> Result<Emission, DashboardError> {
    let result = apply_filters(table, f)?;
    let mut views: Vec<&PlacedView> = doc.views.iter().collect();
    views.sort_by_key(|v| v.view_id);
    let views = views
        .into_iter()
        .map(|v| emit_view(v, table, f, &result, data_ref))
        .collect();
    Ok(Emission {
        filter: result,
        selected_run: f.selected_run,
        views,
    })
}

fn unavailable(e: AnalyticsError) -> Payload {
    Payload::Unavailable {
        code: e.code().to_string(),
        message: e.to_string(),
    }
}

/// Spec of a chart that is not placed on the dashboard, such as an overview cell.
pub fn preview_spec(content: &ViewContent, data_ref: &str) -> VisSpec {
    let view = PlacedView {
        view_id: 0,
        content: content.clone(),
        rect: Rect {
            x: 0,
            y: 0,
            w: DEFAULT_RECT.0,
            h: DEFAULT_RECT.1,
        },
        style: Style::default(),
    };
    spec_of(&view, data_ref)
}

fn spec_of(view: &PlacedView, data_ref: &str) -> VisSpec {
    let option = view.content.option();
    let mut encodings = Encodings::default();
    let mut external = None;
    match &view.content {
        ViewContent::Cell { cell } => {
            encodings.x = cell.x.clone();
            encodings.y = cell.y.clone();
            encodings.axes = cell.axes.clone();
            encodings.color = cell.color.clone();
            encodings.opacity = cell.opacity.clone();
        }
        ViewContent::Object { object, .. } => encodings.object = Some(object.clone()),
        ViewContent::External { spec } => external = Some(spec.clone()),
    }
    VisSpec {
        view_id: view.view_id,
        vis_type: option.map_or("external", VisOption::as_str).to_string(),
        data_ref: data_ref.to_string(),
        encodings,
        style: ResolvedStyle::of(&view.style, option),
        interaction: Interaction {
            filterable: true,
            selectable: true,
        },
        external,
    }
}

fn emit_view(
    view: &PlacedView,
    table: &RunTable,
    f: &FilterState,
    result: &FilterResult,
    data_ref: &str,
) -> EmittedView {
    let spec = spec_of(view, data_ref);
    let highlighted = highlighted_runs(result, f.selected_run, spec.style.preselect_count);
    let payload = match &view.content {
        ViewContent::Cell { cell } => match cell.option {
            VisOption::Hist => {
                let dim = &cell.spatial[0];
                match histogram_masked(table, dim, result, spec.style.bin_count) {
                    Ok(bins) => Payload::Histogram {
                        dimension: dim.clone(),
                        bins,
                    },
                    Err(e) => unavailable(e),
                }
            }
            VisOption::WDCP => {
                let x = cell.x.as_deref().expect("validated");
                let y = cell.y.as_deref().expect("validated");
                match density_contours(table, x, y, cell.color.as_deref(), f) {
                    Ok(lines) => Payload::Contours { lines },
                    Err(e) => unavailable(e),
                }
            }
            option => {
                let columns = view
                    .content
                    .referenced()
                    .into_iter()
                    .filter_map(|d| table.numbers(&d).map(|v| (d, v.to_vec())))
                    .collect();
                let panels = matches!(option, VisOption::SPLOM | VisOption::RSPLOM)
                    .then(|| matrix_panels(option, cell.axes.len()));
                Payload::Points { columns, panels }
            }
        },
        ViewContent::Object { option, object } => {
            object_payload(*option, object, table, f, result, &spec.style, &highlighted)
        }
        ViewContent::External { .. } => Payload::External,
    };
    EmittedView {
        spec,
        highlighted,
        payload,
    }
}

fn object_payload(
    option: VisOption,
    object: &str,
    table: &RunTable,
    f: &FilterState,
    result: &FilterResult,
    style: &ResolvedStyle,
    highlighted: &[usize],
) -> Payload {
    let dimension = object.to_string();
    let run_series = |ids: &mut dyn Iterator<Item = usize>, curve: bool| {
        let data = table.series(object).unwrap_or(&[]);
        ids.map(|id| RunSeries {
            id,
            values: if curve {
                cumulative(&data[id])
            } else {
                data[id].clone()
            },
        })
        .collect()
    };
    match option {
        VisOption::Line1D => Payload::Series {
            dimension,
            runs: run_series(&mut result.ids(), false),
        },
        VisOption::Box1D => match boxplot_series(table, object, f) {
            Ok(stats) => Payload::Boxplot { dimension, stats },
            Err(e) => unavailable(e),
        },
        VisOption::CHist1D => Payload::Cumulative {
            dimension,
            curves: run_series(&mut highlighted.iter().copied(), true),
        },
        _ => {
            debug_assert_eq!(option.category(), Category::Complex2D);
            let paths = table.images(object).unwrap_or(&[]);
            let image = |id: usize| ImageRef {
                id,
                path: paths[id].clone(),
                passes: result.passes(id),
            };
            let images = match option {
                VisOption::Grid2D if style.hide_filtered => result.ids().map(image).collect(),
                VisOption::Grid2D => (0..paths.len()).map(image).collect(),
                _ => highlighted.iter().copied().map(image).collect(),
            };
            Payload::Images { dimension, images }
        }
    }
}
