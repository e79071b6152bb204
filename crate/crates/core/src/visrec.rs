//! Task-oriented visualization recommendation.
//!
//! Recommendations are produced by a fixed cascade of rules, one stage per
//! task, always evaluated in the order of [`Task::ALL`]. Each stage only adds
//! frames; nothing a stage emits depends on which other tasks are active.
//!
//! Optimization, Fitting and Uncertainty are channel-based: they frame
//! selection-panel fields and, for Optimization, the spatially expressive
//! chart types. Outliers, Sensitivity and Partitioning are mark-based: they
//! frame chart types by mark class.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::data_model::{DType, Role, RunTable, Sampling};
use crate::design_space::{applicable_options, EncodingError, EncodingState, Field, VisOption};
use crate::names::string_enum;

/// Upper bound on simultaneously active tasks, Optimization included.
pub const MAX_TASKS: usize = 4;

string_enum! {
    pub enum Task as "task" {
        Optimization => "Optimization" | "opt",
        Fitting => "Fitting" | "fit",
        Uncertainty => "Uncertainty" | "unc",
        Outliers => "Outliers" | "out" | "outlier",
        Sensitivity => "Sensitivity" | "sens",
        Partitioning => "Partitioning" | "part",
    }
}

impl Task {
    pub fn description(self) -> &'static str {
        match self {
            Task::Optimization => "Find the best parameter setting",
            Task::Fitting => "Find where actual model data occurs",
            Task::Uncertainty => "Determine the reliability of the output",
            Task::Outliers => "Find odd or special outputs",
            Task::Sensitivity => "Identify input regions with high or low impact on the output",
            Task::Partitioning => "Identify different types of model behavior",
        }
    }

    pub fn strategy_label(self) -> &'static str {
        match self {
            Task::Optimization => "Overview",
            Task::Fitting => "Affiliation",
            Task::Uncertainty => "Attenuation",
            Task::Outliers => "Separation",
            Task::Sensitivity => "Con-/Divergence",
            Task::Partitioning => "Summarization",
        }
    }

    /// Whether the task is served by encoding channels (as opposed to picking marks).
    pub fn is_channel_based(self) -> bool {
        matches!(self, Task::Optimization | Task::Fitting | Task::Uncertainty)
    }

    /// Short description of the MDMV side of the strategy.
    pub fn mdmv_strategy(self) -> &'static str {
        match self {
            Task::Optimization => "Spatial expressivity",
            Task::Fitting => "Overview + Color",
            Task::Uncertainty => "Overview + Brightness",
            Task::Outliers => "Point-based (0D-mark)",
            Task::Sensitivity => "Line-based (1D-mark)",
            Task::Partitioning => "Area-based (2D-mark)",
        }
    }

    /// Short description of the complex-object side of the strategy.
    pub fn object_strategy(self) -> &'static str {
        match self {
            Task::Optimization => "1D-Line, 2D-Grid",
            Task::Fitting => "2D-Jux",
            Task::Uncertainty => "1D-Box",
            Task::Outliers => "(1D-Line)",
            Task::Sensitivity => "1D-Hist, 2D-Sup",
            Task::Partitioning => "2D-Grid (-)",
        }
    }
}

string_enum! {
    /// Column of the spatial expressivity table.
    pub enum ExpressivityKind as "expressivity kind" {
        RegularInputs => "RegularInputs" | "regular",
        StochasticOrOutputs => "StochasticOrOutputs" | "stochastic",
    }
}

string_enum! {
    pub enum DimBucket as "dimension bucket" {
        One => "1",
        Two => "2",
        Three => "3",
        Four => "4",
        Five => "5",
        Six => "6",
        SevenToNine => "7-9",
        TenPlus => "10+",
    }
}

impl DimBucket {
    /// `None` for zero dimensions.
    pub fn of(dim_count: usize) -> Option<DimBucket> {
        Some(match dim_count {
            0 => return None,
            1 => DimBucket::One,
            2 => DimBucket::Two,
            3 => DimBucket::Three,
            4 => DimBucket::Four,
            5 => DimBucket::Five,
            6 => DimBucket::Six,
            7..=9 => DimBucket::SevenToNine,
            _ => DimBucket::TenPlus,
        })
    }
}

/// A recommended option; `marginal` entries are weaker suggestions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommended {
    pub option: VisOption,
    pub marginal: bool,
}

const fn solid(option: VisOption) -> Recommended {
    Recommended {
        option,
        marginal: false,
    }
}

const fn weak(option: VisOption) -> Recommended {
    Recommended {
        option,
        marginal: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpressivityRow {
    pub bucket: DimBucket,
    pub regular_inputs: &'static [Recommended],
    pub stochastic_or_outputs: &'static [Recommended],
}

use VisOption::{Hist, PSc, PC, RSPLOM, SP, SPLOM, WDCP};

/// Dimension count to chart lookup for clear spatial encoding.
pub const SPATIAL_EXPRESSIVITY: [ExpressivityRow; 8] = [
    ExpressivityRow {
        bucket: DimBucket::One,
        regular_inputs: &[weak(PSc), weak(Hist)],
        stochastic_or_outputs: &[weak(PSc)],
    },
    ExpressivityRow {
        bucket: DimBucket::Two,
        regular_inputs: &[solid(WDCP), solid(Hist)],
        stochastic_or_outputs: &[solid(SP)],
    },
    ExpressivityRow {
        bucket: DimBucket::Three,
        regular_inputs: &[solid(SPLOM), solid(WDCP), solid(Hist)],
        stochastic_or_outputs: &[solid(SPLOM)],
    },
    ExpressivityRow {
        bucket: DimBucket::Four,
        regular_inputs: &[solid(PC), solid(WDCP), solid(Hist)],
        stochastic_or_outputs: &[solid(SPLOM), solid(RSPLOM)],
    },
    ExpressivityRow {
        bucket: DimBucket::Five,
        regular_inputs: &[solid(PC), solid(WDCP), solid(Hist)],
        stochastic_or_outputs: &[solid(RSPLOM)],
    },
    ExpressivityRow {
        bucket: DimBucket::Six,
        regular_inputs: &[solid(PC), solid(Hist)],
        stochastic_or_outputs: &[solid(RSPLOM)],
    },
    ExpressivityRow {
        bucket: DimBucket::SevenToNine,
        regular_inputs: &[solid(PC)],
        stochastic_or_outputs: &[solid(PC)],
    },
    ExpressivityRow {
        bucket: DimBucket::TenPlus,
        regular_inputs: &[weak(PC)],
        stochastic_or_outputs: &[solid(PSc)],
    },
];

/// Charts that encode `dim_count` spatial dimensions clearly. Empty for zero.
pub fn spatial_expressivity(dim_count: usize, kind: ExpressivityKind) -> Vec<Recommended> {
    let Some(bucket) = DimBucket::of(dim_count) else {
        return Vec::new();
    };
    let row = SPATIAL_EXPRESSIVITY
        .iter()
        .find(|r| r.bucket == bucket)
        .expect("every bucket has a row");
    match kind {
        ExpressivityKind::RegularInputs => row.regular_inputs.to_vec(),
        ExpressivityKind::StochasticOrOutputs => row.stochastic_or_outputs.to_vec(),
    }
}

/// What a frame is drawn around.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameTarget {
    VisOption {
        option: VisOption,
        marginal: bool,
        /// Spatial field the recommendation was derived from, for Optimization.
        source: Option<Field>,
        /// Grid view that hides filtered runs.
        hide_filtered: bool,
    },
    ChannelField {
        field: Field,
        hint_roles: Vec<Role>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub target: FrameTarget,
    pub task: Task,
}

impl Frame {
    fn option(task: Task, rec: Recommended) -> Frame {
        Frame {
            task,
            target: FrameTarget::VisOption {
                option: rec.option,
                marginal: rec.marginal,
                source: None,
                hide_filtered: false,
            },
        }
    }

    fn channel(task: Task, field: Field, hint_roles: Vec<Role>) -> Frame {
        Frame {
            task,
            target: FrameTarget::ChannelField { field, hint_roles },
        }
    }

    pub fn vis_option(&self) -> Option<VisOption> {
        match self.target {
            FrameTarget::VisOption { option, .. } => Some(option),
            FrameTarget::ChannelField { .. } => None,
        }
    }

    pub fn is_marginal(&self) -> bool {
        matches!(self.target, FrameTarget::VisOption { marginal: true, .. })
    }
}

#[derive(Serialize)]
struct FrameWire<'a> {
    target_kind: &'static str,
    target: &'static str,
    task: Task,
    #[serde(skip_serializing_if = "Option::is_none")]
    marginal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<Field>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hint_roles: Option<&'a [Role]>,
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let wire = match &self.target {
            FrameTarget::VisOption {
                option,
                marginal,
                source,
                hide_filtered,
            } => FrameWire {
                target_kind: "vis_option",
                target: option.as_str(),
                task: self.task,
                marginal: Some(*marginal),
                source: *source,
                mode: hide_filtered.then_some("hide_filtered"),
                hint_roles: None,
            },
            FrameTarget::ChannelField { field, hint_roles } => FrameWire {
                target_kind: "channel_field",
                target: field.as_str(),
                task: self.task,
                marginal: None,
                source: None,
                mode: None,
                hint_roles: Some(hint_roles),
            },
        };
        wire.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuidanceBlock {
    pub task: Task,
    pub strategy: &'static str,
    pub mdmv: &'static str,
    pub objects: &'static str,
    pub options: Vec<VisOption>,
    pub explanation: String,
    pub hints: Vec<String>,
}

/// Dimension names used to fill explanation templates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct TemplateContext {
    s1: Vec<String>,
    s2: Vec<String>,
    color: Vec<String>,
    opacity: Vec<String>,
    series: Option<String>,
    image: Option<String>,
}

impl TemplateContext {
    fn fill(&self, template: &str) -> String {
        let join = |v: &[String]| {
            if v.is_empty() {
                "(none)".to_string()
            } else {
                v.join(", ")
            }
        };
        let spatial: Vec<String> = self.s1.iter().chain(&self.s2).cloned().collect();
        template
            .replace("{spatial}", &join(&spatial))
            .replace("{s1}", &join(&self.s1))
            .replace("{s2}", &join(&self.s2))
            .replace("{color}", &join(&self.color))
            .replace("{opacity}", &join(&self.opacity))
            .replace(
                "{series}",
                self.series.as_deref().unwrap_or("the 1D objects"),
            )
            .replace("{image}", self.image.as_deref().unwrap_or("the 2D objects"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecommendationSet {
    pub tasks: Vec<Task>,
    pub frames: Vec<Frame>,
    pub guidance: Vec<GuidanceBlock>,
    #[serde(skip)]
    context: TemplateContext,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VisRecError {
    #[error("at most {MAX_TASKS} tasks can be active, {0} requested (Optimization included)")]
    TooManyTasks(usize),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("{option} is not recommended for {task}")]
    NotRecommended { task: Task, option: VisOption },
}

impl VisRecError {
    pub fn code(&self) -> &'static str {
        match self {
            VisRecError::TooManyTasks(_) => "TooManyTasks",
            VisRecError::Encoding(e) => e.code(),
            VisRecError::NotRecommended { .. } => "NotRecommended",
        }
    }
}

#[derive(Deserialize)]
struct TaskText {
    explanation: String,
    hints: Vec<String>,
}

#[derive(Deserialize)]
struct Explanations {
    tasks: BTreeMap<Task, TaskText>,
    options: BTreeMap<Task, BTreeMap<VisOption, String>>,
    channels: BTreeMap<Task, BTreeMap<Field, String>>,
}

fn explanations() -> &'static Explanations {
    static TEXTS: OnceLock<Explanations> = OnceLock::new();
    TEXTS.get_or_init(|| {
        serde_json::from_str(include_str!("../resources/explanations.json"))
            .expect("bundled explanation templates are valid")
    })
}

/// Table column used for a spatial field.
///
/// Only a field made entirely of regularly sampled inputs uses the regular column.
pub fn field_kind(dims: &[String], table: &RunTable) -> ExpressivityKind {
    let regular = !dims.is_empty()
        && dims.iter().all(|name| {
            table.dimension(name).is_some_and(|d| {
                d.role.is_input() && table.effective_sampling(d) == Sampling::Regular
            })
        });
    if regular {
        ExpressivityKind::RegularInputs
    } else {
        ExpressivityKind::StochasticOrOutputs
    }
}

/// Normalizes a task request: adds Optimization and orders by cascade position.
pub fn normalize_tasks(tasks: &[Task]) -> Result<Vec<Task>, VisRecError> {
    let mut active: Vec<Task> = Task::ALL
        .iter()
        .copied()
        .filter(|t| *t == Task::Optimization || tasks.contains(t))
        .collect();
    if tasks.is_empty() {
        active.clear();
    }
    if active.len() > MAX_TASKS {
        return Err(VisRecError::TooManyTasks(active.len()));
    }
    Ok(active)
}

/// Runs the recommendation cascade for the requested tasks.
pub fn recommend(
    tasks: &[Task],
    enc: &EncodingState,
    table: &RunTable,
) -> Result<RecommendationSet, VisRecError> {
    let active = normalize_tasks(tasks)?;
    enc.validate(table)?;

    let applicable: Vec<VisOption> = applicable_options(enc, table)
        .into_iter()
        .map(|a| a.option)
        .collect();
    let is_applicable = |o: VisOption| applicable.contains(&o);
    let series = enc.object_of(table, DType::Series1D).map(str::to_string);
    let image = enc.object_of(table, DType::ImageRef2D).map(str::to_string);
    let spatial = enc.spatial_count();

    let mut frames = Vec::new();
    for &task in &active {
        let mut stage: Vec<Frame> = Vec::new();
        match task {
            Task::Optimization => {
                stage.push(Frame::channel(task, Field::S1, vec![Role::InputControl]));
                stage.push(Frame::channel(
                    task,
                    Field::S2,
                    vec![Role::OutputDirect, Role::OutputDerived],
                ));
                for (field, dims) in [(Field::S1, &enc.s1), (Field::S2, &enc.s2)] {
                    let kind = field_kind(dims, table);
                    for rec in spatial_expressivity(dims.len(), kind) {
                        let mut frame = Frame::option(task, rec);
                        if let FrameTarget::VisOption { source, .. } = &mut frame.target {
                            *source = Some(field);
                        }
                        stage.push(frame);
                    }
                }
                if series.is_some() {
                    stage.push(Frame::option(task, solid(VisOption::Line1D)));
                }
                if image.is_some() {
                    stage.push(Frame::option(task, solid(VisOption::Grid2D)));
                }
            }
            Task::Fitting => {
                stage.push(Frame::channel(
                    task,
                    Field::Color,
                    vec![Role::OutputDerived],
                ));
                if image.is_some() {
                    stage.push(Frame::option(task, solid(VisOption::Jux2D)));
                }
            }
            Task::Uncertainty => {
                let field = if enc.color.is_empty() {
                    Field::Color
                } else {
                    Field::Opacity
                };
                stage.push(Frame::channel(task, field, vec![Role::Uncertainty]));
                if series.is_some() {
                    stage.push(Frame::option(task, solid(VisOption::Box1D)));
                }
            }
            Task::Outliers => {
                let preferred = if spatial <= 2 {
                    VisOption::SP
                } else {
                    VisOption::SPLOM
                };
                if is_applicable(preferred) {
                    stage.push(Frame::option(task, solid(preferred)));
                }
                if series.is_some() {
                    stage.push(Frame::option(task, weak(VisOption::Line1D)));
                }
            }
            Task::Sensitivity => {
                for option in [VisOption::WDCP, VisOption::PC] {
                    if is_applicable(option) {
                        stage.push(Frame::option(task, solid(option)));
                    }
                }
                if series.is_some() {
                    stage.push(Frame::option(task, solid(VisOption::CHist1D)));
                }
                if image.is_some() {
                    stage.push(Frame::option(task, solid(VisOption::Sup2D)));
                }
            }
            Task::Partitioning => {
                if is_applicable(VisOption::Hist) {
                    stage.push(Frame::option(task, solid(VisOption::Hist)));
                }
                if image.is_some() {
                    stage.push(Frame {
                        task,
                        target: FrameTarget::VisOption {
                            option: VisOption::Grid2D,
                            marginal: false,
                            source: None,
                            hide_filtered: true,
                        },
                    });
                }
            }
        }
        // Stable: solid frames first, marginal ones after.
        stage.sort_by_key(Frame::is_marginal);
        frames.extend(stage);
    }

    let context = TemplateContext {
        s1: enc.s1.clone(),
        s2: enc.s2.clone(),
        color: enc.color.clone(),
        opacity: enc.opacity.clone(),
        series,
        image,
    };
    let texts = explanations();
    let guidance = active
        .iter()
        .map(|&task| {
            let mut options: Vec<VisOption> = Vec::new();
            for option in frames
                .iter()
                .filter(|f| f.task == task)
                .filter_map(Frame::vis_option)
            {
                if !options.contains(&option) {
                    options.push(option);
                }
            }
            let text = &texts.tasks[&task];
            GuidanceBlock {
                task,
                strategy: task.strategy_label(),
                mdmv: task.mdmv_strategy(),
                objects: task.object_strategy(),
                options,
                explanation: context.fill(&text.explanation),
                hints: text.hints.clone(),
            }
        })
        .collect();

    Ok(RecommendationSet {
        tasks: active,
        frames,
        guidance,
        context,
    })
}

impl RecommendationSet {
    pub fn frames_for(&self, task: Task) -> impl Iterator<Item = &Frame> + '_ {
        self.frames.iter().filter(move |f| f.task == task)
    }

    pub fn is_framed(&self, task: Task, option: VisOption) -> bool {
        self.frames_for(task)
            .any(|f| f.vis_option() == Some(option))
    }

    /// Explanation of how `option` supports `task`, filled with the encoded dimension names.
    pub fn explain(&self, task: Task, option: VisOption) -> Result<String, VisRecError> {
        if !self.is_framed(task, option) {
            return Err(VisRecError::NotRecommended { task, option });
        }
        let template = explanations()
            .options
            .get(&task)
            .and_then(|m| m.get(&option))
            .ok_or(VisRecError::NotRecommended { task, option })?;
        Ok(self.context.fill(template))
    }

    /// Explanation attached to a framed channel field, if that field is framed for `task`.
    pub fn explain_channel(&self, task: Task, field: Field) -> Option<String> {
        let framed = self.frames_for(task).any(
            |f| matches!(&f.target, FrameTarget::ChannelField { field: x, .. } if *x == field),
        );
        if !framed {
            return None;
        }
        let template = explanations().channels.get(&task)?.get(&field)?;
        Some(self.context.fill(template))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recommendations serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::{Dimension, Sampling};
    use crate::design_space::MarkClass;

    fn v(x: &[&str]) -> Vec<String> {
        x.iter().map(|s| s.to_string()).collect()
    }

    /// 3 regular inputs, 2 outputs, a derived value, an uncertainty value, and both object kinds.
    fn table() -> RunTable {
        let q = |n: &str, role| {
            Dimension::new(n, DType::Quantitative)
                .with_role(role)
                .with_sampling(Sampling::Regular)
        };
        RunTable::schema_only(vec![
            q("a", Role::InputControl),
            q("b", Role::InputControl),
            q("c", Role::InputControl),
            q("d", Role::OutputDirect),
            q("e", Role::OutputDirect),
            q("chi2", Role::OutputDerived),
            q("u", Role::Uncertainty),
            Dimension::series("f", 8).with_role(Role::OutputDirect),
            Dimension::new("img", DType::ImageRef2D).with_role(Role::OutputDirect),
        ])
        .unwrap()
    }

    fn enc() -> EncodingState {
        EncodingState {
            s1: v(&["a", "b", "c"]),
            s2: v(&["d", "e"]),
            object: v(&["f"]),
            ..Default::default()
        }
    }

    fn framed(set: &RecommendationSet, task: Task) -> Vec<(VisOption, Option<Field>, bool)> {
        set.frames_for(task)
            .filter_map(|f| match f.target {
                FrameTarget::VisOption {
                    option,
                    source,
                    marginal,
                    ..
                } => Some((option, source, marginal)),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn expressivity_lookup() {
        use ExpressivityKind::*;
        let opts = |n, k| {
            spatial_expressivity(n, k)
                .into_iter()
                .map(|r| r.option)
                .collect::<Vec<_>>()
        };
        assert_eq!(opts(3, RegularInputs), vec![SPLOM, WDCP, Hist]);
        assert_eq!(opts(2, StochasticOrOutputs), vec![SP]);
        assert_eq!(opts(12, StochasticOrOutputs), vec![PSc]);
        assert_eq!(opts(8, RegularInputs), vec![PC]);
        assert!(spatial_expressivity(1, StochasticOrOutputs)[0].marginal);
        assert!(spatial_expressivity(0, RegularInputs).is_empty());
    }

    #[test]
    fn optimization_frames() {
        let set = recommend(&[Task::Optimization], &enc(), &table()).unwrap();
        use Field::{S1, S2};
        assert_eq!(
            framed(&set, Task::Optimization),
            vec![
                (SPLOM, Some(S1), false),
                (WDCP, Some(S1), false),
                (Hist, Some(S1), false),
                (SP, Some(S2), false),
                (VisOption::Line1D, None, false),
            ]
        );
    }

    #[test]
    fn optimization_is_added_and_first() {
        let set = recommend(&[Task::Sensitivity, Task::Fitting], &enc(), &table()).unwrap();
        assert_eq!(
            set.tasks,
            vec![Task::Optimization, Task::Fitting, Task::Sensitivity]
        );
        assert!(recommend(&[], &enc(), &table()).unwrap().tasks.is_empty());
    }

    #[test]
    fn too_many_tasks() {
        let err = recommend(
            &[
                Task::Fitting,
                Task::Uncertainty,
                Task::Outliers,
                Task::Sensitivity,
            ],
            &enc(),
            &table(),
        )
        .unwrap_err();
        assert_eq!(err, VisRecError::TooManyTasks(5));
    }

    #[test]
    fn uncertainty_falls_back_to_opacity() {
        let mut e = enc();
        let set = recommend(&[Task::Uncertainty], &e, &table()).unwrap();
        assert!(set
            .explain_channel(Task::Uncertainty, Field::Color)
            .is_some());
        e.color = v(&["chi2"]);
        let set = recommend(&[Task::Uncertainty], &e, &table()).unwrap();
        let channel = set
            .frames_for(Task::Uncertainty)
            .find_map(|f| match &f.target {
                FrameTarget::ChannelField { field, hint_roles } => {
                    Some((*field, hint_roles.clone()))
                }
                _ => None,
            })
            .unwrap();
        assert_eq!(channel, (Field::Opacity, vec![Role::Uncertainty]));
        assert!(set.is_framed(Task::Uncertainty, VisOption::Box1D));
    }

    #[test]
    fn outliers_prefer_scatterplot_for_two_dims() {
        let e = EncodingState {
            s1: v(&["a", "b"]),
            ..Default::default()
        };
        let set = recommend(&[Task::Outliers], &e, &table()).unwrap();
        assert!(set.is_framed(Task::Outliers, SP));
        let set = recommend(&[Task::Outliers], &enc(), &table()).unwrap();
        assert!(set.is_framed(Task::Outliers, SPLOM));
        assert!(!set.is_framed(Task::Outliers, SP));
        let line = framed(&set, Task::Outliers);
        assert_eq!(line.last(), Some(&(VisOption::Line1D, None, true)));
    }

    #[test]
    fn mark_based_tasks_match_mark_classes() {
        let mut e = enc();
        e.object.push("img".into());
        let set = recommend(
            &[Task::Outliers, Task::Sensitivity, Task::Partitioning],
            &e,
            &table(),
        )
        .unwrap();
        for (task, mark) in [
            (Task::Outliers, MarkClass::Point0D),
            (Task::Sensitivity, MarkClass::Line1D),
            (Task::Partitioning, MarkClass::Area2D),
        ] {
            for f in set.frames_for(task) {
                let option = f.vis_option().expect("mark-based tasks frame options only");
                if option.is_mdmv() {
                    assert_eq!(option.mark_class(), mark, "{task} {option}");
                }
            }
        }
        let grid = set
            .frames_for(Task::Partitioning)
            .find(|f| f.vis_option() == Some(VisOption::Grid2D))
            .unwrap();
        assert!(matches!(
            grid.target,
            FrameTarget::VisOption {
                hide_filtered: true,
                ..
            }
        ));
    }

    #[test]
    fn explanations() {
        let set = recommend(&[Task::Sensitivity, Task::Fitting], &enc(), &table()).unwrap();
        let pc = set.explain(Task::Sensitivity, PC).unwrap();
        assert!(pc.contains("converging") && pc.contains("diverging"));
        assert!(pc.contains("a, b, c, d, e"));
        let line = set.explain(Task::Optimization, VisOption::Line1D).unwrap();
        assert!(line.contains("overview") && line.contains("f"));
        assert_eq!(
            set.explain(Task::Fitting, Hist),
            Err(VisRecError::NotRecommended {
                task: Task::Fitting,
                option: Hist
            })
        );
    }

    #[test]
    fn every_framable_pair_has_a_template() {
        let texts = super::explanations();
        let mut e = enc();
        e.object.push("img".into());
        let small = EncodingState {
            s1: v(&["a", "b"]),
            s2: v(&["d"]),
            ..e.clone()
        };
        for enc in [e, small] {
            for task in Task::ALL {
                let set = recommend(&[*task], &enc, &table()).unwrap();
                for f in set.frames_for(*task) {
                    match &f.target {
                        FrameTarget::VisOption { option, .. } => {
                            assert!(set.explain(*task, *option).is_ok(), "{task} {option}")
                        }
                        FrameTarget::ChannelField { field, .. } => {
                            assert!(texts.channels[task].contains_key(field), "{task} {field}")
                        }
                    }
                }
            }
        }
        assert_eq!(texts.tasks.len(), 6);
    }

    #[test]
    fn frame_json_shape() {
        let set = recommend(&[Task::Partitioning], &enc(), &table()).unwrap();
        let json: serde_json::Value = serde_json::to_value(&set).unwrap();
        let first = &json["frames"][0];
        assert_eq!(first["target_kind"], "channel_field");
        assert_eq!(first["target"], "S1");
        assert_eq!(first["task"], "Optimization");
        assert_eq!(json["guidance"][1]["task"], "Partitioning");
        assert!(json["guidance"][1]["hints"][0]
            .as_str()
            .unwrap()
            .contains("Drag dimension sliders to find group boundaries"));
    }
}
