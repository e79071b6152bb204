//! Small-multiples display (SMD) layouts for the MDMV options.
//!
//! Columns come from the spatial fields (`S1`, `S2`, and their union);
//! rows add one color or opacity dimension each. A cell is the concrete
//! encoding of one small multiple and doubles as the detail-view spec.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design_space::{mdmv_applicable, EncodingState, VisOption};
use crate::names::string_enum;

string_enum! {
    pub enum ColumnSource as "column source" {
        S1 => "S1",
        S2 => "S2",
        S1plusS2 => "S1+S2" | "S1plusS2",
    }
}

string_enum! {
    /// Encoding channel of a single chart instance.
    pub enum Channel as "channel" {
        X => "X",
        Y => "Y",
        Color => "Color",
        Opacity => "Opacity",
    }
}

string_enum! {
    /// Categorical tint linking a spatial-only multiple to its source field(s).
    pub enum Tint as "tint" {
        S1 => "S1",
        S2 => "S2",
        /// Even blend of the S1 and S2 field colors.
        Blend => "S1+S2",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub source: ColumnSource,
    pub dims: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "dimension")]
pub enum RowKind {
    SpatialOnly,
    ColorEncoded(String),
    OpacityEncoded(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSpec {
    pub kind: RowKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchSpec {
    pub channel: Channel,
    pub candidates: Vec<String>,
    pub active: String,
}

/// Zero-based grid position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPos {
    pub row: usize,
    pub col: usize,
}

/// Concrete encoding of one small multiple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpec {
    pub option: VisOption,
    pub source: ColumnSource,
    /// All spatial dimensions of the column.
    pub spatial: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Axis list for PC, PSc and the scatterplot matrices.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub axes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opacity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tint: Option<Tint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub switches: Vec<SwitchSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmdLayout {
    pub option: VisOption,
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<RowSpec>,
    /// Row-major: `cells[row][col]`.
    pub cells: Vec<Vec<CellSpec>>,
    /// Every distinct switch used by any cell, in first-use order.
    pub switches: Vec<SwitchSpec>,
    pub selected_cell: GridPos,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("{0} is not applicable to the current encoding")]
    NotApplicable(VisOption),
    #[error("{0} has no small-multiples display")]
    NoSmd(VisOption),
    #[error("cell ({row}, {col}) is outside the grid")]
    OutOfRange { row: usize, col: usize },
}

impl LayoutError {
    pub fn code(&self) -> &'static str {
        match self {
            LayoutError::NotApplicable(_) => "NotApplicable",
            LayoutError::NoSmd(_) => "NoSmd",
            LayoutError::OutOfRange { .. } => "OutOfRange",
        }
    }
}

/// Builds the SMD grid for an MDMV option.
pub fn layout_smd(option: VisOption, enc: &EncodingState) -> Result<SmdLayout, LayoutError> {
    if !option.capabilities().has_smd {
        return Err(LayoutError::NoSmd(option));
    }
    if !mdmv_applicable(option, enc.spatial_count()) {
        return Err(LayoutError::NotApplicable(option));
    }

    let mut columns = Vec::with_capacity(3);
    if !enc.s1.is_empty() {
        columns.push(ColumnSpec {
            source: ColumnSource::S1,
            dims: enc.s1.clone(),
        });
    }
    if !enc.s2.is_empty() {
        columns.push(ColumnSpec {
            source: ColumnSource::S2,
            dims: enc.s2.clone(),
        });
    }
    let matrix = matches!(option, VisOption::SPLOM | VisOption::RSPLOM);
    if columns.len() == 2 && !matrix {
        columns.push(ColumnSpec {
            source: ColumnSource::S1plusS2,
            dims: enc.s1.iter().chain(&enc.s2).cloned().collect(),
        });
    }

    let rows: Vec<RowSpec> = std::iter::once(RowKind::SpatialOnly)
        .chain(enc.color.iter().cloned().map(RowKind::ColorEncoded))
        .chain(enc.opacity.iter().cloned().map(RowKind::OpacityEncoded))
        .map(|kind| RowSpec { kind })
        .collect();

    let cells: Vec<Vec<CellSpec>> = rows
        .iter()
        .map(|row| {
            columns
                .iter()
                .map(|column| build_cell(option, column, &row.kind, enc))
                .collect()
        })
        .collect();

    let mut switches: Vec<SwitchSpec> = Vec::new();
    for sw in cells.iter().flatten().flat_map(|c| &c.switches) {
        if !switches.contains(sw) {
            switches.push(sw.clone());
        }
    }

    Ok(SmdLayout {
        option,
        columns,
        rows,
        cells,
        switches,
        selected_cell: GridPos { row: 0, col: 0 },
    })
}

fn build_cell(
    option: VisOption,
    column: &ColumnSpec,
    row: &RowKind,
    enc: &EncodingState,
) -> CellSpec {
    let dims = &column.dims;
    let mut switches = Vec::new();
    let (x, y, axes) = if option.is_two_axis() {
        let x = dims[0].clone();
        let y = dims.get(1).unwrap_or(&dims[0]).clone();
        if dims.len() > 2 {
            switches.push(SwitchSpec {
                channel: Channel::X,
                candidates: dims.clone(),
                active: x.clone(),
            });
            switches.push(SwitchSpec {
                channel: Channel::Y,
                candidates: dims.clone(),
                active: y.clone(),
            });
        }
        (Some(x), Some(y), Vec::new())
    } else {
        (None, None, dims.clone())
    };

    let (color, opacity, tint) = match row {
        RowKind::SpatialOnly => {
            let tint = match column.source {
                ColumnSource::S1 => Tint::S1,
                ColumnSource::S2 => Tint::S2,
                ColumnSource::S1plusS2 => Tint::Blend,
            };
            (None, None, Some(tint))
        }
        RowKind::ColorEncoded(d) => {
            if enc.color.len() > 1 {
                switches.push(SwitchSpec {
                    channel: Channel::Color,
                    candidates: enc.color.clone(),
                    active: d.clone(),
                });
            }
            (Some(d.clone()), None, None)
        }
        RowKind::OpacityEncoded(d) => {
            if enc.opacity.len() > 1 {
                switches.push(SwitchSpec {
                    channel: Channel::Opacity,
                    candidates: enc.opacity.clone(),
                    active: d.clone(),
                });
            }
            (None, Some(d.clone()), None)
        }
    };

    CellSpec {
        option,
        source: column.source,
        spatial: dims.clone(),
        x,
        y,
        axes,
        color,
        opacity,
        tint,
        switches,
    }
}

impl SmdLayout {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn cell(&self, pos: GridPos) -> Option<&CellSpec> {
        self.cells.get(pos.row)?.get(pos.col)
    }

    /// Loads a multiple into the detail view.
    pub fn detail_for(&mut self, pos: GridPos) -> Result<&CellSpec, LayoutError> {
        if self.cell(pos).is_none() {
            return Err(LayoutError::OutOfRange {
                row: pos.row,
                col: pos.col,
            });
        }
        self.selected_cell = pos;
        Ok(&self.cells[pos.row][pos.col])
    }

    pub fn detail(&self) -> &CellSpec {
        &self.cells[self.selected_cell.row][self.selected_cell.col]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(s1: &[&str], s2: &[&str], color: &[&str], opacity: &[&str]) -> EncodingState {
        let v = |x: &[&str]| x.iter().map(|s| s.to_string()).collect();
        EncodingState {
            s1: v(s1),
            s2: v(s2),
            color: v(color),
            opacity: v(opacity),
            object: vec![],
        }
    }

    #[test]
    fn pc_three_columns() {
        let l = layout_smd(VisOption::PC, &enc(&["a", "b", "c"], &["d", "e"], &[], &[])).unwrap();
        assert_eq!(l.row_count(), 1);
        let axes: Vec<Vec<String>> = l.cells[0].iter().map(|c| c.axes.clone()).collect();
        assert_eq!(
            axes,
            vec![
                vec!["a", "b", "c"],
                vec!["d", "e"],
                vec!["a", "b", "c", "d", "e"]
            ]
        );
        assert_eq!(l.cells[0][2].tint, Some(Tint::Blend));
    }

    #[test]
    fn splom_has_no_third_column() {
        let e = enc(&["a", "b", "c"], &["d", "e", "f"], &[], &[]);
        for opt in [VisOption::SPLOM, VisOption::RSPLOM] {
            let l = layout_smd(opt, &e).unwrap();
            assert_eq!((l.row_count(), l.column_count()), (1, 2));
        }
    }

    #[test]
    fn color_rows() {
        // Oracle: one spatial row plus one row per color dimension, in field order.
        let l = layout_smd(
            VisOption::PC,
            &enc(&["a", "b", "c"], &["d"], &["q", "r"], &[]),
        )
        .unwrap();
        let expected = vec![
            RowKind::SpatialOnly,
            RowKind::ColorEncoded("q".into()),
            RowKind::ColorEncoded("r".into()),
        ];
        assert_eq!(
            l.rows.iter().map(|r| r.kind.clone()).collect::<Vec<_>>(),
            expected
        );
        assert_eq!(l.column_count(), 3);
        for cell in &l.cells[2] {
            assert_eq!(cell.color.as_deref(), Some("r"));
        }
        assert!(l.cells[0].iter().all(|c| c.color.is_none()));
    }

    #[test]
    fn scatterplot_switches() {
        let l = layout_smd(VisOption::SP, &enc(&["a", "b", "c"], &[], &[], &[])).unwrap();
        let cell = &l.cells[0][0];
        assert_eq!(
            (cell.x.as_deref(), cell.y.as_deref()),
            (Some("a"), Some("b"))
        );
        assert_eq!(cell.switches.len(), 2);
        assert_eq!(cell.switches[0].channel, Channel::X);
        assert_eq!(cell.switches[0].candidates, vec!["a", "b", "c"]);
        assert_eq!(cell.switches[0].active, "a");
    }

    #[test]
    fn duplicated_axis_without_switch() {
        let l = layout_smd(VisOption::WDCP, &enc(&["a"], &[], &[], &[])).unwrap();
        let cell = &l.cells[0][0];
        assert_eq!(cell.x, cell.y);
        assert!(cell.switches.is_empty());
    }

    #[test]
    fn color_switch_only_with_multiple_color_dims() {
        let one = layout_smd(VisOption::PC, &enc(&["a"], &[], &["q"], &[])).unwrap();
        assert!(one.switches.is_empty());
        let two = layout_smd(VisOption::PC, &enc(&["a"], &[], &["q", "r"], &["o"])).unwrap();
        assert_eq!(two.switches.len(), 2);
        assert_eq!(two.switches[0].active, "q");
        assert_eq!(two.switches[1].active, "r");
    }

    #[test]
    fn errors() {
        let e = enc(&["a"], &[], &[], &[]);
        assert_eq!(
            layout_smd(VisOption::Hist, &e),
            Err(LayoutError::NoSmd(VisOption::Hist))
        );
        assert_eq!(
            layout_smd(VisOption::Line1D, &e),
            Err(LayoutError::NoSmd(VisOption::Line1D))
        );
        assert_eq!(
            layout_smd(VisOption::SPLOM, &e),
            Err(LayoutError::NotApplicable(VisOption::SPLOM))
        );
    }

    #[test]
    fn detail_selection() {
        let mut l = layout_smd(
            VisOption::PC,
            &enc(&["a", "b", "c"], &["d", "e"], &["r"], &[]),
        )
        .unwrap();
        let initial = l.detail().clone();
        assert_eq!(l.detail_for(GridPos { row: 0, col: 0 }).unwrap(), &initial);
        let combined = l.detail_for(GridPos { row: 0, col: 2 }).unwrap().clone();
        assert_eq!(combined.axes, vec!["a", "b", "c", "d", "e"]);
        assert_eq!(l.selected_cell, GridPos { row: 0, col: 2 });
        let colored = l.detail_for(GridPos { row: 1, col: 1 }).unwrap();
        assert_eq!(colored.color.as_deref(), Some("r"));
        assert_eq!(
            l.detail_for(GridPos { row: 2, col: 0 }),
            Err(LayoutError::OutOfRange { row: 2, col: 0 })
        );
    }
}
