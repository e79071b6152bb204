//! The fixed thirteen-option visualization design space and the selection panel model.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data_model::{DType, RunTable};
use crate::names::string_enum;

string_enum! {
    /// One visualization option of the design space.
    pub enum VisOption as "visualization option" {
        SP => "SP" | "scatterplot",
        WDCP => "wDCP" | "densitycontourplot",
        SPLOM => "SPLOM" | "scatterplotmatrix",
        RSPLOM => "rSPLOM" | "reducedsplom",
        PSc => "PSc" | "pointscales",
        PC => "PC" | "parallelcoordinates",
        Hist => "Hist" | "histogram",
        Line1D => "Line1D" | "1dline" | "linegraph",
        Box1D => "Box1D" | "1dbox" | "boxplot",
        CHist1D => "CHist1D" | "1dhist" | "cumulativehistogram",
        Grid2D => "Grid2D" | "2dgrid" | "gridview",
        Jux2D => "Jux2D" | "2djux",
        Sup2D => "Sup2D" | "2dsup",
    }
}

string_enum! {
    pub enum Category as "category" {
        MDMV => "MDMV",
        Complex1D => "Complex1D",
        Complex2D => "Complex2D",
    }
}

string_enum! {
    /// Mark class used by the mark-based recommendation strategies.
    pub enum MarkClass as "mark class" {
        Point0D => "Point0D",
        Line1D => "Line1D",
        Area2D => "Area2D",
        ObjectMark => "ObjectMark",
    }
}

string_enum! {
    /// A channel field of the selection panel.
    pub enum Field as "field" {
        S1 => "S1",
        S2 => "S2",
        Color => "Color",
        Opacity => "Opacity",
        Object => "Object",
    }
}

/// Static capabilities of a [`VisOption`] for a single chart instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    pub category: Category,
    pub spatial_min: usize,
    /// `None` means unbounded.
    pub spatial_max: Option<usize>,
    pub supports_color: bool,
    pub supports_opacity: bool,
    pub mark_class: MarkClass,
    pub has_smd: bool,
}

impl VisOption {
    pub const MDMV: [VisOption; 7] = [
        VisOption::SP,
        VisOption::WDCP,
        VisOption::SPLOM,
        VisOption::RSPLOM,
        VisOption::PSc,
        VisOption::PC,
        VisOption::Hist,
    ];

    pub fn capabilities(self) -> Capabilities {
        use VisOption::*;
        let mdmv = |min, max, mark, smd| Capabilities {
            category: Category::MDMV,
            spatial_min: min,
            spatial_max: max,
            supports_color: true,
            supports_opacity: true,
            mark_class: mark,
            has_smd: smd,
        };
        let object = |category| Capabilities {
            category,
            spatial_min: 0,
            spatial_max: Some(0),
            supports_color: false,
            supports_opacity: false,
            mark_class: MarkClass::ObjectMark,
            has_smd: false,
        };
        match self {
            SP => mdmv(2, Some(2), MarkClass::Point0D, true),
            WDCP => mdmv(2, Some(2), MarkClass::Line1D, true),
            SPLOM | RSPLOM => mdmv(3, None, MarkClass::Point0D, true),
            PSc => mdmv(1, None, MarkClass::Point0D, true),
            PC => mdmv(1, None, MarkClass::Line1D, true),
            Hist => Capabilities {
                supports_opacity: false,
                ..mdmv(1, Some(1), MarkClass::Area2D, false)
            },
            Line1D | Box1D | CHist1D => object(Category::Complex1D),
            Grid2D | Jux2D | Sup2D => object(Category::Complex2D),
        }
    }

    pub fn category(self) -> Category {
        self.capabilities().category
    }

    pub fn mark_class(self) -> MarkClass {
        self.capabilities().mark_class
    }

    pub fn is_mdmv(self) -> bool {
        self.category() == Category::MDMV
    }

    /// Object dtype required by a complex-object option.
    pub fn object_dtype(self) -> Option<DType> {
        match self.category() {
            Category::MDMV => None,
            Category::Complex1D => Some(DType::Series1D),
            Category::Complex2D => Some(DType::ImageRef2D),
        }
    }

    /// Two-axis charts that repeat a lone spatial dimension on both axes.
    pub fn is_two_axis(self) -> bool {
        matches!(self, VisOption::SP | VisOption::WDCP)
    }
}

pub const S1_CAPACITY: usize = 15;
pub const S2_CAPACITY: usize = 15;
pub const COLOR_CAPACITY: usize = 4;
pub const OPACITY_CAPACITY: usize = 4;
pub const OBJECT_CAPACITY: usize = 2;

/// Contents of the selection panel's channel fields.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingState {
    #[serde(default)]
    pub s1: Vec<String>,
    #[serde(default)]
    pub s2: Vec<String>,
    #[serde(default)]
    pub color: Vec<String>,
    #[serde(default)]
    pub opacity: Vec<String>,
    #[serde(default)]
    pub object: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("dimension `{dimension}` cannot be placed in the {field} field")]
    IncompatibleField { field: Field, dimension: String },
    #[error("dimension `{dimension}` appears twice in the {field} field")]
    Duplicate { field: Field, dimension: String },
    #[error("dimension `{0}` is in both spatial fields")]
    SpatialOverlap(String),
    #[error("the {field} field holds at most {capacity} dimensions")]
    OverCapacity { field: Field, capacity: usize },
}

impl EncodingError {
    pub fn code(&self) -> &'static str {
        match self {
            EncodingError::UnknownDimension(_) => "UnknownDimension",
            EncodingError::IncompatibleField { .. } => "IncompatibleField",
            EncodingError::Duplicate { .. } => "DuplicateInField",
            EncodingError::SpatialOverlap(_) => "SpatialOverlap",
            EncodingError::OverCapacity { .. } => "OverCapacity",
        }
    }
}

impl EncodingState {
    pub fn field(&self, field: Field) -> &[String] {
        match field {
            Field::S1 => &self.s1,
            Field::S2 => &self.s2,
            Field::Color => &self.color,
            Field::Opacity => &self.opacity,
            Field::Object => &self.object,
        }
    }

    pub fn spatial_count(&self) -> usize {
        self.s1.len() + self.s2.len()
    }

    /// Field a dimension sits in, if any. Spatial fields take precedence.
    pub fn field_of(&self, name: &str) -> Option<Field> {
        Field::ALL
            .iter()
            .copied()
            .find(|f| self.field(*f).iter().any(|d| d == name))
    }

    pub fn validate(&self, table: &RunTable) -> Result<(), EncodingError> {
        for field in Field::ALL.iter().copied() {
            let dims = self.field(field);
            let capacity = match field {
                Field::S1 => S1_CAPACITY,
                Field::S2 => S2_CAPACITY,
                Field::Color => COLOR_CAPACITY,
                Field::Opacity => OPACITY_CAPACITY,
                Field::Object => OBJECT_CAPACITY,
            };
            if dims.len() > capacity {
                return Err(EncodingError::OverCapacity { field, capacity });
            }
            let mut seen = HashSet::new();
            for name in dims {
                let dim = table
                    .dimension(name)
                    .ok_or_else(|| EncodingError::UnknownDimension(name.clone()))?;
                let compatible = match field {
                    Field::Object => dim.dtype != DType::Quantitative,
                    _ => dim.dtype == DType::Quantitative,
                };
                if !compatible {
                    return Err(EncodingError::IncompatibleField {
                        field,
                        dimension: name.clone(),
                    });
                }
                if !seen.insert(name.as_str()) {
                    return Err(EncodingError::Duplicate {
                        field,
                        dimension: name.clone(),
                    });
                }
            }
        }
        if let Some(shared) = self.s1.iter().find(|d| self.s2.contains(d)) {
            return Err(EncodingError::SpatialOverlap(shared.clone()));
        }
        // One 1D slot and one 2D slot.
        for dtype in [DType::Series1D, DType::ImageRef2D] {
            let n = self
                .object
                .iter()
                .filter(|d| table.dimension(d).map(|x| x.dtype) == Some(dtype))
                .count();
            if n > 1 {
                return Err(EncodingError::OverCapacity {
                    field: Field::Object,
                    capacity: OBJECT_CAPACITY,
                });
            }
        }
        Ok(())
    }

    /// First object-field dimension with the given dtype.
    pub fn object_of(&self, table: &RunTable, dtype: DType) -> Option<&str> {
        self.object
            .iter()
            .find(|d| table.dimension(d).map(|x| x.dtype) == Some(dtype))
            .map(String::as_str)
    }
}

/// An option renderable for the current encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Applicable {
    pub option: VisOption,
    /// A two-axis chart showing a single spatial dimension on both axes.
    pub duplicated_axis: bool,
}

/// Whether an MDMV option renders with `spatial` encoded spatial dimensions.
pub fn mdmv_applicable(option: VisOption, spatial: usize) -> bool {
    if !option.is_mdmv() {
        return false;
    }
    // Two-axis charts degrade to a duplicated axis with one dimension.
    let min = if option.is_two_axis() {
        1
    } else {
        option.capabilities().spatial_min
    };
    spatial >= min
}

/// Panels of a scatterplot matrix over `n` dimensions as `(row, col)` pairs.
///
/// The reduced variant keeps only the strict lower triangle.
pub fn matrix_panels(option: VisOption, n: usize) -> Vec<(usize, usize)> {
    let all = (0..n).flat_map(|r| (0..n).map(move |c| (r, c)));
    match option {
        VisOption::SPLOM => all.collect(),
        VisOption::RSPLOM => all.filter(|(r, c)| r > c).collect(),
        _ => Vec::new(),
    }
}

/// Every option that can be rendered for `enc`, in design-space order.
///
/// Object dtypes are looked up in `table`; unknown object names are ignored.
pub fn applicable_options(enc: &EncodingState, table: &RunTable) -> Vec<Applicable> {
    let spatial = enc.spatial_count();
    let has_1d = enc.object_of(table, DType::Series1D).is_some();
    let has_2d = enc.object_of(table, DType::ImageRef2D).is_some();
    VisOption::ALL
        .iter()
        .copied()
        .filter(|opt| match opt.object_dtype() {
            None => mdmv_applicable(*opt, spatial),
            Some(DType::Series1D) => has_1d,
            Some(_) => has_2d,
        })
        .map(|option| Applicable {
            option,
            duplicated_axis: option.is_two_axis() && spatial == 1,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::Dimension;

    fn table() -> RunTable {
        let mut dims: Vec<Dimension> = ["a", "b", "c", "d", "e", "q", "r"]
            .iter()
            .map(|n| Dimension::new(*n, DType::Quantitative))
            .collect();
        dims.push(Dimension::series("f", 4));
        dims.push(Dimension::new("img", DType::ImageRef2D));
        RunTable::schema_only(dims).unwrap()
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn options(enc: &EncodingState) -> Vec<VisOption> {
        applicable_options(enc, &table())
            .into_iter()
            .map(|a| a.option)
            .collect()
    }

    #[test]
    fn category_counts() {
        let count = |c| VisOption::ALL.iter().filter(|o| o.category() == c).count();
        assert_eq!(count(Category::MDMV), 7);
        assert_eq!(count(Category::Complex1D), 3);
        assert_eq!(count(Category::Complex2D), 3);
    }

    #[test]
    fn smd_everywhere_but_hist() {
        for o in VisOption::ALL {
            assert_eq!(
                o.capabilities().has_smd,
                o.is_mdmv() && *o != VisOption::Hist
            );
        }
    }

    #[test]
    fn mark_classes() {
        use VisOption::*;
        for o in [SP, SPLOM, RSPLOM, PSc] {
            assert_eq!(o.mark_class(), MarkClass::Point0D);
        }
        assert_eq!(PC.mark_class(), MarkClass::Line1D);
        assert_eq!(WDCP.mark_class(), MarkClass::Line1D);
        assert_eq!(Hist.mark_class(), MarkClass::Area2D);
        for o in [Line1D, Box1D, CHist1D, Grid2D, Jux2D, Sup2D] {
            assert_eq!(o.mark_class(), MarkClass::ObjectMark);
        }
    }

    #[test]
    fn single_spatial_dimension() {
        let enc = EncodingState {
            s1: names(&["a"]),
            ..Default::default()
        };
        use VisOption::*;
        assert_eq!(options(&enc), vec![SP, WDCP, PSc, PC, Hist]);
        let dup: Vec<_> = applicable_options(&enc, &table())
            .into_iter()
            .filter(|a| a.duplicated_axis)
            .map(|a| a.option)
            .collect();
        assert_eq!(dup, vec![SP, WDCP]);
    }

    #[test]
    fn object_only() {
        let enc = EncodingState {
            object: names(&["f"]),
            ..Default::default()
        };
        use VisOption::*;
        assert_eq!(options(&enc), vec![Line1D, Box1D, CHist1D]);
    }

    #[test]
    fn three_dims_and_image() {
        let enc = EncodingState {
            s1: names(&["a", "b", "c"]),
            object: names(&["img"]),
            ..Default::default()
        };
        // Brute force: each option's own capability predicate.
        let expected: Vec<VisOption> = VisOption::ALL
            .iter()
            .copied()
            .filter(|o| match o.category() {
                Category::MDMV => 3 >= o.capabilities().spatial_min,
                Category::Complex1D => false,
                Category::Complex2D => true,
            })
            .collect();
        assert_eq!(options(&enc), expected);
        assert_eq!(expected.len(), 10);
    }

    #[test]
    fn reduced_matrix_is_strict_lower_triangle() {
        assert_eq!(matrix_panels(VisOption::SPLOM, 3).len(), 9);
        assert_eq!(
            matrix_panels(VisOption::RSPLOM, 3),
            vec![(1, 0), (2, 0), (2, 1)]
        );
        assert!(matrix_panels(VisOption::PC, 3).is_empty());
    }

    #[test]
    fn option_names_round_trip() {
        for o in VisOption::ALL {
            assert_eq!(o.as_str().parse::<VisOption>().unwrap(), *o);
        }
        assert_eq!("wdcp".parse::<VisOption>().unwrap(), VisOption::WDCP);
        assert!("pie".parse::<VisOption>().is_err());
    }

    #[test]
    fn validation_rules() {
        let t = table();
        let ok = EncodingState {
            s1: names(&["a", "b"]),
            s2: names(&["c"]),
            color: names(&["q"]),
            object: names(&["f", "img"]),
            ..Default::default()
        };
        assert!(ok.validate(&t).is_ok());

        let series_in_s1 = EncodingState {
            s1: names(&["f"]),
            ..Default::default()
        };
        assert!(matches!(
            series_in_s1.validate(&t),
            Err(EncodingError::IncompatibleField {
                field: Field::S1,
                ..
            })
        ));

        let overlap = EncodingState {
            s1: names(&["a"]),
            s2: names(&["a"]),
            ..Default::default()
        };
        assert_eq!(
            overlap.validate(&t),
            Err(EncodingError::SpatialOverlap("a".into()))
        );

        let dup = EncodingState {
            color: names(&["q", "q"]),
            ..Default::default()
        };
        assert!(matches!(
            dup.validate(&t),
            Err(EncodingError::Duplicate { .. })
        ));

        let too_many_colors = EncodingState {
            color: names(&["a", "b", "c", "d", "e"]),
            ..Default::default()
        };
        assert!(matches!(
            too_many_colors.validate(&t),
            Err(EncodingError::OverCapacity {
                field: Field::Color,
                ..
            })
        ));

        let unknown = EncodingState {
            s2: names(&["zz"]),
            ..Default::default()
        };
        assert_eq!(
            unknown.validate(&t),
            Err(EncodingError::UnknownDimension("zz".into()))
        );
    }
}
