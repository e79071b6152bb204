use proptest::prelude::*;
use rsvp_core::analytics::FilterState;
use rsvp_core::dashboard::{DashboardDoc, Mode, StylePatch, ViewContent};
use rsvp_core::data_model::RunTable;
use rsvp_core::design_space::{EncodingState, VisOption};
use rsvp_core::fixture;
use rsvp_core::layout::layout_smd;
use serde_json::{json, Value};

const DOC_SCHEMA: &str = include_str!("../../../docs/schema/dashboard_doc.schema.json");
const SPEC_SCHEMA: &str = include_str!("../../../docs/schema/vis_spec.schema.json");

fn validator(text: &str, root: Option<&str>) -> jsonschema::Validator {
    let mut schema: Value = serde_json::from_str(text).unwrap();
    if let Some(def) = root {
        schema["$ref"] = json!(format!("#/$defs/{def}"));
    }
    jsonschema::validator_for(&schema).unwrap()
}

fn check(v: &jsonschema::Validator, instance: &Value) {
    let errors: Vec<String> = v
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}\n{instance}");
}

fn table() -> RunTable {
    fixture::edge(27, 4).table()
}

fn enc() -> EncodingState {
    EncodingState {
        s1: vec!["low".into(), "high".into(), "sigma".into()],
        s2: vec!["sep".into()],
        color: vec!["chi2".into()],
        opacity: vec![],
        object: vec!["dtco".into(), "co".into()],
    }
}

/// One view of every content kind and payload shape.
fn rich_doc(t: &RunTable) -> DashboardDoc {
    let e = enc();
    let mut doc = DashboardDoc::new();
    let mut add = |c: ViewContent| doc.add_view(t, &e, c).unwrap();
    for option in VisOption::MDMV {
        let layout = layout_smd(option, &e);
        match layout {
            Ok(l) => add(ViewContent::Cell {
                cell: l.cells[l.row_count() - 1][0].clone(),
            }),
            Err(_) => add(ViewContent::chart(option, &["low", "high", "sigma"][..1])),
        };
    }
    for option in [VisOption::Line1D, VisOption::Box1D, VisOption::CHist1D] {
        add(ViewContent::object(option, "dtco"));
    }
    let sup = [VisOption::Grid2D, VisOption::Jux2D, VisOption::Sup2D]
        .map(|o| add(ViewContent::object(o, "co")));
    add(ViewContent::External {
        spec: json!({"mark": "tick", "encoding": {"x": {"field": "sep"}}}),
    });
    let patch = StylePatch::from_json(json!({"blend_mode": "screen", "color_scheme": "diverging"}))
        .unwrap();
    doc.edit_attributes(t, sup[2], &patch).unwrap();
    doc
}

#[test]
fn documents_and_emissions_match_the_published_schemas() {
    let t = table();
    let mut doc = rich_doc(&t);
    let doc_v = validator(DOC_SCHEMA, None);
    let spec_v = validator(SPEC_SCHEMA, None);
    let emission_v = validator(SPEC_SCHEMA, Some("emission"));
    check(&doc_v, &serde_json::from_str(&doc.to_json()).unwrap());

    let emitted = serde_json::to_value(doc.emit_specs(&t, "edge").unwrap()).unwrap();
    check(&emission_v, &emitted);
    let kinds: Vec<&str> = emitted["views"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["payload"]["kind"].as_str().unwrap())
        .collect();
    for kind in [
        "points",
        "histogram",
        "contours",
        "series",
        "boxplot",
        "cumulative",
        "images",
        "external",
    ] {
        assert!(kinds.contains(&kind), "{kind} not covered");
    }
    for view in emitted["views"].as_array().unwrap() {
        check(&spec_v, &view["spec"]);
    }

    doc.set_filters(&t, FilterState::default().with_range("low", -2.0, -1.0))
        .unwrap();
    doc.set_mode(Mode::Analyze);
    let empty = serde_json::to_value(doc.emit_specs(&t, "edge").unwrap()).unwrap();
    check(&emission_v, &empty);
    assert!(empty.to_string().contains("\"kind\":\"unavailable\""));
    check(&doc_v, &serde_json::from_str(&doc.to_json()).unwrap());
}

#[test]
fn schema_rejects_malformed_documents() {
    let t = table();
    let doc_v = validator(DOC_SCHEMA, None);
    let mut value: Value = serde_json::from_str(&rich_doc(&t).to_json()).unwrap();
    value["views"][0]["rect"]["w"] = json!(0);
    assert!(!doc_v.is_valid(&value));
    assert!(DashboardDoc::from_json(&value.to_string()).is_err());
    let mut value: Value = serde_json::from_str(&rich_doc(&t).to_json()).unwrap();
    value["mode"] = json!("review");
    assert!(!doc_v.is_valid(&value));
    assert!(DashboardDoc::from_json(&value.to_string()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn filtered_emissions_stay_valid(lo in 0.0f64..1.0, width in 0.0f64..1.0, pick in 0usize..27) {
        let t = table();
        let mut doc = rich_doc(&t);
        let f = FilterState { selected_run: Some(pick), ..FilterState::default().with_range("sigma", lo * 3.0, (lo + width) * 3.0) };
        doc.set_filters(&t, f).unwrap();
        let emitted = serde_json::to_value(doc.emit_specs(&t, "edge").unwrap()).unwrap();
        let v = validator(SPEC_SCHEMA, Some("emission"));
        prop_assert!(v.is_valid(&emitted));
    }
}
