use proptest::prelude::*;
use sleec_core::diagnostics::*;
use sleec_core::engine::{self, find_extension, Bounds, Budget, Property, Status};
use sleec_core::sema::{analyze, Analysis, MeasureKind, Model};
use sleec_core::semantics::{prefix_feasible, trigger_holds, MeasureValue};

const CORPUS: &str = include_str!("../../../corpus/assistive.sleec");

fn corpus() -> (Analysis, Model) {
    let a = analyze(CORPUS);
    let m = a.model().unwrap();
    (a, m)
}

fn conflict() -> (Analysis, Model, ConflictDiagnosis) {
    let (a, m) = corpus();
    let v = engine::check(&m, Property::Situational, "r1", Bounds::default_for(&m)).unwrap();
    let d = build_conflict_diagnosis(&v, &a.document, &m).unwrap();
    (a, m, d)
}

fn names(m: &Model, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| m.measures[i].name.clone()).collect()
}

#[test]
fn conflict_shows_only_trigger_measures() {
    let (_, m, d) = conflict();
    assert_eq!(names(&m, &d.shown_measures), ["humanAssents"]);
    assert_eq!(d.raw_measure_count, m.measures.len());
    let clauses: Vec<&str> = d.highlighted_clauses.iter().map(|h| h.clause.as_str()).collect();
    assert_eq!(
        clauses,
        [
            "not CallEmergencyServices within 600 seconds",
            "CallEmergencyServices within 300 seconds"
        ]
    );
    for h in &d.highlighted_clauses {
        assert_eq!(&CORPUS[h.span.start..h.span.end], h.clause);
    }
}

#[test]
fn conflict_text_rows() {
    let (_, m, d) = conflict();
    let diag = Diagnosis::Conflict(d);
    let text = render(&diag, &m, RenderMode::Filtered, Format::Text);
    assert!(
        text.lines()
            .any(|l| l == "t=0: events={HumanOnFloor, SmokeDetecorAlarm}; humanAssents=false"),
        "{text}"
    );
    let raw = render(&diag, &m, RenderMode::Raw, Format::Text);
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| l.starts_with("t="))
            .map(|l| l.split(';').next().unwrap().to_string())
            .collect()
    };
    assert_eq!(strip(&text), strip(&raw));
    assert!(raw.contains("measures shown: 8 of 8"));
    assert!(text.contains("measures shown: 1 of 8"));
}

#[test]
fn conflict_json_schema() {
    let (_, m, d) = conflict();
    let j = Diagnosis::Conflict(d).to_json(&m, RenderMode::Filtered);
    assert_eq!(j["type"], "conflict");
    assert_eq!(j["rules"], serde_json::json!(["r1", "r3"]));
    assert_eq!(j["counts"], serde_json::json!({"shown": 1, "total": 8}));
    assert_eq!(j["trace"][0]["measures"], serde_json::json!({"humanAssents": false}));
    assert_eq!(j["highlights"].as_array().unwrap().len(), 2);
}

#[test]
fn insufficiency_lists_related_rules() {
    let (_, m) = corpus();
    let v = engine::check(&m, Property::Insufficient, "c1", Bounds::default_for(&m)).unwrap();
    let d = build_insufficiency_diagnosis(&v, &m).unwrap();
    let related: Vec<(&str, Vec<&str>)> = d
        .related_rules
        .iter()
        .map(|r| (r.rule.as_str(), r.events.iter().map(String::as_str).collect()))
        .collect();
    assert_eq!(
        related,
        [
            ("r1", vec!["CallEmergencyServices"]),
            ("r3", vec!["CallEmergencyServices", "SmokeDetecorAlarm"])
        ]
    );
    assert_eq!(names(&m, &d.shown_measures), ["userDisablesAlarm", "alarmRestarts"]);
}

#[test]
fn related_rules_match_a_direct_scan() {
    let (_, m) = corpus();
    let c = &m.concerns[0];
    let concern_events = [c.trigger.event, c.response.event];
    let expected: Vec<&str> = m
        .rules
        .iter()
        .filter(|r| concern_events.contains(&r.trigger.event) || concern_events.contains(&r.response.event))
        .map(|r| r.id.as_str())
        .collect();
    let got: Vec<String> = related_rules(&m, 0).into_iter().map(|r| r.rule).collect();
    assert_eq!(got, expected);
}

#[test]
fn measure_free_concern_filters_everything() {
    let src = CORPUS.replace(
        "c1 := when SmokeDetecorAlarm and ((not userDisablesAlarm) or alarmRestarts)",
        "c1 := when SmokeDetecorAlarm",
    );
    let m = analyze(&src).model().unwrap();
    let v = engine::check(&m, Property::Insufficient, "c1", Bounds::default_for(&m)).unwrap();
    let d = Diagnosis::Insufficiency(build_insufficiency_diagnosis(&v, &m).unwrap());
    assert_eq!(d.counts(&m, RenderMode::Filtered), (0, 8));
    let text = d.to_text(&m, RenderMode::Filtered);
    assert!(text.lines().filter(|l| l.starts_with("t=")).all(|l| !l.contains(';')));
}

#[test]
fn unrelated_concern_has_no_related_rules() {
    let src = CORPUS.replace(
        "c1 := when SmokeDetecorAlarm and ((not userDisablesAlarm) or alarmRestarts)\n    then not CallEmergencyServices within 1 minutes",
        "c1 := when FireSafetyMeasures then not FireSafetyMeasures within 1 minutes",
    );
    let m = analyze(&src).model().unwrap();
    assert!(related_rules(&m, 0).is_empty());
}

#[test]
fn measure_free_conflict_shows_nothing() {
    let src = "def_start\n event E\n event F\n measure x: boolean\ndef_end\nrule_start\n a when E then F within 5 seconds\n b when E then not F within 10 seconds\nrule_end\n";
    let a = analyze(src);
    let m = a.model().unwrap();
    let v = engine::check(&m, Property::Situational, "a", Bounds::default_for(&m)).unwrap();
    let d = build_conflict_diagnosis(&v, &a.document, &m).unwrap();
    assert!(d.shown_measures.is_empty());
    assert_eq!(d.raw_measure_count, 1);
}

#[test]
fn rejects_wrong_verdicts() {
    let (a, m) = corpus();
    let v = engine::check(&m, Property::Insufficient, "c1", Bounds::default_for(&m)).unwrap();
    assert!(build_conflict_diagnosis(&v, &a.document, &m).is_err());
    let mut v = engine::check(&m, Property::Situational, "r1", Bounds::default_for(&m)).unwrap();
    v.situation.as_mut().unwrap().points[0].events = Default::default();
    assert!(matches!(
        build_conflict_diagnosis(&v, &a.document, &m),
        Err(DiagnosisError::MalformedVerdict(_))
    ));
}

#[test]
fn empty_trace_renders_header_only() {
    let (_, m) = corpus();
    let d = Diagnosis::Insufficiency(InsufficiencyDiagnosis {
        concern: "c1".into(),
        witness: sleec_core::semantics::Trace::empty(10),
        related_rules: Vec::new(),
        shown_measures: Vec::new(),
        raw_measure_count: 8,
    });
    let text = d.to_text(&m, RenderMode::Raw);
    assert!(text.lines().all(|l| !l.starts_with("t=")));
}

fn arb_value(kind: &MeasureKind) -> BoxedStrategy<MeasureValue> {
    match kind {
        MeasureKind::Boolean => any::<bool>().prop_map(MeasureValue::Bool).boxed(),
        MeasureKind::Numeric => any::<i64>().prop_map(MeasureValue::Num).boxed(),
        MeasureKind::Scale(l) => (0..l.len() as u32).prop_map(MeasureValue::Scale).boxed(),
    }
}

fn hidden_valuations() -> impl Strategy<Value = Vec<Vec<MeasureValue>>> {
    let (_, m, d) = conflict();
    let point: Vec<BoxedStrategy<MeasureValue>> = m.measures.iter().map(|x| arb_value(&x.kind)).collect();
    proptest::collection::vec(point, d.situation.points.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hidden_measures_never_change_the_conflict(values in hidden_valuations()) {
        let (_, m, d) = conflict();
        let mut s = d.situation.clone();
        for (p, vals) in s.points.iter_mut().zip(values) {
            for (k, v) in vals.into_iter().enumerate() {
                if !d.shown_measures.contains(&k) {
                    p.valuation[k] = v;
                }
            }
        }
        let rules: Vec<usize> = d.conflicting_rules.iter().map(|r| m.rule_index(r).unwrap()).collect();
        let target = m.rule(&d.target).unwrap();
        prop_assert!(s.points.iter().any(|p| trigger_holds(&target.trigger, p)));
        prop_assert!(prefix_feasible(&m, &rules, &s));
        let bounds = Bounds::default_for(&m);
        let horizon = bounds.extension_horizon(m.max_deadline());
        let ext = find_extension(&m, &rules, &s, bounds.max_points, horizon, &mut Budget::new(1_000_000)).unwrap();
        prop_assert!(ext.is_none());
    }
}

#[test]
fn status_is_issue_for_corpus_conflict() {
    let (_, m) = corpus();
    let v = engine::check(&m, Property::Situational, "r1", Bounds::default_for(&m)).unwrap();
    assert_eq!(v.status, Status::IssueFound);
}
