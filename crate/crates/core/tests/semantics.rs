use proptest::prelude::*;
use serde_json::json;
use sleec_core::sema::{analyze, Model};
use sleec_core::semantics::*;
use sleec_core::syntax::Polarity;

const CORPUS: &str = include_str!("../../../corpus/assistive.sleec");

fn corpus() -> Model {
    analyze(CORPUS).model().unwrap()
}

fn trace(m: &Model, rows: serde_json::Value, horizon: u64) -> Trace {
    Trace::from_json(m, &rows, horizon).unwrap()
}

fn ids(m: &Model, names: &[&str]) -> Vec<usize> {
    names.iter().map(|n| m.rule_index(n).unwrap()).collect()
}

#[test]
fn r1_r3_obligations_at_zero() {
    let m = corpus();
    let t = trace(
        &m,
        json!([{"t": 0, "events": ["HumanOnFloor", "SmokeDetecorAlarm"], "measures": {"humanAssents": false}}]),
        600,
    );
    let obs = obligations(&m, &ids(&m, &["r1", "r3"]), &t);
    let got: Vec<_> = obs
        .iter()
        .map(|o| {
            (
                m.rules[o.rule].id.as_str(),
                o.kind(),
                m.events[o.event()].as_str(),
                o.window(),
            )
        })
        .collect();
    assert_eq!(
        got,
        [
            (
                "r1",
                Polarity::Forbid,
                "CallEmergencyServices",
                Window { start: 0, end: 600 }
            ),
            (
                "r3",
                Polarity::Require,
                "CallEmergencyServices",
                Window { start: 0, end: 300 }
            ),
        ]
    );
}

#[test]
fn obligation_per_occurrence() {
    let m = corpus();
    let t = trace(
        &m,
        json!([{"t": 0, "events": ["SmokeDetecorAlarm"]}, {"t": 100, "events": ["SmokeDetecorAlarm"]}]),
        600,
    );
    let windows: Vec<_> = obligations(&m, &ids(&m, &["r3"]), &t)
        .iter()
        .map(|o| o.window())
        .collect();
    assert_eq!(
        windows,
        [Window { start: 0, end: 300 }, Window { start: 100, end: 400 }]
    );
}

#[test]
fn satisfies_reports_first_violation() {
    let m = corpus();
    let rs = ids(&m, &["r1", "r3"]);
    let situation =
        json!({"t": 0, "events": ["HumanOnFloor", "SmokeDetecorAlarm"], "measures": {"humanAssents": false}});
    let t = trace(&m, json!([situation.clone()]), 600);
    let s = satisfies(&m, &rs, &t);
    assert!(!s.ok);
    let v = s.first_violation.unwrap().obligation;
    assert_eq!(
        (m.rules[v.rule].id.as_str(), v.kind(), v.window()),
        ("r3", Polarity::Require, Window { start: 0, end: 300 })
    );

    let t = trace(
        &m,
        json!([situation, {"t": 100, "events": ["CallEmergencyServices"]}]),
        600,
    );
    let v = satisfies(&m, &rs, &t).first_violation.unwrap().obligation;
    assert_eq!(
        (m.rules[v.rule].id.as_str(), v.kind(), v.window()),
        ("r1", Polarity::Forbid, Window { start: 0, end: 600 })
    );
}

#[test]
fn c1_raised_only_without_early_call() {
    let m = corpus();
    let c1 = m.concern("c1").unwrap();
    let late = trace(
        &m,
        json!([{"t": 0, "events": ["SmokeDetecorAlarm"]}, {"t": 100, "events": ["CallEmergencyServices"]}]),
        600,
    );
    assert!(raises(c1, &late));
    assert!(satisfies_all(&m, &ids(&m, &["r1", "r2", "r3", "r4"]), &late));
    let early = trace(
        &m,
        json!([{"t": 0, "events": ["SmokeDetecorAlarm"]}, {"t": 30, "events": ["CallEmergencyServices"]}]),
        600,
    );
    assert!(!raises(c1, &early));
}

#[test]
fn forbid_pattern_needs_closed_window() {
    let m = corpus();
    let c1 = m.concern("c1").unwrap();
    let t = trace(&m, json!([{"t": 0, "events": ["SmokeDetecorAlarm"]}]), 59);
    assert!(!raises(c1, &t));
    let t = Trace { horizon: 60, ..t };
    assert!(raises(c1, &t));
}

#[test]
fn defeaters_last_match_wins() {
    let src = "def_start\n event E\n event A\n event B\n event C\n measure c: boolean\n measure d: boolean\ndef_end\nrule_start\n r when E then A unless c then B unless d then C unless (c and d)\nrule_end\n";
    let m = analyze(src).model().unwrap();
    let mk = |c: bool, d: bool| TracePoint {
        timestamp: 0,
        events: [m.event_index("E").unwrap()].into_iter().collect(),
        valuation: vec![MeasureValue::Bool(c), MeasureValue::Bool(d)],
    };
    let ev = |p: &TracePoint| match activation(&m.rules[0], p) {
        Activation::Activated { response, .. } => Some(m.events[response.event].clone()),
        _ => None,
    };
    assert_eq!(ev(&mk(false, false)).as_deref(), Some("A"));
    assert_eq!(ev(&mk(true, false)).as_deref(), Some("B"));
    assert_eq!(ev(&mk(false, true)).as_deref(), Some("C"));
    assert!(matches!(
        activation(&m.rules[0], &mk(true, true)),
        Activation::Suspended { defeater: 2 }
    ));
}

#[test]
fn otherwise_window_follows_primary() {
    let src = "def_start\n event E\n event A\n event B\ndef_end\nrule_start\n r when E then A within 5 seconds otherwise B within 10 seconds\nrule_end\n";
    let m = analyze(src).model().unwrap();
    let t = trace(&m, json!([{"t": 0, "events": ["E"]}, {"t": 12, "events": ["B"]}]), 20);
    let o = &obligations(&m, &[0], &t)[0];
    assert_eq!(o.demands[1].window, Window { start: 5, end: 15 });
    assert!(satisfies_all(&m, &[0], &t));
    let t = trace(&m, json!([{"t": 0, "events": ["E"]}, {"t": 16, "events": ["B"]}]), 20);
    assert!(!satisfies_all(&m, &[0], &t));
}

#[test]
fn immediate_response_window_is_a_point() {
    let src = "def_start\n event E\n event A\ndef_end\nrule_start\n r when E then A\nrule_end\n";
    let m = analyze(src).model().unwrap();
    let t = trace(&m, json!([{"t": 0, "events": ["E"]}, {"t": 1, "events": ["A"]}]), 5);
    assert!(!satisfies_all(&m, &[0], &t));
    let t = trace(&m, json!([{"t": 0, "events": ["E", "A"]}]), 5);
    assert!(satisfies_all(&m, &[0], &t));
}

#[test]
fn prefix_feasibility() {
    let m = corpus();
    let rs = ids(&m, &["r1", "r3"]);
    let t = trace(&m, json!([{"t": 0, "events": ["SmokeDetecorAlarm"]}]), 600);
    assert!(prefix_feasible(&m, &rs, &t));
    let t = trace(
        &m,
        json!([{"t": 0, "events": ["SmokeDetecorAlarm"]}, {"t": 300, "events": []}]),
        600,
    );
    assert!(!prefix_feasible(&m, &rs, &t));
}

fn arb_trace(m: &Model) -> impl Strategy<Value = Trace> {
    let n_events = m.events.len();
    let n_measures = m.measures.len();
    let kinds: Vec<_> = m.measures.iter().map(|d| d.kind.clone()).collect();
    proptest::collection::vec(
        (
            1u64..200,
            proptest::collection::vec(any::<bool>(), n_events),
            proptest::collection::vec((any::<bool>(), 0i64..30, 0u32..3), n_measures),
        ),
        0..5,
    )
    .prop_map(move |rows| {
        let mut t = 0;
        let points = rows
            .into_iter()
            .enumerate()
            .map(|(i, (gap, evs, vals))| {
                if i > 0 {
                    t += gap;
                }
                TracePoint {
                    timestamp: t,
                    events: evs.iter().enumerate().filter(|(_, b)| **b).map(|(e, _)| e).collect(),
                    valuation: vals
                        .iter()
                        .zip(&kinds)
                        .map(|((b, n, s), k)| match k {
                            sleec_core::sema::MeasureKind::Boolean => MeasureValue::Bool(*b),
                            sleec_core::sema::MeasureKind::Numeric => MeasureValue::Num(*n),
                            sleec_core::sema::MeasureKind::Scale(_) => MeasureValue::Scale(*s),
                        })
                        .collect(),
                }
            })
            .collect();
        Trace { points, horizon: 1000 }
    })
}

proptest! {
    #[test]
    fn satisfaction_is_monotone(t in arb_trace(&corpus()), mask in 0u8..16, sub in 0u8..16) {
        let m = corpus();
        let rs: Vec<usize> = (0..4).filter(|r| mask & (1 << r) != 0).collect();
        let sub_rs: Vec<usize> = rs.iter().copied().filter(|r| sub & (1 << r) != 0).collect();
        if satisfies(&m, &rs, &t).ok {
            prop_assert!(satisfies(&m, &sub_rs, &t).ok);
        }
        prop_assert_eq!(satisfies(&m, &rs, &t).ok, satisfies_all(&m, &rs, &t));
    }

    #[test]
    fn unreferenced_measures_are_irrelevant(t in arb_trace(&corpus()), flip in any::<bool>()) {
        let m = corpus();
        let all: Vec<usize> = (0..4).collect();
        let free = ["userUnconscious", "userDistressed"].map(|n| m.measure_index(n).unwrap());
        let mut t2 = t.clone();
        for p in &mut t2.points {
            p.valuation[free[0]] = MeasureValue::Bool(flip);
            p.valuation[free[1]] = MeasureValue::Scale(if flip { 2 } else { 0 });
        }
        prop_assert_eq!(satisfies(&m, &all, &t).ok, satisfies(&m, &all, &t2).ok);
        let c1 = m.concern("c1").unwrap();
        prop_assert_eq!(raises(c1, &t), raises(c1, &t2));
    }

    #[test]
    fn obligation_count_matches_activations(t in arb_trace(&corpus())) {
        let m = corpus();
        let all: Vec<usize> = (0..4).collect();
        let activated = t.points.iter().map(|p| {
            m.rules.iter().filter(|r| matches!(activation(r, p), Activation::Activated { .. })).count()
        }).sum::<usize>();
        prop_assert_eq!(obligations(&m, &all, &t).len(), activated);
    }
}
