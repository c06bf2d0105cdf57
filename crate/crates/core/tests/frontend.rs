use sleec_core::sema::{analyze, completions, CompletionKind, SemanticKind};
use sleec_core::syntax::{parse, pretty_print, StripSpans};

const CORPUS: &str = include_str!("../../../corpus/assistive.sleec");
const VERBATIM: &str = include_str!("../../../corpus/assistive_verbatim.sleec");

#[test]
fn completed_corpus_is_clean() {
    let a = analyze(CORPUS);
    assert!(a.diagnostics().is_empty(), "{:#?}", a.diagnostics());
    assert_eq!(a.document.definitions.len(), 17);
    assert_eq!(a.document.rules.len(), 4);
    assert_eq!(a.document.concerns.len(), 1);
    let m = a.model().unwrap();
    assert_eq!(m.measures.len(), 8);
    assert_eq!(m.rules[3].response.deadline, 60);
}

#[test]
fn verbatim_table_reports_eight_undeclared() {
    let a = analyze(VERBATIM);
    assert!(a.parse_diagnostics.is_empty(), "{:#?}", a.parse_diagnostics);
    let names: Vec<&str> = a
        .semantic_diagnostics
        .iter()
        .map(|d| {
            assert_eq!(d.kind, SemanticKind::UndeclaredIdentifier);
            &VERBATIM[d.span.start..d.span.end]
        })
        .collect();
    assert_eq!(
        names,
        [
            "OpenCurtainRequest",
            "underDressed",
            "OpenCurtain",
            "DressingStarted",
            "roomTemperature",
            "userUnderDressed",
            "DressingComplete",
            "alarmRestarts"
        ]
    );
    assert!(a.model().is_none());
}

#[test]
fn duplicate_event_reported() {
    let src = "def_start\n  event HumanOnFloor\n  event HumanOnFloor\ndef_end\nrule_start\n  r when HumanOnFloor then HumanOnFloor\nrule_end\n";
    let a = analyze(src);
    let dup: Vec<_> = a
        .semantic_diagnostics
        .iter()
        .filter(|d| d.kind == SemanticKind::DuplicateDefinition)
        .collect();
    assert_eq!(dup.len(), 1);
    assert!(dup[0].related.is_some());
}

#[test]
fn corpus_round_trips_through_printer() {
    let doc = parse(CORPUS).document;
    let printed = pretty_print(&doc);
    let again = parse(&printed);
    assert!(again.diagnostics.is_empty());
    assert_eq!(again.document.without_spans(), doc.without_spans());
}

#[test]
fn completions_after_when_are_declared_events() {
    let cursor = CORPUS.find("rule_end").unwrap();
    let src = format!("{}  r9 when \n{}", &CORPUS[..cursor], &CORPUS[cursor..]);
    let offset = cursor + "  r9 when ".len();
    let items = completions(&src, offset);
    let mut labels: Vec<&str> = items.iter().map(|i| i.label.as_str()).collect();
    assert!(items.iter().all(|i| i.kind == CompletionKind::Event));
    let mut expected: Vec<String> = analyze(CORPUS).model().unwrap().events;
    labels.sort();
    expected.sort();
    assert_eq!(labels, expected);
    assert!(labels.contains(&"SmokeDetecorAlarm"));
}
