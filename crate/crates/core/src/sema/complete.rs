use serde::Serialize;

use crate::syntax::{parse, tokenize, Keyword, TimeUnit, TokenKind};

use super::symbols::{build_symbols, SymbolTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CompletionKind {
    Keyword,
    Skeleton,
    Event,
    Measure,
    Constant,
    ScaleLabel,
    TimeUnit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletionItem {
    pub label: String,
    pub kind: CompletionKind,
    pub insert_text: String,
}

impl CompletionItem {
    fn new(label: impl Into<String>, kind: CompletionKind) -> Self {
        let label = label.into();
        CompletionItem {
            insert_text: label.clone(),
            label,
            kind,
        }
    }

    fn skeleton(label: &str, insert_text: &str) -> Self {
        CompletionItem {
            label: label.to_string(),
            kind: CompletionKind::Skeleton,
            insert_text: insert_text.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Context {
    Event,
    Condition,
    Amount,
    Unit,
    Block(Option<Keyword>),
}

/// Completion items for the cursor at byte `offset`. Symbols come from the
/// whole document, the context from the text before the cursor.
pub fn completions(source: &str, offset: usize) -> Vec<CompletionItem> {
    let mut offset = offset.min(source.len());
    while !source.is_char_boundary(offset) {
        offset -= 1;
    }
    let before = &source[..offset];
    let word_start = before
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_alphanumeric() || *c == '_')
        .last()
        .map_or(offset, |(i, _)| i);
    let prefix = &before[word_start..];

    let (table, _) = build_symbols(&parse(source).document);
    let context = context_at(&before[..word_start]);
    let mut items = items_for(context, &table);
    items.retain(|i| i.label.starts_with(prefix) && i.label != prefix);
    items
}

fn context_at(text: &str) -> Context {
    let tokens: Vec<_> = tokenize(text)
        .into_iter()
        .filter(|t| !matches!(t.kind, TokenKind::Error))
        .collect();
    let block = tokens.iter().rev().find_map(|t| match t.kind {
        TokenKind::Keyword(
            k @ (Keyword::DefStart
            | Keyword::DefEnd
            | Keyword::RuleStart
            | Keyword::RuleEnd
            | Keyword::ConcernStart
            | Keyword::ConcernEnd
            | Keyword::PurposeStart
            | Keyword::PurposeEnd),
        ) => Some(k),
        _ => None,
    });
    let kind = |i: usize| tokens.len().checked_sub(i).map(|j| &tokens[j].kind);
    match kind(1) {
        Some(TokenKind::Keyword(Keyword::When | Keyword::Then | Keyword::Otherwise)) => Context::Event,
        Some(TokenKind::Keyword(Keyword::Not)) => match kind(2) {
            Some(TokenKind::Keyword(Keyword::Then | Keyword::Otherwise)) => Context::Event,
            _ => Context::Condition,
        },
        Some(
            TokenKind::Keyword(Keyword::And | Keyword::Or | Keyword::Unless)
            | TokenKind::LParen
            | TokenKind::Eq
            | TokenKind::Neq
            | TokenKind::Lt
            | TokenKind::Le
            | TokenKind::Gt
            | TokenKind::Ge,
        ) => Context::Condition,
        Some(TokenKind::Keyword(Keyword::Within)) => Context::Amount,
        Some(TokenKind::Int(_) | TokenKind::CapIdent | TokenKind::LowIdent)
            if matches!(kind(2), Some(TokenKind::Keyword(Keyword::Within))) =>
        {
            Context::Unit
        }
        _ => Context::Block(block),
    }
}

const RULE_SKELETON: &str = "ID when EVENT then RESPONSE";

fn items_for(context: Context, table: &SymbolTable) -> Vec<CompletionItem> {
    let keywords = |ks: &[Keyword]| {
        ks.iter()
            .map(|k| CompletionItem::new(k.as_str(), CompletionKind::Keyword))
            .collect::<Vec<_>>()
    };
    match context {
        Context::Event => table
            .events_in_order()
            .into_iter()
            .map(|e| CompletionItem::new(e, CompletionKind::Event))
            .collect(),
        Context::Condition => {
            let mut items: Vec<_> = table
                .measures_in_order()
                .into_iter()
                .map(|(m, _)| CompletionItem::new(m, CompletionKind::Measure))
                .collect();
            items.extend(
                table
                    .constants
                    .keys()
                    .map(|c| CompletionItem::new(c, CompletionKind::Constant)),
            );
            items.extend(
                table
                    .scale_labels
                    .keys()
                    .map(|l| CompletionItem::new(l, CompletionKind::ScaleLabel)),
            );
            items.extend(keywords(&[Keyword::And, Keyword::Or, Keyword::Not]));
            items
        }
        Context::Amount => table
            .constants
            .keys()
            .map(|c| CompletionItem::new(c, CompletionKind::Constant))
            .collect(),
        Context::Unit => TimeUnit::ALL
            .iter()
            .map(|u| CompletionItem::new(u.keyword(), CompletionKind::TimeUnit))
            .collect(),
        Context::Block(Some(Keyword::DefStart)) => {
            keywords(&[Keyword::Event, Keyword::Measure, Keyword::Constant, Keyword::DefEnd])
        }
        Context::Block(Some(Keyword::RuleStart)) => {
            let mut items = vec![CompletionItem::skeleton("rule", RULE_SKELETON)];
            items.extend(keywords(&[
                Keyword::Within,
                Keyword::Otherwise,
                Keyword::Unless,
                Keyword::RuleEnd,
            ]));
            items
        }
        Context::Block(Some(k @ (Keyword::ConcernStart | Keyword::PurposeStart))) => {
            let end = if k == Keyword::ConcernStart {
                Keyword::ConcernEnd
            } else {
                Keyword::PurposeEnd
            };
            let mut items = vec![CompletionItem::skeleton("pattern", RULE_SKELETON)];
            items.extend(keywords(&[Keyword::Within, Keyword::Otherwise, end]));
            items
        }
        Context::Block(_) => vec![
            CompletionItem::skeleton("def_start", "def_start\n  event EVENT\ndef_end"),
            CompletionItem::skeleton("rule_start", &format!("rule_start\n  {RULE_SKELETON}\nrule_end")),
            CompletionItem::skeleton(
                "concern_start",
                &format!("concern_start\n  {RULE_SKELETON}\nconcern_end"),
            ),
            CompletionItem::skeleton(
                "purpose_start",
                &format!("purpose_start\n  {RULE_SKELETON}\npurpose_end"),
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = "def_start\n  event HumanOnFloor\n  event Alarm\n  measure hot: boolean\n  constant LIMIT = 5\ndef_end\nrule_start\n  r1 when ";

    fn labels(items: &[CompletionItem]) -> Vec<&str> {
        items.iter().map(|i| i.label.as_str()).collect()
    }

    #[test]
    fn after_when_lists_events() {
        let items = completions(SRC, SRC.len());
        assert_eq!(labels(&items), ["HumanOnFloor", "Alarm"]);
        assert!(items.iter().all(|i| i.kind == CompletionKind::Event));
    }

    #[test]
    fn partial_word_filters() {
        let src = format!("{SRC}Hu");
        assert_eq!(labels(&completions(&src, src.len())), ["HumanOnFloor"]);
    }

    #[test]
    fn empty_document_offers_skeletons() {
        let items = completions("", 0);
        assert!(items
            .iter()
            .any(|i| i.label == "def_start" && i.kind == CompletionKind::Skeleton));
    }

    #[test]
    fn after_within_amount_lists_units() {
        let src = format!("{SRC}Alarm then HumanOnFloor within 300 ");
        let items = completions(&src, src.len());
        assert_eq!(labels(&items), ["seconds", "minutes", "hours", "days"]);
    }

    #[test]
    fn condition_lists_measures() {
        let src = format!("{SRC}Alarm and ");
        let l = labels(&completions(&src, src.len())).join(" ");
        assert_eq!(l, "hot LIMIT and or not");
    }

    #[test]
    fn response_not_lists_events() {
        let src = format!("{SRC}Alarm then not ");
        assert_eq!(labels(&completions(&src, src.len())), ["HumanOnFloor", "Alarm"]);
    }
}
