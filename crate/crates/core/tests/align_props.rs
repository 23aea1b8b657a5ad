use gec_core::align::oracle::edit_distance_oracle;
use gec_core::align::{align_ops, align_tokens, ops_cost, AlignOp, CostModel, Edit, EditOp};
use gec_core::editscript::{
    apply_script, parse_script, serialize_edits, ScriptMode, TextualEdit,
};
use proptest::prelude::*;

const ALPHABET: [&str; 6] = ["a", "b", "c", "d", "with", "."];

fn tokens(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(&ALPHABET[..]), 0..=max)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn costs() -> impl Strategy<Value = CostModel> {
    (1u32..4, 1u32..4, 1u32..4).prop_map(|(replace, insert, delete)| CostModel { replace, insert, delete })
}

fn check_edit(e: &Edit, src: &[String], tgt: &[String]) {
    let (i, j, k, l) = (e.src_span.start, e.src_span.end, e.tgt_span.start, e.tgt_span.end);
    match e.op {
        EditOp::Insert => assert!(i == j && k < l),
        EditOp::Delete => assert!(i < j && k == l),
        EditOp::Replace => assert!(i < j && k < l),
    }
    assert_eq!(e.src_text, &src[i..j]);
    assert_eq!(e.tgt_text, &tgt[k..l]);
}

/// Replays the cursor rule of paper-mode application against the true
/// positions: every delete or replace must find its own text first, and
/// every insert must sit exactly at the cursor.
fn paper_unambiguous(src: &[String], edits: &[Edit]) -> bool {
    let mut cursor = 0;
    for e in edits {
        let want = e.src_span.start;
        let ok = match e.op {
            EditOp::Insert => want == cursor,
            _ => {
                let n = e.src_text.len();
                (cursor..=src.len().saturating_sub(n)).find(|&p| src[p..p + n] == e.src_text[..]) == Some(want)
            }
        };
        if !ok {
            return false;
        }
        cursor = e.src_span.end;
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn premerge_cost_is_minimal(src in tokens(12), tgt in tokens(12), costs in costs()) {
        let ops = align_ops(&src, &tgt, &costs);
        prop_assert_eq!(ops_cost(&ops, &costs), edit_distance_oracle(&src, &tgt, &costs).unwrap());
        let consumed = ops.iter().filter(|o| !matches!(o, AlignOp::Insert)).count();
        let produced = ops.iter().filter(|o| !matches!(o, AlignOp::Delete)).count();
        prop_assert_eq!((consumed, produced), (src.len(), tgt.len()));
    }

    #[test]
    fn edits_are_well_formed(src in tokens(12), tgt in tokens(12)) {
        let edits = align_tokens(&src, &tgt, &CostModel::UNIT);
        for e in &edits {
            check_edit(e, &src, &tgt);
        }
        for w in edits.windows(2) {
            let key = |e: &Edit| (e.src_span.start, e.tgt_span.start);
            prop_assert!(key(&w[0]) < key(&w[1]));
            prop_assert!(w[0].src_span.end <= w[1].src_span.start);
        }
        prop_assert_eq!(edits.is_empty(), src == tgt);
        prop_assert_eq!(&edits, &align_tokens(&src, &tgt, &CostModel::UNIT));
    }

    #[test]
    fn anchored_round_trip(src in tokens(12), tgt in tokens(12)) {
        let edits = align_tokens(&src, &tgt, &CostModel::UNIT);
        let text = serialize_edits(&edits, ScriptMode::Anchored);
        let parsed = parse_script(&text, ScriptMode::Anchored).unwrap();
        let direct: Vec<TextualEdit> = edits.iter().map(|e| TextualEdit::from_edit(e, ScriptMode::Anchored)).collect();
        prop_assert_eq!(&parsed.edits, &direct);
        let out = apply_script(&src, &parsed.edits);
        prop_assert!(out.skipped.is_empty());
        prop_assert_eq!(out.result, tgt);
    }

    #[test]
    fn paper_round_trip_when_unambiguous(src in tokens(10), tgt in tokens(10)) {
        let edits = align_tokens(&src, &tgt, &CostModel::UNIT);
        let text = serialize_edits(&edits, ScriptMode::Paper);
        let parsed = parse_script(&text, ScriptMode::Paper).unwrap();
        let src_has_with = edits.iter().any(|e| e.op == EditOp::Replace && e.src_text.iter().any(|t| t == "with"));
        if !src_has_with {
            let direct: Vec<TextualEdit> = edits.iter().map(|e| TextualEdit::from_edit(e, ScriptMode::Paper)).collect();
            prop_assert_eq!(&parsed.edits, &direct);
            if paper_unambiguous(&src, &edits) {
                let out = apply_script(&src, &parsed.edits);
                prop_assert!(out.skipped.is_empty());
                prop_assert_eq!(out.result, tgt);
            }
        }
    }

    #[test]
    fn apply_length_accounting(src in tokens(10), script in prop::collection::vec((0u8..3, tokens(2), tokens(2), prop::option::of(0usize..12)), 0..6)) {
        let edits: Vec<TextualEdit> = script
            .into_iter()
            .filter_map(|(op, a, b, anchor)| {
                let (op, a, b) = match op {
                    0 if !b.is_empty() => (EditOp::Insert, Vec::new(), b),
                    1 if !a.is_empty() => (EditOp::Delete, a, Vec::new()),
                    2 if !a.is_empty() && !b.is_empty() => (EditOp::Replace, a, b),
                    _ => return None,
                };
                Some(TextualEdit { op, src_text: a, tgt_text: b, anchor })
            })
            .collect();
        let out = apply_script(&src, &edits);
        prop_assert_eq!(out.applied + out.skipped.len(), edits.len());
        let mut skipped = out.skipped.iter().map(|(e, _)| e).collect::<Vec<_>>();
        let mut delta: isize = 0;
        for e in &edits {
            if let Some(pos) = skipped.iter().position(|s| *s == e) {
                skipped.remove(pos);
            } else {
                delta += e.tgt_text.len() as isize - e.src_text.len() as isize;
            }
        }
        prop_assert_eq!(out.result.len() as isize, src.len() as isize + delta);
    }
}

#[test]
fn oracle_refuses_long_input() {
    let long: Vec<u8> = vec![0; 17];
    assert!(edit_distance_oracle(&long, &[], &CostModel::UNIT).is_err());
    assert_eq!(edit_distance_oracle::<u8>(&[], &[], &CostModel::UNIT), Ok(0));
    assert_eq!(edit_distance_oracle(&["a"], &[], &CostModel::UNIT), Ok(1));
    assert_eq!(edit_distance_oracle(&["a", "b", "c"], &["a", "x", "c", "d"], &CostModel::UNIT), Ok(2));
}
