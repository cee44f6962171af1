use a2_core::confidence::{
    propagate_confidence, structure_sensitivity_report, ConfidenceInput, ConfidenceMap, Method,
    Precondition,
};
use a2_core::format::{parse_case, Format};
use a2_core::{CaseGraph, NodeId};
use a2_testkit::trees::{tree_case, Leaf, Tree, TreeCase};
use proptest::prelude::*;

fn build(seed: u64) -> (TreeCase, CaseGraph, ConfidenceInput) {
    let t = tree_case(&mut a2_testkit::rng(seed), 50);
    let g = parse_case(&t.text, Format::Dsl)
        .unwrap_or_else(|d| panic!("{d:?}\n{}", t.text))
        .graph;
    let mut input = ConfidenceInput::default();
    for (id, v) in &t.subcases {
        input.subcases.insert(NodeId::new(id).unwrap(), *v);
    }
    (t, g, input)
}

fn run(g: &CaseGraph, input: &ConfidenceInput, method: Method) -> ConfidenceMap {
    propagate_confidence(g, input, method, Precondition::Exploratory).unwrap()
}

#[test]
fn generated_trees_fit_the_budget() {
    let mut nodes = 0;
    for seed in 0..300 {
        let (t, g, _) = build(seed);
        assert!(t.nodes <= 50 && g.len() == t.nodes);
        nodes += t.nodes;
    }
    // the corpus is not dominated by trivial trees
    assert!(nodes / 300 >= 10, "mean size {}", nodes / 300);
}

#[test]
fn worked_products() {
    // leaves 0.9, 0.8 and 0.95 multiply to 0.684
    let text = r#"case "t" {
      claim T "t" top;
      block decomposition B { parent T; sub A1, A2, A3; justification "j"; }
      assumption A1 "a" prob 0.9;
      assumption A2 "a" prob 0.8;
      assumption A3 "a" prob 0.95;
    }"#;
    let g = parse_case(text, Format::Dsl).unwrap().graph;
    let m = run(&g, &ConfidenceInput::default(), Method::Product);
    assert!((m.value("T").unwrap() - 0.9 * 0.8 * 0.95).abs() < 1e-12);
    assert!((m.value("T").unwrap() - 0.684).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn product_is_leaf_product(seed in any::<u64>()) {
        let (t, g, input) = build(seed);
        let m = run(&g, &input, Method::Product);
        let mut checked = 0;
        t.top.visit(&mut |id, sub| {
            let got = m.value(id).unwrap();
            assert!((got - sub.leaf_product()).abs() <= 1e-12, "{id}: {got} vs {}\n{}", sub.leaf_product(), t.text);
            checked += 1;
        });
        prop_assert!(checked > 0);
        let report = structure_sensitivity_report(&g, &input).unwrap();
        prop_assert!(report.contributions.iter().all(|c| c.agrees));
        prop_assert!(report.shared.is_empty());
    }

    #[test]
    fn doubts_is_clamped_leaf_doubt_sum(seed in any::<u64>()) {
        let (t, g, input) = build(seed);
        let m = run(&g, &input, Method::Doubts);
        t.top.visit(&mut |id, sub| {
            let got = m.value(id).unwrap();
            assert!((got - sub.leaf_doubt()).abs() <= 1e-12, "{id}: {got} vs {}\n{}", sub.leaf_doubt(), t.text);
            // unclamped, the doubt is exactly the sum of leaf doubts
            let total: f64 = sub.leaves().iter().map(|v| 1.0 - v).sum();
            if total <= 1.0 {
                assert!(((1.0 - got) - total).abs() <= 1e-12);
            }
        });
    }

    #[test]
    fn doubts_never_exceed_product(seed in any::<u64>()) {
        let (_, g, input) = build(seed);
        let p = run(&g, &input, Method::Product);
        let d = run(&g, &input, Method::Doubts);
        for id in g.ids() {
            if let (Some(pv), Some(dv)) = (p.value(id.as_str()), d.value(id.as_str())) {
                prop_assert!(dv <= pv, "{id}: {dv} > {pv}");
                prop_assert!((0.0..=1.0).contains(&pv) && (0.0..=1.0).contains(&dv));
            }
        }
    }

    #[test]
    fn excision_raises_top_confidence(seed in any::<u64>()) {
        let (t, g, input) = build(seed);
        let report = structure_sensitivity_report(&g, &input).unwrap();
        let pairs = t.top.antecedents();
        prop_assert_eq!(report.excisions.len(), pairs.len());
        for (block, antecedent, sub) in pairs {
            let e = report
                .excisions
                .iter()
                .find(|e| e.block.as_str() == block && e.antecedent.as_str() == antecedent)
                .expect("every antecedent is excised once");
            let oracle = t.top.product_without(sub);
            prop_assert!((e.top_after - oracle).abs() <= 1e-12);
            if sub.leaf_product() < 1.0 {
                prop_assert!(e.top_after > e.top_before, "{} from {}: {} -> {}", antecedent, block, e.top_before, e.top_after);
            } else {
                prop_assert!((e.top_after - e.top_before).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn raising_a_leaf_never_lowers_an_ancestor(seed in any::<u64>(), pick in any::<prop::sample::Index>(), bump in 0.0f64..1.0) {
        let (t, g, input) = build(seed);
        let mut leaves = Vec::new();
        collect_leaves(&t.top, &mut leaves);
        let (id, kind, value) = pick.get(&leaves).clone();
        let raised = value + (1.0 - value) * bump;
        let mut higher = input.clone();
        let key = NodeId::new(id).unwrap();
        match kind {
            LeafKind::Assumption => higher.assumptions.insert(key, raised),
            LeafKind::Subcase => higher.subcases.insert(key, raised),
            LeafKind::Evidence(e) => higher.evidence.insert(NodeId::new(e).unwrap(), raised),
        };
        for method in [Method::Product, Method::Doubts] {
            let before = run(&g, &input, method);
            let after = run(&g, &higher, method);
            for n in g.ids() {
                if let (Some(b), Some(a)) = (before.value(n.as_str()), after.value(n.as_str())) {
                    prop_assert!(a >= b - 1e-15, "{method}: {n} fell from {b} to {a}");
                }
            }
        }
    }
}

#[derive(Clone)]
enum LeafKind {
    Assumption,
    Subcase,
    Evidence(String),
}

fn collect_leaves(t: &Tree, out: &mut Vec<(String, LeafKind, f64)>) {
    match t {
        Tree::Leaf {
            id, kind, value, ..
        } => {
            let k = match kind {
                Leaf::Assumption => LeafKind::Assumption,
                Leaf::Subcase => LeafKind::Subcase,
                Leaf::Evidence { id } => LeafKind::Evidence(id.clone()),
            };
            out.push((id.clone(), k, *value));
        }
        Tree::Claim { block, .. } => {
            for s in block.side.iter().chain(&block.subs) {
                collect_leaves(s, out);
            }
        }
    }
}
