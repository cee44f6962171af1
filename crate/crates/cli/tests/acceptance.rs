//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the test harness so the lines always print.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use a2_core::confidence::{
    propagate_confidence, structure_sensitivity_report, ConfidenceInput, Method, Precondition,
};
use a2_core::format::{parse_case, parse_case_named, serialize_case, Format};
use a2_core::measures::{good, keynes, l_keynes, qualitative_to_probability, QualitativeLevel};
use a2_core::risk::{final_gate_for, ledger_for, RiskCategory, RiskThresholds};
use a2_core::validity::{Assessment, Cause};
use a2_core::{assess_validity, CaseGraph, LeafInputs, NodeId};
use a2_testkit::confluence::confluence_oracle;
use a2_testkit::joint::Joint;
use a2_testkit::rules::{fixture_corpus, fixtures_dir, RULE_TABLE};
use a2_testkit::small::small_case;
use a2_testkit::trees::tree_case;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn load(name: &str) -> Result<CaseGraph, String> {
    let text =
        std::fs::read_to_string(fixtures_dir().join(name)).map_err(|e| format!("{name}: {e}"))?;
    parse_case_named(name, &text, Format::from_path(name))
        .map(|p| p.graph)
        .map_err(|d| format!("{name}: {}", d[0]))
}

fn within(budget: Duration, took: Duration) -> Result<(), String> {
    if took <= budget {
        Ok(())
    } else {
        Err(format!("took {took:.2?}, budget {budget:.0?}"))
    }
}

fn keynes_worked_example() -> Outcome {
    let prior = qualitative_to_probability(QualitativeLevel::Neutral);
    let posterior = qualitative_to_probability(QualitativeLevel::Confident);
    if (prior, posterior) != (0.5, 0.9) {
        return Err(format!("levels map to {prior} and {posterior}"));
    }
    let k = keynes(prior, posterior, 10.0)
        .map_err(|e| e.to_string())?
        .value
        .get();
    let line = format!("neutral -> confident, base 10: keynes = {k:.4}, target 0.26 +/- 0.005");
    if (k - 0.26).abs() <= 0.005 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn measure_identities() -> Outcome {
    const N: u64 = 10_000;
    let start = Instant::now();
    let mut rng = a2_testkit::rng(0x5eed_0002);
    let (mut worst_k, mut worst_g) = (0f64, 0f64);
    for _ in 0..N {
        let j = Joint::sample(&mut rng, 1e-3);
        for base in [2.0, std::f64::consts::E, 10.0] {
            let k = keynes(j.p_c(), j.p_c_given_e(), base)
                .map_err(|e| e.to_string())?
                .value
                .get();
            let l = l_keynes(j.p_e_given_c(), j.p_e(), base)
                .map_err(|e| e.to_string())?
                .value
                .get();
            let g = good(j.p_e_given_c(), j.p_e_given_not_c(), base)
                .map_err(|e| e.to_string())?
                .value
                .get();
            worst_k = worst_k.max((k - l).abs());
            worst_g = worst_g.max((g - j.log_odds_ratio(base)).abs());
        }
    }
    let took = start.elapsed();
    let line = format!(
        "{N} joints x 3 bases: max |keynes - l_keynes| = {worst_k:.1e}, max |good - log odds ratio| = {worst_g:.1e}, tolerance 1e-9, {took:.2?}"
    );
    within(Duration::from_secs(5), took).map_err(|e| format!("{line}; {e}"))?;
    if worst_k <= 1e-9 && worst_g <= 1e-9 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn linda() -> Outcome {
    let g = load("linda.a2")?;
    let k = |id: &str| -> Result<f64, String> {
        let el = g
            .node(id)
            .and_then(|n| n.as_evidence())
            .and_then(|e| e.elicitation.clone())
            .ok_or_else(|| format!("{id} has no elicitation"))?;
        let (prior, posterior) = el
            .prior
            .zip(el.posterior)
            .ok_or_else(|| format!("{id} lacks prior or posterior"))?;
        Ok(keynes(prior.probability(), posterior.probability(), 10.0)
            .map_err(|e| e.to_string())?
            .value
            .get())
    };
    let (c1, c2) = (k("E_C1")?, k("E_C2")?);
    let line = format!("keynes(C1) = {c1:.4}, keynes(C2) = {c2:.4}");
    if c1 == 0.0 && c2 > c1 {
        Ok(line)
    } else {
        Err(line)
    }
}

struct TreeStats {
    nodes_checked: usize,
    worst_product: f64,
    worst_doubts: f64,
    excisions: usize,
    excision_failures: Vec<String>,
    conservatism_failures: Vec<String>,
    took: Duration,
}

fn tree_corpus() -> Result<TreeStats, String> {
    let start = Instant::now();
    let mut rng = a2_testkit::rng(0x5eed_0004);
    let mut s = TreeStats {
        nodes_checked: 0,
        worst_product: 0.0,
        worst_doubts: 0.0,
        excisions: 0,
        excision_failures: Vec::new(),
        conservatism_failures: Vec::new(),
        took: Duration::ZERO,
    };
    for i in 0..1000 {
        let t = tree_case(&mut rng, 50);
        let g = parse_case(&t.text, Format::Dsl)
            .map_err(|d| format!("tree {i}: {}", d[0]))?
            .graph;
        let mut input = ConfidenceInput::default();
        for (id, v) in &t.subcases {
            input.subcases.insert(NodeId::new(id).map_err(|e| e.0)?, *v);
        }
        let run = |m| {
            propagate_confidence(&g, &input, m, Precondition::Exploratory)
                .map_err(|e| format!("tree {i}: {e}"))
        };
        let (p, d) = (run(Method::Product)?, run(Method::Doubts)?);
        let mut missing = None;
        t.top
            .visit(&mut |id, sub| match (p.value(id), d.value(id)) {
                (Some(pv), Some(dv)) => {
                    s.nodes_checked += 1;
                    s.worst_product = s.worst_product.max((pv - sub.leaf_product()).abs());
                    s.worst_doubts = s.worst_doubts.max((dv - sub.leaf_doubt()).abs());
                }
                _ => missing = Some(format!("tree {i}: no value for {id}")),
            });
        if let Some(m) = missing {
            return Err(m);
        }
        for id in g.ids() {
            if let (Some(pv), Some(dv)) = (p.value(id.as_str()), d.value(id.as_str())) {
                if dv > pv {
                    s.conservatism_failures
                        .push(format!("tree {i} {id}: {dv} > {pv}"));
                }
            }
        }
        let report =
            structure_sensitivity_report(&g, &input).map_err(|e| format!("tree {i}: {e}"))?;
        for (block, antecedent, sub) in t.top.antecedents() {
            if sub.leaf_product() >= 1.0 {
                continue;
            }
            s.excisions += 1;
            let e = report
                .excisions
                .iter()
                .find(|e| e.block.as_str() == block && e.antecedent.as_str() == antecedent);
            match e {
                Some(e) if e.top_after > e.top_before => {}
                Some(e) => s.excision_failures.push(format!(
                    "tree {i}: excising {antecedent} from {block}: {} -> {}",
                    e.top_before, e.top_after
                )),
                None => s.excision_failures.push(format!(
                    "tree {i}: no excision of {antecedent} from {block}"
                )),
            }
        }
    }
    s.took = start.elapsed();
    Ok(s)
}

fn confidence_formulas(s: &Result<TreeStats, String>) -> Outcome {
    let s = s.as_ref().map_err(Clone::clone)?;
    let line = format!(
        "1000 trees (<= 50 nodes), {} node values: max product error {:.1e}, max doubts error {:.1e}, tolerance 1e-12; \
         {} excisions with excised product < 1, {} not strictly increasing; {:.2?}",
        s.nodes_checked,
        s.worst_product,
        s.worst_doubts,
        s.excisions,
        s.excision_failures.len(),
        s.took
    );
    within(Duration::from_secs(10), s.took).map_err(|e| format!("{line}; {e}"))?;
    if s.worst_product <= 1e-12 && s.worst_doubts <= 1e-12 && s.excision_failures.is_empty() {
        Ok(line)
    } else {
        let first = s.excision_failures.first().cloned().unwrap_or_default();
        Err(format!("{line} {first}"))
    }
}

fn conservatism(s: &Result<TreeStats, String>) -> Outcome {
    let s = s.as_ref().map_err(Clone::clone)?;
    let line = format!(
        "same corpus: {} nodes where doubts exceed product",
        s.conservatism_failures.len()
    );
    match s.conservatism_failures.first() {
        None => Ok(line),
        Some(f) => Err(format!("{line}, e.g. {f}")),
    }
}

const ORACLE_SAMPLE: u64 = 3000;

fn validity_rules() -> Outcome {
    let start = Instant::now();
    let mut rows = 0;
    for rc in RULE_TABLE {
        let g = load(rc.file)?;
        let m = assess_validity(&g, &LeafInputs::concurring())
            .map_err(|e| format!("{}: {e}", rc.rule))?;
        for (node, want) in rc.expect {
            if m.get(node) != Some(*want) {
                return Err(format!(
                    "{}: {node} is {:?}, expected {want}",
                    rc.rule,
                    m.get(node)
                ));
            }
            rows += 1;
        }
        for (node, defeater, exonerated) in rc.decided_by {
            let d = NodeId::new(*defeater).map_err(|e| e.0)?;
            let want = if *exonerated {
                Cause::Exonerated(d)
            } else {
                Cause::FromDefeater(d)
            };
            if m.cause(node) != Some(&want) {
                return Err(format!(
                    "{}: cause of {node} is {:?}, expected {want}",
                    rc.rule,
                    m.cause(node)
                ));
            }
            rows += 1;
        }
    }
    let mut rng = a2_testkit::rng(0x5eed_0006);
    let mut sizes = BTreeMap::new();
    for i in 0..ORACLE_SAMPLE {
        let c = small_case(&mut rng, 12);
        let g = parse_case(&c.text, Format::Dsl)
            .map_err(|d| format!("case {i}: {}", d[0]))?
            .graph;
        let m = assess_validity(&g, &c.inputs).map_err(|e| format!("case {i}: {e}"))?;
        let engine: BTreeMap<NodeId, Assessment> =
            m.nodes.iter().map(|(k, v)| (k.clone(), v.value)).collect();
        let oracle = confluence_oracle(&g, &c.inputs)
            .map_err(|e| format!("case {i}: oracle {e:?}\n{}", c.text))?;
        if engine != oracle {
            return Err(format!(
                "case {i}: engine and confluence oracle disagree\n{}",
                c.text
            ));
        }
        *sizes.entry(g.len()).or_insert(0) += 1;
    }
    let took = start.elapsed();
    let line = format!(
        "{} rule-table checks over {} fixtures; confluence oracle (all rule orders) agrees on {ORACLE_SAMPLE} random cases of {}..={} nodes; {took:.2?}",
        rows,
        RULE_TABLE.len(),
        sizes.keys().next().unwrap_or(&0),
        sizes.keys().last().unwrap_or(&0),
    );
    within(Duration::from_secs(30), took).map_err(|e| format!("{line}; {e}"))?;
    Ok(line)
}

fn eliminative() -> Outcome {
    let mut parts = Vec::new();
    for name in ["eliminative.a2", "eliminative_exact.a2"] {
        let g = load(name)?;
        let m =
            assess_validity(&g, &LeafInputs::concurring()).map_err(|e| format!("{name}: {e}"))?;
        let top = g.top().as_str();
        let (x, p) = (m.get("X"), m.get(top));
        parts.push(format!("{name}: negative claim X {x:?}, top {top} {p:?}"));
        if x != Some(Assessment::False) || p != Some(Assessment::True) {
            return Err(parts.join("; "));
        }
    }
    Ok(parts.join("; "))
}

fn residual_narrative() -> Outcome {
    let t = RiskThresholds::default();
    let ten = ledger_for(&load("residuals_10.a2")?, &t);
    let hundred = ledger_for(&load("residuals_100.a2")?, &t);
    let class = |l: &a2_core::risk::RiskLedger| l.classes.first().map(|c| (c.category, c.total));
    let (ten_class, hundred_class) = (class(&ten), class(&hundred));
    let ten_ok = final_gate_for(&ten).is_acceptable();
    let hundred_ok = final_gate_for(&hundred).is_acceptable();
    let line = format!(
        "10 minor doubts: class {:?}, gate {}; 100: class {:?}, gate {}",
        ten_class,
        if ten_ok { "acceptable" } else { "unacceptable" },
        hundred_class,
        if hundred_ok {
            "acceptable"
        } else {
            "unacceptable"
        },
    );
    let all_minor = ten.entries.len() == 10
        && hundred.entries.len() == 100
        && ten
            .entries
            .iter()
            .chain(&hundred.entries)
            .all(|e| e.category == RiskCategory::Minor);
    if all_minor
        && ten_class.map(|c| c.0) == Some(RiskCategory::Manageable)
        && ten_ok
        && !hundred_ok
    {
        Ok(line)
    } else {
        Err(line)
    }
}

fn round_trip() -> Outcome {
    let corpus = fixture_corpus();
    for name in &corpus {
        let g = load(name)?;
        for format in [Format::Dsl, Format::Json] {
            let text = serialize_case(&g, format);
            let again = parse_case(&text, format)
                .map_err(|d| format!("{name} via {format:?}: {}", d[0]))?
                .graph;
            if !g.isomorphic(&again, 0.0) {
                return Err(format!(
                    "{name} via {format:?} is not isomorphic after a round trip"
                ));
            }
        }
    }
    let problems = common::check_golden();
    let line = format!(
        "{} fixtures round-trip through DSL and JSON; {} golden CLI transcripts, each run twice",
        corpus.len(),
        common::GOLDEN.len()
    );
    if problems.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}: {}", problems.join("; ")))
    }
}

fn main() {
    let trees = tree_corpus();
    let criteria: [Criterion; 9] = [
        ("keynes worked example", Box::new(keynes_worked_example)),
        ("measure identities", Box::new(measure_identities)),
        ("linda", Box::new(linda)),
        (
            "confidence formulas",
            Box::new(|| confidence_formulas(&trees)),
        ),
        (
            "sum-of-doubts conservatism",
            Box::new(|| conservatism(&trees)),
        ),
        ("validity rule table", Box::new(validity_rules)),
        ("eliminative argument", Box::new(eliminative)),
        ("residual-risk narrative", Box::new(residual_narrative)),
        ("format round trip", Box::new(round_trip)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
