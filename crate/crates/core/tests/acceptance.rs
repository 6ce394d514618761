//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p qpn --test acceptance`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qpn::dominance::{
    admissible_set, cross_check, mixed_dominates, pairwise_dominates, AdmissibleOptions, Evidence,
    Route,
};
use qpn::format::{parse, serialize};
use qpn::gen::random_network;
use qpn::models::{test_treat, TEST_TREAT_MODEL};
use qpn::oracle::{check_dominance_numeric, verify_reduction_signs, SampleBank, SamplerConfig};
use qpn::order::induced_utility_order;
use qpn::reduction::{reduce, remove_chance_node, StepKind};
use qpn::strategy::{analysis_network, enumerate_strategies, make_mixed, Plan, Strategy, Weight};
use qpn::symbolic::SymbolicProb;
use qpn::{Assignment, Network, Sign};

type Outcome = Result<String, String>;

const NO_TEST_WAIT: &str = "t=~T, x=~X";
const TEST_WAIT: &str = "t=T, x=~X";
const EMPIRIC: &str = "t=~T, x=X";
const TEST_TREAT_ALL: &str = "t=T, x=X";
const TREAT_POSITIVE: &str = "t=T, x=X iff r=R";
const TREAT_NEGATIVE: &str = "t=T, x=X iff r=~R";

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

struct TestTreat {
    net: Network,
    analysis: Network,
    all: Vec<Strategy>,
}

impl TestTreat {
    fn new() -> Result<Self, String> {
        let net = test_treat();
        let analysis = analysis_network(&net).map_err(err)?;
        let all = enumerate_strategies(&analysis).map_err(err)?;
        Ok(TestTreat { net, analysis, all })
    }

    fn get(&self, label: &str) -> Result<Strategy, String> {
        self.all
            .iter()
            .find(|s| s.describe(&self.analysis) == label)
            .cloned()
            .ok_or_else(|| format!("no strategy `{label}`"))
    }

    fn labels(&self, set: &[Strategy]) -> BTreeSet<String> {
        set.iter().map(|s| s.describe(&self.analysis)).collect()
    }
}

fn sign_tables() -> Outcome {
    use Sign::*;
    let order = [Positive, Negative, Zero, Unknown];
    let times = [
        [Positive, Negative, Zero, Unknown],
        [Negative, Positive, Zero, Unknown],
        [Zero, Zero, Zero, Zero],
        [Unknown, Unknown, Zero, Unknown],
    ];
    let plus = [
        [Positive, Unknown, Positive, Unknown],
        [Unknown, Negative, Negative, Unknown],
        [Positive, Negative, Zero, Unknown],
        [Unknown, Unknown, Unknown, Unknown],
    ];
    for (i, a) in order.iter().enumerate() {
        for (j, b) in order.iter().enumerate() {
            ensure(a.multiply(*b) == times[i][j], format!("{a} * {b} = {}", a.multiply(*b)))?;
            ensure(a.add(*b) == plus[i][j], format!("{a} + {b} = {}", a.add(*b)))?;
        }
    }
    Ok("16 products and 16 sums".into())
}

fn chain_soundness() -> Outcome {
    let start = Instant::now();
    let signs = [Sign::Positive, Sign::Negative, Sign::Zero];
    let samples = 1000;
    let mut checked = 0;
    for (k, s1) in signs.iter().enumerate() {
        for (l, s2) in signs.iter().enumerate() {
            let net = parse(&format!(
                "var a : chance\nvar b : chance\nvar c : chance\nvar u : value\n\
                 influence a -> b : {s1}\ninfluence b -> c : {s2}\ninfluence c -> u : +\n"
            ))
            .map_err(err)?;
            let (reduced, step) = remove_chance_node(&net, "b").map_err(err)?;
            let ac = reduced.influence("a", "c").ok_or("a -> c missing after splice")?;
            ensure(
                ac.entries().iter().all(|(_, s)| *s == s1.multiply(*s2)),
                format!("{s1} then {s2} gave {}", reduced.fmt_influence(ac)),
            )?;
            let cfg = SamplerConfig::new((k * 3 + l) as u64, samples);
            let report = verify_reduction_signs(&net, &reduced, &[step], &cfg).map_err(err)?;
            ensure(report.violation_count() == 0, report.render())?;
            checked += report.links.iter().map(|l| l.checked).sum::<usize>();
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("9 sign pairs x {samples} models, {checked} link checks, 0 violations, {elapsed:.2?}"))
}

fn test_treat_reduction() -> Outcome {
    let net = test_treat();
    let (reduced, log) = reduce(&net).map_err(err)?;
    let removed: BTreeSet<String> = log
        .iter()
        .filter(|s| s.kind == StepKind::RemoveChance)
        .flat_map(|s| s.subjects.clone())
        .collect();
    ensure(
        removed == ["c", "y", "z"].iter().map(|s| s.to_string()).collect(),
        format!("removed {removed:?}"),
    )?;
    let reversals: Vec<&Vec<String>> = log
        .iter()
        .filter(|s| s.kind == StepKind::ReverseArc)
        .map(|s| &s.subjects)
        .collect();
    ensure(
        reversals == [&vec!["d".to_string(), "r".to_string()]],
        format!("reversals {reversals:?}"),
    )?;
    ensure(reduced.influence("r", "d").is_some(), "no r -> d after reversal")?;
    let left: BTreeSet<&str> = reduced.variables().iter().map(|v| v.name.as_str()).collect();
    ensure(left == ["d", "r", "t", "u", "x"].into(), format!("left {left:?}"))?;
    let links = reduced.informational_links();
    ensure(
        links.contains(&("t".into(), "x".into())) && links.contains(&("r".into(), "x".into())),
        "informational links lost",
    )?;
    Ok("removed c, y, z; reversed d -> r; left d, r, t, u, x".into())
}

fn strategy_count() -> Outcome {
    let (reduced, _) = reduce(&test_treat()).map_err(err)?;
    let n = enumerate_strategies(&reduced).map_err(err)?.len();
    ensure(n == 8, format!("{n} strategies"))?;
    Ok("8 strategies".into())
}

fn matched_case_dominance() -> Outcome {
    let tt = TestTreat::new()?;
    let po = induced_utility_order(&tt.analysis).map_err(err)?;
    let mut out = Vec::new();
    for (a, b) in [(NO_TEST_WAIT, TEST_WAIT), (EMPIRIC, TEST_TREAT_ALL)] {
        let proof = pairwise_dominates(&tt.analysis, &tt.get(a)?, &tt.get(b)?, &po)
            .map_err(err)?
            .ok_or_else(|| format!("no proof that ({a}) dominates ({b})"))?;
        ensure(proof.route == Route::Symbolic && proof.assumptions.is_empty(), "proof rests on assumptions")?;
        let Evidence::Matched(rows) = &proof.evidence else {
            return Err("evidence is not a case matching".into());
        };
        let probs: BTreeSet<String> = rows.iter().map(|r| r.prob.render(&tt.analysis)).collect();
        if a == NO_TEST_WAIT {
            ensure(probs == ["Pr(D)", "Pr(~D)"].iter().map(|s| s.to_string()).collect(), format!("cases {probs:?}"))?;
        }
        ensure(rows.iter().any(|r| r.strict), "no strict row")?;
        out.push(format!("({a}) > ({b}) on {}", probs.into_iter().collect::<Vec<_>>().join(" | ")));
    }
    Ok(out.join("; "))
}

fn pairwise_insufficiency() -> Outcome {
    let tt = TestTreat::new()?;
    let po = induced_utility_order(&tt.analysis).map_err(err)?;
    let neg = tt.get(TREAT_NEGATIVE)?;
    for s in tt.all.iter().filter(|s| **s != neg) {
        let found = pairwise_dominates(&tt.analysis, s, &neg, &po).map_err(err)?;
        ensure(found.is_none(), format!("({}) dominates it", s.describe(&tt.analysis)))?;
    }
    let cfg = SamplerConfig::new(6, 10_000);
    let check = check_dominance_numeric(&tt.net, &cfg, &Plan::Pure(tt.get(TREAT_POSITIVE)?), &Plan::Pure(neg))
        .map_err(err)?;
    let v = check
        .violation
        .ok_or("treat-iff-negative never beats treat-iff-positive in 10000 models")?;
    Ok(format!(
        "no pairwise proof from 7 strategies; model {} has EU {:.4} > {:.4}",
        v.index, v.eu_b, v.eu_a
    ))
}

fn mixed_pruning() -> Outcome {
    let tt = TestTreat::new()?;
    let po = induced_utility_order(&tt.analysis).map_err(err)?;
    let given: Assignment = [("d".to_string(), true), ("t".to_string(), true)].into();
    let alpha = SymbolicProb::literal("r", false, given.clone());
    let rest = SymbolicProb::literal("r", true, given);
    let nine = make_mixed(vec![
        (tt.get(TEST_TREAT_ALL)?, Weight::Symbolic(alpha)),
        (tt.get(TEST_WAIT)?, Weight::Symbolic(rest)),
    ])
    .map_err(err)?;
    let neg = tt.get(TREAT_NEGATIVE)?;
    let samples = 10_000;
    let bank = SampleBank::new(&tt.net, SamplerConfig::new(7, samples)).map_err(err)?;
    let check = bank.compare(&Plan::Mixed(nine.clone()), &Plan::Pure(neg.clone())).map_err(err)?;
    ensure(check.holds(), format!("violation {:?}", check.violation))?;
    let proof = mixed_dominates(&tt.analysis, &nine, &neg, &po, Some(&bank))
        .map_err(err)?
        .ok_or("mixed_dominates found no proof")?;
    let report = admissible_set(&tt.net, &AdmissibleOptions::all()).map_err(err)?;
    ensure(!report.admissible.contains(&neg), "admissible set keeps treat-iff-negative")?;
    let route = match proof.route {
        Route::Symbolic => "theorem".to_string(),
        Route::Sampled(n) => format!("sampled evidence over {n} models"),
    };
    Ok(format!(
        "{} >= ({TREAT_NEGATIVE}) in {samples}/{samples} models ({route}), excluded from admissible set",
        nine.describe(&tt.analysis)
    ))
}

fn final_admissible_set() -> Outcome {
    let tt = TestTreat::new()?;
    let report = admissible_set(&tt.net, &AdmissibleOptions::all()).map_err(err)?;
    let got = tt.labels(&report.admissible);
    let want: BTreeSet<String> = [NO_TEST_WAIT, TREAT_POSITIVE, EMPIRIC].iter().map(|s| s.to_string()).collect();
    ensure(got == want, format!("got {got:?}\n{}", report.render()))?;
    Ok(format!("{{{}}}", got.into_iter().collect::<Vec<_>>().join("; ")))
}

fn global_soundness() -> Outcome {
    let start = Instant::now();
    let (mut proofs, mut models) = (0, 0);
    for seed in 0..100u64 {
        let net = random_network(seed);
        let report = admissible_set(&net, &AdmissibleOptions { seed, ..AdmissibleOptions::all() })
            .map_err(|e| format!("network {seed}: {e}"))?;
        let bank = SampleBank::new(&net, SamplerConfig::new(seed ^ 0x5eed_fa11, 1000)).map_err(err)?;
        for p in report.proofs.iter().filter(|p| p.route == Route::Symbolic) {
            cross_check(&report.analysis, &report.order, &bank, p)
                .map_err(|e| format!("network {seed}: {e}"))?;
            proofs += 1;
        }
        let columns = report
            .strategies
            .iter()
            .map(|s| bank.eu(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        for i in 0..bank.len() {
            let best = columns.iter().map(|c| c[i]).fold(f64::NEG_INFINITY, f64::max);
            let kept = report
                .strategies
                .iter()
                .zip(&columns)
                .filter(|(s, _)| report.admissible.contains(s))
                .map(|(_, c)| c[i])
                .fold(f64::NEG_INFINITY, f64::max);
            ensure(
                kept >= best - 1e-12,
                format!("network {seed}, model {i}: optimum {best} outside admissible set (best kept {kept})\n{}", serialize(&net)),
            )?;
            models += 1;
        }
    }
    Ok(format!(
        "100 networks, {proofs} symbolic proofs and {models} optima checked, {:.1?}",
        start.elapsed()
    ))
}

fn round_trip() -> Outcome {
    let mut nets = vec![parse(TEST_TREAT_MODEL).map_err(err)?];
    nets.extend((0..100).map(|s| random_network(1000 + s)));
    for net in &nets {
        let text = serialize(net);
        let again = parse(&text).map_err(err)?;
        ensure(again == *net, format!("round trip changed\n{text}"))?;
        ensure(serialize(&again) == text, "serialization not canonical")?;
    }
    Ok(format!("{} models", nets.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("sign tables", sign_tables),
        ("chain soundness", chain_soundness),
        ("test/treat reduction", test_treat_reduction),
        ("strategy count", strategy_count),
        ("matched-case dominance", matched_case_dominance),
        ("pairwise insufficiency", pairwise_insufficiency),
        ("mixed-strategy pruning", mixed_pruning),
        ("final admissible set", final_admissible_set),
        ("global soundness", global_soundness),
        ("round trip", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
