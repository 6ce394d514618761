//! Inadmissibility proofs and the admissible set.
//!
//! Symbolic proofs match the case rows of two strategies one-to-one, each pair
//! having the same probability expression and the dominator's outcome weakly
//! preferred. Numeric proofs rest on a bank of sampled models and say so.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{assignments, Assignment, Influence, Network, VarKind};
use crate::oracle::{compare_columns, SampleBank, SamplerConfig, TOLERANCE};
use crate::order::{induced_utility_order, PartialOrder};
use crate::sign::Sign;
use crate::strategy::{
    analysis_network, case_analysis, enumerate_strategies, make_mixed, CaseAnalysis, MixedStrategy,
    Plan, Strategy, Weight,
};
use crate::symbolic::{Atom, SymbolicProb};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofKind {
    Pairwise,
    Kway,
    Mixed,
    InfoPrune,
}

impl ProofKind {
    pub fn name(self) -> &'static str {
        match self {
            ProofKind::Pairwise => "pairwise",
            ProofKind::Kway => "kway",
            ProofKind::Mixed => "mixed",
            ProofKind::InfoPrune => "info-prune",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Holds for every model consistent with the signs.
    Symbolic,
    /// No counterexample among this many sampled models.
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchedRow {
    pub prob: SymbolicProb,
    pub better: Assignment,
    pub worse: Assignment,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    Matched(Vec<MatchedRow>),
    Rule { name: String, detail: String },
    Sampled { samples: usize, strict: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceProof {
    pub kind: ProofKind,
    pub route: Route,
    pub dominated: Strategy,
    pub dominators: Vec<Plan>,
    pub evidence: Evidence,
    /// The dominator is strictly better in every model with positive probabilities.
    pub strict: bool,
    /// Numeric facts about the model the argument relies on; empty for matched cases.
    pub assumptions: Vec<String>,
}

impl DominanceProof {
    /// Witness whose expected utility is at least the dominated strategy's; `None`
    /// for covering proofs, which only bound the best of several dominators.
    pub fn witness(&self) -> Option<&Plan> {
        match self.kind {
            ProofKind::Kway if matches!(self.route, Route::Sampled(_)) => None,
            _ => self.dominators.first(),
        }
    }

    pub fn uses_mixture(&self) -> bool {
        self.dominators.iter().any(|d| matches!(d, Plan::Mixed(_)))
    }

    pub fn render(&self, net: &Network, po: &PartialOrder) -> String {
        let route = match self.route {
            Route::Symbolic => "theorem".to_string(),
            Route::Sampled(n) => format!("sampled evidence, {n} models"),
        };
        let mut out = format!("proof {} ({route})\n", self.kind.name());
        let _ = writeln!(out, "  dominated: {}", self.dominated.describe(net));
        for d in &self.dominators {
            let _ = writeln!(out, "  by: {}", d.describe(net));
        }
        match &self.evidence {
            Evidence::Matched(rows) => {
                for r in rows {
                    let rel = if r.strict { ">" } else { ">=" };
                    let _ = writeln!(
                        out,
                        "  {}: {} {rel} {}",
                        r.prob.render(net),
                        label(po, &r.better),
                        label(po, &r.worse)
                    );
                }
            }
            Evidence::Rule { name, detail } => {
                let _ = writeln!(out, "  rule: {name}: {detail}");
            }
            Evidence::Sampled { samples, strict } => {
                let _ = writeln!(
                    out,
                    "  no counterexample in {samples} models; strictly better in {strict}"
                );
            }
        }
        for a in &self.assumptions {
            let _ = writeln!(out, "  assumes: {a}");
        }
        out
    }
}

fn label(po: &PartialOrder, outcome: &Assignment) -> String {
    po.index_within(outcome)
        .map(|i| po.label_index(i))
        .unwrap_or_else(|_| format!("{outcome:?}"))
}

// Kuhn's augmenting paths; returns the right partner of each left vertex.
fn perfect_matching(n: usize, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], right: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if right[v].is_none() || augment(right[v].expect("matched"), adj, seen, right) {
                    right[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut right = vec![None; n];
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, adj, &mut seen, &mut right) {
            return None;
        }
    }
    let mut left = vec![0; n];
    for (v, u) in right.iter().enumerate() {
        left[u.expect("perfect")] = v;
    }
    Some(left)
}

/// Matched-case comparison of two analyses; `Err` explains the first obstacle.
pub fn match_cases(
    net: &Network,
    po: &PartialOrder,
    better: &CaseAnalysis,
    worse: &CaseAnalysis,
) -> std::result::Result<Vec<MatchedRow>, String> {
    let mut vars = better.vars.clone();
    for v in &worse.vars {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    let a = better.refine_to(net, &vars);
    let b = worse.refine_to(net, &vars);
    let mut groups: Vec<(SymbolicProb, Vec<usize>, Vec<usize>)> = Vec::new();
    let mut slot: HashMap<SymbolicProb, usize> = HashMap::new();
    for (side, rows) in [(0, &a.rows), (1, &b.rows)] {
        for (i, r) in rows.iter().enumerate() {
            let g = *slot.entry(r.prob.clone()).or_insert_with(|| {
                groups.push((r.prob.clone(), Vec::new(), Vec::new()));
                groups.len() - 1
            });
            if side == 0 {
                groups[g].1.push(i);
            } else {
                groups[g].2.push(i);
            }
        }
    }
    let idx = |o: &Assignment| po.index_within(o).map_err(|e| e.to_string());

    let mut plans = Vec::new();
    for (prob, left, right) in &groups {
        if left.len() != right.len() {
            return Err(format!(
                "no case pairing for probability {} ({} vs {} rows)",
                prob.render(net),
                left.len(),
                right.len()
            ));
        }
        let mut adj = vec![Vec::new(); left.len()];
        let mut strict_edges = Vec::new();
        for (i, &l) in left.iter().enumerate() {
            let lo = idx(&a.rows[l].outcome)?;
            for (j, &r) in right.iter().enumerate() {
                let ro = idx(&b.rows[r].outcome)?;
                if po.weakly_prefers(lo, ro) {
                    adj[i].push(j);
                    if po.compare_indices(lo, ro) == crate::order::Preference::Yes {
                        strict_edges.push((i, j));
                    }
                }
            }
        }
        if perfect_matching(left.len(), &adj).is_none() {
            let stuck = (0..right.len())
                .find(|&j| !adj.iter().any(|e| e.contains(&j)))
                .unwrap_or(0);
            let theirs = label(po, &b.rows[right[stuck]].outcome);
            let ours: Vec<String> = left.iter().map(|&l| label(po, &a.rows[l].outcome)).collect();
            return Err(format!(
                "at {}: `{theirs}` is not weakly below {}",
                prob.render(net),
                ours.iter().map(|o| format!("`{o}`")).collect::<Vec<_>>().join(" or ")
            ));
        }
        plans.push((left, right, adj, strict_edges));
    }

    let mut rows = Vec::new();
    let mut found_strict = false;
    for (left, right, adj, strict_edges) in plans {
        let mut matching = None;
        if !found_strict {
            for &(i, j) in &strict_edges {
                let rest: Vec<Vec<usize>> = adj
                    .iter()
                    .enumerate()
                    .map(|(k, e)| {
                        if k == i {
                            vec![j]
                        } else {
                            e.iter().copied().filter(|&x| x != j).collect()
                        }
                    })
                    .collect();
                if let Some(m) = perfect_matching(left.len(), &rest) {
                    matching = Some(m);
                    found_strict = true;
                    break;
                }
            }
        }
        let matching = matching.unwrap_or_else(|| perfect_matching(left.len(), &adj).expect("checked"));
        for (i, &j) in matching.iter().enumerate() {
            let (ra, rb) = (&a.rows[left[i]], &b.rows[right[j]]);
            let strict = po.compare_indices(idx(&ra.outcome)?, idx(&rb.outcome)?)
                == crate::order::Preference::Yes;
            rows.push(MatchedRow {
                prob: ra.prob.clone(),
                better: ra.outcome.clone(),
                worse: rb.outcome.clone(),
                strict,
            });
        }
    }
    if !found_strict {
        return Err("every matched case ties".into());
    }
    Ok(rows)
}

fn symbolic_proof(
    kind: ProofKind,
    dominated: &Strategy,
    dominators: Vec<Plan>,
    rows: Vec<MatchedRow>,
) -> DominanceProof {
    DominanceProof {
        kind,
        route: Route::Symbolic,
        dominated: dominated.clone(),
        dominators,
        evidence: Evidence::Matched(rows),
        strict: true,
        assumptions: Vec::new(),
    }
}

/// Attempts a matched-case proof that `a` dominates `b`, explaining failure.
pub fn pairwise_attempt(
    net: &Network,
    a: &Strategy,
    b: &Strategy,
    po: &PartialOrder,
) -> Result<std::result::Result<DominanceProof, String>> {
    let ca = case_analysis(net, a)?;
    let cb = case_analysis(net, b)?;
    Ok(match_cases(net, po, &ca, &cb)
        .map(|rows| symbolic_proof(ProofKind::Pairwise, b, vec![Plan::Pure(a.clone())], rows)))
}

/// Proof that `a` dominates `b` under the generalized first-order criterion.
pub fn pairwise_dominates(
    net: &Network,
    a: &Strategy,
    b: &Strategy,
    po: &PartialOrder,
) -> Result<Option<DominanceProof>> {
    Ok(pairwise_attempt(net, a, b, po)?.ok())
}

/// Proof that `s1` is dominated with respect to a set of strategies: a pairwise
/// proof from one member, or failing that (with a bank) the best member is at
/// least as good as `s1` in every sampled model.
pub fn kway_dominated(
    net: &Network,
    s1: &Strategy,
    dominators: &[Strategy],
    po: &PartialOrder,
    bank: Option<&SampleBank>,
) -> Result<Option<DominanceProof>> {
    let others: Vec<&Strategy> = dominators.iter().filter(|d| *d != s1).collect();
    if others.is_empty() || dominators.len() < 2 {
        return Ok(None);
    }
    let plans: Vec<Plan> = others.iter().map(|s| Plan::Pure((*s).clone())).collect();
    for d in &others {
        if let Some(mut p) = pairwise_dominates(net, d, s1, po)? {
            p.kind = ProofKind::Kway;
            p.dominators = std::iter::once(Plan::Pure((*d).clone()))
                .chain(plans.iter().filter(|x| **x != Plan::Pure((*d).clone())).cloned())
                .collect();
            return Ok(Some(p));
        }
    }
    let Some(bank) = bank else { return Ok(None) };
    if others.len() < 2 {
        return Ok(None);
    }
    let target = bank.eu(s1)?;
    let columns = others.iter().map(|d| bank.eu(d)).collect::<Result<Vec<_>>>()?;
    let best: Vec<f64> = (0..bank.len())
        .map(|i| columns.iter().map(|c| c[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let check = compare_columns(&best, &target);
    if !check.holds() || check.strict == 0 {
        return Ok(None);
    }
    Ok(Some(DominanceProof {
        kind: ProofKind::Kway,
        route: Route::Sampled(bank.len()),
        dominated: s1.clone(),
        dominators: plans,
        evidence: Evidence::Sampled {
            samples: bank.len(),
            strict: check.strict,
        },
        strict: true,
        assumptions: Vec::new(),
    }))
}

/// Proof that a mixed strategy dominates `s`: matched cases against the blended
/// analysis when every weight is symbolic, else sampled evidence from the bank.
pub fn mixed_dominates(
    net: &Network,
    m: &MixedStrategy,
    s: &Strategy,
    po: &PartialOrder,
    bank: Option<&SampleBank>,
) -> Result<Option<DominanceProof>> {
    if let Some(blend) = m.case_analysis(net)? {
        let own = case_analysis(net, s)?;
        if let Ok(rows) = match_cases(net, po, &blend, &own) {
            return Ok(Some(symbolic_proof(
                ProofKind::Mixed,
                s,
                vec![Plan::Mixed(m.clone())],
                rows,
            )));
        }
    }
    let Some(bank) = bank else { return Ok(None) };
    let check = bank.compare(&Plan::Mixed(m.clone()), &Plan::Pure(s.clone()))?;
    if !check.holds() || check.strict == 0 {
        return Ok(None);
    }
    Ok(Some(DominanceProof {
        kind: ProofKind::Mixed,
        route: Route::Sampled(bank.len()),
        dominated: s.clone(),
        dominators: vec![Plan::Mixed(m.clone())],
        evidence: Evidence::Sampled {
            samples: bank.len(),
            strict: check.strict,
        },
        strict: true,
        assumptions: Vec::new(),
    }))
}

// Sign of `inf` when it is the same in every cell consistent with `ctx`.
fn uniform_sign(inf: &Influence, ctx: &Assignment) -> Option<Sign> {
    let free: Vec<String> = inf
        .condition_vars()
        .into_iter()
        .filter(|v| !ctx.contains_key(v))
        .collect();
    let mut signs = assignments(&free).map(|cell| {
        let mut full = ctx.clone();
        full.extend(cell);
        inf.sign_at(&full)
    });
    let first = signs.next()?;
    signs.all(|s| s == first).then_some(first)
}

fn literal_sign(value: bool) -> Sign {
    if value {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

// Chance variables reachable from `from` along influences and conditions only.
fn influence_descendants(net: &Network, from: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![from.to_string()];
    while let Some(n) = stack.pop() {
        for v in net.variables() {
            if v.kind != VarKind::Decision && net.parents(&v.name).contains(&n) && out.insert(v.name.clone()) {
                stack.push(v.name.clone());
            }
        }
    }
    out
}

// Rewrites every policy so it reads `var` as `value`; the result must be enumerated.
fn fix_observation(s: &Strategy, var: &str, value: bool, all: &[Strategy]) -> Option<Strategy> {
    let mut out = s.clone();
    for p in &mut out.policies {
        if !p.observed.iter().any(|v| v == var) {
            continue;
        }
        let original = p.table.clone();
        for (state, choice) in p.table.iter_mut() {
            let mut read = state.clone();
            read.insert(var.to_string(), value);
            *choice = *original.get(&read)?;
        }
    }
    all.iter().find(|x| **x == out).cloned()
}

fn with_constant(s: &Strategy, decision: &str, value: bool, all: &[Strategy]) -> Option<Strategy> {
    let mut out = s.clone();
    let p = out.policies.iter_mut().find(|p| p.decision == decision)?;
    for c in p.table.values_mut() {
        *c = value;
    }
    all.iter().find(|x| **x == out).cloned()
}

// Same strategy with `t` flipped; observers of `t` keep their choices.
fn flip_decision(s: &Strategy, t: &str, all: &[Strategy]) -> Option<Strategy> {
    let mut out = s.clone();
    for p in &mut out.policies {
        if p.decision == t {
            for c in p.table.values_mut() {
                *c = !*c;
            }
        } else if p.observed.iter().any(|v| v == t) {
            p.table = p
                .table
                .iter()
                .map(|(state, &c)| {
                    let mut st = state.clone();
                    let flipped = !st[t];
                    st.insert(t.to_string(), flipped);
                    (st, c)
                })
                .collect();
        }
    }
    all.iter().find(|x| **x == out).cloned()
}

fn rule_proof(
    name: &str,
    detail: String,
    dominated: &Strategy,
    witness: Plan,
    strict: bool,
    assumptions: Vec<String>,
) -> DominanceProof {
    DominanceProof {
        kind: ProofKind::InfoPrune,
        route: Route::Symbolic,
        dominated: dominated.clone(),
        dominators: vec![witness],
        evidence: Evidence::Rule {
            name: name.to_string(),
            detail,
        },
        strict,
        assumptions,
    }
}

/// Costly information: an information-gathering decision whose only effect on
/// utility is a strict direct cost, taken while no later choice uses what it reveals.
fn costly_information(net: &Network, s: &Strategy, all: &[Strategy]) -> Option<DominanceProof> {
    let value = net.value_node()?;
    for p in &s.policies {
        let t = &p.decision;
        let Some(c) = p.constant() else { continue };
        let Some(link) = net.influence(t, value) else { continue };
        let Some(sign) = uniform_sign(link, &Assignment::new()) else { continue };
        if !sign.is_strict() {
            continue;
        }
        // the costly literal is the one the direct link disfavours
        let costly = sign == Sign::Negative;
        if c != costly {
            continue;
        }
        let reached = influence_descendants(net, t);
        if reached.iter().any(|w| w == value) && net.parents(value).iter().any(|w| reached.contains(w)) {
            continue;
        }
        if reached.iter().any(|w| w != value && influence_descendants(net, w).contains(value)) {
            continue;
        }
        let revealed: Vec<&String> = reached
            .iter()
            .filter(|w| net.kind(w) == Some(VarKind::Chance) && !net.observers(w).is_empty())
            .collect();
        if revealed.is_empty() {
            continue;
        }
        let used = s
            .policies
            .iter()
            .any(|q| revealed.iter().any(|w| q.depends_on(w)));
        if used {
            continue;
        }
        let Some(witness) = flip_decision(s, t, all) else { continue };
        let detail = format!(
            "{}={} only costs utility; no choice depends on {}",
            t,
            net.label(t, c),
            revealed.iter().map(|w| w.as_str()).collect::<Vec<_>>().join(", ")
        );
        return Some(rule_proof("costly information", detail, s, Plan::Pure(witness), true, Vec::new()));
    }
    None
}

fn fixed_context(net: &Network, s: &Strategy, var: &str) -> Option<(Assignment, Vec<String>)> {
    let fixed = s.fixed_decisions();
    let mut ctx = Assignment::new();
    let mut chance = Vec::new();
    for p in net.parents_ordered(var) {
        match net.kind(&p) {
            Some(VarKind::Decision) => {
                ctx.insert(p.clone(), *fixed.get(&p)?);
            }
            _ => chance.push(p),
        }
    }
    Some((ctx, chance))
}

fn pure_signal(net: &Network, r: &str) -> bool {
    net.kind(r) == Some(VarKind::Chance)
        && net
            .successors(r)
            .iter()
            .all(|w| net.kind(w) == Some(VarKind::Decision))
}

/// Inert observation: a policy varies on a signal that, under the strategy's own
/// choices, is independent of everything else; the strategy is then a mixture of
/// the two strategies that read the signal as a constant.
fn inert_observation(net: &Network, s: &Strategy, all: &[Strategy], alive: &[Strategy]) -> Option<DominanceProof> {
    for p in &s.policies {
        for r in &p.observed {
            if !pure_signal(net, r) || !p.depends_on(r) {
                continue;
            }
            let Some((ctx, chance)) = fixed_context(net, s, r) else { continue };
            let inert = chance.iter().all(|c| {
                net.influence(c, r)
                    .and_then(|inf| uniform_sign(inf, &ctx))
                    == Some(Sign::Zero)
            });
            if !inert {
                continue;
            }
            let (Some(on), Some(off)) = (
                fix_observation(s, r, true, all),
                fix_observation(s, r, false, all),
            ) else {
                continue;
            };
            if !alive.contains(&on) || !alive.contains(&off) || on == *s || off == *s {
                continue;
            }
            let mut given = ctx.clone();
            for c in &chance {
                given.insert(c.clone(), true);
            }
            let w_on = SymbolicProb::literal(r.clone(), true, given.clone());
            let w_off = SymbolicProb::literal(r.clone(), false, given);
            let mixture = make_mixed(vec![
                (on, Weight::Symbolic(w_on)),
                (off, Weight::Symbolic(w_off)),
            ])
            .ok()?;
            let detail = format!(
                "{} carries no influence when {}; the policy for {} is a coin flip",
                r,
                if ctx.is_empty() { "unconditioned".to_string() } else { net.fmt_literals(ctx.iter()) },
                p.decision
            );
            return Some(rule_proof("inert observation", detail, s, Plan::Mixed(mixture), false, Vec::new()));
        }
    }
    None
}

/// Signal monotonicity: a policy acts on the signal value that points away from
/// the state where acting is known to help. The mixture acting with the
/// probability the signal takes that value in the other state does at least as
/// well in that state and strictly better in this one.
fn signal_monotonicity(net: &Network, s: &Strategy, all: &[Strategy]) -> Option<DominanceProof> {
    let value = net.value_node()?;
    for p in &s.policies {
        let x = &p.decision;
        let varying = p.varying();
        let [r] = varying.as_slice() else { continue };
        if !pure_signal(net, r) || !p.depends_on(r) {
            continue;
        }
        if s.policies.iter().any(|q| q.decision != *x && q.depends_on(r)) {
            continue;
        }
        if net.successors(x).iter().any(|w| w != value) {
            continue;
        }
        let Some((ctx, chance)) = fixed_context(net, s, r) else { continue };
        let [state] = chance.as_slice() else { continue };
        let Some(sigma) = net.influence(state, r).and_then(|i| uniform_sign(i, &ctx)) else {
            continue;
        };
        if !sigma.is_strict() {
            continue;
        }
        let Some(action) = net.influence(x, value) else { continue };
        let fixed = s.fixed_decisions();
        let allowed = action
            .condition_vars()
            .iter()
            .all(|v| v == state || fixed.contains_key(v));
        if !allowed {
            continue;
        }
        let acts_on = p
            .table
            .iter()
            .find(|(_, &c)| c)
            .map(|(st, _)| st[r])?;
        for matched in [true, false] {
            let mut other_ctx = fixed.clone();
            other_ctx.insert(state.clone(), !matched);
            let Some(tau) = uniform_sign(action, &other_ctx) else { continue };
            if !tau.is_strict() {
                continue;
            }
            let delta = sigma.multiply(literal_sign(acts_on)).multiply(literal_sign(matched));
            if delta != tau {
                continue;
            }
            let (Some(yes), Some(no)) = (with_constant(s, x, true, all), with_constant(s, x, false, all)) else {
                continue;
            };
            let mut given = ctx.clone();
            given.insert(state.clone(), matched);
            let alpha = SymbolicProb::literal(r.clone(), acts_on, given.clone());
            let rest = SymbolicProb::literal(r.clone(), !acts_on, given);
            let mixture = make_mixed(vec![(yes, Weight::Symbolic(alpha)), (no, Weight::Symbolic(rest))]).ok()?;
            let detail = format!(
                "{x}={} on {r}={} although {state} raises {r} with sign {sigma} and {x} has sign {tau} when {state}={}",
                net.label(x, true),
                net.label(r, acts_on),
                net.label(state, !matched)
            );
            let assumption = format!(
                "{} {} {}",
                Atom::new(r.clone(), [(state.clone(), matched)].into_iter().chain(ctx.clone()).collect()).render(net, acts_on),
                if delta == Sign::Positive { ">=" } else { "<=" },
                Atom::new(r.clone(), [(state.clone(), !matched)].into_iter().chain(ctx.clone()).collect()).render(net, acts_on),
            );
            return Some(rule_proof(
                "signal monotonicity",
                detail,
                s,
                Plan::Mixed(mixture),
                true,
                vec![assumption],
            ));
        }
    }
    None
}

/// Applies the three hypothetical-optimality rules; returns survivors and proofs.
pub fn hypothetical_prune(net: &Network, strategies: &[Strategy]) -> (Vec<Strategy>, Vec<DominanceProof>) {
    prune_with(net, strategies, strategies, true)
}

fn prune_with(
    net: &Network,
    all: &[Strategy],
    alive: &[Strategy],
    allow_mixtures: bool,
) -> (Vec<Strategy>, Vec<DominanceProof>) {
    let mut survivors: Vec<Strategy> = alive.to_vec();
    let mut proofs = Vec::new();
    type Rule<'a> = Box<dyn Fn(&Strategy, &[Strategy]) -> Option<DominanceProof> + 'a>;
    let mut rules: Vec<Rule> = vec![Box::new(|s, _| costly_information(net, s, all))];
    if allow_mixtures {
        rules.push(Box::new(|s, alive| inert_observation(net, s, all, alive)));
        rules.push(Box::new(|s, _| signal_monotonicity(net, s, all)));
    }
    for rule in &rules {
        let snapshot = survivors.clone();
        for s in &snapshot {
            if let Some(p) = rule(s, &survivors) {
                survivors.retain(|x| x != s);
                proofs.push(p);
            }
        }
    }
    (survivors, proofs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdmissibleOptions {
    pub pairwise: bool,
    pub kway: bool,
    pub mixed: bool,
    pub prune: bool,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AdmissibleOptions {
    fn default() -> Self {
        AdmissibleOptions {
            pairwise: true,
            kway: false,
            mixed: false,
            prune: true,
            samples: 1000,
            seed: 0,
        }
    }
}

impl AdmissibleOptions {
    pub fn all() -> Self {
        AdmissibleOptions {
            kway: true,
            mixed: true,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivorNote {
    pub strategy: Strategy,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleReport {
    /// Network the case analyses run on.
    pub analysis: Network,
    pub order: PartialOrder,
    pub strategies: Vec<Strategy>,
    pub admissible: Vec<Strategy>,
    /// Survivors when only pure strategies may serve as dominators.
    pub pure_admissible: Vec<Strategy>,
    pub proofs: Vec<DominanceProof>,
    pub unresolved: Vec<SurvivorNote>,
    pub samples: usize,
    pub audit_samples: usize,
}

impl AdmissibleReport {
    pub fn render(&self) -> String {
        let net = &self.analysis;
        let mut out = format!("strategies: {}\n", self.strategies.len());
        for s in &self.strategies {
            let _ = writeln!(out, "  {}", s.describe(net));
        }
        let _ = writeln!(out, "\nproofs: {}", self.proofs.len());
        for p in &self.proofs {
            out.push('\n');
            out.push_str(&p.render(net, &self.order));
        }
        let _ = writeln!(out, "\nadmissible: {}", self.admissible.len());
        for s in &self.admissible {
            let _ = writeln!(out, "  {}", s.describe(net));
        }
        let _ = writeln!(out, "\nadmissible against pure strategies only: {}", self.pure_admissible.len());
        for s in &self.pure_admissible {
            let _ = writeln!(out, "  {}", s.describe(net));
        }
        if !self.unresolved.is_empty() {
            let _ = writeln!(out, "\nunresolved:");
            for note in &self.unresolved {
                let _ = writeln!(out, "  {}", note.strategy.describe(net));
                for r in &note.reasons {
                    let _ = writeln!(out, "    {r}");
                }
            }
        }
        out
    }
}

struct Search<'a> {
    net: &'a Network,
    po: &'a PartialOrder,
    all: &'a [Strategy],
    cases: Vec<CaseAnalysis>,
    bank: &'a SampleBank,
    // independent models every sampled proof must also survive
    audit: &'a SampleBank,
    weights: Vec<(SymbolicProb, SymbolicProb)>,
    weight_columns: Vec<Vec<f64>>,
}

impl Search<'_> {
    fn audited(&self, witness: &[f64], s: &Strategy) -> Result<bool> {
        Ok(compare_columns(witness, &self.audit.eu(s)?).holds())
    }
    fn pairwise(&self, i: usize, j: usize) -> std::result::Result<Vec<MatchedRow>, String> {
        match_cases(self.net, self.po, &self.cases[i], &self.cases[j])
    }

    fn index(&self, s: &Strategy) -> usize {
        self.all.iter().position(|x| x == s).expect("enumerated")
    }

    fn run(&self, options: &AdmissibleOptions, allow_mixtures: bool) -> Result<(Vec<Strategy>, Vec<DominanceProof>)> {
        let mut alive: Vec<Strategy> = self.all.to_vec();
        let mut proofs = Vec::new();
        loop {
            let before = alive.len();
            if options.prune {
                let (rest, found) = prune_with(self.net, self.all, &alive, allow_mixtures);
                alive = rest;
                proofs.extend(found);
            }
            if options.pairwise {
                for s in alive.clone() {
                    let j = self.index(&s);
                    // survivors first so reports name live dominators where possible
                    let order = alive
                        .iter()
                        .map(|x| self.index(x))
                        .chain((0..self.all.len()).filter(|k| !alive.contains(&self.all[*k])));
                    for i in order {
                        if i == j {
                            continue;
                        }
                        if let Ok(rows) = self.pairwise(i, j) {
                            proofs.push(symbolic_proof(
                                ProofKind::Pairwise,
                                &s,
                                vec![Plan::Pure(self.all[i].clone())],
                                rows,
                            ));
                            alive.retain(|x| *x != s);
                            break;
                        }
                    }
                }
            }
            if options.kway {
                for s in alive.clone() {
                    if let Some(p) = self.covering_pair(&s, &alive)? {
                        proofs.push(p);
                        alive.retain(|x| *x != s);
                    }
                }
            }
            if options.mixed && allow_mixtures {
                for s in alive.clone() {
                    if let Some(p) = self.mixture(&s, &alive, !options.kway)? {
                        proofs.push(p);
                        alive.retain(|x| *x != s);
                    }
                }
            }
            if alive.len() == before {
                break;
            }
        }
        Ok((alive, proofs))
    }

    fn covering_pair(&self, s: &Strategy, alive: &[Strategy]) -> Result<Option<DominanceProof>> {
        let others: Vec<&Strategy> = alive.iter().filter(|x| *x != s).collect();
        let target = self.bank.eu(s)?;
        for (a, d1) in others.iter().enumerate() {
            for d2 in &others[a + 1..] {
                let (e1, e2) = (self.bank.eu(d1)?, self.bank.eu(d2)?);
                let best: Vec<f64> = e1.iter().zip(e2.iter()).map(|(x, y)| x.max(*y)).collect();
                let check = compare_columns(&best, &target);
                if check.holds() && check.strict > 0 {
                    let (a1, a2) = (self.audit.eu(d1)?, self.audit.eu(d2)?);
                    let best: Vec<f64> = a1.iter().zip(a2.iter()).map(|(x, y)| x.max(*y)).collect();
                    if !self.audited(&best, s)? {
                        continue;
                    }
                    return Ok(Some(DominanceProof {
                        kind: ProofKind::Kway,
                        route: Route::Sampled(self.bank.len()),
                        dominated: s.clone(),
                        dominators: vec![Plan::Pure((*d1).clone()), Plan::Pure((*d2).clone())],
                        evidence: Evidence::Sampled {
                            samples: self.bank.len(),
                            strict: check.strict,
                        },
                        strict: true,
                        assumptions: Vec::new(),
                    }));
                }
            }
        }
        Ok(None)
    }

    // Mixtures of two survivors weighted by one network probability. A covering
    // pair is necessary, so with the k-way step enabled only the symbolic route
    // can still succeed here.
    fn mixture(&self, s: &Strategy, alive: &[Strategy], numeric: bool) -> Result<Option<DominanceProof>> {
        let others: Vec<&Strategy> = alive.iter().filter(|x| *x != s).collect();
        let target = self.bank.eu(s)?;
        let own = &self.cases[self.index(s)];
        for (a, c1) in others.iter().enumerate() {
            for c2 in &others[a + 1..] {
                let (e1, e2) = (self.bank.eu(c1)?, self.bank.eu(c2)?);
                let covers = e1
                    .iter()
                    .zip(e2.iter())
                    .zip(target.iter())
                    .all(|((x, y), t)| x.max(*y) >= t - TOLERANCE);
                if !covers {
                    continue;
                }
                for ((w, rest), column) in self.weights.iter().zip(&self.weight_columns) {
                    // a symbolic proof implies dominance in every sampled model, so
                    // only candidates that pass the bank are worth the case analysis
                    let blended: Vec<f64> = column
                        .iter()
                        .zip(e1.iter().zip(e2.iter()))
                        .map(|(a, (x, y))| a * x + (1.0 - a) * y)
                        .collect();
                    let check = compare_columns(&blended, &target);
                    if !check.holds() || check.strict == 0 {
                        continue;
                    }
                    let m = MixedStrategy {
                        components: vec![
                            ((*c1).clone(), Weight::Symbolic(w.clone())),
                            ((*c2).clone(), Weight::Symbolic(rest.clone())),
                        ],
                    };
                    if let Some(blend) = m.case_analysis(self.net)? {
                        if let Ok(rows) = match_cases(self.net, self.po, &blend, own) {
                            return Ok(Some(symbolic_proof(ProofKind::Mixed, s, vec![Plan::Mixed(m)], rows)));
                        }
                    }
                    if numeric {
                        let plan = Plan::Mixed(m.clone());
                        if self.audited(&self.audit.plan_eu(&plan)?, s)? {
                            return Ok(Some(DominanceProof {
                                kind: ProofKind::Mixed,
                                route: Route::Sampled(self.bank.len()),
                                dominated: s.clone(),
                                dominators: vec![Plan::Mixed(m)],
                                evidence: Evidence::Sampled {
                                    samples: self.bank.len(),
                                    strict: check.strict,
                                },
                                strict: true,
                                assumptions: Vec::new(),
                            }));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    fn reasons(&self, s: &Strategy, alive: &[Strategy], options: &AdmissibleOptions) -> Vec<String> {
        let mut out = Vec::new();
        let j = self.index(s);
        if options.pairwise {
            for (i, d) in self.all.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Err(why) = self.pairwise(i, j) {
                    out.push(format!("vs {}: {why}", d.describe(self.net)));
                }
            }
        }
        if options.kway && alive.len() > 2 {
            out.push("k-way: no pair of survivors covers it in every sampled model".into());
        }
        if options.mixed {
            out.push("mixed: no two-component mixture of survivors dominates it".into());
        }
        out
    }
}

/// Candidate mixture weights: every conditional probability in the network.
fn candidate_weights(net: &Network) -> Vec<(SymbolicProb, SymbolicProb)> {
    let mut out = Vec::new();
    for v in net.order() {
        if net.kind(&v) != Some(VarKind::Chance) {
            continue;
        }
        let parents = net.parents_ordered(&v);
        for given in assignments(&parents) {
            for lit in [true, false] {
                out.push((
                    SymbolicProb::literal(v.clone(), lit, given.clone()),
                    SymbolicProb::literal(v.clone(), !lit, given.clone()),
                ));
            }
        }
    }
    out
}

/// Smallest audit bank, whatever the search sample count.
pub const AUDIT_FLOOR: usize = 2000;

fn audit_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Enumerates strategies, applies the enabled techniques to a fixed point, and
/// cross-checks every proof against models sampled from `net` itself.
pub fn admissible_set(net: &Network, options: &AdmissibleOptions) -> Result<AdmissibleReport> {
    net.ensure_valid()?;
    let analysis = analysis_network(net)?;
    let po = induced_utility_order(&analysis)?;
    let all = enumerate_strategies(&analysis)?;
    let cases = all
        .iter()
        .map(|s| case_analysis(&analysis, s))
        .collect::<Result<Vec<_>>>()?;
    let bank = SampleBank::new(net, SamplerConfig::new(options.seed, options.samples))?;
    let audit = SampleBank::new(
        net,
        SamplerConfig::new(audit_seed(options.seed), (4 * options.samples).max(AUDIT_FLOOR)),
    )?;
    let weights = candidate_weights(&analysis);
    let search = Search {
        net: &analysis,
        po: &po,
        all: &all,
        cases,
        bank: &bank,
        audit: &audit,
        weight_columns: weights
            .iter()
            .map(|(w, _)| bank.weight(&Weight::Symbolic(w.clone())))
            .collect::<Result<Vec<_>>>()?,
        weights,
    };
    let (admissible, proofs) = search.run(options, true)?;
    let (pure_admissible, pure_proofs) = search.run(options, false)?;

    for p in proofs.iter().chain(&pure_proofs) {
        cross_check(&analysis, &po, &audit, p)?;
    }
    let unresolved = admissible
        .iter()
        .map(|s| SurvivorNote {
            strategy: s.clone(),
            reasons: search.reasons(s, &admissible, options),
        })
        .collect();
    Ok(AdmissibleReport {
        analysis,
        order: po,
        strategies: all,
        admissible,
        pure_admissible,
        proofs,
        unresolved,
        samples: bank.len(),
        audit_samples: audit.len(),
    })
}

/// Falsification attempt against the bank; a failure is an error, never a note.
pub fn cross_check(net: &Network, po: &PartialOrder, bank: &SampleBank, proof: &DominanceProof) -> Result<()> {
    let target = bank.eu(&proof.dominated)?;
    let witness = match proof.witness() {
        Some(w) => bank.plan_eu(w)?,
        None => {
            let columns = proof
                .dominators
                .iter()
                .map(|d| bank.plan_eu(d))
                .collect::<Result<Vec<_>>>()?;
            (0..bank.len())
                .map(|i| columns.iter().map(|c| c[i]).fold(f64::NEG_INFINITY, f64::max))
                .collect()
        }
    };
    let check = compare_columns(&witness, &target);
    let failure = match (&check.violation, proof.strict && check.strict == 0) {
        (Some(v), _) => Some(format!(
            "model {} gives {:.6} for the dominator and {:.6} for the dominated strategy",
            v.index, v.eu_a, v.eu_b
        )),
        (None, true) if !bank.is_empty() => Some("strict proof never strictly better".to_string()),
        _ => None,
    };
    match failure {
        Some(why) => Err(Error::OracleContradiction(format!("{why}\n{}", proof.render(net, po)))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse;
    use crate::models::test_treat;

    struct Fixture {
        net: Network,
        po: PartialOrder,
        all: Vec<Strategy>,
    }

    impl Fixture {
        fn new() -> Self {
            let net = analysis_network(&test_treat()).unwrap();
            let po = induced_utility_order(&net).unwrap();
            let all = enumerate_strategies(&net).unwrap();
            Fixture { net, po, all }
        }

        fn get(&self, label: &str) -> Strategy {
            self.all
                .iter()
                .find(|s| s.describe(&self.net) == label)
                .cloned()
                .unwrap_or_else(|| panic!("no `{label}`"))
        }
    }

    const NO_TEST_WAIT: &str = "t=~T, x=~X";
    const TEST_WAIT: &str = "t=T, x=~X";
    const EMPIRIC: &str = "t=~T, x=X";
    const TEST_TREAT_ALL: &str = "t=T, x=X";
    const TREAT_POSITIVE: &str = "t=T, x=X iff r=R";
    const TREAT_NEGATIVE: &str = "t=T, x=X iff r=~R";

    #[test]
    fn no_test_dominates_test_without_treatment() {
        let f = Fixture::new();
        let p = pairwise_dominates(&f.net, &f.get(NO_TEST_WAIT), &f.get(TEST_WAIT), &f.po)
            .unwrap()
            .expect("proof");
        let Evidence::Matched(rows) = &p.evidence else { panic!() };
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.strict));
        assert!(p.assumptions.is_empty());
    }

    #[test]
    fn empiric_dominates_test_and_treat_all() {
        let f = Fixture::new();
        assert!(pairwise_dominates(&f.net, &f.get(EMPIRIC), &f.get(TEST_TREAT_ALL), &f.po)
            .unwrap()
            .is_some());
    }

    #[test]
    fn self_comparison_has_no_strict_row() {
        let f = Fixture::new();
        for s in &f.all {
            assert!(pairwise_dominates(&f.net, s, s, &f.po).unwrap().is_none());
        }
    }

    #[test]
    fn treat_on_negative_escapes_every_pairwise_proof() {
        let f = Fixture::new();
        let neg = f.get(TREAT_NEGATIVE);
        for s in f.all.iter().filter(|s| **s != neg) {
            assert!(pairwise_dominates(&f.net, s, &neg, &f.po).unwrap().is_none());
        }
    }

    #[test]
    fn kway_degenerate_and_trivial_cases() {
        let f = Fixture::new();
        let worse = f.get(TEST_WAIT);
        let proof = kway_dominated(&f.net, &worse, &[f.get(NO_TEST_WAIT), f.get(TREAT_POSITIVE)], &f.po, None)
            .unwrap()
            .unwrap();
        assert_eq!(proof.kind, ProofKind::Kway);
        assert!(kway_dominated(&f.net, &worse, std::slice::from_ref(&worse), &f.po, None).unwrap().is_none());
    }

    #[test]
    fn degenerate_mixtures() {
        let f = Fixture::new();
        let (a, b) = (f.get(NO_TEST_WAIT), f.get(TEST_WAIT));
        let one = make_mixed(vec![(a.clone(), Weight::Symbolic(SymbolicProb::one()))]).unwrap();
        let mixed = mixed_dominates(&f.net, &one, &b, &f.po, None).unwrap();
        let pure = pairwise_dominates(&f.net, &a, &b, &f.po).unwrap();
        assert_eq!(mixed.is_some(), pure.is_some());

        let bank = SampleBank::new(&test_treat(), SamplerConfig::new(1, 50)).unwrap();
        let zero = make_mixed(vec![(b.clone(), Weight::Numeric(1.0)), (a, Weight::Numeric(0.0))]).unwrap();
        assert!(mixed_dominates(&f.net, &zero, &b, &f.po, Some(&bank)).unwrap().is_none());
    }

    #[test]
    fn hypothetical_rules_leave_three() {
        let f = Fixture::new();
        let (kept, proofs) = hypothetical_prune(&f.net, &f.all);
        let labels: BTreeSet<String> = kept.iter().map(|s| s.describe(&f.net)).collect();
        let expected: BTreeSet<String> = [NO_TEST_WAIT, TREAT_POSITIVE, EMPIRIC].iter().map(|s| s.to_string()).collect();
        assert_eq!(labels, expected);
        let rule_of = |label: &str| {
            proofs
                .iter()
                .find(|p| p.dominated.describe(&f.net) == label)
                .map(|p| match &p.evidence {
                    Evidence::Rule { name, .. } => name.clone(),
                    _ => String::new(),
                })
                .unwrap()
        };
        assert_eq!(rule_of(TEST_TREAT_ALL), "costly information");
        assert_eq!(rule_of(TEST_WAIT), "costly information");
        assert_eq!(rule_of("t=~T, x=X iff r=R"), "inert observation");
        assert_eq!(rule_of("t=~T, x=X iff r=~R"), "inert observation");
        assert_eq!(rule_of(TREAT_NEGATIVE), "signal monotonicity");
    }

    #[test]
    fn no_information_links_no_pruning() {
        let net = parse(
            "var d : decision\nvar a : chance\nvar u : value\n\
             influence d -> u : -\ninfluence a -> u : +\ninfluence d -> a : +\n",
        )
        .unwrap();
        let all = enumerate_strategies(&net).unwrap();
        let (kept, proofs) = hypothetical_prune(&net, &all);
        assert_eq!(kept.len(), 2);
        assert!(proofs.is_empty());
    }

    #[test]
    fn single_positive_decision() {
        let net = parse("var d : decision\nvar u : value\ninfluence d -> u : +\n").unwrap();
        let report = admissible_set(&net, &AdmissibleOptions { samples: 20, ..Default::default() }).unwrap();
        assert_eq!(report.admissible.len(), 1);
        assert_eq!(report.admissible[0].describe(&report.analysis), "d=D");
    }

    #[test]
    fn test_treat_admissible_set() {
        let report = admissible_set(&test_treat(), &AdmissibleOptions { samples: 200, ..AdmissibleOptions::all() }).unwrap();
        let labels: BTreeSet<String> = report.admissible.iter().map(|s| s.describe(&report.analysis)).collect();
        let expected: BTreeSet<String> = [NO_TEST_WAIT, TREAT_POSITIVE, EMPIRIC].iter().map(|s| s.to_string()).collect();
        assert_eq!(labels, expected, "{}", report.render());
        assert!(!report.unresolved.is_empty());
    }
}
