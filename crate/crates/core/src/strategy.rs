//! Strategies, case analyses and mixed strategies.
//!
//! A policy is defined over the information states a decision can actually
//! reach under the strategy's earlier choices, so observing a decision the
//! strategy already fixed adds no branching.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{assignments, Assignment, Network, VarKind};
use crate::reduction::{reduce_with, ReduceOptions};
use crate::symbolic::SymbolicProb;

/// Largest number of chance variables a case analysis enumerates.
pub const MAX_CASE_VARS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Policy {
    pub decision: String,
    /// Informational predecessors, in network order.
    pub observed: Vec<String>,
    /// Choice per reachable information state.
    pub table: BTreeMap<Assignment, bool>,
}

impl Policy {
    pub fn choice(&self, state: &Assignment) -> Option<bool> {
        self.table.get(state).copied()
    }

    pub fn constant(&self) -> Option<bool> {
        let mut values = self.table.values();
        let first = *values.next()?;
        values.all(|&v| v == first).then_some(first)
    }

    /// Observed variables whose value changes across reachable states.
    pub fn varying(&self) -> Vec<String> {
        self.observed
            .iter()
            .filter(|v| {
                let mut seen = self.table.keys().map(|s| s[*v]);
                let first = seen.next();
                seen.any(|x| Some(x) != first)
            })
            .cloned()
            .collect()
    }

    /// True when the choice depends on `var`, holding the other observations fixed.
    pub fn depends_on(&self, var: &str) -> bool {
        self.table.iter().any(|(state, &choice)| {
            let mut flipped = state.clone();
            match flipped.get_mut(var) {
                Some(v) => *v = !*v,
                None => return false,
            }
            self.table.get(&flipped).is_some_and(|&c| c != choice)
        })
    }

    pub fn describe(&self, net: &Network) -> String {
        let d = &self.decision;
        if let Some(c) = self.constant() {
            return format!("{d}={}", net.label(d, c));
        }
        let varying = self.varying();
        if let [v] = varying.as_slice() {
            let by_value: BTreeSet<(bool, bool)> =
                self.table.iter().map(|(s, &c)| (s[v], c)).collect();
            if by_value.len() == 2 {
                let when = by_value.iter().find(|(_, c)| *c).map(|(x, _)| *x).expect("varies");
                return format!(
                    "{d}={} iff {v}={}",
                    net.label(d, true),
                    net.label(v, when)
                );
            }
        }
        let cells: Vec<String> = self
            .table
            .iter()
            .map(|(s, &c)| {
                let key: Vec<String> = varying.iter().map(|v| net.label(v, s[v])).collect();
                format!("{}:{}", key.join(" "), net.label(d, c))
            })
            .collect();
        format!("{d}{{{}}}", cells.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strategy {
    /// One policy per decision, in topological order.
    pub policies: Vec<Policy>,
}

impl Strategy {
    pub fn policy(&self, decision: &str) -> Option<&Policy> {
        self.policies.iter().find(|p| p.decision == decision)
    }

    /// Decision values induced by an assignment of (at least) the observed chance variables.
    pub fn decide(&self, chance: &Assignment) -> Result<Assignment> {
        let mut decisions = Assignment::new();
        for p in &self.policies {
            let mut state = Assignment::new();
            for v in &p.observed {
                let value = decisions
                    .get(v)
                    .or_else(|| chance.get(v))
                    .copied()
                    .ok_or_else(|| Error::StrategyMismatch(format!("`{v}` is not assigned")))?;
                state.insert(v.clone(), value);
            }
            let choice = p.choice(&state).ok_or_else(|| {
                Error::StrategyMismatch(format!("no choice for `{}` in this state", p.decision))
            })?;
            decisions.insert(p.decision.clone(), choice);
        }
        Ok(decisions)
    }

    /// Decisions whose policy ignores every observation.
    pub fn fixed_decisions(&self) -> Assignment {
        self.policies
            .iter()
            .filter_map(|p| p.constant().map(|c| (p.decision.clone(), c)))
            .collect()
    }

    pub fn describe(&self, net: &Network) -> String {
        self.policies
            .iter()
            .map(|p| p.describe(net))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Fails unless the strategy has exactly the network's decisions and observations.
    pub fn check(&self, net: &Network) -> Result<()> {
        let decisions: BTreeSet<String> = net.names_of(VarKind::Decision).into_iter().collect();
        let covered: BTreeSet<String> = self.policies.iter().map(|p| p.decision.clone()).collect();
        if decisions != covered || covered.len() != self.policies.len() {
            return Err(Error::StrategyMismatch(format!(
                "policies cover {{{}}}, network decides {{{}}}",
                covered.into_iter().collect::<Vec<_>>().join(", "),
                decisions.into_iter().collect::<Vec<_>>().join(", ")
            )));
        }
        for p in &self.policies {
            if p.observed != net.info_preds(&p.decision) {
                return Err(Error::StrategyMismatch(format!(
                    "policy for `{}` observes ({}), network informs it of ({})",
                    p.decision,
                    p.observed.join(", "),
                    net.info_preds(&p.decision).join(", ")
                )));
            }
        }
        Ok(())
    }
}

fn decision_order(net: &Network) -> Vec<String> {
    net.order()
        .into_iter()
        .filter(|n| net.kind(n) == Some(VarKind::Decision))
        .collect()
}

fn observed_chance(net: &Network, decisions: &[String]) -> Vec<String> {
    let set: BTreeSet<String> = decisions
        .iter()
        .flat_map(|d| net.info_preds(d))
        .filter(|v| net.kind(v) == Some(VarKind::Chance))
        .collect();
    net.order().into_iter().filter(|v| set.contains(v)).collect()
}

/// Every strategy in reduced form, in a deterministic order.
pub fn enumerate_strategies(net: &Network) -> Result<Vec<Strategy>> {
    let decisions = decision_order(net);
    if decisions.is_empty() {
        return Err(Error::NoDecisions);
    }
    let observed = observed_chance(net, &decisions);
    let worlds: Vec<Assignment> = assignments(&observed).collect();
    let mut partial = vec![Strategy { policies: Vec::new() }];
    for d in &decisions {
        let preds = net.info_preds(d);
        let mut next = Vec::new();
        for s in &partial {
            let mut states = BTreeSet::new();
            for w in &worlds {
                let decided = s.decide(w)?;
                let state: Assignment = preds
                    .iter()
                    .map(|v| (v.clone(), *decided.get(v).or_else(|| w.get(v)).expect("assigned")))
                    .collect();
                states.insert(state);
            }
            let states: Vec<Assignment> = states.into_iter().collect();
            if states.len() > 16 {
                return Err(Error::TooLarge(states.len()));
            }
            for bits in 0..(1u64 << states.len()) {
                let table = states
                    .iter()
                    .enumerate()
                    .map(|(i, st)| (st.clone(), bits >> i & 1 == 1))
                    .collect();
                let mut extended = s.clone();
                extended.policies.push(Policy {
                    decision: d.clone(),
                    observed: preds.clone(),
                    table,
                });
                next.push(extended);
            }
        }
        partial = next;
    }
    Ok(partial)
}

/// Network used for case analyses: chance nodes spliced out wherever possible,
/// decisions and arc directions kept.
pub fn analysis_network(net: &Network) -> Result<Network> {
    Ok(reduce_with(net, ReduceOptions::splice_only())?.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseRow {
    pub case: Assignment,
    pub prob: SymbolicProb,
    pub decisions: Assignment,
    pub outcome: Assignment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseAnalysis {
    /// Chance variables the rows still distinguish, in topological order.
    pub vars: Vec<String>,
    pub rows: Vec<CaseRow>,
}

fn atom_given(net: &Network, var: &str, case: &Assignment, decisions: &Assignment) -> Assignment {
    net.parents(var)
        .into_iter()
        .map(|p| {
            let v = case
                .get(&p)
                .or_else(|| decisions.get(&p))
                .copied()
                .expect("parents precede their children");
            (p, v)
        })
        .collect()
}

pub(crate) fn chance_vars(net: &Network) -> Vec<String> {
    net.order()
        .into_iter()
        .filter(|n| net.kind(n) == Some(VarKind::Chance))
        .collect()
}

/// Rows of a strategy's outcome distribution; chance variables that change
/// neither outcome nor choices are summed out.
pub fn case_analysis(net: &Network, s: &Strategy) -> Result<CaseAnalysis> {
    s.check(net)?;
    let chance = chance_vars(net);
    if chance.len() > MAX_CASE_VARS {
        return Err(Error::TooLarge(chance.len()));
    }
    let value = net
        .value_node()
        .ok_or_else(|| Error::InvalidNetwork("no value node".into()))?;
    let outcome_vars = net.parents_ordered(value);
    let mut rows = Vec::new();
    for case in assignments(&chance) {
        let decisions = s.decide(&case)?;
        let mut prob = SymbolicProb::one();
        for v in &chance {
            let g = atom_given(net, v, &case, &decisions);
            prob = &prob * &SymbolicProb::literal(v.clone(), case[v], g);
        }
        let outcome = outcome_vars
            .iter()
            .map(|o| (o.clone(), *case.get(o).or_else(|| decisions.get(o)).expect("assigned")))
            .collect();
        rows.push(CaseRow {
            case,
            prob,
            decisions,
            outcome,
        });
    }
    let mut analysis = CaseAnalysis { vars: chance, rows };
    analysis.eliminate(net);
    Ok(analysis)
}

impl CaseAnalysis {
    fn eliminate(&mut self, net: &Network) {
        loop {
            let candidate = self.vars.iter().rev().find(|v| {
                let is_leaf = self
                    .vars
                    .iter()
                    .all(|w| w == *v || !net.parents(w).contains(*v));
                is_leaf && self.signature_ignores(v)
            });
            let Some(v) = candidate.cloned() else { break };
            let mut merged: BTreeMap<Assignment, CaseRow> = BTreeMap::new();
            for row in self.rows.drain(..) {
                let mut key = row.case.clone();
                key.remove(&v);
                match merged.get_mut(&key) {
                    Some(existing) => existing.prob = &existing.prob + &row.prob,
                    None => {
                        merged.insert(
                            key.clone(),
                            CaseRow {
                                case: key,
                                ..row
                            },
                        );
                    }
                }
            }
            self.rows = merged.into_values().collect();
            self.vars.retain(|w| *w != v);
        }
        self.sort_rows();
    }

    fn signature_ignores(&self, v: &str) -> bool {
        let mut seen: BTreeMap<Assignment, (&Assignment, &Assignment)> = BTreeMap::new();
        for row in &self.rows {
            let mut key = row.case.clone();
            key.remove(v);
            match seen.get(&key) {
                Some(&(o, d)) if *o != row.outcome || *d != row.decisions => return false,
                Some(_) => {}
                None => {
                    seen.insert(key, (&row.outcome, &row.decisions));
                }
            }
        }
        true
    }

    fn sort_rows(&mut self) {
        let vars = self.vars.clone();
        // true literals first, in variable order, as in a hand-written table
        self.rows.sort_by_key(|r| vars.iter().map(|v| !r.case[v]).collect::<Vec<_>>());
    }

    /// Splits rows on `var`, whose parents must already be distinguished.
    pub fn split(&mut self, net: &Network, var: &str) {
        if self.vars.iter().any(|v| v == var) {
            return;
        }
        let mut rows = Vec::with_capacity(self.rows.len() * 2);
        for row in &self.rows {
            let g = atom_given(net, var, &row.case, &row.decisions);
            for value in [true, false] {
                let mut case = row.case.clone();
                case.insert(var.to_string(), value);
                rows.push(CaseRow {
                    case,
                    prob: &row.prob * &SymbolicProb::literal(var, value, g.clone()),
                    decisions: row.decisions.clone(),
                    outcome: row.outcome.clone(),
                });
            }
        }
        self.rows = rows;
        let order = net.order();
        self.vars.push(var.to_string());
        self.vars
            .sort_by_key(|v| order.iter().position(|o| o == v).unwrap_or(usize::MAX));
        self.sort_rows();
    }

    /// Refines to the given variable set (a superset of `vars`), splitting in
    /// topological order.
    pub fn refine_to(&self, net: &Network, target: &[String]) -> CaseAnalysis {
        let mut out = self.clone();
        for v in net.order() {
            if target.contains(&v) {
                out.split(net, &v);
            }
        }
        out
    }

    pub fn total_probability(&self) -> SymbolicProb {
        self.rows
            .iter()
            .fold(SymbolicProb::zero(), |acc, r| &acc + &r.prob)
    }

    /// Probability of each outcome.
    pub fn outcome_distribution(&self) -> BTreeMap<Assignment, SymbolicProb> {
        let mut out: BTreeMap<Assignment, SymbolicProb> = BTreeMap::new();
        for r in &self.rows {
            let slot = out.entry(r.outcome.clone()).or_default();
            *slot = &*slot + &r.prob;
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Aligned `Strategy | Case | Prob | Outcome` table.
    pub fn table(&self, net: &Network, strategy: &str) -> String {
        let rows: Vec<[String; 4]> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let case = if r.case.is_empty() {
                    "-".to_string()
                } else {
                    net.fmt_literals(r.case.iter())
                };
                let outcome_order = net
                    .value_node()
                    .map(|u| net.parents_ordered(u))
                    .unwrap_or_default();
                let outcome: Vec<String> = outcome_order
                    .iter()
                    .filter_map(|o| r.outcome.get(o).map(|&b| net.label(o, b)))
                    .collect();
                [
                    if i == 0 { strategy.to_string() } else { String::new() },
                    case,
                    r.prob.render(net),
                    outcome.join(" "),
                ]
            })
            .collect();
        render_table(&["Strategy", "Case", "Prob", "Outcome"], &rows)
    }
}

pub(crate) fn render_table<const N: usize>(head: &[&str; N], rows: &[[String; N]]) -> String {
    let mut widths: Vec<usize> = head.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(head.to_vec(), &mut out);
    line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect(), &mut out);
    for r in rows {
        line(r.iter().map(|s| s.as_str()).collect(), &mut out);
    }
    out
}

/// True when both strategies induce the same outcome probabilities.
pub fn realization_equivalent(net: &Network, s1: &Strategy, s2: &Strategy) -> Result<bool> {
    Ok(case_analysis(net, s1)?.outcome_distribution() == case_analysis(net, s2)?.outcome_distribution())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Symbolic(SymbolicProb),
    Numeric(f64),
}

impl Weight {
    pub fn render(&self, net: &Network) -> String {
        match self {
            Weight::Symbolic(p) => p.render(net),
            Weight::Numeric(x) => format!("{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedStrategy {
    pub components: Vec<(Strategy, Weight)>,
}

/// Builds a mixture; weights must be all numeric in `[0, 1]` summing to 1, or
/// all symbolic with a sum that simplifies to 1.
pub fn make_mixed(components: Vec<(Strategy, Weight)>) -> Result<MixedStrategy> {
    if components.is_empty() {
        return Err(Error::InvalidWeights("no components".into()));
    }
    let numeric: Vec<f64> = components
        .iter()
        .filter_map(|(_, w)| match w {
            Weight::Numeric(x) => Some(*x),
            Weight::Symbolic(_) => None,
        })
        .collect();
    if numeric.len() == components.len() {
        if numeric.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidWeights("weights must lie in [0, 1]".into()));
        }
        let total: f64 = numeric.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
    } else if numeric.is_empty() {
        let total = components.iter().fold(SymbolicProb::zero(), |acc, (_, w)| match w {
            Weight::Symbolic(p) => &acc + p,
            Weight::Numeric(_) => unreachable!(),
        });
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
    } else {
        return Err(Error::InvalidWeights(
            "numeric and symbolic weights cannot be combined".into(),
        ));
    }
    Ok(MixedStrategy { components })
}

impl MixedStrategy {
    /// Weight-blended case analysis, or `None` when some weight is numeric.
    pub fn case_analysis(&self, net: &Network) -> Result<Option<CaseAnalysis>> {
        let mut analyses = Vec::new();
        for (s, w) in &self.components {
            match w {
                Weight::Symbolic(p) => analyses.push((case_analysis(net, s)?, p)),
                Weight::Numeric(_) => return Ok(None),
            }
        }
        let mut vars: Vec<String> = Vec::new();
        for (a, _) in &analyses {
            for v in &a.vars {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        let mut merged: BTreeMap<(Assignment, Assignment, Assignment), SymbolicProb> = BTreeMap::new();
        for (a, w) in &analyses {
            for row in a.refine_to(net, &vars).rows {
                let key = (row.case, row.outcome, row.decisions);
                let slot = merged.entry(key).or_default();
                *slot = &*slot + &(&row.prob * w);
            }
        }
        let order = net.order();
        vars.sort_by_key(|v| order.iter().position(|o| o == v).unwrap_or(usize::MAX));
        let mut out = CaseAnalysis {
            vars,
            rows: merged
                .into_iter()
                .filter(|(_, p)| !p.is_zero())
                .map(|((case, outcome, decisions), prob)| CaseRow {
                    case,
                    prob,
                    decisions,
                    outcome,
                })
                .collect(),
        };
        out.sort_rows();
        Ok(Some(out))
    }

    pub fn describe(&self, net: &Network) -> String {
        self.components
            .iter()
            .map(|(s, w)| format!("{} * [{}]", w.render(net), s.describe(net)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A pure or mixed strategy.
#[derive(Clone, Debug, PartialEq)]
pub enum Plan {
    Pure(Strategy),
    Mixed(MixedStrategy),
}

impl Plan {
    pub fn describe(&self, net: &Network) -> String {
        match self {
            Plan::Pure(s) => s.describe(net),
            Plan::Mixed(m) => m.describe(net),
        }
    }

    pub fn case_analysis(&self, net: &Network) -> Result<Option<CaseAnalysis>> {
        match self {
            Plan::Pure(s) => case_analysis(net, s).map(Some),
            Plan::Mixed(m) => m.case_analysis(net),
        }
    }
}

impl From<Strategy> for Plan {
    fn from(s: Strategy) -> Self {
        Plan::Pure(s)
    }
}

impl From<MixedStrategy> for Plan {
    fn from(m: MixedStrategy) -> Self {
        Plan::Mixed(m)
    }
}
