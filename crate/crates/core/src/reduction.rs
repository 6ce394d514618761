//! Qualitative evaluation by node removal and arc reversal.
//!
//! Every operation is a pure function returning the transformed network plus a
//! [`ReductionStep`] that records what changed; replaying a step log against
//! the original network reproduces the reduced one.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{chain, parallel};
use crate::error::{Error, Result};
use crate::network::{assignments, Assignment, Condition, Influence, Network, VarKind};
use crate::sign::Sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    RemoveChance,
    ReverseArc,
    RemoveDecision,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::RemoveChance => "remove-chance",
            StepKind::ReverseArc => "reverse-arc",
            StepKind::RemoveDecision => "remove-decision",
        })
    }
}

/// Forced choice of a removed decision, per assignment of its observations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyFragment {
    pub decision: String,
    pub observed: Vec<String>,
    pub choices: Vec<(Assignment, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub subjects: Vec<String>,
    /// Influences created or rewritten by the step.
    pub updates: Vec<Influence>,
    pub policy: Option<PolicyFragment>,
    pub justification: String,
    rendered: Vec<String>,
}

impl ReductionStep {
    fn new(kind: StepKind, subjects: Vec<String>, justification: impl Into<String>) -> Self {
        ReductionStep {
            kind,
            subjects,
            updates: Vec::new(),
            policy: None,
            justification: justification.into(),
            rendered: Vec::new(),
        }
    }

    fn with_updates(mut self, net: &Network, updates: Vec<Influence>) -> Self {
        self.rendered = updates.iter().map(|i| net.fmt_influence(i)).collect();
        self.updates = updates;
        self
    }
}

/// One line: `kind subjects :: updates :: justification`.
impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subjects = match self.kind {
            StepKind::ReverseArc => self.subjects.join(" -> "),
            _ => self.subjects.join(", "),
        };
        let updates = if self.rendered.is_empty() {
            "-".to_string()
        } else {
            self.rendered.join(", ")
        };
        write!(f, "{} {subjects} :: {updates} :: {}", self.kind, self.justification)
    }
}

fn not_removable(node: &str, reason: impl Into<String>) -> Error {
    Error::NotRemovable {
        node: node.to_string(),
        reason: reason.into(),
    }
}

fn unknown_everywhere(source: &str, target: &str) -> Influence {
    Influence::unconditional(source, target, Sign::Unknown)
}

/// Splices a chance node with a single successor into that successor, or drops
/// it outright when it has no successors.
pub fn remove_chance_node(net: &Network, v: &str) -> Result<(Network, ReductionStep)> {
    if net.require(v)?.kind != VarKind::Chance {
        return Err(not_removable(v, "not a chance node"));
    }
    let observers = net.observers(v);
    if !observers.is_empty() {
        return Err(not_removable(
            v,
            format!("observed by decision {}", observers.join(", ")),
        ));
    }
    let successors = net.successors(v);
    let mut out = net.clone();
    if successors.is_empty() {
        out.remove_variable(v);
        let step = ReductionStep::new(StepKind::RemoveChance, vec![v.into()], "barren");
        return Ok((out, step));
    }
    if successors.len() != 1 {
        return Err(not_removable(
            v,
            format!(
                "{} direct successors ({})",
                successors.len(),
                successors.iter().cloned().collect::<Vec<_>>().join(", ")
            ),
        ));
    }
    let s = successors.into_iter().next().expect("one successor");
    if net.mentioned_in_conditions(v) {
        return Err(not_removable(
            v,
            format!("named in a condition of an influence into `{s}`"),
        ));
    }
    let out_link = net
        .influence(v, &s)
        .ok_or_else(|| Error::MissingInfluence(v.into(), s.clone()))?;
    let s_parents = net.parents(&s);

    let mut updates = Vec::new();
    for p in net.parents_ordered(v) {
        let into_v = net
            .influence(&p, v)
            .cloned()
            .unwrap_or_else(|| unknown_everywhere(&p, v));
        let through = chain(&into_v, out_link)?;
        let combined = match net.influence(&p, &s) {
            Some(direct) => parallel(direct, &through)?,
            None if s_parents.contains(&p) => parallel(&unknown_everywhere(&p, &s), &through)?,
            None => through,
        };
        updates.push(combined);
    }
    // a variable that only conditioned v's effect still moves s through v's table
    let v_parents = net.parents(v);
    for w in out_link.condition_vars() {
        if !v_parents.contains(&w) && net.influence(&w, &s).is_none() {
            updates.push(unknown_everywhere(&w, &s));
        }
    }
    out.remove_variable(v);
    for inf in &updates {
        out.set_influence(inf.clone());
    }
    let updates: Vec<Influence> = updates
        .iter()
        .map(|i| out.influence(&i.source, &i.target).cloned().expect("just set"))
        .collect();
    let step = ReductionStep::new(
        StepKind::RemoveChance,
        vec![v.into()],
        format!("spliced into `{s}`"),
    )
    .with_updates(&out, updates);
    Ok((out, step))
}

/// Reverses the chance-to-chance arc `a → b`.
///
/// The reversed link keeps its entries. Each endpoint inherits the other's
/// predecessors, and every predecessor link of either endpoint is set to `?`.
pub fn reverse_arc(net: &Network, a: &str, b: &str) -> Result<(Network, ReductionStep)> {
    let refuse = |reason: &str| Error::NotReversible {
        from: a.to_string(),
        to: b.to_string(),
        reason: reason.to_string(),
    };
    let link = net
        .influence(a, b)
        .cloned()
        .ok_or_else(|| Error::MissingInfluence(a.into(), b.into()))?;
    if net.require(a)?.kind != VarKind::Chance || net.require(b)?.kind != VarKind::Chance {
        return Err(refuse("both endpoints must be chance nodes"));
    }
    let mut without = net.clone();
    without.remove_influence(a, b);
    if without.parents(b).contains(a) {
        return Err(refuse("source also conditions another influence into the target"));
    }
    if without.has_path(a, b) {
        return Err(refuse("another directed path would close a cycle"));
    }

    let mut inherited: BTreeSet<String> = net.parents(a);
    inherited.extend(net.parents(b));
    inherited.remove(a);
    inherited.remove(b);

    let mut out = without;
    let reversed = Influence::new(b, a, link.entries().to_vec());
    out.set_influence(reversed.clone());
    let mut updates = vec![reversed];
    for x in &inherited {
        for target in [a, b] {
            let inf = unknown_everywhere(x, target);
            out.set_influence(inf.clone());
            updates.push(inf);
        }
    }
    if let Err(cycle) = out.topological_order() {
        return Err(refuse(&format!("cycle through {}", cycle.join(", "))));
    }
    let step = ReductionStep::new(
        StepKind::ReverseArc,
        vec![a.into(), b.into()],
        "reversed link keeps its direction; inherited predecessor links set to ?",
    )
    .with_updates(&out, updates);
    Ok((out, step))
}

/// Removes a decision whose best choice is determined by its influence on utility
/// in every context of its observations.
pub fn remove_decision_node(net: &Network, d: &str) -> Result<(Network, ReductionStep)> {
    if net.require(d)?.kind != VarKind::Decision {
        return Err(not_removable(d, "not a decision node"));
    }
    let value = net
        .value_node()
        .ok_or_else(|| Error::InvalidNetwork("no value node".into()))?
        .to_string();
    let successors = net.successors(d);
    if net.mentioned_in_conditions(d) {
        return Err(not_removable(d, "named in an influence condition"));
    }
    let observed = net.info_preds(d);
    let mut out = net.clone();

    if successors.is_empty() {
        let choices = assignments(&observed).map(|a| (a, false)).collect();
        out.remove_variable(d);
        let mut step = ReductionStep::new(
            StepKind::RemoveDecision,
            vec![d.into()],
            "barren decision; tie broken to the false literal",
        );
        step.policy = Some(PolicyFragment {
            decision: d.into(),
            observed,
            choices,
        });
        return Ok((out, step));
    }
    if successors.len() != 1 || !successors.contains(&value) {
        return Err(not_removable(
            d,
            format!(
                "influences nodes other than the value node ({})",
                successors.into_iter().collect::<Vec<_>>().join(", ")
            ),
        ));
    }
    let link = net
        .influence(d, &value)
        .ok_or_else(|| Error::MissingInfluence(d.into(), value.clone()))?;

    let mut choices = Vec::new();
    let mut tie = false;
    for ctx in assignments(&observed) {
        let choice = match link.sign_over(&ctx) {
            Sign::Positive => true,
            Sign::Negative => false,
            Sign::Zero => {
                tie = true;
                false
            }
            Sign::Unknown => {
                let shown = if ctx.is_empty() {
                    "unconditionally".to_string()
                } else {
                    format!("when {}", net.fmt_literals(ctx.iter()))
                };
                return Err(not_removable(
                    d,
                    format!("influence on utility is ambiguous {shown}"),
                ));
            }
        };
        choices.push((ctx, choice));
    }
    out.remove_variable(d);
    let mut why = "choice forced by the sign of its influence on utility".to_string();
    if tie {
        why.push_str("; zero-sign contexts tie-broken to the false literal");
    }
    let mut step = ReductionStep::new(StepKind::RemoveDecision, vec![d.into()], why);
    step.policy = Some(PolicyFragment {
        decision: d.into(),
        observed,
        choices,
    });
    Ok((out, step))
}

/// Which optional manipulations [`reduce_with`] may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Reverse arcs from unobserved chance parents into observed chance nodes.
    pub reverse_observations: bool,
    /// Remove barren or sign-determined decisions.
    pub remove_decisions: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            reverse_observations: true,
            remove_decisions: true,
        }
    }
}

impl ReduceOptions {
    /// Splicing and barren removal only; keeps decisions and the direction of
    /// every surviving arc.
    pub fn splice_only() -> Self {
        ReduceOptions {
            reverse_observations: false,
            remove_decisions: false,
        }
    }
}

/// Reduces with every manipulation enabled.
pub fn reduce(net: &Network) -> Result<(Network, Vec<ReductionStep>)> {
    reduce_with(net, ReduceOptions::default())
}

/// Applies manipulations until none applies: barren chance nodes, spliceable chance
/// nodes (topological order, ties by name), observation reversals, then decisions.
pub fn reduce_with(net: &Network, options: ReduceOptions) -> Result<(Network, Vec<ReductionStep>)> {
    net.ensure_valid()?;
    let mut current = net.clone();
    let mut log = Vec::new();
    let mut reversed: BTreeSet<(String, String)> = BTreeSet::new();

    loop {
        let order = current.order();
        let chance: Vec<&String> = order
            .iter()
            .filter(|n| current.kind(n) == Some(VarKind::Chance))
            .collect();

        if let Some(v) = chance
            .iter()
            .find(|v| current.successors(v).is_empty())
        {
            let (next, step) = remove_chance_node(&current, v)?;
            current = next;
            log.push(step);
            continue;
        }

        if options.remove_decisions {
            let barren = order.iter().find(|n| {
                current.kind(n) == Some(VarKind::Decision) && current.successors(n).is_empty()
            });
            if let Some(d) = barren {
                let (next, step) = remove_decision_node(&current, d)?;
                current = next;
                log.push(step);
                continue;
            }
        }

        if let Some((next, step)) = chance
            .iter()
            .find_map(|v| remove_chance_node(&current, v).ok())
        {
            current = next;
            log.push(step);
            continue;
        }

        if options.reverse_observations {
            if let Some((key, (next, step))) = observation_reversal(&current, &order, &reversed) {
                reversed.insert(key);
                current = next;
                log.push(step);
                continue;
            }
        }

        if options.remove_decisions {
            if let Some((next, step)) = order
                .iter()
                .filter(|n| current.kind(n) == Some(VarKind::Decision))
                .find_map(|d| remove_decision_node(&current, d).ok())
            {
                current = next;
                log.push(step);
                continue;
            }
        }
        break;
    }
    Ok((current, log))
}

// An observed chance node whose unobserved chance parent bears on utility gets that
// arc reversed, so the observation precedes the state it signals.
fn observation_reversal(
    net: &Network,
    order: &[String],
    done: &BTreeSet<(String, String)>,
) -> Option<((String, String), (Network, ReductionStep))> {
    let value = net.value_node()?;
    for o in order {
        if net.kind(o) != Some(VarKind::Chance) || net.observers(o).is_empty() {
            continue;
        }
        let watchers = net.observers(o);
        for inf in net.influences_into(o) {
            let p = &inf.source;
            if net.kind(p) != Some(VarKind::Chance) {
                continue;
            }
            let key = if p < o { (p.clone(), o.clone()) } else { (o.clone(), p.clone()) };
            if done.contains(&key) {
                continue;
            }
            let seen_by_same = net.observers(p).iter().any(|d| watchers.contains(d));
            if seen_by_same || !net.has_path(p, value) {
                continue;
            }
            if let Ok(result) = reverse_arc(net, p, o) {
                return Some((key, result));
            }
        }
    }
    None
}

/// Re-applies a log to the network it was produced from; fails if any step no longer
/// produces the recorded updates.
pub fn replay(net: &Network, log: &[ReductionStep]) -> Result<Network> {
    let mut current = net.clone();
    for recorded in log {
        let (next, step) = match recorded.kind {
            StepKind::RemoveChance => remove_chance_node(&current, &recorded.subjects[0])?,
            StepKind::ReverseArc => {
                reverse_arc(&current, &recorded.subjects[0], &recorded.subjects[1])?
            }
            StepKind::RemoveDecision => remove_decision_node(&current, &recorded.subjects[0])?,
        };
        if step != *recorded {
            return Err(Error::InvalidNetwork(format!(
                "replayed step differs: `{step}` vs `{recorded}`"
            )));
        }
        current = next;
    }
    Ok(current)
}

/// Entries of `inf` with conditions rendered through `net`'s labels.
pub fn describe_entries(net: &Network, inf: &Influence) -> Vec<(String, Sign)> {
    inf.entries()
        .iter()
        .map(|(c, s): &(Condition, Sign)| (net.fmt_condition(c), *s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse;
    use crate::models::test_treat;
    use Sign::*;

    fn net(text: &str) -> Network {
        let n = parse(text).unwrap();
        assert_eq!(n.validate(), vec![], "{text}");
        n
    }

    const CHAIN: &str = "var a : chance\nvar b : chance\nvar c : chance\nvar u : value\n\
        influence a -> b : +\ninfluence b -> c : +\ninfluence c -> u : +\n";

    #[test]
    fn simple_chain_splice() {
        let (out, step) = remove_chance_node(&net(CHAIN), "b").unwrap();
        assert!(!out.contains("b"));
        assert_eq!(
            out.influence("a", "c").unwrap().entries(),
            &[(Condition::truth(), Positive)]
        );
        assert_eq!(step.kind, StepKind::RemoveChance);
    }

    #[test]
    fn two_paths_become_ambiguous() {
        let n = net("var a : chance\nvar b : chance\nvar c : chance\nvar u : value\n\
            influence a -> b : +\ninfluence b -> c : -\ninfluence a -> c : +\ninfluence c -> u : +\n");
        let (out, _) = remove_chance_node(&n, "b").unwrap();
        assert_eq!(
            out.influence("a", "c").unwrap().entries(),
            &[(Condition::truth(), Unknown)]
        );
    }

    #[test]
    fn zero_absorbs_in_splice() {
        let n = net("var a : chance\nvar b : chance\nvar c : chance\nvar u : value\n\
            influence a -> b : 0\ninfluence b -> c : +\ninfluence c -> u : +\n");
        let (out, _) = remove_chance_node(&n, "b").unwrap();
        assert_eq!(out.influence("a", "c").unwrap().entries(), &[(Condition::truth(), Zero)]);
    }

    #[test]
    fn splice_preconditions() {
        let tt = test_treat();
        assert!(matches!(
            remove_chance_node(&tt, "d"),
            Err(Error::NotRemovable { .. })
        ));
        let err = remove_chance_node(&tt, "r").unwrap_err().to_string();
        assert!(err.contains("observed"), "{err}");
        assert!(remove_chance_node(&tt, "x").is_err());
    }

    #[test]
    fn test_treat_reversal_keeps_sign() {
        let (out, step) = reverse_arc(&test_treat(), "d", "r").unwrap();
        let rd = out.influence("r", "d").unwrap();
        assert_eq!(
            rd.entries(),
            &[
                (Condition::literal("t", false), Zero),
                (Condition::literal("t", true), Positive)
            ]
        );
        assert!(out.influence("d", "r").is_none());
        assert_eq!(out.influence("t", "r").unwrap().entries()[0].1, Unknown);
        assert_eq!(step.kind, StepKind::ReverseArc);
        assert!(out.is_valid());
    }

    #[test]
    fn standalone_zero_arc_reverses() {
        let n = net("var a : chance\nvar b : chance\nvar u : value\n\
            influence a -> b : 0\ninfluence b -> u : +\ninfluence a -> u : +\n");
        let (out, _) = reverse_arc(&n, "a", "b").unwrap();
        assert_eq!(out.influence("b", "a").unwrap().entries(), &[(Condition::truth(), Zero)]);
        assert_eq!(out.influences().count(), 3);
    }

    #[test]
    fn reversal_refuses_cycles() {
        let n = net("var a : chance\nvar b : chance\nvar c : chance\nvar u : value\n\
            influence a -> b : +\ninfluence a -> c : +\ninfluence c -> b : +\ninfluence b -> u : +\n");
        let err = reverse_arc(&n, "a", "b").unwrap_err().to_string();
        assert!(err.contains("cycle"), "{err}");
        assert!(matches!(reverse_arc(&n, "b", "a"), Err(Error::MissingInfluence(..))));
    }

    #[test]
    fn positive_decision_is_removed() {
        let n = net("var d : decision\nvar u : value\ninfluence d -> u : +\n");
        let (out, step) = remove_decision_node(&n, "d").unwrap();
        assert!(!out.contains("d"));
        let policy = step.policy.unwrap();
        assert_eq!(policy.choices, vec![(Assignment::new(), true)]);
    }

    #[test]
    fn decision_with_context_dependent_sign() {
        let n = net("var t : decision\nvar r : chance\nvar x : decision\nvar u : value\n\
            influence x -> u : + | t=T, r=R\ninfluence x -> u : - | t=T, r=~R\n\
            influence x -> u : + | t=~T, r=R\ninfluence x -> u : - | t=~T, r=~R\n\
            influence t -> u : -\ninfluence r -> u : +\n\
            inform t -> x\ninform r -> x\n");
        let (_, step) = remove_decision_node(&n, "x").unwrap();
        let policy = step.policy.unwrap();
        assert_eq!(policy.observed, vec!["t".to_string(), "r".to_string()]);
        for (ctx, choice) in policy.choices {
            assert_eq!(choice, ctx["r"], "treat iff R");
        }
    }

    #[test]
    fn decision_unknown_in_some_context_is_kept() {
        let n = net("var t : decision\nvar r : chance\nvar x : decision\nvar u : value\n\
            influence x -> u : + | t=T, r=R\ninfluence x -> u : - | t=T, r=~R\n\
            influence t -> u : -\ninfluence r -> u : +\ninform t -> x\ninform r -> x\n");
        let err = remove_decision_node(&n, "x").unwrap_err().to_string();
        assert!(err.contains("ambiguous"), "{err}");
        let n = net("var d : decision\nvar u : value\ninfluence d -> u : ?\n");
        assert!(remove_decision_node(&n, "d").is_err());
    }

    #[test]
    fn test_treat_reduces_to_five_nodes() {
        let tt = test_treat();
        let (out, log) = reduce(&tt).unwrap();
        let names: BTreeSet<&str> = out.variables().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["d", "r", "t", "u", "x"].into_iter().collect());
        let removed: BTreeSet<&str> = log
            .iter()
            .filter(|s| s.kind == StepKind::RemoveChance)
            .map(|s| s.subjects[0].as_str())
            .collect();
        assert_eq!(removed, ["c", "y", "z"].into_iter().collect());
        assert!(log
            .iter()
            .any(|s| s.kind == StepKind::ReverseArc && s.subjects == ["d", "r"]));
        assert!(out.informational_links().contains(&("t".into(), "x".into())));
        assert!(out.informational_links().contains(&("r".into(), "x".into())));
        assert_eq!(out.influence("t", "u").unwrap().entries(), &[(Condition::truth(), Negative)]);
        assert_eq!(
            out.influence("x", "u").unwrap().entries(),
            &[
                (Condition::literal("d", false), Negative),
                (Condition::literal("d", true), Unknown)
            ]
        );
        assert_eq!(replay(&tt, &log).unwrap(), out);
    }

    #[test]
    fn single_chain_to_utility() {
        let n = net("var a : chance\nvar b : chance\nvar u : value\n\
            influence a -> b : -\ninfluence b -> u : +\n");
        let (out, log) = reduce(&n).unwrap();
        // b spliced, then a spliced into u; only u remains
        assert_eq!(log.len(), 2);
        assert_eq!(out.variables().len(), 1);
        let (partial, _) = remove_chance_node(&n, "b").unwrap();
        assert_eq!(
            partial.influence("a", "u").unwrap().entries(),
            &[(Condition::truth(), Negative)]
        );
    }

    #[test]
    fn unknown_link_propagates() {
        // a -(+)-> b -(?)-> u and a decision observing a keeps a in place:
        // splicing b yields + ⊗ ? = ? on a -> u
        let n = net("var a : chance\nvar b : chance\nvar d : decision\nvar u : value\n\
            influence a -> b : +\ninfluence b -> u : ?\ninfluence d -> u : ?\ninform a -> d\n");
        let (out, _) = reduce(&n).unwrap();
        assert_eq!(out.influence("a", "u").unwrap().entries(), &[(Condition::truth(), Unknown)]);
        assert!(out.contains("a"));
    }
}
