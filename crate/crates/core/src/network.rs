//! Network data model: binary variables, signed conditional influences,
//! informational links, and structural validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::sign::Sign;

/// Truth assignment to a set of variables (`true` is the variable's first literal).
pub type Assignment = BTreeMap<String, bool>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Chance,
    Decision,
    Value,
}

impl VarKind {
    pub fn keyword(self) -> &'static str {
        match self {
            VarKind::Chance => "chance",
            VarKind::Decision => "decision",
            VarKind::Value => "value",
        }
    }
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub true_label: String,
    pub false_label: String,
}

impl Variable {
    pub fn new(name: impl Into<String>, kind: VarKind) -> Self {
        let name = name.into();
        let (true_label, false_label) = default_labels(&name);
        Variable {
            name,
            kind,
            true_label,
            false_label,
        }
    }

    pub fn with_labels(mut self, t: impl Into<String>, f: impl Into<String>) -> Self {
        self.true_label = t.into();
        self.false_label = f.into();
        self
    }

    pub fn label(&self, value: bool) -> &str {
        if value {
            &self.true_label
        } else {
            &self.false_label
        }
    }

    pub fn value_of(&self, label: &str) -> Option<bool> {
        if label == self.true_label {
            Some(true)
        } else if label == self.false_label {
            Some(false)
        } else {
            None
        }
    }

    pub fn has_default_labels(&self) -> bool {
        let (t, f) = default_labels(&self.name);
        self.true_label == t && self.false_label == f
    }
}

/// `a` gets literals `A` and `~A`.
pub fn default_labels(name: &str) -> (String, String) {
    let upper = name.to_uppercase();
    (upper.clone(), format!("~{upper}"))
}

/// Conjunction of literals. The empty condition is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition(BTreeMap<String, bool>);

impl Condition {
    pub fn truth() -> Self {
        Condition(BTreeMap::new())
    }

    pub fn from_literals<I, S>(literals: I) -> Self
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        Condition(literals.into_iter().map(|(v, b)| (v.into(), b)).collect())
    }

    pub fn literal(var: impl Into<String>, value: bool) -> Self {
        Condition::from_literals([(var.into(), value)])
    }

    pub fn is_true(&self) -> bool {
        self.0.is_empty()
    }

    pub fn literals(&self) -> &BTreeMap<String, bool> {
        &self.0
    }

    pub fn get(&self, var: &str) -> Option<bool> {
        self.0.get(var).copied()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` when the two conditions contradict each other.
    pub fn conjoin(&self, other: &Condition) -> Option<Condition> {
        let mut out = self.0.clone();
        for (v, &b) in &other.0 {
            match out.insert(v.clone(), b) {
                Some(prev) if prev != b => return None,
                _ => {}
            }
        }
        Some(Condition(out))
    }

    /// True when some variable carries opposite literals in the two conditions.
    pub fn excludes(&self, other: &Condition) -> bool {
        self.0
            .iter()
            .any(|(v, b)| other.0.get(v).is_some_and(|o| o != b))
    }

    /// Every literal is present and matching in `assignment`.
    pub fn holds_in(&self, assignment: &Assignment) -> bool {
        self.0.iter().all(|(v, b)| assignment.get(v) == Some(b))
    }

    /// No literal contradicts `assignment` (variables missing from it are ignored).
    pub fn consistent_with(&self, assignment: &Assignment) -> bool {
        self.0
            .iter()
            .all(|(v, b)| assignment.get(v).is_none_or(|a| a == b))
    }

    /// Fixes `var` to `value`: `None` if the condition requires the opposite,
    /// otherwise the condition without `var`.
    pub fn restrict(&self, var: &str, value: bool) -> Option<Condition> {
        match self.0.get(var) {
            Some(&b) if b != value => None,
            _ => {
                let mut out = self.0.clone();
                out.remove(var);
                Some(Condition(out))
            }
        }
    }

    pub fn without(&self, var: &str) -> Condition {
        let mut out = self.0.clone();
        out.remove(var);
        Condition(out)
    }
}

/// Signed influence of `source` on `target`, as mutually exclusive
/// `(condition, sign)` entries. Uncovered contexts read as `Unknown`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Influence {
    pub source: String,
    pub target: String,
    entries: Vec<(Condition, Sign)>,
}

impl Influence {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        entries: impl IntoIterator<Item = (Condition, Sign)>,
    ) -> Self {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort();
        entries.dedup();
        Influence {
            source: source.into(),
            target: target.into(),
            entries,
        }
    }

    pub fn unconditional(source: impl Into<String>, target: impl Into<String>, sign: Sign) -> Self {
        Influence::new(source, target, [(Condition::truth(), sign)])
    }

    pub fn entries(&self) -> &[(Condition, Sign)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sign in a context that fixes every condition variable.
    pub fn sign_at(&self, context: &Assignment) -> Sign {
        self.entries
            .iter()
            .find(|(c, _)| c.holds_in(context))
            .map_or(Sign::Unknown, |(_, s)| *s)
    }

    /// Parallel sum of the signs of every cell consistent with a partial context.
    /// Uncovered cells contribute `Unknown`.
    pub fn sign_over(&self, partial: &Assignment) -> Sign {
        let free: Vec<String> = self
            .condition_vars()
            .into_iter()
            .filter(|v| !partial.contains_key(v))
            .collect();
        let mut acc = Sign::Zero;
        for bits in 0..(1u64 << free.len()) {
            let mut ctx = partial.clone();
            for (i, v) in free.iter().enumerate() {
                ctx.insert(v.clone(), bits >> i & 1 == 1);
            }
            acc = acc.add(self.sign_at(&ctx));
        }
        acc
    }

    pub fn condition_vars(&self) -> BTreeSet<String> {
        self.entries
            .iter()
            .flat_map(|(c, _)| c.vars().cloned())
            .collect()
    }

    /// First pair of overlapping entries, if any.
    pub fn overlapping_entries(&self) -> Option<(usize, usize)> {
        for i in 0..self.entries.len() {
            for j in i + 1..self.entries.len() {
                if !self.entries[i].0.excludes(&self.entries[j].0) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Merges sibling entries with equal signs (`c∧v` and `c∧¬v` become `c`)
    /// until no merge applies.
    pub fn simplified(&self) -> Influence {
        let mut entries = self.entries.clone();
        'outer: loop {
            for i in 0..entries.len() {
                for j in i + 1..entries.len() {
                    if entries[i].1 != entries[j].1 {
                        continue;
                    }
                    if let Some(merged) = merge_siblings(&entries[i].0, &entries[j].0) {
                        let sign = entries[i].1;
                        entries.remove(j);
                        entries[i] = (merged, sign);
                        continue 'outer;
                    }
                }
            }
            break;
        }
        Influence::new(self.source.clone(), self.target.clone(), entries)
    }

    pub fn with_entries(&self, entries: impl IntoIterator<Item = (Condition, Sign)>) -> Influence {
        Influence::new(self.source.clone(), self.target.clone(), entries)
    }
}

// An influence with no entries is stored as an explicit unconditional `?`.
fn explicit_unknown(influence: Influence) -> Influence {
    if influence.is_empty() {
        influence.with_entries([(Condition::truth(), Sign::Unknown)])
    } else {
        influence
    }
}

fn merge_siblings(a: &Condition, b: &Condition) -> Option<Condition> {
    if a.len() != b.len() {
        return None;
    }
    let mut differing = None;
    for (v, x) in a.literals() {
        match b.get(v) {
            None => return None,
            Some(y) if y != *x => {
                if differing.is_some() {
                    return None;
                }
                differing = Some(v.clone());
            }
            _ => {}
        }
    }
    differing.map(|v| a.without(&v))
}

/// A structural problem found by [`Network::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub element: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

/// Influence diagram over binary variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Network {
    variables: Vec<Variable>,
    influences: BTreeMap<(String, String), Influence>,
    informational: BTreeSet<(String, String)>,
    dependences: BTreeSet<(String, String)>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, var: Variable) -> Result<()> {
        if self.variable(&var.name).is_some() {
            return Err(Error::InvalidNetwork(format!(
                "duplicate variable `{}`",
                var.name
            )));
        }
        self.variables.push(var);
        Ok(())
    }

    /// Adds an influence, merging entries into an existing one for the same pair.
    pub fn add_influence(&mut self, influence: Influence) {
        let influence = explicit_unknown(influence);
        let key = (influence.source.clone(), influence.target.clone());
        match self.influences.get_mut(&key) {
            Some(existing) => {
                let merged = existing
                    .entries
                    .iter()
                    .cloned()
                    .chain(influence.entries)
                    .collect::<Vec<_>>();
                *existing = existing.with_entries(merged);
            }
            None => {
                self.influences.insert(key, influence);
            }
        }
    }

    /// Replaces (or inserts) the influence for its pair.
    pub fn set_influence(&mut self, influence: Influence) {
        let influence = explicit_unknown(influence);
        self.influences.insert(
            (influence.source.clone(), influence.target.clone()),
            influence,
        );
    }

    pub fn remove_influence(&mut self, source: &str, target: &str) -> Option<Influence> {
        self.influences
            .remove(&(source.to_string(), target.to_string()))
    }

    pub fn add_informational(&mut self, source: impl Into<String>, decision: impl Into<String>) {
        self.informational.insert((source.into(), decision.into()));
    }

    pub fn add_dependence(&mut self, a: impl Into<String>, b: impl Into<String>) {
        let (a, b) = (a.into(), b.into());
        let pair = if a <= b { (a, b) } else { (b, a) };
        self.dependences.insert(pair);
    }

    /// Drops a variable with every link touching it. Conditions that mention it are left
    /// to the caller.
    pub fn remove_variable(&mut self, name: &str) {
        self.variables.retain(|v| v.name != name);
        self.influences
            .retain(|(s, t), _| s != name && t != name);
        self.informational.retain(|(s, t)| s != name && t != name);
        self.dependences.retain(|(a, b)| a != name && b != name);
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Variable> {
        self.variable(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn kind(&self, name: &str) -> Option<VarKind> {
        self.variable(name).map(|v| v.kind)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.variable(name).is_some()
    }

    pub fn names_of(&self, kind: VarKind) -> Vec<String> {
        self.variables
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.name.clone())
            .collect()
    }

    pub fn value_node(&self) -> Option<&str> {
        self.variables
            .iter()
            .find(|v| v.kind == VarKind::Value)
            .map(|v| v.name.as_str())
    }

    pub fn influences(&self) -> impl Iterator<Item = &Influence> {
        self.influences.values()
    }

    pub fn influence(&self, source: &str, target: &str) -> Option<&Influence> {
        self.influences
            .get(&(source.to_string(), target.to_string()))
    }

    pub fn influences_into<'a>(&'a self, target: &'a str) -> impl Iterator<Item = &'a Influence> + 'a {
        self.influences.values().filter(move |i| i.target == target)
    }

    pub fn influences_from<'a>(&'a self, source: &'a str) -> impl Iterator<Item = &'a Influence> + 'a {
        self.influences.values().filter(move |i| i.source == source)
    }

    pub fn informational_links(&self) -> &BTreeSet<(String, String)> {
        &self.informational
    }

    pub fn dependences(&self) -> &BTreeSet<(String, String)> {
        &self.dependences
    }

    /// Variables observed when `decision` is made, in network order.
    pub fn info_preds(&self, decision: &str) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .informational
            .iter()
            .filter(|(_, d)| d == decision)
            .map(|(s, _)| s.as_str())
            .collect();
        self.ordered(set)
    }

    /// Decisions that observe `var`.
    pub fn observers(&self, var: &str) -> Vec<String> {
        self.informational
            .iter()
            .filter(|(s, _)| s == var)
            .map(|(_, d)| d.clone())
            .collect()
    }

    /// Direct predecessors in the probabilistic sense: sources of influences into `v`
    /// plus every variable named in those influences' conditions.
    pub fn parents(&self, v: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for inf in self.influences_into(v) {
            out.insert(inf.source.clone());
            out.extend(inf.condition_vars());
        }
        out
    }

    /// [`Network::parents`] in network order.
    pub fn parents_ordered(&self, v: &str) -> Vec<String> {
        let p = self.parents(v);
        self.ordered(p.iter().map(String::as_str).collect())
    }

    /// Nodes having `v` as a parent, plus decisions observing `v`.
    pub fn successors(&self, v: &str) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .influences
            .values()
            .filter(|i| i.source == v || i.entries.iter().any(|(c, _)| c.mentions(v)))
            .map(|i| i.target.clone())
            .collect();
        out.extend(self.observers(v));
        out
    }

    /// True when `v` is named in the condition of any influence.
    pub fn mentioned_in_conditions(&self, v: &str) -> bool {
        self.influences
            .values()
            .any(|i| i.entries.iter().any(|(c, _)| c.mentions(v)))
    }

    fn ordered(&self, set: BTreeSet<&str>) -> Vec<String> {
        self.variables
            .iter()
            .filter(|v| set.contains(v.name.as_str()))
            .map(|v| v.name.clone())
            .collect()
    }

    fn edges(&self) -> BTreeSet<(String, String)> {
        let mut edges = BTreeSet::new();
        for v in &self.variables {
            for p in self.parents(&v.name) {
                edges.insert((p, v.name.clone()));
            }
        }
        edges.extend(self.informational.iter().cloned());
        edges
    }

    /// Kahn's algorithm over influences, condition parents and informational links;
    /// ties broken by name. `Err` carries the variables left on a cycle.
    pub fn topological_order(&self) -> std::result::Result<Vec<String>, Vec<String>> {
        let edges = self.edges();
        let mut indegree: BTreeMap<&str, usize> =
            self.variables.iter().map(|v| (v.name.as_str(), 0)).collect();
        for (_, t) in &edges {
            if let Some(d) = indegree.get_mut(t.as_str()) {
                *d += 1;
            }
        }
        let mut ready: BTreeSet<&str> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&n, _)| n)
            .collect();
        let mut order = Vec::new();
        while let Some(n) = ready.pop_first() {
            order.push(n.to_string());
            for (s, t) in &edges {
                if s == n {
                    if let Some(d) = indegree.get_mut(t.as_str()) {
                        *d -= 1;
                        if *d == 0 {
                            ready.insert(t.as_str());
                        }
                    }
                }
            }
        }
        if order.len() == self.variables.len() {
            Ok(order)
        } else {
            let done: BTreeSet<&String> = order.iter().collect();
            Err(self
                .variables
                .iter()
                .filter(|v| !done.contains(&v.name))
                .map(|v| v.name.clone())
                .collect())
        }
    }

    /// Topological order; panics are avoided by falling back to declaration order on cycles.
    pub fn order(&self) -> Vec<String> {
        self.topological_order()
            .unwrap_or_else(|_| self.variables.iter().map(|v| v.name.clone()).collect())
    }

    /// True when a directed path leads from `from` to `to` (length ≥ 1).
    pub fn has_path(&self, from: &str, to: &str) -> bool {
        let edges = self.edges();
        let mut stack = vec![from.to_string()];
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            for (s, t) in &edges {
                if *s == n && seen.insert(t.clone()) {
                    if t == to {
                        return true;
                    }
                    stack.push(t.clone());
                }
            }
        }
        false
    }

    pub fn label(&self, var: &str, value: bool) -> String {
        match self.variable(var) {
            Some(v) => v.label(value).to_string(),
            None if value => var.to_uppercase(),
            None => format!("~{}", var.to_uppercase()),
        }
    }

    /// `d=D, t=~T`, or `true` for the empty condition.
    pub fn fmt_condition(&self, c: &Condition) -> String {
        if c.is_true() {
            return "true".into();
        }
        c.literals()
            .iter()
            .map(|(v, &b)| format!("{v}={}", self.label(v, b)))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Space-separated literal labels, e.g. `D ~X T`.
    pub fn fmt_literals<'a, I>(&self, lits: I) -> String
    where
        I: IntoIterator<Item = (&'a String, &'a bool)>,
    {
        lits.into_iter()
            .map(|(v, &b)| self.label(v, b))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn fmt_influence(&self, inf: &Influence) -> String {
        let body = if inf.entries.is_empty() {
            "(none)".to_string()
        } else {
            inf.entries
                .iter()
                .map(|(c, s)| {
                    if c.is_true() {
                        s.to_string()
                    } else {
                        format!("{s} | {}", self.fmt_condition(c))
                    }
                })
                .collect::<Vec<_>>()
                .join("; ")
        };
        format!("{} -> {} : {body}", inf.source, inf.target)
    }

    /// Every structural invariant violation; empty for a well-formed network.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |element: String, message: String| out.push(Violation { element, message });

        let values = self.names_of(VarKind::Value);
        match values.len() {
            0 => push("network".into(), "no value node".into()),
            1 => {}
            _ => push(
                "network".into(),
                format!("multiple value nodes: {}", values.join(", ")),
            ),
        }
        let mut names = BTreeSet::new();
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                push(v.name.clone(), "duplicate variable".into());
            }
            if v.true_label == v.false_label {
                push(v.name.clone(), "literal labels must differ".into());
            }
        }

        for inf in self.influences.values() {
            let el = format!("influence {} -> {}", inf.source, inf.target);
            let src = self.variable(&inf.source);
            let dst = self.variable(&inf.target);
            if src.is_none() {
                push(el.clone(), format!("unknown source `{}`", inf.source));
            }
            if dst.is_none() {
                push(el.clone(), format!("unknown target `{}`", inf.target));
            }
            if inf.source == inf.target {
                push(el.clone(), "self-influence".into());
            }
            if src.is_some_and(|v| v.kind == VarKind::Value) {
                push(
                    el.clone(),
                    "influence from the value node is undefined".into(),
                );
            }
            if dst.is_some_and(|v| v.kind == VarKind::Decision) {
                push(
                    el.clone(),
                    format!(
                        "decision `{}` has an incoming influence (only informational links allowed)",
                        inf.target
                    ),
                );
            }
            for (c, _) in &inf.entries {
                for var in c.vars() {
                    match self.variable(var) {
                        None => push(el.clone(), format!("condition names unknown variable `{var}`")),
                        Some(v) if v.kind == VarKind::Value => {
                            push(el.clone(), "condition names the value node".into())
                        }
                        _ => {}
                    }
                    if *var == inf.source || *var == inf.target {
                        push(
                            el.clone(),
                            format!("condition names the influence's own endpoint `{var}`"),
                        );
                    }
                }
            }
            if let Some((i, j)) = inf.overlapping_entries() {
                push(
                    el.clone(),
                    format!(
                        "conditions not mutually exclusive: `{}` and `{}`",
                        self.fmt_condition(&inf.entries[i].0),
                        self.fmt_condition(&inf.entries[j].0)
                    ),
                );
            }
        }

        for (s, d) in &self.informational {
            let el = format!("inform {s} -> {d}");
            match self.variable(s) {
                None => push(el.clone(), format!("unknown source `{s}`")),
                Some(v) if v.kind == VarKind::Value => {
                    push(el.clone(), "the value node cannot be observed".into())
                }
                _ => {}
            }
            match self.variable(d) {
                None => push(el.clone(), format!("unknown target `{d}`")),
                Some(v) if v.kind != VarKind::Decision => push(
                    el.clone(),
                    "informational links must target a decision".into(),
                ),
                _ => {}
            }
        }
        for (a, b) in &self.dependences {
            for n in [a, b] {
                if !self.contains(n) {
                    push(format!("depend {a} -- {b}"), format!("unknown variable `{n}`"));
                }
            }
        }

        if let Err(cycle) = self.topological_order() {
            push("network".into(), format!("cycle through {}", cycle.join(", ")));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Fails with the first violation.
    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidNetwork(v.to_string())),
        }
    }
}

/// Iterates over all `2^vars.len()` assignments; bit `i` of the counter drives `vars[i]`.
pub fn assignments(vars: &[String]) -> impl Iterator<Item = Assignment> + '_ {
    (0..(1u64 << vars.len())).map(move |bits| {
        vars.iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), bits >> i & 1 == 1))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::test_treat;

    fn small() -> Network {
        let mut n = Network::new();
        n.add_variable(Variable::new("a", VarKind::Chance)).unwrap();
        n.add_variable(Variable::new("d", VarKind::Chance)).unwrap();
        n.add_variable(Variable::new("b", VarKind::Chance)).unwrap();
        n.add_variable(Variable::new("u", VarKind::Value)).unwrap();
        n.add_influence(Influence::unconditional("b", "u", Sign::Positive));
        n
    }

    #[test]
    fn overlapping_conditions_are_reported() {
        let mut n = small();
        n.add_influence(Influence::new(
            "a",
            "b",
            [
                (Condition::literal("d", true), Sign::Positive),
                (Condition::truth(), Sign::Negative),
            ],
        ));
        let report = n.validate();
        assert_eq!(report.len(), 1);
        assert!(report[0].message.contains("not mutually exclusive"));
    }

    #[test]
    fn test_treat_is_valid() {
        assert_eq!(test_treat().validate(), vec![]);
    }

    #[test]
    fn influence_from_value_node_is_undefined() {
        let mut n = small();
        n.add_influence(Influence::unconditional("u", "a", Sign::Positive));
        n.add_influence(Influence::unconditional("a", "b", Sign::Positive));
        let report = n.validate();
        assert!(report.iter().any(|v| v.message.contains("undefined")));
        // the back-edge also closes a cycle
        assert!(report.iter().any(|v| v.message.contains("cycle")));
    }

    #[test]
    fn structural_rules() {
        let mut n = Network::new();
        assert_eq!(n.validate()[0].message, "no value node");
        n.add_variable(Variable::new("u", VarKind::Value)).unwrap();
        n.add_variable(Variable::new("v", VarKind::Value)).unwrap();
        n.add_variable(Variable::new("x", VarKind::Decision)).unwrap();
        n.add_variable(Variable::new("c", VarKind::Chance)).unwrap();
        n.add_influence(Influence::unconditional("c", "x", Sign::Positive));
        n.add_informational("x", "c");
        let msgs: Vec<String> = n.validate().into_iter().map(|v| v.message).collect();
        assert!(msgs.iter().any(|m| m.starts_with("multiple value nodes")));
        assert!(msgs.iter().any(|m| m.contains("incoming influence")));
        assert!(msgs.iter().any(|m| m.contains("must target a decision")));
        assert!(msgs.iter().any(|m| m.contains("cycle")));
    }

    #[test]
    fn validate_is_idempotent() {
        let n = test_treat();
        assert_eq!(n.validate(), n.validate());
    }

    #[test]
    fn condition_algebra() {
        let a = Condition::from_literals([("y", true)]);
        let b = Condition::from_literals([("z", false)]);
        let ab = a.conjoin(&b).unwrap();
        assert_eq!(ab.len(), 2);
        assert!(a.conjoin(&Condition::literal("y", false)).is_none());
        assert!(a.excludes(&Condition::literal("y", false)));
        assert!(!a.excludes(&b));
        assert_eq!(ab.restrict("y", true), Some(b.clone()));
        assert_eq!(ab.restrict("y", false), None);
    }

    #[test]
    fn sign_lookup_defaults_to_unknown() {
        let inf = Influence::new("a", "b", [(Condition::literal("y", true), Sign::Positive)]);
        let mut ctx = Assignment::new();
        ctx.insert("y".into(), false);
        assert_eq!(inf.sign_at(&ctx), Sign::Unknown);
        ctx.insert("y".into(), true);
        assert_eq!(inf.sign_at(&ctx), Sign::Positive);
        assert_eq!(inf.sign_over(&Assignment::new()), Sign::Unknown);
    }

    #[test]
    fn simplify_merges_siblings() {
        let inf = Influence::new(
            "a",
            "b",
            [
                (Condition::literal("y", true), Sign::Negative),
                (Condition::literal("y", false), Sign::Negative),
            ],
        );
        assert_eq!(inf.simplified().entries(), &[(Condition::truth(), Sign::Negative)]);
    }
}
