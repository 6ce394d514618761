//! Partial orders induced by influences.
//!
//! Elements are the `2^k` assignments of a node's predecessors. Signed entries
//! orient pairs of assignments that differ in one predecessor; zero entries merge
//! the pair into one equivalence class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{Assignment, Network, VarKind};
use crate::sign::Sign;

/// Largest predecessor count for which an order is built explicitly.
pub const MAX_ORDER_VARS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preference {
    Yes,
    No,
    Equal,
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrder {
    target: String,
    vars: Vec<String>,
    labels: Vec<(String, String)>,
    class_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    /// `(greater, lesser)` class pairs from individual entries.
    edges: BTreeSet<(usize, usize)>,
    /// `reach[a]` holds every class strictly below `a`.
    reach: Vec<Vec<u64>>,
    /// Classes listed so that every class precedes the classes above it.
    bottom_up: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut x = x;
        while self.0[x] != root {
            let next = self.0[x];
            self.0[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(set: &mut [u64], i: usize) {
    set[i / 64] |= 1 << (i % 64);
}

/// Order over the conditional probabilities of a chance node's true literal.
pub fn induced_probability_order(net: &Network, v: &str) -> Result<PartialOrder> {
    if net.require(v)?.kind != VarKind::Chance {
        return Err(Error::InvalidNetwork(format!("`{v}` is not a chance node")));
    }
    if net.parents(v).is_empty() {
        return Err(Error::NoPredecessors(v.into()));
    }
    build(net, v)
}

/// Order over outcome desirability: assignments of the value node's predecessors.
pub fn induced_utility_order(net: &Network) -> Result<PartialOrder> {
    let u = net
        .value_node()
        .ok_or_else(|| Error::InvalidNetwork("no value node".into()))?
        .to_string();
    build(net, &u)
}

fn build(net: &Network, target: &str) -> Result<PartialOrder> {
    let vars = net.parents_ordered(target);
    if vars.len() > MAX_ORDER_VARS {
        return Err(Error::OrderTooLarge(vars.len()));
    }
    let n = 1usize << vars.len();
    let pos: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();

    let mut uf = UnionFind((0..n).collect());
    let mut raw = Vec::new();
    for inf in net.influences_into(target) {
        let p = pos[inf.source.as_str()];
        for (cond, sign) in inf.entries() {
            if *sign == Sign::Unknown {
                continue;
            }
            let fixed: Vec<(usize, bool)> = cond
                .literals()
                .iter()
                .map(|(var, &val)| (pos[var.as_str()], val))
                .collect();
            for hi in (0..n).filter(|i| i >> p & 1 == 1) {
                if fixed.iter().any(|&(i, val)| (hi >> i & 1 == 1) != val) {
                    continue;
                }
                let lo = hi & !(1 << p);
                match sign {
                    Sign::Positive => raw.push((hi, lo)),
                    Sign::Negative => raw.push((lo, hi)),
                    Sign::Zero => uf.union(hi, lo),
                    Sign::Unknown => unreachable!(),
                }
            }
        }
    }

    let mut class_ids = BTreeMap::new();
    let mut class_of = vec![0; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, slot) in class_of.iter_mut().enumerate() {
        let root = uf.find(i);
        let id = *class_ids.entry(root).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[id].push(i);
        *slot = id;
    }
    let edges: BTreeSet<(usize, usize)> = raw
        .into_iter()
        .map(|(a, b)| (class_of[a], class_of[b]))
        .collect();
    let labels = vars
        .iter()
        .map(|v| (net.label(v, true), net.label(v, false)))
        .collect();
    let mut order = PartialOrder {
        target: target.to_string(),
        vars,
        labels,
        class_of,
        members,
        edges,
        reach: Vec::new(),
        bottom_up: Vec::new(),
    };

    if let Some(&(c, _)) = order.edges.iter().find(|(a, b)| a == b) {
        return Err(order.contradiction(c));
    }
    order.bottom_up = order.sort_bottom_up()?;
    order.close();
    Ok(order)
}

impl PartialOrder {
    fn contradiction(&self, class: usize) -> Error {
        Error::Infeasible {
            node: self.target.clone(),
            detail: format!(
                "influences force a strict cycle through `{}`",
                self.class_label(class)
            ),
        }
    }

    fn sort_bottom_up(&self) -> Result<Vec<usize>> {
        let k = self.members.len();
        let mut above_count = vec![0usize; k];
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &(hi, lo) in &self.edges {
            above_count[hi] += 1;
            below[lo].push(hi);
        }
        // Kahn from the bottom: a class is ready once everything it dominates is placed
        let mut ready: BTreeSet<usize> = (0..k).filter(|&c| above_count[c] == 0).collect();
        let mut out = Vec::with_capacity(k);
        while let Some(c) = ready.pop_first() {
            out.push(c);
            for &hi in &below[c] {
                above_count[hi] -= 1;
                if above_count[hi] == 0 {
                    ready.insert(hi);
                }
            }
        }
        if out.len() < k {
            let stuck = (0..k).find(|c| !out.contains(c)).expect("some class left");
            return Err(self.contradiction(stuck));
        }
        Ok(out)
    }

    fn close(&mut self) {
        let k = self.members.len();
        let words = k.div_ceil(64);
        let mut reach = vec![vec![0u64; words]; k];
        let mut lower: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &(hi, lo) in &self.edges {
            lower[hi].push(lo);
        }
        for &c in &self.bottom_up {
            let mut set = vec![0u64; words];
            for &lo in &lower[c] {
                set_bit(&mut set, lo);
                for (w, r) in set.iter_mut().zip(&reach[lo]) {
                    *w |= r;
                }
            }
            reach[c] = set;
        }
        self.reach = reach;
    }

    /// The node whose predecessors the order ranges over.
    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of assignments, `2^k`.
    pub fn element_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    /// Assignment indices in class `c`; bit `i` of an index drives `vars()[i]`.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn class_of_index(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Direct `(greater, lesser)` class pairs.
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    /// Classes with every class placed after all classes below it.
    pub fn bottom_up(&self) -> &[usize] {
        &self.bottom_up
    }

    pub fn assignment(&self, index: usize) -> Assignment {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), index >> i & 1 == 1))
            .collect()
    }

    /// Index of an assignment over exactly the order's variables.
    pub fn index_of(&self, a: &Assignment) -> Result<usize> {
        if a.len() != self.vars.len() || self.vars.iter().any(|v| !a.contains_key(v)) {
            return Err(Error::AssignmentMismatch(format!(
                "expected {{{}}}, got {{{}}}",
                self.vars.join(", "),
                a.keys().cloned().collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| a[*v])
            .fold(0, |acc, (i, _)| acc | 1 << i))
    }

    /// Index of the restriction of `a` to the order's variables; extra keys ignored.
    pub fn index_within(&self, a: &Assignment) -> Result<usize> {
        let restricted: Assignment = self
            .vars
            .iter()
            .filter_map(|v| a.get(v).map(|&b| (v.clone(), b)))
            .collect();
        self.index_of(&restricted)
    }

    /// True when class `a` lies strictly above class `b`.
    pub fn class_above(&self, a: usize, b: usize) -> bool {
        bit(&self.reach[a], b)
    }

    pub fn compare_indices(&self, i: usize, j: usize) -> Preference {
        let (a, b) = (self.class_of[i], self.class_of[j]);
        if a == b {
            Preference::Equal
        } else if self.class_above(a, b) {
            Preference::Yes
        } else if self.class_above(b, a) {
            Preference::No
        } else {
            Preference::Incomparable
        }
    }

    /// Weak preference between assignment indices.
    pub fn weakly_prefers(&self, i: usize, j: usize) -> bool {
        matches!(self.compare_indices(i, j), Preference::Yes | Preference::Equal)
    }

    /// Longest chain of classes strictly above each class.
    pub fn heights_above(&self) -> Vec<usize> {
        let mut upper: Vec<Vec<usize>> = vec![Vec::new(); self.members.len()];
        for &(hi, lo) in &self.edges {
            upper[lo].push(hi);
        }
        let mut above = vec![0usize; self.members.len()];
        for &c in self.bottom_up.iter().rev() {
            above[c] = upper[c].iter().map(|&h| above[h] + 1).max().unwrap_or(0);
        }
        above
    }

    /// Direct edges not implied by a longer path.
    pub fn covering_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .copied()
            .filter(|&(hi, lo)| {
                !self
                    .edges
                    .iter()
                    .any(|&(h, mid)| h == hi && mid != lo && self.class_above(mid, lo))
            })
            .collect()
    }

    pub fn label_index(&self, index: usize) -> String {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, (t, f))| if index >> i & 1 == 1 { t.as_str() } else { f.as_str() })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn class_label(&self, c: usize) -> String {
        let parts: Vec<String> = self.members[c].iter().map(|&i| self.label_index(i)).collect();
        if parts.len() == 1 && parts[0].is_empty() {
            "(empty)".to_string()
        } else {
            parts.join(" = ")
        }
    }

    /// One line per class and one per covering edge.
    pub fn render(&self) -> String {
        let mut out = format!("order on {} over ({})\n", self.target, self.vars.join(", "));
        for &c in self.bottom_up.iter().rev() {
            let _ = writeln!(out, "  [{c}] {}", self.class_label(c));
        }
        for (hi, lo) in self.covering_edges() {
            let _ = writeln!(out, "  [{hi}] > [{lo}]");
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph order {\n  rankdir=TB;\n  node [shape=box];\n");
        for c in 0..self.members.len() {
            let label = self.class_label(c).replace(" = ", "\\n");
            let _ = writeln!(out, "  c{c} [label=\"{label}\"];");
        }
        for (hi, lo) in self.covering_edges() {
            let _ = writeln!(out, "  c{hi} -> c{lo};");
        }
        out.push_str("}\n");
        out
    }
}

/// Compares two assignments in `po`.
pub fn is_preferred(po: &PartialOrder, o1: &Assignment, o2: &Assignment) -> Result<Preference> {
    Ok(po.compare_indices(po.index_of(o1)?, po.index_of(o2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse;
    use crate::models::test_treat;
    use crate::reduction::{reduce_with, ReduceOptions};

    fn a(pairs: &[(&str, bool)]) -> Assignment {
        pairs.iter().map(|(v, b)| (v.to_string(), *b)).collect()
    }

    fn fan_in(signs: &str) -> Network {
        let mut text = String::from("var d : chance\nvar u : value\ninfluence d -> u : +\n");
        for (i, s) in signs.split(',').enumerate() {
            let p = ["a", "b", "c"][i];
            text.push_str(&format!("var {p} : chance\ninfluence {p} -> d : {s}\n"));
        }
        parse(&text).unwrap()
    }

    #[test]
    fn three_positive_parents() {
        let po = induced_probability_order(&fan_in("+,+,+"), "d").unwrap();
        assert_eq!(po.element_count(), 8);
        let abc = a(&[("a", true), ("b", true), ("c", true)]);
        let nabc = a(&[("a", false), ("b", true), ("c", true)]);
        assert_eq!(is_preferred(&po, &abc, &nabc).unwrap(), Preference::Yes);
        assert_eq!(is_preferred(&po, &nabc, &abc).unwrap(), Preference::No);
        assert_eq!(is_preferred(&po, &abc, &abc).unwrap(), Preference::Equal);
    }

    #[test]
    fn zero_influence_merges() {
        let po = induced_probability_order(&fan_in("0"), "d").unwrap();
        assert_eq!(po.class_count(), 1);
        assert_eq!(po.element_count(), 2);
    }

    #[test]
    fn crossed_assignments_are_incomparable() {
        // brute force on the 2-cube: AB̄ and ĀB share no monotone path
        let po = induced_probability_order(&fan_in("+,+"), "d").unwrap();
        let x = a(&[("a", true), ("b", false)]);
        let y = a(&[("a", false), ("b", true)]);
        assert_eq!(is_preferred(&po, &x, &y).unwrap(), Preference::Incomparable);
        assert_eq!(po.covering_edges().len(), 4);
    }

    #[test]
    fn assignment_must_match_variables() {
        let po = induced_probability_order(&fan_in("+,+"), "d").unwrap();
        let partial = a(&[("a", true)]);
        assert!(matches!(
            is_preferred(&po, &partial, &partial),
            Err(Error::AssignmentMismatch(_))
        ));
    }

    #[test]
    fn root_nodes_have_no_order() {
        let net = fan_in("+");
        assert!(matches!(
            induced_probability_order(&net, "a"),
            Err(Error::NoPredecessors(_))
        ));
    }

    #[test]
    fn cure_is_irrelevant_without_disease() {
        let po = induced_utility_order(&test_treat()).unwrap();
        let base = [("d", false), ("y", false), ("z", false)];
        let mut with = base.to_vec();
        with.push(("c", true));
        let mut without = base.to_vec();
        without.push(("c", false));
        assert_eq!(is_preferred(&po, &a(&with), &a(&without)).unwrap(), Preference::Equal);
        // with disease, cure helps
        let sick: Vec<_> = with.iter().map(|&(v, b)| (v, if v == "d" { true } else { b })).collect();
        let sick_uncured: Vec<_> = without.iter().map(|&(v, b)| (v, if v == "d" { true } else { b })).collect();
        assert_eq!(is_preferred(&po, &a(&sick), &a(&sick_uncured)).unwrap(), Preference::Yes);
    }

    #[test]
    fn reduced_test_treat_order() {
        let (reduced, _) = reduce_with(&test_treat(), ReduceOptions::splice_only()).unwrap();
        let po = induced_utility_order(&reduced).unwrap();
        let best = a(&[("d", false), ("x", false), ("t", false)]);
        let best_idx = po.index_of(&best).unwrap();
        for i in 0..po.element_count() {
            assert!(po.compare_indices(i, best_idx) != Preference::Yes);
        }
        let sick_tested = a(&[("d", true), ("x", false), ("t", true)]);
        let well_tested = a(&[("d", false), ("x", false), ("t", true)]);
        assert_eq!(is_preferred(&po, &well_tested, &sick_tested).unwrap(), Preference::Yes);
    }

    #[test]
    fn contradictory_signs_are_infeasible() {
        let net = parse(
            "var a : chance\nvar b : chance\nvar d : chance\nvar u : value\n\
             influence a -> d : + | b=B\ninfluence a -> d : - | b=~B\ninfluence b -> d : 0\n\
             influence d -> u : +\n",
        )
        .unwrap();
        assert!(matches!(
            induced_probability_order(&net, "d"),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn dot_lists_classes_and_covers() {
        let po = induced_probability_order(&fan_in("+,+"), "d").unwrap();
        let dot = po.to_dot();
        assert!(dot.starts_with("digraph order {"));
        assert_eq!(dot.matches("->").count(), 4);
    }
}
