//! Symbolic probabilities.
//!
//! An expression is a polynomial with integer coefficients over atoms
//! `Pr(V | given)`, the probability of a variable's true literal. A false literal
//! is stored as `1 - atom`, so complement elimination happens on construction and
//! two expressions are equal exactly when their polynomials are.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::network::{Assignment, Network};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub var: String,
    pub given: Assignment,
}

impl Atom {
    pub fn new(var: impl Into<String>, given: Assignment) -> Self {
        Atom {
            var: var.into(),
            given,
        }
    }

    /// `Pr(R|D,T)` style text, or the complement when `value` is false.
    pub fn render(&self, net: &Network, value: bool) -> String {
        let head = net.label(&self.var, value);
        if self.given.is_empty() {
            format!("Pr({head})")
        } else {
            let given: Vec<String> = self.given.iter().map(|(v, &b)| net.label(v, b)).collect();
            format!("Pr({head}|{})", given.join(","))
        }
    }
}

/// Sorted multiset of atoms.
type Monomial = Vec<Atom>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymbolicProb {
    terms: BTreeMap<Monomial, i64>,
}

impl SymbolicProb {
    pub fn zero() -> Self {
        SymbolicProb::default()
    }

    pub fn one() -> Self {
        SymbolicProb::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        let mut p = SymbolicProb::zero();
        if c != 0 {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn atom(atom: Atom) -> Self {
        let mut p = SymbolicProb::zero();
        p.terms.insert(vec![atom], 1);
        p
    }

    /// `Pr(var = value | given)`.
    pub fn literal(var: impl Into<String>, value: bool, given: Assignment) -> Self {
        let a = SymbolicProb::atom(Atom::new(var, given));
        if value {
            a
        } else {
            SymbolicProb::one() - a
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == SymbolicProb::one()
    }

    /// Every atom the expression mentions.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self.terms.keys().flatten().cloned().collect();
        out.sort();
        out.dedup();
        out
    }

    /// True when some atom is a probability of `var`.
    pub fn mentions(&self, var: &str) -> bool {
        self.terms.keys().flatten().any(|a| a.var == var)
    }

    pub fn evaluate<F: FnMut(&Atom) -> f64>(&self, mut value: F) -> f64 {
        self.terms
            .iter()
            .map(|(m, &c)| c as f64 * m.iter().map(&mut value).product::<f64>())
            .sum()
    }

    fn insert(&mut self, m: Monomial, c: i64) {
        let slot = self.terms.entry(m).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    // P = P0 + a·P1 when `a` occurs at most linearly.
    fn split_on(&self, a: &Atom) -> Option<(SymbolicProb, SymbolicProb)> {
        let mut p0 = SymbolicProb::zero();
        let mut p1 = SymbolicProb::zero();
        for (m, &c) in &self.terms {
            match m.iter().filter(|x| *x == a).count() {
                0 => p0.insert(m.clone(), c),
                1 => {
                    let rest: Monomial = m.iter().filter(|x| *x != a).cloned().collect();
                    p1.insert(rest, c);
                }
                _ => return None,
            }
        }
        Some((p0, p1))
    }

    /// Signed products of literal probabilities whose sum is the expression.
    pub fn literal_terms(&self) -> Vec<(i64, Vec<(Atom, bool)>)> {
        let Some(a) = self.terms.keys().flatten().min().cloned() else {
            return match self.terms.get(&Vec::new()) {
                Some(&c) => vec![(c, Vec::new())],
                None => Vec::new(),
            };
        };
        let Some((p0, p1)) = self.split_on(&a) else {
            // repeated atom: fall back to plain monomials
            return self
                .terms
                .iter()
                .map(|(m, &c)| (c, m.iter().map(|x| (x.clone(), true)).collect()))
                .collect();
        };
        let prefix = |lit: bool, terms: Vec<(i64, Vec<(Atom, bool)>)>| {
            terms
                .into_iter()
                .map(|(c, mut lits)| {
                    lits.insert(0, (a.clone(), lit));
                    (c, lits)
                })
                .collect::<Vec<_>>()
        };
        if p1.is_zero() {
            return p0.literal_terms();
        }
        if p0.is_zero() {
            return prefix(true, p1.literal_terms());
        }
        let sum = &p0 + &p1;
        if sum.is_zero() {
            return prefix(false, p0.literal_terms());
        }
        let mut out = prefix(false, p0.literal_terms());
        out.extend(prefix(true, sum.literal_terms()));
        out
    }

    pub fn render(&self, net: &Network) -> String {
        let terms = self.literal_terms();
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (c, lits)) in terms.iter().enumerate() {
            let body: Vec<String> = lits.iter().map(|(a, v)| a.render(net, *v)).collect();
            let body = body.join(" ");
            let magnitude = c.unsigned_abs();
            let text = match (magnitude, body.is_empty()) {
                (m, true) => m.to_string(),
                (1, false) => body,
                (m, false) => format!("{m} {body}"),
            };
            match (i, *c < 0) {
                (0, false) => out.push_str(&text),
                (0, true) => out.push_str(&format!("-{text}")),
                (_, false) => out.push_str(&format!(" + {text}")),
                (_, true) => out.push_str(&format!(" - {text}")),
            }
        }
        out
    }
}

impl Add for &SymbolicProb {
    type Output = SymbolicProb;
    fn add(self, rhs: &SymbolicProb) -> SymbolicProb {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.insert(m.clone(), c);
        }
        out
    }
}

impl Add for SymbolicProb {
    type Output = SymbolicProb;
    fn add(self, rhs: SymbolicProb) -> SymbolicProb {
        &self + &rhs
    }
}

impl Neg for SymbolicProb {
    type Output = SymbolicProb;
    fn neg(mut self) -> SymbolicProb {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
        self
    }
}

impl Sub for SymbolicProb {
    type Output = SymbolicProb;
    fn sub(self, rhs: SymbolicProb) -> SymbolicProb {
        &self + &(-rhs)
    }
}

impl Mul for &SymbolicProb {
    type Output = SymbolicProb;
    fn mul(self, rhs: &SymbolicProb) -> SymbolicProb {
        let mut out = SymbolicProb::zero();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &rhs.terms {
                let mut m: Monomial = m1.iter().chain(m2).cloned().collect();
                m.sort();
                out.insert(m, c1 * c2);
            }
        }
        out
    }
}

impl Mul for SymbolicProb {
    type Output = SymbolicProb;
    fn mul(self, rhs: SymbolicProb) -> SymbolicProb {
        &self * &rhs
    }
}

/// Raw polynomial form, e.g. `1 - [d] + [d][r|d,t]`; used for debugging output.
impl fmt::Display for SymbolicProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let atoms: String = m
                    .iter()
                    .map(|a| {
                        if a.given.is_empty() {
                            format!("[{}]", a.var)
                        } else {
                            let g: Vec<String> = a
                                .given
                                .iter()
                                .map(|(v, &b)| if b { v.clone() } else { format!("~{v}") })
                                .collect();
                            format!("[{}|{}]", a.var, g.join(","))
                        }
                    })
                    .collect();
                format!("{c}{atoms}")
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::test_treat;

    fn given(pairs: &[(&str, bool)]) -> Assignment {
        pairs.iter().map(|(v, b)| (v.to_string(), *b)).collect()
    }

    #[test]
    fn complements_sum_to_one() {
        let d = SymbolicProb::literal("d", true, Assignment::new());
        let nd = SymbolicProb::literal("d", false, Assignment::new());
        assert!((&d + &nd).is_one());
    }

    #[test]
    fn shared_factor_complements_cancel() {
        let g = given(&[("d", true), ("t", true)]);
        let pd = SymbolicProb::literal("d", true, Assignment::new());
        let r = SymbolicProb::literal("r", true, g.clone());
        let nr = SymbolicProb::literal("r", false, g);
        assert_eq!(&(&pd * &r) + &(&pd * &nr), pd);
        assert_eq!(pd.clone() - &pd * &r, &pd * &nr);
    }

    #[test]
    fn rendering_recovers_literal_products() {
        let net = test_treat();
        let g = given(&[("d", true), ("t", true)]);
        let p = &SymbolicProb::literal("d", false, Assignment::new())
            * &SymbolicProb::literal("r", false, g);
        assert_eq!(p.render(&net), "Pr(~D) Pr(~R|D,T)");
        assert_eq!(SymbolicProb::one().render(&net), "1");
        assert_eq!(SymbolicProb::literal("d", true, Assignment::new()).render(&net), "Pr(D)");
    }

    #[test]
    fn evaluation_matches_arithmetic() {
        let d = SymbolicProb::literal("d", false, Assignment::new());
        let v = d.evaluate(|_| 0.3);
        assert!((v - 0.7).abs() < 1e-15);
    }

    #[test]
    fn distinct_atoms_are_not_identified() {
        let a = SymbolicProb::literal("r", true, given(&[("d", true)]));
        let b = SymbolicProb::literal("r", true, given(&[("d", false)]));
        assert_ne!(a, b);
        assert!(a.mentions("r") && !a.mentions("d"));
    }
}
