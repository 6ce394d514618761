//! Numeric ground truth.
//!
//! Concrete models are sampled so that every signed influence holds with a
//! margin, then evaluated by exhaustive enumeration of the chance variables.
//! Decisions are set from outside, never sampled.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{assignments, Assignment, Network, VarKind};
use crate::order::{induced_probability_order, induced_utility_order, PartialOrder};
use crate::reduction::{replay, ReductionStep};
use crate::sign::Sign;
use crate::strategy::{Plan, Strategy, Weight};
use crate::symbolic::Atom;

/// Most chance variables the oracle enumerates exhaustively.
pub const MAX_ORACLE_VARS: usize = 20;

/// Absolute slack for numeric comparisons.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: usize,
    /// Minimum gap enforced by every strict inequality.
    pub epsilon: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            samples: 1000,
            epsilon: 0.01,
        }
    }
}

impl SamplerConfig {
    pub fn new(seed: u64, samples: usize) -> Self {
        SamplerConfig {
            seed,
            samples,
            ..Default::default()
        }
    }
}

/// Values indexed by parent assignment; bit `i` of the index is `parents[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub parents: Vec<String>,
    pub values: Vec<f64>,
}

impl Table {
    fn index(&self, ctx: &Assignment) -> usize {
        self.parents
            .iter()
            .enumerate()
            .filter(|(_, p)| ctx.get(*p).copied().unwrap_or(false))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn get(&self, ctx: &Assignment) -> f64 {
        self.values[self.index(ctx)]
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Compiled {
    // chance variables in topological order: (bit, parent bits, probability of true)
    chance: Vec<(usize, Vec<usize>, Vec<f64>)>,
    chance_bits: Vec<usize>,
    utility_parents: Vec<usize>,
    utility: Vec<f64>,
}

fn table_index(world: u64, parents: &[usize]) -> usize {
    parents
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | ((world >> b & 1) as usize) << i)
}

/// A fully numeric model: one conditional probability table per chance variable
/// and a utility table over the value node's predecessors.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcreteModel {
    /// Non-value variables in network order; position is the bit in a world mask.
    vars: Vec<String>,
    cpts: BTreeMap<String, Table>,
    utility: Table,
    /// Margin the sampler actually enforced.
    pub epsilon: f64,
    compiled: Compiled,
}

impl ConcreteModel {
    /// Assembles a model from explicit tables; `vars` lists every non-value variable.
    pub fn from_tables(
        vars: Vec<String>,
        cpts: BTreeMap<String, Table>,
        utility: Table,
        epsilon: f64,
    ) -> Result<Self> {
        let bit = |name: &str| {
            vars.iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        // topological order over the tables themselves
        let mut chance = Vec::new();
        let mut placed: Vec<&str> = Vec::new();
        while placed.len() < cpts.len() {
            let before = placed.len();
            for (name, t) in &cpts {
                if placed.contains(&name.as_str()) {
                    continue;
                }
                let ready = t
                    .parents
                    .iter()
                    .all(|p| !cpts.contains_key(p) || placed.contains(&p.as_str()));
                if ready {
                    let parents = t.parents.iter().map(|p| bit(p)).collect::<Result<Vec<_>>>()?;
                    if t.values.len() != 1 << parents.len() {
                        return Err(Error::InvalidNetwork(format!("table for `{name}` has the wrong size")));
                    }
                    chance.push((bit(name)?, parents, t.values.clone()));
                    placed.push(name);
                }
            }
            if placed.len() == before {
                return Err(Error::InvalidNetwork("probability tables form a cycle".into()));
            }
        }
        let chance_bits = chance.iter().map(|(b, _, _)| *b).collect();
        let utility_parents = utility.parents.iter().map(|p| bit(p)).collect::<Result<Vec<_>>>()?;
        if utility.values.len() != 1 << utility_parents.len() {
            return Err(Error::InvalidNetwork("utility table has the wrong size".into()));
        }
        let compiled = Compiled {
            chance,
            chance_bits,
            utility_parents,
            utility: utility.values.clone(),
        };
        Ok(ConcreteModel {
            vars,
            cpts,
            utility,
            epsilon,
            compiled,
        })
    }

    pub fn cpt(&self, var: &str) -> Option<&Table> {
        self.cpts.get(var)
    }

    pub fn utility_table(&self) -> &Table {
        &self.utility
    }

    /// `Pr(var = true | parents)` read from the table.
    pub fn prob_true(&self, var: &str, ctx: &Assignment) -> f64 {
        self.cpts[var].get(ctx)
    }

    pub fn utility(&self, ctx: &Assignment) -> f64 {
        self.utility.get(ctx)
    }

    fn bit(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn scatter(&self, idx: u64) -> u64 {
        self.compiled
            .chance_bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (idx >> i & 1) << b)
    }

    fn joint(&self, world: u64) -> f64 {
        self.compiled
            .chance
            .iter()
            .map(|(b, parents, probs)| {
                let p = probs[table_index(world, parents)];
                if world >> b & 1 == 1 {
                    p
                } else {
                    1.0 - p
                }
            })
            .product()
    }

    fn world_utility(&self, world: u64) -> f64 {
        self.compiled.utility[table_index(world, &self.compiled.utility_parents)]
    }

    fn worlds_given(&self, given: &Assignment) -> Result<Vec<u64>> {
        let mut mask = 0u64;
        let mut bits = 0u64;
        let mut decisions = 0u64;
        for (v, &val) in given {
            let b = self.bit(v).ok_or_else(|| Error::UnknownVariable(v.clone()))?;
            if self.cpts.contains_key(v) {
                mask |= 1 << b;
                bits |= (val as u64) << b;
            } else if val {
                decisions |= 1 << b;
            }
        }
        let n = self.compiled.chance_bits.len();
        Ok((0..1u64 << n)
            .map(|i| self.scatter(i) | decisions)
            .filter(|w| w & mask == bits)
            .collect())
    }

    /// `Pr(var = value | given)`; decisions absent from `given` take their false literal.
    pub fn conditional(&self, var: &str, value: bool, given: &Assignment) -> Result<f64> {
        let b = self.bit(var).ok_or_else(|| Error::UnknownVariable(var.into()))?;
        let worlds = self.worlds_given(given)?;
        let (mut num, mut den) = (0.0, 0.0);
        for w in worlds {
            let p = self.joint(w);
            den += p;
            if (w >> b & 1 == 1) == value {
                num += p;
            }
        }
        Ok(num / den)
    }

    /// Expected utility given an assignment, decisions handled as in [`Self::conditional`].
    pub fn conditional_utility(&self, given: &Assignment) -> Result<f64> {
        let worlds = self.worlds_given(given)?;
        let (mut num, mut den) = (0.0, 0.0);
        for w in worlds {
            let p = self.joint(w);
            den += p;
            num += p * self.world_utility(w);
        }
        Ok(num / den)
    }

    pub fn atom_value(&self, atom: &Atom) -> Result<f64> {
        self.conditional(&atom.var, true, &atom.given)
    }

    /// One `p` line per table row, one `u` line per utility row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vars {}", self.vars.join(" "));
        let _ = writeln!(out, "epsilon {}", self.epsilon);
        let ctx = |parents: &[String], i: usize| {
            parents
                .iter()
                .enumerate()
                .map(|(k, p)| format!(" {p}={}", i >> k & 1))
                .collect::<String>()
        };
        for v in &self.vars {
            if let Some(t) = self.cpts.get(v) {
                for (i, x) in t.values.iter().enumerate() {
                    let _ = writeln!(out, "p {v} |{} = {x}", ctx(&t.parents, i));
                }
            }
        }
        for (i, x) in self.utility.values.iter().enumerate() {
            let _ = writeln!(out, "u{} = {x}", ctx(&self.utility.parents, i));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |no: usize, msg: &str| {
            Error::Parse(crate::error::ParseError::new(no + 1, msg.to_string()))
        };
        let mut vars = Vec::new();
        let mut epsilon = 0.0;
        let mut rows: BTreeMap<String, Vec<(Vec<(String, bool)>, f64)>> = BTreeMap::new();
        let mut urows = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("vars") {
                vars = rest.split_whitespace().map(String::from).collect();
                continue;
            }
            if let Some(rest) = line.strip_prefix("epsilon") {
                epsilon = rest.trim().parse().map_err(|_| bad(no, "bad epsilon"))?;
                continue;
            }
            let (lhs, value) = line.rsplit_once('=').ok_or_else(|| bad(no, "expected `= VALUE`"))?;
            let value: f64 = value.trim().parse().map_err(|_| bad(no, "bad number"))?;
            let parse_ctx = |s: &str| -> Result<Vec<(String, bool)>> {
                s.split_whitespace()
                    .map(|kv| {
                        let (k, v) = kv.split_once('=').ok_or_else(|| bad(no, "expected VAR=0|1"))?;
                        Ok((k.to_string(), v == "1"))
                    })
                    .collect()
            };
            if line.starts_with("p ") {
                let body = lhs.trim_start_matches("p ").trim();
                let (var, ctx) = body.split_once('|').ok_or_else(|| bad(no, "expected `p VAR | ...`"))?;
                rows.entry(var.trim().to_string())
                    .or_default()
                    .push((parse_ctx(ctx)?, value));
            } else if line.starts_with('u') {
                urows.push((parse_ctx(lhs.trim_start_matches('u'))?, value));
            } else {
                return Err(bad(no, "unknown line"));
            }
        }
        let table = |rows: Vec<(Vec<(String, bool)>, f64)>| -> Table {
            let parents: Vec<String> = rows
                .first()
                .map(|(c, _)| c.iter().map(|(k, _)| k.clone()).collect())
                .unwrap_or_default();
            let mut values = vec![0.0; rows.len().max(1)];
            for (ctx, x) in rows {
                let i = ctx
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (k, (_, b))| acc | (*b as usize) << k);
                values[i] = x;
            }
            Table { parents, values }
        };
        let cpts = rows.into_iter().map(|(v, r)| (v, table(r))).collect();
        ConcreteModel::from_tables(vars, cpts, table(urows), epsilon)
    }

    /// Independent re-check of every signed influence and of the utility order's
    /// equalities and strict edges; returns one message per violated constraint.
    pub fn check_constraints(&self, net: &Network) -> Vec<String> {
        let mut out = Vec::new();
        let margin = self.epsilon - TOLERANCE;
        let value = net.value_node().map(str::to_string);
        for inf in net.influences() {
            let is_value = Some(&inf.target) == value.as_ref();
            let table = if is_value {
                &self.utility
            } else {
                match self.cpts.get(&inf.target) {
                    Some(t) => t,
                    None => continue,
                }
            };
            let others: Vec<String> = table
                .parents
                .iter()
                .filter(|p| **p != inf.source)
                .cloned()
                .collect();
            for ctx in assignments(&others) {
                let sign = inf.sign_at(&ctx);
                let mut hi = ctx.clone();
                hi.insert(inf.source.clone(), true);
                let mut lo = ctx.clone();
                lo.insert(inf.source.clone(), false);
                let diff = table.get(&hi) - table.get(&lo);
                let ok = match sign {
                    Sign::Positive => diff >= margin,
                    Sign::Negative => diff <= -margin,
                    Sign::Zero => diff.abs() <= TOLERANCE,
                    Sign::Unknown => true,
                };
                if !ok {
                    out.push(format!(
                        "{} -> {} : {sign} violated at {} (difference {diff})",
                        inf.source,
                        inf.target,
                        net.fmt_literals(ctx.iter())
                    ));
                }
            }
        }
        for t in self.cpts.values() {
            for &x in &t.values {
                if !(x > 0.0 && x < 1.0) {
                    out.push(format!("probability {x} outside (0, 1)"));
                }
            }
        }
        out
    }
}

// Exponent applied to uniform draws; skewed shapes reach near-ties and extremes
// that uniform filling almost never produces.
fn draw_shape(rng: &mut ChaCha8Rng) -> f64 {
    [1.0, 1.0, 0.25, 4.0, 12.0][rng.gen_range(0..5)]
}

fn fill(order: &PartialOrder, rng: &mut ChaCha8Rng, epsilon: f64) -> (Vec<f64>, f64) {
    let above = order.heights_above();
    let tallest = above.iter().copied().max().unwrap_or(0);
    let eps = epsilon.min(1.0 / (2.0 * (tallest as f64 + 2.0)));
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); order.class_count()];
    for &(hi, lo) in order.edges() {
        below[hi].push(lo);
    }
    let shape = draw_shape(rng);
    let mut class_value = vec![0.0; order.class_count()];
    for &c in order.bottom_up() {
        let floor = below[c]
            .iter()
            .map(|&l| class_value[l] + eps)
            .fold(eps, f64::max);
        let ceiling = 1.0 - eps * (above[c] as f64 + 1.0);
        class_value[c] = if ceiling > floor {
            floor + (ceiling - floor) * rng.gen::<f64>().powf(shape)
        } else {
            floor
        };
    }
    let values = (0..order.element_count())
        .map(|i| class_value[order.class_of_index(i)])
        .collect();
    (values, eps)
}

/// Deterministic in `(cfg.seed, index)`.
pub fn sample_model(net: &Network, cfg: &SamplerConfig, index: usize) -> Result<ConcreteModel> {
    net.ensure_valid()?;
    let chance: Vec<String> = net
        .order()
        .into_iter()
        .filter(|v| net.kind(v) == Some(VarKind::Chance))
        .collect();
    if chance.len() > MAX_ORACLE_VARS {
        return Err(Error::TooLarge(chance.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let mut epsilon = cfg.epsilon;
    let mut cpts = BTreeMap::new();
    for v in &chance {
        let parents = net.parents_ordered(v);
        let values = if parents.is_empty() {
            let shape = draw_shape(&mut rng);
            let u = rng.gen::<f64>().powf(shape);
            vec![cfg.epsilon + (1.0 - 2.0 * cfg.epsilon) * if rng.gen() { u } else { 1.0 - u }]
        } else {
            let (values, eps) = fill(&induced_probability_order(net, v)?, &mut rng, cfg.epsilon);
            epsilon = epsilon.min(eps);
            values
        };
        cpts.insert(v.clone(), Table { parents, values });
    }
    let po = induced_utility_order(net)?;
    let (values, eps) = fill(&po, &mut rng, cfg.epsilon);
    epsilon = epsilon.min(eps);
    let utility = Table {
        parents: po.vars().to_vec(),
        values,
    };
    let vars = net
        .variables()
        .iter()
        .filter(|v| v.kind != VarKind::Value)
        .map(|v| v.name.clone())
        .collect();
    ConcreteModel::from_tables(vars, cpts, utility, epsilon)
}

/// A strategy compiled to the worlds it produces, one per chance assignment.
#[derive(Clone, Debug)]
pub struct CompiledStrategy {
    worlds: Vec<u64>,
}

/// Evaluates many strategies against many models of one network.
#[derive(Clone, Debug)]
pub struct Evaluator {
    vars: Vec<String>,
    chance: Vec<String>,
}

impl Evaluator {
    pub fn new(net: &Network) -> Result<Self> {
        let vars: Vec<String> = net
            .variables()
            .iter()
            .filter(|v| v.kind != VarKind::Value)
            .map(|v| v.name.clone())
            .collect();
        let chance: Vec<String> = net
            .order()
            .into_iter()
            .filter(|v| net.kind(v) == Some(VarKind::Chance))
            .collect();
        if chance.len() > MAX_ORACLE_VARS {
            return Err(Error::TooLarge(chance.len()));
        }
        Ok(Evaluator { vars, chance })
    }

    pub fn compile(&self, s: &Strategy) -> Result<CompiledStrategy> {
        let bit = |v: &str| self.vars.iter().position(|x| x == v).expect("known variable");
        let mut worlds = Vec::with_capacity(1 << self.chance.len());
        for a in assignments(&self.chance) {
            let decided = s.decide(&a)?;
            let w = a
                .iter()
                .chain(decided.iter())
                .filter(|(_, &b)| b)
                .fold(0u64, |acc, (v, _)| acc | 1 << bit(v));
            worlds.push(w);
        }
        Ok(CompiledStrategy { worlds })
    }

    pub fn expected_utility(&self, model: &ConcreteModel, s: &CompiledStrategy) -> f64 {
        s.worlds
            .iter()
            .map(|&w| model.joint(w) * model.world_utility(w))
            .sum()
    }

    pub fn plan_utility(&self, model: &ConcreteModel, plan: &Plan) -> Result<f64> {
        match plan {
            Plan::Pure(s) => Ok(self.expected_utility(model, &self.compile(s)?)),
            Plan::Mixed(m) => {
                let mut total = 0.0;
                for (s, w) in &m.components {
                    let weight = weight_value(model, w)?;
                    total += weight * self.expected_utility(model, &self.compile(s)?);
                }
                Ok(total)
            }
        }
    }
}

pub fn weight_value(model: &ConcreteModel, w: &Weight) -> Result<f64> {
    match w {
        Weight::Numeric(x) => Ok(*x),
        Weight::Symbolic(p) => {
            let mut err = None;
            let v = p.evaluate(|a| match model.atom_value(a) {
                Ok(x) => x,
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            });
            match err {
                Some(e) => Err(Error::UnresolvableWeight(e.to_string())),
                None => Ok(v),
            }
        }
    }
}

/// Exact expected utility of a pure or mixed strategy.
pub fn expected_utility(model: &ConcreteModel, net: &Network, plan: &Plan) -> Result<f64> {
    Evaluator::new(net)?.plan_utility(model, plan)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericViolation {
    pub index: usize,
    pub eu_a: f64,
    pub eu_b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericCheck {
    pub samples: usize,
    /// Samples where the first plan is strictly better.
    pub strict: usize,
    pub violation: Option<NumericViolation>,
}

impl NumericCheck {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Whether `a` is at least as good as `b` in every sampled model.
pub fn check_dominance_numeric(
    net: &Network,
    cfg: &SamplerConfig,
    a: &Plan,
    b: &Plan,
) -> Result<NumericCheck> {
    let ev = Evaluator::new(net)?;
    let mut strict = 0;
    for i in 0..cfg.samples {
        let model = sample_model(net, cfg, i)?;
        let eu_a = ev.plan_utility(&model, a)?;
        let eu_b = ev.plan_utility(&model, b)?;
        if eu_a < eu_b - TOLERANCE {
            return Ok(NumericCheck {
                samples: i + 1,
                strict,
                violation: Some(NumericViolation { index: i, eu_a, eu_b }),
            });
        }
        if eu_a > eu_b + TOLERANCE {
            strict += 1;
        }
    }
    Ok(NumericCheck {
        samples: cfg.samples,
        strict,
        violation: None,
    })
}

/// Models sampled once and reused across many comparisons; expected utilities
/// and atom values are cached per strategy and per atom.
pub struct SampleBank {
    pub cfg: SamplerConfig,
    models: Vec<ConcreteModel>,
    evaluator: Evaluator,
    eu_cache: RefCell<HashMap<Strategy, Rc<Vec<f64>>>>,
    atom_cache: RefCell<HashMap<Atom, Rc<Vec<f64>>>>,
}

impl SampleBank {
    pub fn new(net: &Network, cfg: SamplerConfig) -> Result<Self> {
        let models = (0..cfg.samples)
            .map(|i| sample_model(net, &cfg, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleBank {
            cfg,
            models,
            evaluator: Evaluator::new(net)?,
            eu_cache: RefCell::default(),
            atom_cache: RefCell::default(),
        })
    }

    pub fn models(&self) -> &[ConcreteModel] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Expected utility of `s` in every sampled model.
    pub fn eu(&self, s: &Strategy) -> Result<Rc<Vec<f64>>> {
        if let Some(v) = self.eu_cache.borrow().get(s) {
            return Ok(v.clone());
        }
        let compiled = self.evaluator.compile(s)?;
        let values: Rc<Vec<f64>> = Rc::new(
            self.models
                .iter()
                .map(|m| self.evaluator.expected_utility(m, &compiled))
                .collect(),
        );
        self.eu_cache.borrow_mut().insert(s.clone(), values.clone());
        Ok(values)
    }

    fn atom(&self, a: &Atom) -> Result<Rc<Vec<f64>>> {
        if let Some(v) = self.atom_cache.borrow().get(a) {
            return Ok(v.clone());
        }
        let values: Rc<Vec<f64>> = Rc::new(
            self.models
                .iter()
                .map(|m| m.atom_value(a))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::UnresolvableWeight(e.to_string()))?,
        );
        self.atom_cache.borrow_mut().insert(a.clone(), values.clone());
        Ok(values)
    }

    /// A weight's value in every sampled model.
    pub fn weight(&self, w: &Weight) -> Result<Vec<f64>> {
        match w {
            Weight::Numeric(x) => Ok(vec![*x; self.models.len()]),
            Weight::Symbolic(p) => {
                let atoms = p.atoms();
                let columns = atoms.iter().map(|a| self.atom(a)).collect::<Result<Vec<_>>>()?;
                Ok((0..self.models.len())
                    .map(|i| {
                        p.evaluate(|a| {
                            let k = atoms.iter().position(|x| x == a).expect("listed atom");
                            columns[k][i]
                        })
                    })
                    .collect())
            }
        }
    }

    pub fn plan_eu(&self, plan: &Plan) -> Result<Vec<f64>> {
        match plan {
            Plan::Pure(s) => Ok(self.eu(s)?.to_vec()),
            Plan::Mixed(m) => {
                let mut total = vec![0.0; self.models.len()];
                for (s, w) in &m.components {
                    let eu = self.eu(s)?;
                    for (t, (e, x)) in total.iter_mut().zip(eu.iter().zip(self.weight(w)?)) {
                        *t += x * e;
                    }
                }
                Ok(total)
            }
        }
    }

    /// Whether `a` is at least as good as `b` in every banked model.
    pub fn compare(&self, a: &Plan, b: &Plan) -> Result<NumericCheck> {
        Ok(compare_columns(&self.plan_eu(a)?, &self.plan_eu(b)?))
    }
}

/// Sample-wise comparison of two expected-utility columns.
pub fn compare_columns(a: &[f64], b: &[f64]) -> NumericCheck {
    let mut strict = 0;
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        if x < y - TOLERANCE {
            return NumericCheck {
                samples: a.len(),
                strict,
                violation: Some(NumericViolation { index: i, eu_a: x, eu_b: y }),
            };
        }
        if x > y + TOLERANCE {
            strict += 1;
        }
    }
    NumericCheck {
        samples: a.len(),
        strict,
        violation: None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignWitness {
    pub index: usize,
    pub context: Assignment,
    pub difference: f64,
}

/// Numeric tally for one entry of one reduced influence.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkCheck {
    pub source: String,
    pub target: String,
    pub condition: String,
    pub sign: Sign,
    /// Contexts checked across all samples.
    pub checked: usize,
    pub increases: usize,
    pub decreases: usize,
    pub violations: Vec<SignWitness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport {
    pub samples: usize,
    pub links: Vec<LinkCheck>,
}

impl ReductionReport {
    pub fn violation_count(&self) -> usize {
        self.links.iter().map(|l| l.violations.len()).sum()
    }

    pub fn render(&self) -> String {
        let mut out = format!("sign verification over {} sampled models\n", self.samples);
        for l in &self.links {
            let status = if l.violations.is_empty() { "ok" } else { "VIOLATED" };
            let _ = writeln!(
                out,
                "  {} -> {} : {} | {}  {status}  ({} contexts, {} up, {} down)",
                l.source, l.target, l.sign, l.condition, l.checked, l.increases, l.decreases
            );
            for w in l.violations.iter().take(3) {
                let ctx: Vec<String> = w.context.iter().map(|(k, v)| format!("{k}={}", *v as u8)).collect();
                let _ = writeln!(
                    out,
                    "    model {} at [{}]: difference {:.3e}",
                    w.index,
                    ctx.join(" "),
                    w.difference
                );
            }
        }
        out
    }
}

/// Checks every signed entry of `reduced` against models sampled from `net`.
///
/// For a link `s -> t` the context ranges over the other predecessors of `t` in
/// the reduced network plus every decision of the original network.
pub fn verify_reduction_signs(
    net: &Network,
    reduced: &Network,
    log: &[ReductionStep],
    cfg: &SamplerConfig,
) -> Result<ReductionReport> {
    if replay(net, log)? != *reduced {
        return Err(Error::InvalidNetwork(
            "step log does not reproduce the reduced network".into(),
        ));
    }
    let value = net.value_node().map(str::to_string);
    let decisions = net.names_of(VarKind::Decision);
    struct Pending<'a> {
        link: LinkCheck,
        contexts: Vec<Assignment>,
        source: &'a str,
        target: &'a str,
    }
    let mut plans = Vec::new();
    for inf in reduced.influences() {
        let mut others: Vec<String> = reduced
            .parents_ordered(&inf.target)
            .into_iter()
            .filter(|p| *p != inf.source)
            .collect();
        for d in &decisions {
            if !others.contains(d) && *d != inf.source && reduced.kind(d) != Some(VarKind::Value) {
                others.push(d.clone());
            }
        }
        for (cond, sign) in inf.entries() {
            let contexts: Vec<Assignment> = assignments(&others)
                .filter(|a| cond.holds_in(a))
                .collect();
            plans.push(Pending {
                link: LinkCheck {
                    source: inf.source.clone(),
                    target: inf.target.clone(),
                    condition: reduced.fmt_condition(cond),
                    sign: *sign,
                    checked: 0,
                    increases: 0,
                    decreases: 0,
                    violations: Vec::new(),
                },
                contexts,
                source: &inf.source,
                target: &inf.target,
            });
        }
    }
    for i in 0..cfg.samples {
        let model = sample_model(net, cfg, i)?;
        for plan in &mut plans {
            for ctx in &plan.contexts {
                let mut hi = ctx.clone();
                hi.insert(plan.source.to_string(), true);
                let mut lo = ctx.clone();
                lo.insert(plan.source.to_string(), false);
                let diff = if Some(plan.target) == value.as_deref() {
                    model.conditional_utility(&hi)? - model.conditional_utility(&lo)?
                } else {
                    model.conditional(plan.target, true, &hi)?
                        - model.conditional(plan.target, true, &lo)?
                };
                let link = &mut plan.link;
                link.checked += 1;
                if diff > TOLERANCE {
                    link.increases += 1;
                } else if diff < -TOLERANCE {
                    link.decreases += 1;
                }
                let ok = match link.sign {
                    Sign::Positive => diff >= -TOLERANCE,
                    Sign::Negative => diff <= TOLERANCE,
                    Sign::Zero => diff.abs() <= TOLERANCE,
                    Sign::Unknown => true,
                };
                if !ok {
                    link.violations.push(SignWitness {
                        index: i,
                        context: ctx.clone(),
                        difference: diff,
                    });
                }
            }
        }
    }
    Ok(ReductionReport {
        samples: cfg.samples,
        links: plans.into_iter().map(|p| p.link).collect(),
    })
}
