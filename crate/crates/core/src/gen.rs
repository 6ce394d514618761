//! Random small networks for property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{Condition, Influence, Network, VarKind, Variable};
use crate::oracle::{sample_model, SamplerConfig};
use crate::order::induced_utility_order;
use crate::sign::Sign;
use crate::strategy::{analysis_network, enumerate_strategies};

/// Largest network `random_network` builds, value node included.
pub const MAX_GENERATED_VARS: usize = 6;

const SIGNS: [Sign; 4] = [Sign::Positive, Sign::Negative, Sign::Zero, Sign::Unknown];

fn draft(rng: &mut ChaCha8Rng) -> Network {
    let decisions = rng.gen_range(1..=2);
    let chance = rng.gen_range(1..=MAX_GENERATED_VARS - 1 - decisions);
    let mut names: Vec<(String, VarKind)> = (0..decisions)
        .map(|i| (format!("d{i}"), VarKind::Decision))
        .chain((0..chance).map(|i| (format!("c{i}"), VarKind::Chance)))
        .collect();
    names.shuffle(rng);

    let mut net = Network::new();
    for (name, kind) in &names {
        net.add_variable(Variable::new(name.clone(), *kind)).expect("fresh name");
    }
    net.add_variable(Variable::new("u", VarKind::Value)).expect("fresh name");

    // earlier names precede later ones in every link, so the graph stays acyclic
    for (j, (target, kind)) in names.iter().enumerate() {
        for (source, _) in &names[..j] {
            match kind {
                VarKind::Decision => {
                    if rng.gen_bool(0.4) {
                        net.add_informational(source.clone(), target.clone());
                    }
                }
                _ if rng.gen_bool(0.45) => {
                    let inf = influence(rng, &names[..j], source, target);
                    net.add_influence(inf);
                }
                _ => {}
            }
        }
    }
    let mut into_value = 0;
    for (source, _) in &names {
        if rng.gen_bool(0.6) {
            let inf = influence(rng, &names, source, "u");
            net.add_influence(inf);
            into_value += 1;
        }
    }
    if into_value == 0 {
        let (source, _) = names.choose(rng).expect("non-empty");
        net.add_influence(Influence::unconditional(source.clone(), "u", sign(rng)));
    }
    net
}

fn sign(rng: &mut ChaCha8Rng) -> Sign {
    *SIGNS.choose(rng).expect("non-empty")
}

fn influence(
    rng: &mut ChaCha8Rng,
    earlier: &[(String, VarKind)],
    source: &str,
    target: &str,
) -> Influence {
    let s1 = sign(rng);
    let s2 = sign(rng);
    let pivots: Vec<&String> = earlier.iter().map(|(n, _)| n).filter(|n| *n != source && *n != target).collect();
    match pivots.choose(rng) {
        Some(&c) if rng.gen_bool(0.2) => Influence::new(
            source,
            target,
            [(Condition::literal(c.clone(), true), s1), (Condition::literal(c.clone(), false), s2)],
        ),
        _ => Influence::unconditional(source, target, s1),
    }
}

fn usable(net: &Network) -> bool {
    net.is_valid()
        && sample_model(net, &SamplerConfig::new(0, 1), 0).is_ok()
        && analysis_network(net)
            .and_then(|a| {
                induced_utility_order(&a)?;
                enumerate_strategies(&a)
            })
            .is_ok()
}

/// A valid network of at most six variables with one or two decisions; drafts
/// that cannot be analysed are discarded. Deterministic in `seed`.
pub fn random_network(seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let net = draft(&mut rng);
        if usable(&net) {
            return net;
        }
    }
}
