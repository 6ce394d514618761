//! Serial (`⊗`) and parallel (`⊕`) combination of conditional influences.

use crate::error::{Error, Result};
use crate::network::{assignments, Condition, Influence};
use crate::sign::Sign;

/// Combines `a → b` with `b → c` into `a → c`.
///
/// Each consistent pair of entries yields the conjunction of their conditions
/// with the product of their signs; contradictory pairs yield nothing. When the
/// second link's conditions mention `a` itself, the chain term is read in the
/// context where `a` takes its false literal (the direct effect of `a` on `c`
/// is accounted for separately by the caller).
pub fn chain(first: &Influence, second: &Influence) -> Result<Influence> {
    if first.target != second.source {
        return Err(Error::EndpointMismatch(format!(
            "{} -> {} cannot chain with {} -> {}",
            first.source, first.target, second.source, second.target
        )));
    }
    let a = first.source.as_str();
    let second_entries: Vec<(Condition, Sign)> = second
        .entries()
        .iter()
        .filter_map(|(c, s)| c.restrict(a, false).map(|c| (c, *s)))
        .collect();
    let mut entries = Vec::new();
    for (c1, s1) in first.entries() {
        for (c2, s2) in &second_entries {
            if let Some(c) = c1.conjoin(c2) {
                entries.push((c, s1.multiply(*s2)));
            }
        }
    }
    Ok(Influence::new(first.source.clone(), second.target.clone(), entries).simplified())
}

/// Combines two influences with the same endpoints.
///
/// The condition space is refined to the assignments of every variable named in
/// either influence; on each cell the two signs are added, an uncovered cell
/// counting as `Unknown`.
pub fn parallel(first: &Influence, second: &Influence) -> Result<Influence> {
    if first.source != second.source || first.target != second.target {
        return Err(Error::EndpointMismatch(format!(
            "{} -> {} is not parallel to {} -> {}",
            first.source, first.target, second.source, second.target
        )));
    }
    let mut vars: Vec<String> = first.condition_vars().into_iter().collect();
    for v in second.condition_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars.sort();
    let entries = assignments(&vars).map(|cell| {
        let sign = first.sign_at(&cell).add(second.sign_at(&cell));
        (Condition::from_literals(cell), sign)
    });
    Ok(first.with_entries(entries).simplified())
}
