//! Built-in models.

use crate::format;
use crate::network::Network;

/// Generic test/treat decision.
///
/// * `t` perform the test, `x` treat (decisions)
/// * `d` disease, `r` positive test result, `c` cure,
///   `y` treatment side-effects, `z` test complications (chance)
/// * `u` utility
///
/// The test result only carries information about the disease when the test
/// is performed. Cure matters to utility only in the presence of disease.
pub const TEST_TREAT_MODEL: &str = "\
# generic test/treat decision
var t : decision
var x : decision
var d : chance
var r : chance
var c : chance
var y : chance
var z : chance
var u : value

influence d -> r : + | t=T
influence d -> r : 0 | t=~T
influence x -> c : +
influence x -> y : +
influence t -> z : +

influence c -> u : + | d=D
influence c -> u : 0 | d=~D
influence d -> u : -
influence y -> u : -
influence z -> u : -

inform t -> x
inform r -> x
depend r -- t
";

pub fn test_treat() -> Network {
    format::parse(TEST_TREAT_MODEL).expect("built-in model parses")
}

/// Looks up a built-in model by name.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "test-treat" => Some(TEST_TREAT_MODEL),
        _ => None,
    }
}
