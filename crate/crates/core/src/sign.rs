//! The four-valued sign algebra over qualitative influence directions.

use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

/// Direction of a qualitative influence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
    Zero,
    Unknown,
}

pub const ALL_SIGNS: [Sign; 4] = [Sign::Positive, Sign::Negative, Sign::Zero, Sign::Unknown];

impl Sign {
    /// Chain combination (sign multiplication).
    pub fn multiply(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Unknown, _) | (_, Unknown) => Unknown,
            (Positive, s) | (s, Positive) => s,
            (Negative, Negative) => Positive,
        }
    }

    /// Parallel combination.
    pub fn add(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Zero, s) | (s, Zero) => s,
            (a, b) if a == b => a,
            _ => Unknown,
        }
    }

    /// Sign of the same influence read with the source's literals swapped.
    pub fn negate(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
            s => s,
        }
    }

    /// `+` or `-`.
    pub fn is_strict(self) -> bool {
        matches!(self, Sign::Positive | Sign::Negative)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Unknown => "?",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Sign {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Sign::Positive),
            "-" | "\u{2212}" => Ok(Sign::Negative),
            "0" => Ok(Sign::Zero),
            "?" => Ok(Sign::Unknown),
            other => Err(ParseError::new(0, format!("unknown sign `{other}`"))),
        }
    }
}

/// Folds signs with [`Sign::add`]; the empty sum is `Zero`.
pub fn sum<I: IntoIterator<Item = Sign>>(signs: I) -> Sign {
    signs.into_iter().fold(Sign::Zero, Sign::add)
}
