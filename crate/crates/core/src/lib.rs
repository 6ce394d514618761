//! Qualitative probabilistic networks.
//!
//! Influence diagrams whose links carry only a direction (`+`, `-`, `0`, `?`),
//! reduced with a sign algebra and analysed for strategy admissibility. A numeric
//! oracle samples concrete models consistent with the signs so every qualitative
//! conclusion can be checked by exact enumeration.

pub mod algebra;
pub mod dominance;
pub mod dot;
pub mod error;
pub mod format;
pub mod gen;
pub mod models;
pub mod network;
pub mod oracle;
pub mod order;
pub mod reduction;
pub mod sign;
pub mod strategy;
pub mod symbolic;

pub use error::{Error, ParseError, Result};
pub use network::{Assignment, Condition, Influence, Network, VarKind, Variable};
pub use sign::Sign;
