//! Formal series in one and two variables, rational functions and their expansions.

pub mod bridge;
pub mod dist2;
pub mod laurent;
pub mod poly;
pub mod rational;
pub mod series2;

pub use dist2::{delta_grid, delta_pair, delta_pair_additive, iota_additive, Distribution2};
pub use laurent::{LaurentSeries, Var, Witness, W, X, Z};
pub use poly::Poly;
pub use rational::{exp_substitute, iota_expand, iota_expand_in, Direction, RationalFunction, Sign};
pub use series2::Series2;

use serde::{Deserialize, Serialize};

/// Mode labelling of a field: Σ a(m) z^{-m-1} or Σ a(n) z^{-n}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeConvention {
    ShiftedByOne,
    Plain,
}

impl ModeConvention {
    /// Exponent of z carried by mode n.
    pub fn exponent(self, n: i64) -> i64 {
        match self {
            ModeConvention::ShiftedByOne => -n - 1,
            ModeConvention::Plain => -n,
        }
    }

    /// Mode attached to exponent e.
    pub fn mode(self, e: i64) -> i64 {
        match self {
            ModeConvention::ShiftedByOne => -e - 1,
            ModeConvention::Plain => -e,
        }
    }
}
