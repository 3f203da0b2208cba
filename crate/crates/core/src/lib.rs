//! Exact truncated ħ-adic formal-distribution calculus and identity checks for
//! quantum affine vertex algebras built from a symmetrizable Cartan matrix.

pub mod cartan_data;
pub mod classical_affine;
pub mod qheisenberg;
pub mod error;
pub mod report;
pub mod runner;
pub mod scalars;
pub mod series;
pub mod shiftops;
pub mod smatrix;
pub mod tau_group;

pub use error::{Error, Result};
pub use scalars::{HbarScalar, Q};

/// Truncation windows: ħ-order and highest compared z-exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Trunc {
    pub n_hbar: usize,
    pub m_z: i64,
}

impl Default for Trunc {
    fn default() -> Self {
        Trunc { n_hbar: 6, m_z: 12 }
    }
}

impl Trunc {
    pub fn new(n_hbar: usize, m_z: i64) -> Self {
        Trunc { n_hbar, m_z }
    }

    /// Working precision used before comparing up to `m_z`.
    pub fn work(&self) -> i64 {
        self.m_z + 2 * self.n_hbar as i64 + 4
    }
}
