//! The random-binning computation scheme at small block lengths: codebooks,
//! typicality encoder, successive decoder, and exact error probability and
//! leakage by enumeration over all input sequences.

mod codebook;
mod exact;
mod mixture;
mod monte_carlo;
mod scheme;
mod sweep;
mod typical;

pub use codebook::{build_codebook, Codebook, UserCodebook};
pub use exact::{exact_evaluate, required_budget, Diagnostics, SimResult};
pub use monte_carlo::{estimate_error, ErrorEstimate};
pub use scheme::{BinLaw, DecodeOutcome, Scheme};
pub use sweep::{sweep, SweepRow, SweepTable, Theory};
pub use typical::typical;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::ProbError;
use crate::regions::RegionError;

/// Default cap on `|X_L|^n * prod_l N_l`.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Prob(#[from] ProbError),

    #[error(transparent)]
    Region(#[from] RegionError),

    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration needs {required} elementary steps, budget is {limit}")]
    Budget { required: u128, limit: u128 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CodebookKind {
    /// `N_l` i.i.d. draws from `p_{U_l}`.
    #[default]
    Random,
    /// Every sequence in `U_l^n` once, in lexicographic order; `N_l = |U_l|^n`.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeParams {
    pub n: usize,
    /// `N_l` per user.
    pub codewords: Vec<u64>,
    /// `B_l` per user; must divide `N_l`.
    pub bins: Vec<u64>,
    /// `eps_0 < eps_1 < ... < eps_L`, all positive.
    pub epsilons: Vec<f64>,
    pub master_seed: u64,
    #[serde(default)]
    pub codebook: CodebookKind,
}

impl SchemeParams {
    pub fn users(&self) -> usize {
        self.codewords.len()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidParams(m));
        if self.n == 0 {
            return bad("block length n must be positive".into());
        }
        let l = self.codewords.len();
        if l == 0 || self.bins.len() != l {
            return bad(format!(
                "{} codeword counts and {} bin counts",
                l,
                self.bins.len()
            ));
        }
        for (u, (&nl, &bl)) in self.codewords.iter().zip(&self.bins).enumerate() {
            if nl == 0 || bl == 0 {
                return bad(format!("user {}: counts must be positive", u + 1));
            }
            if nl % bl != 0 {
                return bad(format!(
                    "user {}: {bl} bins do not divide {nl} codewords",
                    u + 1
                ));
            }
            if nl > u64::from(u32::MAX) {
                return bad(format!("user {}: too many codewords ({nl})", u + 1));
            }
        }
        if self.epsilons.len() != l + 1 {
            return bad(format!(
                "expected {} epsilons, got {}",
                l + 1,
                self.epsilons.len()
            ));
        }
        if self.epsilons.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return bad("epsilons must be positive and finite".into());
        }
        if self.epsilons.windows(2).any(|w| w[0] >= w[1]) {
            return bad("epsilons must be strictly increasing".into());
        }
        Ok(())
    }

    /// `log2(N_l) / n`.
    pub fn codebook_rates(&self) -> Vec<f64> {
        self.codewords
            .iter()
            .map(|&c| (c as f64).log2() / self.n as f64)
            .collect()
    }

    /// `log2(B_l) / n`, the rates actually sent.
    pub fn bin_rates(&self) -> Vec<f64> {
        self.bins
            .iter()
            .map(|&b| (b as f64).log2() / self.n as f64)
            .collect()
    }

    pub fn encoder_eps(&self) -> f64 {
        self.epsilons[0]
    }

    pub fn decoder_eps(&self) -> f64 {
        *self.epsilons.last().expect("validated")
    }
}
