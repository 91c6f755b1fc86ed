//! Rate/leakage regions and the set-function machinery behind them.
//!
//! Throughout, users are indexed `0..L` internally. An auxiliary
//! distribution is laid out as `(U_1..U_L, X_1..X_L, F)`.

mod generator;
mod model;
mod region;
mod userset;

pub use generator::{designated_generator, fusion_generator, single_user_tradeoff};
pub use model::{
    AuxDistribution, ContrapolymatroidReport, CornerPointSet, ProductChannelModel,
    MAX_CONTRAPOLYMATROID_USERS, MAX_PERMUTATION_USERS,
};
pub use region::{
    inner_region, membership, outer_region, BoundKind, HalfSpaceRegion, Membership,
    ViolatedBound,
};
pub use userset::{CollusionFamily, UserSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::ProbError;

/// Default tolerance for Markov-chain and decodability preconditions.
pub const PRECONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Prob(#[from] ProbError),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{op} supports at most {max} users, got {users}")]
    TooManyUsers {
        op: &'static str,
        max: usize,
        users: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid collusion family: {0}")]
    InvalidFamily(String),

    #[error("invalid user index or permutation: {0}")]
    InvalidUsers(String),

    #[error(transparent)]
    Search(#[from] Box<crate::search::SearchError>),
}

/// A rate/leakage tuple `((R_l), Delta, (Delta_A))`.
///
/// In the designated-receiver variant `delta` is absent and `rates` covers
/// only the users other than the receiver, in increasing user order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateLeakagePoint {
    pub rates: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub delta_a: Vec<f64>,
}

impl RateLeakagePoint {
    pub fn new(rates: Vec<f64>, delta: Option<f64>, delta_a: Vec<f64>) -> Result<Self, RegionError> {
        let p = Self {
            rates,
            delta,
            delta_a,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), RegionError> {
        let bad = self
            .coords()
            .into_iter()
            .find(|v| !v.is_finite() || *v < 0.0);
        match bad {
            Some(v) => Err(RegionError::DimensionMismatch(format!(
                "point coordinates must be finite and nonnegative, found {v}"
            ))),
            None => Ok(()),
        }
    }

    /// Flattened coordinates: rates, then Delta if present, then each Delta_A.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.rates.clone();
        c.extend(self.delta);
        c.extend_from_slice(&self.delta_a);
        c
    }

    pub fn dim(&self) -> usize {
        self.rates.len() + usize::from(self.delta.is_some()) + self.delta_a.len()
    }
}
