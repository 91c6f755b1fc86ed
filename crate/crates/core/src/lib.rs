//! Rate/leakage regions for computing a function of distributed private data
//! over a public, noiseless broadcast channel.
//!
//! The crate is split along the same lines as the computation:
//!
//! - [`prob`]: exact finite-alphabet probability calculus (joint pmfs,
//!   entropies, conditional mutual information, Markov tests, channels).
//! - [`regions`]: the half-space rate/leakage regions, the set function
//!   `g(S) = I(U_S; X_L | U_{S^c})`, its contrapolymatroid checks and the
//!   permutation corner points of its dominant face.
//! - [`search`]: enumeration of auxiliary channels under the cardinality
//!   bound `|U_l| <= |X_l|`, generator points, time-sharing hulls and
//!   Pareto frontiers.
//! - [`sim`]: the random-binning scheme (codebook, typicality encoder,
//!   successive decoder) with exact error probability and leakage at small
//!   block lengths.
//!
//! All information quantities are in bits.

pub mod prob;
pub mod regions;
pub mod search;
pub mod sim;

pub use prob::{Alphabet, Channel, FunctionSpec, JointPmf, ProbError, VarSet};
pub use regions::{
    CollusionFamily, HalfSpaceRegion, ProductChannelModel, RateLeakagePoint, RegionError, UserSet,
};
