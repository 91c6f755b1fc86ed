use serde::Serialize;

use super::{exact_evaluate, SchemeParams, SimError, SimResult};
use crate::prob::{Channel, FunctionSpec, JointPmf};
use crate::regions::{inner_region, CollusionFamily, ProductChannelModel, PRECONDITION_TOL};

/// Quantities the simulated rates and leakages are compared against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theory {
    /// Corner point of the identity decoding order, `I(U_l; X_l | U_{1..l-1})`.
    pub corner_point: Vec<f64>,
    pub delta_bound: f64,
    pub delta_a_bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: SchemeParams,
    pub codebook_rates: Vec<f64>,
    pub bin_rates: Vec<f64>,
    pub result: Result<SimResult, SimError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub theory: Theory,
    pub rows: Vec<SweepRow>,
}

/// One exact evaluation per grid cell, in grid order. A failing cell is
/// recorded in its row and the sweep continues.
pub fn sweep(
    p_x: &JointPmf,
    channels: &[Channel],
    f: &FunctionSpec,
    family: &CollusionFamily,
    grid: &[SchemeParams],
    budget: u128,
) -> Result<SweepTable, SimError> {
    let model = ProductChannelModel::from_channels(p_x, channels, f, PRECONDITION_TOL)?;
    let region = inner_region(&model, family, PRECONDITION_TOL)?;
    let identity: Vec<usize> = (0..p_x.arity()).collect();
    let theory = Theory {
        corner_point: model.corner_point(&identity)?,
        delta_bound: region.delta_bound.unwrap_or(0.0),
        delta_a_bounds: region.delta_a_bounds.iter().map(|(_, v)| *v).collect(),
    };
    let rows = grid
        .iter()
        .map(|params| SweepRow {
            params: params.clone(),
            codebook_rates: params.codebook_rates(),
            bin_rates: params.bin_rates(),
            result: exact_evaluate(p_x, channels, f, family, params, budget),
        })
        .collect();
    Ok(SweepTable { theory, rows })
}
