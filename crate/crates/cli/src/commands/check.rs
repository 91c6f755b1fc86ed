use fncomp_core::regions::{fusion_generator, inner_region, membership, PRECONDITION_TOL};
use fncomp_core::search::enumerate_channels;
use fncomp_core::{Channel, CollusionFamily, FunctionSpec, JointPmf, ProductChannelModel, RateLeakagePoint, UserSet, VarSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Problem;
use crate::error::CliError;
use crate::output::{num, Report};
use crate::random::random_instance;

pub const CHECK_TOL: f64 = 1e-9;

/// Property names in report order.
pub const PROPERTIES: [&str; 7] = [
    "normalized",
    "nondecreasing",
    "supermodular",
    "g_equals_gbar",
    "corner_sums",
    "corner_membership",
    "generator_membership",
];

#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    /// Instances the property was evaluated on.
    pub evaluated: usize,
    pub worst_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub instances: usize,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

/// Residual per property for one instance; `None` where it does not apply.
type Residuals = [Option<f64>; 7];

fn shortfall(point: &RateLeakagePoint, region: &fncomp_core::HalfSpaceRegion) -> Result<f64, CliError> {
    let m = membership(point, region, CHECK_TOL)?;
    Ok(m.violated.map_or(0.0, |v| (v.bound - v.value).max(0.0)))
}

/// Runs every property on one channel tuple. Membership properties need
/// `H(F | U_L) = 0`; the generator property also needs independent inputs.
pub fn instance_residuals(
    p_x: &JointPmf,
    channels: &[Channel],
    f: &FunctionSpec,
    family: &CollusionFamily,
) -> Result<Residuals, CliError> {
    let model = ProductChannelModel::from_channels(p_x, channels, f, PRECONDITION_TOL)?;
    let l = model.users();
    let c = model.check_contrapolymatroid(CHECK_TOL)?;
    let total = model.g(UserSet::full(l));
    let corners = model.corner_points()?;
    let sums = corners
        .points
        .iter()
        .map(|(_, r)| (r.iter().sum::<f64>() - total).abs())
        .fold(0.0, f64::max);
    let mut out: Residuals = [
        Some(c.normalization_residual),
        Some(c.worst_monotonicity_violation.max(0.0)),
        Some(c.worst_supermodularity_violation.max(0.0)),
        Some(model.max_g_gbar_residual()),
        Some(sums),
        None,
        None,
    ];
    if model.dist().check_decodable(PRECONDITION_TOL).is_ok() {
        let region = inner_region(&model, family, PRECONDITION_TOL)?;
        let (delta, delta_a) = region.leakage_floor();
        let mut worst: f64 = 0.0;
        for (_, rates) in &corners.points {
            let point = RateLeakagePoint::new(rates.clone(), delta, delta_a.clone())?;
            worst = worst.max(shortfall(&point, &region)?);
        }
        out[5] = Some(worst);
        let groups: Vec<VarSet> = (0..l).map(VarSet::single).collect();
        if p_x.total_correlation(&groups)? <= PRECONDITION_TOL {
            let g = fusion_generator(p_x, channels, f, family, PRECONDITION_TOL)?;
            out[6] = Some(shortfall(&g, &region)?);
        }
    }
    Ok(out)
}

fn aggregate(all: &[Residuals]) -> CheckReport {
    let properties: Vec<PropertyResult> = PROPERTIES
        .iter()
        .enumerate()
        .map(|(k, &name)| {
            let vals: Vec<f64> = all.iter().filter_map(|r| r[k]).collect();
            let worst = vals.iter().copied().fold(0.0, f64::max);
            PropertyResult {
                name,
                passed: worst <= CHECK_TOL,
                evaluated: vals.len(),
                worst_residual: worst,
            }
        })
        .collect();
    CheckReport {
        command: "check",
        instances: all.len(),
        passed: properties.iter().all(|p| p.passed),
        properties,
    }
}

/// The channel tuples a config supplies: its explicit channels, or every
/// enumerated tuple of its search section. In the variant model the
/// receiver gets a constant channel.
fn config_tuples(problem: &Problem, search: Option<&crate::config::SearchSection>) -> Result<Vec<Vec<Channel>>, CliError> {
    let mut tuples = match (&problem.channels, search) {
        (Some(c), _) => vec![c.clone()],
        (None, Some(s)) => enumerate_channels(&problem.p_x, &problem.f, &s.config(), problem.receiver)?
            .tuples
            .into_iter()
            .map(|t| t.channels)
            .collect(),
        (None, None) => {
            return Err(CliError::Config("check needs explicit channels or a search section".into()));
        }
    };
    if let Some(r) = problem.receiver {
        let constant = Channel::constant(problem.p_x.sizes()[r])?;
        for t in &mut tuples {
            t.insert(r, constant.clone());
        }
    }
    Ok(tuples)
}

pub fn run_config(problem: &Problem, search: Option<&crate::config::SearchSection>) -> Result<CheckReport, CliError> {
    let tuples = config_tuples(problem, search)?;
    let all = tuples
        .par_iter()
        .map(|t| instance_residuals(&problem.p_x, t, &problem.f, &problem.family))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(&all))
}

/// Per-instance seeds drawn from one ChaCha stream under `seed`.
pub fn batch_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random()).collect()
}

/// `count` random instances with three users and alphabets up to 3.
pub fn run_random_batch(count: usize, seed: u64) -> Result<CheckReport, CliError> {
    let all = batch_seeds(seed, count)
        .par_iter()
        .map(|&s| {
            let inst = random_instance(s, 3, 3, 3);
            instance_residuals(&inst.p_x, &inst.channels, &inst.f, &inst.family)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(&all))
}

impl Report for CheckReport {
    fn csv(&self) -> String {
        let header: Vec<String> = ["property", "evaluated", "passed", "worst_residual"].map(String::from).to_vec();
        let rows: Vec<Vec<String>> = self
            .properties
            .iter()
            .map(|p| vec![p.name.to_string(), p.evaluated.to_string(), p.passed.to_string(), num(p.worst_residual)])
            .collect();
        crate::output::csv_table(&header, &rows)
    }
}
