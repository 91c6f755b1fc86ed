use fncomp_core::regions::{designated_generator, inner_region, ContrapolymatroidReport, PRECONDITION_TOL};
use fncomp_core::search::axis_names;
use fncomp_core::{ProductChannelModel, UserSet};
use serde::Serialize;

use crate::config::Problem;
use crate::error::CliError;
use crate::output::{num, Report};

#[derive(Debug, Clone, Serialize)]
pub struct Bound {
    pub set: UserSet,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Corner {
    /// 1-based decoding order.
    pub permutation: Vec<usize>,
    /// Indexed by user.
    pub rates: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetValue {
    pub set: UserSet,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FusionRegion {
    pub rate_bounds: Vec<Bound>,
    pub delta_bound: f64,
    pub delta_a_bounds: Vec<Bound>,
    pub corner_points: Vec<Corner>,
    pub g: Vec<SetValue>,
    pub g_gbar_residual: f64,
    pub contrapolymatroid: ContrapolymatroidReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignatedPoint {
    /// 1-based receiver.
    pub receiver: usize,
    pub axes: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub command: &'static str,
    pub users: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fusion: Option<FusionRegion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub designated: Option<DesignatedPoint>,
}

pub fn run(problem: &Problem) -> Result<RegionReport, CliError> {
    let channels = problem
        .channels
        .as_ref()
        .ok_or_else(|| CliError::Config("channels: region needs explicit channels".into()))?;
    let l = problem.p_x.arity();
    if let Some(r) = problem.receiver {
        let point = designated_generator(&problem.p_x, channels, &problem.f, &problem.family, r, PRECONDITION_TOL)?;
        return Ok(RegionReport {
            command: "region",
            users: l,
            fusion: None,
            designated: Some(DesignatedPoint {
                receiver: r + 1,
                axes: axis_names(l, Some(r), problem.family.len()),
                values: point.coords(),
            }),
        });
    }
    let model = ProductChannelModel::from_channels(&problem.p_x, channels, &problem.f, PRECONDITION_TOL)?;
    let region = inner_region(&model, &problem.family, PRECONDITION_TOL)?;
    let corners = model.corner_points()?;
    let bounds = |v: &[(UserSet, f64)]| v.iter().map(|&(set, bound)| Bound { set, bound }).collect();
    let fusion = FusionRegion {
        rate_bounds: bounds(&region.rate_bounds),
        delta_bound: region.delta_bound.unwrap_or(0.0),
        delta_a_bounds: bounds(&region.delta_a_bounds),
        corner_points: corners
            .points
            .into_iter()
            .map(|(perm, rates)| Corner {
                permutation: perm.iter().map(|p| p + 1).collect(),
                rates,
            })
            .collect(),
        g: UserSet::all(l).map(|set| SetValue { set, value: model.g(set) }).collect(),
        g_gbar_residual: model.max_g_gbar_residual(),
        contrapolymatroid: model.check_contrapolymatroid(PRECONDITION_TOL)?,
    };
    Ok(RegionReport {
        command: "region",
        users: l,
        fusion: Some(fusion),
        designated: None,
    })
}

impl Report for RegionReport {
    fn csv(&self) -> String {
        let header: Vec<String> = ["kind", "key", "user", "value"].map(String::from).to_vec();
        let row = |kind: &str, key: String, user: String, value: String| vec![kind.to_string(), key, user, value];
        let mut rows = Vec::new();
        if let Some(f) = &self.fusion {
            for b in &f.rate_bounds {
                rows.push(row("rate", b.set.to_string(), String::new(), num(b.bound)));
            }
            rows.push(row("delta", String::new(), String::new(), num(f.delta_bound)));
            for b in &f.delta_a_bounds {
                rows.push(row("delta_A", b.set.to_string(), String::new(), num(b.bound)));
            }
            for c in &f.corner_points {
                let key = c.permutation.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(">");
                for (u, r) in c.rates.iter().enumerate() {
                    rows.push(row("corner", key.clone(), (u + 1).to_string(), num(*r)));
                }
            }
            for g in &f.g {
                rows.push(row("g", g.set.to_string(), String::new(), num(g.value)));
            }
            rows.push(row("g_gbar_residual", String::new(), String::new(), num(f.g_gbar_residual)));
            let c = &f.contrapolymatroid;
            rows.push(row("normalization_residual", String::new(), String::new(), num(c.normalization_residual)));
            rows.push(row(
                "monotonicity_violation",
                String::new(),
                String::new(),
                num(c.worst_monotonicity_violation),
            ));
            rows.push(row(
                "supermodularity_violation",
                String::new(),
                String::new(),
                num(c.worst_supermodularity_violation),
            ));
        }
        if let Some(d) = &self.designated {
            for (a, v) in d.axes.iter().zip(&d.values) {
                rows.push(row("designated", a.clone(), d.receiver.to_string(), num(*v)));
            }
        }
        crate::output::csv_table(&header, &rows)
    }
}
