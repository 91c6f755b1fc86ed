use fncomp_core::search::{frontier_2d, generate, CapacityHull, ChannelTag};
use serde::Serialize;

use crate::config::{Problem, SearchSection};
use crate::error::CliError;
use crate::output::{num, Report};

#[derive(Debug, Clone, Serialize)]
pub struct Generator {
    pub tag: ChannelTag,
    /// In axis order.
    pub values: Vec<f64>,
    /// `p(u | x)` rows per contributing user.
    pub channels: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HullSummary {
    pub dimension: usize,
    pub vertices: usize,
    pub deterministic_generators: usize,
    pub stochastic_generators: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Frontier {
    pub x_axis: String,
    pub y_axis: String,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub command: &'static str,
    pub axes: Vec<String>,
    pub examined: usize,
    pub truncated: bool,
    pub generators: Vec<Generator>,
    pub hull: HullSummary,
    pub frontiers: Vec<Frontier>,
}

/// `R1` against the first leakage axis when the config names no pairs.
fn default_pairs(axes: &[String]) -> Vec<[String; 2]> {
    let leak = axes.iter().find(|a| a.starts_with("delta"));
    match (axes.first(), leak) {
        (Some(x), Some(y)) if x.starts_with('R') => vec![[x.clone(), y.clone()]],
        _ => Vec::new(),
    }
}

pub fn run(problem: &Problem, section: &SearchSection) -> Result<SearchReport, CliError> {
    let groups: Vec<_> = (0..problem.p_x.arity()).map(fncomp_core::VarSet::single).collect();
    let tc = problem.p_x.total_correlation(&groups)?;
    if tc > fncomp_core::regions::PRECONDITION_TOL {
        return Err(CliError::Precondition(format!(
            "search needs independent inputs, total correlation is {tc:.3e} bits"
        )));
    }
    let set = generate(&problem.p_x, &problem.f, &problem.family, &section.config(), problem.receiver)?;
    let points = set.rate_leakage_points();
    let hull = CapacityHull::new(&points)?;
    let pairs = if section.frontier.is_empty() {
        default_pairs(&set.axes)
    } else {
        section.frontier.clone()
    };
    let frontiers = pairs
        .into_iter()
        .map(|[x, y]| {
            let pts = frontier_2d(&points, &set.axes, &x, &y)?;
            Ok(Frontier {
                x_axis: x,
                y_axis: y,
                points: pts.into_iter().map(|(a, b)| [a, b]).collect(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let det = set.points.iter().filter(|p| p.source.tag == ChannelTag::Deterministic).count();
    Ok(SearchReport {
        command: "search",
        hull: HullSummary {
            dimension: hull.dim(),
            vertices: hull.vertices().len(),
            deterministic_generators: det,
            stochastic_generators: set.points.len() - det,
        },
        generators: set
            .points
            .iter()
            .map(|p| Generator {
                tag: p.source.tag,
                values: p.point.coords(),
                channels: p.source.channels.iter().map(|c| c.rows()).collect(),
            })
            .collect(),
        axes: set.axes,
        examined: set.examined,
        truncated: set.truncated,
        frontiers,
    })
}

impl Report for SearchReport {
    fn csv(&self) -> String {
        let mut header: Vec<String> = ["kind", "index", "tag"].map(String::from).to_vec();
        header.extend(self.axes.iter().cloned());
        let mut rows = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let tag = match g.tag {
                ChannelTag::Deterministic => "deterministic",
                ChannelTag::QuantizedStochastic => "quantized-stochastic",
            };
            let mut r = vec!["generator".to_string(), i.to_string(), tag.to_string()];
            r.extend(g.values.iter().map(|v| num(*v)));
            rows.push(r);
        }
        for f in &self.frontiers {
            let ix = self.axes.iter().position(|a| *a == f.x_axis);
            let iy = self.axes.iter().position(|a| *a == f.y_axis);
            for (i, p) in f.points.iter().enumerate() {
                let mut r = vec![format!("frontier:{}:{}", f.x_axis, f.y_axis), i.to_string(), String::new()];
                r.extend((0..self.axes.len()).map(|k| {
                    if Some(k) == ix {
                        num(p[0])
                    } else if Some(k) == iy {
                        num(p[1])
                    } else {
                        String::new()
                    }
                }));
                rows.push(r);
            }
        }
        crate::output::csv_table(&header, &rows)
    }
}
