use fncomp_core::regions::PRECONDITION_TOL;
use fncomp_core::sim::{
    estimate_error, required_budget, sweep, CodebookKind, Diagnostics, ErrorEstimate, Scheme, SchemeParams, Theory,
    DEFAULT_BUDGET,
};
use fncomp_core::{Channel, ProductChannelModel, UserSet, VarSet};
use serde::Serialize;

use crate::config::{CellSpec, Problem, SimSection};
use crate::error::CliError;
use crate::output::{num, Report};

pub const BUDGET_ENV: &str = "FNCOMP_BUDGET";

#[derive(Debug, Clone, Serialize)]
pub struct Leakage {
    pub set: UserSet,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimRow {
    pub n: usize,
    pub codewords: Vec<u64>,
    pub bins: Vec<u64>,
    pub codebook_rates: Vec<f64>,
    pub bin_rates: Vec<f64>,
    pub seed: u64,
    pub exact_error_prob: f64,
    pub leakage_fusion: f64,
    pub leakage_colluders: Vec<Leakage>,
    pub diagnostics: Diagnostics,
    pub monte_carlo: Option<ErrorEstimate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub command: &'static str,
    pub users: usize,
    pub collusion_sets: Vec<UserSet>,
    pub theory: Theory,
    pub rows: Vec<SimRow>,
}

/// `FNCOMP_BUDGET`, then the config, then the default.
pub fn budget(section: &SimSection) -> Result<u128, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u128>()
            .map_err(|e| CliError::Config(format!("{BUDGET_ENV}={v:?}: {e}"))),
        Err(_) => Ok(section.budget.map_or(DEFAULT_BUDGET, u128::from)),
    }
}

fn round_pow2(bits: f64) -> Result<u64, CliError> {
    let v = bits.exp2().round();
    if !(v.is_finite() && v < u64::from(u32::MAX) as f64) {
        return Err(CliError::Config(format!("2^{bits} codewords is too many")));
    }
    Ok((v as u64).max(1))
}

/// `B_l = round(2^{n (C_l + offset)})` with `C_l` the identity-order corner
/// point, and `N_l = B_l * round(2^{n I(U_l; U_{1..l-1})})`.
fn offset_sizes(model: &ProductChannelModel, n: usize, offset: f64) -> Result<(Vec<u64>, Vec<u64>), CliError> {
    let l = model.users();
    let corner = model.corner_point(&(0..l).collect::<Vec<_>>())?;
    let d = model.dist();
    let mut codewords = Vec::with_capacity(l);
    let mut bins = Vec::with_capacity(l);
    for u in 0..l {
        let saved = d.mi(&VarSet::single(u), &VarSet::range(0..u), &VarSet::empty());
        let b = round_pow2(n as f64 * (corner[u] + offset))?;
        let per_bin = round_pow2(n as f64 * saved)?;
        bins.push(b);
        codewords.push(b * per_bin);
    }
    Ok((codewords, bins))
}

fn cell_sizes(
    cell: &CellSpec,
    model: &ProductChannelModel,
    channels: &[Channel],
) -> Result<(Vec<u64>, Vec<u64>), CliError> {
    if let Some(offset) = cell.rate_offset {
        return offset_sizes(model, cell.n, offset);
    }
    let codewords = match &cell.codewords {
        Some(c) => c.clone(),
        None => channels
            .iter()
            .map(|c| {
                (c.output().size() as u64)
                    .checked_pow(cell.n as u32)
                    .ok_or_else(|| CliError::Config(format!("|U|^{} overflows", cell.n)))
            })
            .collect::<Result<_, _>>()?,
    };
    let bins = cell.bins.clone().unwrap_or_else(|| codewords.clone());
    Ok((codewords, bins))
}

/// The sweep grid in emission order: cells, then replicates.
pub fn grid(problem: &Problem, section: &SimSection, seed: u64) -> Result<Vec<SchemeParams>, CliError> {
    let channels = problem.channels.as_ref().expect("checked by caller");
    let model = ProductChannelModel::from_channels(&problem.p_x, channels, &problem.f, PRECONDITION_TOL)?;
    let mut out = Vec::new();
    for (i, cell) in section.cells.iter().enumerate() {
        let (codewords, bins) = cell_sizes(cell, &model, channels)?;
        for r in 0..section.replicates {
            let p = SchemeParams {
                n: cell.n,
                codewords: codewords.clone(),
                bins: bins.clone(),
                epsilons: section.epsilons.clone(),
                master_seed: seed.wrapping_add(r),
                codebook: section.codebook,
            };
            p.validate().map_err(|e| CliError::at(format!("sim.cells[{i}]"), e))?;
            if section.codebook == CodebookKind::Exhaustive {
                for (l, c) in channels.iter().enumerate() {
                    let full = (c.output().size() as u128).checked_pow(cell.n as u32);
                    if full != Some(u128::from(p.codewords[l])) {
                        return Err(CliError::at(
                            format!("sim.cells[{i}]"),
                            format!("an exhaustive codebook for user {} needs |U|^n codewords", l + 1),
                        ));
                    }
                }
            }
            out.push(p);
        }
    }
    Ok(out)
}

pub fn run(problem: &Problem, section: &SimSection, seed: u64) -> Result<SimReport, CliError> {
    if problem.receiver.is_some() {
        return Err(CliError::Config("variant: the simulator covers the fusion-center model only".into()));
    }
    let channels = problem
        .channels
        .as_ref()
        .ok_or_else(|| CliError::Config("channels: simulate needs explicit channels".into()))?;
    let params = grid(problem, section, seed)?;
    let limit = budget(section)?;
    for (k, p) in params.iter().enumerate() {
        let required = required_budget(problem.p_x.len(), p);
        if required > limit {
            return Err(CliError::Budget(format!(
                "grid row {k} (n = {}) needs {required} elementary steps, budget is {limit}; raise it with {BUDGET_ENV} or sim.budget",
                p.n
            )));
        }
    }
    let table = sweep(&problem.p_x, channels, &problem.f, &problem.family, &params, limit)?;
    let mut rows = Vec::with_capacity(table.rows.len());
    for row in table.rows {
        let r = row.result?;
        let monte_carlo = match section.monte_carlo_trials {
            Some(trials) => {
                let scheme = Scheme::new(&problem.p_x, channels, &problem.f, &row.params)?;
                Some(estimate_error(&scheme, &problem.f, trials, row.params.master_seed)?)
            }
            None => None,
        };
        rows.push(SimRow {
            n: row.params.n,
            codewords: row.params.codewords.clone(),
            bins: row.params.bins.clone(),
            codebook_rates: row.codebook_rates,
            bin_rates: row.bin_rates,
            seed: row.params.master_seed,
            exact_error_prob: r.exact_error_prob,
            leakage_fusion: r.leakage_fusion,
            leakage_colluders: r.leakage_colluders.iter().map(|&(set, value)| Leakage { set, value }).collect(),
            diagnostics: r.diagnostics,
            monte_carlo,
        });
    }
    Ok(SimReport {
        command: "simulate",
        users: problem.p_x.arity(),
        collusion_sets: problem.family.sets().to_vec(),
        theory: table.theory,
        rows,
    })
}

impl Report for SimReport {
    fn csv(&self) -> String {
        let l = self.users;
        let k = self.collusion_sets.len();
        let per = |p: &str| (1..=l).map(|u| format!("{p}_{u}")).collect::<Vec<_>>();
        let mut header: Vec<String> = vec!["n".into()];
        header.extend(per("N"));
        header.extend(per("B"));
        header.extend(per("codebook_rate"));
        header.extend(per("bin_rate"));
        header.extend(["seed", "error_prob", "leakage_fusion"].map(String::from));
        header.extend((1..=k).map(|a| format!("leakage_A{a}")));
        header.extend(per("encoder_failure"));
        header.extend(["decode_no_candidate", "decode_ambiguous"].map(String::from));
        header.extend(per("corner"));
        header.push("delta_bound".into());
        header.extend((1..=k).map(|a| format!("delta_A{a}_bound")));
        header.extend(["mc_trials", "mc_error", "mc_wilson_low", "mc_wilson_high"].map(String::from));

        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![r.n.to_string()];
                v.extend(r.codewords.iter().map(|c| c.to_string()));
                v.extend(r.bins.iter().map(|c| c.to_string()));
                v.extend(r.codebook_rates.iter().map(|x| num(*x)));
                v.extend(r.bin_rates.iter().map(|x| num(*x)));
                v.extend([r.seed.to_string(), num(r.exact_error_prob), num(r.leakage_fusion)]);
                v.extend(r.leakage_colluders.iter().map(|x| num(x.value)));
                v.extend(r.diagnostics.encoder_failure.iter().map(|x| num(*x)));
                v.push(r.diagnostics.decode_no_candidate.to_string());
                v.push(r.diagnostics.decode_ambiguous.to_string());
                v.extend(self.theory.corner_point.iter().map(|x| num(*x)));
                v.push(num(self.theory.delta_bound));
                v.extend(self.theory.delta_a_bounds.iter().map(|x| num(*x)));
                match &r.monte_carlo {
                    Some(m) => v.extend([
                        m.trials.to_string(),
                        num(m.estimate),
                        num(m.wilson_low),
                        num(m.wilson_high),
                    ]),
                    None => v.extend(std::iter::repeat_n(String::new(), 4)),
                }
                v
            })
            .collect();
        crate::output::csv_table(&header, &rows)
    }
}
