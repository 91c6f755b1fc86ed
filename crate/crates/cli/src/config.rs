//! Problem configuration files: parsing, validation and conversion into
//! the core types. User indices in files are 1-based.

use fncomp_core::prob::Alphabet;
use fncomp_core::search::{SearchConfig, SearchMode};
use fncomp_core::sim::CodebookKind;
use fncomp_core::{Channel, CollusionFamily, FunctionSpec, JointPmf};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub users: Vec<UserSpec>,
    pub pmf: PmfSpec,
    pub function: FunctionConfig,
    #[serde(default)]
    pub collusion: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<VariantSpec>,
    /// Row-stochastic matrices `p(u | x)`, one per user; in the variant
    /// model one per user other than the receiver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserSpec {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PmfSpec {
    /// One marginal per user.
    Product(Vec<Vec<f64>>),
    /// Flat row-major tensor, last user varying fastest.
    Joint(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub codomain: usize,
    /// Flat row-major table over the users' alphabets.
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    /// 1-based index of the user that computes `F`.
    pub receiver: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    #[serde(default)]
    pub mode: SearchMode,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default = "default_true")]
    pub dedupe: bool,
    #[serde(default = "default_max_tuples")]
    pub max_tuples: usize,
    /// Axis pairs `[x, y]` for Pareto frontiers, e.g. `["R1", "delta"]`.
    #[serde(default)]
    pub frontier: Vec<[String; 2]>,
}

fn default_grid_step() -> f64 {
    SearchConfig::default().grid_step
}

fn default_true() -> bool {
    true
}

fn default_max_tuples() -> usize {
    SearchConfig::default().max_tuples
}

impl Default for SearchSection {
    fn default() -> Self {
        let c = SearchConfig::default();
        Self {
            mode: c.mode,
            grid_step: c.grid_step,
            dedupe: c.dedupe,
            max_tuples: c.max_tuples,
            frontier: Vec::new(),
        }
    }
}

impl SearchSection {
    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            mode: self.mode,
            grid_step: self.grid_step,
            dedupe: self.dedupe,
            max_tuples: self.max_tuples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    /// `eps_0 < ... < eps_L`.
    pub epsilons: Vec<f64>,
    pub cells: Vec<CellSpec>,
    /// Codebooks per cell; replicate `r` uses master seed `--seed + r`.
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default)]
    pub codebook: CodebookKind,
    /// Enumeration budget; `FNCOMP_BUDGET` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Also estimate the error probability from this many sampled blocks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo_trials: Option<u64>,
}

fn default_replicates() -> u64 {
    1
}

/// One grid cell. Sizes come from explicit `codewords`/`bins`, from
/// `rate_offset` above the corner point, or, for exhaustive codebooks,
/// default to `|U_l|^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codewords: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_offset: Option<f64>,
}

/// A validated problem in core types, with 0-based user indices.
#[derive(Debug, Clone)]
pub struct Problem {
    pub p_x: JointPmf,
    pub f: FunctionSpec,
    pub family: CollusionFamily,
    pub receiver: Option<usize>,
    pub channels: Option<Vec<Channel>>,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let l = self.users.len();
        if l == 0 {
            return Err(CliError::at("users", "at least one user is required"));
        }
        let alphabets = self
            .users
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let a = match &u.labels {
                    Some(labels) => {
                        if labels.len() != u.size {
                            return Err(CliError::at(
                                format!("users[{i}].labels"),
                                format!("{} labels for size {}", labels.len(), u.size),
                            ));
                        }
                        Alphabet::with_labels(labels.clone())
                    }
                    None => Alphabet::new(u.size),
                };
                a.map_err(|e| CliError::at(format!("users[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let sizes: Vec<usize> = self.users.iter().map(|u| u.size).collect();

        let p_x = match &self.pmf {
            PmfSpec::Product(m) => {
                if m.len() != l {
                    return Err(CliError::at("pmf.product", format!("{} marginals for {l} users", m.len())));
                }
                for (i, (v, &s)) in m.iter().zip(&sizes).enumerate() {
                    if v.len() != s {
                        return Err(CliError::at(
                            format!("pmf.product[{i}]"),
                            format!("{} entries, alphabet size {s}", v.len()),
                        ));
                    }
                    JointPmf::product(std::slice::from_ref(v)).map_err(|e| CliError::at(format!("pmf.product[{i}]"), e))?;
                }
                let p = JointPmf::product(m).map_err(|e| CliError::at("pmf.product", e))?;
                JointPmf::new(alphabets.clone(), p.probs().to_vec()).map_err(|e| CliError::at("pmf.product", e))?
            }
            PmfSpec::Joint(t) => JointPmf::new(alphabets.clone(), t.clone()).map_err(|e| CliError::at("pmf.joint", e))?,
        };

        let codomain = Alphabet::new(self.function.codomain).map_err(|e| CliError::at("function.codomain", e))?;
        let f = FunctionSpec::new(alphabets, codomain, self.function.table.clone())
            .map_err(|e| CliError::at("function.table", e))?;

        let receiver = match self.variant {
            Some(VariantSpec { receiver }) if receiver == 0 || receiver > l => {
                return Err(CliError::at("variant.receiver", format!("{receiver} is not a user in 1..={l}")));
            }
            Some(VariantSpec { receiver }) => Some(receiver - 1),
            None => None,
        };

        let mut lists = Vec::with_capacity(self.collusion.len());
        for (i, set) in self.collusion.iter().enumerate() {
            if let Some(&bad) = set.iter().find(|&&u| u == 0 || u > l) {
                return Err(CliError::at(format!("collusion[{i}]"), format!("{bad} is not a user in 1..={l}")));
            }
            lists.push(set.iter().map(|u| u - 1).collect::<Vec<_>>());
        }
        let family = CollusionFamily::from_lists(l, &lists).map_err(|e| CliError::at("collusion", e))?;

        let channels = match &self.channels {
            None => None,
            Some(rows) => {
                let owners: Vec<usize> = (0..l).filter(|&u| Some(u) != receiver).collect();
                if rows.len() != owners.len() {
                    return Err(CliError::at(
                        "channels",
                        format!("expected {} channels, got {}", owners.len(), rows.len()),
                    ));
                }
                let mut out = Vec::with_capacity(rows.len());
                for (i, (r, &u)) in rows.iter().zip(&owners).enumerate() {
                    let c = Channel::new(r.clone()).map_err(|e| CliError::at(format!("channels[{i}]"), e))?;
                    if c.input().size() != sizes[u] {
                        return Err(CliError::at(
                            format!("channels[{i}]"),
                            format!("{} rows for user {} with alphabet size {}", c.input().size(), u + 1, sizes[u]),
                        ));
                    }
                    out.push(c);
                }
                Some(out)
            }
        };

        if let Some(s) = &self.search {
            s.config().validate().map_err(|e| CliError::at("search", e))?;
        }
        if let Some(sim) = &self.sim {
            sim.validate(l).map_err(|e| CliError::at("sim", e))?;
        }

        Ok(Problem {
            p_x,
            f,
            family,
            receiver,
            channels,
        })
    }
}

impl SimSection {
    fn validate(&self, users: usize) -> Result<(), String> {
        if self.replicates == 0 {
            return Err("replicates must be positive".into());
        }
        if self.epsilons.len() != users + 1 {
            return Err(format!("expected {} epsilons, got {}", users + 1, self.epsilons.len()));
        }
        for (i, c) in self.cells.iter().enumerate() {
            if c.n == 0 {
                return Err(format!("cells[{i}].n must be positive"));
            }
            let explicit = c.codewords.is_some() || c.bins.is_some();
            match (explicit, c.rate_offset) {
                (true, Some(_)) => return Err(format!("cells[{i}]: give either codewords/bins or rate_offset")),
                (false, Some(r)) if !r.is_finite() => return Err(format!("cells[{i}].rate_offset must be finite")),
                _ => {}
            }
            for (name, v) in [("codewords", &c.codewords), ("bins", &c.bins)] {
                if let Some(v) = v {
                    if v.len() != users {
                        return Err(format!("cells[{i}].{name}: {} entries for {users} users", v.len()));
                    }
                }
            }
            if self.codebook == CodebookKind::Random && c.rate_offset.is_none() && (c.codewords.is_none() || c.bins.is_none()) {
                return Err(format!("cells[{i}]: codewords and bins are required"));
            }
        }
        Ok(())
    }
}
