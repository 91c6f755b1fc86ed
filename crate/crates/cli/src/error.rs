use fncomp_core::prob::ProbError;
use fncomp_core::regions::RegionError;
use fncomp_core::search::SearchError;
use fncomp_core::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Budget(_) => 4,
            CliError::CheckFailed(_) | CliError::Other(_) => 1,
        }
    }

    /// Prefixes the message with the config field it concerns.
    pub fn at(field: impl std::fmt::Display, e: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {e}"))
    }
}

impl From<ProbError> for CliError {
    fn from(e: ProbError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<RegionError> for CliError {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::Precondition(m) => CliError::Precondition(m),
            RegionError::Search(s) => (*s).into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Region(r) => r.into(),
            SearchError::Prob(p) => p.into(),
            SearchError::Lp(m) => CliError::Other(format!("linear program: {m}")),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Budget { .. } => CliError::Budget(format!("{e}; raise it with FNCOMP_BUDGET or sim.budget")),
            SimError::Region(r) => r.into(),
            SimError::Prob(p) => p.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}
