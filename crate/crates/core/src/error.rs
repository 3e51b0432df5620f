use thiserror::Error;

/// Errors raised by graph construction, sampling and the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Structural problem with a graph (disconnected, asymmetric, self-loop, ...).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    /// The lazily explored region grew past its safety cap.
    #[error("explored region exceeded the safety cap of {cap} vertices (raise the cap or lower the horizon)")]
    RegionCap { cap: usize },

    /// A lazy topology cannot address a vertex this far out.
    #[error("address space exhausted: {0} (lower the horizon or the intensity)")]
    AddressSpace(String),

    /// An exhaustive search would visit more nodes than allowed.
    #[error("search budget exceeded: {needed} nodes needed, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("update step uses {0}, which is not an edge of the graph")]
    NotAnEdge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by a resource limit rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::RegionCap { .. } | Error::Budget { .. } | Error::AddressSpace(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
