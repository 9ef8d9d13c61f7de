use crate::model::ItemId;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown item id {0}")]
    UnknownItem(ItemId),

    #[error("item {0} cannot be covered by any set of the system")]
    Uncoverable(ItemId),

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("operation requires a total replacement order")]
    TotalOrderRequired,

    #[error("prefix condition violated at item {item}: {have} slots for {need} copies")]
    PrefixInfeasible { item: ItemId, have: u64, need: u64 },

    #[error("pattern enumeration exceeded the limit of {0} patterns")]
    PatternCapacity(usize),

    #[error("dynamic program exceeded the state cap of {0}")]
    StateCap(usize),

    #[error("search exhausted the node budget of {0}")]
    NodeBudget(u64),

    #[error("randomized rounding hit the trial cap of {0}")]
    TrialCap(usize),

    #[error("pricing is not supported for this set system")]
    PricingUnsupported,

    #[error("pseudo size of item {0} is not positive; sizes require positive set costs")]
    ZeroSize(ItemId),

    #[error("invalid parameter {field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
