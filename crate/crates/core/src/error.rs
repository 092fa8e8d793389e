use thiserror::Error;

use crate::dynamic::ValidationReport;
use crate::formula::Fragment;
use crate::parser::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("a model needs at least one world")]
    EmptyModel,

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("an action model needs at least one action")]
    EmptyActionSet,

    #[error("no world satisfies the restricting formula")]
    EmptyRestriction,

    #[error("no (world, action) pair satisfies its precondition")]
    EmptyProduct,

    #[error("action `{0}` occurs in more than one action model")]
    NameCollision(String),

    #[error("formula is in fragment {found}, expected {expected}")]
    UnsupportedFragment { expected: Fragment, found: String },

    #[error("formula of fragment {fragment} cannot be evaluated on {model} model")]
    FragmentMismatch {
        fragment: String,
        model: &'static str,
    },

    #[error("no action model named `{0}` is bound")]
    UnboundActionModel(String),

    #[error("invalid dynamic model: {0}")]
    InvalidDynamicModel(Box<ValidationReport>),

    #[error(
        "relation for agent {agent} is not an equivalence: {left} ~ {right} is implied but missing"
    )]
    NotEquivalence {
        agent: String,
        left: String,
        right: String,
    },

    #[error("{0}")]
    InvalidPartition(String),

    #[error("missing binding for {0}")]
    MissingBinding(&'static str),

    #[error("translation ran out of fuel")]
    FuelExhausted,

    #[error("{0}")]
    InvalidArgument(String),
}
