//! Epistemic action logic: Kripke models, product update with action models,
//! dynamic models with world-dependent action indistinguishability, and the
//! reduction of the extended dynamic language to its static fragment.

pub mod action;
pub mod dot;
pub mod dynamic;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod kripke;
pub mod parser;
pub mod partition;
pub mod reduction;
pub mod render;
pub mod scenario;
pub mod semantics;

pub use action::{disjoint_union_actions, product_update, public_announcement_model, ActionModel};
pub use dynamic::{
    embed_action_model, epistemic_part, DynamicFrame, DynamicModel, GuardRule, ValidationReport,
    Violation,
};
pub use error::{Error, Result};
pub use formula::{ActionId, AgentId, Formula, Fragment, PropId, Signature};
pub use kripke::{
    bisimilar, bisimulation_partition, disjoint_union, restrict, EpistemicModel, WorldId,
};
pub use parser::{parse_formula, parse_formula_unchecked, IdentKind, ParseError};
pub use partition::{Partition, Relation};
pub use reduction::{check_translation_equivalence, soundness_fuzz, translate, AxiomSchema};
pub use render::render_formula;
pub use scenario::{load_scenario, results_json, CheckResult, Scenario, ScenarioError};
pub use semantics::{eval_dynamic, eval_epistemic, EvalContext, Model};
