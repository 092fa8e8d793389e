//! Reduction of the dynamic language with `xi` atoms to its static fragment,
//! the axiom schemes it rests on, and a randomised soundness check.

mod axioms;
mod fuzz;
pub mod random;
mod translate;

pub use axioms::{instantiate, AxiomSchema, Bindings, TautologyTemplate};
pub use fuzz::{
    counterexample, random_bindings, soundness_fuzz, trial_model, FuzzFailure, FuzzParams,
    FuzzReport,
};
pub use translate::{translate, translate_with_fuel, Translation, DEFAULT_FUEL};

use crate::dynamic::DynamicModel;
use crate::error::Result;
use crate::formula::Formula;
use crate::semantics::EvalContext;

/// Whether `phi` and its translation hold at the same worlds of `model`.
pub fn check_translation_equivalence(phi: &Formula, model: &DynamicModel) -> Result<bool> {
    let translated = translate(phi, model.sig())?;
    let mut ctx = EvalContext::new(model.clone());
    Ok(ctx.truth_set(phi)? == ctx.truth_set(&translated)?)
}
