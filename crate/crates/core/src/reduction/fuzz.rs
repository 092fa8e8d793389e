use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::Serialize;

use super::axioms::{instantiate, AxiomSchema, Bindings};
use super::random::{FormulaParams, Generator, ModelParams};
use crate::dynamic::DynamicModel;
use crate::error::{Error, Result};
use crate::formula::{Formula, Signature};
use crate::kripke::WorldId;
use crate::render::render_formula;
use crate::semantics::EvalContext;

/// Bounds on the random models and bindings of a fuzz run. Each trial draws
/// its sizes uniformly up to these bounds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FuzzParams {
    pub max_worlds: usize,
    pub max_agents: usize,
    pub max_props: usize,
    pub max_actions: usize,
    /// Height bound for `φ`, `ψ`, `χ`.
    pub binding_depth: usize,
    /// Nesting bound for `[σ]` inside bindings.
    pub binding_action_depth: usize,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            max_worlds: 5,
            max_agents: 3,
            max_props: 3,
            max_actions: 3,
            binding_depth: 3,
            binding_action_depth: 1,
        }
    }
}

impl FuzzParams {
    /// The sizes trial `seed` uses.
    pub fn model_params(&self, seed: u64) -> ModelParams {
        let mut g = Generator::new(seed ^ 0x5eed_5eed_5eed_5eed);
        ModelParams {
            world_count: g.range(1, self.max_worlds.max(1)),
            agent_count: g.range(1, self.max_agents.max(1)),
            prop_count: g.range(1, self.max_props.max(1)),
            action_count: g.range(1, self.max_actions.max(1)),
            seed,
        }
    }
}

/// A scheme instance that is false somewhere in a generated model.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct FuzzFailure {
    pub schema: String,
    /// Reproduces the model through [`FuzzParams::model_params`] and
    /// [`super::random::random_scenario`].
    pub seed: u64,
    pub world: String,
    pub formula: String,
}

impl fmt::Display for FuzzFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "schema={} seed={} world={} formula={}",
            self.schema, self.seed, self.world, self.formula
        )
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct FuzzReport {
    pub trials: usize,
    pub seed: u64,
    pub instances: usize,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn failures_for(&self, schema: AxiomSchema) -> usize {
        self.failures
            .iter()
            .filter(|f| f.schema == schema.id())
            .count()
    }

    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for failure in &self.failures {
            writeln!(f, "{failure}")?;
        }
        Ok(())
    }
}

/// Random bindings drawn from the vocabulary of `sig`.
pub fn random_bindings(g: &mut Generator, sig: &Signature, params: &FuzzParams) -> Bindings {
    let shape = FormulaParams {
        depth: params.binding_depth,
        action_depth: params.binding_action_depth,
        xi: true,
    };
    let agents: Vec<_> = sig.agents().cloned().collect();
    let actions: Vec<_> = sig.actions().cloned().collect();
    let props: Vec<_> = sig.props().cloned().collect();
    Bindings {
        phi: Some(g.formula(sig, shape)),
        psi: Some(g.formula(sig, shape)),
        chi: Some(g.formula(sig, shape)),
        agent: agents.choose(g.rng()).cloned(),
        sigma: actions.choose(g.rng()).cloned(),
        sigma2: actions.choose(g.rng()).cloned(),
        sigma3: actions.choose(g.rng()).cloned(),
        prop: props.choose(g.rng()).cloned(),
    }
}

/// The first world where `phi` fails, if any.
pub fn counterexample(model: &DynamicModel, phi: &Formula) -> Result<Option<WorldId>> {
    let truth = EvalContext::new(model.clone()).truth_set(phi)?;
    Ok(truth
        .iter()
        .position(|t| !t)
        .map(|w| model.base().world(w).clone()))
}

/// Checks every scheme on `trials` random models. Trial `i` uses model seed
/// `seed + i`; failures are listed by seed, then scheme order.
pub fn soundness_fuzz(
    schemas: &[AxiomSchema],
    trials: usize,
    params: &FuzzParams,
    seed: u64,
) -> Result<FuzzReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut failures = Vec::new();
    let mut instances = 0;
    for i in 0..trials as u64 {
        let trial_seed = seed.wrapping_add(i);
        let (sig, model) = super::random::random_scenario(params.model_params(trial_seed));
        let mut ctx = EvalContext::new(model.clone());
        let mut g = Generator::new(trial_seed.rotate_left(17) ^ 0xb1d1_b1d1);
        for &schema in schemas {
            let bindings = random_bindings(&mut g, &sig, params);
            let phi = instantiate(schema, &bindings, &sig)?;
            instances += 1;
            let truth = ctx.truth_set(&phi)?;
            if let Some(w) = truth.iter().position(|t| !t) {
                failures.push(FuzzFailure {
                    schema: schema.id().to_string(),
                    seed: trial_seed,
                    world: model.base().world(w).to_string(),
                    formula: render_formula(&phi),
                });
            }
        }
    }
    failures.sort_by_key(|f| f.seed);
    Ok(FuzzReport {
        trials,
        seed,
        instances,
        failures,
    })
}

/// Rebuilds the model of a trial seed.
pub fn trial_model(params: &FuzzParams, seed: u64) -> (Arc<Signature>, DynamicModel) {
    super::random::random_scenario(params.model_params(seed))
}
