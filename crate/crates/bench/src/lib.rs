//! Workloads shared by the benchmarks.

use epikit::fixtures;
use epikit::reduction::random::{random_scenario, FormulaParams, Generator, ModelParams};
use epikit::{ActionModel, DynamicModel, EpistemicModel, Formula};

/// An epistemic model and an action model over the same random signature.
pub fn product_workload(worlds: usize, seed: u64) -> (EpistemicModel, ActionModel) {
    let mut g = Generator::new(seed);
    let sig = g.signature(3, 3, 4);
    let agents: Vec<_> = sig.agents().cloned().collect();
    let props: Vec<_> = sig.props().cloned().collect();
    let m = g.epistemic_model(worlds, &agents, &props);
    let a = g.action_model("A", &sig);
    (m, a)
}

/// A random dynamic model with three agents, props and actions.
pub fn dynamic_workload(worlds: usize, seed: u64) -> DynamicModel {
    random_scenario(ModelParams::new(worlds, 3, 3, 3, seed)).1
}

/// Random formulas with up to two nested updates over the model's actions.
pub fn formula_workload(model: &DynamicModel, count: usize, seed: u64) -> Vec<Formula> {
    let mut g = Generator::new(seed);
    let shape = FormulaParams {
        depth: 4,
        action_depth: 2,
        xi: true,
    };
    (0..count).map(|_| g.formula(model.sig(), shape)).collect()
}

/// The eight-world model with world-dependent action confusion.
pub fn eight_world() -> DynamicModel {
    fixtures::m2_tilde()
}
