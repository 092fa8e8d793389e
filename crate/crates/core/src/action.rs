//! Action models and product update.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{ActionId, AgentId, Formula, Fragment, Signature};
use crate::kripke::{EpistemicModel, WorldId};
use crate::partition::Partition;
use crate::semantics::epistemic_truth;

/// A named set of actions with per-agent indistinguishability and epistemic
/// preconditions.
#[derive(Clone, PartialEq, Debug)]
pub struct ActionModel {
    name: Arc<str>,
    actions: Vec<ActionId>,
    index: HashMap<ActionId, usize>,
    relations: BTreeMap<AgentId, Partition>,
    pre: Vec<Formula>,
}

impl ActionModel {
    pub fn builder<'s>(name: &str, sig: &'s Signature) -> ActionModelBuilder<'s> {
        ActionModelBuilder {
            name: Arc::from(name),
            sig,
            actions: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Builds an action model from explicit preconditions and closed
    /// partitions.
    pub fn new(
        name: &str,
        actions: Vec<(ActionId, Formula)>,
        relations: BTreeMap<AgentId, Partition>,
    ) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::EmptyActionSet);
        }
        let mut index = HashMap::new();
        for (i, (a, pre)) in actions.iter().enumerate() {
            pre.require(Fragment::Epistemic)?;
            if index.insert(a.clone(), i).is_some() {
                return Err(Error::NameCollision(a.to_string()));
            }
        }
        for (agent, p) in &relations {
            if p.len() != actions.len() {
                return Err(Error::InvalidPartition(format!(
                    "action partition for agent {agent} has the wrong size"
                )));
            }
        }
        let (actions, pre) = actions.into_iter().unzip();
        Ok(ActionModel {
            name: Arc::from(name),
            actions,
            index,
            relations,
            pre,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn name_arc(&self) -> Arc<str> {
        self.name.clone()
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn index_of(&self, action: &ActionId) -> Option<usize> {
        self.index.get(action).copied()
    }

    pub fn agents(&self) -> impl Iterator<Item = &AgentId> {
        self.relations.keys()
    }

    pub fn relations(&self) -> &BTreeMap<AgentId, Partition> {
        &self.relations
    }

    /// The agent's partition of actions; agents the model does not mention
    /// tell every action apart.
    pub fn partition_or_discrete(&self, agent: &AgentId) -> Partition {
        self.relations
            .get(agent)
            .cloned()
            .unwrap_or_else(|| Partition::discrete(self.len()))
    }

    pub fn pre(&self, i: usize) -> &Formula {
        &self.pre[i]
    }

    pub fn pre_of(&self, action: &ActionId) -> Option<&Formula> {
        self.index_of(action).map(|i| &self.pre[i])
    }

    pub fn renamed(&self, name: &str) -> ActionModel {
        ActionModel {
            name: Arc::from(name),
            ..self.clone()
        }
    }
}

pub struct ActionModelBuilder<'s> {
    name: Arc<str>,
    sig: &'s Signature,
    actions: Vec<ActionId>,
    edges: Vec<(AgentId, ActionId, ActionId)>,
}

impl ActionModelBuilder<'_> {
    pub fn actions<I>(mut self, actions: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<ActionId>,
    {
        self.actions.extend(actions.into_iter().map(Into::into));
        self
    }

    pub fn edge(
        mut self,
        agent: impl Into<AgentId>,
        a: impl Into<ActionId>,
        b: impl Into<ActionId>,
    ) -> Self {
        self.edges.push((agent.into(), a.into(), b.into()));
        self
    }

    pub fn build(self) -> Result<ActionModel> {
        if self.actions.is_empty() {
            return Err(Error::EmptyActionSet);
        }
        let mut with_pre = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let pre = self
                .sig
                .pre(a)
                .ok_or_else(|| Error::UnknownAction(a.to_string()))?;
            with_pre.push((a.clone(), pre.clone()));
        }
        let position = |a: &ActionId| {
            self.actions
                .iter()
                .position(|x| x == a)
                .ok_or_else(|| Error::UnknownAction(a.to_string()))
        };
        let mut pairs: BTreeMap<AgentId, Vec<(usize, usize)>> =
            self.sig.agents().map(|a| (a.clone(), Vec::new())).collect();
        for (agent, a, b) in &self.edges {
            let slot = pairs
                .get_mut(agent)
                .ok_or_else(|| Error::UnknownAgent(agent.to_string()))?;
            slot.push((position(a)?, position(b)?));
        }
        let n = self.actions.len();
        let relations = pairs
            .into_iter()
            .map(|(a, e)| (a, Partition::from_pairs(n, e)))
            .collect();
        ActionModel::new(&self.name, with_pre, relations)
    }
}

/// `pairs[w][σ]` is the index of `(w, σ)` in the product, if it survived.
pub(crate) type PairIndex = Vec<Vec<Option<usize>>>;

pub(crate) fn product_with_index(
    model: &EpistemicModel,
    actions: &ActionModel,
) -> Result<(EpistemicModel, PairIndex)> {
    let pre: Vec<Vec<bool>> = (0..actions.len())
        .map(|s| epistemic_truth(model, actions.pre(s)))
        .collect::<Result<_>>()?;
    let mut pairs = vec![vec![None; actions.len()]; model.world_count()];
    let mut members: Vec<(usize, usize)> = Vec::new();
    for (w, slots) in pairs.iter_mut().enumerate() {
        for (s, slot) in slots.iter_mut().enumerate() {
            if pre[s][w] {
                *slot = Some(members.len());
                members.push((w, s));
            }
        }
    }
    if members.is_empty() {
        return Err(Error::EmptyProduct);
    }
    let worlds = members
        .iter()
        .map(|&(w, s)| WorldId::pair(model.world(w).clone(), actions.actions()[s].clone()))
        .collect();
    let agents: BTreeSet<&AgentId> = model.agents().chain(actions.agents()).collect();
    let relations = agents
        .into_iter()
        .map(|agent| {
            let worlds_p = model
                .partition(agent)
                .cloned()
                .unwrap_or_else(|| Partition::discrete(model.world_count()));
            let actions_p = actions.partition_or_discrete(agent);
            let labels: Vec<(usize, usize)> = members
                .iter()
                .map(|&(w, s)| (worlds_p.block_index(w), actions_p.block_index(s)))
                .collect();
            (agent.clone(), Partition::from_labels(&labels))
        })
        .collect();
    let valuation = model
        .valuation()
        .iter()
        .map(|(p, truth)| (p.clone(), members.iter().map(|&(w, _)| truth[w]).collect()))
        .collect();
    Ok((EpistemicModel::new(worlds, relations, valuation)?, pairs))
}

/// The updated model: pairs `(w, σ)` with `w ⊨ pre(σ)`, related for `j` when
/// both components are, with atoms inherited from `w`.
pub fn product_update(model: &EpistemicModel, actions: &ActionModel) -> Result<EpistemicModel> {
    product_with_index(model, actions).map(|(m, _)| m)
}

/// Single-action model announcing `phi` to everyone.
pub fn public_announcement_model<'a>(
    phi: &Formula,
    agents: impl IntoIterator<Item = &'a AgentId>,
) -> Result<ActionModel> {
    phi.require(Fragment::Epistemic)?;
    let relations = agents
        .into_iter()
        .map(|a| (a.clone(), Partition::total(1)))
        .collect();
    ActionModel::new(
        "announce",
        vec![(ActionId::new("announce"), phi.clone())],
        relations,
    )
}

/// Union of action models with pairwise distinct action names. Actions from
/// different models are never related.
pub fn disjoint_union_actions(name: &str, models: &[ActionModel]) -> Result<ActionModel> {
    let mut actions = Vec::new();
    let mut seen = BTreeSet::new();
    for m in models {
        for (i, a) in m.actions().iter().enumerate() {
            if !seen.insert(a.clone()) {
                return Err(Error::NameCollision(a.to_string()));
            }
            actions.push((a.clone(), m.pre(i).clone()));
        }
    }
    let agents: BTreeSet<&AgentId> = models.iter().flat_map(|m| m.agents()).collect();
    let relations = agents
        .into_iter()
        .map(|agent| {
            let joined = models
                .iter()
                .map(|m| m.partition_or_discrete(agent))
                .reduce(|acc, p| acc.disjoint_union(&p))
                .unwrap_or_else(|| Partition::discrete(0));
            (agent.clone(), joined)
        })
        .collect();
    ActionModel::new(name, actions, relations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kripke::{bisimilar, restrict};

    fn w(name: &str, action: &str) -> WorldId {
        WorldId::pair(WorldId::named(name), action)
    }

    fn agent(name: &str) -> AgentId {
        AgentId::new(name)
    }

    #[test]
    fn a0_structure() {
        let a0 = fixtures::a0();
        assert_eq!(a0.relations()[&agent("a")], Partition::total(2));
        assert_eq!(a0.relations()[&agent("b")], Partition::discrete(2));
    }

    #[test]
    fn a1_structure() {
        let a1 = fixtures::a1();
        assert_eq!(a1.len(), 3);
        assert_eq!(a1.relations()[&agent("a")], Partition::total(3));
        assert_eq!(a1.relations()[&agent("b")], Partition::discrete(3));
    }

    #[test]
    fn a2_structure() {
        let a2 = fixtures::a2();
        // spq, snpq, spnq, snpnq
        assert_eq!(
            a2.relations()[&agent("a")].blocks(),
            &[vec![0, 2], vec![1, 3]]
        );
        assert_eq!(
            a2.relations()[&agent("b")].blocks(),
            &[vec![0], vec![1], vec![2, 3]]
        );
    }

    #[test]
    fn builder_errors() {
        let sig = fixtures::sig_m0();
        assert_eq!(
            ActionModel::builder("A", &sig).build(),
            Err(Error::EmptyActionSet)
        );
        assert!(matches!(
            ActionModel::builder("A", &sig).actions(["sx"]).build(),
            Err(Error::UnknownAction(_))
        ));
        assert!(matches!(
            ActionModel::builder("A", &sig)
                .actions(["sp"])
                .edge("a", "sp", "snp")
                .build(),
            Err(Error::UnknownAction(_))
        ));
    }

    #[test]
    fn m0_times_a0() {
        let m = product_update(&fixtures::m0(), &fixtures::a0()).unwrap();
        assert_eq!(m.worlds(), &[w("w0", "sp"), w("w1", "snp")]);
        assert_eq!(m.partition(&agent("a")).unwrap(), &Partition::total(2));
        assert_eq!(m.partition(&agent("b")).unwrap(), &Partition::discrete(2));
    }

    #[test]
    fn m1_times_a1() {
        let m = product_update(&fixtures::m1(), &fixtures::a1()).unwrap();
        assert_eq!(
            m.worlds(),
            &[w("w0", "sp"), w("w1", "snp"), w("w2", "s"), w("w3", "s")]
        );
        assert_eq!(
            m.partition(&agent("b")).unwrap().blocks(),
            &[vec![0], vec![1], vec![2, 3]]
        );
        assert_eq!(m.partition(&agent("a")).unwrap(), &Partition::total(4));
    }

    #[test]
    fn m1_times_a2() {
        let m = product_update(&fixtures::m1(), &fixtures::a2()).unwrap();
        assert_eq!(
            m.worlds(),
            &[
                w("w0", "spq"),
                w("w1", "snpq"),
                w("w2", "spnq"),
                w("w3", "snpnq")
            ]
        );
        assert_eq!(
            m.partition(&agent("a")).unwrap().blocks(),
            &[vec![0, 2], vec![1, 3]]
        );
        assert_eq!(
            m.partition(&agent("b")).unwrap().blocks(),
            &[vec![0], vec![1], vec![2, 3]]
        );
    }

    #[test]
    fn empty_product_is_an_error() {
        let m0 = fixtures::m0();
        let never = Formula::and(Formula::atom("p"), Formula::not(Formula::atom("p")));
        let a = public_announcement_model(&never, m0.agents()).unwrap();
        assert_eq!(product_update(&m0, &a), Err(Error::EmptyProduct));
    }

    #[test]
    fn announcements_behave_like_restriction() {
        let m0 = fixtures::m0();
        let p = Formula::atom("p");
        let ann = public_announcement_model(&p, m0.agents()).unwrap();
        let updated = product_update(&m0, &ann).unwrap();
        let restricted = restrict(&m0, &p).unwrap();
        assert!(bisimilar(&updated, &w("w0", "announce"), &restricted, &"w0".into()).unwrap());

        let top = Formula::tautology("p");
        let ann = public_announcement_model(&top, m0.agents()).unwrap();
        let updated = product_update(&m0, &ann).unwrap();
        for world in ["w0", "w1"] {
            assert!(bisimilar(&updated, &w(world, "announce"), &m0, &world.into()).unwrap());
        }

        let ann = public_announcement_model(&Formula::not(p), m0.agents()).unwrap();
        let updated = product_update(&m0, &ann).unwrap();
        assert_eq!(updated.worlds(), &[w("w1", "announce")]);
    }

    #[test]
    fn announcement_needs_epistemic_formula() {
        assert!(matches!(
            public_announcement_model(&Formula::xi("a", "sp", "sp"), []),
            Err(Error::UnsupportedFragment { .. })
        ));
    }

    #[test]
    fn unions_of_action_models() {
        let a0 = fixtures::a0();
        let single = disjoint_union_actions("A0", std::slice::from_ref(&a0)).unwrap();
        assert_eq!(single, a0);

        let ann = public_announcement_model(&Formula::atom("p"), a0.agents()).unwrap();
        let both = disjoint_union_actions("U", &[a0.clone(), ann.clone()]).unwrap();
        assert_eq!(both.len(), a0.len() + ann.len());
        let pa = both.relations()[&agent("a")].clone();
        assert!(pa.related(0, 1));
        assert!(!pa.related(0, 2) && !pa.related(1, 2));

        assert!(matches!(
            disjoint_union_actions("U", &[a0.clone(), a0]),
            Err(Error::NameCollision(_))
        ));
    }
}
