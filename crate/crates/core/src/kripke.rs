//! S5 epistemic models: building, restriction, disjoint union and
//! bisimulation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{ActionId, AgentId, Formula, Fragment, PropId};
use crate::partition::Partition;
use crate::semantics::epistemic_truth;

/// World name. Updated models name their worlds by the `(world, action)` pair
/// they came from; disjoint unions tag each side.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorldId {
    Named(Arc<str>),
    Pair(Box<WorldId>, ActionId),
    Tagged(u32, Box<WorldId>),
}

impl WorldId {
    pub fn named(name: impl AsRef<str>) -> Self {
        WorldId::Named(Arc::from(name.as_ref()))
    }

    pub fn pair(world: WorldId, action: impl Into<ActionId>) -> Self {
        WorldId::Pair(Box::new(world), action.into())
    }

    pub fn tagged(tag: u32, world: WorldId) -> Self {
        WorldId::Tagged(tag, Box::new(world))
    }

    /// For product worlds, the world the pair was built from.
    pub fn base(&self) -> Option<&WorldId> {
        match self {
            WorldId::Pair(w, _) => Some(w),
            _ => None,
        }
    }

    pub fn action(&self) -> Option<&ActionId> {
        match self {
            WorldId::Pair(_, a) => Some(a),
            _ => None,
        }
    }
}

impl From<&str> for WorldId {
    fn from(s: &str) -> Self {
        s.parse().unwrap_or_else(|_| WorldId::named(s))
    }
}

impl From<&WorldId> for WorldId {
    fn from(w: &WorldId) -> Self {
        w.clone()
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorldId::Named(n) => f.write_str(n),
            WorldId::Pair(w, a) => write!(f, "({w},{a})"),
            WorldId::Tagged(t, w) => write!(f, "{t}.{w}"),
        }
    }
}

impl fmt::Debug for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for WorldId {
    type Err = Error;

    /// Accepts `w0`, `(w0,sp)`, `((w0,sp),snp)` and `1.w0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::UnknownWorld(s.to_string());
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let comma = inner.rfind(',').ok_or_else(bad)?;
            let (world, action) = (&inner[..comma], inner[comma + 1..].trim());
            if action.is_empty() {
                return Err(bad());
            }
            return Ok(WorldId::pair(world.parse()?, action));
        }
        if let Some((tag, rest)) = s.split_once('.') {
            if let Ok(tag) = tag.parse::<u32>() {
                return Ok(WorldId::tagged(tag, rest.parse()?));
            }
        }
        if s.is_empty() || s.contains(['(', ')', ',']) {
            return Err(bad());
        }
        Ok(WorldId::named(s))
    }
}

/// Finite S5 model: worlds, one partition per agent, and a valuation.
///
/// Propositions true nowhere are not stored; they simply evaluate to false.
#[derive(Clone, PartialEq, Debug)]
pub struct EpistemicModel {
    worlds: Vec<WorldId>,
    index: HashMap<WorldId, usize>,
    relations: BTreeMap<AgentId, Partition>,
    valuation: BTreeMap<PropId, Vec<bool>>,
}

impl EpistemicModel {
    pub fn builder() -> EpistemicModelBuilder {
        EpistemicModelBuilder::default()
    }

    /// Builds a model from already-closed partitions.
    pub fn new(
        worlds: Vec<WorldId>,
        relations: BTreeMap<AgentId, Partition>,
        valuation: BTreeMap<PropId, Vec<bool>>,
    ) -> Result<Self> {
        if worlds.is_empty() {
            return Err(Error::EmptyModel);
        }
        let mut index = HashMap::with_capacity(worlds.len());
        for (i, w) in worlds.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::DuplicateWorld(w.to_string()));
            }
        }
        for (agent, p) in &relations {
            if p.len() != worlds.len() {
                return Err(Error::InvalidPartition(format!(
                    "partition for agent {agent} covers {} of {} worlds",
                    p.len(),
                    worlds.len()
                )));
            }
        }
        let mut valuation = valuation;
        for (prop, truth) in &valuation {
            if truth.len() != worlds.len() {
                return Err(Error::InvalidArgument(format!(
                    "valuation of {prop} has wrong length"
                )));
            }
        }
        valuation.retain(|_, truth| truth.iter().any(|&t| t));
        Ok(EpistemicModel {
            worlds,
            index,
            relations,
            valuation,
        })
    }

    pub fn worlds(&self) -> &[WorldId] {
        &self.worlds
    }

    pub fn world(&self, i: usize) -> &WorldId {
        &self.worlds[i]
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn index_of(&self, w: &WorldId) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn require_index(&self, w: &WorldId) -> Result<usize> {
        self.index_of(w)
            .ok_or_else(|| Error::UnknownWorld(w.to_string()))
    }

    pub fn agents(&self) -> impl Iterator<Item = &AgentId> {
        self.relations.keys()
    }

    pub fn relations(&self) -> &BTreeMap<AgentId, Partition> {
        &self.relations
    }

    pub fn partition(&self, agent: &AgentId) -> Option<&Partition> {
        self.relations.get(agent)
    }

    pub fn require_partition(&self, agent: &AgentId) -> Result<&Partition> {
        self.partition(agent)
            .ok_or_else(|| Error::UnknownAgent(agent.to_string()))
    }

    /// The propositions true in at least one world.
    pub fn props(&self) -> impl Iterator<Item = &PropId> {
        self.valuation.keys()
    }

    pub fn valuation(&self) -> &BTreeMap<PropId, Vec<bool>> {
        &self.valuation
    }

    pub fn holds(&self, p: &PropId, w: usize) -> bool {
        self.valuation.get(p).is_some_and(|t| t[w])
    }

    pub fn true_props(&self, w: usize) -> BTreeSet<PropId> {
        self.valuation
            .iter()
            .filter(|(_, t)| t[w])
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Adds a discrete partition for every listed agent the model lacks.
    pub fn with_agents<'a>(&self, agents: impl IntoIterator<Item = &'a AgentId>) -> Self {
        let mut out = self.clone();
        for agent in agents {
            out.relations
                .entry(agent.clone())
                .or_insert_with(|| Partition::discrete(self.world_count()));
        }
        out
    }

    /// Submodel on the given world indices, in that order.
    pub fn submodel(&self, keep: &[usize]) -> Result<Self> {
        let worlds = keep.iter().map(|&i| self.worlds[i].clone()).collect();
        let relations = self
            .relations
            .iter()
            .map(|(a, p)| (a.clone(), p.restrict(keep)))
            .collect();
        let valuation = self
            .valuation
            .iter()
            .map(|(p, t)| (p.clone(), keep.iter().map(|&i| t[i]).collect()))
            .collect();
        EpistemicModel::new(worlds, relations, valuation)
    }

    /// Renames every world; fails if two worlds collide.
    pub fn relabel(&self, mut rename: impl FnMut(&WorldId) -> WorldId) -> Result<Self> {
        let worlds = self.worlds.iter().map(&mut rename).collect();
        EpistemicModel::new(worlds, self.relations.clone(), self.valuation.clone())
    }

    /// Equality up to world order: same world names, same classes per agent,
    /// same atoms per world.
    pub fn same_as(&self, other: &EpistemicModel) -> bool {
        if self.world_count() != other.world_count() {
            return false;
        }
        let agents: BTreeSet<&AgentId> = self.agents().chain(other.agents()).collect();
        let class_names = |m: &EpistemicModel, agent: &AgentId, i: usize| -> BTreeSet<WorldId> {
            match m.partition(agent) {
                Some(p) => p.block_of(i).iter().map(|&j| m.worlds[j].clone()).collect(),
                None => BTreeSet::from([m.worlds[i].clone()]),
            }
        };
        self.worlds.iter().enumerate().all(|(i, w)| {
            let Some(j) = other.index_of(w) else {
                return false;
            };
            self.true_props(i) == other.true_props(j)
                && agents
                    .iter()
                    .all(|a| class_names(self, a, i) == class_names(other, a, j))
        })
    }
}

/// Collects worlds, edges and valuation; `build` closes the edges into
/// equivalence classes.
#[derive(Clone, Debug, Default)]
pub struct EpistemicModelBuilder {
    agents: Vec<AgentId>,
    worlds: Vec<WorldId>,
    edges: Vec<(AgentId, WorldId, WorldId)>,
    truths: Vec<(PropId, Vec<WorldId>)>,
}

impl EpistemicModelBuilder {
    pub fn agents<I>(mut self, agents: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<AgentId>,
    {
        self.agents.extend(agents.into_iter().map(Into::into));
        self
    }

    pub fn worlds<I>(mut self, worlds: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<WorldId>,
    {
        self.worlds.extend(worlds.into_iter().map(Into::into));
        self
    }

    pub fn edge(
        mut self,
        agent: impl Into<AgentId>,
        from: impl Into<WorldId>,
        to: impl Into<WorldId>,
    ) -> Self {
        self.edges.push((agent.into(), from.into(), to.into()));
        self
    }

    /// Marks `prop` true at the listed worlds.
    pub fn truth<I>(mut self, prop: impl Into<PropId>, worlds: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<WorldId>,
    {
        self.truths
            .push((prop.into(), worlds.into_iter().map(Into::into).collect()));
        self
    }

    pub fn build(self) -> Result<EpistemicModel> {
        if self.worlds.is_empty() {
            return Err(Error::EmptyModel);
        }
        let n = self.worlds.len();
        let mut index = HashMap::new();
        for (i, w) in self.worlds.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::DuplicateWorld(w.to_string()));
            }
        }
        let lookup = |w: &WorldId| {
            index
                .get(w)
                .copied()
                .ok_or_else(|| Error::UnknownWorld(w.to_string()))
        };
        let mut pairs: BTreeMap<AgentId, Vec<(usize, usize)>> = self
            .agents
            .iter()
            .map(|a| (a.clone(), Vec::new()))
            .collect();
        for (agent, from, to) in &self.edges {
            let edges = pairs
                .get_mut(agent)
                .ok_or_else(|| Error::UnknownAgent(agent.to_string()))?;
            edges.push((lookup(from)?, lookup(to)?));
        }
        let relations = pairs
            .into_iter()
            .map(|(a, e)| (a, Partition::from_pairs(n, e)))
            .collect();
        let mut valuation: BTreeMap<PropId, Vec<bool>> = BTreeMap::new();
        for (prop, worlds) in &self.truths {
            let truth = valuation
                .entry(prop.clone())
                .or_insert_with(|| vec![false; n]);
            for w in worlds {
                truth[lookup(w)?] = true;
            }
        }
        EpistemicModel::new(self.worlds, relations, valuation)
    }
}

/// The submodel of worlds satisfying an epistemic formula.
pub fn restrict(model: &EpistemicModel, phi: &Formula) -> Result<EpistemicModel> {
    phi.require(Fragment::Epistemic)?;
    let truth = epistemic_truth(model, phi)?;
    let keep: Vec<usize> = (0..model.world_count()).filter(|&i| truth[i]).collect();
    if keep.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    model.submodel(&keep)
}

/// Worlds of `left` tagged `1.`, worlds of `right` tagged `2.`. An agent
/// missing on one side is treated as seeing every world there as distinct.
pub fn disjoint_union(left: &EpistemicModel, right: &EpistemicModel) -> EpistemicModel {
    let worlds: Vec<WorldId> = left
        .worlds
        .iter()
        .map(|w| WorldId::tagged(1, w.clone()))
        .chain(right.worlds.iter().map(|w| WorldId::tagged(2, w.clone())))
        .collect();
    let agents: BTreeSet<&AgentId> = left.agents().chain(right.agents()).collect();
    let relations = agents
        .into_iter()
        .map(|a| {
            let l = left
                .partition(a)
                .cloned()
                .unwrap_or_else(|| Partition::discrete(left.world_count()));
            let r = right
                .partition(a)
                .cloned()
                .unwrap_or_else(|| Partition::discrete(right.world_count()));
            (a.clone(), l.disjoint_union(&r))
        })
        .collect();
    let props: BTreeSet<&PropId> = left.props().chain(right.props()).collect();
    let valuation = props
        .into_iter()
        .map(|p| {
            let truth = (0..left.world_count())
                .map(|i| left.holds(p, i))
                .chain((0..right.world_count()).map(|i| right.holds(p, i)))
                .collect();
            (p.clone(), truth)
        })
        .collect();
    EpistemicModel::new(worlds, relations, valuation).expect("union of valid models is valid")
}

/// Coarsest bisimulation on a single model, by partition refinement.
pub fn bisimulation_partition(model: &EpistemicModel) -> Partition {
    let n = model.world_count();
    let atoms: Vec<BTreeSet<PropId>> = (0..n).map(|w| model.true_props(w)).collect();
    let mut current = Partition::from_labels(&atoms);
    loop {
        // An S5 class reaches the same blocks from each of its members, so the
        // successor signature is computed once per class.
        let mut signatures: Vec<Vec<usize>> =
            (0..n).map(|w| vec![current.block_index(w)]).collect();
        for partition in model.relations.values() {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            for class in partition.blocks() {
                let mut reached: Vec<usize> =
                    class.iter().map(|&v| current.block_index(v)).collect();
                reached.sort_unstable();
                reached.dedup();
                let next = ids.len();
                let id = *ids.entry(reached).or_insert(next);
                for &w in class {
                    signatures[w].push(id);
                }
            }
        }
        let next = Partition::from_labels(&signatures);
        if next.num_blocks() == current.num_blocks() {
            return next;
        }
        current = next;
    }
}

/// Whether `(left, lw)` and `(right, rw)` are bisimilar for all agents.
pub fn bisimilar(
    left: &EpistemicModel,
    lw: &WorldId,
    right: &EpistemicModel,
    rw: &WorldId,
) -> Result<bool> {
    let li = left.require_index(lw)?;
    let ri = right.require_index(rw)?;
    let union = disjoint_union(left, right);
    let classes = bisimulation_partition(&union);
    Ok(classes.related(li, left.world_count() + ri))
}
