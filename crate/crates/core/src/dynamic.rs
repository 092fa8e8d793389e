//! Dynamic models: an epistemic model in which each agent's action
//! indistinguishability `f_j(w)` depends on the world.
//!
//! Two representations exist. [`DynamicFrame`] stores one relation per agent
//! per world and may violate the closure conditions; [`DynamicFrame::validate`]
//! reports every violation with witnesses. [`DynamicModel`] is the validated
//! form: since `f_j` is constant on each `~_j` class, it keeps one partition
//! per class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::action::{ActionModel, PairIndex};
use crate::error::{Error, Result};
use crate::formula::{ActionId, AgentId, Formula, Fragment, PropId, Signature};
use crate::kripke::{EpistemicModel, WorldId};
use crate::partition::{equivalence_partition, EquivalenceDefect, Partition, Relation};
use crate::semantics::epistemic_truth;

#[derive(Clone, PartialEq, Debug)]
pub enum Violation {
    /// `f_j(w)` is not defined.
    Undefined { agent: AgentId, world: WorldId },
    /// `w ~_j w'` but `f_j(w) != f_j(w')`.
    C1 {
        agent: AgentId,
        world: WorldId,
        other: WorldId,
        left: String,
        right: String,
    },
    NotReflexive {
        agent: AgentId,
        world: WorldId,
        action: ActionId,
    },
    NotSymmetric {
        agent: AgentId,
        world: WorldId,
        performed: ActionId,
        confusable: ActionId,
    },
    NotTransitive {
        agent: AgentId,
        world: WorldId,
        actions: [ActionId; 3],
    },
}

impl Violation {
    pub fn is_c1(&self) -> bool {
        matches!(self, Violation::C1 { .. })
    }

    pub fn is_c2(&self) -> bool {
        matches!(
            self,
            Violation::NotReflexive { .. }
                | Violation::NotSymmetric { .. }
                | Violation::NotTransitive { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Undefined { agent, world } => {
                write!(f, "f_{agent} undefined at {world}")
            }
            Violation::C1 {
                agent,
                world,
                other,
                left,
                right,
            } => write!(
                f,
                "C1: {world} ~_{agent} {other} but f_{agent}({world}) = {left} and f_{agent}({other}) = {right}"
            ),
            Violation::NotReflexive {
                agent,
                world,
                action,
            } => write!(f, "C2: f_{agent}({world}) lacks ({action},{action})"),
            Violation::NotSymmetric {
                agent,
                world,
                performed,
                confusable,
            } => write!(
                f,
                "C2: f_{agent}({world}) has ({performed},{confusable}) but not ({confusable},{performed})"
            ),
            Violation::NotTransitive {
                agent,
                world,
                actions: [x, y, z],
            } => write!(
                f,
                "C2: f_{agent}({world}) has ({x},{y}) and ({y},{z}) but not ({x},{z})"
            ),
        }
    }
}

/// Every closure-condition violation found in a frame. Empty iff valid.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_c1(&self) -> bool {
        self.violations.iter().any(Violation::is_c1)
    }

    pub fn has_c2(&self) -> bool {
        self.violations.iter().any(Violation::is_c2)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn partition_text(p: &Partition, sig: &Signature) -> String {
    p.blocks()
        .iter()
        .map(|b| {
            let names: Vec<&str> = b.iter().map(|&s| sig.action_at(s).as_str()).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect()
}

fn relation_text(r: &Relation, sig: &Signature) -> String {
    match r.to_partition() {
        Some(p) => partition_text(&p, sig),
        None => {
            let pairs: Vec<String> = r
                .pairs()
                .map(|(a, b)| format!("({},{})", sig.action_at(a), sig.action_at(b)))
                .collect();
            format!("{{{}}}", pairs.join(","))
        }
    }
}

/// Unvalidated dynamic structure with one relation on actions per agent and
/// world (`None` where undefined).
#[derive(Clone, PartialEq, Debug)]
pub struct DynamicFrame {
    pub base: EpistemicModel,
    pub sig: Arc<Signature>,
    pub f: BTreeMap<AgentId, Vec<Option<Relation>>>,
}

impl DynamicFrame {
    /// Checks totality, C1 against the base relations, and that each `f_j(w)`
    /// is an equivalence on the action set.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let k = self.sig.action_count();
        let n = self.base.world_count();
        for agent in self.base.agents() {
            let rels = self.f.get(agent);
            let at = |w: usize| rels.and_then(|r| r.get(w)).and_then(Option::as_ref);
            for w in 0..n {
                match at(w) {
                    None => out.push(Violation::Undefined {
                        agent: agent.clone(),
                        world: self.base.world(w).clone(),
                    }),
                    Some(r) if r.len() != k => out.push(Violation::Undefined {
                        agent: agent.clone(),
                        world: self.base.world(w).clone(),
                    }),
                    Some(r) => {
                        let world = self.base.world(w).clone();
                        for defect in r.equivalence_defects() {
                            let name = |i: usize| self.sig.action_at(i).clone();
                            out.push(match defect {
                                EquivalenceDefect::NotReflexive(a) => Violation::NotReflexive {
                                    agent: agent.clone(),
                                    world: world.clone(),
                                    action: name(a),
                                },
                                EquivalenceDefect::NotSymmetric(a, b) => Violation::NotSymmetric {
                                    agent: agent.clone(),
                                    world: world.clone(),
                                    performed: name(a),
                                    confusable: name(b),
                                },
                                EquivalenceDefect::NotTransitive(a, b, c) => {
                                    Violation::NotTransitive {
                                        agent: agent.clone(),
                                        world: world.clone(),
                                        actions: [name(a), name(b), name(c)],
                                    }
                                }
                            });
                        }
                    }
                }
            }
            let partition = self.base.partition(agent).expect("agent of base model");
            for class in partition.blocks() {
                let first = class[0];
                let Some(reference) = at(first) else { continue };
                for &w in &class[1..] {
                    match at(w) {
                        Some(r) if r != reference => out.push(Violation::C1 {
                            agent: agent.clone(),
                            world: self.base.world(first).clone(),
                            other: self.base.world(w).clone(),
                            left: relation_text(reference, &self.sig),
                            right: relation_text(r, &self.sig),
                        }),
                        _ => {}
                    }
                }
            }
        }
        ValidationReport { violations: out }
    }
}

/// Chooses `f_j(w)` as `partition` at worlds satisfying `guard`. Rules are
/// tried in order; a rule without a guard always matches.
#[derive(Clone, PartialEq, Debug)]
pub struct GuardRule {
    pub agent: AgentId,
    pub guard: Option<Formula>,
    pub partition: Partition,
}

/// A validated dynamic model over a finite action signature.
#[derive(Clone, PartialEq, Debug)]
pub struct DynamicModel {
    base: EpistemicModel,
    sig: Arc<Signature>,
    /// Per agent, one partition of the actions for each `~_j` class, indexed
    /// by the class's block index in the base partition.
    f: BTreeMap<AgentId, Vec<Partition>>,
}

impl DynamicModel {
    /// Validates a frame and packs it.
    pub fn from_frame(frame: DynamicFrame) -> Result<Self> {
        let report = frame.validate();
        if !report.is_empty() {
            return Err(Error::InvalidDynamicModel(Box::new(report)));
        }
        let f = frame
            .base
            .relations()
            .iter()
            .map(|(agent, partition)| {
                let rels = &frame.f[agent];
                let per_class = partition
                    .blocks()
                    .iter()
                    .map(|class| {
                        rels[class[0]]
                            .as_ref()
                            .and_then(Relation::to_partition)
                            .expect("validated")
                    })
                    .collect();
                (agent.clone(), per_class)
            })
            .collect();
        Ok(DynamicModel {
            base: frame.base,
            sig: frame.sig,
            f,
        })
    }

    /// Closes the given `(agent, world, σ, σ')` pairs at each world into a
    /// partition of the actions, then checks C1. Pairs absent at a world
    /// leave the agent able to tell all actions apart there.
    pub fn build(
        base: EpistemicModel,
        f_edges: &[(AgentId, WorldId, ActionId, ActionId)],
        sig: Arc<Signature>,
    ) -> Result<Self> {
        let n = base.world_count();
        let k = sig.action_count();
        let mut pairs: BTreeMap<AgentId, Vec<Vec<(usize, usize)>>> = base
            .agents()
            .map(|a| (a.clone(), vec![Vec::new(); n]))
            .collect();
        for (agent, world, s1, s2) in f_edges {
            let w = base.require_index(world)?;
            let action = |s: &ActionId| {
                sig.action_index(s)
                    .ok_or_else(|| Error::UnknownAction(s.to_string()))
            };
            let (a, b) = (action(s1)?, action(s2)?);
            pairs
                .get_mut(agent)
                .ok_or_else(|| Error::UnknownAgent(agent.to_string()))?[w]
                .push((a, b));
        }
        let f = pairs
            .into_iter()
            .map(|(agent, per_world)| {
                let rels = per_world
                    .into_iter()
                    .map(|p| Some(Partition::from_pairs(k, p).to_relation()))
                    .collect();
                (agent, rels)
            })
            .collect();
        DynamicModel::from_frame(DynamicFrame { base, sig, f })
    }

    /// Builds `f` from guard rules evaluated on the base model.
    pub fn from_guards(
        base: EpistemicModel,
        sig: Arc<Signature>,
        rules: &[GuardRule],
    ) -> Result<Self> {
        let n = base.world_count();
        let mut f: BTreeMap<AgentId, Vec<Option<Relation>>> =
            base.agents().map(|a| (a.clone(), vec![None; n])).collect();
        for rule in rules {
            if rule.partition.len() != sig.action_count() {
                return Err(Error::InvalidPartition(format!(
                    "partition for agent {} does not cover the action set",
                    rule.agent
                )));
            }
            let truth = match &rule.guard {
                Some(g) => {
                    g.require(Fragment::Epistemic)?;
                    epistemic_truth(&base, g)?
                }
                None => vec![true; n],
            };
            let slots = f
                .get_mut(&rule.agent)
                .ok_or_else(|| Error::UnknownAgent(rule.agent.to_string()))?;
            for (w, slot) in slots.iter_mut().enumerate() {
                if slot.is_none() && truth[w] {
                    *slot = Some(rule.partition.to_relation());
                }
            }
        }
        DynamicModel::from_frame(DynamicFrame { base, sig, f })
    }

    /// The epistemic part.
    pub fn base(&self) -> &EpistemicModel {
        &self.base
    }

    pub fn epistemic_part(&self) -> EpistemicModel {
        self.base.clone()
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn agents(&self) -> impl Iterator<Item = &AgentId> {
        self.f.keys()
    }

    /// `f_j(w)` for the world at index `w`.
    pub fn f_at(&self, agent: &AgentId, w: usize) -> Result<&Partition> {
        let classes = self
            .f
            .get(agent)
            .ok_or_else(|| Error::UnknownAgent(agent.to_string()))?;
        let block = self.base.require_partition(agent)?.block_index(w);
        Ok(&classes[block])
    }

    /// The per-class table for one agent: each `~_j` class with its partition.
    pub fn f_table(&self, agent: &AgentId) -> Option<Vec<(&[usize], &Partition)>> {
        let classes = self.f.get(agent)?;
        let partition = self.base.partition(agent)?;
        Some(
            partition
                .blocks()
                .iter()
                .map(Vec::as_slice)
                .zip(classes)
                .collect(),
        )
    }

    pub fn partition_text(&self, p: &Partition) -> String {
        partition_text(p, &self.sig)
    }

    /// Expands back to one relation per world.
    pub fn to_frame(&self) -> DynamicFrame {
        let f = self
            .f
            .keys()
            .map(|agent| {
                let rels = (0..self.base.world_count())
                    .map(|w| Some(self.f_at(agent, w).expect("agent present").to_relation()))
                    .collect();
                (agent.clone(), rels)
            })
            .collect();
        DynamicFrame {
            base: self.base.clone(),
            sig: self.sig.clone(),
            f,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        self.to_frame().validate()
    }

    /// The updated frame before validation.
    ///
    /// `~+_j` is computed from its defining condition and checked to be an
    /// equivalence: an `Err(NotEquivalence)` is a counterexample to the
    /// closure conditions being sufficient.
    pub fn update_plus_frame(&self) -> Result<DynamicFrame> {
        self.update_plus_indexed_frame().map(|(frame, _)| frame)
    }

    fn update_plus_indexed_frame(&self) -> Result<(DynamicFrame, PairIndex)> {
        let n = self.base.world_count();
        let k = self.sig.action_count();
        let pre: Vec<Vec<bool>> = (0..k)
            .map(|s| epistemic_truth(&self.base, self.sig.pre_at(s)))
            .collect::<Result<_>>()?;
        let mut pairs = vec![vec![None; k]; n];
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
        let worlds: Vec<WorldId> = members
            .iter()
            .map(|&(w, s)| WorldId::pair(self.base.world(w).clone(), self.sig.action_at(s).clone()))
            .collect();
        let mut relations = BTreeMap::new();
        for (agent, partition) in self.base.relations() {
            // Candidate pairs never leave a base class.
            let by_class: Vec<Vec<usize>> = partition
                .blocks()
                .iter()
                .map(|class| {
                    class
                        .iter()
                        .flat_map(|&w| pairs[w].iter().flatten().copied())
                        .collect()
                })
                .collect();
            let candidates = by_class
                .iter()
                .flat_map(|g| g.iter().flat_map(move |&x| g.iter().map(move |&y| (x, y))));
            let related = |x: usize, y: usize| {
                let (w, s) = members[x];
                let (v, t) = members[y];
                partition.related(w, v) && self.f_at(agent, w).expect("agent").related(s, t)
            };
            let lifted =
                equivalence_partition(members.len(), related, candidates).map_err(|(x, y)| {
                    Error::NotEquivalence {
                        agent: agent.to_string(),
                        left: worlds[x].to_string(),
                        right: worlds[y].to_string(),
                    }
                })?;
            relations.insert(agent.clone(), lifted);
        }
        let valuation = self
            .base
            .valuation()
            .iter()
            .map(|(p, truth)| (p.clone(), members.iter().map(|&(w, _)| truth[w]).collect()))
            .collect();
        let base = EpistemicModel::new(worlds, relations, valuation)?;
        let f = self
            .f
            .keys()
            .map(|agent| {
                let rels = members
                    .iter()
                    .map(|&(w, _)| Some(self.f_at(agent, w).expect("agent").to_relation()))
                    .collect();
                (agent.clone(), rels)
            })
            .collect();
        Ok((
            DynamicFrame {
                base,
                sig: self.sig.clone(),
                f,
            },
            pairs,
        ))
    }

    pub(crate) fn update_plus_indexed(&self) -> Result<(DynamicModel, PairIndex)> {
        let (frame, pairs) = self.update_plus_indexed_frame()?;
        Ok((DynamicModel::from_frame(frame)?, pairs))
    }

    /// The updated model `M+`, performing every executable action at once.
    pub fn update_plus(&self) -> Result<DynamicModel> {
        DynamicModel::from_frame(self.update_plus_frame()?)
    }
}

/// Reads an action model as a dynamic model with constant `f_j = ≈_j`.
pub fn embed_action_model(model: &EpistemicModel, actions: &ActionModel) -> Result<DynamicModel> {
    let agents: BTreeSet<AgentId> = model.agents().chain(actions.agents()).cloned().collect();
    let base = model.with_agents(&agents);
    let mut props: BTreeSet<PropId> = model.props().cloned().collect();
    for i in 0..actions.len() {
        for phi in actions.pre(i).subformulas() {
            if let Formula::Atom(p) = phi {
                props.insert(p.clone());
            }
        }
    }
    let mut sig = Signature::new(agents.iter().cloned(), props);
    for (i, a) in actions.actions().iter().enumerate() {
        sig.insert_action_unchecked(a.clone(), actions.pre(i).clone());
    }
    let f = base
        .relations()
        .iter()
        .map(|(agent, partition)| {
            let p = actions.partition_or_discrete(agent);
            (agent.clone(), vec![p; partition.num_blocks()])
        })
        .collect();
    Ok(DynamicModel {
        base,
        sig: Arc::new(sig),
        f,
    })
}

/// Drops `f` and returns the epistemic part.
pub fn epistemic_part(model: &DynamicModel) -> EpistemicModel {
    model.epistemic_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::product_update;
    use crate::fixtures;

    fn agent(name: &str) -> AgentId {
        AgentId::new(name)
    }

    #[test]
    fn m1_tilde_is_valid() {
        let d = fixtures::m1_tilde();
        assert!(d.validate().is_empty());
        assert_eq!(d.f_at(&agent("a"), 0).unwrap(), &Partition::total(2));
        assert_eq!(d.f_at(&agent("b"), 0).unwrap(), &Partition::discrete(2));
        assert_eq!(d.f_at(&agent("b"), 3).unwrap(), &Partition::total(2));
        assert_eq!(epistemic_part(&d), fixtures::m1());
    }

    #[test]
    fn m1_tilde_prime_is_valid() {
        let d = fixtures::m1_tilde_prime();
        assert!(d.validate().is_empty());
        for w in 0..4 {
            assert_eq!(d.f_at(&agent("a"), w).unwrap(), &Partition::discrete(2));
        }
    }

    #[test]
    fn c1_breach_is_rejected() {
        // w0 ~_b w1 in M1, but f_b differs between them.
        let sig = Arc::new(fixtures::sig_dynamic());
        let edges = vec![(agent("b"), WorldId::named("w1"), "sp".into(), "snp".into())];
        match DynamicModel::build(fixtures::m1(), &edges, sig) {
            Err(Error::InvalidDynamicModel(report)) => {
                assert!(report.has_c1());
                assert_eq!(report.violations.len(), 1);
            }
            other => panic!("expected a C1 violation, got {other:?}"),
        }
    }

    #[test]
    fn frame_reports_c2_defects() {
        let m0 = fixtures::m0();
        let sig = Arc::new(fixtures::sig_m0());
        let broken = Relation::from_pairs(2, [(0, 0), (1, 1), (0, 1)]);
        let mut f = BTreeMap::new();
        f.insert(agent("a"), vec![Some(broken.clone()), Some(broken)]);
        f.insert(
            agent("b"),
            vec![None, Some(Partition::discrete(2).to_relation())],
        );
        let frame = DynamicFrame { base: m0, sig, f };
        let report = frame.validate();
        assert!(report.has_c2());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Undefined { .. })));
        assert!(DynamicModel::from_frame(frame).is_err());
    }

    #[test]
    fn m2_tilde_is_valid() {
        let d = fixtures::m2_tilde();
        assert!(d.validate().is_empty());
        let plus = d.update_plus().unwrap();
        // Each world satisfies exactly one of p, !p.
        assert_eq!(plus.base().world_count(), 8);
        assert!(plus.validate().is_empty());
    }

    #[test]
    fn update_plus_inherits_f() {
        let d = fixtures::m1_tilde();
        let plus = d.update_plus().unwrap();
        for (i, w) in plus.base().worlds().iter().enumerate() {
            let origin = d.base().index_of(w.base().unwrap()).unwrap();
            for j in ["a", "b"] {
                assert_eq!(
                    plus.f_at(&agent(j), i).unwrap(),
                    d.f_at(&agent(j), origin).unwrap()
                );
            }
        }
        let twice = plus.update_plus().unwrap();
        assert!(twice.validate().is_empty());
    }

    #[test]
    fn embedding_is_constant() {
        let d = embed_action_model(&fixtures::m0(), &fixtures::a0()).unwrap();
        for w in 0..2 {
            assert_eq!(d.f_at(&agent("a"), w).unwrap(), &Partition::total(2));
            assert_eq!(d.f_at(&agent("b"), w).unwrap(), &Partition::discrete(2));
        }
        assert_eq!(d.epistemic_part(), fixtures::m0());

        let ann =
            crate::action::public_announcement_model(&Formula::atom("p"), fixtures::m0().agents())
                .unwrap();
        let d = embed_action_model(&fixtures::m0(), &ann).unwrap();
        assert_eq!(d.f_at(&agent("a"), 1).unwrap(), &Partition::total(1));
    }

    #[test]
    fn embedding_reproduces_product() {
        for (m, a) in [
            (fixtures::m0(), fixtures::a0()),
            (fixtures::m1(), fixtures::a1()),
            (fixtures::m1(), fixtures::a2()),
        ] {
            let via_dynamic = embed_action_model(&m, &a).unwrap().update_plus().unwrap();
            let direct = product_update(&m, &a).unwrap();
            assert!(via_dynamic.base().same_as(&direct));
        }
    }

    #[test]
    fn guards_must_cover_every_world() {
        let sig = Arc::new(fixtures::sig_dynamic());
        let rules = vec![GuardRule {
            agent: agent("a"),
            guard: Some(Formula::atom("q")),
            partition: Partition::total(2),
        }];
        match DynamicModel::from_guards(fixtures::m1(), sig, &rules) {
            Err(Error::InvalidDynamicModel(report)) => {
                assert!(report
                    .violations
                    .iter()
                    .all(|v| matches!(v, Violation::Undefined { .. })));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_update_is_an_error() {
        let m0 = fixtures::m0();
        let sig = Signature::new(["a", "b"], ["p"])
            .with_action("never", "p & !p")
            .unwrap();
        let d = DynamicModel::build(m0, &[], Arc::new(sig)).unwrap();
        assert_eq!(d.update_plus(), Err(Error::EmptyProduct));
    }
}
