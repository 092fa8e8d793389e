//! Truth of formulas in epistemic and dynamic models.
//!
//! [`EvalContext`] computes whole truth sets bottom-up. Updated models are
//! built at most once per context and shared by every subformula that needs
//! them; truth sets are memoised per model. The [`reference`] module is a
//! direct pointwise reading of the truth conditions with no sharing, kept as
//! an oracle for the fast path.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::action::{product_with_index, ActionModel, PairIndex};
use crate::dynamic::DynamicModel;
use crate::error::{Error, Result};
use crate::formula::{fragment_name, ActionId, AgentId, Formula, Fragment, PropId};
use crate::kripke::{EpistemicModel, WorldId};

/// A model formulas can be evaluated in.
#[derive(Clone, Debug)]
pub enum Model {
    Epistemic(Arc<EpistemicModel>),
    Dynamic(Arc<DynamicModel>),
}

impl Model {
    pub fn epistemic(&self) -> &EpistemicModel {
        match self {
            Model::Epistemic(m) => m,
            Model::Dynamic(d) => d.base(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Epistemic(_) => "epistemic",
            Model::Dynamic(_) => "dynamic",
        }
    }

    /// Whether formulas of `fragment` have a meaning here.
    pub fn accepts(&self, fragment: Fragment) -> bool {
        match self {
            Model::Epistemic(_) => Fragment::ActionLogic.contains(fragment),
            Model::Dynamic(_) => Fragment::DynamicXi.contains(fragment),
        }
    }

    fn check(&self, phi: &Formula) -> Result<()> {
        match phi.fragment() {
            Some(f) if self.accepts(f) => Ok(()),
            other => Err(Error::FragmentMismatch {
                fragment: fragment_name(other),
                model: self.kind(),
            }),
        }
    }
}

impl From<EpistemicModel> for Model {
    fn from(m: EpistemicModel) -> Self {
        Model::Epistemic(Arc::new(m))
    }
}

impl From<DynamicModel> for Model {
    fn from(d: DynamicModel) -> Self {
        Model::Dynamic(Arc::new(d))
    }
}

impl From<Arc<EpistemicModel>> for Model {
    fn from(m: Arc<EpistemicModel>) -> Self {
        Model::Epistemic(m)
    }
}

impl From<Arc<DynamicModel>> for Model {
    fn from(d: Arc<DynamicModel>) -> Self {
        Model::Dynamic(d)
    }
}

/// An updated model reachable from a node, with the map from `(w, σ)` to its
/// index there.
type Child = (usize, Arc<PairIndex>);

/// A subformula with its children replaced by interned ids, so equal
/// subformulas share one id and hashing a key is constant time.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Atom(PropId),
    Xi(AgentId, ActionId, ActionId),
    Not(u32),
    And(u32, u32),
    Knows(AgentId, u32),
    UpdateDyn(ActionId, u32),
    UpdateAM(Arc<str>, ActionId, u32),
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Key, u32>,
    keys: Vec<Key>,
}

impl Interner {
    fn intern(&mut self, phi: &Formula) -> u32 {
        let key = match phi {
            Formula::Atom(p) => Key::Atom(p.clone()),
            Formula::Xi {
                agent,
                performed,
                confusable,
            } => Key::Xi(agent.clone(), performed.clone(), confusable.clone()),
            Formula::Not(inner) => Key::Not(self.intern(inner)),
            Formula::And(lhs, rhs) => {
                let l = self.intern(lhs);
                Key::And(l, self.intern(rhs))
            }
            Formula::Knows(agent, inner) => Key::Knows(agent.clone(), self.intern(inner)),
            Formula::UpdateDyn(action, body) => Key::UpdateDyn(action.clone(), self.intern(body)),
            Formula::UpdateAM {
                model,
                action,
                body,
            } => Key::UpdateAM(model.clone(), action.clone(), self.intern(body)),
        };
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = u32::try_from(self.keys.len()).expect("fewer than 2^32 subformulas");
        self.keys.push(key.clone());
        self.ids.insert(key, id);
        id
    }
}

struct Node {
    model: Model,
    plus: Option<Child>,
    products: HashMap<Arc<str>, Child>,
    memo: HashMap<u32, Arc<Vec<bool>>>,
    /// Interned preconditions of `[σ]`, by action index.
    pres: Vec<Option<u32>>,
}

impl Node {
    fn new(model: Model) -> Self {
        Node {
            model,
            plus: None,
            products: HashMap::new(),
            memo: HashMap::new(),
            pres: Vec::new(),
        }
    }
}

/// Evaluation state for one root model.
pub struct EvalContext {
    nodes: Vec<Node>,
    action_models: BTreeMap<Arc<str>, Arc<ActionModel>>,
    interner: Interner,
    memoize: bool,
}

impl EvalContext {
    pub fn new(model: impl Into<Model>) -> Self {
        EvalContext {
            nodes: vec![Node::new(model.into())],
            action_models: BTreeMap::new(),
            interner: Interner::default(),
            memoize: true,
        }
    }

    /// Makes `[A:σ]` refer to `model` under its own name.
    pub fn bind(&mut self, model: ActionModel) -> &mut Self {
        self.action_models.insert(model.name_arc(), Arc::new(model));
        self
    }

    pub fn with_action_models(mut self, models: impl IntoIterator<Item = ActionModel>) -> Self {
        for m in models {
            self.bind(m);
        }
        self
    }

    /// Turns truth-set memoisation on or off. Updated models are shared
    /// either way.
    pub fn set_memoize(&mut self, on: bool) -> &mut Self {
        self.memoize = on;
        self
    }

    pub fn model(&self) -> &Model {
        &self.nodes[0].model
    }

    /// Number of models held, the root included.
    pub fn model_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn eval(&mut self, world: &WorldId, phi: &Formula) -> Result<bool> {
        let w = self.model().epistemic().require_index(world)?;
        Ok(self.truth_set(phi)?[w])
    }

    pub fn eval_at(&mut self, w: usize, phi: &Formula) -> Result<bool> {
        let n = self.model().epistemic().world_count();
        if w >= n {
            return Err(Error::UnknownWorld(format!("#{w}")));
        }
        Ok(self.truth_set(phi)?[w])
    }

    /// Truth value at every world of the root, in world order.
    pub fn truth_set(&mut self, phi: &Formula) -> Result<Vec<bool>> {
        self.model().check(phi)?;
        let id = self.interner.intern(phi);
        Ok(self.truth(0, id)?.as_ref().clone())
    }

    /// Names of the worlds where `phi` holds.
    pub fn worlds_satisfying(&mut self, phi: &Formula) -> Result<Vec<WorldId>> {
        let truth = self.truth_set(phi)?;
        let m = self.model().epistemic();
        Ok(truth
            .iter()
            .enumerate()
            .filter(|(_, &t)| t)
            .map(|(i, _)| m.world(i).clone())
            .collect())
    }

    pub fn is_valid(&mut self, phi: &Formula) -> Result<bool> {
        Ok(self.truth_set(phi)?.iter().all(|&t| t))
    }

    fn pre_id(&mut self, node: usize, d: &DynamicModel, s: usize) -> u32 {
        let pres = &mut self.nodes[node].pres;
        if pres.len() <= s {
            pres.resize(d.sig().action_count().max(s + 1), None);
        }
        if let Some(id) = pres[s] {
            return id;
        }
        let id = self.interner.intern(d.sig().pre_at(s));
        self.nodes[node].pres[s] = Some(id);
        id
    }

    fn truth(&mut self, node: usize, id: u32) -> Result<Arc<Vec<bool>>> {
        if let Some(hit) = self.nodes[node].memo.get(&id) {
            return Ok(hit.clone());
        }
        let model = self.nodes[node].model.clone();
        let m = model.epistemic();
        let n = m.world_count();
        let out: Vec<bool> = match self.interner.keys[id as usize].clone() {
            Key::Atom(p) => match m.valuation().get(&p) {
                Some(truth) => truth.clone(),
                None => vec![false; n],
            },
            Key::Xi(agent, performed, confusable) => {
                let Model::Dynamic(d) = &model else {
                    return Err(mismatch(Fragment::EpistemicXi, &model));
                };
                let s = action_index(d, &performed)?;
                let t = action_index(d, &confusable)?;
                let mut out = Vec::with_capacity(n);
                for w in 0..n {
                    out.push(d.f_at(&agent, w)?.related(s, t));
                }
                out
            }
            Key::Not(inner) => self.truth(node, inner)?.iter().map(|t| !t).collect(),
            Key::And(lhs, rhs) => {
                let l = self.truth(node, lhs)?;
                let r = self.truth(node, rhs)?;
                l.iter().zip(r.iter()).map(|(a, b)| *a && *b).collect()
            }
            Key::Knows(agent, inner) => {
                let inner = self.truth(node, inner)?;
                let partition = m.require_partition(&agent)?;
                let mut out = vec![false; n];
                for class in partition.blocks() {
                    let known = class.iter().all(|&v| inner[v]);
                    for &v in class {
                        out[v] = known;
                    }
                }
                out
            }
            Key::UpdateDyn(action, body) => {
                let Model::Dynamic(d) = &model else {
                    return Err(mismatch(Fragment::Dynamic, &model));
                };
                let s = action_index(d, &action)?;
                let pre_id = self.pre_id(node, d, s);
                let pre = self.truth(node, pre_id)?;
                if !pre.iter().any(|&t| t) {
                    vec![true; n]
                } else {
                    let (child, pairs) = self.plus_child(node, d)?;
                    let inner = self.truth(child, body)?;
                    (0..n)
                        .map(|w| !pre[w] || inner[pairs[w][s].expect("executable pair")])
                        .collect()
                }
            }
            Key::UpdateAM(name, action, body) => {
                if !matches!(model, Model::Epistemic(_)) {
                    return Err(mismatch(Fragment::ActionLogic, &model));
                }
                let a = self
                    .action_models
                    .get(&name)
                    .cloned()
                    .ok_or_else(|| Error::UnboundActionModel(name.to_string()))?;
                let s = a
                    .index_of(&action)
                    .ok_or_else(|| Error::UnknownAction(format!("{name}:{action}")))?;
                let pre_id = self.interner.intern(a.pre(s));
                let pre = self.truth(node, pre_id)?;
                if !pre.iter().any(|&t| t) {
                    vec![true; n]
                } else {
                    let (child, pairs) = self.product_child(node, m, &a)?;
                    let inner = self.truth(child, body)?;
                    (0..n)
                        .map(|w| !pre[w] || inner[pairs[w][s].expect("executable pair")])
                        .collect()
                }
            }
        };
        let out = Arc::new(out);
        if self.memoize {
            self.nodes[node].memo.insert(id, out.clone());
        }
        Ok(out)
    }

    fn plus_child(&mut self, node: usize, d: &DynamicModel) -> Result<Child> {
        if let Some(child) = &self.nodes[node].plus {
            return Ok(child.clone());
        }
        let (updated, pairs) = d.update_plus_indexed()?;
        let child = (self.nodes.len(), Arc::new(pairs));
        self.nodes.push(Node::new(updated.into()));
        self.nodes[node].plus = Some(child.clone());
        Ok(child)
    }

    fn product_child(&mut self, node: usize, m: &EpistemicModel, a: &ActionModel) -> Result<Child> {
        if let Some(child) = self.nodes[node].products.get(a.name()) {
            return Ok(child.clone());
        }
        let (updated, pairs) = product_with_index(m, a)?;
        let child = (self.nodes.len(), Arc::new(pairs));
        self.nodes.push(Node::new(updated.into()));
        self.nodes[node]
            .products
            .insert(a.name_arc(), child.clone());
        Ok(child)
    }
}

fn mismatch(fragment: Fragment, model: &Model) -> Error {
    Error::FragmentMismatch {
        fragment: fragment.name().to_string(),
        model: model.kind(),
    }
}

fn action_index(d: &DynamicModel, action: &ActionId) -> Result<usize> {
    d.sig()
        .action_index(action)
        .ok_or_else(|| Error::UnknownAction(action.to_string()))
}

/// Truth of a basic epistemic formula at every world.
pub(crate) fn epistemic_truth(model: &EpistemicModel, phi: &Formula) -> Result<Vec<bool>> {
    let n = model.world_count();
    Ok(match phi {
        Formula::Atom(p) => match model.valuation().get(p) {
            Some(t) => t.clone(),
            None => vec![false; n],
        },
        Formula::Not(inner) => epistemic_truth(model, inner)?
            .into_iter()
            .map(|t| !t)
            .collect(),
        Formula::And(lhs, rhs) => {
            let l = epistemic_truth(model, lhs)?;
            let r = epistemic_truth(model, rhs)?;
            l.into_iter().zip(r).map(|(a, b)| a && b).collect()
        }
        Formula::Knows(agent, inner) => {
            let partition = model.require_partition(agent)?;
            let inner = epistemic_truth(model, inner)?;
            let mut out = vec![false; n];
            for class in partition.blocks() {
                let known = class.iter().all(|&v| inner[v]);
                for &v in class {
                    out[v] = known;
                }
            }
            out
        }
        _ => {
            return Err(Error::UnsupportedFragment {
                expected: Fragment::Epistemic,
                found: fragment_name(phi.fragment()),
            })
        }
    })
}

/// Evaluates `phi` at `world` of a dynamic model.
pub fn eval_dynamic(model: &DynamicModel, world: &WorldId, phi: &Formula) -> Result<bool> {
    EvalContext::new(model.clone()).eval(world, phi)
}

/// Evaluates `phi` at `world` of an epistemic model, resolving `[A:σ]`
/// against `action_models` by name.
pub fn eval_epistemic(
    model: &EpistemicModel,
    action_models: &[ActionModel],
    world: &WorldId,
    phi: &Formula,
) -> Result<bool> {
    EvalContext::new(model.clone())
        .with_action_models(action_models.iter().cloned())
        .eval(world, phi)
}

/// Pointwise evaluation straight from the truth conditions. Every update
/// occurrence rebuilds its updated model; nothing is cached.
pub mod reference {
    use super::*;

    pub fn eval_dynamic(model: &DynamicModel, w: usize, phi: &Formula) -> Result<bool> {
        let m = model.base();
        Ok(match phi {
            Formula::Atom(p) => m.holds(p, w),
            Formula::Xi {
                agent,
                performed,
                confusable,
            } => {
                let s = action_index(model, performed)?;
                let t = action_index(model, confusable)?;
                model.f_at(agent, w)?.related(s, t)
            }
            Formula::Not(inner) => !eval_dynamic(model, w, inner)?,
            Formula::And(lhs, rhs) => eval_dynamic(model, w, lhs)? && eval_dynamic(model, w, rhs)?,
            Formula::Knows(agent, inner) => {
                let class = m.require_partition(agent)?.block_of(w).to_vec();
                let mut all = true;
                for v in class {
                    all &= eval_dynamic(model, v, inner)?;
                }
                all
            }
            Formula::UpdateDyn(action, body) => {
                let s = action_index(model, action)?;
                if !eval_dynamic(model, w, model.sig().pre_at(s))? {
                    true
                } else {
                    let (updated, pairs) = model.update_plus_indexed()?;
                    eval_dynamic(&updated, pairs[w][s].expect("executable pair"), body)?
                }
            }
            Formula::UpdateAM { .. } => {
                return Err(Error::FragmentMismatch {
                    fragment: fragment_name(phi.fragment()),
                    model: "dynamic",
                })
            }
        })
    }

    pub fn eval_epistemic(
        model: &EpistemicModel,
        action_models: &[ActionModel],
        w: usize,
        phi: &Formula,
    ) -> Result<bool> {
        Ok(match phi {
            Formula::Atom(p) => model.holds(p, w),
            Formula::Not(inner) => !eval_epistemic(model, action_models, w, inner)?,
            Formula::And(lhs, rhs) => {
                eval_epistemic(model, action_models, w, lhs)?
                    && eval_epistemic(model, action_models, w, rhs)?
            }
            Formula::Knows(agent, inner) => {
                let class = model.require_partition(agent)?.block_of(w).to_vec();
                let mut all = true;
                for v in class {
                    all &= eval_epistemic(model, action_models, v, inner)?;
                }
                all
            }
            Formula::UpdateAM {
                model: name,
                action,
                body,
            } => {
                let a = action_models
                    .iter()
                    .find(|a| a.name() == name.as_ref())
                    .ok_or_else(|| Error::UnboundActionModel(name.to_string()))?;
                let s = a
                    .index_of(action)
                    .ok_or_else(|| Error::UnknownAction(format!("{name}:{action}")))?;
                if !eval_epistemic(model, action_models, w, a.pre(s))? {
                    true
                } else {
                    let (updated, pairs) = product_with_index(model, a)?;
                    eval_epistemic(
                        &updated,
                        action_models,
                        pairs[w][s].expect("executable pair"),
                        body,
                    )?
                }
            }
            Formula::Xi { .. } | Formula::UpdateDyn(..) => {
                return Err(Error::FragmentMismatch {
                    fragment: fragment_name(phi.fragment()),
                    model: "epistemic",
                })
            }
        })
    }
}
