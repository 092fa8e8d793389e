use std::fmt;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};

use crate::error::{Error, Result};

macro_rules! symbol {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: impl AsRef<str>) -> Self {
                $name(Arc::from(name.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(name: &str) -> Self {
                $name::new(name)
            }
        }

        impl From<String> for $name {
            fn from(name: String) -> Self {
                $name(Arc::from(name))
            }
        }

        impl From<&$name> for $name {
            fn from(name: &$name) -> Self {
                name.clone()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

symbol!(
    /// An agent from the finite agent set.
    AgentId
);
symbol!(
    /// An epistemic action from the action signature.
    ActionId
);
symbol!(
    /// A primitive proposition.
    PropId
);

/// Formula AST shared by every language the crate handles.
///
/// Only the core constructors are stored. Disjunction, implication,
/// equivalence, the dual `Khat` and the diamond `<σ>` are built by the helper
/// constructors below and never appear as nodes of their own.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Atom(PropId),
    /// `xi(j, σ, σ')`: when `σ` is performed, `j` cannot rule out `σ'`.
    Xi {
        agent: AgentId,
        performed: ActionId,
        confusable: ActionId,
    },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Knows(AgentId, Box<Formula>),
    /// `[σ]φ` over dynamic models.
    UpdateDyn(ActionId, Box<Formula>),
    /// `[A:σ]φ` over epistemic models with a named action model.
    UpdateAM {
        model: Arc<str>,
        action: ActionId,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(p: impl Into<PropId>) -> Self {
        Formula::Atom(p.into())
    }

    pub fn xi(
        agent: impl Into<AgentId>,
        performed: impl Into<ActionId>,
        confusable: impl Into<ActionId>,
    ) -> Self {
        Formula::Xi {
            agent: agent.into(),
            performed: performed.into(),
            confusable: confusable.into(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Formula) -> Self {
        Formula::Not(Box::new(phi))
    }

    pub fn and(phi: Formula, psi: Formula) -> Self {
        Formula::And(Box::new(phi), Box::new(psi))
    }

    /// `φ ∨ ψ` as `¬(¬φ ∧ ¬ψ)`.
    pub fn or(phi: Formula, psi: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(phi), Formula::not(psi)))
    }

    /// `φ → ψ` as `¬(φ ∧ ¬ψ)`.
    pub fn implies(phi: Formula, psi: Formula) -> Self {
        Formula::not(Formula::and(phi, Formula::not(psi)))
    }

    /// `φ ↔ ψ` as `(φ → ψ) ∧ (ψ → φ)`.
    pub fn iff(phi: Formula, psi: Formula) -> Self {
        Formula::and(
            Formula::implies(phi.clone(), psi.clone()),
            Formula::implies(psi, phi),
        )
    }

    pub fn knows(agent: impl Into<AgentId>, phi: Formula) -> Self {
        Formula::Knows(agent.into(), Box::new(phi))
    }

    pub fn khat(agent: impl Into<AgentId>, phi: Formula) -> Self {
        Formula::not(Formula::knows(agent, Formula::not(phi)))
    }

    pub fn update(action: impl Into<ActionId>, phi: Formula) -> Self {
        Formula::UpdateDyn(action.into(), Box::new(phi))
    }

    pub fn diamond(action: impl Into<ActionId>, phi: Formula) -> Self {
        Formula::not(Formula::update(action, Formula::not(phi)))
    }

    pub fn update_am(model: &str, action: impl Into<ActionId>, phi: Formula) -> Self {
        Formula::UpdateAM {
            model: Arc::from(model),
            action: action.into(),
            body: Box::new(phi),
        }
    }

    /// Left-nested conjunction of the items; `None` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// `p | !p` over the given atom.
    pub fn tautology(p: impl Into<PropId>) -> Self {
        let p = Formula::atom(p);
        Formula::or(p.clone(), Formula::not(p))
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Xi { .. } => vec![],
            Formula::Not(a) | Formula::Knows(_, a) | Formula::UpdateDyn(_, a) => vec![a],
            Formula::UpdateAM { body, .. } => vec![body],
            Formula::And(a, b) => vec![a, b],
        }
    }

    /// All subformulas including `self`, in pre-order.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(phi) = stack.pop() {
            out.push(phi);
            stack.extend(phi.children().into_iter().rev());
        }
        out
    }

    pub fn size(&self) -> usize {
        self.subformulas().len()
    }

    fn features(&self) -> Features {
        let mut feats = Features::default();
        for phi in self.subformulas() {
            match phi {
                Formula::Xi { .. } => feats.xi = true,
                Formula::UpdateDyn(..) => feats.dynamic = true,
                Formula::UpdateAM { .. } => feats.action_model = true,
                _ => {}
            }
        }
        feats
    }

    /// The smallest language containing the formula, or `None` when it mixes
    /// action-model updates with dynamic updates or `xi` atoms.
    pub fn fragment(&self) -> Option<Fragment> {
        let f = self.features();
        match (f.xi, f.dynamic, f.action_model) {
            (false, false, false) => Some(Fragment::Epistemic),
            (true, false, false) => Some(Fragment::EpistemicXi),
            (false, false, true) => Some(Fragment::ActionLogic),
            (false, true, false) => Some(Fragment::Dynamic),
            (true, true, false) => Some(Fragment::DynamicXi),
            _ => None,
        }
    }

    pub fn is_in(&self, fragment: Fragment) -> bool {
        self.fragment().is_some_and(|f| fragment.contains(f))
    }

    pub(crate) fn require(&self, fragment: Fragment) -> Result<()> {
        if self.is_in(fragment) {
            Ok(())
        } else {
            Err(Error::UnsupportedFragment {
                expected: fragment,
                found: fragment_name(self.fragment()),
            })
        }
    }

    /// Action nesting depth.
    pub fn action_depth(&self) -> Result<usize> {
        self.require(Fragment::DynamicXi)?;
        Ok(self.depth_unchecked())
    }

    fn depth_unchecked(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Xi { .. } => 0,
            Formula::Not(a) | Formula::Knows(_, a) => a.depth_unchecked(),
            Formula::And(a, b) => a.depth_unchecked().max(b.depth_unchecked()),
            Formula::UpdateDyn(_, a) => a.depth_unchecked() + 1,
            Formula::UpdateAM { body, .. } => body.depth_unchecked() + 1,
        }
    }

    /// Weight measure used for the subinduction of the reduction proof.
    pub fn weight(&self) -> Result<usize> {
        self.require(Fragment::DynamicXi)?;
        Ok(self.weight_unchecked())
    }

    fn weight_unchecked(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Xi { .. } => 1,
            Formula::Not(a) | Formula::Knows(_, a) | Formula::UpdateDyn(_, a) => {
                a.weight_unchecked() + 1
            }
            Formula::UpdateAM { body, .. } => body.weight_unchecked() + 1,
            Formula::And(a, b) => a.weight_unchecked().max(b.weight_unchecked()) + 1,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::render_formula(self))
    }
}

#[derive(Default)]
struct Features {
    xi: bool,
    dynamic: bool,
    action_model: bool,
}

/// The formula languages, ordered by inclusion where it exists.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Fragment {
    /// Basic epistemic language.
    Epistemic,
    /// Epistemic language with `xi` atoms.
    EpistemicXi,
    /// Epistemic language with `[A:σ]`.
    ActionLogic,
    /// Epistemic language with `[σ]`.
    Dynamic,
    /// Dynamic language with `xi` atoms.
    DynamicXi,
}

impl Fragment {
    /// Whether every formula of `other` also belongs to `self`.
    pub fn contains(self, other: Fragment) -> bool {
        use Fragment::*;
        match self {
            Epistemic => other == Epistemic,
            EpistemicXi => matches!(other, Epistemic | EpistemicXi),
            ActionLogic => matches!(other, Epistemic | ActionLogic),
            Dynamic => matches!(other, Epistemic | Dynamic),
            DynamicXi => matches!(other, Epistemic | EpistemicXi | Dynamic | DynamicXi),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Fragment::Epistemic => "EL",
            Fragment::EpistemicXi => "EL+",
            Fragment::ActionLogic => "AL",
            Fragment::Dynamic => "DL",
            Fragment::DynamicXi => "DL+",
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn fragment_name(fragment: Option<Fragment>) -> String {
    fragment.map_or_else(|| "mixed".to_string(), |f| f.name().to_string())
}

/// Agents, propositions and actions with their preconditions.
///
/// Actions keep declaration order; big conjunctions over the action set follow
/// it.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Signature {
    agents: IndexSet<AgentId>,
    props: IndexSet<PropId>,
    actions: IndexMap<ActionId, Formula>,
}

impl Signature {
    pub fn new<A, P>(agents: A, props: P) -> Self
    where
        A: IntoIterator,
        A::Item: Into<AgentId>,
        P: IntoIterator,
        P::Item: Into<PropId>,
    {
        Signature {
            agents: agents.into_iter().map(Into::into).collect(),
            props: props.into_iter().map(Into::into).collect(),
            actions: IndexMap::new(),
        }
    }

    /// Declares an action. The precondition must be a basic epistemic formula
    /// over the declared agents and propositions.
    pub fn add_action(&mut self, name: impl Into<ActionId>, pre: Formula) -> Result<()> {
        pre.require(Fragment::Epistemic)?;
        for phi in pre.subformulas() {
            match phi {
                Formula::Atom(p) if !self.props.contains(p) => {
                    return Err(Error::InvalidArgument(format!(
                        "precondition mentions undeclared proposition `{p}`"
                    )))
                }
                Formula::Knows(j, _) if !self.agents.contains(j) => {
                    return Err(Error::UnknownAgent(j.to_string()))
                }
                _ => {}
            }
        }
        let name = name.into();
        if self.actions.contains_key(&name) {
            return Err(Error::NameCollision(name.to_string()));
        }
        self.actions.insert(name, pre);
        Ok(())
    }

    /// Declares an action with its precondition given as text.
    pub fn add_action_text(&mut self, name: impl Into<ActionId>, pre: &str) -> Result<()> {
        let pre = crate::parser::parse_formula(pre, self)?;
        self.add_action(name, pre)
    }

    pub fn with_action(mut self, name: impl Into<ActionId>, pre: &str) -> Result<Self> {
        self.add_action_text(name, pre)?;
        Ok(self)
    }

    pub fn agents(&self) -> impl ExactSizeIterator<Item = &AgentId> {
        self.agents.iter()
    }

    pub fn props(&self) -> impl ExactSizeIterator<Item = &PropId> {
        self.props.iter()
    }

    pub fn actions(&self) -> impl ExactSizeIterator<Item = &ActionId> {
        self.actions.keys()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn has_agent(&self, agent: &AgentId) -> bool {
        self.agents.contains(agent)
    }

    pub fn has_prop(&self, prop: &PropId) -> bool {
        self.props.contains(prop)
    }

    pub fn has_action(&self, action: &ActionId) -> bool {
        self.actions.contains_key(action)
    }

    pub fn action_index(&self, action: &ActionId) -> Option<usize> {
        self.actions.get_index_of(action)
    }

    pub fn action_at(&self, index: usize) -> &ActionId {
        self.actions
            .get_index(index)
            .expect("action index in range")
            .0
    }

    pub fn pre(&self, action: &ActionId) -> Option<&Formula> {
        self.actions.get(action)
    }

    pub fn pre_at(&self, index: usize) -> &Formula {
        self.actions
            .get_index(index)
            .expect("action index in range")
            .1
    }

    /// The same agents and propositions with only the listed actions.
    pub fn restrict_actions<'a>(
        &self,
        actions: impl IntoIterator<Item = &'a ActionId>,
    ) -> Result<Signature> {
        let mut out = Signature {
            agents: self.agents.clone(),
            props: self.props.clone(),
            actions: IndexMap::new(),
        };
        for a in actions {
            let pre = self
                .pre(a)
                .ok_or_else(|| Error::UnknownAction(a.to_string()))?;
            out.actions.insert(a.clone(), pre.clone());
        }
        Ok(out)
    }

    pub(crate) fn insert_action_unchecked(&mut self, name: ActionId, pre: Formula) {
        self.actions.insert(name, pre);
    }
}
