use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula::{ActionId, AgentId, Formula, PropId, Signature};

/// Propositional tautology templates standing in for "all instances of
/// tautologies".
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum TautologyTemplate {
    /// `φ -> (ψ -> φ)`
    Weakening,
    /// `(φ -> (ψ -> χ)) -> ((φ -> ψ) -> (φ -> χ))`
    Distribution,
    /// `(!φ -> !ψ) -> (ψ -> φ)`
    Contraposition,
    /// `φ | !φ`
    ExcludedMiddle,
}

/// An axiom scheme of the static and dynamic systems, plus one derived
/// scheme and one deliberately unsound control.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum AxiomSchema {
    Tautology(TautologyTemplate),
    /// `K_a(φ -> ψ) -> (K_a φ -> K_a ψ)`
    Distribution,
    /// `K_a φ -> φ`
    Truth,
    /// `K_a φ -> K_a K_a φ`
    PositiveIntrospection,
    /// `!K_a φ -> K_a !K_a φ`
    NegativeIntrospection,
    /// `xi(j, σ, σ)`
    XiReflexive,
    /// `xi(j, σ, σ') -> xi(j, σ', σ)`
    XiSymmetric,
    /// `xi(j, σ, σ') -> (xi(j, σ', σ'') -> xi(j, σ, σ''))`
    XiTransitive,
    /// `xi(j, σ, σ') -> K_j xi(j, σ, σ')`
    Interaction,
    /// `!xi(j, σ, σ') -> K_j !xi(j, σ, σ')`
    NegativeInteraction,
    /// `[σ](φ -> ψ) -> ([σ]φ -> [σ]ψ)`
    UpdateDistribution,
    /// `[σ]p <-> (pre_σ -> p)`
    UpdateAtom,
    /// `[σ]!φ <-> (pre_σ -> ![σ]φ)`
    UpdateNegation,
    /// `[σ](φ & ψ) <-> ([σ]φ & [σ]ψ)`
    UpdateConjunction,
    /// `[σ]K_a φ <-> (pre_σ -> ⋀_σ' (xi(a, σ, σ') -> K_a [σ']φ))`
    UpdateKnowledge,
    /// `[σ]K_a φ <-> K_a [σ]φ`, which fails once `a` may confuse actions.
    Control,
}

/// The metavariables a scheme may use.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Bindings {
    pub phi: Option<Formula>,
    pub psi: Option<Formula>,
    pub chi: Option<Formula>,
    pub agent: Option<AgentId>,
    pub sigma: Option<ActionId>,
    pub sigma2: Option<ActionId>,
    pub sigma3: Option<ActionId>,
    pub prop: Option<PropId>,
}

impl AxiomSchema {
    pub const ALL: [AxiomSchema; 19] = [
        AxiomSchema::Tautology(TautologyTemplate::Weakening),
        AxiomSchema::Tautology(TautologyTemplate::Distribution),
        AxiomSchema::Tautology(TautologyTemplate::Contraposition),
        AxiomSchema::Tautology(TautologyTemplate::ExcludedMiddle),
        AxiomSchema::Distribution,
        AxiomSchema::Truth,
        AxiomSchema::PositiveIntrospection,
        AxiomSchema::NegativeIntrospection,
        AxiomSchema::XiReflexive,
        AxiomSchema::XiSymmetric,
        AxiomSchema::XiTransitive,
        AxiomSchema::Interaction,
        AxiomSchema::NegativeInteraction,
        AxiomSchema::UpdateDistribution,
        AxiomSchema::UpdateAtom,
        AxiomSchema::UpdateNegation,
        AxiomSchema::UpdateConjunction,
        AxiomSchema::UpdateKnowledge,
        AxiomSchema::Control,
    ];

    /// Every sound scheme: the axioms and the derived negative interaction
    /// scheme.
    pub fn sound() -> Vec<AxiomSchema> {
        AxiomSchema::ALL
            .into_iter()
            .filter(|s| *s != AxiomSchema::Control)
            .collect()
    }

    pub fn is_sound(self) -> bool {
        self != AxiomSchema::Control
    }

    /// Numbering of the axiom list; the derived scheme is `7a-neg`.
    pub fn id(self) -> &'static str {
        use AxiomSchema::*;
        match self {
            Tautology(_) => "1",
            Distribution => "2",
            Truth => "3",
            PositiveIntrospection => "4",
            NegativeIntrospection => "5",
            XiReflexive => "6a",
            XiSymmetric => "6b",
            XiTransitive => "6c",
            Interaction => "7a",
            NegativeInteraction => "7a-neg",
            UpdateDistribution => "10a",
            UpdateAtom => "10b",
            UpdateNegation => "10c",
            UpdateConjunction => "10d",
            UpdateKnowledge => "10e",
            Control => "control",
        }
    }

    /// Resolves one id. `1` names all four tautology templates.
    pub fn from_id(id: &str) -> Result<Vec<AxiomSchema>> {
        let found: Vec<AxiomSchema> = AxiomSchema::ALL
            .into_iter()
            .filter(|s| s.id() == id.trim())
            .collect();
        if found.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "unknown axiom scheme `{id}`"
            )));
        }
        Ok(found)
    }

    /// Resolves a comma separated list of ids; `all` is every sound scheme
    /// plus the control.
    pub fn parse_list(text: &str) -> Result<Vec<AxiomSchema>> {
        let mut out = Vec::new();
        for id in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let found = match id {
                "all" => AxiomSchema::ALL.to_vec(),
                "sound" => AxiomSchema::sound(),
                _ => AxiomSchema::from_id(id)?,
            };
            for s in found {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("no axiom schemes given".into()));
        }
        Ok(out)
    }

    /// Names of the metavariables this scheme reads.
    pub fn metavariables(self) -> &'static [&'static str] {
        use AxiomSchema::*;
        match self {
            Tautology(TautologyTemplate::Weakening)
            | Tautology(TautologyTemplate::Contraposition) => &["phi", "psi"],
            Tautology(TautologyTemplate::Distribution) => &["phi", "psi", "chi"],
            Tautology(TautologyTemplate::ExcludedMiddle) => &["phi"],
            Distribution => &["agent", "phi", "psi"],
            Truth | PositiveIntrospection | NegativeIntrospection => &["agent", "phi"],
            XiReflexive => &["agent", "sigma"],
            XiSymmetric | Interaction | NegativeInteraction => &["agent", "sigma", "sigma2"],
            XiTransitive => &["agent", "sigma", "sigma2", "sigma3"],
            UpdateDistribution | UpdateConjunction => &["sigma", "phi", "psi"],
            UpdateAtom => &["sigma", "prop"],
            UpdateNegation => &["sigma", "phi"],
            UpdateKnowledge | Control => &["sigma", "agent", "phi"],
        }
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AxiomSchema {
    type Err = Error;

    /// Accepts any id naming exactly one scheme.
    fn from_str(s: &str) -> Result<Self> {
        match AxiomSchema::from_id(s)?.as_slice() {
            [one] => Ok(*one),
            _ => Err(Error::InvalidArgument(format!(
                "`{s}` names several schemes"
            ))),
        }
    }
}

fn need<T: Clone>(value: &Option<T>, name: &'static str) -> Result<T> {
    value.clone().ok_or(Error::MissingBinding(name))
}

/// Fills in a scheme. `pre_σ` is read from `sig`.
pub fn instantiate(schema: AxiomSchema, b: &Bindings, sig: &Signature) -> Result<Formula> {
    use AxiomSchema::*;
    let phi = || need(&b.phi, "phi");
    let psi = || need(&b.psi, "psi");
    let chi = || need(&b.chi, "chi");
    let agent = || need(&b.agent, "agent");
    let sigma = || need(&b.sigma, "sigma");
    let sigma2 = || need(&b.sigma2, "sigma2");
    let sigma3 = || need(&b.sigma3, "sigma3");
    let pre = |s: &ActionId| {
        sig.pre(s)
            .cloned()
            .ok_or_else(|| Error::UnknownAction(s.to_string()))
    };
    let imp = Formula::implies;
    Ok(match schema {
        Tautology(t) => match t {
            TautologyTemplate::Weakening => imp(phi()?, imp(psi()?, phi()?)),
            TautologyTemplate::Distribution => {
                let (p, q, r) = (phi()?, psi()?, chi()?);
                imp(
                    imp(p.clone(), imp(q.clone(), r.clone())),
                    imp(imp(p.clone(), q), imp(p, r)),
                )
            }
            TautologyTemplate::Contraposition => {
                let (p, q) = (phi()?, psi()?);
                imp(
                    imp(Formula::not(p.clone()), Formula::not(q.clone())),
                    imp(q, p),
                )
            }
            TautologyTemplate::ExcludedMiddle => {
                let p = phi()?;
                Formula::or(p.clone(), Formula::not(p))
            }
        },
        Distribution => {
            let (a, p, q) = (agent()?, phi()?, psi()?);
            imp(
                Formula::knows(a.clone(), imp(p.clone(), q.clone())),
                imp(Formula::knows(a.clone(), p), Formula::knows(a, q)),
            )
        }
        Truth => {
            let p = phi()?;
            imp(Formula::knows(agent()?, p.clone()), p)
        }
        PositiveIntrospection => {
            let k = Formula::knows(agent()?, phi()?);
            imp(k.clone(), Formula::knows(agent()?, k))
        }
        NegativeIntrospection => {
            let nk = Formula::not(Formula::knows(agent()?, phi()?));
            imp(nk.clone(), Formula::knows(agent()?, nk))
        }
        XiReflexive => Formula::xi(agent()?, sigma()?, sigma()?),
        XiSymmetric => imp(
            Formula::xi(agent()?, sigma()?, sigma2()?),
            Formula::xi(agent()?, sigma2()?, sigma()?),
        ),
        XiTransitive => imp(
            Formula::xi(agent()?, sigma()?, sigma2()?),
            imp(
                Formula::xi(agent()?, sigma2()?, sigma3()?),
                Formula::xi(agent()?, sigma()?, sigma3()?),
            ),
        ),
        Interaction => {
            let x = Formula::xi(agent()?, sigma()?, sigma2()?);
            imp(x.clone(), Formula::knows(agent()?, x))
        }
        NegativeInteraction => {
            let nx = Formula::not(Formula::xi(agent()?, sigma()?, sigma2()?));
            imp(nx.clone(), Formula::knows(agent()?, nx))
        }
        UpdateDistribution => {
            let (s, p, q) = (sigma()?, phi()?, psi()?);
            imp(
                Formula::update(s.clone(), imp(p.clone(), q.clone())),
                imp(Formula::update(s.clone(), p), Formula::update(s, q)),
            )
        }
        UpdateAtom => {
            let s = sigma()?;
            let p = Formula::Atom(need(&b.prop, "prop")?);
            Formula::iff(Formula::update(s.clone(), p.clone()), imp(pre(&s)?, p))
        }
        UpdateNegation => {
            let (s, p) = (sigma()?, phi()?);
            Formula::iff(
                Formula::update(s.clone(), Formula::not(p.clone())),
                imp(pre(&s)?, Formula::not(Formula::update(s, p))),
            )
        }
        UpdateConjunction => {
            let (s, p, q) = (sigma()?, phi()?, psi()?);
            Formula::iff(
                Formula::update(s.clone(), Formula::and(p.clone(), q.clone())),
                Formula::and(Formula::update(s.clone(), p), Formula::update(s, q)),
            )
        }
        UpdateKnowledge => {
            let (s, a, p) = (sigma()?, agent()?, phi()?);
            let conjuncts = sig.actions().map(|other| {
                imp(
                    Formula::xi(a.clone(), s.clone(), other.clone()),
                    Formula::knows(a.clone(), Formula::update(other.clone(), p.clone())),
                )
            });
            let all = Formula::conjunction(conjuncts).ok_or(Error::EmptyActionSet)?;
            Formula::iff(
                Formula::update(s.clone(), Formula::knows(a, p)),
                imp(pre(&s)?, all),
            )
        }
        Control => {
            let (s, a, p) = (sigma()?, agent()?, phi()?);
            Formula::iff(
                Formula::update(s.clone(), Formula::knows(a.clone(), p.clone())),
                Formula::knows(a, Formula::update(s, p)),
            )
        }
    })
}
