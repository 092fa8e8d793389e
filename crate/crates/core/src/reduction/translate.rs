use crate::error::{Error, Result};
use crate::formula::{ActionId, Formula, Fragment, Signature};

/// Recursive calls allowed by [`translate`].
pub const DEFAULT_FUEL: u64 = 50_000_000;

/// A translation with the number of recursive steps it took.
#[derive(Clone, PartialEq, Debug)]
pub struct Translation {
    pub formula: Formula,
    pub steps: u64,
}

/// Rewrites a formula with `[σ]` operators into an equivalent update-free
/// formula over knowledge and `xi` atoms.
///
/// `[σ]` is pushed inward clause by clause: atoms and `xi` atoms become
/// `pre_σ -> _`, negation and conjunction distribute, and `[σ]K_a φ`
/// expands over every `σ'` agent `a` may confuse with `σ`. A nested
/// `[σ][σ']φ` translates the inner update first.
pub fn translate(phi: &Formula, sig: &Signature) -> Result<Formula> {
    translate_with_fuel(phi, sig, DEFAULT_FUEL).map(|t| t.formula)
}

/// As [`translate`], failing with `FuelExhausted` after `fuel` steps.
pub fn translate_with_fuel(phi: &Formula, sig: &Signature, fuel: u64) -> Result<Translation> {
    phi.require(Fragment::DynamicXi)?;
    let mut t = Translator {
        sig,
        fuel,
        steps: 0,
    };
    let formula = t.plain(phi)?;
    Ok(Translation {
        formula,
        steps: t.steps,
    })
}

struct Translator<'s> {
    sig: &'s Signature,
    fuel: u64,
    steps: u64,
}

impl Translator<'_> {
    fn tick(&mut self) -> Result<()> {
        if self.steps >= self.fuel {
            return Err(Error::FuelExhausted);
        }
        self.steps += 1;
        Ok(())
    }

    fn pre(&self, action: &ActionId) -> Result<Formula> {
        self.sig
            .pre(action)
            .cloned()
            .ok_or_else(|| Error::UnknownAction(action.to_string()))
    }

    fn plain(&mut self, phi: &Formula) -> Result<Formula> {
        self.tick()?;
        Ok(match phi {
            Formula::Atom(_) | Formula::Xi { .. } => phi.clone(),
            Formula::Not(inner) => Formula::not(self.plain(inner)?),
            Formula::And(lhs, rhs) => Formula::and(self.plain(lhs)?, self.plain(rhs)?),
            Formula::Knows(agent, inner) => {
                Formula::Knows(agent.clone(), Box::new(self.plain(inner)?))
            }
            Formula::UpdateDyn(action, body) => self.update(action, body)?,
            Formula::UpdateAM { .. } => unreachable!("rejected by the fragment check"),
        })
    }

    /// `t([action] body)`.
    fn update(&mut self, action: &ActionId, body: &Formula) -> Result<Formula> {
        self.tick()?;
        let pre = self.pre(action)?;
        Ok(match body {
            Formula::Atom(_) | Formula::Xi { .. } => Formula::implies(pre, body.clone()),
            Formula::Not(inner) => Formula::implies(pre, Formula::not(self.update(action, inner)?)),
            Formula::And(lhs, rhs) => {
                Formula::and(self.update(action, lhs)?, self.update(action, rhs)?)
            }
            Formula::Knows(agent, inner) => {
                let mut conjuncts = Vec::with_capacity(self.sig.action_count());
                for i in 0..self.sig.action_count() {
                    let other = self.sig.action_at(i).clone();
                    let translated = self.update(&other, inner)?;
                    conjuncts.push(Formula::implies(
                        Formula::xi(agent.clone(), action.clone(), other),
                        Formula::Knows(agent.clone(), Box::new(translated)),
                    ));
                }
                let all = Formula::conjunction(conjuncts).ok_or(Error::EmptyActionSet)?;
                Formula::implies(pre, all)
            }
            Formula::UpdateDyn(other, inner) => {
                let reduced = self.update(other, inner)?;
                self.update(action, &reduced)?
            }
            Formula::UpdateAM { .. } => unreachable!("rejected by the fragment check"),
        })
    }
}
