//! JSON scenario files: a signature, named models and a list of checks.
//!
//! ```json
//! {
//!   "agents": ["a", "b"],
//!   "props": ["p"],
//!   "actions": {"sp": "p", "snp": "!p"},
//!   "epistemic": {"M0": {"worlds": ["w0", "w1"], "val": {"p": ["w0"]},
//!                        "edges": [["a", "w0", "w1"], ["b", "w0", "w1"]]}},
//!   "action_models": {"A0": {"actions": ["sp", "snp"], "edges": [["a", "sp", "snp"]]}},
//!   "dynamic": {"D": {"base": "M0", "f": [{"agent": "a", "partition": "total"},
//!                                         {"agent": "b", "partition": "identity"}]}},
//!   "checks": [{"model": "M0^A0", "world": "(w0,sp)", "formula": "K_b p", "expect": true}]
//! }
//! ```
//!
//! A model reference is a model name followed by any sequence of `^A`
//! (product update of an epistemic model with action model `A`) and `+`
//! (the update of a dynamic model). Checks without a world test validity;
//! `expect` may also be a list of worlds (the exact truth set) or `"report"`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{product_update, ActionModel};
use crate::dynamic::{embed_action_model, DynamicModel, GuardRule};
use crate::error::Error;
use crate::formula::{ActionId, AgentId, Formula, Signature};
use crate::kripke::{bisimilar, EpistemicModel, WorldId};
use crate::parser::parse_formula;
use crate::partition::Partition;
use crate::semantics::{EvalContext, Model};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{context}: {source}")]
    Validation {
        context: String,
        #[source]
        source: Error,
    },
}

fn invalid(context: impl Into<String>) -> impl FnOnce(Error) -> ScenarioError {
    let context = context.into();
    move |source| ScenarioError::Validation { context, source }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    agents: Vec<String>,
    props: Vec<String>,
    #[serde(default)]
    actions: IndexMap<String, String>,
    #[serde(default)]
    epistemic: IndexMap<String, RawEpistemic>,
    #[serde(default)]
    action_models: IndexMap<String, RawActionModel>,
    #[serde(default)]
    dynamic: IndexMap<String, RawDynamic>,
    #[serde(default)]
    checks: Vec<RawCheck>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEpistemic {
    worlds: Vec<String>,
    #[serde(default)]
    val: IndexMap<String, Vec<String>>,
    #[serde(default)]
    edges: Vec<(String, String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawActionModel {
    actions: Vec<String>,
    #[serde(default)]
    edges: Vec<(String, String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDynamic {
    base: String,
    #[serde(default)]
    actions: Option<Vec<String>>,
    #[serde(default)]
    f: Vec<RawRule>,
    #[serde(default)]
    f_edges: Vec<(String, String, String, String)>,
    #[serde(default)]
    embed: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    agent: String,
    #[serde(default)]
    guard: Option<String>,
    partition: RawPartition,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPartition {
    Named(String),
    Blocks(Vec<Vec<String>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    model: Option<String>,
    #[serde(default)]
    world: Option<String>,
    #[serde(default)]
    formula: Option<String>,
    #[serde(default)]
    bisim: Option<[String; 4]>,
    #[serde(default)]
    validate: Option<String>,
    expect: RawExpect,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawExpect {
    Bool(bool),
    Worlds(Vec<String>),
    Report(String),
}

/// What a formula check expects.
#[derive(Clone, PartialEq, Debug)]
pub enum Expect {
    Bool(bool),
    /// The exact set of worlds where the formula holds.
    Worlds(BTreeSet<WorldId>),
    /// Record the result without judging it.
    Report,
}

#[derive(Clone, PartialEq, Debug)]
pub enum CheckKind {
    /// Truth at `world`, or validity when `world` is absent.
    Formula {
        model: String,
        world: Option<WorldId>,
        formula: Formula,
        expect: Expect,
    },
    Bisim {
        left: (String, WorldId),
        right: (String, WorldId),
        expect: bool,
    },
    /// Whether the closure conditions hold for a dynamic model reference.
    Validate { model: String, expect: bool },
}

#[derive(Clone, PartialEq, Debug)]
pub struct Check {
    pub name: Option<String>,
    pub kind: CheckKind,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            return f.write_str(name);
        }
        match &self.kind {
            CheckKind::Formula {
                model,
                world,
                formula,
                ..
            } => match world {
                Some(w) => write!(f, "{model}, {w} |= {formula}"),
                None => write!(f, "{model} |= {formula}"),
            },
            CheckKind::Bisim { left, right, .. } => {
                write!(f, "{}, {} <-> {}, {}", left.0, left.1, right.0, right.1)
            }
            CheckKind::Validate { model, .. } => write!(f, "validate {model}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub index: usize,
    pub check: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// A loaded scenario. Every model is built and validated on load.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub sig: Arc<Signature>,
    pub epistemic: IndexMap<String, EpistemicModel>,
    pub action_models: IndexMap<String, ActionModel>,
    pub dynamic: IndexMap<String, DynamicModel>,
    pub checks: Vec<Check>,
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Scenario::from_json(&text)
}

fn world_id(name: &str, context: &str) -> Result<WorldId, ScenarioError> {
    name.parse().map_err(|_| ScenarioError::Validation {
        context: context.to_string(),
        source: Error::UnknownWorld(name.to_string()),
    })
}

fn partition(
    raw: &RawPartition,
    sig: &Signature,
    context: &str,
) -> Result<Partition, ScenarioError> {
    let k = sig.action_count();
    Ok(match raw {
        RawPartition::Named(name) => match name.as_str() {
            "identity" | "discrete" => Partition::discrete(k),
            "total" => Partition::total(k),
            other => {
                return Err(invalid(context)(Error::InvalidPartition(format!(
                    "unknown partition `{other}`, expected identity, total or a list of blocks"
                ))))
            }
        },
        RawPartition::Blocks(blocks) => {
            let mut indexed: Vec<Vec<usize>> = Vec::new();
            let mut seen = BTreeSet::new();
            for block in blocks {
                let mut b = Vec::new();
                for a in block {
                    let i = sig
                        .action_index(&ActionId::new(a))
                        .ok_or_else(|| invalid(context)(Error::UnknownAction(a.clone())))?;
                    seen.insert(i);
                    b.push(i);
                }
                indexed.push(b);
            }
            indexed.extend((0..k).filter(|i| !seen.contains(i)).map(|i| vec![i]));
            Partition::from_blocks(k, &indexed).map_err(invalid(context))?
        }
    })
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut sig = Signature::new(
            raw.agents.iter().map(String::as_str),
            raw.props.iter().map(String::as_str),
        );
        for (name, pre) in &raw.actions {
            sig.add_action_text(name.as_str(), pre)
                .map_err(invalid(format!("action `{name}`")))?;
        }
        let sig = Arc::new(sig);

        let mut epistemic = IndexMap::new();
        for (name, m) in &raw.epistemic {
            let context = format!("epistemic model `{name}`");
            let mut b = EpistemicModel::builder()
                .agents(sig.agents().cloned())
                .worlds(
                    m.worlds
                        .iter()
                        .map(|w| world_id(w, &context))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            for (agent, from, to) in &m.edges {
                b = b.edge(
                    agent.as_str(),
                    world_id(from, &context)?,
                    world_id(to, &context)?,
                );
            }
            for (prop, worlds) in &m.val {
                if !sig.has_prop(&prop.as_str().into()) {
                    return Err(invalid(context)(Error::InvalidArgument(format!(
                        "undeclared proposition `{prop}`"
                    ))));
                }
                let ws = worlds
                    .iter()
                    .map(|w| world_id(w, &context))
                    .collect::<Result<Vec<_>, _>>()?;
                b = b.truth(prop.as_str(), ws);
            }
            epistemic.insert(name.clone(), b.build().map_err(invalid(context))?);
        }

        let mut action_models = IndexMap::new();
        for (name, a) in &raw.action_models {
            let mut b =
                ActionModel::builder(name, &sig).actions(a.actions.iter().map(String::as_str));
            for (agent, x, y) in &a.edges {
                b = b.edge(agent.as_str(), x.as_str(), y.as_str());
            }
            let model = b
                .build()
                .map_err(invalid(format!("action model `{name}`")))?;
            action_models.insert(name.clone(), model);
        }

        let mut dynamic = IndexMap::new();
        for (name, d) in &raw.dynamic {
            let context = format!("dynamic model `{name}`");
            let base = epistemic.get(&d.base).cloned().ok_or_else(|| {
                invalid(context.clone())(Error::InvalidArgument(format!(
                    "unknown epistemic model `{}`",
                    d.base
                )))
            })?;
            let sources = [!d.f.is_empty(), !d.f_edges.is_empty(), d.embed.is_some()];
            if sources.iter().filter(|&&s| s).count() > 1 {
                return Err(invalid(context)(Error::InvalidArgument(
                    "give only one of `f`, `f_edges` and `embed`".into(),
                )));
            }
            let model = if let Some(a) = &d.embed {
                let a = action_models.get(a).ok_or_else(|| {
                    invalid(context.clone())(Error::UnboundActionModel(a.clone()))
                })?;
                embed_action_model(&base, a).map_err(invalid(context))?
            } else {
                let local = match &d.actions {
                    Some(list) => {
                        let ids: Vec<ActionId> = list.iter().map(ActionId::new).collect();
                        Arc::new(
                            sig.restrict_actions(&ids)
                                .map_err(invalid(context.clone()))?,
                        )
                    }
                    None => sig.clone(),
                };
                if d.f_edges.is_empty() {
                    let mut rules = Vec::new();
                    for r in &d.f {
                        let guard = match &r.guard {
                            Some(g) => Some(
                                parse_formula(g, &local)
                                    .map_err(|e| invalid(context.clone())(e.into()))?,
                            ),
                            None => None,
                        };
                        rules.push(GuardRule {
                            agent: AgentId::new(&r.agent),
                            guard,
                            partition: partition(&r.partition, &local, &context)?,
                        });
                    }
                    DynamicModel::from_guards(base, local, &rules).map_err(invalid(context))?
                } else {
                    let mut edges = Vec::new();
                    for (agent, w, s, t) in &d.f_edges {
                        edges.push((
                            AgentId::new(agent),
                            world_id(w, &context)?,
                            ActionId::new(s),
                            ActionId::new(t),
                        ));
                    }
                    DynamicModel::build(base, &edges, local).map_err(invalid(context))?
                }
            };
            dynamic.insert(name.clone(), model);
        }

        let mut scenario = Scenario {
            sig,
            epistemic,
            action_models,
            dynamic,
            checks: Vec::new(),
        };
        for (i, c) in raw.checks.iter().enumerate() {
            let check = scenario.check_from_raw(c, i)?;
            scenario.checks.push(check);
        }
        Ok(scenario)
    }

    fn check_from_raw(&self, c: &RawCheck, i: usize) -> Result<Check, ScenarioError> {
        let context = format!("check {i}");
        let bad = |msg: &str| invalid(context.clone())(Error::InvalidArgument(msg.to_string()));
        let boolean = |e: &RawExpect| match e {
            RawExpect::Bool(b) => Ok(*b),
            _ => Err(bad("`expect` must be true or false here")),
        };
        let kind = match (&c.formula, &c.bisim, &c.validate) {
            (Some(text), None, None) => {
                let model = c
                    .model
                    .clone()
                    .ok_or_else(|| bad("formula check without `model`"))?;
                let formula = parse_formula(text, &self.sig)
                    .map_err(|e| invalid(context.clone())(e.into()))?;
                let world = c
                    .world
                    .as_deref()
                    .map(|w| world_id(w, &context))
                    .transpose()?;
                let expect = match &c.expect {
                    RawExpect::Bool(b) => Expect::Bool(*b),
                    RawExpect::Worlds(ws) => {
                        if world.is_some() {
                            return Err(bad("a truth-set check takes no `world`"));
                        }
                        Expect::Worlds(
                            ws.iter()
                                .map(|w| world_id(w, &context))
                                .collect::<Result<_, _>>()?,
                        )
                    }
                    RawExpect::Report(s) if s == "report" => Expect::Report,
                    RawExpect::Report(_) => {
                        return Err(bad(
                            "`expect` must be a boolean, a world list or \"report\"",
                        ))
                    }
                };
                CheckKind::Formula {
                    model,
                    world,
                    formula,
                    expect,
                }
            }
            (None, Some([m1, w1, m2, w2]), None) => CheckKind::Bisim {
                left: (m1.clone(), world_id(w1, &context)?),
                right: (m2.clone(), world_id(w2, &context)?),
                expect: boolean(&c.expect)?,
            },
            (None, None, Some(model)) => CheckKind::Validate {
                model: model.clone(),
                expect: boolean(&c.expect)?,
            },
            _ => {
                return Err(bad(
                    "a check needs exactly one of `formula`, `bisim` and `validate`",
                ))
            }
        };
        Ok(Check {
            name: c.name.clone(),
            kind,
        })
    }

    /// Builds the model a reference names.
    pub fn resolve(&self, reference: &str) -> Result<Model, Error> {
        let split = reference.find(['^', '+']).unwrap_or(reference.len());
        let (base, mut rest) = reference.split_at(split);
        let mut model: Model = if let Some(m) = self.epistemic.get(base) {
            m.clone().into()
        } else if let Some(d) = self.dynamic.get(base) {
            d.clone().into()
        } else {
            return Err(Error::InvalidArgument(format!("unknown model `{base}`")));
        };
        while !rest.is_empty() {
            if let Some(tail) = rest.strip_prefix('+') {
                model = match model {
                    Model::Dynamic(d) => d.update_plus()?.into(),
                    Model::Epistemic(_) => {
                        return Err(Error::InvalidArgument(format!(
                            "`+` in `{reference}` needs a dynamic model"
                        )))
                    }
                };
                rest = tail;
            } else {
                let tail = &rest[1..];
                let end = tail.find(['^', '+']).unwrap_or(tail.len());
                let name = &tail[..end];
                let a = self
                    .action_models
                    .get(name)
                    .ok_or_else(|| Error::UnboundActionModel(name.to_string()))?;
                model = match model {
                    Model::Epistemic(m) => product_update(&m, a)?.into(),
                    Model::Dynamic(_) => {
                        return Err(Error::InvalidArgument(format!(
                            "`^{name}` in `{reference}` needs an epistemic model"
                        )))
                    }
                };
                rest = &tail[end..];
            }
        }
        Ok(model)
    }

    /// An evaluation context with every action model bound.
    pub fn context(&self, reference: &str) -> Result<EvalContext, Error> {
        Ok(EvalContext::new(self.resolve(reference)?)
            .with_action_models(self.action_models.values().cloned()))
    }

    fn run_one(&self, check: &Check) -> Result<(String, String, bool), Error> {
        Ok(match &check.kind {
            CheckKind::Formula {
                model,
                world,
                formula,
                expect,
            } => {
                let mut ctx = self.context(model)?;
                let truth = ctx.truth_set(formula)?;
                let m = ctx.model().epistemic();
                let actual_bool = match world {
                    Some(w) => truth[m.require_index(w)?],
                    None => truth.iter().all(|&t| t),
                };
                let holding: BTreeSet<WorldId> = truth
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| t)
                    .map(|(i, _)| m.world(i).clone())
                    .collect();
                match expect {
                    Expect::Bool(b) => (b.to_string(), actual_bool.to_string(), actual_bool == *b),
                    Expect::Worlds(ws) => {
                        for w in ws {
                            m.require_index(w)?;
                        }
                        (world_set(ws), world_set(&holding), holding == *ws)
                    }
                    Expect::Report => {
                        let actual = match world {
                            Some(_) => actual_bool.to_string(),
                            None => world_set(&holding),
                        };
                        ("report".into(), actual, true)
                    }
                }
            }
            CheckKind::Bisim {
                left,
                right,
                expect,
            } => {
                let l = self.resolve(&left.0)?;
                let r = self.resolve(&right.0)?;
                let actual = bisimilar(l.epistemic(), &left.1, r.epistemic(), &right.1)?;
                (expect.to_string(), actual.to_string(), actual == *expect)
            }
            CheckKind::Validate { model, expect } => {
                let actual = match self.resolve(model)? {
                    Model::Dynamic(d) => d.validate(),
                    Model::Epistemic(_) => {
                        return Err(Error::InvalidArgument(format!(
                            "`{model}` is not a dynamic model"
                        )))
                    }
                };
                let ok = actual.is_empty();
                let shown = if ok {
                    "valid".to_string()
                } else {
                    actual.to_string()
                };
                let wanted = if *expect { "valid" } else { "invalid" };
                (wanted.to_string(), shown, ok == *expect)
            }
        })
    }

    /// Runs every check in declaration order. Evaluation errors become
    /// failed results carrying the diagnostic.
    pub fn run_checks(&self) -> Vec<CheckResult> {
        self.checks
            .iter()
            .enumerate()
            .map(|(index, check)| {
                let start = Instant::now();
                let outcome = self.run_one(check);
                let elapsed = start.elapsed();
                match outcome {
                    Ok((expected, actual, pass)) => CheckResult {
                        index,
                        check: check.to_string(),
                        expected,
                        actual,
                        pass,
                        error: None,
                        elapsed,
                    },
                    Err(e) => CheckResult {
                        index,
                        check: check.to_string(),
                        expected: String::new(),
                        actual: "error".into(),
                        pass: false,
                        error: Some(e.to_string()),
                        elapsed,
                    },
                }
            })
            .collect()
    }
}

fn world_set(ws: &BTreeSet<WorldId>) -> String {
    let names: Vec<String> = ws.iter().map(WorldId::to_string).collect();
    format!("{{{}}}", names.join(", "))
}

#[derive(Serialize)]
struct Summary<'a> {
    passed: usize,
    total: usize,
    results: &'a [CheckResult],
}

/// Results as pretty JSON. Timings are left out so equal inputs give equal
/// bytes.
pub fn results_json(results: &[CheckResult]) -> String {
    let summary = Summary {
        passed: results.iter().filter(|r| r.pass).count(),
        total: results.len(),
        results,
    };
    serde_json::to_string_pretty(&summary).expect("results serialise")
}
