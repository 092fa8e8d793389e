//! The worked examples: Anne (`a`) and Bob (`b`), Carl's message about `p`,
//! and who speaks French (`q` for Bob, `r` for Anne).

use std::sync::Arc;

use crate::action::ActionModel;
use crate::dynamic::{DynamicModel, GuardRule};
use crate::formula::{Formula, Signature};
use crate::kripke::{EpistemicModel, WorldId};
use crate::partition::Partition;

/// Agents `a`, `b`; atom `p`; `sp` announces `p`, `snp` announces `!p`.
pub fn sig_m0() -> Signature {
    Signature::new(["a", "b"], ["p"])
        .with_action("sp", "p")
        .and_then(|s| s.with_action("snp", "!p"))
        .expect("valid signature")
}

/// Neither agent knows whether `p`; `p` holds at `w0`.
pub fn m0() -> EpistemicModel {
    EpistemicModel::builder()
        .agents(["a", "b"])
        .worlds(["w0", "w1"])
        .edge("a", "w0", "w1")
        .edge("b", "w0", "w1")
        .truth("p", ["w0"])
        .build()
        .expect("valid model")
}

/// Carl tells Bob whether `p`; Anne cannot tell which message was sent.
pub fn a0() -> ActionModel {
    ActionModel::builder("A0", &sig_m0())
        .actions(["sp", "snp"])
        .edge("a", "sp", "snp")
        .build()
        .expect("valid action model")
}

/// `w0`: p,q. `w1`: !p,q. `w2`: p,!q. `w3`: !p,!q. Bob knows whether he
/// speaks French (`q`); Anne knows nothing.
pub fn m1() -> EpistemicModel {
    EpistemicModel::builder()
        .agents(["a", "b"])
        .worlds(["w0", "w1", "w2", "w3"])
        .edge("a", "w0", "w1")
        .edge("a", "w1", "w2")
        .edge("a", "w2", "w3")
        .edge("b", "w0", "w1")
        .edge("b", "w2", "w3")
        .truth("p", ["w0", "w2"])
        .truth("q", ["w0", "w1"])
        .build()
        .expect("valid model")
}

/// Carl's message split by whether Bob understands it.
pub fn sig_a1() -> Signature {
    Signature::new(["a", "b"], ["p", "q"])
        .with_action("sp", "p & q")
        .and_then(|s| s.with_action("snp", "!p & q"))
        .and_then(|s| s.with_action("s", "!q"))
        .expect("valid signature")
}

pub fn a1() -> ActionModel {
    ActionModel::builder("A1", &sig_a1())
        .actions(["sp", "snp", "s"])
        .edge("a", "sp", "snp")
        .edge("a", "snp", "s")
        .build()
        .expect("valid action model")
}

/// One action per combination of `p` and `q`.
pub fn sig_a2() -> Signature {
    Signature::new(["a", "b"], ["p", "q"])
        .with_action("spq", "p & q")
        .and_then(|s| s.with_action("snpq", "!p & q"))
        .and_then(|s| s.with_action("spnq", "p & !q"))
        .and_then(|s| s.with_action("snpnq", "!p & !q"))
        .expect("valid signature")
}

/// Anne speaks French and distinguishes `p` from `!p`; Bob does only when
/// he speaks French.
pub fn a2() -> ActionModel {
    ActionModel::builder("A2", &sig_a2())
        .actions(["spq", "snpq", "spnq", "snpnq"])
        .edge("a", "spq", "spnq")
        .edge("a", "snpq", "snpnq")
        .edge("b", "spnq", "snpnq")
        .build()
        .expect("valid action model")
}

/// The two-message action set over `p` and `q`.
pub fn sig_dynamic() -> Signature {
    Signature::new(["a", "b"], ["p", "q"])
        .with_action("sp", "p")
        .and_then(|s| s.with_action("snp", "!p"))
        .expect("valid signature")
}

fn rule(agent: &str, guard: Option<&str>, partition: Partition) -> GuardRule {
    GuardRule {
        agent: agent.into(),
        guard: guard.map(|g| crate::parser::parse_formula_unchecked(g).expect("valid guard")),
        partition,
    }
}

fn m1_dynamic(anne: Partition) -> DynamicModel {
    DynamicModel::from_guards(
        m1(),
        Arc::new(sig_dynamic()),
        &[
            rule("a", None, anne),
            rule("b", Some("q"), Partition::discrete(2)),
            rule("b", None, Partition::total(2)),
        ],
    )
    .expect("valid dynamic model")
}

/// Bob tells the messages apart exactly when he speaks French; Anne never.
pub fn m1_tilde() -> DynamicModel {
    m1_dynamic(Partition::total(2))
}

/// As [`m1_tilde`], but Anne always tells the messages apart.
pub fn m1_tilde_prime() -> DynamicModel {
    m1_dynamic(Partition::discrete(2))
}

/// Index bits of `w<i>`: bit 0 set means `!p`, bit 1 `!q`, bit 2 `!r`. Anne
/// knows whether she speaks French (`r`), Bob whether he does (`q`).
pub fn m2() -> EpistemicModel {
    let name = |i: usize| WorldId::named(format!("w{i}"));
    let mut b = EpistemicModel::builder()
        .agents(["a", "b"])
        .worlds((0..8).map(name));
    for i in 0..8usize {
        for j in (i + 1)..8 {
            if (i >> 2) & 1 == (j >> 2) & 1 {
                b = b.edge("a", name(i), name(j));
            }
            if (i >> 1) & 1 == (j >> 1) & 1 {
                b = b.edge("b", name(i), name(j));
            }
        }
    }
    let with = |bit: usize| (0..8).filter(move |i| (i >> bit) & 1 == 0).map(name);
    b.truth("p", with(0))
        .truth("q", with(1))
        .truth("r", with(2))
        .build()
        .expect("valid model")
}

pub fn sig_m2() -> Signature {
    Signature::new(["a", "b"], ["p", "q", "r"])
        .with_action("sp", "p")
        .and_then(|s| s.with_action("snp", "!p"))
        .expect("valid signature")
}

/// Each agent tells Carl's messages apart exactly when they speak French.
pub fn m2_tilde() -> DynamicModel {
    DynamicModel::from_guards(
        m2(),
        Arc::new(sig_m2()),
        &[
            rule("a", Some("r"), Partition::discrete(2)),
            rule("a", None, Partition::total(2)),
            rule("b", Some("q"), Partition::discrete(2)),
            rule("b", None, Partition::total(2)),
        ],
    )
    .expect("valid dynamic model")
}

fn over_m0(anne: Partition) -> DynamicModel {
    DynamicModel::from_guards(
        m0(),
        Arc::new(sig_m0()),
        &[
            rule("a", None, anne),
            rule("b", None, Partition::discrete(2)),
        ],
    )
    .expect("valid dynamic model")
}

/// `M0` where Anne always tells the messages apart.
pub fn d_a() -> DynamicModel {
    over_m0(Partition::discrete(2))
}

/// `M0` where Anne never tells the messages apart.
pub fn d_b() -> DynamicModel {
    over_m0(Partition::total(2))
}

/// `p | !p`.
pub fn top() -> Formula {
    Formula::tautology("p")
}
