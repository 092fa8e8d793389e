//! One pass/fail line per acceptance criterion. Exits non-zero when any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use epikit::dynamic::embed_action_model;
use epikit::fixtures;
use epikit::reduction::random::{random_scenario, FormulaParams, Generator, ModelParams};
use epikit::reduction::FuzzParams;
use epikit::{
    bisimilar, check_translation_equivalence, parse_formula, product_update,
    public_announcement_model, restrict, soundness_fuzz, translate, AxiomSchema, EpistemicModel,
    Error, EvalContext, Formula, Fragment, Signature, WorldId,
};

const FIRST_UPDATE_BUDGET: Duration = Duration::from_millis(10);
const CORRESPONDENCE_BUDGET: Duration = Duration::from_millis(50);
const CLOSURE_BUDGET: Duration = Duration::from_secs(5);
const FUZZ_BUDGET: Duration = Duration::from_secs(10);

const CLOSURE_MODELS: usize = 1000;
const EMBEDDING_PAIRS: usize = 500;
const PAL_PAIRS: usize = 200;
const FUZZ_TRIALS: usize = 500;
const TRANSLATION_PAIRS: usize = 1000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn f(text: &str, sig: &Signature) -> Formula {
    parse_formula(text, sig).expect("formula parses")
}

fn valid(m: &EpistemicModel, text: &str, sig: &Signature) -> Result<bool, String> {
    EvalContext::new(m.clone())
        .is_valid(&f(text, sig))
        .map_err(|e| e.to_string())
}

fn expect_valid(m: &EpistemicModel, sig: &Signature, formulas: &[&str]) -> Result<(), String> {
    for text in formulas {
        if !valid(m, text, sig)? {
            return Err(format!("`{text}` is not valid"));
        }
    }
    Ok(())
}

fn within(start: Instant, budget: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    if took < budget {
        Ok(took)
    } else {
        Err(format!("took {took:?}, budget {budget:?}"))
    }
}

fn bob_learns() -> Outcome {
    let sig = fixtures::sig_m0();
    let start = Instant::now();
    let m = product_update(&fixtures::m0(), &fixtures::a0()).map_err(|e| e.to_string())?;
    expect_valid(&m, &sig, &["K_b p | K_b !p", "!(K_a p | K_a !p)"])?;
    let took = within(start, FIRST_UPDATE_BUDGET)?;
    Ok(format!("{took:?}"))
}

fn higher_order() -> Outcome {
    let sig = fixtures::sig_m0();
    let m = product_update(&fixtures::m0(), &fixtures::a0()).map_err(|e| e.to_string())?;
    expect_valid(&m, &sig, &["K_a (K_b p | K_b !p)", "K_b !(K_a p | K_a !p)"])?;
    Ok("both valid".into())
}

fn anne_unsure() -> Outcome {
    let sig = fixtures::sig_a1();
    let m = product_update(&fixtures::m1(), &fixtures::a1()).map_err(|e| e.to_string())?;
    let mut ctx = EvalContext::new(m);
    let at = WorldId::pair("w0".into(), "sp");
    let phi = f("Khat_a (K_b p | K_b !p) & Khat_a (!K_b p & !K_b !p)", &sig);
    if !ctx.eval(&at, &phi).map_err(|e| e.to_string())? {
        return Err("Anne's uncertainty formula fails at (w0,sp)".into());
    }
    let holding = ctx
        .worlds_satisfying(&f("K_b p | K_b !p", &sig))
        .map_err(|e| e.to_string())?;
    let want = vec![
        WorldId::pair("w0".into(), "sp"),
        WorldId::pair("w1".into(), "snp"),
    ];
    if holding != want {
        return Err(format!("K_b p | K_b !p holds at {holding:?}"));
    }
    Ok("truth set {(w0,sp), (w1,snp)}".into())
}

fn adjusted_action_model() -> Outcome {
    let sig = fixtures::sig_a2();
    let m = product_update(&fixtures::m1(), &fixtures::a2()).map_err(|e| e.to_string())?;
    expect_valid(&m, &sig, &["K_a p | K_a !p", "!K_a q & !K_a !q"])?;
    Ok(format!("{} worlds", m.world_count()))
}

fn correspondence() -> Outcome {
    let start = Instant::now();
    let pairs =
        |d: &epikit::DynamicModel, a: &epikit::ActionModel, names: [(&str, &str, &str); 4]| {
            let plus = d.update_plus().map_err(|e| e.to_string())?;
            let product = product_update(&fixtures::m1(), a).map_err(|e| e.to_string())?;
            for (w, s, t) in names {
                let left = WorldId::pair(w.into(), s);
                let right = WorldId::pair(w.into(), t);
                if !bisimilar(plus.base(), &left, &product, &right).map_err(|e| e.to_string())? {
                    return Err(format!("{left} and {right} are not bisimilar"));
                }
            }
            Ok::<(), String>(())
        };
    pairs(
        &fixtures::m1_tilde(),
        &fixtures::a1(),
        [
            ("w0", "sp", "sp"),
            ("w1", "snp", "snp"),
            ("w2", "sp", "s"),
            ("w3", "snp", "s"),
        ],
    )?;
    pairs(
        &fixtures::m1_tilde_prime(),
        &fixtures::a2(),
        [
            ("w0", "sp", "spq"),
            ("w1", "snp", "snpq"),
            ("w2", "sp", "spnq"),
            ("w3", "snp", "snpnq"),
        ],
    )?;
    let took = within(start, CORRESPONDENCE_BUDGET)?;
    Ok(format!("8 pairs bisimilar, {took:?}"))
}

fn closure_preserved() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < CLOSURE_MODELS {
        let mut g = Generator::new(seed ^ 0x00ac_ce97);
        let params = ModelParams::new(
            g.range(1, 6),
            g.range(1, 3),
            g.range(1, 3),
            g.range(1, 3),
            seed,
        );
        seed += 1;
        let (_, model) = random_scenario(params);
        match model.update_plus() {
            Ok(plus) => {
                let report = plus.validate();
                if !report.is_empty() {
                    return Err(format!("seed {}: {report}", params.seed));
                }
                checked += 1;
            }
            Err(Error::EmptyProduct) => {}
            Err(e) => return Err(format!("seed {}: {e}", params.seed)),
        }
    }
    let took = within(start, CLOSURE_BUDGET)?;
    Ok(format!("{checked} models, {seed} drawn, {took:?}"))
}

fn embedding() -> Outcome {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < EMBEDDING_PAIRS {
        let mut g = Generator::new(seed);
        seed += 1;
        let (agents, props, actions) = (g.range(1, 3), g.range(1, 3), g.range(1, 3));
        let sig = g.signature(agents, props, actions);
        let agents: Vec<_> = sig.agents().cloned().collect();
        let props: Vec<_> = sig.props().cloned().collect();
        let n = g.range(1, 6);
        let m = g.epistemic_model(n, &agents, &props);
        let a = g.action_model("A", &sig);
        let product = match product_update(&m, &a) {
            Ok(p) => p,
            Err(Error::EmptyProduct) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let plus = embed_action_model(&m, &a)
            .and_then(|d| d.update_plus())
            .map_err(|e| format!("seed {}: {e}", seed - 1))?;
        if !plus.base().same_as(&product) {
            return Err(format!(
                "seed {}: updated embedding differs from product",
                seed - 1
            ));
        }
        checked += 1;
    }
    Ok(format!("{checked} pairs identical"))
}

fn pal_subsumption() -> Outcome {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < PAL_PAIRS {
        let mut g = Generator::new(seed ^ 0x9a1);
        seed += 1;
        let (agents, props) = (g.range(1, 3), g.range(1, 3));
        let sig = g.signature(agents, props, 0);
        let agents: Vec<_> = sig.agents().cloned().collect();
        let props: Vec<_> = sig.props().cloned().collect();
        let n = g.range(1, 6);
        let m = g.epistemic_model(n, &agents, &props);
        let phi = g.formula(&sig, FormulaParams::EPISTEMIC);
        let restricted = match restrict(&m, &phi) {
            Ok(r) => r,
            Err(Error::EmptyRestriction) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let announce = public_announcement_model(&phi, m.agents()).map_err(|e| e.to_string())?;
        let product = product_update(&m, &announce).map_err(|e| e.to_string())?;
        for w in restricted.worlds() {
            let pair = WorldId::pair(w.clone(), "announce");
            if !bisimilar(&product, &pair, &restricted, w).map_err(|e| e.to_string())? {
                return Err(format!("seed {}: {pair} and {w} differ", seed - 1));
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} pairs bisimilar"))
}

fn soundness() -> Outcome {
    let start = Instant::now();
    let params = FuzzParams::default();
    let report = soundness_fuzz(&AxiomSchema::sound(), FUZZ_TRIALS, &params, 2024)
        .map_err(|e| e.to_string())?;
    if !report.is_clean() {
        return Err(format!("counterexample: {}", report.failures[0]));
    }
    let control = soundness_fuzz(&[AxiomSchema::Control], FUZZ_TRIALS, &params, 2024)
        .map_err(|e| e.to_string())?;
    let refuted = control.failures_for(AxiomSchema::Control);
    if refuted == 0 {
        return Err("control scheme never refuted".into());
    }
    let took = within(start, FUZZ_BUDGET)?;
    Ok(format!(
        "{} instances clean, control refuted {refuted} times, {took:?}",
        report.instances
    ))
}

fn translation() -> Outcome {
    let shape = FormulaParams {
        depth: 4,
        action_depth: 2,
        xi: true,
    };
    let mut checked = 0;
    for seed in 0..TRANSLATION_PAIRS as u64 {
        let mut g = Generator::new(seed ^ 0x7a4e);
        let params = ModelParams::new(
            g.range(1, 5),
            g.range(1, 3),
            g.range(1, 3),
            g.range(1, 3),
            seed,
        );
        let (sig, model) = random_scenario(params);
        let mut formulas = vec![g.formula(&sig, shape)];
        if seed % 4 == 0 {
            let s = sig.action_at(g.range(0, sig.action_count() - 1)).clone();
            let t = sig.action_at(g.range(0, sig.action_count() - 1)).clone();
            let a = sig.agents().next().expect("one agent").clone();
            let inner = g.formula(&sig, FormulaParams::EPISTEMIC);
            formulas.push(Formula::update(
                s.clone(),
                Formula::update(t.clone(), inner.clone()),
            ));
            formulas.push(Formula::update(
                s,
                Formula::update(t, Formula::knows(a, inner)),
            ));
        }
        for phi in formulas {
            let t = translate(&phi, &sig).map_err(|e| format!("seed {seed}: {e}"))?;
            if !t.is_in(Fragment::EpistemicXi) {
                return Err(format!("seed {seed}: translation keeps an update"));
            }
            if !check_translation_equivalence(&phi, &model).map_err(|e| e.to_string())? {
                return Err(format!("seed {seed}: truth sets differ for {phi}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} formulas equivalent"))
}

fn non_reducibility() -> Outcome {
    let (da, db) = (fixtures::d_a(), fixtures::d_b());
    let w0 = WorldId::named("w0");
    if !bisimilar(da.base(), &w0, db.base(), &w0).map_err(|e| e.to_string())? {
        return Err("epistemic parts are not bisimilar".into());
    }
    let phi = f("[sp] K_a p", da.sig());
    let a = EvalContext::new(da.clone())
        .eval(&w0, &phi)
        .map_err(|e| e.to_string())?;
    let b = EvalContext::new(db.clone())
        .eval(&w0, &phi)
        .map_err(|e| e.to_string())?;
    if !(a && !b) {
        return Err(format!("D_A gives {a}, D_B gives {b}"));
    }
    Ok("D_A true, D_B false".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Bob learns whether p, Anne stays ignorant", bob_learns),
        ("each knows what the other learned", higher_order),
        ("Anne unsure whether Bob learned p", anne_unsure),
        ("adjusted action model: Anne knows p, not q", adjusted_action_model),
        (
            "dynamic updates match the action-model products",
            correspondence,
        ),
        ("closure conditions survive the update", closure_preserved),
        ("embedded action models update like products", embedding),
        ("single announcements act as restriction", pal_subsumption),
        ("axiom soundness and control refutation", soundness),
        ("translation is update-free and equivalent", translation),
        (
            "bisimilar epistemic parts, different updates",
            non_reducibility,
        ),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {title}: {detail} [{took:.2?}]", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {reason} [{took:.2?}]", i + 1);
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
