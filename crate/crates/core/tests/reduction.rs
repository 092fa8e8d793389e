use epikit::fixtures;
use epikit::reduction::{instantiate, Bindings};
use epikit::{
    check_translation_equivalence, parse_formula, translate, AxiomSchema, DynamicModel,
    EvalContext, Formula, WorldId,
};

fn dynamic_fixtures() -> Vec<(&'static str, DynamicModel)> {
    vec![
        ("M1~", fixtures::m1_tilde()),
        ("M1~'", fixtures::m1_tilde_prime()),
        ("M2~", fixtures::m2_tilde()),
        ("D_A", fixtures::d_a()),
        ("D_B", fixtures::d_b()),
    ]
}

const FORMULAS: [&str; 10] = [
    "[sp] (K_b p | K_b !p)",
    "[sp] !(K_a p | K_a !p)",
    "[sp] K_a (K_b p | K_b !p)",
    "[snp] K_b !(K_a p | K_a !p)",
    "[sp] (Khat_a (K_b p | K_b !p) & Khat_a (!K_b p & !K_b !p))",
    "[sp] [snp] p",
    "[sp] [sp] K_a p",
    "[snp] K_b [sp] xi(a, sp, snp)",
    "K_a [sp] p -> [sp] K_a p",
    "!p & K_b p",
];

#[test]
fn translations_agree_on_every_fixture() {
    for (name, d) in dynamic_fixtures() {
        for text in FORMULAS {
            let phi = parse_formula(text, d.sig()).unwrap();
            assert!(
                check_translation_equivalence(&phi, &d).unwrap(),
                "{name}: {text}"
            );
        }
    }
}

#[test]
fn knowledge_clause_matches_semantics() {
    let d = fixtures::m1_tilde();
    let phi = parse_formula("[sp] K_b p", d.sig()).unwrap();
    let expected = parse_formula(
        "p -> ((xi(b, sp, sp) -> K_b (p -> p)) & (xi(b, sp, snp) -> K_b (!p -> p)))",
        d.sig(),
    )
    .unwrap();
    assert_eq!(translate(&phi, d.sig()).unwrap(), expected);
    let mut ctx = EvalContext::new(d);
    assert_eq!(
        ctx.truth_set(&phi).unwrap(),
        ctx.truth_set(&expected).unwrap()
    );
}

#[test]
fn update_free_formulas_translate_to_themselves() {
    let sig = fixtures::sig_dynamic();
    for text in [
        "K_a p",
        "!K_b (p & q)",
        "xi(a, sp, snp) -> K_a xi(a, sp, snp)",
    ] {
        let phi = parse_formula(text, &sig).unwrap();
        assert_eq!(translate(&phi, &sig).unwrap(), phi);
    }
}

#[test]
fn control_scheme_fails_where_anne_confuses_messages() {
    let d = fixtures::d_b();
    let b = Bindings {
        phi: Some(Formula::atom("p")),
        agent: Some("a".into()),
        sigma: Some("sp".into()),
        ..Bindings::default()
    };
    let control = instantiate(AxiomSchema::Control, &b, d.sig()).unwrap();
    let mut ctx = EvalContext::new(d.clone());
    assert!(!ctx.eval(&WorldId::named("w0"), &control).unwrap());
    let sound = instantiate(AxiomSchema::UpdateKnowledge, &b, d.sig()).unwrap();
    assert!(ctx.is_valid(&sound).unwrap());
}

#[test]
fn sound_instances_hold_on_fixtures() {
    for (name, d) in dynamic_fixtures() {
        let sig = d.sig().clone();
        let b = Bindings {
            phi: Some(parse_formula("K_b p | xi(a, sp, snp)", &sig).unwrap()),
            psi: Some(parse_formula("[snp] !p", &sig).unwrap()),
            chi: Some(Formula::atom("p")),
            agent: Some("b".into()),
            sigma: Some("sp".into()),
            sigma2: Some("snp".into()),
            sigma3: Some("sp".into()),
            prop: Some("p".into()),
        };
        let mut ctx = EvalContext::new(d);
        for schema in AxiomSchema::sound() {
            let phi = instantiate(schema, &b, &sig).unwrap();
            assert!(ctx.is_valid(&phi).unwrap(), "{name}: {schema}");
        }
    }
}
