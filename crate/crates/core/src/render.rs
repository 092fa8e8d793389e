use crate::formula::Formula;

// Binding strength, loosest first. `<->` is never emitted.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;
const ATOM: u8 = 5;

/// Renders a formula in the concrete syntax accepted by the parser, with the
/// fewest parentheses that still parse back to the same tree.
///
/// `¬(¬φ ∧ ¬ψ)` prints as `φ | ψ` and `¬(φ ∧ ¬ψ)` as `φ -> ψ`; both shapes are
/// exactly what the parser produces for those connectives.
pub fn render_formula(phi: &Formula) -> String {
    render(phi).0
}

fn wrap(phi: &Formula, min: u8) -> String {
    let (text, level) = render(phi);
    if level < min {
        format!("({text})")
    } else {
        text
    }
}

// `¬(φ ∧ ¬ψ)` under a negation reads better as a parenthesised `->` on the
// left of another `->` than as a conjunction on the left of `|`.
fn is_implication(phi: &Formula) -> bool {
    matches!(phi, Formula::And(_, rhs) if matches!(rhs.as_ref(), Formula::Not(_)))
}

fn render(phi: &Formula) -> (String, u8) {
    match phi {
        Formula::Atom(p) => (p.to_string(), ATOM),
        Formula::Xi {
            agent,
            performed,
            confusable,
        } => (format!("xi({agent}, {performed}, {confusable})"), ATOM),
        Formula::Not(inner) => {
            if let Formula::And(lhs, rhs) = inner.as_ref() {
                if let Formula::Not(rhs) = rhs.as_ref() {
                    if let Formula::Not(inner_lhs) = lhs.as_ref() {
                        if !is_implication(inner_lhs) {
                            return (format!("{} | {}", wrap(inner_lhs, OR), wrap(rhs, AND)), OR);
                        }
                    }
                    return (format!("{} -> {}", wrap(lhs, OR), wrap(rhs, IMP)), IMP);
                }
            }
            (format!("!{}", wrap(inner, UNARY)), UNARY)
        }
        Formula::And(lhs, rhs) => (format!("{} & {}", wrap(lhs, AND), wrap(rhs, UNARY)), AND),
        Formula::Knows(agent, inner) => (format!("K_{agent} {}", wrap(inner, UNARY)), UNARY),
        Formula::UpdateDyn(action, inner) => (format!("[{action}] {}", wrap(inner, UNARY)), UNARY),
        Formula::UpdateAM {
            model,
            action,
            body,
        } => (format!("[{model}:{action}] {}", wrap(body, UNARY)), UNARY),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula_unchecked;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn renders_core_shapes() {
        assert_eq!(render_formula(&Formula::knows("a", p())), "K_a p");
        assert_eq!(
            render_formula(&Formula::not(Formula::knows("a", Formula::not(p())))),
            "!K_a !p"
        );
        assert_eq!(
            render_formula(&Formula::update_am("A0", "sp", p())),
            "[A0:sp] p"
        );
    }

    #[test]
    fn renders_sugar_with_minimal_parens() {
        let q = Formula::atom("q");
        let or = Formula::or(p(), q.clone());
        assert_eq!(render_formula(&or), "p | q");
        assert_eq!(
            render_formula(&Formula::and(or.clone(), q.clone())),
            "(p | q) & q"
        );
        assert_eq!(
            render_formula(&Formula::implies(Formula::implies(p(), q.clone()), p())),
            "(p -> q) -> p"
        );
        assert_eq!(
            render_formula(&Formula::implies(p(), Formula::implies(q.clone(), p()))),
            "p -> q -> p"
        );
        assert_eq!(render_formula(&Formula::knows("b", or)), "K_b (p | q)");
    }

    #[test]
    fn reparses_structurally() {
        for text in [
            "p -> (xi(b, sp, sp) -> K_b (p -> p)) & (xi(b, sp, snp) -> K_b (!p -> p))",
            "Khat_a (K_b p | K_b !p) & Khat_a (!K_b p & !K_b !p)",
            "[sp] [snp] p <-> q",
            "!(p & q) & !!p",
        ] {
            let phi = parse_formula_unchecked(text).unwrap();
            let again = parse_formula_unchecked(&render_formula(&phi)).unwrap();
            assert_eq!(phi, again, "{text}");
        }
    }
}
