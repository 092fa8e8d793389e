//! Graphviz output. Node and edge order follow world order, so equal models
//! give equal text.

use std::fmt::Write;

use crate::action::ActionModel;
use crate::dynamic::DynamicModel;
use crate::kripke::EpistemicModel;
use crate::partition::Partition;
use crate::render::render_formula;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One undirected edge per related pair, labelled with every agent that
/// cannot tell the two apart. Reflexive loops are left out.
fn edges<'a>(
    out: &mut String,
    names: &[String],
    relations: impl Iterator<Item = (&'a str, &'a Partition)> + Clone,
) {
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let agents: Vec<&str> = relations
                .clone()
                .filter(|(_, p)| p.related(i, j))
                .map(|(a, _)| a)
                .collect();
            if !agents.is_empty() {
                let _ = writeln!(
                    out,
                    "  {} -- {} [label={}];",
                    quote(&names[i]),
                    quote(&names[j]),
                    quote(&agents.join(","))
                );
            }
        }
    }
}

fn world_nodes(out: &mut String, model: &EpistemicModel) -> Vec<String> {
    let names: Vec<String> = model.worlds().iter().map(|w| w.to_string()).collect();
    for (i, name) in names.iter().enumerate() {
        let atoms: Vec<String> = model.true_props(i).iter().map(|p| p.to_string()).collect();
        let label = if atoms.is_empty() {
            name.clone()
        } else {
            format!("{name}\n{}", atoms.join(", "))
        };
        let _ = writeln!(out, "  {} [label={}];", quote(name), quote(&label));
    }
    names
}

fn world_edges(out: &mut String, model: &EpistemicModel, names: &[String]) {
    edges(
        out,
        names,
        model.relations().iter().map(|(a, p)| (a.as_str(), p)),
    );
}

pub fn epistemic_dot(name: &str, model: &EpistemicModel) -> String {
    let mut out = format!("graph {} {{\n  node [shape=ellipse];\n", quote(name));
    let names = world_nodes(&mut out, model);
    world_edges(&mut out, model, &names);
    out.push_str("}\n");
    out
}

pub fn action_dot(model: &ActionModel) -> String {
    let mut out = format!("graph {} {{\n  node [shape=box];\n", quote(model.name()));
    let names: Vec<String> = model.actions().iter().map(|a| a.to_string()).collect();
    for (i, name) in names.iter().enumerate() {
        let label = format!("{name}\npre: {}", render_formula(model.pre(i)));
        let _ = writeln!(out, "  {} [label={}];", quote(name), quote(&label));
    }
    edges(
        &mut out,
        &names,
        model.relations().iter().map(|(a, p)| (a.as_str(), p)),
    );
    out.push_str("}\n");
    out
}

/// The epistemic part plus one note per agent listing `f` on each class.
pub fn dynamic_dot(name: &str, model: &DynamicModel) -> String {
    let base = model.base();
    let mut out = format!("graph {} {{\n  node [shape=ellipse];\n", quote(name));
    let names = world_nodes(&mut out, base);
    world_edges(&mut out, base, &names);
    for agent in model.agents() {
        let Some(table) = model.f_table(agent) else {
            continue;
        };
        let mut label = format!("f_{agent}");
        for (class, p) in table {
            let worlds: Vec<&str> = class.iter().map(|&w| names[w].as_str()).collect();
            let _ = write!(
                label,
                "\n{{{}}}: {}",
                worlds.join(", "),
                model.partition_text(p)
            );
        }
        let _ = writeln!(
            out,
            "  {} [shape=note, label={}];",
            quote(&format!("f_{agent}")),
            quote(&label)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::product_update;
    use crate::fixtures;

    #[test]
    fn m0_graph() {
        let text = epistemic_dot("M0", &fixtures::m0());
        assert_eq!(
            text,
            "graph \"M0\" {\n  node [shape=ellipse];\n  \"w0\" [label=\"w0\\np\"];\n  \"w1\" [label=\"w1\"];\n  \"w0\" -- \"w1\" [label=\"a,b\"];\n}\n"
        );
    }

    #[test]
    fn product_graph_edges() {
        let m = product_update(&fixtures::m1(), &fixtures::a1()).unwrap();
        let text = epistemic_dot("M1^A1", &m);
        assert_eq!(text.matches(" -- ").count(), 6);
        assert_eq!(text.matches("label=\"a,b\"").count(), 1);
        assert_eq!(text, epistemic_dot("M1^A1", &m));
    }

    #[test]
    fn single_world_graph() {
        let m = EpistemicModel::builder()
            .agents(["a"])
            .worlds(["w"])
            .build()
            .unwrap();
        let text = epistemic_dot("one", &m);
        assert_eq!(text.matches("[label=").count(), 1);
        assert!(!text.contains(" -- "));
    }

    #[test]
    fn action_and_dynamic_graphs() {
        let a = action_dot(&fixtures::a0());
        assert!(a.contains("pre: !p"));
        assert!(a.contains("\"sp\" -- \"snp\" [label=\"a\"]"));
        let d = dynamic_dot("M1~", &fixtures::m1_tilde());
        assert!(d.contains("f_a"));
        assert!(d.contains("f_b"));
    }
}
