//! DOT export with deterministic node and edge order. Identities are
//! suppressed unless requested.

use emcat_core::{AbstractBlockDiagram, DiagramEmergence, FinCategory, Functor};

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn category_dot(cat: &FinCategory, with_identities: bool) -> String {
    let mut out = format!("digraph \"{}\" {{\n", esc(&cat.name));
    for o in 0..cat.object_count() {
        out.push_str(&format!("  \"{}\";\n", esc(cat.object_name(o))));
    }
    for m in cat.morphism_ids() {
        if !with_identities && cat.is_identity(m) {
            continue;
        }
        let mor = cat.morphism(m);
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
            esc(cat.object_name(mor.dom)),
            esc(cat.object_name(mor.cod)),
            esc(&mor.name)
        ));
    }
    out.push_str("}\n");
    out
}

pub fn functor_dot(name: &str, f: &Functor, with_identities: bool) -> String {
    let mut out = format!("digraph \"{}\" {{\n", esc(name));
    for (idx, cat) in [&f.source, &f.target].iter().enumerate() {
        let prefix = if idx == 0 { "src" } else { "tgt" };
        out.push_str(&format!(
            "  subgraph \"cluster_{prefix}\" {{\n    label=\"{}\";\n",
            esc(&cat.name)
        ));
        for o in 0..cat.object_count() {
            out.push_str(&format!(
                "    \"{prefix}:{}\" [label=\"{}\"];\n",
                esc(cat.object_name(o)),
                esc(cat.object_name(o))
            ));
        }
        for m in cat.morphism_ids() {
            if !with_identities && cat.is_identity(m) {
                continue;
            }
            let mor = cat.morphism(m);
            out.push_str(&format!(
                "    \"{prefix}:{}\" -> \"{prefix}:{}\" [label=\"{}\"];\n",
                esc(cat.object_name(mor.dom)),
                esc(cat.object_name(mor.cod)),
                esc(&mor.name)
            ));
        }
        out.push_str("  }\n");
    }
    for o in 0..f.source.object_count() {
        out.push_str(&format!(
            "  \"src:{}\" -> \"tgt:{}\" [style=dashed];\n",
            esc(f.source.object_name(o)),
            esc(f.target.object_name(f.on_object(o)))
        ));
    }
    out.push_str("}\n");
    out
}

pub fn diagram_dot(name: &str, d: &DiagramEmergence, with_identities: bool) -> String {
    let mut out = format!("digraph \"{}\" {{\n", esc(name));
    for (o, node) in d.nodes.iter().enumerate() {
        out.push_str(&format!(
            "  subgraph \"cluster_{o}\" {{\n    label=\"{}: {}\";\n",
            esc(d.scheme.object_name(o)),
            esc(&node.name)
        ));
        let cat = node.category();
        for x in 0..cat.object_count() {
            out.push_str(&format!(
                "    \"n{o}:{}\" [label=\"{}\"];\n",
                esc(cat.object_name(x)),
                esc(cat.object_name(x))
            ));
        }
        for m in cat.morphism_ids() {
            if !with_identities && cat.is_identity(m) {
                continue;
            }
            let mor = cat.morphism(m);
            out.push_str(&format!(
                "    \"n{o}:{}\" -> \"n{o}:{}\" [label=\"{}\"];\n",
                esc(cat.object_name(mor.dom)),
                esc(cat.object_name(mor.cod)),
                esc(&mor.name)
            ));
        }
        out.push_str("  }\n");
    }
    for sm in d.scheme.morphism_ids() {
        if d.scheme.is_identity(sm) {
            continue;
        }
        let mor = d.scheme.morphism(sm);
        let src = &d.nodes[mor.dom];
        if src.category().object_count() > 0 {
            out.push_str(&format!(
                "  \"n{}:{}\" -> \"n{}:{}\" [style=dashed, label=\"{}\"];\n",
                mor.dom,
                esc(src.category().object_name(0)),
                mor.cod,
                esc(d.nodes[mor.cod].category().object_name(
                    d.edges[sm].on_object(0)
                )),
                esc(&mor.name)
            ));
        }
    }
    out.push_str("}\n");
    out
}

pub fn abd_dot(abd: &AbstractBlockDiagram) -> String {
    let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n", esc(&abd.name));
    for p in &abd.ports {
        out.push_str(&format!(
            "  \"port:{}\" [shape=ellipse, label=\"{}\"];\n",
            esc(&p.name),
            esc(&p.name)
        ));
    }
    for c in &abd.components {
        out.push_str(&format!(
            "  \"comp:{}\" [shape=box, label=\"{}\"];\n",
            esc(&c.name),
            esc(&c.name)
        ));
        for &p in &c.inputs {
            out.push_str(&format!(
                "  \"port:{}\" -> \"comp:{}\";\n",
                esc(&abd.ports[p].name),
                esc(&c.name)
            ));
        }
        for &p in &c.outputs {
            out.push_str(&format!(
                "  \"comp:{}\" -> \"port:{}\";\n",
                esc(&c.name),
                esc(&abd.ports[p].name)
            ));
        }
    }
    out.push_str("}\n");
    out
}
