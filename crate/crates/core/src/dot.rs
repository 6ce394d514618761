//! Graphviz export of networks.

use std::fmt::Write as _;

use crate::network::{Network, VarKind};

fn shape(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Chance => "ellipse",
        VarKind::Decision => "box",
        VarKind::Value => "hexagon",
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Chance nodes as ellipses, decisions as boxes, the value node as a hexagon.
/// Influences are labelled with their sign entries; informational links are dashed.
pub fn network_dot(net: &Network) -> String {
    let mut out = String::from("digraph network {\n  rankdir=LR;\n");
    for v in net.variables() {
        let _ = writeln!(out, "  \"{}\" [shape={}];", escape(&v.name), shape(v.kind));
    }
    for inf in net.influences() {
        let text = net.fmt_influence(inf);
        let label = text.split_once(" : ").map(|(_, body)| body).unwrap_or("");
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            escape(&inf.source),
            escape(&inf.target),
            escape(label).replace("; ", "\\n")
        );
    }
    for (s, d) in net.informational_links() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [style=dashed];", escape(s), escape(d));
    }
    for (a, b) in net.dependences() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [dir=none, style=dotted];", escape(a), escape(b));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::test_treat;

    #[test]
    fn shapes_and_dashes() {
        let dot = network_dot(&test_treat());
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"t\" [shape=box]"));
        assert!(dot.contains("\"d\" [shape=ellipse]"));
        assert!(dot.contains("\"u\" [shape=hexagon]"));
        assert!(dot.contains("\"r\" -> \"x\" [style=dashed]"));
        assert!(dot.contains("\"d\" -> \"r\" [label=\"0 | t=~T\\n+ | t=T\"]"));
        assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    }
}
