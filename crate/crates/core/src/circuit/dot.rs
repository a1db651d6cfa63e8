//! Graphviz export of circuits.

use std::fmt::Write;

use super::{Endpoint, RoutedCircuit};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub(crate) fn circuit_to_dot(c: &RoutedCircuit) -> String {
    let mut out = String::from("digraph circuit {\n  rankdir=BT;\n  node [shape=box];\n");
    for bx in c.boxes() {
        let _ = writeln!(out, "  {};", quote(&bx.id));
    }
    for (w, (id, space)) in c.wires().iter().enumerate() {
        let from = match c.producer(w) {
            Endpoint::Boundary => {
                let n = format!("in:{id}");
                let _ = writeln!(out, "  {} [shape=point];", quote(&n));
                n
            }
            Endpoint::Box(b) => c.boxes()[b].id.clone(),
        };
        let to = match c.consumer(w) {
            Endpoint::Boundary => {
                let n = format!("out:{id}");
                let _ = writeln!(out, "  {} [shape=point];", quote(&n));
                n
            }
            Endpoint::Box(b) => c.boxes()[b].id.clone(),
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&from),
            quote(&to),
            quote(&format!("{id}: {space}"))
        );
    }
    out.push_str("}\n");
    out
}
