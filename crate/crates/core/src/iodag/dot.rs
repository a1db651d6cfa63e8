use std::fmt::Write;

use super::Iodag;
use crate::circuit::Endpoint;

impl Iodag {
    /// Graphviz source; wires are labelled with their classes as superscripts.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph iodag {\n  rankdir=BT;\n  node [shape=box];\n");
        for n in &self.nodes {
            if self.empty.contains(&n.id) {
                let _ = writeln!(
                    s,
                    "  \"n:{}\" [label=\"\", shape=circle, width=0.15];",
                    n.id
                );
            } else {
                let _ = writeln!(s, "  \"n:{}\" [label=\"{}\"];", n.id, n.id);
            }
        }
        for w in &self.inputs {
            let _ = writeln!(s, "  \"in:{w}\" [shape=point];");
        }
        for w in &self.outputs {
            let _ = writeln!(s, "  \"out:{w}\" [shape=point];");
        }
        for (i, w) in self.wires().enumerate() {
            let from = match self.topo.producer(i) {
                Endpoint::Boundary => format!("in:{w}"),
                Endpoint::Box(b) => format!("n:{}", self.nodes[b].id),
            };
            let to = match self.topo.consumer(i) {
                Endpoint::Boundary => format!("out:{w}"),
                Endpoint::Box(b) => format!("n:{}", self.nodes[b].id),
            };
            let _ = writeln!(
                s,
                "  \"{from}\" -> \"{to}\" [label=\"{}\"];",
                self.wire_label(w)
            );
        }
        s.push_str("}\n");
        s
    }

    /// `X^k,l`, or just `X` when the wire carries no index.
    pub fn wire_label(&self, wire: &str) -> String {
        let classes: Vec<&str> = self
            .indices_on(wire)
            .iter()
            .map(|i| i.class.as_str())
            .collect();
        if classes.is_empty() {
            wire.to_string()
        } else {
            format!("{wire}^{}", classes.join(","))
        }
    }
}
