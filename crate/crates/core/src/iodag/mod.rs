//! Indexed open DAGs: the abstract syntax of index-matching circuits.
//!
//! Wires carry named indices; indices sharing a class are "the same index"
//! and are rendered as repeated superscripts. A class is identified by its
//! name, so the equivalence on indices is "same class name". Index values
//! are 0-based.

mod corelation;
mod dot;
pub mod figures;
mod interpret;
mod iso;
mod json;

pub use corelation::{
    explain_improper, nonforgetting_compose, Corelation, ImproperWitness, IndexFamily, Partition,
    Side, UnionFind,
};
pub use interpret::{Interpretation, LayerGate};
pub use iso::Isomorphism;
pub use json::{parse_wire, IndexRepr, InterpretationRepr, IodagRepr, NodeRepr};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::Topology;
use crate::error::{Error, Result};

/// Lengths per class name.
pub type Lengths = BTreeMap<String, usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LintMode {
    Iso,
    Uni,
}

impl fmt::Display for LintMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LintMode::Iso => "iso",
            LintMode::Uni => "uni",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Index {
    pub name: String,
    pub wire: String,
    pub class: String,
}

#[derive(Clone, Debug)]
pub struct Iodag {
    inputs: Vec<String>,
    outputs: Vec<String>,
    edges: Vec<String>,
    nodes: Vec<Node>,
    empty: BTreeSet<String>,
    indices: Vec<Index>,
    /// Wires ordered inputs, edges, outputs.
    topo: Topology,
    wire_index: HashMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LintViolation {
    pub class: String,
    pub message: String,
    pub nodes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LintReport {
    pub mode: LintMode,
    pub passed: bool,
    pub violations: Vec<LintViolation>,
}

fn fresh(base: &str, used: &BTreeSet<String>) -> String {
    if !used.contains(base) {
        return base.to_string();
    }
    let stem = match base.rsplit_once('#') {
        Some((s, n)) if !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) => s,
        _ => base,
    };
    (1..)
        .map(|n| format!("{stem}#{n}"))
        .find(|c| !used.contains(c))
        .expect("unbounded")
}

fn join(items: &[String]) -> String {
    items.join(", ")
}

impl Iodag {
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        edges: Vec<String>,
        nodes: Vec<Node>,
        indices: Vec<Index>,
        empty_nodes: Vec<String>,
    ) -> Result<Self> {
        let wires: Vec<String> = inputs
            .iter()
            .chain(&edges)
            .chain(&outputs)
            .cloned()
            .collect();
        let mut wire_index = HashMap::new();
        for (i, w) in wires.iter().enumerate() {
            if wire_index.insert(w.clone(), i).is_some() {
                return Err(Error::InvalidIodag(format!("wire `{w}` declared twice")));
            }
        }
        let lookup = |w: &String| {
            wire_index
                .get(w)
                .copied()
                .ok_or_else(|| Error::InvalidIodag(format!("unknown wire `{w}`")))
        };
        let mut node_ids = BTreeSet::new();
        let mut boxes = Vec::new();
        for n in &nodes {
            if !node_ids.insert(n.id.clone()) {
                return Err(Error::InvalidIodag(format!(
                    "node `{}` declared twice",
                    n.id
                )));
            }
            let ins = n.inputs.iter().map(lookup).collect::<Result<Vec<_>>>()?;
            let outs = n.outputs.iter().map(lookup).collect::<Result<Vec<_>>>()?;
            boxes.push((n.id.clone(), ins, outs));
        }
        let in_idx: Vec<usize> = (0..inputs.len()).collect();
        let out_idx: Vec<usize> = (inputs.len() + edges.len()..wires.len()).collect();
        // a boundary wire must attach to a node, not pass straight through
        let topo = Topology::new(wires, boxes, in_idx.clone(), out_idx, "IODAG")?;
        for &w in &in_idx {
            if topo.consumer(w) == crate::circuit::Endpoint::Boundary {
                return Err(Error::InvalidIodag(format!(
                    "input wire `{}` feeds no node",
                    inputs[w]
                )));
            }
        }
        let mut names = BTreeSet::new();
        for ix in &indices {
            if !names.insert(ix.name.clone()) {
                return Err(Error::InvalidIodag(format!(
                    "index `{}` declared twice",
                    ix.name
                )));
            }
            if !wire_index.contains_key(&ix.wire) {
                return Err(Error::InvalidIodag(format!(
                    "index `{}` sits on unknown wire `{}`",
                    ix.name, ix.wire
                )));
            }
            if ix.class.is_empty() {
                return Err(Error::InvalidIodag(format!(
                    "index `{}` has an empty class name",
                    ix.name
                )));
            }
        }
        let g = Iodag {
            inputs,
            outputs,
            edges,
            nodes,
            empty: BTreeSet::new(),
            indices,
            topo,
            wire_index,
        };
        let mut g = g;
        for e in empty_nodes {
            let n = g
                .nodes
                .iter()
                .find(|n| n.id == e)
                .ok_or_else(|| Error::UnknownNode(e.clone()))?;
            if n.inputs.len() != 1 || n.outputs.len() != 1 {
                return Err(Error::InvalidIodag(format!(
                    "empty node `{e}` needs exactly one input and one output wire"
                )));
            }
            if g.class_multiset(&n.inputs[0]) != g.class_multiset(&n.outputs[0]) {
                return Err(Error::InvalidIodag(format!(
                    "empty node `{e}` must carry the same indices in and out"
                )));
            }
            g.empty.insert(e);
        }
        Ok(g)
    }

    /// The diagram with no wires and no nodes.
    pub fn empty() -> Iodag {
        Iodag::new(
            Vec::new(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
        )
        .expect("valid")
    }

    fn class_multiset(&self, wire: &str) -> Vec<&str> {
        let mut v: Vec<&str> = self
            .indices_on(wire)
            .iter()
            .map(|i| i.class.as_str())
            .collect();
        v.sort_unstable();
        v
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn edges(&self) -> &[String] {
        &self.edges
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn indices(&self) -> &[Index] {
        &self.indices
    }

    pub fn empty_nodes(&self) -> &BTreeSet<String> {
        &self.empty
    }

    pub fn is_empty_node(&self, id: &str) -> bool {
        self.empty.contains(id)
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    /// All wires: inputs, inner edges, outputs.
    pub fn wires(&self) -> impl Iterator<Item = &String> {
        self.inputs.iter().chain(&self.edges).chain(&self.outputs)
    }

    pub fn wire_position(&self, wire: &str) -> Option<usize> {
        self.wire_index.get(wire).copied()
    }

    pub fn node(&self, id: &str) -> Result<&Node> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Indices on a wire, sorted by name.
    pub fn indices_on(&self, wire: &str) -> Vec<&Index> {
        let mut v: Vec<&Index> = self.indices.iter().filter(|i| i.wire == wire).collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    }

    pub fn class_names(&self) -> BTreeSet<String> {
        self.indices.iter().map(|i| i.class.clone()).collect()
    }

    fn length_of(lengths: &Lengths, class: &str) -> Result<usize> {
        match lengths.get(class) {
            Some(&l) if l > 0 => Ok(l),
            Some(_) => Err(Error::LengthMismatch(format!(
                "index `{class}` has length 0"
            ))),
            None => Err(Error::LengthMismatch(format!(
                "no length given for index `{class}`"
            ))),
        }
    }

    /// Same length for every class.
    pub fn uniform_lengths(&self, len: usize) -> Lengths {
        self.class_names().into_iter().map(|c| (c, len)).collect()
    }

    pub fn family(&self, wire: &str, lengths: &Lengths) -> Result<IndexFamily> {
        IndexFamily::new(
            self.indices_on(wire)
                .into_iter()
                .map(|i| Ok((i.name.clone(), Self::length_of(lengths, &i.class)?)))
                .collect::<Result<_>>()?,
        )
    }

    fn families(&self, wires: &[String], lengths: &Lengths) -> Result<(IndexFamily, Vec<String>)> {
        let mut fam = IndexFamily::empty();
        let mut classes = Vec::new();
        for w in wires {
            fam = fam.concat(&self.family(w, lengths)?);
            classes.extend(self.indices_on(w).into_iter().map(|i| i.class.clone()));
        }
        Ok((fam, classes))
    }

    fn corelation_between(
        &self,
        from: &[String],
        to: &[String],
        lengths: &Lengths,
    ) -> Result<Corelation> {
        let (dom, mut keys) = self.families(from, lengths)?;
        let (cod, k2) = self.families(to, lengths)?;
        keys.extend(k2);
        Corelation::from_keys(dom, cod, &keys)
    }

    /// Relates a node's incoming and outgoing indices that share a class.
    pub fn node_corelation(&self, node: &str, lengths: &Lengths) -> Result<Corelation> {
        let n = self.node(node)?;
        self.corelation_between(&n.inputs, &n.outputs, lengths)
    }

    /// Input indices to themselves, matched by class.
    pub fn preprocessing(&self, lengths: &Lengths) -> Result<Corelation> {
        self.corelation_between(&self.inputs, &self.inputs, lengths)
    }

    /// Input to output indices, matched by class.
    pub fn total_corelation(&self, lengths: &Lengths) -> Result<Corelation> {
        self.corelation_between(&self.inputs, &self.outputs, lengths)
    }

    fn node_sides(&self) -> Vec<(BTreeSet<&str>, BTreeSet<&str>)> {
        let classes_on = |ws: &[String]| -> BTreeSet<&str> {
            ws.iter()
                .flat_map(|w| {
                    self.indices
                        .iter()
                        .filter(move |i| &i.wire == w)
                        .map(|i| i.class.as_str())
                })
                .collect()
        };
        self.nodes
            .iter()
            .map(|n| (classes_on(&n.inputs), classes_on(&n.outputs)))
            .collect()
    }

    /// Starting points and endpoints of every class.
    pub fn lint(&self, mode: LintMode) -> LintReport {
        let sides = self.node_sides();
        let on_boundary = |ws: &[String], c: &str| {
            self.indices
                .iter()
                .any(|i| i.class == c && ws.contains(&i.wire))
        };
        let mut violations = Vec::new();
        for c in self.class_names() {
            let starts: Vec<String> = self
                .nodes
                .iter()
                .zip(&sides)
                .filter(|(_, (i, o))| o.contains(c.as_str()) && !i.contains(c.as_str()))
                .map(|(n, _)| n.id.clone())
                .collect();
            let ends: Vec<String> = self
                .nodes
                .iter()
                .zip(&sides)
                .filter(|(_, (i, o))| i.contains(c.as_str()) && !o.contains(c.as_str()))
                .map(|(n, _)| n.id.clone())
                .collect();
            let mut push = |message: String, nodes: &[String]| {
                violations.push(LintViolation {
                    class: c.clone(),
                    message,
                    nodes: nodes.to_vec(),
                })
            };
            if starts.len() > 1 {
                push(
                    format!(
                        "{} starting points for the index {c}: {}",
                        count_word(starts.len()),
                        join(&starts)
                    ),
                    &starts,
                );
            }
            if !starts.is_empty() && on_boundary(&self.inputs, &c) {
                push(
                    format!("the index {c} is present in the global inputs and has a starting point at {}", join(&starts)),
                    &starts,
                );
            }
            if mode == LintMode::Uni {
                if ends.len() > 1 {
                    push(
                        format!(
                            "{} endpoints for the index {c}: {}",
                            count_word(ends.len()),
                            join(&ends)
                        ),
                        &ends,
                    );
                }
                if !ends.is_empty() && on_boundary(&self.outputs, &c) {
                    push(
                        format!("the index {c} is present in the global outputs and has an endpoint at {}", join(&ends)),
                        &ends,
                    );
                }
            }
        }
        LintReport {
            mode,
            passed: violations.is_empty(),
            violations,
        }
    }

    /// The corelation of each boundary wire's indices, used to compare interfaces.
    fn boundary_partition(&self, wires: &[String]) -> (Vec<&Index>, Partition) {
        let idx: Vec<&Index> = wires.iter().flat_map(|w| self.indices_on(w)).collect();
        let keys: Vec<&str> = idx.iter().map(|i| i.class.as_str()).collect();
        (idx, Partition::from_keys(&keys))
    }

    /// `next ∘ self`. The outputs of `self` must be the inputs of `next`: the
    /// same wires with the same number of indices, and the same classes among
    /// those indices. Indices on the interface are paired in name order per
    /// wire; `next`'s names yield to `self`'s, and any other clash is renamed
    /// with a `#n` suffix.
    pub fn then(&self, next: &Iodag) -> Result<Iodag> {
        if self.outputs != next.inputs {
            return Err(Error::InterfaceMismatch(format!(
                "the first diagram outputs [{}] but the second takes [{}]",
                join(&self.outputs),
                join(&next.inputs)
            )));
        }
        for w in &self.outputs {
            let (a, b) = (self.indices_on(w).len(), next.indices_on(w).len());
            if a != b {
                return Err(Error::InterfaceMismatch(format!(
                    "wire `{w}` carries {a} indices in the first diagram but {b} in the second"
                )));
            }
        }
        let (i1, p1) = self.boundary_partition(&self.outputs);
        let (i2, p2) = next.boundary_partition(&next.inputs);
        if p1 != p2 {
            let (x, y) = (0..i1.len())
                .flat_map(|x| (0..i1.len()).map(move |y| (x, y)))
                .find(|&(x, y)| p1.related(x, y) != p2.related(x, y))
                .expect("partitions differ");
            let describe = |i: &[&Index], rel: bool| {
                format!(
                    "{} `{}` on {} and `{}` on {}",
                    if rel { "matches" } else { "does not match" },
                    i[x].class,
                    i[x].wire,
                    i[y].class,
                    i[y].wire
                )
            };
            return Err(Error::InterfaceMismatch(format!(
                "index classes differ on the interface: the first diagram {}, the second {}",
                describe(&i1, p1.related(x, y)),
                describe(&i2, p2.related(x, y))
            )));
        }

        let mut wires_used: BTreeSet<String> = self.wires().cloned().collect();
        let mut nodes_used: BTreeSet<String> = self.nodes.iter().map(|n| n.id.clone()).collect();
        let mut names_used: BTreeSet<String> =
            self.indices.iter().map(|i| i.name.clone()).collect();
        let mut classes_used: BTreeSet<String> = self.class_names();

        let interface: BTreeSet<&String> = self.outputs.iter().collect();
        let mut wire_map: HashMap<String, String> = HashMap::new();
        for w in next.edges.iter().chain(&next.outputs) {
            let n = fresh(w, &wires_used);
            wires_used.insert(n.clone());
            wire_map.insert(w.clone(), n);
        }
        for w in &next.inputs {
            wire_map.insert(w.clone(), w.clone());
        }
        let mut class_map: HashMap<String, String> = HashMap::new();
        for (a, b) in i1.iter().zip(&i2) {
            class_map.insert(b.class.clone(), a.class.clone());
        }
        for c in next.class_names() {
            class_map.entry(c).or_insert_with_key(|c| {
                let n = fresh(c, &classes_used);
                classes_used.insert(n.clone());
                n
            });
        }
        let mut indices = self.indices.clone();
        for ix in &next.indices {
            if interface.contains(&ix.wire) {
                continue;
            }
            let name = fresh(&ix.name, &names_used);
            names_used.insert(name.clone());
            indices.push(Index {
                name,
                wire: wire_map[&ix.wire].clone(),
                class: class_map[&ix.class].clone(),
            });
        }
        let mut nodes = self.nodes.clone();
        let mut empty: Vec<String> = self.empty.iter().cloned().collect();
        for n in &next.nodes {
            let id = fresh(&n.id, &nodes_used);
            nodes_used.insert(id.clone());
            if next.empty.contains(&n.id) {
                empty.push(id.clone());
            }
            nodes.push(Node {
                id,
                inputs: n.inputs.iter().map(|w| wire_map[w].clone()).collect(),
                outputs: n.outputs.iter().map(|w| wire_map[w].clone()).collect(),
            });
        }
        let mut edges = self.edges.clone();
        edges.extend(self.outputs.iter().cloned());
        edges.extend(next.edges.iter().map(|w| wire_map[w].clone()));
        let outputs = next.outputs.iter().map(|w| wire_map[w].clone()).collect();
        Iodag::new(self.inputs.clone(), outputs, edges, nodes, indices, empty)
    }

    /// Disjoint union; clashing names in `other` get a `#n` suffix.
    pub fn par(&self, other: &Iodag) -> Iodag {
        let mut wires_used: BTreeSet<String> = self.wires().cloned().collect();
        let mut nodes_used: BTreeSet<String> = self.nodes.iter().map(|n| n.id.clone()).collect();
        let mut names_used: BTreeSet<String> =
            self.indices.iter().map(|i| i.name.clone()).collect();
        let mut classes_used: BTreeSet<String> = self.class_names();
        let mut wire_map = HashMap::new();
        for w in other.wires() {
            let n = fresh(w, &wires_used);
            wires_used.insert(n.clone());
            wire_map.insert(w.clone(), n);
        }
        let mut class_map = HashMap::new();
        for c in other.class_names() {
            let n = fresh(&c, &classes_used);
            classes_used.insert(n.clone());
            class_map.insert(c, n);
        }
        let mut indices = self.indices.clone();
        for ix in &other.indices {
            let name = fresh(&ix.name, &names_used);
            names_used.insert(name.clone());
            indices.push(Index {
                name,
                wire: wire_map[&ix.wire].clone(),
                class: class_map[&ix.class].clone(),
            });
        }
        let mut nodes = self.nodes.clone();
        let mut empty: Vec<String> = self.empty.iter().cloned().collect();
        for n in &other.nodes {
            let id = fresh(&n.id, &nodes_used);
            nodes_used.insert(id.clone());
            if other.empty.contains(&n.id) {
                empty.push(id.clone());
            }
            nodes.push(Node {
                id,
                inputs: n.inputs.iter().map(|w| wire_map[w].clone()).collect(),
                outputs: n.outputs.iter().map(|w| wire_map[w].clone()).collect(),
            });
        }
        let map_all = |ws: &[String]| ws.iter().map(|w| wire_map[w].clone()).collect::<Vec<_>>();
        let mut inputs = self.inputs.clone();
        inputs.extend(map_all(&other.inputs));
        let mut outputs = self.outputs.clone();
        outputs.extend(map_all(&other.outputs));
        let mut edges = self.edges.clone();
        edges.extend(map_all(&other.edges));
        Iodag::new(inputs, outputs, edges, nodes, indices, empty)
            .expect("disjoint union of valid IODAGs")
    }

    /// The identity on this diagram's outputs: one empty node per wire. The
    /// new outputs are the old wire ids with a `'` suffix.
    pub fn output_identity(&self) -> Iodag {
        let mut nodes = Vec::new();
        let mut indices = Vec::new();
        let mut outputs = Vec::new();
        for w in &self.outputs {
            let out = format!("{w}'");
            nodes.push(Node {
                id: format!("id:{w}"),
                inputs: vec![w.clone()],
                outputs: vec![out.clone()],
            });
            for ix in self.indices_on(w) {
                indices.push(ix.clone());
                indices.push(Index {
                    name: format!("{}'", ix.name),
                    wire: out.clone(),
                    class: ix.class.clone(),
                });
            }
            outputs.push(out);
        }
        let empty = nodes.iter().map(|n| n.id.clone()).collect();
        Iodag::new(
            self.outputs.clone(),
            outputs,
            Vec::new(),
            nodes,
            indices,
            empty,
        )
        .expect("identity is valid")
    }

    /// The identity onto this diagram's inputs, from copies of them with a
    /// `'` suffix.
    pub fn input_identity(&self) -> Iodag {
        let mut nodes = Vec::new();
        let mut indices = Vec::new();
        let mut inputs = Vec::new();
        for w in &self.inputs {
            let src = format!("{w}'");
            nodes.push(Node {
                id: format!("id:{w}"),
                inputs: vec![src.clone()],
                outputs: vec![w.clone()],
            });
            for ix in self.indices_on(w) {
                indices.push(ix.clone());
                indices.push(Index {
                    name: format!("{}'", ix.name),
                    wire: src.clone(),
                    class: ix.class.clone(),
                });
            }
            inputs.push(src);
        }
        let empty = nodes.iter().map(|n| n.id.clone()).collect();
        Iodag::new(
            inputs,
            self.inputs.clone(),
            Vec::new(),
            nodes,
            indices,
            empty,
        )
        .expect("identity is valid")
    }

    /// Removes empty nodes whose two wires can be merged into one (all but
    /// those joining an input straight to an output).
    pub fn normalize(&self) -> Iodag {
        let mut g = self.clone();
        loop {
            let Some(id) = g.empty.iter().find(|e| {
                let n = g.node(e).expect("empty nodes exist");
                !(g.inputs.contains(&n.inputs[0]) && g.outputs.contains(&n.outputs[0]))
            }) else {
                return g;
            };
            let n = g.node(id).expect("exists").clone();
            let (a, b) = (n.inputs[0].clone(), n.outputs[0].clone());
            let (keep, drop) = if g.outputs.contains(&b) {
                (b, a)
            } else {
                (a, b)
            };
            let mut nodes: Vec<Node> = g.nodes.iter().filter(|m| m.id != n.id).cloned().collect();
            for m in &mut nodes {
                for w in m.inputs.iter_mut().chain(m.outputs.iter_mut()) {
                    if *w == drop {
                        *w = keep.clone();
                    }
                }
            }
            let indices = g
                .indices
                .iter()
                .filter(|i| i.wire != drop)
                .cloned()
                .collect();
            let edges = g.edges.iter().filter(|e| **e != drop).cloned().collect();
            let empty = g.empty.iter().filter(|e| **e != n.id).cloned().collect();
            g = Iodag::new(
                g.inputs.clone(),
                g.outputs.clone(),
                edges,
                nodes,
                indices,
                empty,
            )
            .expect("merging an empty node keeps the diagram valid");
        }
    }
}

fn count_word(n: usize) -> String {
    match n {
        2 => "two".into(),
        3 => "three".into(),
        _ => n.to_string(),
    }
}

#[cfg(test)]
mod tests;
