//! Isomorphism of IODAGs up to renaming of nodes, inner wires, indices and
//! classes. Boundary wires correspond by position, and node ports keep
//! their order.

use std::collections::{BTreeMap, HashMap};

use super::Iodag;
use crate::circuit::Endpoint;

/// A witness that two diagrams are isomorphic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub nodes: BTreeMap<String, String>,
    pub wires: BTreeMap<String, String>,
    pub classes: BTreeMap<String, String>,
}

struct Search<'a> {
    g: &'a Iodag,
    h: &'a Iodag,
    order: Vec<usize>,
    node_map: Vec<Option<usize>>,
    node_used: Vec<bool>,
    wire_map: HashMap<usize, usize>,
    wire_inv: HashMap<usize, usize>,
}

impl Iodag {
    pub fn is_isomorphic(&self, other: &Iodag) -> bool {
        self.isomorphism(other).is_some()
    }

    pub fn isomorphism(&self, other: &Iodag) -> Option<Isomorphism> {
        let (g, h) = (self, other);
        if g.inputs.len() != h.inputs.len()
            || g.outputs.len() != h.outputs.len()
            || g.edges.len() != h.edges.len()
            || g.nodes.len() != h.nodes.len()
            || g.indices.len() != h.indices.len()
            || g.empty.len() != h.empty.len()
            || g.class_names().len() != h.class_names().len()
        {
            return None;
        }
        let order: Vec<usize> = g.topo.kahn_layers().ok()?.into_iter().flatten().collect();
        let mut s = Search {
            g,
            h,
            order,
            node_map: vec![None; g.nodes.len()],
            node_used: vec![false; h.nodes.len()],
            wire_map: HashMap::new(),
            wire_inv: HashMap::new(),
        };
        for (a, b) in g
            .topo
            .inputs()
            .iter()
            .zip(h.topo.inputs())
            .chain(g.topo.outputs().iter().zip(h.topo.outputs()))
        {
            s.wire_map.insert(*a, *b);
            s.wire_inv.insert(*b, *a);
        }
        s.search(0)
    }
}

impl Search<'_> {
    fn search(&mut self, pos: usize) -> Option<Isomorphism> {
        if pos == self.order.len() {
            return self.finish();
        }
        let n = self.order[pos];
        let gn = &self.g.nodes[n];
        for m in 0..self.h.nodes.len() {
            let hm = &self.h.nodes[m];
            if self.node_used[m]
                || gn.inputs.len() != hm.inputs.len()
                || gn.outputs.len() != hm.outputs.len()
                || self.g.empty.contains(&gn.id) != self.h.empty.contains(&hm.id)
            {
                continue;
            }
            let pairs: Vec<(usize, usize)> = self
                .g
                .topo
                .box_inputs(n)
                .iter()
                .zip(self.h.topo.box_inputs(m))
                .chain(
                    self.g
                        .topo
                        .box_outputs(n)
                        .iter()
                        .zip(self.h.topo.box_outputs(m)),
                )
                .map(|(a, b)| (*a, *b))
                .collect();
            let mut added = Vec::new();
            let mut ok = true;
            for (a, b) in pairs {
                match (self.wire_map.get(&a), self.wire_inv.get(&b)) {
                    (Some(&x), _) if x != b => ok = false,
                    (_, Some(&y)) if y != a => ok = false,
                    (Some(_), _) => {}
                    _ => {
                        self.wire_map.insert(a, b);
                        self.wire_inv.insert(b, a);
                        added.push((a, b));
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                self.node_map[n] = Some(m);
                self.node_used[m] = true;
                if let Some(found) = self.search(pos + 1) {
                    return Some(found);
                }
                self.node_map[n] = None;
                self.node_used[m] = false;
            }
            for (a, b) in added {
                self.wire_map.remove(&a);
                self.wire_inv.remove(&b);
            }
        }
        None
    }

    /// With nodes and wires fixed, classes must correspond by their
    /// per-wire multiplicities.
    fn finish(&self) -> Option<Isomorphism> {
        let (g, h) = (self.g, self.h);
        // boundary wires attached to the wrong kind of endpoint cannot match
        for (&a, &b) in &self.wire_map {
            let same = |x: Endpoint, y: Endpoint| match (x, y) {
                (Endpoint::Boundary, Endpoint::Boundary) => true,
                (Endpoint::Box(p), Endpoint::Box(q)) => self.node_map[p] == Some(q),
                _ => false,
            };
            if !same(g.topo.producer(a), h.topo.producer(b))
                || !same(g.topo.consumer(a), h.topo.consumer(b))
            {
                return None;
            }
        }
        let signature =
            |d: &Iodag, map: &dyn Fn(usize) -> usize| -> BTreeMap<String, Vec<(usize, usize)>> {
                let mut counts: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
                for ix in &d.indices {
                    let w = map(d.wire_index[&ix.wire]);
                    *counts
                        .entry(ix.class.clone())
                        .or_default()
                        .entry(w)
                        .or_default() += 1;
                }
                counts
                    .into_iter()
                    .map(|(c, m)| (c, m.into_iter().collect()))
                    .collect()
            };
        let sg = signature(g, &|w| self.wire_map[&w]);
        let sh = signature(h, &|w| w);
        let mut by_sig: BTreeMap<&Vec<(usize, usize)>, Vec<&String>> = BTreeMap::new();
        for (c, s) in &sh {
            by_sig.entry(s).or_default().push(c);
        }
        let mut classes = BTreeMap::new();
        for (c, s) in &sg {
            let pool = by_sig.get_mut(s)?;
            let target = pool.pop()?;
            classes.insert(c.clone(), target.clone());
        }
        let name = |d: &Iodag, w: usize| d.topo.wire_name(w).to_string();
        Some(Isomorphism {
            nodes: self
                .node_map
                .iter()
                .enumerate()
                .map(|(n, m)| {
                    (
                        g.nodes[n].id.clone(),
                        h.nodes[m.expect("complete")].id.clone(),
                    )
                })
                .collect(),
            wires: self
                .wire_map
                .iter()
                .map(|(&a, &b)| (name(g, a), name(h, b)))
                .collect(),
            classes,
        })
    }
}
