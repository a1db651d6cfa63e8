//! Wiring of a DAG of boxes, independent of what the boxes contain.

use super::Process;
use crate::error::{Error, Result};

/// Where a wire starts or ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Boundary,
    Box(usize),
}

/// Boxes and wires by index. Every wire has exactly one producer and one
/// consumer, each either a box or the boundary.
#[derive(Clone, Debug)]
pub struct Topology {
    wire_names: Vec<String>,
    box_names: Vec<String>,
    box_inputs: Vec<Vec<usize>>,
    box_outputs: Vec<Vec<usize>>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    producer: Vec<Endpoint>,
    consumer: Vec<Endpoint>,
}

fn tensor_all<P: Process>(parts: &[P], unit: &P) -> P {
    let mut it = parts.iter();
    match it.next() {
        None => unit.clone(),
        Some(first) => it.fold(first.clone(), |acc, p| acc.tensor(p)),
    }
}

impl Topology {
    /// `what` names the kind of graph in error messages ("circuit", "IODAG").
    pub fn new(
        wire_names: Vec<String>,
        boxes: Vec<(String, Vec<usize>, Vec<usize>)>,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        what: &str,
    ) -> Result<Self> {
        let err = |m: String| {
            if what == "IODAG" {
                Error::InvalidIodag(m)
            } else {
                Error::InvalidCircuit(m)
            }
        };
        let n = wire_names.len();
        let mut producer: Vec<Option<Endpoint>> = vec![None; n];
        let mut consumer: Vec<Option<Endpoint>> = vec![None; n];
        let attach =
            |slot: &mut Vec<Option<Endpoint>>, w: usize, e: Endpoint, role: &str| -> Result<()> {
                if slot[w].replace(e).is_some() {
                    return Err(err(format!(
                        "wire `{}` has more than one {role}",
                        wire_names[w]
                    )));
                }
                Ok(())
            };
        for &w in &inputs {
            attach(&mut producer, w, Endpoint::Boundary, "producer")?;
        }
        for &w in &outputs {
            attach(&mut consumer, w, Endpoint::Boundary, "consumer")?;
        }
        let mut box_names = Vec::new();
        let mut box_inputs = Vec::new();
        let mut box_outputs = Vec::new();
        for (b, (name, ins, outs)) in boxes.into_iter().enumerate() {
            for &w in &ins {
                attach(&mut consumer, w, Endpoint::Box(b), "consumer")?;
            }
            for &w in &outs {
                attach(&mut producer, w, Endpoint::Box(b), "producer")?;
            }
            box_names.push(name);
            box_inputs.push(ins);
            box_outputs.push(outs);
        }
        let producer = producer
            .into_iter()
            .enumerate()
            .map(|(w, p)| p.ok_or_else(|| err(format!("wire `{}` has no producer", wire_names[w]))))
            .collect::<Result<Vec<_>>>()?;
        let consumer = consumer
            .into_iter()
            .enumerate()
            .map(|(w, c)| c.ok_or_else(|| err(format!("wire `{}` has no consumer", wire_names[w]))))
            .collect::<Result<Vec<_>>>()?;
        let t = Topology {
            wire_names,
            box_names,
            box_inputs,
            box_outputs,
            inputs,
            outputs,
            producer,
            consumer,
        };
        t.kahn_layers().map_err(|e| match e {
            Error::InvalidCircuit(m) => err(m),
            other => other,
        })?;
        Ok(t)
    }

    pub fn num_wires(&self) -> usize {
        self.wire_names.len()
    }

    pub fn num_boxes(&self) -> usize {
        self.box_names.len()
    }

    pub fn wire_name(&self, w: usize) -> &str {
        &self.wire_names[w]
    }

    pub fn box_name(&self, b: usize) -> &str {
        &self.box_names[b]
    }

    pub fn box_inputs(&self, b: usize) -> &[usize] {
        &self.box_inputs[b]
    }

    pub fn box_outputs(&self, b: usize) -> &[usize] {
        &self.box_outputs[b]
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn producer(&self, w: usize) -> Endpoint {
        self.producer[w]
    }

    pub fn consumer(&self, w: usize) -> Endpoint {
        self.consumer[w]
    }

    /// Kahn generations, each sorted by box name.
    pub fn kahn_layers(&self) -> Result<Vec<Vec<usize>>> {
        let nb = self.num_boxes();
        let mut indeg: Vec<usize> = (0..nb)
            .map(|b| {
                self.box_inputs[b]
                    .iter()
                    .filter(|&&w| matches!(self.producer[w], Endpoint::Box(_)))
                    .count()
            })
            .collect();
        let mut current: Vec<usize> = (0..nb).filter(|&b| indeg[b] == 0).collect();
        let mut layers = Vec::new();
        let mut done = 0;
        while !current.is_empty() {
            current.sort_by(|&a, &b| self.box_names[a].cmp(&self.box_names[b]));
            let mut next = Vec::new();
            for &b in &current {
                for &w in &self.box_outputs[b] {
                    if let Endpoint::Box(c) = self.consumer[w] {
                        indeg[c] -= 1;
                        if indeg[c] == 0 {
                            next.push(c);
                        }
                    }
                }
            }
            done += current.len();
            layers.push(std::mem::take(&mut current));
            current = next;
        }
        if done != nb {
            let stuck: Vec<&str> = (0..nb)
                .filter(|&b| indeg[b] > 0)
                .map(|b| self.box_names[b].as_str())
                .collect();
            return Err(Error::InvalidCircuit(format!(
                "the boxes {stuck:?} form a cycle"
            )));
        }
        Ok(layers)
    }

    /// One box per layer in the given order, which must be topological.
    pub fn layers_from_order(&self, order: &[usize]) -> Result<Vec<Vec<usize>>> {
        let nb = self.num_boxes();
        let mut seen = vec![false; nb];
        if order.len() != nb {
            return Err(Error::InvalidCircuit(format!(
                "order lists {} boxes but there are {nb}",
                order.len()
            )));
        }
        for &b in order {
            if b >= nb || seen[b] {
                return Err(Error::InvalidCircuit(format!(
                    "order repeats or overruns box index {b}"
                )));
            }
            for &w in &self.box_inputs[b] {
                if let Endpoint::Box(p) = self.producer[w] {
                    if !seen[p] {
                        return Err(Error::InvalidCircuit(format!(
                            "box `{}` is scheduled before its predecessor `{}`",
                            self.box_names[b], self.box_names[p]
                        )));
                    }
                }
            }
            seen[b] = true;
        }
        Ok(order.iter().map(|&b| vec![b]).collect())
    }

    /// Wires strictly downstream of each wire.
    pub fn descendants(&self) -> Vec<Vec<bool>> {
        let n = self.num_wires();
        let mut desc = vec![vec![false; n]; n];
        let layers = self.kahn_layers().expect("acyclic by construction");
        for layer in layers.iter().rev() {
            for &b in layer {
                let mut below = vec![false; n];
                for &o in &self.box_outputs[b] {
                    below[o] = true;
                    for (x, &d) in desc[o].iter().enumerate() {
                        if d {
                            below[x] = true;
                        }
                    }
                }
                for &w in &self.box_inputs[b] {
                    desc[w] = below.clone();
                }
            }
        }
        desc
    }

    /// Layered evaluation. Each layer step is a rearrangement of the live
    /// wires followed by the layer's boxes tensored with identities on the
    /// wires passing through. `filters` are endomorphisms applied to a wire
    /// as soon as it becomes live; `on_step` sees the layer index, the live
    /// wires, the prefix and the step before they are composed.
    pub fn run<P: Process>(
        &self,
        procs: &[P],
        objs: &[P::Obj],
        layers: &[Vec<usize>],
        filters: &std::collections::HashMap<usize, P>,
        mut on_step: impl FnMut(usize, &[usize], &P, &P) -> Result<()>,
    ) -> Result<P> {
        let unit = P::identity(&P::tensor_objs(&[]));
        let tensor_of =
            |ws: &[usize]| P::tensor_objs(&ws.iter().map(|&w| objs[w].clone()).collect::<Vec<_>>());
        let filter_stage = |live: &[usize], fresh: &dyn Fn(usize) -> bool| -> Option<P> {
            if !live.iter().any(|w| fresh(*w) && filters.contains_key(w)) {
                return None;
            }
            let parts: Vec<P> = live
                .iter()
                .map(|w| match filters.get(w) {
                    Some(f) if fresh(*w) => f.clone(),
                    _ => P::identity(&objs[*w]),
                })
                .collect();
            Some(tensor_all(&parts, &unit))
        };

        let mut live: Vec<usize> = self.inputs.clone();
        let mut acc = P::identity(&tensor_of(&live));
        if let Some(stage) = filter_stage(&live, &|_| true) {
            acc = acc.then(&stage)?;
        }
        for (i, layer) in layers.iter().enumerate() {
            let mut ins: Vec<usize> = Vec::new();
            let mut outs: Vec<usize> = Vec::new();
            for &b in layer {
                ins.extend(&self.box_inputs[b]);
                outs.extend(&self.box_outputs[b]);
            }
            let rest: Vec<usize> = live.iter().copied().filter(|w| !ins.contains(w)).collect();
            let mut arranged = ins.clone();
            arranged.extend(&rest);
            let order: Vec<usize> = arranged
                .iter()
                .map(|w| {
                    live.iter().position(|x| x == w).ok_or_else(|| {
                        Error::InvalidCircuit(format!(
                            "wire `{}` is not live at layer {i}",
                            self.wire_names[*w]
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            let mut step = tensor_all(
                &layer.iter().map(|&b| procs[b].clone()).collect::<Vec<_>>(),
                &unit,
            );
            if !rest.is_empty() {
                step = step.tensor(&P::identity(&tensor_of(&rest)));
            }
            if order.iter().enumerate().any(|(j, &o)| j != o) {
                let live_objs: Vec<P::Obj> = live.iter().map(|&w| objs[w].clone()).collect();
                step = P::permutation(&live_objs, &order).then(&step)?;
            }
            on_step(i, &live, &acc, &step)?;
            acc = acc.then(&step)?;
            live = outs.clone();
            live.extend(&rest);
            if let Some(stage) = filter_stage(&live, &|w| outs.contains(&w)) {
                acc = acc.then(&stage)?;
            }
        }
        let order: Vec<usize> = self
            .outputs
            .iter()
            .map(|w| {
                live.iter().position(|x| x == w).ok_or_else(|| {
                    Error::InvalidCircuit(format!(
                        "output wire `{}` never produced",
                        self.wire_names[*w]
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if order.iter().enumerate().any(|(j, &o)| j != o) {
            let live_objs: Vec<P::Obj> = live.iter().map(|&w| objs[w].clone()).collect();
            acc = acc.then(&P::permutation(&live_objs, &order))?;
        }
        Ok(acc)
    }
}
