//! Interpreting an IODAG: index values become sectors, nodes become routed
//! maps whose routes are fixed by the index matching.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::Serialize;

use super::{Corelation, ImproperWitness, Iodag, Lengths, LintMode};
use crate::circuit::{Mode, RoutedCircuit};
use crate::error::{Error, Result};
use crate::linalg;
use crate::relations::Relation;
use crate::routedmap::RoutedMap;
use crate::sample;
use crate::spaces::PartitionedSpace;

/// Wire spaces and node maps for an IODAG.
///
/// Each wire's sectors are labelled by the values of its indices (name order);
/// a wire without indices has the single sector `()`. Empty nodes without a
/// map act as the identity.
#[derive(Clone, Debug)]
pub struct Interpretation {
    pub lengths: Lengths,
    pub spaces: BTreeMap<String, PartitionedSpace>,
    pub maps: BTreeMap<String, RoutedMap>,
}

/// Outcome of gating one layer of the index-matching composite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerGate {
    pub layer: usize,
    pub nodes: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ImproperWitness>,
}

impl Iodag {
    /// The space on `wire` with the given dimension per index value.
    pub fn wire_space(
        &self,
        wire: &str,
        lengths: &Lengths,
        dims: Vec<usize>,
    ) -> Result<PartitionedSpace> {
        let fam = self.family(wire, lengths)?;
        PartitionedSpace::named(wire, &fam.values(), dims)
    }

    /// Composes the node corelations along the default foliation, after the
    /// preprocessing of the inputs, gating each layer against everything
    /// before it.
    pub fn compose_along_graph(
        &self,
        lengths: &Lengths,
        mode: LintMode,
    ) -> Result<(Corelation, Vec<LayerGate>)> {
        let topo = &self.topo;
        let objs = self
            .wires()
            .map(|w| self.family(w, lengths))
            .collect::<Result<Vec<_>>>()?;
        let procs = self
            .nodes
            .iter()
            .map(|n| self.node_corelation(&n.id, lengths))
            .collect::<Result<Vec<_>>>()?;
        let pre = self.preprocessing(lengths)?;
        let layers = topo.kahn_layers()?;
        let mut gates = Vec::new();
        let body = topo.run(
            &procs,
            &objs,
            &layers,
            &HashMap::new(),
            |i, _, prefix, step| {
                let before = prefix.compose(&pre)?;
                let witness = super::explain_improper(&before, step, mode == LintMode::Uni)?;
                gates.push(LayerGate {
                    layer: i,
                    nodes: layers[i]
                        .iter()
                        .map(|&b| topo.box_name(b).to_string())
                        .collect(),
                    passed: witness.is_none(),
                    witness,
                });
                Ok(())
            },
        )?;
        Ok((body.compose(&pre)?, gates))
    }

    /// Checks an interpretation against the diagram and builds the circuit of
    /// its node maps.
    pub fn circuit(
        &self,
        interp: &Interpretation,
        mode: LintMode,
        tol: f64,
    ) -> Result<RoutedCircuit> {
        let lengths = &interp.lengths;
        let mut b = RoutedCircuit::builder(Mode::Pure);
        for w in self.wires() {
            let space = interp
                .spaces
                .get(w)
                .ok_or_else(|| Error::TypeMismatch(format!("no space given for wire `{w}`")))?;
            let expected = self.family(w, lengths)?.values();
            if space.labels() != &expected || !space.is_elementary() {
                return Err(Error::TypeMismatch(format!(
                    "wire `{w}` carries {space} but its indices take the values {}",
                    self.family(w, lengths)?
                )));
            }
            b = b.wire(w, space);
        }
        for n in &self.nodes {
            let kappa = self.node_corelation(&n.id, lengths)?;
            let dom = PartitionedSpace::tensor_all(n.inputs.iter().map(|w| &interp.spaces[w]));
            let cod = PartitionedSpace::tensor_all(n.outputs.iter().map(|w| &interp.spaces[w]));
            let f = match interp.maps.get(&n.id) {
                Some(f) => f.clone(),
                None if self.empty.contains(&n.id) => RoutedMap::identity(&dom),
                None => {
                    return Err(Error::TypeMismatch(format!(
                        "no map given for node `{}`",
                        n.id
                    )))
                }
            };
            if f.domain() != &dom || f.codomain() != &cod {
                return Err(Error::TypeMismatch(format!(
                    "node `{}` maps {} to {} but its wires carry {} and {}",
                    n.id,
                    f.domain(),
                    f.codomain(),
                    dom,
                    cod
                )));
            }
            if f.route() != &kappa.bar() {
                return Err(Error::RouteViolation(format!(
                    "node `{}` must be routed by the matching of its indices",
                    n.id
                )));
            }
            let ok = match mode {
                LintMode::Iso => f.is_practical_isometry(tol),
                LintMode::Uni => f.is_practical_unitary(tol),
            };
            if !ok {
                return Err(Error::NotPracticalIsometry(format!(
                    "node `{}` is not a practical {}",
                    n.id,
                    if mode == LintMode::Iso {
                        "isometry"
                    } else {
                        "unitary"
                    }
                )));
            }
            let ins: Vec<&str> = n.inputs.iter().map(String::as_str).collect();
            let outs: Vec<&str> = n.outputs.iter().map(String::as_str).collect();
            b = b.pure_box(&n.id, &ins, &outs, f);
        }
        let ins: Vec<&str> = self.inputs.iter().map(String::as_str).collect();
        let outs: Vec<&str> = self.outputs.iter().map(String::as_str).collect();
        b.inputs(&ins).outputs(&outs).build()
    }

    /// The meaning of the diagram under `interp`: the circuit of its node maps
    /// after the projection onto input values that agree on shared indices.
    /// The diagram must pass the lint for `mode`.
    pub fn interpret(
        &self,
        interp: &Interpretation,
        mode: LintMode,
        tol: f64,
    ) -> Result<RoutedMap> {
        let report = self.lint(mode);
        if !report.passed {
            let msgs: Vec<&str> = report
                .violations
                .iter()
                .map(|v| v.message.as_str())
                .collect();
            return Err(Error::LintFailure(msgs.join("; ")));
        }
        for id in &self.empty {
            if let Some(f) = interp.maps.get(id) {
                let id_map = linalg::identity(f.domain().total_dim());
                if f.domain() != f.codomain() || linalg::max_diff(f.matrix(), &id_map) > tol {
                    return Err(Error::TypeMismatch(format!(
                        "empty node `{id}` must be interpreted as the identity"
                    )));
                }
            }
        }
        let circuit = self.normalize().circuit(interp, mode, tol)?;
        let body = circuit
            .evaluate()?
            .as_pure()
            .cloned()
            .expect("pure circuit");
        let pre = self.preprocessing_map(&circuit.input_space(), &interp.lengths)?;
        body.compose(&pre)
    }

    /// `Σ_k [κ_pre relates k to k] π^k` on the input space.
    pub fn preprocessing_map(
        &self,
        space: &PartitionedSpace,
        lengths: &Lengths,
    ) -> Result<RoutedMap> {
        let route = self.preprocessing(lengths)?.bar();
        let n = space.total_dim();
        debug_assert_eq!(route.domain(), space.labels());
        let mut m = linalg::zeros(n, n);
        for k in 0..space.num_sectors() {
            if route.get(k, k) {
                m += space.projector_at(k);
            }
        }
        RoutedMap::new(route, m, space.clone(), space.clone(), linalg::DEFAULT_TOL)
    }

    /// A random interpretation by practical isometries. Input wires get
    /// `base_dim` per sector; each node's output sectors share one dimension,
    /// the smallest (at least `base_dim`) that leaves room for every input
    /// sector routed into one output sector.
    pub fn random_interpretation<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        lengths: &Lengths,
        base_dim: usize,
    ) -> Result<Interpretation> {
        let mut spaces: BTreeMap<String, PartitionedSpace> = BTreeMap::new();
        for w in &self.inputs {
            let n = self.family(w, lengths)?.num_values();
            spaces.insert(w.clone(), self.wire_space(w, lengths, vec![base_dim; n])?);
        }
        for layer in self.topo.kahn_layers()? {
            for b in layer {
                let node = &self.nodes[b];
                if self.empty.contains(&node.id) {
                    let space = &spaces[&node.inputs[0]];
                    let out =
                        self.wire_space(&node.outputs[0], lengths, space.sector_dims().to_vec())?;
                    spaces.insert(node.outputs[0].clone(), out);
                    continue;
                }
                let dom = PartitionedSpace::tensor_all(node.inputs.iter().map(|w| &spaces[w]));
                let route: Relation = self.node_corelation(&node.id, lengths)?.bar();
                let out_values: Vec<usize> = node
                    .outputs
                    .iter()
                    .map(|w| Ok(self.family(w, lengths)?.num_values()))
                    .collect::<Result<_>>()?;
                let need = (0..route.codomain().len())
                    .map(|l| {
                        (0..route.domain().len())
                            .filter(|&k| route.get(k, l))
                            .map(|k| dom.sector_dims()[k])
                            .sum::<usize>()
                    })
                    .max()
                    .unwrap_or(0);
                let mut d = base_dim.max(1);
                while !node.outputs.is_empty() && d.pow(node.outputs.len() as u32) < need {
                    d += 1;
                }
                for (w, &n) in node.outputs.iter().zip(&out_values) {
                    spaces.insert(w.clone(), self.wire_space(w, lengths, vec![d; n])?);
                }
            }
        }
        self.sample_maps(rng, lengths, spaces, LintMode::Iso)
    }

    /// A random interpretation with the given sector dimensions per wire.
    /// Nodes get practical isometries, or practical unitaries in `Uni` mode;
    /// fails when a node admits none for these dimensions.
    pub fn random_interpretation_with_dims<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        lengths: &Lengths,
        dims: &BTreeMap<String, Vec<usize>>,
        mode: LintMode,
    ) -> Result<Interpretation> {
        let mut spaces = BTreeMap::new();
        for w in self.wires() {
            let d = dims.get(w).ok_or_else(|| {
                Error::TypeMismatch(format!("no sector dimensions for wire `{w}`"))
            })?;
            spaces.insert(w.clone(), self.wire_space(w, lengths, d.clone())?);
        }
        self.sample_maps(rng, lengths, spaces, mode)
    }

    fn sample_maps<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        lengths: &Lengths,
        spaces: BTreeMap<String, PartitionedSpace>,
        mode: LintMode,
    ) -> Result<Interpretation> {
        let mut maps = BTreeMap::new();
        for node in &self.nodes {
            if self.empty.contains(&node.id) {
                continue;
            }
            let dom = PartitionedSpace::tensor_all(node.inputs.iter().map(|w| &spaces[w]));
            let cod = PartitionedSpace::tensor_all(node.outputs.iter().map(|w| &spaces[w]));
            let route = self.node_corelation(&node.id, lengths)?.bar();
            let f = match mode {
                LintMode::Iso => sample::random_practical_isometry(rng, &route, &dom, &cod),
                LintMode::Uni => sample::random_practical_unitary(rng, &route, &dom, &cod),
            }
            .ok_or_else(|| {
                let kind = if mode == LintMode::Iso {
                    "isometry"
                } else {
                    "unitary"
                };
                Error::NotPracticalIsometry(format!("no practical {kind} fits node `{}`", node.id))
            })?;
            maps.insert(node.id.clone(), f);
        }
        Ok(Interpretation {
            lengths: lengths.clone(),
            spaces,
            maps,
        })
    }
}
