//! Routed circuits: boxes wired into a DAG, evaluated layer by layer.
//!
//! A foliation groups boxes into layers. Each layer is evaluated as a wire
//! rearrangement followed by the tensor of its boxes with identities on the
//! wires that pass through, and the layers are composed in order. The same
//! engine runs over anything implementing [`Process`]: routed maps, routed
//! CPMs, and the bare routes themselves.

mod accessible;
mod dot;
pub mod examples;
mod json;
mod process;
mod topology;

pub use accessible::{AccessibleSpace, Algorithm};
pub use json::{BoxRepr, CircuitRepr, MapRepr, WireRepr};
pub use process::Process;
pub use topology::{Endpoint, Topology};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Label;
use crate::relations::{isometry_gate, unitary_gate, CpRelation, GateViolation, Relation};
use crate::routedcpm::RoutedCpm;
use crate::routedmap::RoutedMap;
use crate::spaces::PartitionedSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pure,
    Cpm,
}

/// Which properness gate [`RoutedCircuit::check`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Isometry,
    Unitary,
    Channel,
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckMode::Isometry => "isometry",
            CheckMode::Unitary => "unitary",
            CheckMode::Channel => "channel",
        })
    }
}

#[derive(Clone, Debug)]
pub enum BoxMap {
    Pure(RoutedMap),
    Cpm(RoutedCpm),
}

impl BoxMap {
    pub fn domain(&self) -> &PartitionedSpace {
        match self {
            BoxMap::Pure(f) => f.domain(),
            BoxMap::Cpm(c) => c.domain(),
        }
    }

    pub fn codomain(&self) -> &PartitionedSpace {
        match self {
            BoxMap::Pure(f) => f.codomain(),
            BoxMap::Cpm(c) => c.codomain(),
        }
    }

    /// The route as a plain relation; for CPMs this is the diagonal.
    pub fn route_relation(&self) -> Relation {
        match self {
            BoxMap::Pure(f) => f.route().clone(),
            BoxMap::Cpm(c) => c.route().diagonal(),
        }
    }

    pub fn cp_route(&self) -> CpRelation {
        match self {
            BoxMap::Pure(f) => CpRelation::full_coherence(f.route()),
            BoxMap::Cpm(c) => c.route().clone(),
        }
    }

    pub fn to_cpm(&self) -> RoutedCpm {
        match self {
            BoxMap::Pure(f) => RoutedCpm::lift_pure(f),
            BoxMap::Cpm(c) => c.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&RoutedMap> {
        match self {
            BoxMap::Pure(f) => Some(f),
            BoxMap::Cpm(_) => None,
        }
    }

    pub fn as_cpm(&self) -> Option<&RoutedCpm> {
        match self {
            BoxMap::Cpm(c) => Some(c),
            BoxMap::Pure(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CircuitBox {
    pub id: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub map: BoxMap,
}

/// Collects wires and boxes; [`CircuitBuilder::build`] validates them.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    mode: Mode,
    wires: Vec<(String, PartitionedSpace)>,
    boxes: Vec<CircuitBox>,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl CircuitBuilder {
    pub fn new(mode: Mode) -> Self {
        CircuitBuilder {
            mode,
            wires: Vec::new(),
            boxes: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn wire(mut self, id: &str, space: &PartitionedSpace) -> Self {
        self.wires.push((id.to_string(), space.clone()));
        self
    }

    pub fn add_box(mut self, id: &str, inputs: &[&str], outputs: &[&str], map: BoxMap) -> Self {
        self.boxes.push(CircuitBox {
            id: id.to_string(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            map,
        });
        self
    }

    pub fn pure_box(self, id: &str, inputs: &[&str], outputs: &[&str], f: RoutedMap) -> Self {
        self.add_box(id, inputs, outputs, BoxMap::Pure(f))
    }

    pub fn cpm_box(self, id: &str, inputs: &[&str], outputs: &[&str], c: RoutedCpm) -> Self {
        self.add_box(id, inputs, outputs, BoxMap::Cpm(c))
    }

    pub fn inputs(mut self, ids: &[&str]) -> Self {
        self.inputs = ids.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn outputs(mut self, ids: &[&str]) -> Self {
        self.outputs = ids.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn build(self) -> Result<RoutedCircuit> {
        RoutedCircuit::from_parts(self.mode, self.wires, self.boxes, self.inputs, self.outputs)
    }
}

#[derive(Clone, Debug)]
pub struct RoutedCircuit {
    mode: Mode,
    wires: Vec<(String, PartitionedSpace)>,
    wire_index: HashMap<String, usize>,
    boxes: Vec<CircuitBox>,
    topo: Topology,
    layers: Vec<Vec<usize>>,
}

/// Result of gating one layer against everything composed before it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterfaceReport {
    pub layer: usize,
    /// Boxes of this layer.
    pub boxes: Vec<String>,
    /// Live wires between the prefix and this layer, in tuple order.
    pub wires: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub escaping: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub mode: CheckMode,
    pub passed: bool,
    pub interfaces: Vec<InterfaceReport>,
}

impl RoutedCircuit {
    pub fn builder(mode: Mode) -> CircuitBuilder {
        CircuitBuilder::new(mode)
    }

    fn from_parts(
        mode: Mode,
        wires: Vec<(String, PartitionedSpace)>,
        mut boxes: Vec<CircuitBox>,
        inputs: Vec<String>,
        outputs: Vec<String>,
    ) -> Result<Self> {
        let mut wire_index = HashMap::new();
        for (i, (id, space)) in wires.iter().enumerate() {
            if wire_index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidCircuit(format!("wire `{id}` declared twice")));
            }
            if !space.is_elementary() {
                return Err(Error::InvalidCircuit(format!(
                    "wire `{id}` carries the composite space {space}; split it into one wire per factor"
                )));
            }
        }
        let lookup = |id: &str| {
            wire_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::InvalidCircuit(format!("unknown wire `{id}`")))
        };
        let mut seen_boxes = HashMap::new();
        for (b, bx) in boxes.iter().enumerate() {
            if seen_boxes.insert(bx.id.clone(), b).is_some() {
                return Err(Error::InvalidCircuit(format!(
                    "box `{}` declared twice",
                    bx.id
                )));
            }
        }
        let idx_of = |ids: &[String]| ids.iter().map(|s| lookup(s)).collect::<Result<Vec<_>>>();
        let input_idx = idx_of(&inputs)?;
        let output_idx = idx_of(&outputs)?;
        let topo_boxes = boxes
            .iter()
            .map(|bx| Ok((bx.id.clone(), idx_of(&bx.inputs)?, idx_of(&bx.outputs)?)))
            .collect::<Result<Vec<_>>>()?;
        let topo = Topology::new(
            wires.iter().map(|(id, _)| id.clone()).collect(),
            topo_boxes,
            input_idx,
            output_idx,
            "circuit",
        )?;

        for bx in boxes.iter_mut() {
            if mode == Mode::Pure && matches!(bx.map, BoxMap::Cpm(_)) {
                return Err(Error::TypeMismatch(format!(
                    "box `{}` is a CP map but the circuit is pure",
                    bx.id
                )));
            }
            if mode == Mode::Cpm {
                if let BoxMap::Pure(f) = &bx.map {
                    bx.map = BoxMap::Cpm(RoutedCpm::lift_pure(f));
                }
            }
            let dom =
                PartitionedSpace::tensor_all(bx.inputs.iter().map(|w| &wires[wire_index[w]].1));
            let cod =
                PartitionedSpace::tensor_all(bx.outputs.iter().map(|w| &wires[wire_index[w]].1));
            if bx.map.domain() != &dom {
                return Err(Error::TypeMismatch(format!(
                    "box `{}` expects input space {} but its wires carry {}",
                    bx.id,
                    bx.map.domain(),
                    dom
                )));
            }
            if bx.map.codomain() != &cod {
                return Err(Error::TypeMismatch(format!(
                    "box `{}` produces {} but its wires carry {}",
                    bx.id,
                    bx.map.codomain(),
                    cod
                )));
            }
        }

        let layers = topo.kahn_layers()?;
        Ok(RoutedCircuit {
            mode,
            wires,
            wire_index,
            boxes,
            topo,
            layers,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn boxes(&self) -> &[CircuitBox] {
        &self.boxes
    }

    pub fn wires(&self) -> &[(String, PartitionedSpace)] {
        &self.wires
    }

    pub fn wire_space(&self, id: &str) -> Result<&PartitionedSpace> {
        self.wire_index
            .get(id)
            .map(|&i| &self.wires[i].1)
            .ok_or_else(|| Error::InvalidCircuit(format!("unknown wire `{id}`")))
    }

    pub fn input_wires(&self) -> Vec<&str> {
        self.topo
            .inputs()
            .iter()
            .map(|&w| self.wires[w].0.as_str())
            .collect()
    }

    pub fn output_wires(&self) -> Vec<&str> {
        self.topo
            .outputs()
            .iter()
            .map(|&w| self.wires[w].0.as_str())
            .collect()
    }

    pub fn producer(&self, wire: usize) -> Endpoint {
        self.topo.producer(wire)
    }

    pub fn consumer(&self, wire: usize) -> Endpoint {
        self.topo.consumer(wire)
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub(crate) fn wire_idx(&self, id: &str) -> Option<usize> {
        self.wire_index.get(id).copied()
    }

    /// The default foliation: Kahn generations with ties broken by box id.
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn input_space(&self) -> PartitionedSpace {
        PartitionedSpace::tensor_all(self.topo.inputs().iter().map(|&w| &self.wires[w].1))
    }

    pub fn output_space(&self) -> PartitionedSpace {
        PartitionedSpace::tensor_all(self.topo.outputs().iter().map(|&w| &self.wires[w].1))
    }

    /// One box per layer in the given order, which must be topological.
    pub fn layers_from_order(&self, order: &[usize]) -> Result<Vec<Vec<usize>>> {
        self.topo.layers_from_order(order)
    }

    pub(crate) fn run<P: Process>(
        &self,
        procs: &[P],
        objs: &[P::Obj],
        layers: &[Vec<usize>],
        filters: &HashMap<usize, P>,
        on_step: impl FnMut(usize, &[usize], &P, &P) -> Result<()>,
    ) -> Result<P> {
        self.topo.run(procs, objs, layers, filters, on_step)
    }

    fn run_simple<P: Process>(
        &self,
        procs: &[P],
        objs: &[P::Obj],
        layers: &[Vec<usize>],
    ) -> Result<P> {
        self.run(procs, objs, layers, &HashMap::new(), |_, _, _, _| Ok(()))
    }

    fn spaces(&self) -> Vec<PartitionedSpace> {
        self.wires.iter().map(|(_, s)| s.clone()).collect()
    }

    pub(crate) fn route_objs(&self) -> Vec<crate::label::IndexSet> {
        self.wires.iter().map(|(_, s)| s.labels().clone()).collect()
    }

    /// Evaluates along the default foliation.
    pub fn evaluate(&self) -> Result<BoxMap> {
        self.evaluate_layers(&self.layers)
    }

    /// Evaluates one box at a time in the given topological order.
    pub fn evaluate_with_order(&self, order: &[usize]) -> Result<BoxMap> {
        let layers = self.layers_from_order(order)?;
        self.evaluate_layers(&layers)
    }

    fn evaluate_layers(&self, layers: &[Vec<usize>]) -> Result<BoxMap> {
        let spaces = self.spaces();
        match self.mode {
            Mode::Pure => {
                let procs: Vec<RoutedMap> = self
                    .boxes
                    .iter()
                    .map(|b| b.map.as_pure().cloned().expect("pure circuit"))
                    .collect();
                Ok(BoxMap::Pure(self.run_simple(&procs, &spaces, layers)?))
            }
            Mode::Cpm => {
                let procs: Vec<RoutedCpm> = self.boxes.iter().map(|b| b.map.to_cpm()).collect();
                Ok(BoxMap::Cpm(self.run_simple(&procs, &spaces, layers)?))
            }
        }
    }

    /// The end-to-end route (diagonals in CPM mode).
    pub fn route(&self) -> Result<Relation> {
        let procs: Vec<Relation> = self.boxes.iter().map(|b| b.map.route_relation()).collect();
        self.run_simple(&procs, &self.route_objs(), &self.layers)
    }

    /// Gates each layer of the default foliation against the composite of
    /// all earlier layers.
    pub fn check(&self, mode: CheckMode) -> Result<CheckReport> {
        self.check_layers(mode, &self.layers)
    }

    pub fn check_layers(&self, mode: CheckMode, layers: &[Vec<usize>]) -> Result<CheckReport> {
        let mut interfaces = Vec::new();
        let names = |live: &[usize]| {
            live.iter()
                .map(|&w| self.wires[w].0.clone())
                .collect::<Vec<_>>()
        };
        let box_ids = |i: usize| {
            layers[i]
                .iter()
                .map(|&b| self.boxes[b].id.clone())
                .collect::<Vec<_>>()
        };
        let mut record = |i: usize, live: &[usize], v: Option<GateViolation>| {
            interfaces.push(InterfaceReport {
                layer: i,
                boxes: box_ids(i),
                wires: names(live),
                passed: v.is_none(),
                target: v.as_ref().map(|v| v.target.to_string()),
                escaping: v.map(|v| v.escaping.labels()).unwrap_or_default(),
            });
        };
        match mode {
            CheckMode::Isometry | CheckMode::Unitary => {
                if self.mode == Mode::Cpm {
                    return Err(Error::TypeMismatch(format!(
                        "{mode} checks apply to pure circuits; use the channel check for CP maps"
                    )));
                }
                let procs: Vec<Relation> =
                    self.boxes.iter().map(|b| b.map.route_relation()).collect();
                self.run(
                    &procs,
                    &self.route_objs(),
                    layers,
                    &HashMap::new(),
                    |i, live, prefix, step| {
                        let v = if mode == CheckMode::Isometry {
                            isometry_gate(prefix, step)?
                        } else {
                            unitary_gate(prefix, step)?
                        };
                        record(i, live, v);
                        Ok(())
                    },
                )?;
            }
            CheckMode::Channel => {
                let procs: Vec<CpRelation> = self.boxes.iter().map(|b| b.map.cp_route()).collect();
                self.run(
                    &procs,
                    &self.route_objs(),
                    layers,
                    &HashMap::new(),
                    |i, live, prefix, step| {
                        record(i, live, crate::relations::channel_gate(prefix, step)?);
                        Ok(())
                    },
                )?;
            }
        }
        let passed = interfaces.iter().all(|r| r.passed);
        Ok(CheckReport {
            mode,
            passed,
            interfaces,
        })
    }

    pub(crate) fn descendants(&self) -> Vec<Vec<bool>> {
        self.topo.descendants()
    }

    pub fn to_dot(&self) -> String {
        dot::circuit_to_dot(self)
    }

    /// Box ids grouped by the default foliation.
    pub fn foliation_ids(&self) -> Vec<Vec<String>> {
        self.layers
            .iter()
            .map(|l| l.iter().map(|&b| self.boxes[b].id.clone()).collect())
            .collect()
    }

    pub fn box_index(&self, id: &str) -> Option<usize> {
        self.boxes.iter().position(|b| b.id == id)
    }
}
