//! JSON form of IODAGs.
//!
//! Wires are declared as `"X"` or with superscript classes, `"X^k,l"`, which
//! puts indices `k@X` and `l@X` of classes `k` and `l` on `X`. Indices may also
//! be listed explicitly. Node ports refer to wires by id; a trailing
//! superscript is ignored there.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{fresh, Index, Interpretation, Iodag, Lengths, Node};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::routedmap::RoutedMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRepr {
    pub id: String,
    #[serde(rename = "in", default)]
    pub inputs: Vec<String>,
    #[serde(rename = "out", default)]
    pub outputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexRepr {
    pub name: String,
    pub wire: String,
    pub class: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpretationRepr {
    pub lengths: Lengths,
    /// Sector dimensions per wire, in index-value order.
    pub dims: BTreeMap<String, Vec<usize>>,
    /// Node matrices; the routes follow from the indices.
    #[serde(with = "mat_map")]
    pub maps: BTreeMap<String, Mat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IodagRepr {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(default)]
    pub edges: Vec<String>,
    pub nodes: Vec<NodeRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indices: Vec<IndexRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub empty_nodes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpretation: Option<InterpretationRepr>,
}

/// Splits `"X^k,l"` into `("X", ["k", "l"])`.
pub fn parse_wire(decl: &str) -> Result<(String, Vec<String>)> {
    match decl.split_once('^') {
        None => Ok((decl.trim().to_string(), Vec::new())),
        Some((w, sup)) => {
            let w = w.trim();
            let classes: Vec<String> = sup.split(',').map(|c| c.trim().to_string()).collect();
            if w.is_empty() || classes.iter().any(String::is_empty) {
                return Err(Error::InvalidIodag(format!(
                    "cannot read wire declaration `{decl}`"
                )));
            }
            Ok((w.to_string(), classes))
        }
    }
}

fn port(r: &str) -> String {
    r.split_once('^').map_or(r, |(w, _)| w).trim().to_string()
}

/// The indices a superscript declaration introduces.
fn shorthand_indices(wire: &str, classes: &[String], used: &mut BTreeSet<String>) -> Vec<Index> {
    classes
        .iter()
        .map(|c| {
            let name = fresh(&format!("{c}@{wire}"), used);
            used.insert(name.clone());
            Index {
                name,
                wire: wire.to_string(),
                class: c.clone(),
            }
        })
        .collect()
}

impl IodagRepr {
    pub fn to_iodag(&self) -> Result<Iodag> {
        let mut used: BTreeSet<String> = self.indices.iter().map(|i| i.name.clone()).collect();
        let mut indices: Vec<Index> = Vec::new();
        let mut decl = |list: &[String], what: &str| -> Result<Vec<String>> {
            list.iter()
                .enumerate()
                .map(|(i, d)| {
                    let (w, classes) = parse_wire(d).map_err(|e| e.at(&format!("/{what}/{i}")))?;
                    indices.extend(shorthand_indices(&w, &classes, &mut used));
                    Ok(w)
                })
                .collect()
        };
        let inputs = decl(&self.inputs, "inputs")?;
        let outputs = decl(&self.outputs, "outputs")?;
        let edges = decl(&self.edges, "edges")?;
        indices.extend(self.indices.iter().map(|i| Index {
            name: i.name.clone(),
            wire: i.wire.clone(),
            class: i.class.clone(),
        }));
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                id: n.id.clone(),
                inputs: n.inputs.iter().map(|w| port(w)).collect(),
                outputs: n.outputs.iter().map(|w| port(w)).collect(),
            })
            .collect();
        Iodag::new(
            inputs,
            outputs,
            edges,
            nodes,
            indices,
            self.empty_nodes.clone(),
        )
    }

    pub fn from_iodag(g: &Iodag) -> IodagRepr {
        let mut explicit = Vec::new();
        let mut used = BTreeSet::new();
        let mut decl = |w: &String| {
            let on: Vec<&Index> = g.indices_on(w);
            let classes: Vec<String> = on.iter().map(|i| i.class.clone()).collect();
            let implied = shorthand_indices(w, &classes, &mut used);
            let mut a: Vec<(&str, &str)> = on
                .iter()
                .map(|i| (i.name.as_str(), i.class.as_str()))
                .collect();
            let mut b: Vec<(&str, &str)> = implied
                .iter()
                .map(|i| (i.name.as_str(), i.class.as_str()))
                .collect();
            a.sort_unstable();
            b.sort_unstable();
            if classes.is_empty() {
                w.clone()
            } else if a == b {
                format!("{w}^{}", classes.join(","))
            } else {
                explicit.extend(on.iter().map(|i| IndexRepr {
                    name: i.name.clone(),
                    wire: i.wire.clone(),
                    class: i.class.clone(),
                }));
                w.clone()
            }
        };
        let inputs = g.inputs.iter().map(&mut decl).collect();
        let outputs = g.outputs.iter().map(&mut decl).collect();
        let edges = g.edges.iter().map(&mut decl).collect();
        IodagRepr {
            inputs,
            outputs,
            edges,
            nodes: g
                .nodes
                .iter()
                .map(|n| NodeRepr {
                    id: n.id.clone(),
                    inputs: n.inputs.clone(),
                    outputs: n.outputs.clone(),
                })
                .collect(),
            indices: explicit,
            empty_nodes: g.empty.iter().cloned().collect(),
            interpretation: None,
        }
    }
}

impl InterpretationRepr {
    pub fn to_interpretation(&self, g: &Iodag, tol: f64) -> Result<Interpretation> {
        let mut spaces = BTreeMap::new();
        for w in g.wires() {
            let dims = self.dims.get(w).cloned().ok_or_else(|| {
                Error::TypeMismatch(format!(
                    "/interpretation/dims: no sector dimensions for wire `{w}`"
                ))
            })?;
            let space = g
                .wire_space(w, &self.lengths, dims)
                .map_err(|e| e.at(&format!("/interpretation/dims/{w}")))?;
            spaces.insert(w.clone(), space);
        }
        if let Some(w) = self.dims.keys().find(|w| g.wire_position(w).is_none()) {
            return Err(Error::InvalidIodag(format!(
                "/interpretation/dims: unknown wire `{w}`"
            )));
        }
        let mut maps = BTreeMap::new();
        for (id, m) in &self.maps {
            let n = g.node(id).map_err(|e| e.at("/interpretation/maps"))?;
            let route = g.node_corelation(id, &self.lengths)?.bar();
            let dom =
                crate::spaces::PartitionedSpace::tensor_all(n.inputs.iter().map(|w| &spaces[w]));
            let cod =
                crate::spaces::PartitionedSpace::tensor_all(n.outputs.iter().map(|w| &spaces[w]));
            if m.nrows() != cod.total_dim() || m.ncols() != dom.total_dim() {
                return Err(Error::ShapeMismatch(format!(
                    "/interpretation/maps/{id}: matrix is {}x{} but the wires need {}x{}",
                    m.nrows(),
                    m.ncols(),
                    cod.total_dim(),
                    dom.total_dim()
                )));
            }
            let f = RoutedMap::new(route, m.clone(), dom, cod, tol)
                .map_err(|e| e.at(&format!("/interpretation/maps/{id}")))?;
            maps.insert(id.clone(), f);
        }
        Ok(Interpretation {
            lengths: self.lengths.clone(),
            spaces,
            maps,
        })
    }

    pub fn from_interpretation(interp: &Interpretation) -> InterpretationRepr {
        InterpretationRepr {
            lengths: interp.lengths.clone(),
            dims: interp
                .spaces
                .iter()
                .map(|(w, s)| (w.clone(), s.sector_dims().to_vec()))
                .collect(),
            maps: interp
                .maps
                .iter()
                .map(|(n, f)| (n.clone(), f.matrix().clone()))
                .collect(),
        }
    }
}

mod mat_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct M(#[serde(with = "linalg::serde_mat")] Mat);

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, Mat>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let w: BTreeMap<&String, M> = m.iter().map(|(k, v)| (k, M(v.clone()))).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<String, Mat>, D::Error> {
        let w = BTreeMap::<String, M>::deserialize(d)?;
        Ok(w.into_iter().map(|(k, v)| (k, v.0)).collect())
    }
}
