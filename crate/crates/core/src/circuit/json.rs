//! JSON form of routed circuits.
//!
//! Inside a box the route may omit `domain` and `codomain`: they are taken
//! from the box's wires. Routes may also be written as the strings
//! `"identity"` or `"full"`. A CP box takes `{"route": ..., "kraus": [...]}`,
//! where the route is an `"array"` or a `full_coherence` / `full_decoherence`
//! shorthand, or `{"discard": true}` for the trace.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BoxMap, CircuitBox, Mode, RoutedCircuit};
use crate::error::{Error, Result};
use crate::label::IndexSet;
use crate::linalg::{self, Mat};
use crate::relations::{Bit, BoolArray4, CpRelation, Relation};
use crate::routedcpm::RoutedCpm;
use crate::routedmap::RoutedMap;
use crate::spaces::PartitionedSpace;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitRepr {
    pub mode: Mode,
    pub spaces: BTreeMap<String, SpaceRepr>,
    pub wires: Vec<WireRepr>,
    pub boxes: Vec<BoxRepr>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// A named space; the name is the key in `spaces`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceRepr {
    pub sectors: Vec<SectorRepr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorRepr {
    pub label: crate::label::Label,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireRepr {
    pub id: String,
    pub space: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRepr {
    pub id: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub map: MapRepr,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<RouteRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_mat")]
    pub matrix: Option<Mat>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_mats")]
    pub kraus: Option<Vec<Mat>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub discard: bool,
    /// Space names, checked against the wires when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SpaceNames>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<SpaceNames>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceNames {
    One(String),
    Many(Vec<String>),
}

impl SpaceNames {
    fn names(&self) -> Vec<&str> {
        match self {
            SpaceNames::One(s) => vec![s.as_str()],
            SpaceNames::Many(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RouteRepr {
    Named(String),
    Matrix(RelationRepr),
    Cp(CpRepr),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<IndexSet>,
    pub matrix: Vec<Vec<Bit>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub array: Option<Vec<Vec<Vec<Vec<Bit>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_coherence: Option<Box<RouteRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_decoherence: Option<Box<RouteRepr>>,
}

mod opt_mat {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Option<Mat>, s: S) -> Result<S::Ok, S::Error> {
        match m {
            Some(m) => linalg::serde_mat::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Mat>, D::Error> {
        linalg::serde_mat::deserialize(d).map(Some)
    }
}

mod opt_mats {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Option<Vec<Mat>>, s: S) -> Result<S::Ok, S::Error> {
        match m {
            Some(m) => linalg::serde_mats::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Mat>>, D::Error> {
        linalg::serde_mats::deserialize(d).map(Some)
    }
}

fn check_labels(given: &Option<IndexSet>, expected: &IndexSet, what: &str) -> Result<()> {
    match given {
        Some(g) if g != expected => Err(Error::DomainMismatch(format!(
            "route {what} {g} differs from the wire sectors {expected}"
        ))),
        _ => Ok(()),
    }
}

impl RouteRepr {
    pub fn to_relation(&self, dom: &IndexSet, cod: &IndexSet) -> Result<Relation> {
        match self {
            RouteRepr::Named(n) => match n.as_str() {
                "identity" => {
                    if dom != cod {
                        return Err(Error::DomainMismatch(format!(
                            "identity route needs equal sector sets, got {dom} and {cod}"
                        )));
                    }
                    Ok(Relation::identity(dom))
                }
                "full" => Ok(Relation::full(dom, cod)),
                other => Err(Error::InvariantViolation(format!(
                    "unknown route name `{other}` (expected `identity` or `full`)"
                ))),
            },
            RouteRepr::Matrix(r) => {
                check_labels(&r.domain, dom, "domain")?;
                check_labels(&r.codomain, cod, "codomain")?;
                let m: Vec<Vec<bool>> = r
                    .matrix
                    .iter()
                    .map(|row| row.iter().map(|b| b.0).collect())
                    .collect();
                Relation::from_matrix(dom, cod, &m)
            }
            RouteRepr::Cp(_) => Err(Error::TypeMismatch(
                "a pure map needs a two-index route".into(),
            )),
        }
    }

    pub fn to_cp_relation(&self, dom: &IndexSet, cod: &IndexSet) -> Result<CpRelation> {
        match self {
            RouteRepr::Cp(c) => {
                check_labels(&c.domain, dom, "domain")?;
                check_labels(&c.codomain, cod, "codomain")?;
                match (&c.array, &c.full_coherence, &c.full_decoherence) {
                    (Some(a), None, None) => {
                        let nested: Vec<Vec<Vec<Vec<bool>>>> = a
                            .iter()
                            .map(|x| x.iter().map(|y| y.iter().map(|z| z.iter().map(|b| b.0).collect()).collect()).collect())
                            .collect();
                        CpRelation::new(dom, cod, BoolArray4::from_nested(&nested)?)
                    }
                    (None, Some(r), None) => Ok(CpRelation::full_coherence(&r.to_relation(dom, cod)?)),
                    (None, None, Some(r)) => Ok(CpRelation::full_decoherence(&r.to_relation(dom, cod)?)),
                    _ => Err(Error::InvariantViolation(
                        "a CP route needs exactly one of `array`, `full_coherence`, `full_decoherence`".into(),
                    )),
                }
            }
            // a two-index route on a CP box reads as full coherence
            other => Ok(CpRelation::full_coherence(&other.to_relation(dom, cod)?)),
        }
    }

    pub fn from_relation(r: &Relation) -> Self {
        RouteRepr::Matrix(RelationRepr {
            domain: None,
            codomain: None,
            matrix: r
                .to_matrix()
                .into_iter()
                .map(|row| row.into_iter().map(Bit).collect())
                .collect(),
        })
    }

    pub fn from_cp_relation(r: &CpRelation) -> Self {
        let diag = r.diagonal();
        if *r == CpRelation::full_coherence(&diag) {
            return RouteRepr::Cp(CpRepr {
                full_coherence: Some(Box::new(Self::from_relation(&diag))),
                ..CpRepr::empty()
            });
        }
        if r.has_full_decoherence() {
            return RouteRepr::Cp(CpRepr {
                full_decoherence: Some(Box::new(Self::from_relation(&diag))),
                ..CpRepr::empty()
            });
        }
        let array = r
            .array()
            .to_nested()
            .into_iter()
            .map(|x| {
                x.into_iter()
                    .map(|y| {
                        y.into_iter()
                            .map(|z| z.into_iter().map(Bit).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        RouteRepr::Cp(CpRepr {
            array: Some(array),
            ..CpRepr::empty()
        })
    }
}

impl CpRepr {
    fn empty() -> Self {
        CpRepr {
            domain: None,
            codomain: None,
            array: None,
            full_coherence: None,
            full_decoherence: None,
        }
    }
}

impl MapRepr {
    fn check_names(&self, dom: &[&PartitionedSpace], cod: &[&PartitionedSpace]) -> Result<()> {
        for (given, spaces, what) in [
            (&self.domain, dom, "domain"),
            (&self.codomain, cod, "codomain"),
        ] {
            if let Some(g) = given {
                let want: Vec<&str> = spaces.iter().map(|s| s.name().unwrap_or("?")).collect();
                if g.names() != want {
                    return Err(Error::TypeMismatch(format!(
                        "{what} names {:?} do not match the wire spaces {:?}",
                        g.names(),
                        want
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds the box map for the given wire spaces.
    pub fn to_box_map(
        &self,
        mode: Mode,
        dom_spaces: &[&PartitionedSpace],
        cod_spaces: &[&PartitionedSpace],
        tol: f64,
    ) -> Result<BoxMap> {
        self.check_names(dom_spaces, cod_spaces)?;
        let dom = PartitionedSpace::tensor_all(dom_spaces.iter().copied());
        let cod = PartitionedSpace::tensor_all(cod_spaces.iter().copied());
        if self.discard {
            if self.route.is_some() || self.matrix.is_some() || self.kraus.is_some() {
                return Err(Error::InvariantViolation(
                    "`discard` takes no route or matrices".into(),
                ));
            }
            if cod.num_factors() != 0 {
                return Err(Error::TypeMismatch(
                    "a discard box has no output wires".into(),
                ));
            }
            return Ok(BoxMap::Cpm(RoutedCpm::discard(&dom)));
        }
        let route = self
            .route
            .as_ref()
            .ok_or_else(|| Error::InvariantViolation("map needs a `route`".into()))?;
        match (&self.matrix, &self.kraus) {
            (Some(m), None) => {
                let r = route.to_relation(dom.labels(), cod.labels())?;
                Ok(BoxMap::Pure(RoutedMap::new(r, m.clone(), dom, cod, tol)?))
            }
            (None, Some(ks)) => {
                if mode == Mode::Pure {
                    return Err(Error::TypeMismatch(
                        "Kraus operators in a pure circuit".into(),
                    ));
                }
                let r = route.to_cp_relation(dom.labels(), cod.labels())?;
                Ok(BoxMap::Cpm(RoutedCpm::new(r, ks.clone(), dom, cod, tol)?))
            }
            _ => Err(Error::InvariantViolation(
                "map needs exactly one of `matrix` or `kraus`".into(),
            )),
        }
    }

    pub fn from_box_map(map: &BoxMap) -> Self {
        match map {
            BoxMap::Pure(f) => MapRepr {
                route: Some(RouteRepr::from_relation(f.route())),
                matrix: Some(f.matrix().clone()),
                ..MapRepr::default()
            },
            BoxMap::Cpm(c) => MapRepr {
                route: Some(RouteRepr::from_cp_relation(c.route())),
                kraus: Some(c.kraus().to_vec()),
                ..MapRepr::default()
            },
        }
    }
}

impl CircuitRepr {
    pub fn to_circuit(&self, tol: f64) -> Result<RoutedCircuit> {
        let mut spaces: BTreeMap<&str, PartitionedSpace> = BTreeMap::new();
        for (name, s) in &self.spaces {
            let labels = IndexSet::new(s.sectors.iter().map(|x| x.label.clone()).collect())
                .map_err(|e| e.at(&format!("/spaces/{name}")))?;
            let space =
                PartitionedSpace::named(name, &labels, s.sectors.iter().map(|x| x.dim).collect())
                    .map_err(|e| e.at(&format!("/spaces/{name}")))?;
            spaces.insert(name, space);
        }
        let mut wires = Vec::new();
        let mut wire_space: BTreeMap<&str, &PartitionedSpace> = BTreeMap::new();
        for (i, w) in self.wires.iter().enumerate() {
            let s = spaces.get(w.space.as_str()).ok_or_else(|| {
                Error::InvalidCircuit(format!("unknown space `{}`", w.space))
                    .at(&format!("/wires/{i}/space"))
            })?;
            wires.push((w.id.clone(), s.clone()));
            wire_space.insert(&w.id, s);
        }
        let mut boxes = Vec::new();
        for (i, b) in self.boxes.iter().enumerate() {
            let lookup = |ids: &[String], field: &str| -> Result<Vec<&PartitionedSpace>> {
                ids.iter()
                    .enumerate()
                    .map(|(j, id)| {
                        wire_space.get(id.as_str()).copied().ok_or_else(|| {
                            Error::InvalidCircuit(format!("unknown wire `{id}`"))
                                .at(&format!("/boxes/{i}/{field}/{j}"))
                        })
                    })
                    .collect()
            };
            let dom = lookup(&b.inputs, "inputs")?;
            let cod = lookup(&b.outputs, "outputs")?;
            let map = b
                .map
                .to_box_map(self.mode, &dom, &cod, tol)
                .map_err(|e| e.at(&format!("/boxes/{i}/map")))?;
            boxes.push(CircuitBox {
                id: b.id.clone(),
                inputs: b.inputs.clone(),
                outputs: b.outputs.clone(),
                map,
            });
        }
        RoutedCircuit::from_parts(
            self.mode,
            wires,
            boxes,
            self.inputs.clone(),
            self.outputs.clone(),
        )
    }

    /// Wires whose space has no name get a space named after the wire; a name
    /// shared by different spaces is suffixed with `@wire`.
    pub fn from_circuit(c: &RoutedCircuit) -> Self {
        let mut spaces = BTreeMap::new();
        let mut seen: BTreeMap<String, &PartitionedSpace> = BTreeMap::new();
        let mut wires = Vec::new();
        for (id, s) in c.wires() {
            let mut name = s.name().map(str::to_string).unwrap_or_else(|| id.clone());
            if seen.get(&name).is_some_and(|t| *t != s) {
                name = format!("{name}@{id}");
            }
            seen.insert(name.clone(), s);
            spaces.entry(name.clone()).or_insert_with(|| SpaceRepr {
                sectors: (0..s.num_sectors())
                    .map(|i| SectorRepr {
                        label: s.labels().label(i).clone(),
                        dim: s.sector_dims()[i],
                    })
                    .collect(),
            });
            wires.push(WireRepr {
                id: id.clone(),
                space: name,
            });
        }
        CircuitRepr {
            mode: c.mode(),
            spaces,
            wires,
            boxes: c
                .boxes()
                .iter()
                .map(|b| BoxRepr {
                    id: b.id.clone(),
                    inputs: b.inputs.clone(),
                    outputs: b.outputs.clone(),
                    map: MapRepr::from_box_map(&b.map),
                })
                .collect(),
            inputs: c.input_wires().iter().map(|s| s.to_string()).collect(),
            outputs: c.output_wires().iter().map(|s| s.to_string()).collect(),
        }
    }
}
