//! JSON forms of relations.
//!
//! A relation is `{"domain": [...], "codomain": [...], "matrix": [[0, 1], ...]}`
//! with rows indexed by the domain. Matrix entries may be `0`/`1` or booleans.
//! A CP relation carries its four-index array as `"array"` in `(k, k', l, l')`
//! order, or one of the shorthands `{"full_coherence": relation}` and
//! `{"full_decoherence": relation}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BoolArray4, CpRelation, Relation};
use crate::label::IndexSet;

/// A boolean matrix entry written as `0`, `1`, `true` or `false`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bit(pub bool);

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.0 as u8)
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            B(bool),
            N(u64),
        }
        match Repr::deserialize(d)? {
            Repr::B(b) => Ok(Bit(b)),
            Repr::N(0) => Ok(Bit(false)),
            Repr::N(1) => Ok(Bit(true)),
            Repr::N(n) => Err(D::Error::custom(format!("expected 0 or 1, got {n}"))),
        }
    }
}

fn bits2(m: Vec<Vec<Bit>>) -> Vec<Vec<bool>> {
    m.into_iter()
        .map(|r| r.into_iter().map(|b| b.0).collect())
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationRepr {
    domain: IndexSet,
    codomain: IndexSet,
    matrix: Vec<Vec<Bit>>,
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RelationRepr {
            domain: self.domain().clone(),
            codomain: self.codomain().clone(),
            matrix: self
                .to_matrix()
                .into_iter()
                .map(|r| r.into_iter().map(Bit).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RelationRepr::deserialize(d)?;
        Relation::from_matrix(&r.domain, &r.codomain, &bits2(r.matrix)).map_err(D::Error::custom)
    }
}

#[derive(Serialize)]
struct CpRepr<'a> {
    domain: &'a IndexSet,
    codomain: &'a IndexSet,
    array: Vec<Vec<Vec<Vec<Bit>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CpReprIn {
    domain: Option<IndexSet>,
    codomain: Option<IndexSet>,
    array: Option<Vec<Vec<Vec<Vec<Bit>>>>>,
    full_coherence: Option<Relation>,
    full_decoherence: Option<Relation>,
}

impl Serialize for CpRelation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let array = self
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
        CpRepr {
            domain: self.domain(),
            codomain: self.codomain(),
            array,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CpRelation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CpReprIn::deserialize(d)?;
        match (
            r.domain,
            r.codomain,
            r.array,
            r.full_coherence,
            r.full_decoherence,
        ) {
            (Some(domain), Some(codomain), Some(array), None, None) => {
                let nested: Vec<Vec<Vec<Vec<bool>>>> = array
                    .into_iter()
                    .map(|x| x.into_iter().map(bits2).collect())
                    .collect();
                let arr = BoolArray4::from_nested(&nested).map_err(D::Error::custom)?;
                CpRelation::new(&domain, &codomain, arr).map_err(D::Error::custom)
            }
            (None, None, None, Some(rel), None) => Ok(CpRelation::full_coherence(&rel)),
            (None, None, None, None, Some(rel)) => Ok(CpRelation::full_decoherence(&rel)),
            _ => Err(D::Error::custom(
                "expected either domain/codomain/array, full_coherence, or full_decoherence",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_round_trip() {
        let z = IndexSet::from_atoms(["a", "b"]).unwrap();
        let r = Relation::from_fn(&IndexSet::trivial(), &z, |_, l| l == 1);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"domain":["*"],"codomain":["a","b"],"matrix":[[0,1]]}"#
        );
        let back: Relation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn relation_accepts_booleans_and_rejects_bad_shapes() {
        let r: Relation =
            serde_json::from_str(r#"{"domain":[0,1],"codomain":[0],"matrix":[[true],[false]]}"#)
                .unwrap();
        assert_eq!(r.count(), 1);
        assert!(serde_json::from_str::<Relation>(
            r#"{"domain":[0,1],"codomain":[0],"matrix":[[1]]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<Relation>(
            r#"{"domain":[0],"codomain":[0],"matrix":[[2]]}"#
        )
        .is_err());
    }

    #[test]
    fn cp_relation_round_trip_and_shorthand() {
        let z = IndexSet::range(2);
        let cp = CpRelation::full_coherence(&Relation::identity(&z));
        let s = serde_json::to_string(&cp).unwrap();
        let back: CpRelation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cp);
        let short: CpRelation = serde_json::from_str(
            r#"{"full_coherence":{"domain":[0,1],"codomain":[0,1],"matrix":[[1,0],[0,1]]}}"#,
        )
        .unwrap();
        assert_eq!(short, cp);
    }

    #[test]
    fn asymmetric_cp_array_is_rejected_with_witness() {
        let text = r#"{"domain":[0,1],"codomain":["*"],"array":[[[[1]],[[1]]],[[[0]],[[1]]]]}"#;
        let err = serde_json::from_str::<CpRelation>(text)
            .unwrap_err()
            .to_string();
        assert!(err.contains("(k,k',l,l') = (0,1,0,0)"), "{err}");
    }
}
