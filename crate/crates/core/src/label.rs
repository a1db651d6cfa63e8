//! Sector labels and ordered index sets.
//!
//! A [`Label`] is a flat tuple of atoms. Atomic labels such as `0` or `"a"`
//! are 1-tuples, the label of a tensor product is the concatenation of the
//! factor labels, and the empty tuple `()` labels the single sector of an
//! index-free wire. Every [`IndexSet`] has a uniform arity, so splitting a
//! product label back into its factors is always unambiguous.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Atom {
    Int(i64),
    Str(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(i) => write!(f, "{i}"),
            Atom::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for Atom {
    fn from(v: i64) -> Self {
        Atom::Int(v)
    }
}

impl From<&str> for Atom {
    fn from(v: &str) -> Self {
        Atom::Str(v.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(Vec<Atom>);

impl Label {
    pub fn atom(a: impl Into<Atom>) -> Self {
        Label(vec![a.into()])
    }

    pub fn int(v: i64) -> Self {
        Label(vec![Atom::Int(v)])
    }

    pub fn tuple(atoms: Vec<Atom>) -> Self {
        Label(atoms)
    }

    pub fn ints(values: &[i64]) -> Self {
        Label(values.iter().map(|&v| Atom::Int(v)).collect())
    }

    /// The `*` label of a trivially partitioned space.
    pub fn star() -> Self {
        Label::atom("*")
    }

    /// The empty tuple, unit for [`Label::concat`].
    pub fn unit() -> Self {
        Label(Vec::new())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Label) -> Label {
        let mut atoms = Vec::with_capacity(self.0.len() + other.0.len());
        atoms.extend_from_slice(&self.0);
        atoms.extend_from_slice(&other.0);
        Label(atoms)
    }

    pub fn slice(&self, start: usize, len: usize) -> Label {
        Label(self.0[start..start + len].to_vec())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.len() == 1 {
            self.0[0].serialize(serializer)
        } else {
            self.0.serialize(serializer)
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Atom(Atom),
            Tuple(Vec<Atom>),
        }
        Ok(match Repr::deserialize(deserializer)? {
            Repr::Atom(a) => Label(vec![a]),
            Repr::Tuple(atoms) => Label(atoms),
        })
    }
}

#[derive(Debug)]
struct IndexSetInner {
    labels: Vec<Label>,
    arity: usize,
}

/// An ordered finite set of distinct labels of uniform arity.
#[derive(Clone, Debug)]
pub struct IndexSet(Arc<IndexSetInner>);

impl IndexSet {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let Some(first) = labels.first() else {
            return Err(Error::InvariantViolation(
                "index set must not be empty".into(),
            ));
        };
        let arity = first.arity();
        if let Some(bad) = labels.iter().find(|l| l.arity() != arity) {
            return Err(Error::InvariantViolation(format!(
                "label {bad} has arity {} but the set has arity {arity}",
                bad.arity()
            )));
        }
        let mut sorted: Vec<&Label> = labels.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvariantViolation(format!(
                "duplicate label {}",
                w[0]
            )));
        }
        Ok(IndexSet(Arc::new(IndexSetInner { labels, arity })))
    }

    /// `{0, 1, .., n-1}` as integer labels.
    pub fn range(n: usize) -> Self {
        assert!(n >= 1, "index set must not be empty");
        IndexSet::new((0..n as i64).map(Label::int).collect()).unwrap()
    }

    pub fn from_atoms<A: Into<Atom>>(atoms: impl IntoIterator<Item = A>) -> Result<Self> {
        IndexSet::new(atoms.into_iter().map(Label::atom).collect())
    }

    /// The singleton `{*}`.
    pub fn trivial() -> Self {
        IndexSet::new(vec![Label::star()]).unwrap()
    }

    /// The singleton `{()}`, unit for [`IndexSet::product`].
    pub fn unit() -> Self {
        IndexSet::new(vec![Label::unit()]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn labels(&self) -> &[Label] {
        &self.0.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.0.labels[i]
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        self.0.labels.iter().position(|l| l == label)
    }

    pub fn index_of(&self, label: &Label) -> Result<usize> {
        self.position(label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))
    }

    /// Row-major cartesian product: `(k, l)` is at position `i * right.len() + j`.
    pub fn product(&self, right: &IndexSet) -> IndexSet {
        let mut labels = Vec::with_capacity(self.len() * right.len());
        for a in self.labels() {
            for b in right.labels() {
                labels.push(a.concat(b));
            }
        }
        IndexSet(Arc::new(IndexSetInner {
            labels,
            arity: self.arity() + right.arity(),
        }))
    }
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}

impl Eq for IndexSet {}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.labels().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let labels = Vec::<Label>::deserialize(deserializer)?;
        IndexSet::new(labels).map_err(serde::de::Error::custom)
    }
}

/// A subset of an [`IndexSet`], stored as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset {
    universe: IndexSet,
    mask: Vec<bool>,
}

impl Subset {
    pub fn empty(universe: &IndexSet) -> Self {
        Subset {
            universe: universe.clone(),
            mask: vec![false; universe.len()],
        }
    }

    pub fn full(universe: &IndexSet) -> Self {
        Subset {
            universe: universe.clone(),
            mask: vec![true; universe.len()],
        }
    }

    pub fn from_mask(universe: &IndexSet, mask: Vec<bool>) -> Self {
        assert_eq!(universe.len(), mask.len());
        Subset {
            universe: universe.clone(),
            mask,
        }
    }

    pub fn from_labels<'a>(
        universe: &IndexSet,
        labels: impl IntoIterator<Item = &'a Label>,
    ) -> Result<Self> {
        let mut s = Subset::empty(universe);
        for l in labels {
            s.mask[universe.index_of(l)?] = true;
        }
        Ok(s)
    }

    pub fn universe(&self) -> &IndexSet {
        &self.universe
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.mask[i] = true;
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.indices()
            .map(|i| self.universe.label(i).clone())
            .collect()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Members of `self` not in `other`.
    pub fn difference(&self, other: &Subset) -> Subset {
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a && !b)
            .collect();
        Subset::from_mask(&self.universe, mask)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a && b)
            .collect();
        Subset::from_mask(&self.universe, mask)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.universe.label(i))?;
        }
        write!(f, "}}")
    }
}

/// For a tuple of factors with the given sizes, maps each row-major source
/// index to the row-major index of the rearranged tuple whose `j`-th factor is
/// source factor `order[j]`.
pub fn factor_permutation(sizes: &[usize], order: &[usize]) -> Vec<usize> {
    assert_eq!(sizes.len(), order.len());
    let n = sizes.len();
    let mut src_stride = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        src_stride[i] = src_stride[i + 1] * sizes[i + 1];
    }
    let mut dst_stride = vec![1usize; n];
    for j in (0..n.saturating_sub(1)).rev() {
        dst_stride[j] = dst_stride[j + 1] * sizes[order[j + 1]];
    }
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|idx| {
            order
                .iter()
                .zip(&dst_stride)
                .map(|(&src, &stride)| (idx / src_stride[src]) % sizes[src] * stride)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_concatenates_row_major() {
        let a = IndexSet::range(2);
        let b = IndexSet::from_atoms(["x", "y", "z"]).unwrap();
        let p = a.product(&b);
        assert_eq!(p.len(), 6);
        assert_eq!(p.label(4), &Label::tuple(vec![Atom::Int(1), "y".into()]));
        assert_eq!(p.label(4).to_string(), "(1,y)");
    }

    #[test]
    fn product_is_associative_on_labels() {
        let a = IndexSet::range(2);
        let b = IndexSet::range(3);
        let c = IndexSet::from_atoms(["p", "q"]).unwrap();
        assert_eq!(a.product(&b).product(&c), a.product(&b.product(&c)));
    }

    #[test]
    fn unit_is_neutral() {
        let a = IndexSet::range(3);
        assert_eq!(a.product(&IndexSet::unit()), a);
        assert_eq!(IndexSet::unit().product(&a), a);
    }

    #[test]
    fn rejects_duplicates_and_mixed_arity() {
        assert!(IndexSet::new(vec![Label::int(0), Label::int(0)]).is_err());
        assert!(IndexSet::new(vec![Label::int(0), Label::ints(&[0, 1])]).is_err());
        assert!(IndexSet::new(vec![]).is_err());
    }

    #[test]
    fn factor_permutation_swaps() {
        // (a, b) with sizes (2, 3) -> (b, a)
        let p = factor_permutation(&[2, 3], &[1, 0]);
        assert_eq!(p, vec![0, 2, 4, 1, 3, 5]);
        assert_eq!(
            factor_permutation(&[2, 3, 2], &[0, 1, 2]),
            (0..12).collect::<Vec<_>>()
        );
        assert_eq!(factor_permutation(&[], &[]), vec![0]);
    }

    #[test]
    fn labels_serialize_as_atoms_or_arrays() {
        let l = Label::ints(&[1, 0]);
        assert_eq!(serde_json::to_string(&l).unwrap(), "[1,0]");
        assert_eq!(serde_json::to_string(&Label::atom("a")).unwrap(), "\"a\"");
        let back: Label = serde_json::from_str("7").unwrap();
        assert_eq!(back, Label::int(7));
    }
}
