//! Index families, corelations and the bar operation into relations.
//!
//! A corelation `κ : X_A → X_B` is an equivalence relation on the disjoint
//! union `X_A ⊔ X_B`, stored as a class id per element (domain elements
//! first). Class ids are canonical: numbered in order of first appearance,
//! so two partitions are equal exactly when their class vectors are.
//! Index values run over `0..length`.

use std::fmt;

use serde::Serialize;

use crate::circuit::Process;
use crate::error::{Error, Result};
use crate::label::IndexSet;
use crate::relations::{product_all, Relation};

/// Union-find over `0..n` with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // the smaller root wins, so representatives are minimal elements
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub fn partition(&mut self) -> Partition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Partition::from_keys(&roots)
    }
}

/// An equivalence relation on `0..n` as canonical class ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Classes from arbitrary keys: equal keys, same class.
    pub fn from_keys<K: PartialEq>(keys: &[K]) -> Self {
        let mut firsts: Vec<&K> = Vec::new();
        let ids = keys
            .iter()
            .map(|k| match firsts.iter().position(|f| *f == k) {
                Some(i) => i,
                None => {
                    firsts.push(k);
                    firsts.len() - 1
                }
            })
            .collect();
        Partition(ids)
    }

    pub fn discrete(n: usize) -> Self {
        Partition((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn classes(&self) -> &[usize] {
        &self.0
    }

    pub fn num_classes(&self) -> usize {
        self.0.iter().max().map_or(0, |m| m + 1)
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.0[a] == self.0[b]
    }

    /// Members of each class, in element order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (x, &c) in self.0.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// The partition induced on the listed elements, in that order.
    pub fn restrict(&self, elems: &[usize]) -> Partition {
        Partition::from_keys(&elems.iter().map(|&x| self.0[x]).collect::<Vec<_>>())
    }

    /// Feeds this partition's relations into `uf`, renaming element `x` to `map(x)`.
    pub fn union_into(&self, uf: &mut UnionFind, map: impl Fn(usize) -> usize) {
        let mut first: Vec<Option<usize>> = vec![None; self.num_classes()];
        for (x, &c) in self.0.iter().enumerate() {
            match first[c] {
                Some(f) => uf.union(map(f), map(x)),
                None => first[c] = Some(x),
            }
        }
    }
}

/// Named indices with lengths, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IndexFamily {
    names: Vec<String>,
    lengths: Vec<usize>,
}

impl IndexFamily {
    pub fn new(entries: Vec<(String, usize)>) -> Result<Self> {
        let mut names = Vec::with_capacity(entries.len());
        let mut lengths = Vec::with_capacity(entries.len());
        for (n, l) in entries {
            if l == 0 {
                return Err(Error::LengthMismatch(format!("index `{n}` has length 0")));
            }
            names.push(n);
            lengths.push(l);
        }
        Ok(IndexFamily { names, lengths })
    }

    /// Convenience constructor from string slices.
    pub fn of(entries: &[(&str, usize)]) -> Result<Self> {
        Self::new(entries.iter().map(|(n, l)| (n.to_string(), *l)).collect())
    }

    pub fn empty() -> Self {
        IndexFamily {
            names: Vec::new(),
            lengths: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn concat(&self, other: &IndexFamily) -> IndexFamily {
        let mut out = self.clone();
        out.names.extend(other.names.iter().cloned());
        out.lengths.extend(&other.lengths);
        out
    }

    /// The multiple indexing: value tuples in family order, `{()}` when empty.
    pub fn values(&self) -> IndexSet {
        product_all(
            &self
                .lengths
                .iter()
                .map(|&l| IndexSet::range(l))
                .collect::<Vec<_>>(),
        )
    }

    pub fn num_values(&self) -> usize {
        self.lengths.iter().product()
    }
}

impl fmt::Display for IndexFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, l)) in self.names.iter().zip(&self.lengths).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{l}")?;
        }
        f.write_str("}")
    }
}

/// Decodes a row-major value index into per-name values.
pub(crate) fn unrank(mut t: usize, sizes: &[usize]) -> Vec<usize> {
    let mut v = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        v[i] = t % sizes[i];
        t /= sizes[i];
    }
    v
}

/// An index-matching: a corelation whose related names have equal lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Corelation {
    domain: IndexFamily,
    codomain: IndexFamily,
    partition: Partition,
}

/// Which side of a corelation an element sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Domain,
    Codomain,
}

impl Corelation {
    /// `partition` covers the domain elements followed by the codomain ones.
    pub fn new(domain: IndexFamily, codomain: IndexFamily, partition: Partition) -> Result<Self> {
        let n = domain.len() + codomain.len();
        if partition.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "partition covers {} elements but the families have {n}",
                partition.len()
            )));
        }
        let c = Corelation {
            domain,
            codomain,
            partition,
        };
        for members in c.partition.members() {
            let l0 = c.length(members[0]);
            if let Some(&bad) = members.iter().find(|&&x| c.length(x) != l0) {
                return Err(Error::LengthMismatch(format!(
                    "`{}` (length {l0}) is matched with `{}` (length {})",
                    c.name(members[0]),
                    c.name(bad),
                    c.length(bad)
                )));
            }
        }
        Ok(c)
    }

    /// Builds from class keys given per element (domain then codomain).
    pub fn from_keys<K: PartialEq>(
        domain: IndexFamily,
        codomain: IndexFamily,
        keys: &[K],
    ) -> Result<Self> {
        Self::new(domain, codomain, Partition::from_keys(keys))
    }

    pub fn identity(family: &IndexFamily) -> Self {
        let n = family.len();
        let keys: Vec<usize> = (0..n).chain(0..n).collect();
        Corelation {
            domain: family.clone(),
            codomain: family.clone(),
            partition: Partition::from_keys(&keys),
        }
    }

    pub fn discrete(domain: &IndexFamily, codomain: &IndexFamily) -> Self {
        Corelation {
            domain: domain.clone(),
            codomain: codomain.clone(),
            partition: Partition::discrete(domain.len() + codomain.len()),
        }
    }

    /// Every index-matching between the two families: the partitions of
    /// `domain ⊔ codomain` whose classes have a single length, in
    /// restricted-growth order.
    pub fn all(domain: &IndexFamily, codomain: &IndexFamily) -> Vec<Corelation> {
        let lens: Vec<usize> = domain
            .lengths
            .iter()
            .chain(&codomain.lengths)
            .copied()
            .collect();
        let mut out = Vec::new();
        let mut ids = Vec::with_capacity(lens.len());
        let mut class_len = Vec::new();
        grow(&lens, &mut ids, &mut class_len, &mut |ids| {
            out.push(Corelation {
                domain: domain.clone(),
                codomain: codomain.clone(),
                partition: Partition(ids.to_vec()),
            })
        });
        out
    }

    pub fn domain(&self) -> &IndexFamily {
        &self.domain
    }

    pub fn codomain(&self) -> &IndexFamily {
        &self.codomain
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    fn split(&self, x: usize) -> (Side, usize) {
        if x < self.domain.len() {
            (Side::Domain, x)
        } else {
            (Side::Codomain, x - self.domain.len())
        }
    }

    fn name(&self, x: usize) -> &str {
        match self.split(x) {
            (Side::Domain, i) => &self.domain.names[i],
            (Side::Codomain, i) => &self.codomain.names[i],
        }
    }

    fn length(&self, x: usize) -> usize {
        match self.split(x) {
            (Side::Domain, i) => self.domain.lengths[i],
            (Side::Codomain, i) => self.codomain.lengths[i],
        }
    }

    /// Whether domain-or-codomain elements `(sa, a)` and `(sb, b)` are matched.
    pub fn matches(&self, sa: Side, a: usize, sb: Side, b: usize) -> bool {
        let pos = |s: Side, i: usize| {
            if s == Side::Domain {
                i
            } else {
                self.domain.len() + i
            }
        };
        self.partition.related(pos(sa, a), pos(sb, b))
    }

    /// Kronecker-delta semantics: value tuples are related unless two matched
    /// names carry different values.
    pub fn bar(&self) -> Relation {
        let dom = self.domain.values();
        let cod = self.codomain.values();
        let members = self.partition.members();
        let nd = self.domain.len();
        Relation::from_fn(&dom, &cod, |k, l| {
            let kv = unrank(k, &self.domain.lengths);
            let lv = unrank(l, &self.codomain.lengths);
            let val = |x: usize| if x < nd { kv[x] } else { lv[x - nd] };
            members
                .iter()
                .all(|m| m.iter().all(|&x| val(x) == val(m[0])))
        })
    }

    /// `self ∘ first`: names related through a zigzag across the shared family.
    pub fn compose(&self, first: &Corelation) -> Result<Corelation> {
        if first.codomain != self.domain {
            return Err(Error::DomainMismatch(format!(
                "cannot compose: first ends in {} but second starts at {}",
                first.codomain, self.domain
            )));
        }
        let full = joint(first, self);
        let (na, nb, nc) = (first.domain.len(), self.domain.len(), self.codomain.len());
        let keep: Vec<usize> = (0..na).chain(na + nb..na + nb + nc).collect();
        Ok(Corelation {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            partition: full.restrict(&keep),
        })
    }

    pub fn product(&self, other: &Corelation) -> Corelation {
        let (a1, b1, a2, b2) = (
            self.domain.len(),
            self.codomain.len(),
            other.domain.len(),
            other.codomain.len(),
        );
        let offset = self.partition.num_classes();
        // element order: self.dom, other.dom, self.cod, other.cod
        let mut keys = Vec::with_capacity(a1 + a2 + b1 + b2);
        keys.extend((0..a1).map(|x| self.partition.class_of(x)));
        keys.extend((0..a2).map(|x| offset + other.partition.class_of(x)));
        keys.extend((0..b1).map(|x| self.partition.class_of(a1 + x)));
        keys.extend((0..b2).map(|x| offset + other.partition.class_of(a2 + x)));
        Corelation {
            domain: self.domain.concat(&other.domain),
            codomain: self.codomain.concat(&other.codomain),
            partition: Partition::from_keys(&keys),
        }
    }

    pub fn transpose(&self) -> Corelation {
        let (a, b) = (self.domain.len(), self.codomain.len());
        let keys: Vec<usize> = (a..a + b)
            .chain(0..a)
            .map(|x| self.partition.class_of(x))
            .collect();
        Corelation {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            partition: Partition::from_keys(&keys),
        }
    }

    /// Classes made only of codomain elements.
    pub fn created(&self) -> Vec<Vec<usize>> {
        let nd = self.domain.len();
        self.partition
            .members()
            .into_iter()
            .filter(|m| m.iter().all(|&x| x >= nd))
            .map(|m| m.into_iter().map(|x| x - nd).collect())
            .collect()
    }

    /// Classes made only of domain elements.
    pub fn deleted(&self) -> Vec<Vec<usize>> {
        let nd = self.domain.len();
        self.partition
            .members()
            .into_iter()
            .filter(|m| m.iter().all(|&x| x < nd))
            .collect()
    }
}

fn grow(
    lens: &[usize],
    ids: &mut Vec<usize>,
    class_len: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    let x = ids.len();
    if x == lens.len() {
        emit(ids);
        return;
    }
    for c in 0..=class_len.len() {
        let new = c == class_len.len();
        if !new && class_len[c] != lens[x] {
            continue;
        }
        if new {
            class_len.push(lens[x]);
        }
        ids.push(c);
        grow(lens, ids, class_len, emit);
        ids.pop();
        if new {
            class_len.pop();
        }
    }
}

/// Equivalence on `A ⊔ B ⊔ C` generated by `first` on `A ⊔ B` and `second`
/// on `B ⊔ C`.
fn joint(first: &Corelation, second: &Corelation) -> Partition {
    let (na, nb, nc) = (
        first.domain.len(),
        first.codomain.len(),
        second.codomain.len(),
    );
    let mut uf = UnionFind::new(na + nb + nc);
    first.partition.union_into(&mut uf, |x| x);
    second.partition.union_into(&mut uf, |x| na + x);
    uf.partition()
}

/// Composition that keeps the shared family: an equivalence on
/// `A ⊔ B ⊔ C` restricting to `first` on `A ⊔ B`, to `second` on `B ⊔ C`
/// and to `second ∘ first` on `A ⊔ C`. The two must agree on `B`.
pub fn nonforgetting_compose(first: &Corelation, second: &Corelation) -> Result<Partition> {
    if first.codomain != second.domain {
        return Err(Error::DomainMismatch(format!(
            "shared families differ: {} vs {}",
            first.codomain, second.domain
        )));
    }
    let (na, nb) = (first.domain.len(), first.codomain.len());
    let b1 = first.partition.restrict(&(na..na + nb).collect::<Vec<_>>());
    let b2 = second.partition.restrict(&(0..nb).collect::<Vec<_>>());
    if b1 != b2 {
        let names = &first.codomain.names;
        let (x, y) = (0..nb)
            .flat_map(|x| (0..nb).map(move |y| (x, y)))
            .find(|&(x, y)| b1.related(x, y) != b2.related(x, y))
            .expect("partitions differ somewhere");
        let (yes, no) = if b1.related(x, y) {
            ("first", "second")
        } else {
            ("second", "first")
        };
        return Err(Error::IncompatibleRestrictions(format!(
            "`{}` and `{}` are matched by the {yes} relation but not by the {no}",
            names[x], names[y]
        )));
    }
    Ok(joint(first, second))
}

/// Why a composition of index-matchings is improper.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImproperWitness {
    /// `created` (by the first map) or `deleted` (by the second).
    pub kind: &'static str,
    /// Representatives of the offending index among the shared names.
    pub class: Vec<String>,
    pub length: usize,
    /// A representative and the outside name the other map matches it with.
    pub pair: (String, String),
}

impl fmt::Display for ImproperWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (by, other) = if self.kind == "created" {
            ("first", "second")
        } else {
            ("second", "first")
        };
        write!(
            f,
            "index {{{}}} of length {} is {} by the {by} map, but the {other} map matches `{}` with `{}` outside it",
            self.class.join(", "),
            self.length,
            self.kind,
            self.pair.0,
            self.pair.1
        )
    }
}

/// Route-only check of `iota ∘ kappa` for practical isometries, or for
/// practical unitaries when `unitary` is set. Returns the first witness found.
pub fn explain_improper(
    kappa: &Corelation,
    iota: &Corelation,
    unitary: bool,
) -> Result<Option<ImproperWitness>> {
    if kappa.codomain != iota.domain {
        return Err(Error::DomainMismatch(format!(
            "cannot compose: first ends in {} but second starts at {}",
            kappa.codomain, iota.domain
        )));
    }
    let shared = &kappa.codomain;
    let find =
        |classes: Vec<Vec<usize>>, other: &dyn Fn(usize, usize) -> bool, kind: &'static str| {
            for w in classes {
                let len = shared.lengths[w[0]];
                if len < 2 {
                    continue;
                }
                for &x in &w {
                    if let Some(y) = (0..shared.len()).find(|y| !w.contains(y) && other(x, *y)) {
                        return Some(ImproperWitness {
                            kind,
                            class: w.iter().map(|&i| shared.names[i].clone()).collect(),
                            length: len,
                            pair: (shared.names[x].clone(), shared.names[y].clone()),
                        });
                    }
                }
            }
            None
        };
    let iota_matches = |x: usize, y: usize| iota.matches(Side::Domain, x, Side::Domain, y);
    if let Some(w) = find(kappa.created(), &iota_matches, "created") {
        return Ok(Some(w));
    }
    if unitary {
        let kappa_matches =
            |x: usize, y: usize| kappa.matches(Side::Codomain, x, Side::Codomain, y);
        if let Some(w) = find(iota.deleted(), &kappa_matches, "deleted") {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

impl fmt::Display for Corelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .partition
            .members()
            .iter()
            .map(|m| {
                let names: Vec<String> = m
                    .iter()
                    .map(|&x| match self.split(x) {
                        (Side::Domain, i) => format!("{}:in", self.domain.names[i]),
                        (Side::Codomain, i) => format!("{}:out", self.codomain.names[i]),
                    })
                    .collect();
                format!("{{{}}}", names.join(", "))
            })
            .collect();
        write!(
            f,
            "{} -> {} by {}",
            self.domain,
            self.codomain,
            parts.join(" ")
        )
    }
}

impl Process for Corelation {
    type Obj = IndexFamily;

    fn dom(&self) -> IndexFamily {
        self.domain.clone()
    }
    fn cod(&self) -> IndexFamily {
        self.codomain.clone()
    }
    fn then(&self, next: &Self) -> Result<Self> {
        next.compose(self)
    }
    fn tensor(&self, other: &Self) -> Self {
        self.product(other)
    }
    fn identity(obj: &IndexFamily) -> Self {
        Corelation::identity(obj)
    }
    fn permutation(objs: &[IndexFamily], order: &[usize]) -> Self {
        let dom = IndexFamily::tensor_all(objs);
        let cod =
            IndexFamily::tensor_all(&order.iter().map(|&i| objs[i].clone()).collect::<Vec<_>>());
        // position of each source factor's first name in the target
        let sizes: Vec<usize> = objs.iter().map(IndexFamily::len).collect();
        let mut src_start = vec![0; objs.len()];
        for i in 1..objs.len() {
            src_start[i] = src_start[i - 1] + sizes[i - 1];
        }
        let mut keys = vec![0; 2 * dom.len()];
        let mut pos = 0;
        for &src in order {
            for j in 0..sizes[src] {
                keys[src_start[src] + j] = src_start[src] + j;
                keys[dom.len() + pos] = src_start[src] + j;
                pos += 1;
            }
        }
        Corelation {
            domain: dom,
            codomain: cod,
            partition: Partition::from_keys(&keys),
        }
    }
    fn tensor_objs(objs: &[IndexFamily]) -> IndexFamily {
        IndexFamily::tensor_all(objs)
    }
}

impl IndexFamily {
    pub fn tensor_all(objs: &[IndexFamily]) -> IndexFamily {
        objs.iter()
            .fold(IndexFamily::empty(), |acc, f| acc.concat(f))
    }
}
