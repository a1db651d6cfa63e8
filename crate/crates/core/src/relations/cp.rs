//! Completely positive relations: four-index boolean routes for CP maps.

use std::fmt;

use super::{GateViolation, Relation};
use crate::error::{Error, Result};
use crate::label::IndexSet;

/// A dense four-index boolean array addressed as `(k, k', l, l')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolArray4 {
    shape: [usize; 4],
    data: Vec<bool>,
}

impl BoolArray4 {
    pub fn zeros(shape: [usize; 4]) -> Self {
        BoolArray4 {
            shape,
            data: vec![false; shape.iter().product()],
        }
    }

    pub fn from_flat(shape: [usize; 4], data: Vec<bool>) -> Result<Self> {
        if data.len() != shape.iter().product::<usize>() {
            return Err(Error::ShapeMismatch(format!(
                "array of {} entries cannot have shape {shape:?}",
                data.len()
            )));
        }
        Ok(BoolArray4 { shape, data })
    }

    pub fn from_nested(nested: &[Vec<Vec<Vec<bool>>>]) -> Result<Self> {
        let a = nested.len();
        let b = nested.first().map_or(0, |x| x.len());
        let c = nested
            .first()
            .and_then(|x| x.first())
            .map_or(0, |x| x.len());
        let d = nested
            .first()
            .and_then(|x| x.first())
            .and_then(|x| x.first())
            .map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(a * b * c * d);
        for x in nested {
            if x.len() != b {
                return Err(Error::ShapeMismatch("ragged array at depth 1".into()));
            }
            for y in x {
                if y.len() != c {
                    return Err(Error::ShapeMismatch("ragged array at depth 2".into()));
                }
                for z in y {
                    if z.len() != d {
                        return Err(Error::ShapeMismatch("ragged array at depth 3".into()));
                    }
                    data.extend_from_slice(z);
                }
            }
        }
        Ok(BoolArray4 {
            shape: [a, b, c, d],
            data,
        })
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<bool>>>> {
        let [a, b, c, d] = self.shape;
        (0..a)
            .map(|i| {
                (0..b)
                    .map(|j| {
                        (0..c)
                            .map(|k| (0..d).map(|l| self.get(i, j, k, l)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn shape(&self) -> [usize; 4] {
        self.shape
    }

    #[inline]
    fn offset(&self, k: usize, k2: usize, l: usize, l2: usize) -> usize {
        let [_, b, c, d] = self.shape;
        ((k * b + k2) * c + l) * d + l2
    }

    #[inline]
    pub fn get(&self, k: usize, k2: usize, l: usize, l2: usize) -> bool {
        self.data[self.offset(k, k2, l, l2)]
    }

    #[inline]
    pub fn set(&mut self, k: usize, k2: usize, l: usize, l2: usize, v: bool) {
        let o = self.offset(k, k2, l, l2);
        self.data[o] = v;
    }

    pub fn as_flat(&self) -> &[bool] {
        &self.data
    }
}

/// Reports the first symmetry or diagonal-dominance violation, if any.
pub fn cp_violation(array: &BoolArray4) -> Result<Option<String>> {
    let [a, a2, b, b2] = array.shape();
    if a != a2 || b != b2 || a == 0 || b == 0 {
        return Err(Error::ShapeMismatch(format!(
            "completely positive relation needs shape (|Z_A|, |Z_A|, |Z_B|, |Z_B|), got {:?}",
            array.shape()
        )));
    }
    for k in 0..a {
        for k2 in 0..a {
            for l in 0..b {
                for l2 in 0..b {
                    let v = array.get(k, k2, l, l2);
                    if v != array.get(k2, k, l2, l) {
                        return Ok(Some(format!(
                            "not symmetric at (k,k',l,l') = ({k},{k2},{l},{l2})"
                        )));
                    }
                    if v && !(array.get(k, k, l, l) && array.get(k2, k2, l2, l2)) {
                        return Ok(Some(format!(
                            "not diagonally dominant at (k,k',l,l') = ({k},{k2},{l},{l2})"
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// True iff the array is symmetric and diagonally dominant.
pub fn is_completely_positive(array: &BoolArray4) -> Result<bool> {
    Ok(cp_violation(array)?.is_none())
}

/// A completely positive relation `Λ : Z_A × Z_A → Z_B × Z_B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpRelation {
    domain: IndexSet,
    codomain: IndexSet,
    array: BoolArray4,
}

impl CpRelation {
    pub fn new(domain: &IndexSet, codomain: &IndexSet, array: BoolArray4) -> Result<Self> {
        let expected = [domain.len(), domain.len(), codomain.len(), codomain.len()];
        if array.shape() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected shape {expected:?}, got {:?}",
                array.shape()
            )));
        }
        if let Some(why) = cp_violation(&array)? {
            return Err(Error::InvariantViolation(why));
        }
        Ok(CpRelation {
            domain: domain.clone(),
            codomain: codomain.clone(),
            array,
        })
    }

    fn from_array_unchecked(domain: &IndexSet, codomain: &IndexSet, array: BoolArray4) -> Self {
        debug_assert!(matches!(cp_violation(&array), Ok(None)));
        CpRelation {
            domain: domain.clone(),
            codomain: codomain.clone(),
            array,
        }
    }

    /// `Λ^{ll'}_{kk'} = λ^l_k λ^{l'}_{k'}`.
    pub fn full_coherence(route: &Relation) -> Self {
        let (a, b) = (route.domain().len(), route.codomain().len());
        let mut array = BoolArray4::zeros([a, a, b, b]);
        for (k, l) in route.pairs() {
            for (k2, l2) in route.pairs() {
                array.set(k, k2, l, l2, true);
            }
        }
        CpRelation::from_array_unchecked(route.domain(), route.codomain(), array)
    }

    /// `Λ^{ll'}_{kk'} = δ_{kk'} δ^{ll'} λ^l_k`.
    pub fn full_decoherence(route: &Relation) -> Self {
        let (a, b) = (route.domain().len(), route.codomain().len());
        let mut array = BoolArray4::zeros([a, a, b, b]);
        for (k, l) in route.pairs() {
            array.set(k, k, l, l, true);
        }
        CpRelation::from_array_unchecked(route.domain(), route.codomain(), array)
    }

    pub fn identity(set: &IndexSet) -> Self {
        CpRelation::full_coherence(&Relation::identity(set))
    }

    pub fn domain(&self) -> &IndexSet {
        &self.domain
    }

    pub fn codomain(&self) -> &IndexSet {
        &self.codomain
    }

    pub fn array(&self) -> &BoolArray4 {
        &self.array
    }

    #[inline]
    pub fn get(&self, k: usize, k2: usize, l: usize, l2: usize) -> bool {
        self.array.get(k, k2, l, l2)
    }

    /// `Λ̇^l_k = Λ^{ll}_{kk}`.
    pub fn diagonal(&self) -> Relation {
        Relation::from_fn(&self.domain, &self.codomain, |k, l| self.get(k, k, l, l))
    }

    pub fn has_full_decoherence(&self) -> bool {
        *self == CpRelation::full_decoherence(&self.diagonal())
    }

    /// The first set off-diagonal entry `(k, k', l, l')` with `k ≠ k'` or `l ≠ l'`.
    pub fn off_diagonal_entry(&self) -> Option<[usize; 4]> {
        let (a, b) = (self.domain.len(), self.codomain.len());
        for k in 0..a {
            for k2 in 0..a {
                for l in 0..b {
                    for l2 in 0..b {
                        if (k != k2 || l != l2) && self.get(k, k2, l, l2) {
                            return Some([k, k2, l, l2]);
                        }
                    }
                }
            }
        }
        None
    }

    /// `self ∘ first` as a relation `Z_A × Z_A → Z_C × Z_C`.
    pub fn compose(&self, first: &CpRelation) -> Result<CpRelation> {
        if first.codomain != self.domain {
            return Err(Error::DomainMismatch(format!(
                "cannot compose CP relations: first maps into {} but second starts from {}",
                first.codomain, self.domain
            )));
        }
        let (a, b, c) = (first.domain.len(), self.domain.len(), self.codomain.len());
        let mut array = BoolArray4::zeros([a, a, c, c]);
        for k in 0..a {
            for k2 in 0..a {
                for l in 0..b {
                    for l2 in 0..b {
                        if !first.get(k, k2, l, l2) {
                            continue;
                        }
                        for m in 0..c {
                            for m2 in 0..c {
                                if self.get(l, l2, m, m2) {
                                    array.set(k, k2, m, m2, true);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(CpRelation::from_array_unchecked(
            &first.domain,
            &self.codomain,
            array,
        ))
    }

    /// Parallel composition over the product index sets, row-major.
    pub fn product(&self, right: &CpRelation) -> CpRelation {
        let domain = self.domain.product(&right.domain);
        let codomain = self.codomain.product(&right.codomain);
        let (a1, b1) = (self.domain.len(), self.codomain.len());
        let (a2, b2) = (right.domain.len(), right.codomain.len());
        let mut array = BoolArray4::zeros([a1 * a2, a1 * a2, b1 * b2, b1 * b2]);
        for k in 0..a1 {
            for k2 in 0..a1 {
                for l in 0..b1 {
                    for l2 in 0..b1 {
                        if !self.get(k, k2, l, l2) {
                            continue;
                        }
                        for m in 0..a2 {
                            for m2 in 0..a2 {
                                for n in 0..b2 {
                                    for n2 in 0..b2 {
                                        if right.get(m, m2, n, n2) {
                                            array.set(
                                                k * a2 + m,
                                                k2 * a2 + m2,
                                                l * b2 + n,
                                                l2 * b2 + n2,
                                                true,
                                            );
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        CpRelation::from_array_unchecked(&domain, &codomain, array)
    }

    pub fn transpose(&self) -> CpRelation {
        let (a, b) = (self.domain.len(), self.codomain.len());
        let mut array = BoolArray4::zeros([b, b, a, a]);
        for k in 0..a {
            for k2 in 0..a {
                for l in 0..b {
                    for l2 in 0..b {
                        if self.get(k, k2, l, l2) {
                            array.set(l, l2, k, k2, true);
                        }
                    }
                }
            }
        }
        CpRelation::from_array_unchecked(&self.codomain, &self.domain, array)
    }
}

/// Checks `(Λ̇ ∘ Λ̇ᵀ)[S_Σ̇] ⊆ S_Σ̇` for `first = Λ`, `second = Σ`: the
/// isometry condition on the diagonals, which is all that trace
/// preservation depends on.
pub fn channel_gate(first: &CpRelation, second: &CpRelation) -> Result<Option<GateViolation>> {
    if first.codomain != second.domain {
        return Err(Error::DomainMismatch(format!(
            "first route maps into {} but second starts from {}",
            first.codomain, second.domain
        )));
    }
    Ok(
        super::isometry_gate(&first.diagonal(), &second.diagonal())?.map(|mut v| {
            v.mode = "channel";
            v
        }),
    )
}

pub fn is_proper_for_channels(first: &CpRelation, second: &CpRelation) -> Result<bool> {
    Ok(channel_gate(first, second)?.is_none())
}

impl fmt::Display for CpRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.domain.len(), self.codomain.len());
        let mut first = true;
        for k in 0..a {
            for k2 in 0..a {
                for l in 0..b {
                    for l2 in 0..b {
                        if self.get(k, k2, l, l2) {
                            if !first {
                                write!(f, " ")?;
                            }
                            first = false;
                            write!(
                                f,
                                "({},{}->{},{})",
                                self.domain.label(k),
                                self.domain.label(k2),
                                self.codomain.label(l),
                                self.codomain.label(l2)
                            )?;
                        }
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
