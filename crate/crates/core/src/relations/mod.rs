//! Boolean relation algebra for routes.
//!
//! A [`Relation`] between two [`IndexSet`]s is stored as a dense boolean
//! matrix with one bitset row per domain label, so composition is a row-wise
//! OR of the second relation's rows. Entry `(k, l)` is set when `k` is related
//! to `l`; the convention is input index first, output index second.

mod cp;
mod serde_impl;

pub use cp::{
    channel_gate, cp_violation, is_completely_positive, is_proper_for_channels, BoolArray4,
    CpRelation,
};
pub use serde_impl::Bit;

use std::fmt;

use crate::error::{Error, Result};
use crate::label::{IndexSet, Label, Subset};

const WORD: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    domain: IndexSet,
    codomain: IndexSet,
    words: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn zero(domain: &IndexSet, codomain: &IndexSet) -> Self {
        let words = codomain.len().div_ceil(WORD);
        Relation {
            domain: domain.clone(),
            codomain: codomain.clone(),
            words,
            rows: vec![0; words * domain.len()],
        }
    }

    pub fn full(domain: &IndexSet, codomain: &IndexSet) -> Self {
        Relation::from_fn(domain, codomain, |_, _| true)
    }

    pub fn identity(set: &IndexSet) -> Self {
        Relation::from_fn(set, set, |k, l| k == l)
    }

    pub fn from_fn(
        domain: &IndexSet,
        codomain: &IndexSet,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let mut r = Relation::zero(domain, codomain);
        for k in 0..domain.len() {
            for l in 0..codomain.len() {
                if f(k, l) {
                    r.set(k, l, true);
                }
            }
        }
        r
    }

    /// Builds a relation from a matrix whose rows are indexed by the domain.
    pub fn from_matrix(
        domain: &IndexSet,
        codomain: &IndexSet,
        matrix: &[Vec<bool>],
    ) -> Result<Self> {
        if matrix.len() != domain.len() || matrix.iter().any(|row| row.len() != codomain.len()) {
            return Err(Error::ShapeMismatch(format!(
                "relation matrix must be {}x{}",
                domain.len(),
                codomain.len()
            )));
        }
        Ok(Relation::from_fn(domain, codomain, |k, l| matrix[k][l]))
    }

    /// Builds a relation from `(input, output)` label pairs.
    pub fn from_pairs<'a>(
        domain: &IndexSet,
        codomain: &IndexSet,
        pairs: impl IntoIterator<Item = (&'a Label, &'a Label)>,
    ) -> Result<Self> {
        let mut r = Relation::zero(domain, codomain);
        for (k, l) in pairs {
            r.set(domain.index_of(k)?, codomain.index_of(l)?, true);
        }
        Ok(r)
    }

    pub fn domain(&self) -> &IndexSet {
        &self.domain
    }

    pub fn codomain(&self) -> &IndexSet {
        &self.codomain
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> bool {
        self.rows[k * self.words + l / WORD] >> (l % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, k: usize, l: usize, value: bool) {
        let w = &mut self.rows[k * self.words + l / WORD];
        if value {
            *w |= 1 << (l % WORD);
        } else {
            *w &= !(1 << (l % WORD));
        }
    }

    pub fn relates(&self, k: &Label, l: &Label) -> Result<bool> {
        Ok(self.get(self.domain.index_of(k)?, self.codomain.index_of(l)?))
    }

    fn row(&self, k: usize) -> &[u64] {
        &self.rows[k * self.words..(k + 1) * self.words]
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.domain.len())
            .map(|k| (0..self.codomain.len()).map(|l| self.get(k, l)).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Pairs `(k, l)` of related positions.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.domain.len()).flat_map(move |k| {
            (0..self.codomain.len())
                .filter(move |&l| self.get(k, l))
                .map(move |l| (k, l))
        })
    }

    /// `self ∘ first`: `k` relates to `m` iff some `l` has `first(k, l)` and `self(l, m)`.
    pub fn compose(&self, first: &Relation) -> Result<Relation> {
        if first.codomain != self.domain {
            return Err(Error::DomainMismatch(format!(
                "cannot compose: first maps into {} but second starts from {}",
                first.codomain, self.domain
            )));
        }
        let mut out = Relation::zero(&first.domain, &self.codomain);
        let words = out.words;
        for k in 0..first.domain.len() {
            let dst = k * words;
            for l in 0..first.codomain.len() {
                if first.get(k, l) {
                    let src = self.row(l);
                    for (i, w) in src.iter().enumerate() {
                        out.rows[dst + i] |= w;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Cartesian product, row-major over `(self label, right label)`.
    pub fn product(&self, right: &Relation) -> Relation {
        let domain = self.domain.product(&right.domain);
        let codomain = self.codomain.product(&right.codomain);
        let (n2, m2) = (right.domain.len(), right.codomain.len());
        let mut out = Relation::zero(&domain, &codomain);
        for (k1, l1) in self.pairs() {
            for (k2, l2) in right.pairs() {
                out.set(k1 * n2 + k2, l1 * m2 + l2, true);
            }
        }
        out
    }

    pub fn transpose(&self) -> Relation {
        let mut out = Relation::zero(&self.codomain, &self.domain);
        for (k, l) in self.pairs() {
            out.set(l, k, true);
        }
        out
    }

    /// `S_λ`: domain labels related to at least one codomain label.
    pub fn practical_input_set(&self) -> Subset {
        let mask = (0..self.domain.len())
            .map(|k| self.row(k).iter().any(|&w| w != 0))
            .collect();
        Subset::from_mask(&self.domain, mask)
    }

    /// `T_λ = S_{λᵀ}`.
    pub fn practical_output_set(&self) -> Subset {
        let mut mask = vec![false; self.codomain.len()];
        for (_, l) in self.pairs() {
            mask[l] = true;
        }
        Subset::from_mask(&self.codomain, mask)
    }

    /// `λ[S]`: codomain labels related to some member of `s`.
    pub fn image(&self, s: &Subset) -> Result<Subset> {
        let mut out = Subset::empty(&self.codomain);
        for i in s.indices() {
            let k = if s.universe() == &self.domain {
                i
            } else {
                self.domain.index_of(s.universe().label(i))?
            };
            for l in 0..self.codomain.len() {
                if self.get(k, l) {
                    out.insert(l);
                }
            }
        }
        Ok(out)
    }

    /// Restricts the domain to `s`: rows outside `s` are cleared.
    pub fn restrict_domain(&self, s: &Subset) -> Relation {
        let mut out = self.clone();
        for k in 0..self.domain.len() {
            if !s.contains(k) {
                for w in &mut out.rows[k * self.words..(k + 1) * self.words] {
                    *w = 0;
                }
            }
        }
        out
    }

    /// The bijection from `sets[0] × .. × sets[n-1]` onto the product of
    /// `sets[order[0]], .., sets[order[n-1]]` that rearranges tuples.
    pub fn permutation(sets: &[IndexSet], order: &[usize]) -> Relation {
        let domain = product_all(sets);
        let permuted: Vec<IndexSet> = order.iter().map(|&i| sets[i].clone()).collect();
        let codomain = product_all(&permuted);
        let sizes: Vec<usize> = sets.iter().map(IndexSet::len).collect();
        let map = crate::label::factor_permutation(&sizes, order);
        let mut r = Relation::zero(&domain, &codomain);
        for (k, &l) in map.iter().enumerate() {
            r.set(k, l, true);
        }
        r
    }

    /// The diagonal relation `{(k, k) : k ∈ s}` on `s`'s universe.
    pub fn diagonal_on(s: &Subset) -> Relation {
        Relation::from_fn(s.universe(), s.universe(), |k, l| k == l && s.contains(k))
    }
}

/// Product of a list of index sets; the empty product is `{()}`.
pub fn product_all(sets: &[IndexSet]) -> IndexSet {
    sets.iter().fold(IndexSet::unit(), |acc, s| acc.product(s))
}

/// Which of the properness conditions failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateViolation {
    pub mode: &'static str,
    /// Labels of the gate image that fall outside the required practical set.
    pub escaping: Subset,
    /// The practical set that was escaped, e.g. `S_second` or `T_first`.
    pub target: &'static str,
}

impl GateViolation {
    pub fn into_error(self) -> Error {
        Error::ImproperComposition {
            mode: self.mode,
            escaping: self.escaping.labels(),
            target: self.target.to_string(),
        }
    }
}

impl fmt::Display for GateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} escape {}", self.mode, self.escaping, self.target)
    }
}

fn interface_check(first: &Relation, second: &Relation) -> Result<()> {
    if first.codomain != second.domain {
        return Err(Error::DomainMismatch(format!(
            "first route maps into {} but second starts from {}",
            first.codomain, second.domain
        )));
    }
    Ok(())
}

/// Checks `(λ ∘ λᵀ)[S_σ] ⊆ S_σ` for `first = λ`, `second = σ`.
pub fn isometry_gate(first: &Relation, second: &Relation) -> Result<Option<GateViolation>> {
    interface_check(first, second)?;
    let s_sigma = second.practical_input_set();
    let gate = first.compose(&first.transpose())?;
    let reached = gate.image(&s_sigma)?;
    let escaping = reached.difference(&s_sigma);
    Ok((!escaping.is_empty()).then_some(GateViolation {
        mode: "isometry",
        escaping,
        target: "S_second",
    }))
}

/// Checks the isometry gate and `(σᵀ ∘ σ)[T_λ] ⊆ T_λ`.
pub fn unitary_gate(first: &Relation, second: &Relation) -> Result<Option<GateViolation>> {
    if let Some(mut v) = isometry_gate(first, second)? {
        v.mode = "unitary";
        return Ok(Some(v));
    }
    let t_lambda = first.practical_output_set();
    let gate = second.transpose().compose(second)?;
    let reached = gate.image(&t_lambda)?;
    let escaping = reached.difference(&t_lambda);
    Ok((!escaping.is_empty()).then_some(GateViolation {
        mode: "unitary",
        escaping,
        target: "T_first",
    }))
}

pub fn is_proper_for_isometries(first: &Relation, second: &Relation) -> Result<bool> {
    Ok(isometry_gate(first, second)?.is_none())
}

pub fn is_proper_for_unitaries(first: &Relation, second: &Relation) -> Result<bool> {
    Ok(unitary_gate(first, second)?.is_none())
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.domain.len() {
            if k > 0 {
                writeln!(f)?;
            }
            for l in 0..self.codomain.len() {
                write!(f, "{}", if self.get(k, l) { '1' } else { '0' })?;
            }
        }
        Ok(())
    }
}
