//! Partitioned finite-dimensional Hilbert spaces.
//!
//! An elementary space lays its sectors out contiguously in label order. A
//! tensor product keeps the list of its elementary factors and uses the
//! Kronecker coordinate order, so the projector onto sector `(k, l)` is exactly
//! `π^k ⊗ μ^l` and tensoring is strictly associative. The coordinates of a
//! product sector are therefore in general not contiguous.

use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::label::{IndexSet, Label, Subset};
use crate::linalg::{self, Mat};

/// One contiguous sector of an elementary space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorRange {
    pub label: Label,
    pub offset: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Factor {
    labels: IndexSet,
    dims: Vec<usize>,
}

impl Factor {
    fn total(&self) -> usize {
        self.dims.iter().sum()
    }
}

#[derive(Debug)]
struct Inner {
    name: Option<String>,
    factors: Vec<Factor>,
    labels: IndexSet,
    dims: Vec<usize>,
    coords: Vec<Vec<usize>>,
    sector_of: Vec<usize>,
    total: usize,
}

#[derive(Clone, Debug)]
pub struct PartitionedSpace(Arc<Inner>);

impl PartitionedSpace {
    /// An elementary space with contiguous sectors in label order.
    pub fn new(labels: &IndexSet, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} sector labels but {} dimensions",
                labels.len(),
                dims.len()
            )));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvariantViolation(format!(
                "sector {} has dimension 0",
                labels.label(i)
            )));
        }
        Ok(Self::from_factors(
            None,
            vec![Factor {
                labels: labels.clone(),
                dims,
            }],
        ))
    }

    pub fn named(name: &str, labels: &IndexSet, dims: Vec<usize>) -> Result<Self> {
        let s = Self::new(labels, dims)?;
        Ok(s.with_name(name))
    }

    /// A single-sector space `{*}` of dimension `dim`.
    pub fn unpartitioned(dim: usize) -> Result<Self> {
        Self::new(&IndexSet::trivial(), vec![dim])
    }

    /// The one-dimensional unit space with the single sector `()`.
    pub fn unit() -> Self {
        Self::from_factors(None, Vec::new())
    }

    /// Sector dims given per integer label `0..dims.len()`.
    pub fn with_dims(dims: &[usize]) -> Result<Self> {
        Self::new(&IndexSet::range(dims.len()), dims.to_vec())
    }

    pub fn with_name(&self, name: &str) -> Self {
        Self::from_factors(Some(name.to_string()), self.0.factors.clone())
    }

    fn from_factors(name: Option<String>, factors: Vec<Factor>) -> Self {
        let mut labels = IndexSet::unit();
        let mut dims = vec![1usize];
        let mut coords: Vec<Vec<usize>> = vec![vec![0]];
        let mut total = 1usize;
        for f in &factors {
            let ft = f.total();
            let mut offsets = Vec::with_capacity(f.dims.len());
            let mut o = 0;
            for &d in &f.dims {
                offsets.push(o);
                o += d;
            }
            let mut new_coords = Vec::with_capacity(coords.len() * f.dims.len());
            let mut new_dims = Vec::with_capacity(coords.len() * f.dims.len());
            for (c, &d) in coords.iter().zip(&dims) {
                for (j, &fd) in f.dims.iter().enumerate() {
                    let mut cs = Vec::with_capacity(c.len() * fd);
                    for &x in c {
                        for y in offsets[j]..offsets[j] + fd {
                            cs.push(x * ft + y);
                        }
                    }
                    new_coords.push(cs);
                    new_dims.push(d * fd);
                }
            }
            labels = labels.product(&f.labels);
            coords = new_coords;
            dims = new_dims;
            total *= ft;
        }
        let mut sector_of = vec![0; total];
        for (s, cs) in coords.iter().enumerate() {
            for &c in cs {
                sector_of[c] = s;
            }
        }
        PartitionedSpace(Arc::new(Inner {
            name,
            factors,
            labels,
            dims,
            coords,
            sector_of,
            total,
        }))
    }

    pub fn name(&self) -> Option<&str> {
        self.0.name.as_deref()
    }

    pub fn labels(&self) -> &IndexSet {
        &self.0.labels
    }

    pub fn sector_dims(&self) -> &[usize] {
        &self.0.dims
    }

    pub fn total_dim(&self) -> usize {
        self.0.total
    }

    pub fn num_sectors(&self) -> usize {
        self.0.dims.len()
    }

    pub fn is_elementary(&self) -> bool {
        self.0.factors.len() == 1
    }

    /// Number of elementary factors; the unit space has none.
    pub fn num_factors(&self) -> usize {
        self.0.factors.len()
    }

    /// Contiguous sector ranges of an elementary space.
    pub fn sectors(&self) -> Option<Vec<SectorRange>> {
        if !self.is_elementary() {
            return None;
        }
        Some(
            self.0
                .coords
                .iter()
                .enumerate()
                .map(|(i, cs)| SectorRange {
                    label: self.0.labels.label(i).clone(),
                    offset: cs[0],
                    dim: cs.len(),
                })
                .collect(),
        )
    }

    /// Coordinates of sector `i`, ascending.
    pub fn coords(&self, i: usize) -> &[usize] {
        &self.0.coords[i]
    }

    pub fn sector_of_coord(&self, c: usize) -> usize {
        self.0.sector_of[c]
    }

    pub fn coords_of(&self, label: &Label) -> Result<&[usize]> {
        Ok(self.coords(self.0.labels.index_of(label)?))
    }

    pub fn tensor(&self, other: &PartitionedSpace) -> PartitionedSpace {
        let mut factors = self.0.factors.clone();
        factors.extend(other.0.factors.iter().cloned());
        Self::from_factors(None, factors)
    }

    pub fn tensor_all<'a>(
        spaces: impl IntoIterator<Item = &'a PartitionedSpace>,
    ) -> PartitionedSpace {
        let factors = spaces
            .into_iter()
            .flat_map(|s| s.0.factors.iter().cloned())
            .collect();
        Self::from_factors(None, factors)
    }

    /// The 0/1 diagonal projector `π^k`.
    pub fn projector(&self, label: &Label) -> Result<Mat> {
        let i = self.0.labels.index_of(label)?;
        Ok(self.projector_at(i))
    }

    pub fn projector_at(&self, i: usize) -> Mat {
        let mut p = linalg::zeros(self.total_dim(), self.total_dim());
        for &c in self.coords(i) {
            p[(c, c)] = linalg::ONE;
        }
        p
    }

    /// Projector onto the direct sum of the sectors in `s`.
    pub fn subspace_projector(&self, s: &Subset) -> Mat {
        let mut p = linalg::zeros(self.total_dim(), self.total_dim());
        for i in s.indices() {
            for &c in self.coords(i) {
                p[(c, c)] = linalg::ONE;
            }
        }
        p
    }

    /// Coordinates of all sectors in `s`, ascending.
    pub fn subspace_coords(&self, s: &Subset) -> Vec<usize> {
        let mut v: Vec<usize> = s
            .indices()
            .flat_map(|i| self.coords(i).iter().copied())
            .collect();
        v.sort_unstable();
        v
    }

    /// The operator-space projection `ρ ↦ π^k ρ π^{k'}`.
    pub fn operator_partition_projector(&self, k: &Label, k2: &Label, rho: &Mat) -> Result<Mat> {
        let (i, j) = (self.0.labels.index_of(k)?, self.0.labels.index_of(k2)?);
        let n = self.total_dim();
        if rho.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!(
                "operator must be {n}x{n}, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let mut out = linalg::zeros(n, n);
        for &r in self.coords(i) {
            for &c in self.coords(j) {
                out[(r, c)] = rho[(r, c)];
            }
        }
        Ok(out)
    }
}

impl PartialEq for PartitionedSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.factors == other.0.factors
    }
}

impl Eq for PartitionedSpace {}

impl fmt::Display for PartitionedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.name() {
            write!(f, "{n}")?;
        }
        write!(f, "[")?;
        for i in 0..self.num_sectors() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", self.0.labels.label(i), self.0.dims[i])?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    sectors: Vec<SectorRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectorRepr {
    label: Label,
    dim: usize,
}

impl Serialize for PartitionedSpace {
    /// Serializes the sector list; product spaces list their product sectors.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpaceRepr {
            name: self.0.name.clone(),
            sectors: (0..self.num_sectors())
                .map(|i| SectorRepr {
                    label: self.0.labels.label(i).clone(),
                    dim: self.0.dims[i],
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartitionedSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SpaceRepr::deserialize(d)?;
        let labels = IndexSet::new(r.sectors.iter().map(|s| s.label.clone()).collect())
            .map_err(D::Error::custom)?;
        let space = PartitionedSpace::new(&labels, r.sectors.iter().map(|s| s.dim).collect())
            .map_err(D::Error::custom)?;
        Ok(match r.name {
            Some(n) => space.with_name(&n),
            None => space,
        })
    }
}
