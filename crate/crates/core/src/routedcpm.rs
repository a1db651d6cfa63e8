//! Routed completely positive maps in Kraus form.
//!
//! The Choi matrix uses the convention
//! `J[(i,p),(j,q)] = Σ_a K_a[p,i] conj(K_a[q,j])` with the composite index
//! `(i,p) = i * dim_out + p`. The CP map sends the operator block
//! `π^k ρ π^{k'}` into `μ^l · μ^{l'}` exactly when the Choi block with rows in
//! `(k, l)` and columns in `(k', l')` is nonzero.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64};
use crate::relations::{channel_gate, CpRelation, Relation};
use crate::routedmap::{self, RoutedMap};
use crate::spaces::PartitionedSpace;

/// Choi matrix of the CP map with the given Kraus operators.
pub fn choi(kraus: &[Mat]) -> Mat {
    let (dout, din) = kraus[0].shape();
    let n = din * dout;
    let v = Mat::from_fn(n, kraus.len(), |row, a| {
        let (i, p) = (row / dout, row % dout);
        kraus[a][(p, i)]
    });
    &v * v.adjoint()
}

fn choi_indices(
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
    k: usize,
    l: usize,
) -> Vec<usize> {
    let dout = codomain.total_dim();
    let mut v = Vec::with_capacity(domain.coords(k).len() * codomain.coords(l).len());
    for &i in domain.coords(k) {
        for &p in codomain.coords(l) {
            v.push(i * dout + p);
        }
    }
    v
}

/// A forbidden Choi block carrying weight, as `(k, k', l, l')` positions.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiViolation {
    pub entry: [usize; 4],
    pub norm: f64,
}

fn check_kraus(
    kraus: &[Mat],
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
) -> Result<()> {
    if kraus.is_empty() {
        return Err(Error::ShapeMismatch(
            "a CP map needs at least one Kraus operator".into(),
        ));
    }
    let want = (codomain.total_dim(), domain.total_dim());
    if let Some((i, k)) = kraus.iter().enumerate().find(|(_, k)| k.shape() != want) {
        return Err(Error::ShapeMismatch(format!(
            "Kraus operator {i} is {}x{} but the spaces need {}x{}",
            k.nrows(),
            k.ncols(),
            want.0,
            want.1
        )));
    }
    Ok(())
}

fn check_typing(
    route: &CpRelation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
) -> Result<()> {
    if route.domain() != domain.labels() || route.codomain() != codomain.labels() {
        return Err(Error::DomainMismatch(format!(
            "route {} -> {} does not match spaces {} -> {}",
            route.domain(),
            route.codomain(),
            domain.labels(),
            codomain.labels()
        )));
    }
    Ok(())
}

/// The largest forbidden Choi block exceeding `tol`.
pub fn worst_forbidden_choi_block(
    kraus: &[Mat],
    route: &CpRelation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
    tol: f64,
) -> Result<Option<ChoiViolation>> {
    check_kraus(kraus, domain, codomain)?;
    check_typing(route, domain, codomain)?;
    let j = choi(kraus);
    let (a, b) = (domain.num_sectors(), codomain.num_sectors());
    let idx: Vec<Vec<Vec<usize>>> = (0..a)
        .map(|k| {
            (0..b)
                .map(|l| choi_indices(domain, codomain, k, l))
                .collect()
        })
        .collect();
    let mut worst: Option<ChoiViolation> = None;
    for k in 0..a {
        for k2 in 0..a {
            for l in 0..b {
                for l2 in 0..b {
                    if route.get(k, k2, l, l2) {
                        continue;
                    }
                    let norm = linalg::block_max_abs(&j, &idx[k][l], &idx[k2][l2]);
                    if norm > tol && worst.as_ref().is_none_or(|w| norm > w.norm) {
                        worst = Some(ChoiViolation {
                            entry: [k, k2, l, l2],
                            norm,
                        });
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Whether the CP map given by `kraus` follows `route` (all forbidden Choi blocks vanish).
pub fn follows_cp(
    kraus: &[Mat],
    route: &CpRelation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
    tol: f64,
) -> Result<bool> {
    Ok(worst_forbidden_choi_block(kraus, route, domain, codomain, tol)?.is_none())
}

/// Kraus operators for one `(k, l)` block of a fully decoherent channel.
#[derive(Clone, Debug)]
pub struct AdaptedBlock {
    pub input: usize,
    pub output: usize,
    pub kraus: Vec<Mat>,
}

#[derive(Clone, Debug)]
pub struct RoutedCpm {
    route: CpRelation,
    kraus: Vec<Mat>,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    tol: f64,
}

impl RoutedCpm {
    pub fn new(
        route: CpRelation,
        kraus: Vec<Mat>,
        domain: PartitionedSpace,
        codomain: PartitionedSpace,
        tol: f64,
    ) -> Result<Self> {
        if let Some(v) = worst_forbidden_choi_block(&kraus, &route, &domain, &codomain, tol)? {
            let [k, k2, l, l2] = v.entry;
            return Err(Error::RouteViolation(format!(
                "Choi block (k,k',l,l') = ({},{},{},{}) has norm {:.3e} but the route forbids it",
                domain.labels().label(k),
                domain.labels().label(k2),
                codomain.labels().label(l),
                codomain.labels().label(l2),
                v.norm
            )));
        }
        Ok(RoutedCpm {
            route,
            kraus,
            domain,
            codomain,
            tol,
        })
    }

    /// `(full_coherence(λ), ρ ↦ f ρ f†)`.
    pub fn lift_pure(f: &RoutedMap) -> Self {
        RoutedCpm {
            route: CpRelation::full_coherence(f.route()),
            kraus: vec![f.matrix().clone()],
            domain: f.domain().clone(),
            codomain: f.codomain().clone(),
            tol: f.tolerance(),
        }
    }

    pub fn identity(space: &PartitionedSpace) -> Self {
        Self::lift_pure(&RoutedMap::identity(space))
    }

    pub fn permutation(spaces: &[PartitionedSpace], order: &[usize]) -> Self {
        Self::lift_pure(&RoutedMap::permutation(spaces, order))
    }

    /// The trace on `space`, routed by `δ_{kk'}` into the unit space.
    pub fn discard(space: &PartitionedSpace) -> Self {
        let unit = PartitionedSpace::unit();
        let n = space.total_dim();
        let kraus = (0..n)
            .map(|i| {
                let mut row = linalg::zeros(1, n);
                row[(0, i)] = linalg::ONE;
                row
            })
            .collect();
        RoutedCpm {
            route: CpRelation::full_decoherence(&Relation::full(space.labels(), unit.labels())),
            kraus,
            domain: space.clone(),
            codomain: unit,
            tol: linalg::DEFAULT_TOL,
        }
    }

    pub fn route(&self) -> &CpRelation {
        &self.route
    }

    pub fn kraus(&self) -> &[Mat] {
        &self.kraus
    }

    pub fn domain(&self) -> &PartitionedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &PartitionedSpace {
        &self.codomain
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn choi(&self) -> Mat {
        choi(&self.kraus)
    }

    pub fn apply(&self, rho: &Mat) -> Mat {
        let mut out = linalg::zeros(self.codomain.total_dim(), self.codomain.total_dim());
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    /// Kraus operators `{L_j K_i}` of `self ∘ f`.
    pub fn compose(&self, f: &RoutedCpm) -> Result<RoutedCpm> {
        if f.codomain != self.domain {
            return Err(Error::DomainMismatch(format!(
                "first map lands in {} but second starts from {}",
                f.codomain, self.domain
            )));
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|l| f.kraus.iter().map(move |k| l * k))
            .collect();
        Ok(RoutedCpm {
            route: self.route.compose(&f.route)?,
            kraus,
            domain: f.domain.clone(),
            codomain: self.codomain.clone(),
            tol: self.tol.max(f.tol),
        })
    }

    /// Composition behind the channel gate on the route diagonals.
    pub fn checked_compose_channel(&self, f: &RoutedCpm) -> Result<RoutedCpm> {
        if let Some(v) = channel_gate(&f.route, &self.route)? {
            return Err(v.into_error());
        }
        self.compose(f)
    }

    pub fn tensor(&self, g: &RoutedCpm) -> RoutedCpm {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| g.kraus.iter().map(move |b| linalg::kron(a, b)))
            .collect();
        RoutedCpm {
            route: self.route.product(&g.route),
            kraus,
            domain: self.domain.tensor(&g.domain),
            codomain: self.codomain.tensor(&g.codomain),
            tol: self.tol.max(g.tol),
        }
    }

    /// `(Λᵀ, C†)` with Kraus operators `K_i†`.
    pub fn dagger(&self) -> RoutedCpm {
        RoutedCpm {
            route: self.route.transpose(),
            kraus: self.kraus.iter().map(linalg::dagger).collect(),
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            tol: self.tol,
        }
    }

    /// Deviation of `P_S (Σ K†K) P_S` from `P_S` on the diagonal's practical input space.
    pub fn trace_defect(&self) -> f64 {
        let coords = self
            .domain
            .subspace_coords(&self.route.diagonal().practical_input_set());
        if coords.is_empty() {
            return 0.0;
        }
        let n = coords.len();
        let mut sum = linalg::zeros(n, n);
        let all: Vec<usize> = (0..self.codomain.total_dim()).collect();
        for k in &self.kraus {
            let g = linalg::select(k, &all, &coords);
            sum += g.adjoint() * g;
        }
        linalg::max_diff(&sum, &linalg::identity(n))
    }

    pub fn is_practically_trace_preserving(&self, tol: f64) -> bool {
        self.trace_defect() <= tol
    }

    /// Whether every Kraus operator follows the route's diagonal.
    pub fn kraus_follow_diagonal(&self, tol: f64) -> bool {
        let diag = self.route.diagonal();
        self.kraus.iter().all(|k| {
            routedmap::follows(k, &diag, &self.domain, &self.codomain, tol).unwrap_or(false)
        })
    }

    /// Kraus operators `K = μ^l K π^k` per `(k, l)` block, from the
    /// eigendecomposition of each diagonal Choi block. Requires a route with
    /// full decoherence.
    pub fn adapted_kraus_decomposition(&self) -> Result<Vec<AdaptedBlock>> {
        if let Some([k, k2, l, l2]) = self.route.off_diagonal_entry() {
            let d = self.domain.labels();
            let c = self.codomain.labels();
            return Err(Error::NotFullDecoherence(format!(
                "({},{},{},{})",
                d.label(k),
                d.label(k2),
                c.label(l),
                c.label(l2)
            )));
        }
        let j = self.choi();
        let dout = self.codomain.total_dim();
        let scale = linalg::max_abs(&j).max(1.0);
        let mut blocks = Vec::new();
        for (k, l) in self.route.diagonal().pairs() {
            let idx = choi_indices(&self.domain, &self.codomain, k, l);
            let block = linalg::select(&j, &idx, &idx);
            let (vals, vecs) = linalg::hermitian_eigen(&block);
            let mut kraus = Vec::new();
            for (e, &val) in vals.iter().enumerate() {
                if val <= 1e-14 * scale {
                    continue;
                }
                let s = val.sqrt();
                let mut op = linalg::zeros(dout, self.domain.total_dim());
                for (row, &composite) in idx.iter().enumerate() {
                    let (i, p) = (composite / dout, composite % dout);
                    op[(p, i)] = vecs[(row, e)] * C64::new(s, 0.0);
                }
                kraus.push(op);
            }
            if !kraus.is_empty() {
                blocks.push(AdaptedBlock {
                    input: k,
                    output: l,
                    kraus,
                });
            }
        }
        Ok(blocks)
    }
}
