//! Routed linear maps: a route paired with a matrix that respects it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::factor_permutation;
use crate::linalg::{self, Mat, C64};
use crate::relations::{isometry_gate, unitary_gate, Relation};
use crate::spaces::PartitionedSpace;

/// Which properness gate a composition must pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateMode {
    Isometry,
    Unitary,
    None,
}

/// A forbidden block that carries weight: `‖μ^l f π^k‖_max > tol` with `λ^l_k = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockViolation {
    pub input: usize,
    pub output: usize,
    pub norm: f64,
}

fn check_typing(
    route: &Relation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
) -> Result<()> {
    if route.domain() != domain.labels() {
        return Err(Error::DomainMismatch(format!(
            "route input labels {} differ from the domain sectors {}",
            route.domain(),
            domain.labels()
        )));
    }
    if route.codomain() != codomain.labels() {
        return Err(Error::DomainMismatch(format!(
            "route output labels {} differ from the codomain sectors {}",
            route.codomain(),
            codomain.labels()
        )));
    }
    Ok(())
}

fn check_shape(matrix: &Mat, domain: &PartitionedSpace, codomain: &PartitionedSpace) -> Result<()> {
    if matrix.shape() != (codomain.total_dim(), domain.total_dim()) {
        return Err(Error::ShapeMismatch(format!(
            "matrix is {}x{} but the spaces need {}x{}",
            matrix.nrows(),
            matrix.ncols(),
            codomain.total_dim(),
            domain.total_dim()
        )));
    }
    Ok(())
}

/// The largest forbidden block of `matrix` under `route`, if any exceeds `tol`.
pub fn worst_forbidden_block(
    matrix: &Mat,
    route: &Relation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
    tol: f64,
) -> Result<Option<BlockViolation>> {
    check_typing(route, domain, codomain)?;
    check_shape(matrix, domain, codomain)?;
    let mut worst: Option<BlockViolation> = None;
    for k in 0..domain.num_sectors() {
        for l in 0..codomain.num_sectors() {
            if route.get(k, l) {
                continue;
            }
            let norm = linalg::block_max_abs(matrix, codomain.coords(l), domain.coords(k));
            if norm > tol && worst.as_ref().is_none_or(|w| norm > w.norm) {
                worst = Some(BlockViolation {
                    input: k,
                    output: l,
                    norm,
                });
            }
        }
    }
    Ok(worst)
}

/// Whether every forbidden block `μ^l f π^k` with `λ^l_k = 0` is within `tol`.
pub fn follows(
    matrix: &Mat,
    route: &Relation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
    tol: f64,
) -> Result<bool> {
    Ok(worst_forbidden_block(matrix, route, domain, codomain, tol)?.is_none())
}

/// The reconstruction form: `f = Σ_{k,l} λ^l_k μ^l f π^k` within `tol`.
pub fn follows_by_reconstruction(
    matrix: &Mat,
    route: &Relation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
    tol: f64,
) -> Result<bool> {
    check_typing(route, domain, codomain)?;
    check_shape(matrix, domain, codomain)?;
    let mut sum = linalg::zeros(matrix.nrows(), matrix.ncols());
    for (k, l) in route.pairs() {
        sum += codomain.projector_at(l) * matrix * domain.projector_at(k);
    }
    Ok(linalg::max_diff(&sum, matrix) <= tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutedMap {
    route: Relation,
    matrix: Mat,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    tol: f64,
}

impl RoutedMap {
    /// Builds a routed map, rejecting matrices that do not follow the route.
    pub fn new(
        route: Relation,
        matrix: Mat,
        domain: PartitionedSpace,
        codomain: PartitionedSpace,
        tol: f64,
    ) -> Result<Self> {
        if let Some(v) = worst_forbidden_block(&matrix, &route, &domain, &codomain, tol)? {
            return Err(Error::RouteViolation(format!(
                "block from sector {} to sector {} has norm {:.3e} but the route forbids it",
                domain.labels().label(v.input),
                codomain.labels().label(v.output),
                v.norm
            )));
        }
        Ok(RoutedMap {
            route,
            matrix,
            domain,
            codomain,
            tol,
        })
    }

    /// The identity on `space`, routed by `δ`.
    pub fn identity(space: &PartitionedSpace) -> Self {
        RoutedMap {
            route: Relation::identity(space.labels()),
            matrix: linalg::identity(space.total_dim()),
            domain: space.clone(),
            codomain: space.clone(),
            tol: linalg::DEFAULT_TOL,
        }
    }

    /// The wire rearrangement taking factor `order[j]` of the input to slot `j`.
    pub fn permutation(spaces: &[PartitionedSpace], order: &[usize]) -> Self {
        let domain = PartitionedSpace::tensor_all(spaces);
        let codomain = PartitionedSpace::tensor_all(order.iter().map(|&i| &spaces[i]));
        let sets: Vec<_> = spaces.iter().map(|s| s.labels().clone()).collect();
        let dims: Vec<usize> = spaces.iter().map(PartitionedSpace::total_dim).collect();
        let map = factor_permutation(&dims, order);
        let mut matrix = linalg::zeros(codomain.total_dim(), domain.total_dim());
        for (src, &dst) in map.iter().enumerate() {
            matrix[(dst, src)] = linalg::ONE;
        }
        RoutedMap {
            route: Relation::permutation(&sets, order),
            matrix,
            domain,
            codomain,
            tol: linalg::DEFAULT_TOL,
        }
    }

    pub fn route(&self) -> &Relation {
        &self.route
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
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

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// `(σ ∘ λ, g f)` for `self = g`.
    pub fn compose(&self, f: &RoutedMap) -> Result<RoutedMap> {
        if f.codomain != self.domain {
            return Err(Error::DomainMismatch(format!(
                "first map lands in {} but second starts from {}",
                f.codomain, self.domain
            )));
        }
        Ok(RoutedMap {
            route: self.route.compose(&f.route)?,
            matrix: &self.matrix * &f.matrix,
            domain: f.domain.clone(),
            codomain: self.codomain.clone(),
            tol: self.tol.max(f.tol),
        })
    }

    /// Composition behind the properness gate of `mode`.
    pub fn checked_compose(&self, f: &RoutedMap, mode: GateMode) -> Result<RoutedMap> {
        let violation = match mode {
            GateMode::Isometry => isometry_gate(&f.route, &self.route)?,
            GateMode::Unitary => unitary_gate(&f.route, &self.route)?,
            GateMode::None => None,
        };
        if let Some(v) = violation {
            return Err(v.into_error());
        }
        self.compose(f)
    }

    pub fn tensor(&self, g: &RoutedMap) -> RoutedMap {
        RoutedMap {
            route: self.route.product(&g.route),
            matrix: linalg::kron(&self.matrix, &g.matrix),
            domain: self.domain.tensor(&g.domain),
            codomain: self.codomain.tensor(&g.codomain),
            tol: self.tol.max(g.tol),
        }
    }

    pub fn dagger(&self) -> RoutedMap {
        RoutedMap {
            route: self.route.transpose(),
            matrix: linalg::dagger(&self.matrix),
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            tol: self.tol,
        }
    }

    /// Deviation of `P_S f† f P_S` from `P_S`, measured on the practical input space.
    pub fn isometry_defect(&self) -> f64 {
        let coords = self
            .domain
            .subspace_coords(&self.route.practical_input_set());
        if coords.is_empty() {
            return 0.0;
        }
        let all: Vec<usize> = (0..self.matrix.nrows()).collect();
        let g = linalg::select(&self.matrix, &all, &coords);
        let gram = g.adjoint() * &g;
        linalg::max_diff(&gram, &linalg::identity(coords.len()))
    }

    pub fn is_practical_isometry(&self, tol: f64) -> bool {
        self.isometry_defect() <= tol
    }

    pub fn is_practical_unitary(&self, tol: f64) -> bool {
        self.is_practical_isometry(tol) && self.dagger().is_practical_isometry(tol)
    }

    /// Scales the matrix; the route is unchanged.
    pub fn scale(&self, c: C64) -> RoutedMap {
        RoutedMap {
            matrix: &self.matrix * c,
            ..self.clone()
        }
    }
}
