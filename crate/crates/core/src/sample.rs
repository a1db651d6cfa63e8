//! Random routes, practical isometries, practical unitaries and channels.
//!
//! Practical isometries are drawn column by column: each basis vector of an
//! input sector `k` is sent to a Gaussian vector inside the allowed output
//! subspace `⊕_{l : λ^l_k} H^l`, made orthogonal to everything drawn before.
//! When the practical input and output spaces have equal dimension the result
//! is a practical unitary.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::label::IndexSet;
use crate::linalg::{self, Mat, C64};
use crate::relations::{CpRelation, Relation};
use crate::routedcpm::RoutedCpm;
use crate::routedmap::RoutedMap;
use crate::spaces::PartitionedSpace;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// A Haar-distributed `n × n` unitary.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let z = gaussian_matrix(rng, n, n);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            linalg::ONE
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Each entry set independently with probability `density`.
pub fn random_relation<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &IndexSet,
    codomain: &IndexSet,
    density: f64,
) -> Relation {
    Relation::from_fn(domain, codomain, |_, _| rng.random_bool(density))
}

/// An elementary space with `sectors` integer-labelled sectors of dims in `1..=max_dim`.
pub fn random_space<R: Rng + ?Sized>(
    rng: &mut R,
    sectors: usize,
    max_dim: usize,
) -> PartitionedSpace {
    let dims = (0..sectors)
        .map(|_| rng.random_range(1..=max_dim))
        .collect::<Vec<_>>();
    PartitionedSpace::with_dims(&dims).expect("dims are positive")
}

/// A random matrix supported on the blocks the route allows.
pub fn random_following_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    route: &Relation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
) -> Mat {
    let mut m = linalg::zeros(codomain.total_dim(), domain.total_dim());
    for (k, l) in route.pairs() {
        for &c in domain.coords(k) {
            for &r in codomain.coords(l) {
                m[(r, c)] = gaussian(rng);
            }
        }
    }
    m
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormalizes `v` against `basis` in place; returns its remaining norm.
fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) -> f64 {
    // two passes for numerical stability
    for _ in 0..2 {
        for u in basis {
            let c = inner(u, v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
    }
    let n = norm(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// A random practical isometry following `route`, or `None` when the greedy
/// construction finds no room (for example when some input sector is larger
/// than the output subspace it may reach).
pub fn random_practical_isometry<R: Rng + ?Sized>(
    rng: &mut R,
    route: &Relation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
) -> Option<RoutedMap> {
    const ATTEMPTS: usize = 8;
    let dout = codomain.total_dim();
    'attempt: for _ in 0..ATTEMPTS {
        let mut m = linalg::zeros(dout, domain.total_dim());
        let mut columns: Vec<Vec<C64>> = Vec::new();
        for k in route.practical_input_set().indices() {
            let allowed: Vec<usize> = {
                let mut v: Vec<usize> = (0..codomain.num_sectors())
                    .filter(|&l| route.get(k, l))
                    .flat_map(|l| codomain.coords(l).iter().copied())
                    .collect();
                v.sort_unstable();
                v
            };
            // previous columns projected into the allowed subspace
            let mut proj_basis: Vec<Vec<C64>> = Vec::new();
            for u in &columns {
                let mut p: Vec<C64> = allowed.iter().map(|&r| u[r]).collect();
                if orthogonalize(&mut p, &proj_basis) > 1e-10 {
                    proj_basis.push(p);
                }
            }
            for &c in domain.coords(k) {
                let mut v: Vec<C64> = allowed.iter().map(|_| gaussian(rng)).collect();
                let n0 = norm(&v);
                if orthogonalize(&mut v, &proj_basis) < 1e-6 * n0 {
                    continue 'attempt;
                }
                let mut full = vec![linalg::ZERO; dout];
                for (&r, &x) in allowed.iter().zip(&v) {
                    full[r] = x;
                    m[(r, c)] = x;
                }
                proj_basis.push(v);
                columns.push(full);
            }
        }
        let f = RoutedMap::new(
            route.clone(),
            m,
            domain.clone(),
            codomain.clone(),
            linalg::DEFAULT_TOL,
        )
        .ok()?;
        if f.is_practical_isometry(1e-10) {
            return Some(f);
        }
    }
    None
}

/// A random practical unitary following `route`, or `None` if the practical
/// input and output spaces differ in dimension or no sample fits.
pub fn random_practical_unitary<R: Rng + ?Sized>(
    rng: &mut R,
    route: &Relation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
) -> Option<RoutedMap> {
    let din = domain.subspace_coords(&route.practical_input_set()).len();
    let dout = codomain
        .subspace_coords(&route.practical_output_set())
        .len();
    if din != dout {
        return None;
    }
    random_practical_isometry(rng, route, domain, codomain)
        .filter(|f| f.is_practical_unitary(1e-10))
}

/// A random block-diagonal unitary on `space`, routed by `δ`.
pub fn random_delta_unitary<R: Rng + ?Sized>(rng: &mut R, space: &PartitionedSpace) -> RoutedMap {
    let mut m = linalg::zeros(space.total_dim(), space.total_dim());
    for i in 0..space.num_sectors() {
        let cs = space.coords(i);
        let u = haar_unitary(rng, cs.len());
        for (a, &r) in cs.iter().enumerate() {
            for (b, &c) in cs.iter().enumerate() {
                m[(r, c)] = u[(a, b)];
            }
        }
    }
    RoutedMap::new(
        Relation::identity(space.labels()),
        m,
        space.clone(),
        space.clone(),
        linalg::DEFAULT_TOL,
    )
    .expect("block-diagonal matrices follow the identity route")
}

/// The CP route `Λ^{ll'}_{kk'} = OR_m λ^{lm}_k λ^{l'm}_{k'}` generated by a doubling
/// `λ : Z_A → Z_B × Z_E`, with the environment labels indexed `0..env`.
pub fn doubled_route(doubling: &Relation, codomain: &IndexSet, env: usize) -> CpRelation {
    let a = doubling.domain().len();
    let b = codomain.len();
    let mut arr = crate::relations::BoolArray4::zeros([a, a, b, b]);
    for k in 0..a {
        for k2 in 0..a {
            for l in 0..b {
                for l2 in 0..b {
                    let hit = (0..env)
                        .any(|m| doubling.get(k, l * env + m) && doubling.get(k2, l2 * env + m));
                    arr.set(k, k2, l, l2, hit);
                }
            }
        }
    }
    CpRelation::new(doubling.domain(), codomain, arr)
        .expect("doubled routes are completely positive")
}

/// A random practically trace-preserving CP map: a practical isometry
/// `A → B ⊗ E` following a random doubling, split into Kraus operators along
/// `E`. Returns `None` when no isometry fits.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
    env: usize,
    env_dim: usize,
    density: f64,
) -> Option<RoutedCpm> {
    let env_space = PartitionedSpace::new(&IndexSet::range(env), vec![env_dim; env]).ok()?;
    let big = codomain.tensor(&env_space);
    let doubling = random_relation(rng, domain.labels(), big.labels(), density);
    channel_from_doubling(rng, &doubling, domain, codomain, &env_space)
}

/// Like [`random_channel`] for a given doubling relation into `codomain × env`.
pub fn channel_from_doubling<R: Rng + ?Sized>(
    rng: &mut R,
    doubling: &Relation,
    domain: &PartitionedSpace,
    codomain: &PartitionedSpace,
    env_space: &PartitionedSpace,
) -> Option<RoutedCpm> {
    let big = codomain.tensor(env_space);
    let v = random_practical_isometry(rng, doubling, domain, &big)?;
    let de = env_space.total_dim();
    let kraus: Vec<Mat> = (0..de)
        .map(|e| {
            Mat::from_fn(codomain.total_dim(), domain.total_dim(), |p, i| {
                v.matrix()[(p * de + e, i)]
            })
        })
        .filter(|k| linalg::max_abs(k) > 0.0)
        .collect();
    let kraus = if kraus.is_empty() {
        vec![linalg::zeros(codomain.total_dim(), domain.total_dim())]
    } else {
        kraus
    };
    let route = doubled_route(doubling, codomain.labels(), env_space.num_sectors());
    RoutedCpm::new(
        route,
        kraus,
        domain.clone(),
        codomain.clone(),
        linalg::DEFAULT_TOL,
    )
    .ok()
}

/// Splits every Kraus operator into its `μ^l K π^k` blocks, producing a
/// channel that follows `full_decoherence` of the original diagonal.
pub fn decohere(c: &RoutedCpm) -> RoutedCpm {
    let (dom, cod) = (c.domain(), c.codomain());
    let diag = c.route().diagonal();
    let mut kraus = Vec::new();
    for k in c.kraus() {
        for (a, b) in diag.pairs() {
            let mut part = linalg::zeros(cod.total_dim(), dom.total_dim());
            for &col in dom.coords(a) {
                for &row in cod.coords(b) {
                    part[(row, col)] = k[(row, col)];
                }
            }
            if linalg::max_abs(&part) > 0.0 {
                kraus.push(part);
            }
        }
    }
    if kraus.is_empty() {
        kraus.push(linalg::zeros(cod.total_dim(), dom.total_dim()));
    }
    RoutedCpm::new(
        CpRelation::full_decoherence(&diag),
        kraus,
        dom.clone(),
        cod.clone(),
        c.tolerance(),
    )
    .expect("block-split Kraus operators follow the decoherent route")
}
