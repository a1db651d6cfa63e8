//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Default absolute tolerance for max-norm comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn dagger(m: &Mat) -> Mat {
    m.adjoint()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// The submatrix with the given rows and columns, in the given order.
pub fn select(m: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
    Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Max-norm of the submatrix at `rows × cols` without copying it.
pub fn block_max_abs(m: &Mat, rows: &[usize], cols: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for &r in rows {
        for &c in cols {
            best = best.max(m[(r, c)].norm());
        }
    }
    best
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues and column eigenvectors.
pub fn hermitian_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let e = h.symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// Parses a matrix from rows of entries, each `[re, im]` or a plain real.
pub fn from_rows(rows: &[Vec<C64>]) -> Result<Mat> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    if rows.iter().any(|x| x.len() != c) {
        return Err(Error::ShapeMismatch("ragged matrix rows".into()));
    }
    Ok(Mat::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn to_rows(m: &Mat) -> Vec<Vec<C64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// A complex entry written as `[re, im]` or as a bare real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry(pub C64);

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Real(f64),
            Pair(Vec<f64>),
        }
        match Repr::deserialize(d)? {
            Repr::Real(x) => Ok(Entry(C64::new(x, 0.0))),
            Repr::Pair(v) if v.len() == 2 => Ok(Entry(C64::new(v[0], v[1]))),
            Repr::Pair(v) => Err(D::Error::custom(format!(
                "complex entry must be [re, im], got {} numbers",
                v.len()
            ))),
        }
    }
}

/// Serde adapter for `Mat` as nested rows of [`Entry`].
pub mod serde_mat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Mat, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Entry>> = to_rows(m)
            .into_iter()
            .map(|r| r.into_iter().map(Entry).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat, D::Error> {
        let rows = Vec::<Vec<Entry>>::deserialize(d)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.0).collect())
            .collect();
        from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Serde adapter for a list of matrices.
pub mod serde_mats {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[Mat], s: S) -> Result<S::Ok, S::Error> {
        let all: Vec<Vec<Vec<Entry>>> = ms
            .iter()
            .map(|m| {
                to_rows(m)
                    .into_iter()
                    .map(|r| r.into_iter().map(Entry).collect())
                    .collect()
            })
            .collect();
        all.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Mat>, D::Error> {
        let all = Vec::<Vec<Vec<Entry>>>::deserialize(d)?;
        all.into_iter()
            .map(|rows| {
                let rows: Vec<Vec<C64>> = rows
                    .into_iter()
                    .map(|r| r.into_iter().map(|e| e.0).collect())
                    .collect();
                from_rows(&rows).map_err(D::Error::custom)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_layout() {
        let a = Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let b = Mat::from_row_slice(1, 2, &[ONE, C64::new(2.0, 0.0)]);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (2, 4));
        assert_eq!(k[(0, 1)], C64::new(2.0, 0.0));
        assert_eq!(k[(1, 1)], ZERO);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let m = Mat::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(2.0, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        let d = Mat::from_diagonal(&nalgebra::DVector::from_iterator(
            2,
            vals.iter().map(|&v| C64::new(v, 0.0)),
        ));
        let back = &vecs * d * vecs.adjoint();
        assert!(max_diff(&back, &m) < 1e-12);
    }

    #[test]
    fn entries_accept_reals_and_pairs() {
        let rows: Vec<Vec<Entry>> = serde_json::from_str("[[1, [0, 1]], [0.5, [2, -1]]]").unwrap();
        assert_eq!(rows[0][1].0, C64::new(0.0, 1.0));
        assert_eq!(rows[1][0].0, C64::new(0.5, 0.0));
        assert!(serde_json::from_str::<Entry>("[1,2,3]").is_err());
    }
}
