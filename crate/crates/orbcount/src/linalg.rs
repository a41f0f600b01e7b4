//! Exact integer matrices and determinants for Matrix-Tree computations.
//!
//! Everything here is arbitrary precision; determinants are computed by
//! fraction-free (Bareiss) elimination so intermediates stay integral.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::DirectedMultigraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("root {0} out of range (vertex count {1})")]
    RootOutOfRange(usize, usize),
    #[error("expected {expected} arc weights, got {got}")]
    WeightLength { expected: usize, got: usize },
}

/// Square matrix of exact signed integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let dim = rows.len();
        let mut m = IntMatrix::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.dim + j]
    }
}

/// Exact determinant by fraction-free Gaussian elimination with row pivoting.
/// The 0x0 matrix has determinant 1.
pub fn det_exact(mat: &IntMatrix) -> BigInt {
    let n = mat.dim;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = mat.entries.clone();
    let idx = |i: usize, j: usize| i * n + j;
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[idx(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[idx(r, k)].is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        a.swap(idx(k, j), idx(r, j));
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[idx(i, j)] * &a[idx(k, k)] - &a[idx(i, k)] * &a[idx(k, j)];
                // Bareiss: division by the previous pivot is exact.
                a[idx(i, j)] = num / &prev;
            }
            a[idx(i, k)] = BigInt::zero();
        }
        prev = a[idx(k, k)].clone();
    }
    let det = a[idx(n - 1, n - 1)].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Weighted out-degree Laplacian of `d` with the root's row and column
/// deleted. Its determinant is the weighted number of arborescences oriented
/// toward `root` (every non-root vertex with exactly one outgoing tree arc).
///
/// Rows and columns range over the non-isolated vertices other than the
/// root; vertices touched by no arc at all are left out.
pub fn out_laplacian_minor(
    d: &DirectedMultigraph,
    weights: &[u64],
    root: usize,
) -> Result<IntMatrix, LinalgError> {
    if root >= d.vertex_count() {
        return Err(LinalgError::RootOutOfRange(root, d.vertex_count()));
    }
    if weights.len() != d.arc_count() {
        return Err(LinalgError::WeightLength {
            expected: d.arc_count(),
            got: weights.len(),
        });
    }
    let support = d.support();
    let mut col = vec![usize::MAX; d.vertex_count()];
    let mut dim = 0;
    for &v in &support {
        if v != root {
            col[v] = dim;
            dim += 1;
        }
    }
    let mut m = IntMatrix::zeros(dim);
    for (arc, &(t, h)) in d.arcs().iter().enumerate() {
        let w = BigInt::from(weights[arc]);
        if col[t] != usize::MAX {
            let i = col[t];
            m[(i, i)] += &w;
            if col[h] != usize::MAX {
                m[(i, col[h])] -= &w;
            }
        }
    }
    Ok(m)
}

/// Unit-weight convenience wrapper.
pub fn out_laplacian_minor_unit(
    d: &DirectedMultigraph,
    root: usize,
) -> Result<IntMatrix, LinalgError> {
    out_laplacian_minor(d, &vec![1u64; d.arc_count()], root)
}
