//! Real coordinates for Hermitian matrices.
//!
//! A `d x d` Hermitian matrix is a point of `R^{d^2}` in the Frobenius-orthonormal
//! basis `E_ii`, `(E_ij + E_ji)/sqrt2`, `i(E_ij - E_ji)/sqrt2` (i < j). In these
//! coordinates `Re tr(A B)` is the Euclidean dot product and
//! `<psi|A|psi> = vec(|psi><psi|) . vec(A)`.

use num_complex::Complex;

use super::{CMatrix, HermitianOp};
use crate::scalar::Real;

pub fn real_dim(dim: usize) -> usize {
    dim * dim
}

/// Human-readable label of coordinate `k`.
pub fn coordinate_label(dim: usize, k: usize) -> String {
    if k < dim {
        return format!("diag[{k}]");
    }
    let (i, j, imag) = off_diagonal_index(dim, k);
    if imag {
        format!("Im[{i},{j}]")
    } else {
        format!("Re[{i},{j}]")
    }
}

fn off_diagonal_index(dim: usize, k: usize) -> (usize, usize, bool) {
    let mut idx = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            if idx == k {
                return (i, j, false);
            }
            if idx + 1 == k {
                return (i, j, true);
            }
            idx += 2;
        }
    }
    panic!("coordinate {k} out of range for dim {dim}");
}

pub fn to_real<T: Real>(h: &HermitianOp<T>) -> Vec<T> {
    let d = h.dim();
    let r2 = T::lit(2.0).sqrt();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(h[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(r2 * h[(i, j)].re);
            out.push(r2 * h[(i, j)].im);
        }
    }
    out
}

pub fn from_real<T: Real>(dim: usize, x: &[T]) -> HermitianOp<T> {
    assert_eq!(x.len(), dim * dim);
    let inv = T::lit(0.5).sqrt();
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex::new(x[i], T::zero());
    }
    let mut k = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = Complex::new(x[k] * inv, x[k + 1] * inv);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    HermitianOp::symmetrized(m)
}
