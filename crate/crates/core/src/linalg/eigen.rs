use num_complex::Complex;
use num_traits::Zero;

use super::{CMatrix, HermitianOp, Ket};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Spectrum of a Hermitian operator, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Ket<T>>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn max(&self) -> T {
        self.values[0]
    }

    pub fn min(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    /// Largest eigenvalue with its eigenvector.
    pub fn top(&self) -> (T, &Ket<T>) {
        (self.values[0], &self.vectors[0])
    }

    /// `sum_k lambda_k |v_k><v_k|`.
    pub fn reconstruct(&self) -> HermitianOp<T> {
        let dim = self.vectors[0].dim();
        let mut acc = HermitianOp::zeros(dim);
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            acc.add_scaled(&HermitianOp::projector(v), *lam)
                .expect("eigenvectors share dimension");
        }
        acc
    }
}

/// Cyclic Jacobi eigensolver for small dense Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the real symmetric Jacobi rotation. Sweeps repeat
/// until the off-diagonal Frobenius mass is within a few ulps of the matrix
/// norm, or stops decreasing once it is below `T::default_tol()`.
pub fn eig_hermitian<T: Real>(h: &HermitianOp<T>) -> Result<EigenDecomposition<T>> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::validation("operator", "empty operator"));
    }
    let mut a = h.matrix().clone();
    let mut v = CMatrix::<T>::identity(n);
    let threshold = T::epsilon() * T::lit(4.0 * n as f64) * a.frobenius();

    let mut converged = false;
    let mut previous = T::infinity();
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal(&a);
        if off <= threshold || (off >= previous && off < T::default_tol()) {
            converged = true;
            break;
        }
        previous = off;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal(&a) >= T::default_tol() {
        return Err(Error::Numerical(format!(
            "Jacobi sweeps did not converge (off-diagonal mass {})",
            off_diagonal(&a)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = order
        .iter()
        .map(|&k| Ket::normalized((0..n).map(|i| v[(i, k)]).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let zeta = (beta - alpha) / (T::lit(2.0) * r);
    let t = if zeta >= T::zero() {
        T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
    } else {
        -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // U = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
    let e = phase.conj();
    let u00 = Complex::new(c, T::zero());
    let u01 = Complex::new(s, T::zero());
    let u10 = e * (-s);
    let u11 = e * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u00 + akq * u10;
        a[(k, q)] = akp * u01 + akq * u11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
        a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u00 + vkq * u10;
        v[(k, q)] = vkp * u01 + vkq * u11;
    }
}
