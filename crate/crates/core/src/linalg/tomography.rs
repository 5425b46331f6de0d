use super::hvec::{coordinate_label, from_real, real_dim, to_real};
use super::{HermitianOp, Ket};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Operator recovered from quadratic-form samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T> {
    pub op: HermitianOp<T>,
    /// `max_k |<psi_k|R|psi_k> - value_k|`.
    pub residual: T,
}

/// Recovers the Hermitian `R` with `<psi_k|R|psi_k> = value_k` by least squares over
/// the real space of Hermitian matrices (normal equations, full pivoting).
pub fn op_from_quadratic_forms<T: Real>(samples: &[(Ket<T>, T)], dim: usize) -> Result<Reconstruction<T>> {
    let n = real_dim(dim);
    let rows: Vec<Vec<T>> = samples
        .iter()
        .enumerate()
        .map(|(k, (psi, _))| {
            if psi.dim() != dim {
                return Err(Error::validation(
                    format!("samples[{k}]"),
                    format!("ket has dim {}, expected {dim}", psi.dim()),
                ));
            }
            Ok(to_real(&HermitianOp::projector(psi)))
        })
        .collect::<Result<_>>()?;

    let mut normal = vec![vec![T::zero(); n]; n];
    let mut rhs = vec![T::zero(); n];
    for (row, (_, value)) in rows.iter().zip(samples) {
        for i in 0..n {
            rhs[i] += row[i] * *value;
            for j in 0..n {
                normal[i][j] += row[i] * row[j];
            }
        }
    }

    let x = solve_full_pivot(normal, rhs, T::rank_threshold()).map_err(|missing| {
        Error::TomographyIncomplete {
            missing: missing.into_iter().map(|k| coordinate_label(dim, k)).collect(),
        }
    })?;
    let op = from_real(dim, &x);
    let mut residual = T::zero();
    for (psi, value) in samples {
        residual = residual.max((op.quadratic_form(psi)? - *value).abs());
    }
    Ok(Reconstruction { op, residual })
}

/// Checks whether the projectors of `family` span the Hermitian matrices.
pub fn tomographic_completeness<T: Real>(family: &[Ket<T>], dim: usize) -> Result<()> {
    let samples: Vec<_> = family.iter().map(|k| (k.clone(), T::zero())).collect();
    op_from_quadratic_forms(&samples, dim).map(|_| ())
}

/// Gaussian elimination with full pivoting. On rank deficiency returns the
/// indices of the unknowns that received no pivot.
fn solve_full_pivot<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>, threshold: T) -> Result<Vec<T>, Vec<usize>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, v| m.max(v.abs()))
        .max(T::one());
    let mut col_perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, T::zero());
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().skip(k) {
                if v.abs() > best {
                    best = v.abs();
                    pr = i;
                    pc = j;
                }
            }
        }
        if best <= threshold * scale {
            return Err(col_perm[k..].to_vec());
        }
        a.swap(k, pr);
        b.swap(k, pr);
        if pc != k {
            for row in a.iter_mut() {
                row.swap(k, pc);
            }
            col_perm.swap(k, pc);
        }
        let pivot = a[k][k];
        for i in (k + 1)..n {
            let f = a[i][k] / pivot;
            if f.is_zero() {
                continue;
            }
            let (top, bottom) = a.split_at_mut(i);
            for (x, v) in bottom[0][k..n].iter_mut().zip(&top[k][k..n]) {
                *x -= f * *v;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }

    let mut y = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[k][j] * y[j];
        }
        y[k] = s / a[k][k];
    }
    let mut x = vec![T::zero(); n];
    for (k, &c) in col_perm.iter().enumerate() {
        x[c] = y[k];
    }
    Ok(x)
}
