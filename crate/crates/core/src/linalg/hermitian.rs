use std::ops::Index;

use num_complex::Complex;
use num_traits::Zero;

use super::eigen::{eig_hermitian, EigenDecomposition};
use super::{CMatrix, Ket};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense Hermitian operator. Exact Hermitian symmetry is restored at
/// construction; inputs further than `T::asymmetry_limit()` from Hermitian
/// are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp<T> {
    m: CMatrix<T>,
}

/// Outcome of a positivity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck<T> {
    pub min_eigenvalue: T,
    pub psd: bool,
}

impl<T: Real> HermitianOp<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        m.check_finite()?;
        let asym = m.hermitian_asymmetry();
        if asym > T::asymmetry_limit() * T::one().max(m.max_abs()) {
            return Err(Error::NotHermitian {
                asymmetry: asym.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self::symmetrized(m))
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        Self::new(CMatrix::from_rows(rows)?)
    }

    /// Real symmetric input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
                .collect(),
        )
    }

    /// `(M + M^dagger) / 2` without a tolerance check.
    pub(crate) fn symmetrized(m: CMatrix<T>) -> Self {
        let n = m.rows();
        let half = T::lit(0.5);
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = Complex::new(m[(i, i)].re, T::zero());
            for j in (i + 1)..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * half;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Self { m: out }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim),
        }
    }

    /// Rank-one projector `|v><v|`. `v` is a [`Ket`] and therefore already unit.
    pub fn projector(v: &Ket<T>) -> Self {
        Self::outer(v, T::one())
    }

    /// `weight |v><v|`.
    pub fn outer(v: &Ket<T>, weight: T) -> Self {
        let a = v.amplitudes();
        Self::symmetrized(CMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj() * weight))
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other,
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs.dim())?;
        Ok(Self::symmetrized(self.m.add(&rhs.m)?))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs.dim())?;
        Ok(Self::symmetrized(self.m.sub(&rhs.m)?))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            m: self.m.scale(Complex::new(s, T::zero())),
        }
    }

    /// `self + s * rhs`, in place.
    pub fn add_scaled(&mut self, rhs: &Self, s: T) -> Result<()> {
        self.check_dim(rhs.dim())?;
        if s.is_zero() {
            return Ok(());
        }
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                self.m[(i, j)] += rhs.m[(i, j)] * s;
            }
        }
        Ok(())
    }

    /// Sum of a non-empty or explicitly sized collection.
    pub fn sum<'a, I>(dim: usize, ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        let mut acc = Self::zeros(dim);
        for op in ops {
            acc.add_scaled(op, T::one())?;
        }
        Ok(acc)
    }

    /// `<psi|H|psi>`; the imaginary residue is checked against `T::default_tol()`.
    pub fn quadratic_form(&self, psi: &Ket<T>) -> Result<T> {
        self.check_dim(psi.dim())?;
        let a = psi.amplitudes();
        let mut acc = Complex::<T>::zero();
        for i in 0..a.len() {
            let mut row = Complex::<T>::zero();
            for (j, aj) in a.iter().enumerate() {
                row += self.m[(i, j)] * *aj;
            }
            acc += a[i].conj() * row;
        }
        let scale = T::one().max(self.m.max_abs());
        if acc.im.abs() > T::default_tol() * scale {
            return Err(Error::Numerical(format!(
                "quadratic form has imaginary residue {}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.m.mul_vec(v)
    }

    pub fn eig(&self) -> Result<EigenDecomposition<T>> {
        eig_hermitian(self)
    }

    pub fn is_psd(&self, tol: T) -> Result<PsdCheck<T>> {
        let min = self.eig()?.min();
        Ok(PsdCheck {
            min_eigenvalue: min,
            psd: min >= -tol,
        })
    }

    /// Spectral norm (largest eigenvalue modulus).
    pub fn op_norm(&self) -> Result<T> {
        let e = self.eig()?;
        Ok(e.max().abs().max(e.min().abs()))
    }

    pub fn max_abs(&self) -> T {
        self.m.max_abs()
    }

    pub fn frobenius(&self) -> T {
        self.m.frobenius()
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_dim(other.dim())?;
        Ok(self.m.sub(&other.m)?.max_abs())
    }

    /// `P H P` for a Hermitian `P`.
    pub fn compress(&self, p: &Self) -> Result<Self> {
        self.check_dim(p.dim())?;
        Ok(Self::symmetrized(p.m.matmul(&self.m)?.matmul(&p.m)?))
    }

    /// `A H A^dagger` for a general square `A`.
    pub fn congruence(&self, a: &CMatrix<T>) -> Result<Self> {
        self.check_dim(a.cols())?;
        Ok(Self::symmetrized(a.matmul(&self.m)?.matmul(&a.adjoint())?))
    }

    /// Applies `f` to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let e = self.eig()?;
        let mut acc = Self::zeros(self.dim());
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            acc.add_scaled(&Self::projector(v), f(*lam))?;
        }
        Ok(acc)
    }

    /// Nearest PSD operator in Frobenius norm (negative eigenvalues clipped).
    pub fn psd_part(&self) -> Result<Self> {
        self.map_spectrum(|x| x.max(T::zero()))
    }
}

impl<T> Index<(usize, usize)> for HermitianOp<T> {
    type Output = Complex<T>;
    fn index(&self, idx: (usize, usize)) -> &Complex<T> {
        &self.m[idx]
    }
}
