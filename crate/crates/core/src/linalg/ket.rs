use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unit vector in a finite-dimensional complex Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> Ket<T> {
    /// Wraps amplitudes that are already normalized within `T::default_tol()`.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        Self::with_tol(amplitudes, T::default_tol())
    }

    pub fn with_tol(amplitudes: Vec<Complex<T>>, tol: T) -> Result<Self> {
        check_amplitudes(&amplitudes)?;
        let norm = l2(&amplitudes);
        if (norm - T::one()).abs() > tol {
            return Err(Error::NotNormalized {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_amplitudes(&amplitudes)?;
        let norm = l2(&amplitudes);
        if norm <= T::epsilon() {
            return Err(Error::NotNormalized {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        let inv = norm.recip();
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z * inv).collect(),
        })
    }

    /// Normalizes real amplitudes.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::normalized(values.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amplitudes = vec![Complex::zero(); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    /// `(|i> + phase |j>) / sqrt(2)`.
    pub fn superposition(dim: usize, i: usize, j: usize, phase: Complex<T>) -> Self {
        assert!(i != j && i < dim && j < dim);
        let h = T::lit(0.5).sqrt();
        let mut amplitudes = vec![Complex::zero(); dim];
        amplitudes[i] = Complex::new(h, T::zero());
        amplitudes[j] = phase * h;
        Self { amplitudes }
    }

    /// Haar-random unit vector from normalized complex Gaussians.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let amps: Vec<Complex<T>> = (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(T::lit(re), T::lit(im))
                })
                .collect();
            if let Ok(k) = Self::normalized(amps) {
                return k;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        l2(&self.amplitudes)
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self (x) other`, system-major ordering.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }
}

fn l2<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

fn check_amplitudes<T: Real>(v: &[Complex<T>]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::validation("ket", "empty amplitude list"));
    }
    for (i, z) in v.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(format!("amplitude[{i}]")));
        }
    }
    Ok(())
}
