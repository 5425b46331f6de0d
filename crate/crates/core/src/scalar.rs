use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real scalar the operator algebra is built over.
///
/// Each precision carries its own default working tolerance: the checks in
/// this crate compare against it whenever a caller does not supply one.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Default eigen/normalization tolerance.
    fn default_tol() -> Self;

    /// Largest Hermitian asymmetry silently symmetrized away at construction.
    fn asymmetry_limit() -> Self;

    /// Pivot threshold for rank decisions in small dense solves.
    fn rank_threshold() -> Self;

    /// Row-sum slack for probability vectors.
    fn stochastic_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-10
    }
    fn asymmetry_limit() -> Self {
        1e-8
    }
    fn rank_threshold() -> Self {
        1e-8
    }
    fn stochastic_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-4
    }
    fn asymmetry_limit() -> Self {
        1e-4
    }
    fn rank_threshold() -> Self {
        1e-4
    }
    fn stochastic_tol() -> Self {
        1e-6
    }
}

/// Working tolerances for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Eigen-solver convergence, PSD slack and effect-sum slack.
    pub eig: T,
    /// Ket normalization slack.
    pub norm: T,
    /// Maximum admissible deviation in empirical-adequacy checks.
    pub adequacy: T,
    /// Row-sum slack for probability vectors and response kernels.
    pub stochastic: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let base = T::default_tol();
        Self {
            eig: base,
            norm: base,
            adequacy: base * T::lit(10.0),
            stochastic: T::stochastic_tol(),
        }
    }
}

impl<T: Real> Tolerances<T> {
    /// Replaces the eigen and normalization tolerances, keeping the rest.
    pub fn with_eig(mut self, tol: T) -> Self {
        self.eig = tol;
        self.norm = tol;
        self
    }
}
