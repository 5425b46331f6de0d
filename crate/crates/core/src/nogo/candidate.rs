use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianOp};
use crate::scalar::Real;

/// A POVM on the ontic space: one effect `G_lambda` per ontic state.
#[derive(Debug, Clone, PartialEq)]
pub struct OnticCandidate<T> {
    labels: Vec<String>,
    effects: Vec<HermitianOp<T>>,
}

impl<T: Real> OnticCandidate<T> {
    /// Checks positivity of each effect and `sum_lambda G_lambda = I` within `tol`.
    pub fn new(labels: Vec<String>, effects: Vec<HermitianOp<T>>, tol: T) -> Result<Self> {
        if labels.len() != effects.len() {
            return Err(Error::validation(
                "candidate.effects",
                format!("{} labels but {} effects", labels.len(), effects.len()),
            ));
        }
        if effects.is_empty() {
            return Err(Error::validation("candidate.effects", "no effects"));
        }
        let dim = effects[0].dim();
        for (i, g) in effects.iter().enumerate() {
            if g.dim() != dim {
                return Err(Error::validation(
                    format!("candidate.effects[{i}]"),
                    format!("dim {} differs from {dim}", g.dim()),
                ));
            }
            let chk = g.is_psd(tol)?;
            if !chk.psd {
                return Err(Error::validation(
                    format!("candidate.effects[{i}]"),
                    format!("not positive (min eigenvalue {})", chk.min_eigenvalue),
                ));
            }
        }
        let dev = HermitianOp::sum(dim, &effects)?.max_abs_diff(&HermitianOp::identity(dim))?;
        if dev > tol {
            return Err(Error::validation(
                "candidate.effects",
                format!("effects sum to identity only within {dev}"),
            ));
        }
        Ok(Self { labels, effects })
    }

    /// Turns arbitrary Hermitian operators into a candidate: negative parts are
    /// clipped and the result is conjugated by `S^{-1/2}` with `S = sum_lambda G_lambda`.
    /// Directions where `S` vanishes are shared evenly.
    pub fn normalized(labels: Vec<String>, raw: &[HermitianOp<T>]) -> Result<Self> {
        if raw.is_empty() || labels.len() != raw.len() {
            return Err(Error::validation("candidate.effects", "label/effect count mismatch"));
        }
        let dim = raw[0].dim();
        let clipped = raw.iter().map(HermitianOp::psd_part).collect::<Result<Vec<_>>>()?;
        let s = HermitianOp::sum(dim, &clipped)?;
        let eig = s.eig()?;
        let cutoff = T::rank_threshold() * T::one().max(eig.max());
        let mut w = CMatrix::zeros(dim, dim);
        let mut kernel = HermitianOp::zeros(dim);
        for (lam, v) in eig.values.iter().zip(&eig.vectors) {
            if *lam > cutoff {
                w = w.add(HermitianOp::outer(v, lam.sqrt().recip()).matrix())?;
            } else {
                kernel.add_scaled(&HermitianOp::projector(v), T::one())?;
            }
        }
        let share = kernel.scale(T::one() / T::lit(raw.len() as f64));
        let effects = clipped
            .iter()
            .map(|g| g.congruence(&w)?.add(&share))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { labels, effects })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn effects(&self) -> &[HermitianOp<T>] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}
