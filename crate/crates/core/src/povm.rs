//! POVMs on finite outcome sets, Born-rule evaluation and the line POVMs `F_g`.

use crate::error::{Error, Result};
use crate::linalg::{HermitianOp, Ket};
use crate::scalar::Real;

/// Outcome label of the "yes" effect `P_g` of a line POVM.
pub const YES: &str = "1";
/// Outcome label of the "no" effect `I - P_g` of a line POVM.
pub const NO: &str = "0";

/// Finite-outcome POVM. Outcome labels are opaque strings kept in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm<T> {
    dim: usize,
    outcomes: Vec<String>,
    effects: Vec<HermitianOp<T>>,
}

/// Per-effect PSD margins and the deviation of the effect sum from the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmReport<T> {
    /// Smallest eigenvalue of each effect.
    pub psd_margins: Vec<T>,
    /// `max_ij |(sum_k E_k - I)_ij|`.
    pub sum_deviation: T,
    /// Outcomes whose effect fails positivity.
    pub offending: Vec<String>,
    pub passed: bool,
}

impl<T: Real> Povm<T> {
    /// Structural constructor: labels unique, one effect per label, common dimension.
    /// Positivity and completeness are reported by [`Povm::validate`].
    pub fn new(outcomes: Vec<String>, effects: Vec<HermitianOp<T>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::validation("outcomes", "POVM needs at least one outcome"));
        }
        if outcomes.len() != effects.len() {
            return Err(Error::validation(
                "effects",
                format!("{} outcomes but {} effects", outcomes.len(), effects.len()),
            ));
        }
        for (i, o) in outcomes.iter().enumerate() {
            if outcomes[..i].contains(o) {
                return Err(Error::validation(format!("outcomes[{i}]"), format!("duplicate label `{o}`")));
            }
        }
        let dim = effects[0].dim();
        for (i, e) in effects.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::validation(
                    format!("effects[{i}]"),
                    format!("dimension {} differs from {dim}", e.dim()),
                ));
            }
        }
        Ok(Self { dim, outcomes, effects })
    }

    /// Builds and validates; fails with the list of offending effects.
    pub fn checked(outcomes: Vec<String>, effects: Vec<HermitianOp<T>>, tol: T) -> Result<Self> {
        let p = Self::new(outcomes, effects)?;
        let report = p.validate(tol)?;
        if !report.passed {
            return Err(Error::validation(
                "effects",
                format!(
                    "not a POVM: sum deviation {}, non-positive effects {:?}",
                    report.sum_deviation, report.offending
                ),
            ));
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[HermitianOp<T>] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o == label)
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    pub fn effect(&self, label: &str) -> Result<&HermitianOp<T>> {
        Ok(&self.effects[self.index_of(label)?])
    }

    pub fn validate(&self, tol: T) -> Result<PovmReport<T>> {
        let mut psd_margins = Vec::with_capacity(self.len());
        let mut offending = Vec::new();
        for (o, e) in self.outcomes.iter().zip(&self.effects) {
            let chk = e.is_psd(tol)?;
            psd_margins.push(chk.min_eigenvalue);
            if !chk.psd {
                offending.push(o.clone());
            }
        }
        let total = HermitianOp::sum(self.dim, &self.effects)?;
        let sum_deviation = total.max_abs_diff(&HermitianOp::identity(self.dim))?;
        let passed = offending.is_empty() && sum_deviation <= tol;
        Ok(PovmReport {
            psd_margins,
            sum_deviation,
            offending,
            passed,
        })
    }

    /// `E(B)` for a set of outcome labels. Duplicates count once.
    pub fn effect_of<S: AsRef<str>>(&self, set: &[S]) -> Result<HermitianOp<T>> {
        let idx = self.resolve(set)?;
        HermitianOp::sum(self.dim, idx.iter().map(|&i| &self.effects[i]))
    }

    /// `<psi|E(B)|psi>`, unclamped.
    pub fn born<S: AsRef<str>>(&self, psi: &Ket<T>, set: &[S]) -> Result<T> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        let mut p = T::zero();
        for i in self.resolve(set)? {
            p += self.effects[i].quadratic_form(psi)?;
        }
        Ok(p)
    }

    /// Born probabilities of every outcome, in outcome order.
    pub fn distribution(&self, psi: &Ket<T>) -> Result<Vec<T>> {
        self.outcomes.iter().map(|o| self.born(psi, &[o])).collect()
    }

    /// Merges outcomes through `relabel`; effects with the same new label are summed.
    pub fn coarse_grain(&self, relabel: impl Fn(&str) -> String) -> Result<Self> {
        let mut outcomes: Vec<String> = Vec::new();
        let mut effects: Vec<HermitianOp<T>> = Vec::new();
        for (o, e) in self.outcomes.iter().zip(&self.effects) {
            let l = relabel(o);
            match outcomes.iter().position(|x| *x == l) {
                Some(k) => effects[k].add_scaled(e, T::one())?,
                None => {
                    outcomes.push(l);
                    effects.push(e.clone());
                }
            }
        }
        Self::new(outcomes, effects)
    }

    fn resolve<S: AsRef<str>>(&self, set: &[S]) -> Result<Vec<usize>> {
        let mut idx: Vec<usize> = set.iter().map(|s| self.index_of(s.as_ref())).collect::<Result<_>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }
}

/// Clamps a raw probability to `[0, 1]` for reporting.
pub fn clamp_probability<T: Real>(p: T) -> T {
    p.max(T::zero()).min(T::one())
}

/// The two-outcome POVM `F_g = {1: P_g, 0: I - P_g}`.
pub fn line_povm<T: Real>(g: &Ket<T>) -> Povm<T> {
    let p = HermitianOp::projector(g);
    let q = HermitianOp::identity(g.dim()).sub(&p).expect("same dimension");
    Povm::new(vec![YES.to_string(), NO.to_string()], vec![p, q]).expect("well-formed line POVM")
}

/// Bloch vector `(psi^dagger sigma_x psi, psi^dagger sigma_y psi, psi^dagger sigma_z psi)`:
/// the Stern-Gerlach orientation whose "up" outcome has effect `P_{C psi}`.
pub fn stern_gerlach_direction<T: Real>(psi: &Ket<T>) -> Result<[T; 3]> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: psi.dim(),
        });
    }
    let a = psi.amplitudes();
    let cross = a[0].conj() * a[1];
    let two = T::lit(2.0);
    Ok([two * cross.re, two * cross.im, a[0].norm_sqr() - a[1].norm_sqr()])
}
