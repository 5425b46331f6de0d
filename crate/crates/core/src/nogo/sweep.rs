use super::{feasibility_search, run_witness_pipeline, SearchParams, WitnessParams};
use crate::error::{Error, Result};
use crate::linalg::Ket;
use crate::ontomodel::{make_binned_qubit_model, make_trivial_model, OntModel};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams<T> {
    pub family: Vec<Ket<T>>,
    pub lines: [Ket<T>; 3],
    /// Adequacy levels; `0` selects the exact (trivial) model.
    pub eps: Vec<T>,
    pub search: SearchParams<T>,
    pub witness: WitnessParams<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub eps: T,
    /// Bin count `ceil(1/eps)`; `None` for the exact model.
    pub bins: Option<usize>,
    /// Support threshold used (`eps`).
    pub eta: T,
    pub adequacy: T,
    pub residual: T,
    /// Witness eigenvalue `lambda_max(sum_g G(Lambda_g))` of the best candidate.
    pub witness_eigenvalue: T,
    pub union_eigenvalue: Option<T>,
    /// Same eigenvalue for the operators implied by the model statistics.
    pub implied_eigenvalue: Option<T>,
    pub max_violation: T,
    pub first_violated: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport<T> {
    /// One row per grid point, in grid order.
    pub rows: Vec<SweepRow<T>>,
    /// Witness eigenvalues strictly increase as `eps` decreases.
    pub witness_increasing: bool,
    /// Every residual is strictly positive.
    pub residual_positive: bool,
}

/// Bin count for adequacy level `eps`.
pub fn bins_for<T: Real>(eps: T) -> usize {
    let inv = (T::one() / eps).to_f64().unwrap_or(f64::INFINITY);
    // `1/0.1` may land a few ulps above 10
    (inv * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn model_for<T: Real>(p: &SweepParams<T>, eps: T) -> Result<(OntModel<T>, Option<usize>)> {
    if eps.is_zero() {
        let dim = p.lines[0].dim();
        Ok((make_trivial_model(dim, &p.family, &p.lines)?, None))
    } else {
        let n = bins_for(eps);
        Ok((make_binned_qubit_model(&p.family, &p.lines, n)?, Some(n)))
    }
}

/// For each `eps`, builds the `eps`-adequate model, searches for a candidate and
/// replays the witness pipeline on it with support threshold `eta = eps`.
pub fn robustness_sweep<T: Real>(p: &SweepParams<T>) -> Result<SweepReport<T>> {
    if p.eps.is_empty() {
        return Err(Error::validation("eps", "empty grid"));
    }
    let mut rows = Vec::with_capacity(p.eps.len());
    for (i, &eps) in p.eps.iter().enumerate() {
        if !(eps >= T::zero() && eps < T::one()) {
            return Err(Error::validation(format!("eps[{i}]"), "must lie in [0, 1)"));
        }
        let (m, bins) = model_for(p, eps)?;
        let adequacy = m.check_adequacy(T::one())?.max_deviation;
        let found = feasibility_search(&m, &p.search)?;
        let wp = WitnessParams { eta: eps, ..p.witness };
        let report = run_witness_pipeline(&m, &found.candidate, &p.lines, &wp)?;
        rows.push(SweepRow {
            eps,
            bins,
            eta: eps,
            adequacy,
            residual: found.residual,
            witness_eigenvalue: report.witness.eigenvalue,
            union_eigenvalue: report.witness.union_eigenvalue,
            implied_eigenvalue: report.implied_eigenvalue,
            max_violation: report.max_violation,
            first_violated: match report.verdict {
                super::Verdict::Contradiction(s) => Some(s.name()),
                super::Verdict::NoViolation => None,
            },
        });
    }
    let mut order: Vec<&SweepRow<T>> = rows.iter().collect();
    order.sort_by(|a, b| b.eps.partial_cmp(&a.eps).expect("finite eps"));
    let witness_increasing = order.windows(2).all(|w| w[1].witness_eigenvalue > w[0].witness_eigenvalue);
    let residual_positive = rows.iter().all(|r| r.residual > T::zero());
    Ok(SweepReport {
        rows,
        witness_increasing,
        residual_positive,
    })
}
