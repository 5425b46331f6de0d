//! Ontological models over finite ontic spaces.
//!
//! The sigma-algebra on the ontic space is the power set, so every measure is a
//! probability vector indexed by ontic-state position.

mod fixtures;

pub use fixtures::{canonical_family, canonical_lines, make_binned_qubit_model, make_trivial_model};

use crate::error::{Error, Result};
use crate::linalg::Ket;
use crate::povm::{line_povm, Povm, NO, YES};
use crate::scalar::{Real, Tolerances};

/// Row-stochastic matrix: one outcome distribution per ontic state.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseKernel<T> {
    outcomes: Vec<String>,
    rows: Vec<Vec<T>>,
}

impl<T: Real> ResponseKernel<T> {
    pub fn new(outcomes: Vec<String>, rows: Vec<Vec<T>>, tol: T) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != outcomes.len() {
                return Err(Error::validation(
                    format!("rows[{i}]"),
                    format!("{} entries for {} outcomes", row.len(), outcomes.len()),
                ));
            }
            check_probability_vector(row, tol).map_err(|m| Error::validation(format!("rows[{i}]"), m))?;
        }
        Ok(Self { outcomes, rows })
    }

    /// `P_{lambda}(B) = 1_{lambda in B}` for outcome labels equal to the ontic labels.
    pub fn identity(labels: &[String]) -> Self {
        let n = labels.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        Self {
            outcomes: labels.to_vec(),
            rows,
        }
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn row(&self, lambda: usize) -> &[T] {
        &self.rows[lambda]
    }

    pub fn outcome_index(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o == label)
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    /// Column indices of `set`, deduplicated.
    pub fn resolve<S: AsRef<str>>(&self, set: &[S]) -> Result<Vec<usize>> {
        let mut idx: Vec<usize> = set.iter().map(|s| self.outcome_index(s.as_ref())).collect::<Result<_>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    /// `P_{lambda}(B)` for resolved column indices.
    pub fn prob_idx(&self, lambda: usize, cols: &[usize]) -> T {
        cols.iter().map(|&c| self.rows[lambda][c]).sum()
    }
}

/// Checks nonnegativity and unit sum; returns a human-readable reason on failure.
pub(crate) fn check_probability_vector<T: Real>(v: &[T], tol: T) -> std::result::Result<(), String> {
    for (j, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(format!("entry {j} is not finite"));
        }
        if x < -tol {
            return Err(format!("entry {j} is negative ({x})"));
        }
    }
    let s: T = v.iter().copied().sum();
    if (s - T::one()).abs() > tol {
        return Err(format!("entries sum to {s}, not 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment<T> {
    pub label: String,
    pub povm: Povm<T>,
    pub response: ResponseKernel<T>,
}

impl<T: Real> Experiment<T> {
    pub fn new(label: impl Into<String>, povm: Povm<T>, response: ResponseKernel<T>) -> Result<Self> {
        let label = label.into();
        let same = povm.len() == response.outcomes().len()
            && povm.outcomes().iter().all(|o| response.outcomes().contains(o));
        if !same {
            return Err(Error::validation(
                "response.outcomes",
                format!(
                    "kernel outcomes {:?} differ from POVM outcomes {:?}",
                    response.outcomes(),
                    povm.outcomes()
                ),
            ));
        }
        Ok(Self { label, povm, response })
    }
}

/// A prepared state with its epistemic distribution over the ontic space.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState<T> {
    pub ket: Ket<T>,
    pub rho: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OntModel<T> {
    dim: usize,
    ontic: Vec<String>,
    states: Vec<PreparedState<T>>,
    experiments: Vec<Experiment<T>>,
}

impl<T: Real> OntModel<T> {
    /// Validates every component; errors carry a field path relative to the model.
    pub fn new(
        dim: usize,
        ontic: Vec<String>,
        states: Vec<PreparedState<T>>,
        experiments: Vec<Experiment<T>>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("dim", "must be positive"));
        }
        if ontic.is_empty() {
            return Err(Error::validation("ontic", "ontic space is empty"));
        }
        for (i, l) in ontic.iter().enumerate() {
            if ontic[..i].contains(l) {
                return Err(Error::validation(format!("ontic[{i}]"), format!("duplicate label `{l}`")));
            }
        }
        for (k, s) in states.iter().enumerate() {
            if s.ket.dim() != dim {
                return Err(Error::validation(
                    format!("states[{k}].ket"),
                    format!("dim {} differs from model dim {dim}", s.ket.dim()),
                ));
            }
            if (s.ket.norm() - T::one()).abs() > tol.norm {
                return Err(Error::validation(format!("states[{k}].ket"), "not normalized"));
            }
            if s.rho.len() != ontic.len() {
                return Err(Error::validation(
                    format!("states[{k}].rho"),
                    format!("{} entries for {} ontic states", s.rho.len(), ontic.len()),
                ));
            }
            check_probability_vector(&s.rho, tol.stochastic)
                .map_err(|m| Error::validation(format!("states[{k}].rho"), m))?;
        }
        for (e, x) in experiments.iter().enumerate() {
            if experiments[..e].iter().any(|y| y.label == x.label) {
                return Err(Error::validation(
                    format!("experiments[{e}].label"),
                    format!("duplicate label `{}`", x.label),
                ));
            }
            if x.povm.dim() != dim {
                return Err(Error::validation(
                    format!("experiments[{e}].povm"),
                    format!("dim {} differs from model dim {dim}", x.povm.dim()),
                ));
            }
            let report = x.povm.validate(tol.eig)?;
            if !report.passed {
                return Err(Error::validation(
                    format!("experiments[{e}].povm"),
                    format!(
                        "not a POVM: sum deviation {}, non-positive effects {:?}",
                        report.sum_deviation, report.offending
                    ),
                ));
            }
            if x.response.rows().len() != ontic.len() {
                return Err(Error::validation(
                    format!("experiments[{e}].response"),
                    format!("{} rows for {} ontic states", x.response.rows().len(), ontic.len()),
                ));
            }
            for (i, row) in x.response.rows().iter().enumerate() {
                check_probability_vector(row, tol.stochastic)
                    .map_err(|m| Error::validation(format!("experiments[{e}].response.rows[{i}]"), m))?;
            }
        }
        Ok(Self {
            dim,
            ontic,
            states,
            experiments,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ontic(&self) -> &[String] {
        &self.ontic
    }

    pub fn n_ontic(&self) -> usize {
        self.ontic.len()
    }

    pub fn states(&self) -> &[PreparedState<T>] {
        &self.states
    }

    pub fn kets(&self) -> Vec<Ket<T>> {
        self.states.iter().map(|s| s.ket.clone()).collect()
    }

    pub fn experiments(&self) -> &[Experiment<T>] {
        &self.experiments
    }

    pub fn experiment(&self, label: &str) -> Result<&Experiment<T>> {
        self.experiments
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| Error::validation("experiment", format!("no experiment labelled `{label}`")))
    }

    pub fn state(&self, k: usize) -> Result<&PreparedState<T>> {
        self.states.get(k).ok_or(Error::UnknownState(k))
    }

    /// Copy of the model with one more experiment appended (validated).
    pub fn with_experiment(&self, e: Experiment<T>, tol: &Tolerances<T>) -> Result<Self> {
        let mut experiments = self.experiments.clone();
        experiments.push(e);
        Self::new(self.dim, self.ontic.clone(), self.states.clone(), experiments, tol)
    }

    /// `sum_lambda rho^psi(lambda) P_{lambda,e}(B)`.
    pub fn predicted<S: AsRef<str>>(&self, state: usize, e: &Experiment<T>, set: &[S]) -> Result<T> {
        let rho = &self.state(state)?.rho;
        let cols = e.response.resolve(set)?;
        Ok(rho
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(l, &r)| r * e.response.prob_idx(l, &cols))
            .sum())
    }

    /// `rho^psi(A)` for a set of ontic-state indices.
    pub fn rho_of(&self, state: usize, set: &[usize]) -> Result<T> {
        let rho = &self.state(state)?.rho;
        Ok(set.iter().map(|&l| rho[l]).sum())
    }

    /// Largest `|predicted - born|` over states, experiments and outcome sets.
    ///
    /// Both sides are additive in the outcome set, so singletons plus the full
    /// outcome set cover every subset.
    pub fn check_adequacy(&self, tol: T) -> Result<AdequacyReport<T>> {
        let mut max_deviation = T::zero();
        let mut worst: Option<AdequacyLocation> = None;
        let mut checked = 0usize;
        for (k, s) in self.states.iter().enumerate() {
            for e in &self.experiments {
                let mut sets: Vec<Vec<String>> = e.povm.outcomes().iter().map(|o| vec![o.clone()]).collect();
                if e.povm.len() > 1 {
                    sets.push(e.povm.outcomes().to_vec());
                }
                for set in sets {
                    let dev = (self.predicted(k, e, &set)? - e.povm.born(&s.ket, &set)?).abs();
                    checked += 1;
                    if worst.is_none() || dev > max_deviation {
                        max_deviation = max_deviation.max(dev);
                        worst = Some(AdequacyLocation {
                            state: k,
                            experiment: e.label.clone(),
                            outcomes: set,
                        });
                    }
                }
            }
        }
        Ok(AdequacyReport {
            max_deviation,
            worst,
            checked,
            passed: max_deviation <= tol,
        })
    }

    /// For each line `g`, the first experiment whose effects match `F_g` entrywise
    /// within `tol` under the given outcome relabelling.
    pub fn check_line_completeness_with(
        &self,
        lines: &[Ket<T>],
        tol: T,
        relabel: impl Fn(&str) -> String,
    ) -> Result<LineReport> {
        let mut found = Vec::with_capacity(lines.len());
        for g in lines {
            if g.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: g.dim(),
                });
            }
            let target = line_povm(g);
            let mut hit = None;
            for e in &self.experiments {
                if e.povm.len() != 2 {
                    continue;
                }
                let mut ok = true;
                for (o, eff) in e.povm.outcomes().iter().zip(e.povm.effects()) {
                    let l = relabel(o);
                    match target.effect(&l) {
                        Ok(t) if eff.max_abs_diff(t)? < tol => {}
                        _ => ok = false,
                    }
                }
                let labels: Vec<String> = e.povm.outcomes().iter().map(|o| relabel(o)).collect();
                if ok && labels.iter().any(|l| l == YES) && labels.iter().any(|l| l == NO) {
                    hit = Some(e.label.clone());
                    break;
                }
            }
            found.push(hit);
        }
        let complete = found.iter().all(Option::is_some);
        Ok(LineReport { found, complete })
    }

    /// Line completeness with outcome labels taken literally.
    pub fn check_line_completeness(&self, lines: &[Ket<T>], tol: T) -> Result<LineReport> {
        self.check_line_completeness_with(lines, tol, str::to_string)
    }

    /// The experiment realizing `F_g`, or a line-incompleteness error naming `index`.
    pub fn line_experiment(&self, g: &Ket<T>, index: usize, tol: T) -> Result<&Experiment<T>> {
        let r = self.check_line_completeness(std::slice::from_ref(g), tol)?;
        match &r.found[0] {
            Some(label) => self.experiment(label),
            None => Err(Error::LineIncomplete { line: index }),
        }
    }

    /// Tomography samples `(psi_k, values(k))` over the registered family.
    pub fn samples_for(&self, values: impl Fn(usize) -> T) -> Vec<(Ket<T>, T)> {
        self.states
            .iter()
            .enumerate()
            .map(|(k, s)| (s.ket.clone(), values(k)))
            .collect()
    }
}

/// Largest adequacy deviation and where it occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct AdequacyReport<T> {
    pub max_deviation: T,
    pub worst: Option<AdequacyLocation>,
    pub checked: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdequacyLocation {
    pub state: usize,
    pub experiment: String,
    pub outcomes: Vec<String>,
}

/// Per-line experiment label, `None` where the catalog has no `F_g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineReport {
    pub found: Vec<Option<String>>,
    pub complete: bool,
}

impl LineReport {
    pub fn missing(&self) -> Vec<usize> {
        self.found
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_none())
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn two_state_model(rows: Vec<Vec<f64>>) -> OntModel<f64> {
        let g = Ket::basis(2, 0);
        let e = Experiment::new(
            "z",
            line_povm(&g),
            ResponseKernel::new(vec![YES.into(), NO.into()], rows, 1e-12).unwrap(),
        )
        .unwrap();
        OntModel::new(
            2,
            vec!["a".into(), "b".into()],
            vec![PreparedState {
                ket: Ket::from_reals(&[1.0, 1.0]).unwrap(),
                rho: vec![0.5, 0.5],
            }],
            vec![e],
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn predicted_examples() {
        let m = two_state_model(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let e = &m.experiments()[0];
        assert_eq!(m.predicted(0, e, &[YES]).unwrap(), 0.5);
        let m = two_state_model(vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(m.predicted(0, &m.experiments()[0], &[YES]).unwrap(), 1.0);
        assert!(matches!(m.predicted(3, &m.experiments()[0], &[YES]), Err(Error::UnknownState(3))));
        assert!(matches!(m.predicted(0, &m.experiments()[0], &["2"]), Err(Error::UnknownOutcome(_))));
    }

    #[test]
    fn kernel_rows_must_be_stochastic() {
        let r = ResponseKernel::<f64>::new(vec!["1".into(), "0".into()], vec![vec![0.5, 0.4]], 1e-12);
        match r {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "rows[0]"),
            other => panic!("{other:?}"),
        }
        assert!(ResponseKernel::<f64>::new(vec!["1".into(), "0".into()], vec![vec![1.1, -0.1]], 1e-12).is_err());
    }

    #[test]
    fn rho_must_be_a_distribution() {
        let r = OntModel::<f64>::new(
            2,
            vec!["a".into(), "b".into()],
            vec![PreparedState {
                ket: Ket::basis(2, 0),
                rho: vec![0.5, 0.6],
            }],
            vec![],
            &tol(),
        );
        match r {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "states[0].rho"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn line_completeness_is_label_sensitive() {
        let g = Ket::<f64>::basis(2, 0);
        let swapped = line_povm(&g).coarse_grain(|o| if o == YES { NO.into() } else { YES.into() }).unwrap();
        let e = Experiment::new("swapped", swapped, ResponseKernel::identity(&[YES.into(), NO.into()])).unwrap();
        let m = OntModel::new(
            2,
            vec![YES.into(), NO.into()],
            vec![],
            vec![e],
            &tol(),
        )
        .unwrap();
        assert!(!m.check_line_completeness(std::slice::from_ref(&g), 1e-10).unwrap().complete);
        let flip = |o: &str| if o == YES { NO.to_string() } else { YES.to_string() };
        assert!(m.check_line_completeness_with(std::slice::from_ref(&g), 1e-10, flip).unwrap().complete);
        assert!(matches!(m.line_experiment(&g, 4, 1e-10), Err(Error::LineIncomplete { line: 4 })));
    }

    #[test]
    fn empty_catalog_misses_every_line() {
        let m = OntModel::<f64>::new(2, vec!["a".into()], vec![], vec![], &tol()).unwrap();
        let r = m.check_line_completeness(&canonical_lines(2), 1e-10).unwrap();
        assert_eq!(r.missing(), vec![0, 1, 2]);
    }
}
