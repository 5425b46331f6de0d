use num_complex::Complex;

use super::{Experiment, OntModel, PreparedState, ResponseKernel};
use crate::error::{Error, Result};
use crate::linalg::Ket;
use crate::povm::{line_povm, NO, YES};
use crate::scalar::{Real, Tolerances};

/// `|i>` for every `i`, then `(|i>+|j>)/sqrt2` and `(|i>+i|j>)/sqrt2` for `i < j`.
/// Tomographically complete; for a qubit this is `|0>, |1>, |+>, |+i>`.
pub fn canonical_family<T: Real>(dim: usize) -> Vec<Ket<T>> {
    let mut out: Vec<Ket<T>> = (0..dim).map(|i| Ket::basis(dim, i)).collect();
    for i in 0..dim {
        for j in (i + 1)..dim {
            out.push(Ket::superposition(dim, i, j, Complex::new(T::one(), T::zero())));
            out.push(Ket::superposition(dim, i, j, Complex::new(T::zero(), T::one())));
        }
    }
    out
}

/// `C|0>`, `C|1>`, `C(|0>+|1>)/sqrt2`.
pub fn canonical_lines<T: Real>(dim: usize) -> Vec<Ket<T>> {
    assert!(dim >= 2, "canonical lines need dim >= 2");
    vec![
        Ket::basis(dim, 0),
        Ket::basis(dim, 1),
        Ket::superposition(dim, 0, 1, Complex::new(T::one(), T::zero())),
    ]
}

fn line_label(i: usize) -> String {
    format!("line{i}")
}

fn check_family<T: Real>(dim: usize, family: &[Ket<T>]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::validation("family", "state family is empty"));
    }
    for (k, psi) in family.iter().enumerate() {
        if psi.dim() != dim {
            return Err(Error::validation(
                format!("family[{k}]"),
                format!("dim {} differs from {dim}", psi.dim()),
            ));
        }
    }
    Ok(())
}

/// Psi-ontic model: one ontic state per family member, point-mass epistemic
/// states, and Born-rule responses `P_{lambda,g}(1) = |<g|psi_lambda>|^2`.
pub fn make_trivial_model<T: Real>(dim: usize, family: &[Ket<T>], lines: &[Ket<T>]) -> Result<OntModel<T>> {
    check_family(dim, family)?;
    let ontic: Vec<String> = (0..family.len()).map(|k| format!("s{k}")).collect();
    let states = family
        .iter()
        .enumerate()
        .map(|(k, psi)| PreparedState {
            ket: psi.clone(),
            rho: (0..family.len()).map(|l| if l == k { T::one() } else { T::zero() }).collect(),
        })
        .collect();
    let mut experiments = Vec::with_capacity(lines.len());
    for (i, g) in lines.iter().enumerate() {
        let povm = line_povm(g);
        let rows = family.iter().map(|psi| povm.distribution(psi)).collect::<Result<Vec<_>>>()?;
        let response = ResponseKernel::new(povm.outcomes().to_vec(), rows, T::stochastic_tol())?;
        experiments.push(Experiment::new(line_label(i), povm, response)?);
    }
    OntModel::new(dim, ontic, states, experiments, &Tolerances::default())
}

/// Qubit model whose ontic state is a pair `(psi, u)` with bin `u < n_bins`.
/// `rho^psi` is uniform over the bins of `psi`, and line `g` answers "1"
/// exactly when the bin centre `(u + 1/2)/N` lies below `|<g|psi>|^2`, so each
/// prediction is within `1/N` of the Born value.
pub fn make_binned_qubit_model<T: Real>(family: &[Ket<T>], lines: &[Ket<T>], n_bins: usize) -> Result<OntModel<T>> {
    if n_bins == 0 {
        return Err(Error::validation("bins", "need at least one bin"));
    }
    check_family(2, family)?;
    let n = family.len() * n_bins;
    let ontic: Vec<String> = (0..family.len())
        .flat_map(|k| (0..n_bins).map(move |u| format!("s{k}:b{u}")))
        .collect();
    let w = T::one() / T::lit(n_bins as f64);
    let states = family
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            let mut rho = vec![T::zero(); n];
            rho[k * n_bins..(k + 1) * n_bins].iter_mut().for_each(|r| *r = w);
            PreparedState { ket: psi.clone(), rho }
        })
        .collect();
    let mut experiments = Vec::with_capacity(lines.len());
    for (i, g) in lines.iter().enumerate() {
        if g.dim() != 2 {
            return Err(Error::validation(format!("lines[{i}]"), "binned model is a qubit model"));
        }
        let mut rows = Vec::with_capacity(n);
        for psi in family {
            let p = g.overlap(psi)?;
            for u in 0..n_bins {
                let centre = T::lit((u as f64 + 0.5) / n_bins as f64);
                rows.push(if centre < p {
                    vec![T::one(), T::zero()]
                } else {
                    vec![T::zero(), T::one()]
                });
            }
        }
        let response = ResponseKernel::new(vec![YES.to_string(), NO.to_string()], rows, T::stochastic_tol())?;
        experiments.push(Experiment::new(line_label(i), line_povm(g), response)?);
    }
    OntModel::new(2, ontic, states, experiments, &Tolerances::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_model_is_exactly_adequate() {
        let m = make_trivial_model::<f64>(2, &canonical_family(2), &canonical_lines(2)).unwrap();
        assert_eq!(m.n_ontic(), 4);
        let r = m.check_adequacy(1e-9).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.passed);
        assert!(m.check_line_completeness(&canonical_lines(2), 1e-10).unwrap().complete);
    }

    #[test]
    fn single_state_single_line() {
        let psi = Ket::<f64>::from_reals(&[0.6, 0.8]).unwrap();
        let m = make_trivial_model(2, &[psi], &[Ket::basis(2, 0)]).unwrap();
        let row = m.experiments()[0].response.row(0);
        assert!((row[0] - 0.36).abs() < 1e-15 && (row[1] - 0.64).abs() < 1e-15);
        assert!(make_trivial_model::<f64>(2, &[], &[]).is_err());
    }

    #[test]
    fn unreachable_ontic_state_does_not_affect_adequacy() {
        let base = make_trivial_model::<f64>(2, &canonical_family(2), &canonical_lines(2)).unwrap();
        let mut ontic = base.ontic().to_vec();
        ontic.push("ghost".into());
        let states = base
            .states()
            .iter()
            .map(|s| {
                let mut rho = s.rho.clone();
                rho.push(0.0);
                PreparedState { ket: s.ket.clone(), rho }
            })
            .collect();
        let experiments = base
            .experiments()
            .iter()
            .map(|e| {
                let mut rows = e.response.rows().to_vec();
                // Born row of |0> with 0.2 moved onto outcome "1".
                let born = e.povm.distribution(&Ket::basis(2, 0)).unwrap();
                let shift = 0.2f64.min(born[1]);
                rows.push(vec![born[0] + shift, born[1] - shift]);
                Experiment::new(
                    e.label.clone(),
                    e.povm.clone(),
                    ResponseKernel::new(e.response.outcomes().to_vec(), rows, 1e-12).unwrap(),
                )
                .unwrap()
            })
            .collect();
        let m = OntModel::new(2, ontic, states, experiments, &Tolerances::default()).unwrap();
        assert_eq!(m.check_adequacy(1e-9).unwrap().max_deviation, 0.0);
    }

    #[test]
    fn binned_examples() {
        let plus = Ket::<f64>::from_reals(&[1.0, 1.0]).unwrap();
        let m = make_binned_qubit_model(&[plus], &[Ket::basis(2, 0)], 100).unwrap();
        // 50 of the 100 centres lie below 0.5
        assert!((m.predicted(0, &m.experiments()[0], &[YES]).unwrap() - 0.5).abs() < 1e-12);

        let psi = Ket::<f64>::from_reals(&[0.505f64.sqrt(), 0.495f64.sqrt()]).unwrap();
        let m = make_binned_qubit_model(&[psi], &[Ket::basis(2, 0)], 10).unwrap();
        let p = m.predicted(0, &m.experiments()[0], &[YES]).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((m.check_adequacy(1.0).unwrap().max_deviation - 0.005).abs() < 1e-12);

        assert!(make_binned_qubit_model::<f64>(&canonical_family(2), &canonical_lines(2), 0).is_err());
    }

    #[test]
    fn canonical_family_sizes() {
        assert_eq!(canonical_family::<f64>(2).len(), 4);
        assert_eq!(canonical_family::<f64>(3).len(), 9);
        for d in 2..5 {
            crate::linalg::tomographic_completeness(&canonical_family::<f64>(d), d).unwrap();
        }
    }
}
