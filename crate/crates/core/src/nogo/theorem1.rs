use super::{check_psi_g, run_witness_pipeline, OnticCandidate, PsiGReport, StepId, Verdict, WitnessParams, WitnessReport};
use crate::error::{Error, Result};
use crate::linalg::Ket;
use crate::ontomodel::OntModel;
use crate::scalar::Real;

/// Result of checking `P_{lambda,G}(B) = 1_{lambda in B}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheck<T> {
    pub passed: bool,
    pub max_deviation: T,
    /// `(ontic label, outcome label)` of the largest deviation.
    pub location: Option<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theorem1Verdict {
    /// The identity kernel holds and the reduced candidate violates `step`.
    Contradiction(StepId),
    /// The response kernel is not the identity: not a self-measurement.
    RejectedKernel,
    /// One ontic state or a one-dimensional system: nothing to refute.
    Degenerate,
    /// The reduction ran but no step was violated.
    NoViolation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report<T> {
    pub experiment: String,
    pub identity_kernel: KernelCheck<T>,
    pub psi_g: Option<PsiGReport<T>>,
    pub pipeline: Option<WitnessReport<T>>,
    pub verdict: Theorem1Verdict,
    pub notes: Vec<String>,
}

/// Checks a claimed self-measurement experiment: its outcome set must be the
/// ontic space and its response kernel the identity. If so its POVM is the
/// candidate `G` and the witness pipeline is run on it.
pub fn check_theorem1<T: Real>(
    m: &OntModel<T>,
    experiment: &str,
    lines: &[Ket<T>; 3],
    params: &WitnessParams<T>,
    kernel_tol: T,
) -> Result<Theorem1Report<T>> {
    let e = m.experiment(experiment)?;
    let outcomes = e.povm.outcomes();
    let same_set = outcomes.len() == m.n_ontic() && m.ontic().iter().all(|l| outcomes.contains(l));
    if !same_set {
        return Err(Error::Precondition(format!(
            "experiment `{experiment}` is not a self-measurement claim: its outcome set differs from the ontic space"
        )));
    }

    let mut max_deviation = T::zero();
    let mut location = None;
    for (l, label) in m.ontic().iter().enumerate() {
        for (j, o) in e.response.outcomes().iter().enumerate() {
            let want = if o == label { T::one() } else { T::zero() };
            let dev = (e.response.row(l)[j] - want).abs();
            if dev > max_deviation {
                max_deviation = dev;
                location = Some((label.clone(), o.clone()));
            }
        }
    }
    let identity_kernel = KernelCheck {
        passed: max_deviation <= kernel_tol,
        max_deviation,
        location,
    };
    if !identity_kernel.passed {
        return Ok(Theorem1Report {
            experiment: experiment.to_string(),
            identity_kernel,
            psi_g: None,
            pipeline: None,
            verdict: Theorem1Verdict::RejectedKernel,
            notes: vec!["response kernel is not the identity kernel; the reduction does not apply".into()],
        });
    }

    if m.n_ontic() < 2 || m.dim() < 2 {
        return Ok(Theorem1Report {
            experiment: experiment.to_string(),
            identity_kernel,
            psi_g: None,
            pipeline: None,
            verdict: Theorem1Verdict::Degenerate,
            notes: vec![
                "degenerate: G(Lambda) = I satisfies every constraint; a contradiction needs Hilbert dimension >= 2 and at least two distinguishable ontic states".into(),
            ],
        });
    }

    let effects = m
        .ontic()
        .iter()
        .map(|l| e.povm.effect(l).cloned())
        .collect::<Result<Vec<_>>>()?;
    let g = OnticCandidate::new(m.ontic().to_vec(), effects, params.line_tol.max(T::default_tol()))?;
    let psi_g = check_psi_g(m, &g)?;
    let pipeline = run_witness_pipeline(m, &g, lines, params)?;
    let verdict = match pipeline.verdict {
        Verdict::Contradiction(s) => Theorem1Verdict::Contradiction(s),
        Verdict::NoViolation => Theorem1Verdict::NoViolation,
    };
    Ok(Theorem1Report {
        experiment: experiment.to_string(),
        identity_kernel,
        psi_g: Some(psi_g),
        pipeline: Some(pipeline),
        verdict,
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianOp;
    use crate::ontomodel::{canonical_family, canonical_lines, make_trivial_model, Experiment, ResponseKernel};
    use crate::povm::Povm;
    use crate::scalar::Tolerances;

    fn lines() -> [Ket<f64>; 3] {
        let l = canonical_lines(2);
        [l[0].clone(), l[1].clone(), l[2].clone()]
    }

    fn with_self_measurement(rows: Option<Vec<Vec<f64>>>) -> OntModel<f64> {
        let m = make_trivial_model(2, &canonical_family::<f64>(2), &canonical_lines(2)).unwrap();
        let labels = m.ontic().to_vec();
        // {P_0, P_1, P_+, P_-} / 2
        let kets = [Ket::basis(2, 0), Ket::basis(2, 1), Ket::from_reals(&[1.0, 1.0]).unwrap(), Ket::from_reals(&[1.0, -1.0]).unwrap()];
        let effects = kets.iter().map(|k| HermitianOp::projector(k).scale(0.5)).collect();
        let povm = Povm::new(labels.clone(), effects).unwrap();
        let kernel = match rows {
            None => ResponseKernel::identity(&labels),
            Some(r) => ResponseKernel::new(labels.clone(), r, 1e-12).unwrap(),
        };
        m.with_experiment(Experiment::new("G", povm, kernel).unwrap(), &Tolerances::default()).unwrap()
    }

    #[test]
    fn identity_kernel_yields_contradiction() {
        let m = with_self_measurement(None);
        let r = check_theorem1(&m, "G", &lines(), &WitnessParams::default(), 1e-12).unwrap();
        assert!(r.identity_kernel.passed);
        assert!(matches!(r.verdict, Theorem1Verdict::Contradiction(_)));
        assert!(r.psi_g.unwrap().max_deviation > 0.1);
    }

    #[test]
    fn broken_kernel_is_rejected_with_location() {
        let mut rows = vec![vec![0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        rows[2] = vec![0.0, 0.1, 0.9, 0.0];
        let m = with_self_measurement(Some(rows));
        let r = check_theorem1(&m, "G", &lines(), &WitnessParams::default(), 1e-12).unwrap();
        assert_eq!(r.verdict, Theorem1Verdict::RejectedKernel);
        assert!(r.pipeline.is_none());
        let (l, o) = r.identity_kernel.location.unwrap();
        assert_eq!(l, "s2");
        assert!(o == "s1" || o == "s2");
    }

    #[test]
    fn wrong_outcome_set_is_not_a_claim() {
        let m = with_self_measurement(None);
        assert!(matches!(
            check_theorem1(&m, "line0", &lines(), &WitnessParams::default(), 1e-12),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn single_ontic_state_is_degenerate() {
        let labels = vec!["only".to_string()];
        let povm = Povm::new(labels.clone(), vec![HermitianOp::<f64>::identity(2)]).unwrap();
        let m = OntModel::new(
            2,
            labels.clone(),
            vec![crate::ontomodel::PreparedState { ket: Ket::basis(2, 0), rho: vec![1.0] }],
            vec![Experiment::new("G", povm, ResponseKernel::identity(&labels)).unwrap()],
            &Tolerances::default(),
        )
        .unwrap();
        let r = check_theorem1(&m, "G", &lines(), &WitnessParams::default(), 1e-12).unwrap();
        assert_eq!(r.verdict, Theorem1Verdict::Degenerate);
        assert!(!r.notes.is_empty());
    }
}
