//! The no-go engine: proof-step checks on candidate ontic measurements, the
//! end-to-end witness pipeline, a Dykstra feasibility search, the
//! self-measurement reduction and the robustness sweep.
//!
//! Functions that only need the operators `G_lambda` take them as a slice so
//! that partial or non-normalized families (e.g. `G(Lambda_g) = P_g`) can be
//! examined directly.

mod candidate;
mod pipeline;
mod search;
mod sweep;
mod theorem1;

pub use candidate::OnticCandidate;
pub use pipeline::{run_witness_pipeline, StepId, StepRecord, Verdict, WitnessParams, WitnessReport};
pub use search::{feasibility_search, least_squares_candidate, FeasibilityResult, RestartRecord, SearchParams};
pub use sweep::{bins_for, robustness_sweep, SweepParams, SweepReport, SweepRow};
pub use theorem1::{check_theorem1, KernelCheck, Theorem1Report, Theorem1Verdict};

use crate::error::{Error, Result};
use crate::linalg::{HermitianOp, Ket};
use crate::ontomodel::{Experiment, OntModel};
use crate::povm::YES;
use crate::scalar::Real;

/// Slack for the line geometry `g1 _|_ g2`, `g3 ~ (g1 + g2)/sqrt2`.
const GEOMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PsiGReport<T> {
    /// `max_{psi, lambda} |rho^psi(lambda) - <psi|G_lambda|psi>|`.
    pub max_deviation: T,
    /// `(state index, ontic label)` of the maximum.
    pub worst: Option<(usize, String)>,
}

pub(crate) fn check_labels<T: Real>(m: &OntModel<T>, labels: &[String]) -> Result<()> {
    if labels != m.ontic() {
        return Err(Error::validation(
            "candidate.labels",
            "candidate labels do not match the ontic space of the model",
        ));
    }
    Ok(())
}

/// Compares the epistemic states with the quadratic forms of the candidate.
/// Singletons suffice since both sides are additive.
pub fn check_psi_g<T: Real>(m: &OntModel<T>, g: &OnticCandidate<T>) -> Result<PsiGReport<T>> {
    check_labels(m, g.labels())?;
    psi_g_deviation(m, g.effects())
}

pub(crate) fn psi_g_deviation<T: Real>(m: &OntModel<T>, effects: &[HermitianOp<T>]) -> Result<PsiGReport<T>> {
    if effects.len() != m.n_ontic() {
        return Err(Error::validation("candidate.effects", "one effect per ontic state required"));
    }
    let mut max_deviation = T::zero();
    let mut worst = None;
    for (k, s) in m.states().iter().enumerate() {
        for (l, gl) in effects.iter().enumerate() {
            let dev = (s.rho[l] - gl.quadratic_form(&s.ket)?).abs();
            if worst.is_none() || dev > max_deviation {
                max_deviation = max_deviation.max(dev);
                worst = Some((k, m.ontic()[l].clone()));
            }
        }
    }
    Ok(PsiGReport { max_deviation, worst })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AveragedEffect<T> {
    /// `sum_lambda G_lambda P_{lambda,e}(B)`.
    pub op: HermitianOp<T>,
    /// Largest entrywise distance to `E_e(B)`.
    pub deviation: T,
}

pub fn averaged_effect<T: Real, S: AsRef<str>>(
    effects: &[HermitianOp<T>],
    e: &Experiment<T>,
    set: &[S],
) -> Result<AveragedEffect<T>> {
    if effects.len() != e.response.rows().len() {
        return Err(Error::validation("candidate.effects", "one effect per ontic state required"));
    }
    let dim = e.povm.dim();
    let cols = e.response.resolve(set)?;
    let mut op = HermitianOp::zeros(dim);
    for (l, gl) in effects.iter().enumerate() {
        let w = e.response.prob_idx(l, &cols);
        if !w.is_zero() {
            op.add_scaled(gl, w)?;
        }
    }
    let deviation = op.max_abs_diff(&e.povm.effect_of(set)?)?;
    Ok(AveragedEffect { op, deviation })
}

/// `Lambda_g = {lambda : P_{lambda,E(g)}(1) > eta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportRegion<T> {
    pub line: Ket<T>,
    pub experiment: String,
    /// Ontic-state indices, ascending.
    pub members: Vec<usize>,
    pub eta: T,
}

/// Builds `Lambda_g` from the catalog's line experiment for `g`.
pub fn support_region<T: Real>(m: &OntModel<T>, g: &Ket<T>, eta: T, tol: T) -> Result<SupportRegion<T>> {
    support_region_indexed(m, g, 0, eta, tol)
}

pub(crate) fn support_region_indexed<T: Real>(
    m: &OntModel<T>,
    g: &Ket<T>,
    index: usize,
    eta: T,
    tol: T,
) -> Result<SupportRegion<T>> {
    let e = m.line_experiment(g, index, tol)?;
    let col = e.response.outcome_index(YES)?;
    let members = (0..m.n_ontic()).filter(|&l| e.response.row(l)[col] > eta).collect();
    Ok(SupportRegion {
        line: g.clone(),
        experiment: e.label.clone(),
        members,
        eta,
    })
}

/// `G(A) = sum_{lambda in A} G_lambda`.
pub fn region_sum<T: Real>(effects: &[HermitianOp<T>], set: &[usize]) -> Result<HermitianOp<T>> {
    let dim = effects
        .first()
        .map(HermitianOp::dim)
        .ok_or_else(|| Error::validation("candidate.effects", "no effects"))?;
    HermitianOp::sum(dim, set.iter().map(|&l| &effects[l]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorMultipleReport<T> {
    /// Best `c >= 0` in `||G(A) - c P_g||_F`, i.e. `max(0, <g|G(A)|g>)`.
    pub coefficient: T,
    pub distance: T,
    /// `max_{chi _|_ g} <chi|G(A)|chi>`.
    pub leakage: T,
}

pub fn projector_multiple_check<T: Real>(
    effects: &[HermitianOp<T>],
    region: &SupportRegion<T>,
    subset: &[usize],
) -> Result<ProjectorMultipleReport<T>> {
    if let Some(l) = subset.iter().find(|l| region.members.binary_search(l).is_err()) {
        return Err(Error::Precondition(format!(
            "ontic state {l} is not in the support region of line experiment `{}`",
            region.experiment
        )));
    }
    let ga = region_sum(effects, subset)?;
    projector_multiple(&ga, &region.line)
}

pub(crate) fn projector_multiple<T: Real>(ga: &HermitianOp<T>, g: &Ket<T>) -> Result<ProjectorMultipleReport<T>> {
    let pg = HermitianOp::projector(g);
    let coefficient = ga.quadratic_form(g)?.max(T::zero());
    let distance = ga.sub(&pg.scale(coefficient))?.frobenius();
    let perp = HermitianOp::identity(g.dim()).sub(&pg)?;
    let leakage = if g.dim() > 1 {
        ga.compress(&perp)?.eig()?.max()
    } else {
        T::zero()
    };
    Ok(ProjectorMultipleReport {
        coefficient,
        distance,
        leakage,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjointnessReport<T> {
    pub overlap: Vec<usize>,
    /// Operator norm of `G(Lambda_g cap Lambda_h)`.
    pub norm: T,
}

pub fn disjointness_check<T: Real>(
    effects: &[HermitianOp<T>],
    r1: &SupportRegion<T>,
    r2: &SupportRegion<T>,
) -> Result<DisjointnessReport<T>> {
    if r1.line.overlap(&r2.line)? >= T::one() - T::lit(GEOMETRY_TOL).max(T::default_tol()) {
        return Err(Error::Precondition("disjointness needs two different lines".into()));
    }
    let overlap: Vec<usize> = r1.members.iter().copied().filter(|l| r2.members.binary_search(l).is_ok()).collect();
    let norm = if overlap.is_empty() {
        T::zero()
    } else {
        region_sum(effects, &overlap)?.op_norm()?
    };
    Ok(DisjointnessReport { overlap, norm })
}

/// Top of the spectrum of `sum_i G(Lambda_{g_i})`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenWitness<T> {
    pub eigenvalue: T,
    pub eigenvector: Ket<T>,
    /// `|<v|g3>|^2`.
    pub overlap_with_g3: T,
    /// Top eigenvalue of `G(Lambda_{g1} cup Lambda_{g2} cup Lambda_{g3})`, when regions are known.
    pub union_eigenvalue: Option<T>,
}

/// Checks `g1 _|_ g2` and `g3 = (g1 + g2)/sqrt2` up to a global phase.
pub fn check_line_geometry<T: Real>(lines: &[Ket<T>; 3]) -> Result<()> {
    let [g1, g2, g3] = lines;
    let tol = T::lit(GEOMETRY_TOL).max(T::default_tol());
    if g1.dim() != g2.dim() || g1.dim() != g3.dim() {
        return Err(Error::Precondition("lines must share one dimension".into()));
    }
    if g1.overlap(g2)? > tol {
        return Err(Error::Precondition("first two lines must be orthogonal".into()));
    }
    let h = T::lit(0.5).sqrt();
    let sum: Vec<_> = g1
        .amplitudes()
        .iter()
        .zip(g2.amplitudes())
        .map(|(a, b)| (a + b) * h)
        .collect();
    let mid = Ket::with_tol(sum, T::lit(1e-6))?;
    if T::one() - mid.overlap(g3)? > tol {
        return Err(Error::Precondition(
            "third line must be spanned by the equal-weight superposition of the first two".into(),
        ));
    }
    Ok(())
}

/// Spectrum top of `ops[0] + ops[1] + ops[2]`, compared against `g3`.
pub fn eigenvalue_witness_ops<T: Real>(ops: &[HermitianOp<T>; 3], lines: &[Ket<T>; 3]) -> Result<EigenWitness<T>> {
    check_line_geometry(lines)?;
    let total = ops[0].add(&ops[1])?.add(&ops[2])?;
    let eig = total.eig()?;
    let (eigenvalue, v) = eig.top();
    Ok(EigenWitness {
        eigenvalue,
        eigenvector: v.clone(),
        overlap_with_g3: v.overlap(&lines[2])?,
        union_eigenvalue: None,
    })
}

/// [`eigenvalue_witness_ops`] on `G(Lambda_{g_i})`, plus the union eigenvalue.
pub fn eigenvalue_witness<T: Real>(effects: &[HermitianOp<T>], regions: &[SupportRegion<T>; 3]) -> Result<EigenWitness<T>> {
    let lines = [regions[0].line.clone(), regions[1].line.clone(), regions[2].line.clone()];
    let ops = [
        region_sum(effects, &regions[0].members)?,
        region_sum(effects, &regions[1].members)?,
        region_sum(effects, &regions[2].members)?,
    ];
    let mut w = eigenvalue_witness_ops(&ops, &lines)?;
    let mut union: Vec<usize> = regions.iter().flat_map(|r| r.members.iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    w.union_eigenvalue = Some(region_sum(effects, &union)?.eig()?.max());
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontomodel::{canonical_lines, make_trivial_model};

    fn lines() -> [Ket<f64>; 3] {
        let l = canonical_lines(2);
        [l[0].clone(), l[1].clone(), l[2].clone()]
    }

    fn family3() -> Vec<Ket<f64>> {
        vec![Ket::basis(2, 0), Ket::basis(2, 1), Ket::from_reals(&[1.0, 1.0]).unwrap()]
    }

    #[test]
    fn psi_g_examples() {
        let fam = vec![Ket::<f64>::basis(2, 0), Ket::basis(2, 1)];
        let m = make_trivial_model(2, &fam, &canonical_lines(2)).unwrap();
        let g = OnticCandidate::new(
            m.ontic().to_vec(),
            fam.iter().map(HermitianOp::projector).collect(),
            1e-10,
        )
        .unwrap();
        assert_eq!(check_psi_g(&m, &g).unwrap().max_deviation, 0.0);

        // Extend the family by |+>: the candidate needs a third ontic state, given zero weight.
        let m3 = make_trivial_model(2, &family3(), &canonical_lines(2)).unwrap();
        let mut effects: Vec<_> = fam.iter().map(HermitianOp::projector).collect();
        effects.push(HermitianOp::zeros(2));
        let g3 = OnticCandidate::new(m3.ontic().to_vec(), effects, 1e-10).unwrap();
        let r = check_psi_g(&m3, &g3).unwrap();
        assert!(r.max_deviation >= 0.5 - 1e-12);

        let wrong = OnticCandidate::new(vec!["x".into(), "y".into()], g.effects().to_vec(), 1e-10).unwrap();
        assert!(check_psi_g(&m, &wrong).is_err());
    }

    #[test]
    fn psi_g_single_state_identity_slices() {
        let psi = Ket::<f64>::from_reals(&[0.6, 0.8]).unwrap();
        let m = crate::ontomodel::make_binned_qubit_model(&[psi], &[Ket::basis(2, 0)], 4).unwrap();
        let effects: Vec<_> = m.states()[0].rho.iter().map(|&r| HermitianOp::identity(2).scale(r)).collect();
        let g = OnticCandidate::new(m.ontic().to_vec(), effects, 1e-10).unwrap();
        assert_eq!(check_psi_g(&m, &g).unwrap().max_deviation, 0.0);
    }

    #[test]
    fn averaged_effect_examples() {
        let fam = vec![Ket::<f64>::basis(2, 0), Ket::basis(2, 1)];
        let m = make_trivial_model(2, &fam, &canonical_lines(2)).unwrap();
        let effects: Vec<_> = fam.iter().map(HermitianOp::projector).collect();
        let e = &m.experiments()[0];
        let a = averaged_effect(&effects, e, &[YES]).unwrap();
        assert_eq!(a.op, HermitianOp::projector(&Ket::basis(2, 0)));
        assert_eq!(a.deviation, 0.0);
        let all = averaged_effect(&effects, e, &["1", "0"]).unwrap();
        assert_eq!(all.op, HermitianOp::identity(2));
        // line |1>: the |0> state never answers "1", the |1> state always does
        let zero = averaged_effect(&effects[..1].iter().cloned().chain([HermitianOp::zeros(2)]).collect::<Vec<_>>(), &m.experiments()[1], &[YES]).unwrap();
        assert_eq!(zero.op, HermitianOp::zeros(2));
    }

    #[test]
    fn support_region_examples() {
        let m = make_trivial_model(2, &family3(), &canonical_lines(2)).unwrap();
        let g = Ket::basis(2, 0);
        assert_eq!(support_region(&m, &g, 0.0, 1e-10).unwrap().members, vec![0, 2]);
        assert_eq!(support_region(&m, &g, 0.6, 1e-10).unwrap().members, vec![0]);

        let m0 = make_trivial_model(2, &[Ket::<f64>::basis(2, 0)], &[Ket::basis(2, 1)]).unwrap();
        assert!(support_region(&m0, &Ket::basis(2, 1), 0.0, 1e-10).unwrap().members.is_empty());
        assert!(matches!(
            support_region(&m0, &Ket::basis(2, 0), 0.0, 1e-10),
            Err(Error::LineIncomplete { .. })
        ));
    }

    fn region(g: Ket<f64>, members: Vec<usize>) -> SupportRegion<f64> {
        SupportRegion {
            line: g,
            experiment: "e".into(),
            members,
            eta: 0.0,
        }
    }

    #[test]
    fn projector_multiple_examples() {
        let g = Ket::<f64>::basis(2, 0);
        let pg = HermitianOp::projector(&g);
        let pperp = HermitianOp::projector(&Ket::basis(2, 1));
        let effects = vec![pg.scale(0.3), pperp.scale(0.1)];
        let r = projector_multiple_check(&effects, &region(g.clone(), vec![0, 1]), &[0]).unwrap();
        assert!((r.coefficient - 0.3).abs() < 1e-15 && r.leakage.abs() < 1e-15 && r.distance < 1e-15);
        let r = projector_multiple_check(&effects, &region(g.clone(), vec![0, 1]), &[0, 1]).unwrap();
        assert!((r.leakage - 0.1).abs() < 1e-12);
        let r = projector_multiple_check(&effects, &region(g.clone(), vec![0, 1]), &[]).unwrap();
        assert_eq!(r.coefficient, 0.0);
        assert!(projector_multiple_check(&effects, &region(g, vec![0]), &[1]).is_err());
    }

    #[test]
    fn disjointness_examples() {
        let effects = vec![HermitianOp::<f64>::identity(2).scale(0.2), HermitianOp::zeros(2), HermitianOp::identity(2).scale(0.8)];
        let a = region(Ket::basis(2, 0), vec![0, 1]);
        let b = region(Ket::basis(2, 1), vec![2]);
        assert_eq!(disjointness_check(&effects, &a, &b).unwrap().norm, 0.0);
        let c = region(Ket::basis(2, 1), vec![1, 2]);
        assert_eq!(disjointness_check(&effects, &a, &c).unwrap().norm, 0.0);
        let d = region(Ket::basis(2, 1), vec![0, 2]);
        let r = disjointness_check(&effects, &a, &d).unwrap();
        assert!((r.norm - 0.2).abs() < 1e-12);
        assert_eq!(r.norm, disjointness_check(&effects, &d, &a).unwrap().norm);
        assert!(disjointness_check(&effects, &a, &a).is_err());
    }

    #[test]
    fn ideal_sum_has_eigenvalue_two_along_g3() {
        let l = lines();
        let ops = [HermitianOp::projector(&l[0]), HermitianOp::projector(&l[1]), HermitianOp::projector(&l[2])];
        let w = eigenvalue_witness_ops(&ops, &l).unwrap();
        assert!((w.eigenvalue - 2.0).abs() < 1e-10);
        assert!(w.overlap_with_g3 >= 1.0 - 1e-8);

        let two = [ops[0].clone(), ops[1].clone(), HermitianOp::zeros(2)];
        assert!((eigenvalue_witness_ops(&two, &l).unwrap().eigenvalue - 1.0).abs() < 1e-12);

        let regions = [region(l[0].clone(), vec![0]), region(l[1].clone(), vec![1]), region(l[2].clone(), vec![2])];
        let w2 = eigenvalue_witness(&ops, &regions).unwrap();
        assert_eq!(w2.eigenvalue, w.eigenvalue);
        assert_eq!(w2.union_eigenvalue, Some(w.eigenvalue));
    }

    #[test]
    fn geometry_is_checked() {
        let l = lines();
        assert!(check_line_geometry(&[l[0].clone(), l[2].clone(), l[1].clone()]).is_err());
        let minus = Ket::from_reals(&[1.0, -1.0]).unwrap();
        assert!(check_line_geometry(&[l[0].clone(), l[1].clone(), minus]).is_err());
        let phased = Ket::normalized(vec![num_complex::Complex::new(0.0, 1.0), num_complex::Complex::new(0.0, 1.0)]).unwrap();
        check_line_geometry(&[l[0].clone(), l[1].clone(), phased]).unwrap();
    }
}
