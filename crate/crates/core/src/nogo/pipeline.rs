use super::{
    check_labels, check_line_geometry, disjointness_check, eigenvalue_witness, projector_multiple, psi_g_deviation,
    region_sum, support_region_indexed, averaged_effect, EigenWitness, OnticCandidate, SupportRegion,
};
use crate::error::{Error, Result};
use crate::linalg::{op_from_quadratic_forms, tomographic_completeness, HermitianOp, Ket};
use crate::ontomodel::OntModel;
use crate::povm::YES;
use crate::scalar::Real;

/// The proof steps, in the order they are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepId {
    PsiG,
    AveragedEffect,
    RegionDominance,
    ProjectorMultiple,
    Disjointness,
    EigenvalueWitness,
}

impl StepId {
    pub const ALL: [StepId; 6] = [
        StepId::PsiG,
        StepId::AveragedEffect,
        StepId::RegionDominance,
        StepId::ProjectorMultiple,
        StepId::Disjointness,
        StepId::EigenvalueWitness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StepId::PsiG => "psi_g",
            StepId::AveragedEffect => "averaged_effect",
            StepId::RegionDominance => "region_dominance",
            StepId::ProjectorMultiple => "projector_multiple",
            StepId::Disjointness => "disjointness",
            StepId::EigenvalueWitness => "eigenvalue_witness",
        }
    }

    pub fn quantity(self) -> &'static str {
        match self {
            StepId::PsiG => "max |rho^psi(lambda) - <psi|G_lambda|psi>|",
            StepId::AveragedEffect => "max_g max_ij |(sum_lambda G_lambda P_lambda,g(1) - P_g)_ij|",
            StepId::RegionDominance => "max_g max(0, -lambda_min(G(Lambda_g) - P_g))",
            StepId::ProjectorMultiple => "max_g lambda_max((I - P_g) G(Lambda_g) (I - P_g))",
            StepId::Disjointness => "max_{g != h} ||G(Lambda_g cap Lambda_h)||",
            StepId::EigenvalueWitness => "max(0, lambda_max(sum_g G(Lambda_g)) - 1)",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub step: StepId,
    /// Aggregate value of the step's quantity (may be signed, e.g. a margin).
    pub value: T,
    /// Nonnegative amount by which the step's exact requirement fails.
    pub violation: T,
    /// Named per-line or per-pair components.
    pub details: Vec<(String, T)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// The first step whose violation exceeds the tolerance.
    Contradiction(StepId),
    /// No step exceeds the tolerance.
    NoViolation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessParams<T> {
    /// Support threshold for `Lambda_g`.
    pub eta: T,
    /// A step counts as violated above this value.
    pub violation_tol: T,
    /// Entrywise slack when matching catalog experiments to `F_g`.
    pub line_tol: T,
    /// Calibrated lower bound on the largest violation, when known.
    pub floor: Option<T>,
}

impl<T: Real> Default for WitnessParams<T> {
    fn default() -> Self {
        Self {
            eta: T::zero(),
            violation_tol: T::lit(1e-8).max(T::default_tol()),
            line_tol: T::default_tol(),
            floor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport<T> {
    pub steps: Vec<StepRecord<T>>,
    pub verdict: Verdict,
    pub max_violation: T,
    pub max_violation_step: StepId,
    pub witness: EigenWitness<T>,
    pub regions: Vec<SupportRegion<T>>,
    /// `lambda_max(sum_g R_g)`, where `R_g` is reconstructed from `rho^psi(Lambda_g)`
    /// over the registered family; absent when the family is not tomographically complete.
    pub implied_eigenvalue: Option<T>,
    /// Hermitian directions the family fails to determine (empty when complete).
    pub tomography_missing: Vec<String>,
    pub warnings: Vec<String>,
    pub floor: Option<T>,
    pub floor_met: Option<bool>,
}

impl<T: Real> WitnessReport<T> {
    pub fn step(&self, id: StepId) -> &StepRecord<T> {
        self.steps.iter().find(|s| s.step == id).expect("every step is recorded")
    }
}

fn max_of<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter().fold(T::zero(), |a, b| a.max(b))
}

/// Replays the impossibility argument on `g` step by step and reports every
/// quantity, the first violated step and the largest violation.
pub fn run_witness_pipeline<T: Real>(
    m: &OntModel<T>,
    g: &OnticCandidate<T>,
    lines: &[Ket<T>; 3],
    params: &WitnessParams<T>,
) -> Result<WitnessReport<T>> {
    check_labels(m, g.labels())?;
    check_line_geometry(lines)?;
    if lines[0].dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: lines[0].dim(),
        });
    }
    let effects = g.effects();
    let dim = m.dim();
    let mut warnings = Vec::new();

    let experiments = lines
        .iter()
        .enumerate()
        .map(|(i, line)| m.line_experiment(line, i, params.line_tol))
        .collect::<Result<Vec<_>>>()?;
    let regions = lines
        .iter()
        .enumerate()
        .map(|(i, line)| support_region_indexed(m, line, i, params.eta, params.line_tol))
        .collect::<Result<Vec<_>>>()?;
    let tomography_missing = match tomographic_completeness(&m.kets(), dim) {
        Ok(()) => Vec::new(),
        Err(Error::TomographyIncomplete { missing }) => {
            warnings.push(format!(
                "state family is not tomographically complete (missing {}); operator identities are checked only on the family",
                missing.join(", ")
            ));
            missing
        }
        Err(e) => return Err(e),
    };
    let projectors: Vec<HermitianOp<T>> = lines.iter().map(HermitianOp::projector).collect();

    let mut steps = Vec::with_capacity(6);

    let psi = psi_g_deviation(m, effects)?;
    steps.push(StepRecord {
        step: StepId::PsiG,
        value: psi.max_deviation,
        violation: psi.max_deviation,
        details: Vec::new(),
    });

    let mut details = Vec::new();
    let mut devs = Vec::new();
    for (i, e) in experiments.iter().enumerate() {
        let a = averaged_effect(effects, e, &[YES])?;
        details.push((format!("g{}", i + 1), a.deviation));
        devs.push(a.deviation);
        if tomography_missing.is_empty() {
            let samples: Vec<_> = (0..m.states().len())
                .map(|k| Ok((m.states()[k].ket.clone(), m.predicted(k, e, &[YES])?)))
                .collect::<Result<_>>()?;
            let rec = op_from_quadratic_forms(&samples, dim)?;
            details.push((format!("g{}.statistics", i + 1), rec.op.max_abs_diff(&projectors[i])?));
        }
    }
    let v = max_of(devs);
    steps.push(StepRecord {
        step: StepId::AveragedEffect,
        value: v,
        violation: v,
        details,
    });

    let region_ops = regions
        .iter()
        .map(|r| region_sum(effects, &r.members))
        .collect::<Result<Vec<_>>>()?;

    let mut details = Vec::new();
    let mut margin = None::<T>;
    for (i, (op, p)) in region_ops.iter().zip(&projectors).enumerate() {
        let mi = op.sub(p)?.eig()?.min();
        details.push((format!("g{}", i + 1), mi));
        margin = Some(margin.map_or(mi, |x| x.min(mi)));
    }
    let margin = margin.unwrap_or_else(T::zero);
    steps.push(StepRecord {
        step: StepId::RegionDominance,
        value: margin,
        violation: (-margin).max(T::zero()),
        details,
    });

    let mut details = Vec::new();
    let mut leaks = Vec::new();
    for (i, (op, line)) in region_ops.iter().zip(lines).enumerate() {
        let r = projector_multiple(op, line)?;
        details.push((format!("g{}.leakage", i + 1), r.leakage));
        details.push((format!("g{}.coefficient", i + 1), r.coefficient));
        leaks.push(r.leakage);
    }
    let v = max_of(leaks);
    steps.push(StepRecord {
        step: StepId::ProjectorMultiple,
        value: v,
        violation: v.max(T::zero()),
        details,
    });

    let mut details = Vec::new();
    let mut norms = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = disjointness_check(effects, &regions[i], &regions[j])?;
        details.push((format!("g{}*g{}", i + 1, j + 1), d.norm));
        norms.push(d.norm);
    }
    let v = max_of(norms);
    steps.push(StepRecord {
        step: StepId::Disjointness,
        value: v,
        violation: v,
        details,
    });

    let region_arr = [regions[0].clone(), regions[1].clone(), regions[2].clone()];
    let witness = eigenvalue_witness(effects, &region_arr)?;
    let mut details = vec![("overlap_with_g3".to_string(), witness.overlap_with_g3)];
    if let Some(u) = witness.union_eigenvalue {
        details.push(("union_eigenvalue".to_string(), u));
    }
    steps.push(StepRecord {
        step: StepId::EigenvalueWitness,
        value: witness.eigenvalue,
        violation: (witness.eigenvalue - T::one()).max(T::zero()),
        details,
    });

    let implied_eigenvalue = if tomography_missing.is_empty() {
        let mut total = HermitianOp::zeros(dim);
        for r in &regions {
            let samples: Vec<_> = (0..m.states().len())
                .map(|k| Ok((m.states()[k].ket.clone(), m.rho_of(k, &r.members)?)))
                .collect::<Result<_>>()?;
            total.add_scaled(&op_from_quadratic_forms(&samples, dim)?.op, T::one())?;
        }
        Some(total.eig()?.max())
    } else {
        None
    };

    let first = steps.iter().find(|s| s.violation > params.violation_tol).map(|s| s.step);
    let (max_violation, max_violation_step) = steps
        .iter()
        .fold((T::zero(), StepId::PsiG), |(v, id), s| if s.violation > v { (s.violation, s.step) } else { (v, id) });
    let verdict = match first {
        Some(step) => Verdict::Contradiction(step),
        None => Verdict::NoViolation,
    };
    if verdict == Verdict::NoViolation {
        warnings.push("no proof step is violated: the preconditions of the impossibility argument do not hold for this model".into());
    }
    Ok(WitnessReport {
        steps,
        verdict,
        max_violation,
        max_violation_step,
        witness,
        regions,
        implied_eigenvalue,
        tomography_missing,
        warnings,
        floor: params.floor,
        floor_met: params.floor.map(|f| max_violation >= f),
    })
}
