//! JSON renderings of analysis results.

use serde_json::{json, Value};

use crate::nogo::{
    FeasibilityResult, PsiGReport, SweepReport, Theorem1Report, Theorem1Verdict, Verdict, WitnessReport,
};
use crate::ontomodel::{AdequacyReport, LineReport};
use crate::scalar::Tolerances;
use crate::scenario::{ket_to_json, op_to_json};

pub const TOOL: &str = "ontic";

/// Envelope shared by every report.
pub fn envelope(command: &str, mode: Option<&str>, digest: &str, seed: Option<u64>, tol: &Tolerances<f64>, result: Value) -> Value {
    json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "mode": mode,
        "scenario_digest": digest,
        "seed": seed,
        "tolerances": tolerances(tol),
        "result": result,
    })
}

pub fn tolerances(t: &Tolerances<f64>) -> Value {
    json!({ "eig": t.eig, "norm": t.norm, "adequacy": t.adequacy, "stochastic": t.stochastic })
}

pub fn adequacy(r: &AdequacyReport<f64>) -> Value {
    json!({
        "passed": r.passed,
        "max_deviation": r.max_deviation,
        "sets_checked": r.checked,
        "worst": r.worst.as_ref().map(|w| json!({
            "state": w.state,
            "experiment": w.experiment,
            "outcomes": w.outcomes,
        })),
    })
}

pub fn lines(r: &LineReport) -> Value {
    json!({ "complete": r.complete, "experiments": r.found, "missing": r.missing() })
}

pub fn psi_g(r: &PsiGReport<f64>) -> Value {
    json!({
        "max_deviation": r.max_deviation,
        "worst": r.worst.as_ref().map(|(k, l)| json!({ "state": k, "ontic": l })),
    })
}

pub fn verdict(v: &Verdict) -> Value {
    match v {
        Verdict::Contradiction(s) => json!({ "contradiction": s.name() }),
        Verdict::NoViolation => json!("no_violation"),
    }
}

pub fn witness(r: &WitnessReport<f64>) -> Value {
    json!({
        "verdict": verdict(&r.verdict),
        "max_violation": r.max_violation,
        "max_violation_step": r.max_violation_step.name(),
        "steps": r.steps.iter().map(|s| json!({
            "step": s.step.name(),
            "quantity": s.step.quantity(),
            "value": s.value,
            "violation": s.violation,
            "details": s.details.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "witness": {
            "eigenvalue": r.witness.eigenvalue,
            "eigenvector": ket_to_json(&r.witness.eigenvector),
            "overlap_with_g3": r.witness.overlap_with_g3,
            "union_eigenvalue": r.witness.union_eigenvalue,
        },
        "regions": r.regions.iter().map(|g| json!({
            "line": ket_to_json(&g.line),
            "experiment": g.experiment,
            "members": g.members,
            "eta": g.eta,
        })).collect::<Vec<_>>(),
        "implied_eigenvalue": r.implied_eigenvalue,
        "tomography_missing": r.tomography_missing,
        "floor": r.floor,
        "floor_met": r.floor_met,
        "warnings": r.warnings,
    })
}

pub fn search(r: &FeasibilityResult<f64>) -> Value {
    json!({
        "seed": r.seed,
        "best_restart": r.best_restart,
        "iterations": r.iterations,
        "residual": r.residual,
        "candidate_residual": r.candidate_residual,
        "candidate": {
            "labels": r.candidate.labels(),
            "effects": r.candidate.effects().iter().map(op_to_json).collect::<Vec<_>>(),
        },
        "restarts": r.restarts.iter().map(|x| json!({
            "seed": x.seed,
            "iterations": x.iterations,
            "residual": x.residual,
            "trace": x.trace,
        })).collect::<Vec<_>>(),
        "tomography_missing": r.tomography_missing,
        "warnings": r.warnings,
    })
}

pub fn theorem1(r: &Theorem1Report<f64>) -> Value {
    let verdict = match r.verdict {
        Theorem1Verdict::Contradiction(s) => json!({ "contradiction": s.name() }),
        Theorem1Verdict::RejectedKernel => json!("rejected_kernel"),
        Theorem1Verdict::Degenerate => json!("degenerate"),
        Theorem1Verdict::NoViolation => json!("no_violation"),
    };
    json!({
        "experiment": r.experiment,
        "verdict": verdict,
        "identity_kernel": {
            "passed": r.identity_kernel.passed,
            "max_deviation": r.identity_kernel.max_deviation,
            "location": r.identity_kernel.location.as_ref().map(|(l, o)| json!({ "ontic": l, "outcome": o })),
        },
        "psi_g": r.psi_g.as_ref().map(psi_g),
        "pipeline": r.pipeline.as_ref().map(witness),
        "notes": r.notes,
    })
}

pub fn sweep(r: &SweepReport<f64>) -> Value {
    json!({
        "witness_increasing": r.witness_increasing,
        "residual_positive": r.residual_positive,
        "rows": r.rows.iter().map(|x| json!({
            "eps": x.eps,
            "bins": x.bins,
            "eta": x.eta,
            "adequacy": x.adequacy,
            "residual": x.residual,
            "witness_eigenvalue": x.witness_eigenvalue,
            "union_eigenvalue": x.union_eigenvalue,
            "implied_eigenvalue": x.implied_eigenvalue,
            "max_violation": x.max_violation,
            "first_violated": x.first_violated,
        })).collect::<Vec<_>>(),
    })
}
