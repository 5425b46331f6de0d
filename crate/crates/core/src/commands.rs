//! Scenario-level commands behind the `ontic` binary.

use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::tomographic_completeness;
use crate::nogo::{
    check_theorem1, feasibility_search, least_squares_candidate, robustness_sweep, run_witness_pipeline,
    SearchParams, SweepParams, Theorem1Verdict, Verdict, WitnessParams,
};
use crate::report;
use crate::scalar::Tolerances;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Witness,
    Search,
    Theorem1,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Witness => "witness",
            Mode::Search => "search",
            Mode::Theorem1 => "theorem1",
            Mode::Sweep => "sweep",
        }
    }
}

/// Command-line overrides of the scenario's run block.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub max_iter: Option<usize>,
    pub eta: Option<f64>,
}

/// Report, one-line summary and exit code of a finished command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
    pub report: Value,
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::validation("", format!("cannot read {}: {e}", path.display())))?;
    Scenario::from_json(&text)
}

pub fn tolerances(s: &Scenario, ov: &Overrides) -> Result<Tolerances<f64>> {
    let tol = ov.tol.unwrap_or(s.run.tol);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::validation("run.tol", "must be positive and finite"));
    }
    let mut t = Tolerances::default().with_eig(tol);
    t.adequacy = 10.0 * tol;
    Ok(t)
}

/// Error report with the same envelope as successful runs.
pub fn error_report(command: &str, e: &Error) -> Value {
    let path = match e {
        Error::Validation { path, .. } => Some(path.clone()),
        _ => None,
    };
    json!({
        "tool": report::TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "error": { "exit_code": e.exit_code(), "message": e.to_string(), "path": path },
    })
}

pub fn validate(s: &Scenario, ov: &Overrides) -> Result<Outcome> {
    let tol = tolerances(s, ov)?;
    let built = s.build(&tol)?;
    let m = &built.model;
    let line_report = m.check_line_completeness(&built.lines, tol.eig)?;
    let kets = m.kets();
    let tomography = match tomographic_completeness(&kets, m.dim()) {
        Ok(()) => Vec::new(),
        Err(Error::TomographyIncomplete { missing }) => missing,
        Err(e) => return Err(e),
    };
    let result = json!({
        "valid": true,
        "dim": m.dim(),
        "ontic_states": m.n_ontic(),
        "prepared_states": m.states().len(),
        "experiments": m.experiments().len(),
        "lines": report::lines(&line_report),
        "tomography_missing": tomography,
    });
    Ok(Outcome {
        exit_code: 0,
        summary: format!(
            "valid: dim {}, {} ontic states, {} states, {} experiments, lines {}",
            m.dim(),
            m.n_ontic(),
            m.states().len(),
            m.experiments().len(),
            if line_report.complete { "complete" } else { "incomplete" }
        ),
        report: report::envelope("validate", None, &s.digest(), None, &tol, result),
    })
}

pub fn adequacy(s: &Scenario, ov: &Overrides) -> Result<Outcome> {
    let tol = tolerances(s, ov)?;
    let built = s.build(&tol)?;
    let r = built.model.check_adequacy(tol.adequacy)?;
    Ok(Outcome {
        exit_code: 0,
        summary: format!(
            "adequacy {}: max deviation {:.3e} over {} sets",
            if r.passed { "PASS" } else { "FAIL" },
            r.max_deviation,
            r.checked
        ),
        report: report::envelope("adequacy", None, &s.digest(), None, &tol, report::adequacy(&r)),
    })
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Contradiction(step) => format!("contradiction at {}", step.name()),
        Verdict::NoViolation => "no violation".into(),
    }
}

pub fn nogo(s: &Scenario, mode: Mode, ov: &Overrides) -> Result<Outcome> {
    let tol = tolerances(s, ov)?;
    let seed = ov.seed.unwrap_or(s.run.seed);
    let eta = ov.eta.or(s.run.eta).unwrap_or(0.0);
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::validation("run.eta", "must lie in [0, 1)"));
    }
    let search = SearchParams {
        restarts: ov.restarts.unwrap_or(s.run.restarts),
        max_iter: ov.max_iter.unwrap_or(s.run.max_iter),
        seed,
        ..SearchParams::default()
    };
    if search.restarts == 0 {
        return Err(Error::validation("run.restarts", "need at least one restart"));
    }
    let witness = WitnessParams {
        eta,
        floor: s.contradiction_floor(),
        ..WitnessParams::default()
    };
    let digest = s.digest();
    let built = s.build(&tol)?;
    let lines = built.proof_lines()?;
    let m = &built.model;

    let (exit_code, summary, result) = match mode {
        Mode::Witness => {
            let (g, source) = match &built.candidate {
                Some(g) => (g.clone(), "scenario"),
                None => (least_squares_candidate(m)?, "least_squares"),
            };
            let r = run_witness_pipeline(m, &g, &lines, &witness)?;
            let mut v = report::witness(&r);
            v["candidate_source"] = json!(source);
            (0, format!("witness ({source} candidate): {}, max violation {:.6}", verdict_text(&r.verdict), r.max_violation), v)
        }
        Mode::Search => {
            let found = feasibility_search(m, &search)?;
            let certificate = run_witness_pipeline(m, &found.candidate, &lines, &witness)?;
            let floor = s.contradiction_floor();
            let floor_met = floor.map(|f| found.residual >= f);
            let mut warnings = Vec::new();
            if floor_met == Some(false) {
                warnings.push("search residual fell below the scenario's contradiction floor".to_string());
            }
            let v = json!({
                "search": report::search(&found),
                "certificate": report::witness(&certificate),
                "floor": floor,
                "floor_met": floor_met,
                "warnings": warnings,
            });
            (
                0,
                format!(
                    "search: best residual {:.6} after {} restarts; certificate {}",
                    found.residual,
                    found.restarts.len(),
                    verdict_text(&certificate.verdict)
                ),
                v,
            )
        }
        Mode::Theorem1 => {
            let label = s.self_measurement.as_deref().ok_or_else(|| {
                Error::Precondition("theorem1 mode needs `self_measurement`, the label of the claimed experiment".into())
            })?;
            let r = check_theorem1(m, label, &lines, &witness, tol.eig)?;
            let (code, text) = match r.verdict {
                Theorem1Verdict::Contradiction(step) => (0, format!("contradiction at {}", step.name())),
                Theorem1Verdict::RejectedKernel => (3, "rejected: response kernel is not the identity".to_string()),
                Theorem1Verdict::Degenerate => (0, "degenerate model, nothing to refute".to_string()),
                Theorem1Verdict::NoViolation => (0, "no violation".to_string()),
            };
            (code, format!("theorem1 `{label}`: {text}"), report::theorem1(&r))
        }
        Mode::Sweep => {
            if s.dim != 2 {
                return Err(Error::Precondition("the robustness sweep uses binned qubit models (dim 2)".into()));
            }
            let r = robustness_sweep(&SweepParams {
                family: m.kets(),
                lines,
                eps: s.run.eps_grid.clone(),
                search,
                witness,
            })?;
            let mut v = report::sweep(&r);
            if ov.eta.is_some() || s.run.eta.is_some() {
                v["warnings"] = json!(["the sweep sets eta = eps on every row; the eta override is ignored"]);
            }
            let eig: Vec<String> = r.rows.iter().map(|x| format!("{:.4}", x.witness_eigenvalue)).collect();
            (
                0,
                format!("sweep: witness eigenvalues [{}], increasing {}", eig.join(", "), r.witness_increasing),
                v,
            )
        }
    };
    Ok(Outcome {
        exit_code,
        summary,
        report: report::envelope("nogo", Some(mode.name()), &digest, Some(seed), &tol, result),
    })
}

/// Canonical scenario text for a named fixture.
pub fn fixture(name: &str, dim: usize, bins: Option<usize>) -> Result<String> {
    Ok(Scenario::fixture(name, dim, bins)?.to_json())
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}
