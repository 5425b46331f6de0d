//! JSON scenario files.
//!
//! Complex numbers are `[re, im]` pairs, matrices are row-major nested arrays
//! and every label is a string. Emission is canonical (fixed field order,
//! shortest round-trip float formatting), so `emit -> load -> emit` is
//! byte-identical.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{HermitianOp, Ket};
use crate::nogo::OnticCandidate;
use crate::ontomodel::{
    canonical_family, canonical_lines, make_binned_qubit_model, make_trivial_model, Experiment, OntModel,
    PreparedState, ResponseKernel,
};
use crate::povm::Povm;
use crate::scalar::Tolerances;

pub const SCENARIO_VERSION: &str = "ontic-scenario/1";
pub const FIXTURES: [&str; 2] = ["trivial", "binned"];
/// Contradiction floor of the canonical qubit trivial fixture, calibrated by the
/// grid oracle in the test suite (certified lower bound 0.3320).
pub const TRIVIAL_QUBIT_FLOOR: f64 = 0.33;

pub type ComplexJson = [f64; 2];
pub type KetJson = Vec<ComplexJson>;
pub type MatrixJson = Vec<Vec<ComplexJson>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: String,
    pub dim: usize,
    /// State family for fixture models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<KetJson>>,
    /// Lines `g1, g2, g3` (further lines only enter line-completeness checks).
    pub lines: Vec<KetJson>,
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<CandidateSpec>,
    /// Label of an experiment claimed to measure the ontic state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_measurement: Option<String>,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expectations: Option<Expectations>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Fixture {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bins: Option<usize>,
    },
    Inline(InlineModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    pub ontic: Vec<String>,
    pub states: Vec<StateSpec>,
    pub experiments: Vec<ExperimentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub ket: KetJson,
    pub rho: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub label: String,
    pub povm: PovmSpec,
    pub response: KernelSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmSpec {
    pub outcomes: Vec<String>,
    pub effects: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub outcomes: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub labels: Vec<String>,
    pub effects: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSpec {
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    /// Support threshold; defaults to 0 (exact) or to `eps` in sweeps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    pub eps_grid: Vec<f64>,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            seed: 0,
            restarts: 100,
            max_iter: 50_000,
            eta: None,
            eps_grid: vec![0.1, 0.01, 0.001],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contradiction_floor: Option<f64>,
}

/// Objects built from a scenario.
#[derive(Debug, Clone)]
pub struct Built {
    pub model: OntModel<f64>,
    pub lines: Vec<Ket<f64>>,
    pub candidate: Option<OnticCandidate<f64>>,
}

impl Built {
    /// The three proof lines, or a precondition error.
    pub fn proof_lines(&self) -> Result<[Ket<f64>; 3]> {
        if self.lines.len() < 3 {
            return Err(Error::Precondition(format!(
                "the scenario lists {} lines; the witness needs g1, g2 and g3 = (g1 + g2)/sqrt2",
                self.lines.len()
            )));
        }
        Ok([self.lines[0].clone(), self.lines[1].clone(), self.lines[2].clone()])
    }
}

pub fn ket_to_json(k: &Ket<f64>) -> KetJson {
    k.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

pub fn op_to_json(h: &HermitianOp<f64>) -> MatrixJson {
    (0..h.dim())
        .map(|i| (0..h.dim()).map(|j| [h[(i, j)].re, h[(i, j)].im]).collect())
        .collect()
}

fn prefix(path: &str, e: Error) -> Error {
    match e {
        Error::Validation { path: p, message } => Error::Validation {
            path: if p.is_empty() { path.to_string() } else { format!("{path}.{p}") },
            message,
        },
        Error::NotNormalized { norm } => Error::validation(path, format!("ket not normalized (norm {norm})")),
        Error::NotHermitian { asymmetry } => Error::validation(path, format!("matrix not Hermitian (asymmetry {asymmetry})")),
        Error::NonFinite(at) => Error::validation(path, format!("non-finite entry at {at}")),
        Error::DimensionMismatch { expected, found } => {
            Error::validation(path, format!("dimension mismatch: expected {expected}, found {found}"))
        }
        other => other,
    }
}

fn ket_from_json(path: &str, v: &KetJson, dim: usize, tol: f64) -> Result<Ket<f64>> {
    if v.len() != dim {
        return Err(Error::validation(path, format!("{} amplitudes, expected {dim}", v.len())));
    }
    Ket::with_tol(v.iter().map(|z| Complex::new(z[0], z[1])).collect(), tol).map_err(|e| prefix(path, e))
}

fn op_from_json(path: &str, m: &MatrixJson, dim: usize) -> Result<HermitianOp<f64>> {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        return Err(Error::validation(path, format!("expected a {dim}x{dim} matrix")));
    }
    HermitianOp::from_rows(
        m.iter()
            .map(|r| r.iter().map(|z| Complex::new(z[0], z[1])).collect())
            .collect(),
    )
    .map_err(|e| prefix(path, e))
}

impl Scenario {
    /// Parses and checks the version tag; errors carry the JSON path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::validation(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        if s.version != SCENARIO_VERSION {
            return Err(Error::validation(
                "version",
                format!("unsupported version `{}`, expected `{SCENARIO_VERSION}`", s.version),
            ));
        }
        Ok(s)
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    /// `sha256:<hex>` of the canonical emission.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_json().as_bytes());
        let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }

    /// Canonical fixture scenario: `trivial` (any `dim >= 2`) or `binned` (qubit).
    pub fn fixture(name: &str, dim: usize, bins: Option<usize>) -> Result<Self> {
        let (model, expectations) = match name {
            "trivial" => {
                if dim < 2 {
                    return Err(Error::validation("dim", "the trivial fixture needs dim >= 2"));
                }
                let exp = (dim == 2).then_some(Expectations {
                    contradiction_floor: Some(TRIVIAL_QUBIT_FLOOR),
                });
                (ModelSpec::Fixture { name: name.into(), bins: None }, exp)
            }
            "binned" => {
                if dim != 2 {
                    return Err(Error::validation("dim", "the binned fixture is a qubit model (dim 2)"));
                }
                let bins = bins.unwrap_or(100);
                if bins == 0 {
                    return Err(Error::validation("bins", "need at least one bin"));
                }
                (ModelSpec::Fixture { name: name.into(), bins: Some(bins) }, None)
            }
            other => {
                return Err(Error::validation(
                    "fixture",
                    format!("unknown fixture `{other}`; available: {}", FIXTURES.join(", ")),
                ))
            }
        };
        Ok(Self {
            version: SCENARIO_VERSION.into(),
            dim,
            family: Some(canonical_family::<f64>(dim).iter().map(ket_to_json).collect()),
            lines: canonical_lines::<f64>(dim).iter().map(ket_to_json).collect(),
            model,
            candidate: None,
            self_measurement: None,
            run: RunSpec::default(),
            expectations,
        })
    }

    pub fn contradiction_floor(&self) -> Option<f64> {
        self.expectations.as_ref().and_then(|e| e.contradiction_floor)
    }

    /// Builds and validates every object.
    pub fn build(&self, tol: &Tolerances<f64>) -> Result<Built> {
        let dim = self.dim;
        if dim == 0 {
            return Err(Error::validation("dim", "must be positive"));
        }
        let lines = self
            .lines
            .iter()
            .enumerate()
            .map(|(i, g)| ket_from_json(&format!("lines[{i}]"), g, dim, tol.norm))
            .collect::<Result<Vec<_>>>()?;
        let model = match &self.model {
            ModelSpec::Fixture { name, bins } => {
                let family = match &self.family {
                    Some(f) => f
                        .iter()
                        .enumerate()
                        .map(|(i, k)| ket_from_json(&format!("family[{i}]"), k, dim, tol.norm))
                        .collect::<Result<Vec<_>>>()?,
                    None => canonical_family(dim),
                };
                match name.as_str() {
                    "trivial" => make_trivial_model(dim, &family, &lines).map_err(|e| prefix("model", e))?,
                    "binned" => {
                        if dim != 2 {
                            return Err(Error::validation("dim", "the binned fixture is a qubit model (dim 2)"));
                        }
                        let n = bins.ok_or_else(|| Error::validation("model.bins", "binned fixture needs `bins`"))?;
                        make_binned_qubit_model(&family, &lines, n).map_err(|e| prefix("model", e))?
                    }
                    other => {
                        return Err(Error::validation(
                            "model.name",
                            format!("unknown fixture `{other}`; available: {}", FIXTURES.join(", ")),
                        ))
                    }
                }
            }
            ModelSpec::Inline(m) => build_inline(m, dim, tol)?,
        };
        let candidate = match &self.candidate {
            None => None,
            Some(c) => {
                let effects = c
                    .effects
                    .iter()
                    .enumerate()
                    .map(|(i, e)| op_from_json(&format!("candidate.effects[{i}]"), e, dim))
                    .collect::<Result<Vec<_>>>()?;
                Some(OnticCandidate::new(c.labels.clone(), effects, tol.eig)?)
            }
        };
        Ok(Built { model, lines, candidate })
    }
}

fn build_inline(m: &InlineModel, dim: usize, tol: &Tolerances<f64>) -> Result<OntModel<f64>> {
    let states = m
        .states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            Ok(PreparedState {
                ket: ket_from_json(&format!("model.states[{k}].ket"), &s.ket, dim, tol.norm)?,
                rho: s.rho.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let experiments = m
        .experiments
        .iter()
        .enumerate()
        .map(|(e, x)| {
            let path = format!("model.experiments[{e}]");
            let effects = x
                .povm
                .effects
                .iter()
                .enumerate()
                .map(|(i, eff)| op_from_json(&format!("{path}.povm.effects[{i}]"), eff, dim))
                .collect::<Result<Vec<_>>>()?;
            let povm = Povm::new(x.povm.outcomes.clone(), effects).map_err(|err| prefix(&format!("{path}.povm"), err))?;
            let kernel = ResponseKernel::new(x.response.outcomes.clone(), x.response.rows.clone(), tol.stochastic)
                .map_err(|err| prefix(&format!("{path}.response"), err))?;
            Experiment::new(x.label.clone(), povm, kernel).map_err(|err| prefix(&path, err))
        })
        .collect::<Result<Vec<_>>>()?;
    OntModel::new(dim, m.ontic.clone(), states, experiments, tol).map_err(|e| prefix("model", e))
}

/// Inline description of a built model.
pub fn model_to_inline(m: &OntModel<f64>) -> InlineModel {
    InlineModel {
        ontic: m.ontic().to_vec(),
        states: m
            .states()
            .iter()
            .map(|s| StateSpec {
                ket: ket_to_json(&s.ket),
                rho: s.rho.clone(),
            })
            .collect(),
        experiments: m
            .experiments()
            .iter()
            .map(|e| ExperimentSpec {
                label: e.label.clone(),
                povm: PovmSpec {
                    outcomes: e.povm.outcomes().to_vec(),
                    effects: e.povm.effects().iter().map(op_to_json).collect(),
                },
                response: KernelSpec {
                    outcomes: e.response.outcomes().to_vec(),
                    rows: e.response.rows().to_vec(),
                },
            })
            .collect(),
    }
}
