//! Verification toolkit for ontological models of finite-dimensional quantum
//! systems, and a constructive refutation of measuring the ontic state.

pub mod commands;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod nogo;
pub mod ontomodel;
pub mod povm;
pub mod report;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result};
pub use scalar::{Real, Tolerances};

pub type Ket64 = linalg::Ket<f64>;
pub type HermitianOp64 = linalg::HermitianOp<f64>;
pub type Povm64 = povm::Povm<f64>;
pub type OntModel64 = ontomodel::OntModel<f64>;
pub type OnticCandidate64 = nogo::OnticCandidate<f64>;
pub type Ket32 = linalg::Ket<f32>;
pub type HermitianOp32 = linalg::HermitianOp<f32>;
pub type Povm32 = povm::Povm<f32>;
pub type OntModel32 = ontomodel::OntModel<f32>;
pub type OnticCandidate32 = nogo::OnticCandidate<f32>;
