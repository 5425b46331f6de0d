//! Dense complex linear algebra for small Hermitian operators.

mod eigen;
mod hermitian;
pub mod hvec;
mod ket;
mod matrix;
mod tomography;

pub use eigen::{eig_hermitian, EigenDecomposition};
pub use hermitian::{HermitianOp, PsdCheck};
pub use ket::Ket;
pub use matrix::CMatrix;
pub use tomography::{op_from_quadratic_forms, tomographic_completeness, Reconstruction};

use crate::error::Result;
use crate::scalar::Real;

/// `|v><v|`.
pub fn projector_onto<T: Real>(v: &Ket<T>) -> HermitianOp<T> {
    HermitianOp::projector(v)
}

pub fn is_psd<T: Real>(h: &HermitianOp<T>, tol: T) -> Result<PsdCheck<T>> {
    h.is_psd(tol)
}

pub fn quadratic_form<T: Real>(h: &HermitianOp<T>, psi: &Ket<T>) -> Result<T> {
    h.quadratic_form(psi)
}

pub fn op_sum<T: Real>(a: &HermitianOp<T>, b: &HermitianOp<T>) -> Result<HermitianOp<T>> {
    a.add(b)
}

pub fn op_sub<T: Real>(a: &HermitianOp<T>, b: &HermitianOp<T>) -> Result<HermitianOp<T>> {
    a.sub(b)
}

pub fn op_scale<T: Real>(a: &HermitianOp<T>, s: T) -> HermitianOp<T> {
    a.scale(s)
}
