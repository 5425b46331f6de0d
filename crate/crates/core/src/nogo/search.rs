//! Dykstra alternating projections for the candidate feasibility problem
//!
//! find `G_lambda >= 0` with `sum_lambda G_lambda = I` and
//! `<psi|G_lambda|psi> = rho^psi(lambda)` for every registered `psi`.
//!
//! Operators are handled in the real Hermitian coordinates of
//! [`crate::linalg::hvec`], where the Frobenius norm is Euclidean and each
//! quadratic-form constraint is a dot product with `vec(|psi><psi|)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::OnticCandidate;
use crate::error::{Error, Result};
use crate::linalg::hvec::{from_real, real_dim, to_real};
use crate::linalg::{op_from_quadratic_forms, tomographic_completeness, CMatrix, HermitianOp, Ket};
use crate::ontomodel::OntModel;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams<T> {
    pub restarts: usize,
    pub max_iter: usize,
    /// Restart `r` is seeded with `seed + r`.
    pub seed: u64,
    /// A restart stops once its residual is at most `tol`.
    pub tol: T,
    /// The residual trace keeps every `trace_stride`-th iteration (and the last).
    pub trace_stride: usize,
}

impl<T: Real> Default for SearchParams<T> {
    fn default() -> Self {
        Self {
            restarts: 100,
            max_iter: 50_000,
            seed: 0,
            tol: T::lit(1e-10).max(T::default_tol()),
            trace_stride: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord<T> {
    pub seed: u64,
    pub iterations: usize,
    /// Best residual reached by this restart.
    pub residual: T,
    /// Best-so-far residual at the recorded iterations; nonincreasing.
    pub trace: Vec<(usize, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult<T> {
    pub seed: u64,
    /// Iterations run by the best restart.
    pub iterations: usize,
    /// Smallest residual over all restarts.
    pub residual: T,
    pub best_restart: usize,
    /// Best PSD iterate, normalized to a POVM on the ontic space.
    pub candidate: OnticCandidate<T>,
    /// Residual of the normalized candidate.
    pub candidate_residual: T,
    pub restarts: Vec<RestartRecord<T>>,
    pub tomography_missing: Vec<String>,
    pub warnings: Vec<String>,
}

/// Shared, read-only data of one search.
struct Problem<T> {
    dim: usize,
    d2: usize,
    n: usize,
    /// `vec(|psi_k><psi_k|)`.
    a: Vec<Vec<T>>,
    /// `rho^k(lambda)`, indexed `[k][lambda]`.
    rho: Vec<Vec<T>>,
    /// `I - Pi` with `Pi` the projector onto `span{a_k}` (row-major `d2 x d2`).
    q: Vec<T>,
    /// Component of each `G_lambda` fixed by the quadratic-form constraints.
    fixed: Vec<Vec<T>>,
    identity: Vec<T>,
    /// Face restriction `P_perp` for ontic states with a partial null family.
    faces: Vec<Option<HermitianOp<T>>>,
}

/// Residual of a point: the largest violation of any affine constraint.
fn residual<T: Real>(p: &Problem<T>, x: &[Vec<T>]) -> T {
    let mut worst = T::zero();
    for (ak, rk) in p.a.iter().zip(&p.rho) {
        for (xl, &r) in x.iter().zip(rk) {
            let v: T = ak.iter().zip(xl).map(|(u, w)| *u * *w).sum();
            worst = worst.max((v - r).abs());
        }
    }
    let mut s = vec![T::zero(); p.d2];
    for xl in x {
        for (si, xi) in s.iter_mut().zip(xl) {
            *si += *xi;
        }
    }
    for (si, ei) in s.iter_mut().zip(&p.identity) {
        *si -= *ei;
    }
    worst.max(from_real(p.dim, &s).max_abs())
}

fn mat_vec<T: Real>(m: &[T], v: &[T], out: &mut [T]) {
    let n = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = m[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| *a * *b).sum();
    }
}

/// Orthogonal projection onto the affine constraint set.
fn project_affine<T: Real>(p: &Problem<T>, x: &[Vec<T>], out: &mut [Vec<T>]) {
    let mut c = vec![T::zero(); p.d2];
    let mut total = vec![T::zero(); p.d2];
    for xl in x {
        for (t, v) in total.iter_mut().zip(xl) {
            *t += *v;
        }
    }
    for (t, e) in total.iter_mut().zip(&p.identity) {
        *t -= *e;
    }
    mat_vec(&p.q, &total, &mut c);
    let inv_n = T::one() / T::lit(p.n as f64);
    for ((xl, ol), fl) in x.iter().zip(out.iter_mut()).zip(&p.fixed) {
        mat_vec(&p.q, xl, ol);
        for ((o, ci), f) in ol.iter_mut().zip(&c).zip(fl) {
            *o = *o - *ci * inv_n + *f;
        }
    }
}

/// Projection onto the PSD cone, or onto the face `{G >= 0 : G = P G P}` when known.
fn project_cone<T: Real>(dim: usize, y: &[T], face: Option<&HermitianOp<T>>) -> Result<Vec<T>> {
    let h = from_real(dim, y);
    let h = match face {
        Some(p) => h.compress(p)?,
        None => h,
    };
    Ok(to_real(&h.psd_part()?))
}

/// Orthonormal basis of the span of `kets` (modified Gram-Schmidt, two passes).
fn orthonormal_span<T: Real>(kets: &[&Ket<T>]) -> Vec<Vec<num_complex::Complex<T>>> {
    let mut basis: Vec<Vec<num_complex::Complex<T>>> = Vec::new();
    for k in kets {
        let mut v = k.amplitudes().to_vec();
        for _ in 0..2 {
            for b in &basis {
                let c: num_complex::Complex<T> = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > T::lit(1e-8) {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    basis
}

impl<T: Real> Problem<T> {
    fn new(m: &OntModel<T>) -> Result<Self> {
        let dim = m.dim();
        let d2 = real_dim(dim);
        let n = m.n_ontic();
        let a: Vec<Vec<T>> = m.states().iter().map(|s| to_real(&HermitianOp::projector(&s.ket))).collect();
        let rho: Vec<Vec<T>> = m.states().iter().map(|s| s.rho.clone()).collect();

        // S = sum_k a_k a_k^T, real symmetric; its spectrum gives Pi and S^+.
        let s = CMatrix::from_fn(d2, d2, |i, j| {
            num_complex::Complex::new(a.iter().map(|ak| ak[i] * ak[j]).sum(), T::zero())
        });
        let eig = HermitianOp::new(s)?.eig()?;
        let cutoff = T::rank_threshold() * T::one().max(eig.max());
        let mut pi = vec![T::zero(); d2 * d2];
        let mut pinv = vec![T::zero(); d2 * d2];
        for (lam, v) in eig.values.iter().zip(&eig.vectors) {
            if *lam <= cutoff {
                continue;
            }
            let amp = v.amplitudes();
            for i in 0..d2 {
                for j in 0..d2 {
                    let w = (amp[i] * amp[j].conj()).re;
                    pi[i * d2 + j] += w;
                    pinv[i * d2 + j] += w / *lam;
                }
            }
        }
        let mut q = pi;
        for (i, qv) in q.iter_mut().enumerate() {
            let id = if i / d2 == i % d2 { T::one() } else { T::zero() };
            *qv = id - *qv;
        }

        let mut fixed = Vec::with_capacity(n);
        let mut faces = Vec::with_capacity(n);
        for l in 0..n {
            let mut at_r = vec![T::zero(); d2];
            for (ak, rk) in a.iter().zip(&rho) {
                for (t, u) in at_r.iter_mut().zip(ak) {
                    *t += *u * rk[l];
                }
            }
            let mut f = vec![T::zero(); d2];
            mat_vec(&pinv, &at_r, &mut f);
            fixed.push(f);

            let null: Vec<&Ket<T>> = m
                .states()
                .iter()
                .filter(|s| s.rho[l] <= T::zero())
                .map(|s| &s.ket)
                .collect();
            let basis = orthonormal_span(&null);
            faces.push(if !basis.is_empty() && basis.len() < dim {
                let mut p = HermitianOp::identity(dim);
                for b in basis {
                    p.add_scaled(&HermitianOp::projector(&Ket::with_tol(b, T::lit(1e-6))?), -T::one())?;
                }
                Some(p)
            } else {
                None
            });
        }
        Ok(Self {
            dim,
            d2,
            n,
            a,
            rho,
            q,
            fixed,
            identity: to_real(&HermitianOp::identity(dim)),
            faces,
        })
    }

    fn cone(&self, y: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        y.iter()
            .zip(&self.faces)
            .map(|(yl, face)| project_cone(self.dim, yl, face.as_ref()))
            .collect()
    }
}

struct RestartOutcome<T> {
    record: RestartRecord<T>,
    best: Vec<Vec<T>>,
}

fn run_restart<T: Real>(p: &Problem<T>, params: &SearchParams<T>, seed: u64) -> Result<RestartOutcome<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = T::one() / T::lit(p.n as f64);
    let start: Vec<Vec<T>> = (0..p.n)
        .map(|_| {
            (0..p.d2)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    T::lit(z) * scale
                })
                .collect()
        })
        .collect();
    let mut x = p.cone(&start)?;
    // Dykstra correction of the cone step. The affine step needs none: its
    // correction is normal to the affine set and does not change the projection.
    let mut corr = vec![vec![T::zero(); p.d2]; p.n];
    let mut y = vec![vec![T::zero(); p.d2]; p.n];
    let mut best = x.clone();
    let mut best_res = residual(p, &x);
    let mut trace = vec![(0usize, best_res)];
    let stride = params.trace_stride.max(1);
    let mut it = 0;
    while it < params.max_iter && best_res > params.tol {
        it += 1;
        project_affine(p, &x, &mut y);
        for (yl, cl) in y.iter_mut().zip(&corr) {
            for (a, b) in yl.iter_mut().zip(cl) {
                *a += *b;
            }
        }
        let xn = p.cone(&y)?;
        for ((cl, yl), xl) in corr.iter_mut().zip(&y).zip(&xn) {
            for ((c, a), b) in cl.iter_mut().zip(yl).zip(xl) {
                *c = *a - *b;
            }
        }
        x = xn;
        let r = residual(p, &x);
        if !r.is_finite() {
            return Err(Error::Numerical(format!("residual became non-finite at iteration {it}")));
        }
        if r < best_res {
            best_res = r;
            best.clone_from(&x);
        }
        if it % stride == 0 {
            trace.push((it, best_res));
        }
    }
    if trace.last().map(|t| t.0) != Some(it) {
        trace.push((it, best_res));
    }
    Ok(RestartOutcome {
        record: RestartRecord {
            seed,
            iterations: it,
            residual: best_res,
            trace,
        },
        best,
    })
}

/// Runs `params.restarts` independent Dykstra searches in parallel and keeps the
/// one with the smallest residual (lowest restart index on ties).
///
/// Ontic states whose null family `{psi : rho^psi(lambda) = 0}` spans a proper
/// nonzero subspace `K` are searched on the face `G = P G P`, `P = I - P_K`, which
/// every feasible point satisfies.
pub fn feasibility_search<T: Real>(m: &OntModel<T>, params: &SearchParams<T>) -> Result<FeasibilityResult<T>> {
    if params.restarts == 0 {
        return Err(Error::validation("restarts", "need at least one restart"));
    }
    let mut warnings = Vec::new();
    let tomography_missing = match tomographic_completeness(&m.kets(), m.dim()) {
        Ok(()) => Vec::new(),
        Err(Error::TomographyIncomplete { missing }) => {
            warnings.push(format!(
                "state family is not tomographically complete (missing {}): a feasible G may exist and would not contradict the theorem",
                missing.join(", ")
            ));
            missing
        }
        Err(e) => return Err(e),
    };
    let problem = Problem::new(m)?;
    let outcomes: Vec<Result<RestartOutcome<T>>> = (0..params.restarts)
        .into_par_iter()
        .map(|r| run_restart(&problem, params, params.seed.wrapping_add(r as u64)))
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best_restart = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.record.residual < outcomes[best_restart].record.residual {
            best_restart = r;
        }
    }
    let raw: Vec<HermitianOp<T>> = outcomes[best_restart]
        .best
        .iter()
        .map(|x| from_real(problem.dim, x))
        .collect();
    let candidate = OnticCandidate::normalized(m.ontic().to_vec(), &raw)?;
    let cand_vec: Vec<Vec<T>> = candidate.effects().iter().map(to_real).collect();
    let candidate_residual = residual(&problem, &cand_vec);
    let best = &outcomes[best_restart].record;
    Ok(FeasibilityResult {
        seed: params.seed,
        iterations: best.iterations,
        residual: best.residual,
        best_restart,
        candidate,
        candidate_residual,
        restarts: outcomes.into_iter().map(|o| o.record).collect(),
        tomography_missing,
        warnings,
    })
}

/// Least-squares "best effort" candidate: `G_lambda` is reconstructed from the
/// samples `rho^psi(lambda)` over the family, then normalized to a POVM.
pub fn least_squares_candidate<T: Real>(m: &OntModel<T>) -> Result<OnticCandidate<T>> {
    let raw = (0..m.n_ontic())
        .map(|l| {
            let samples: Vec<_> = m.states().iter().map(|s| (s.ket.clone(), s.rho[l])).collect();
            Ok(op_from_quadratic_forms(&samples, m.dim())?.op)
        })
        .collect::<Result<Vec<_>>>()?;
    OnticCandidate::normalized(m.ontic().to_vec(), &raw)
}
