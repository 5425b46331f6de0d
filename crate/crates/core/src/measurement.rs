//! Finite measurement schemes: a system coupled to an apparatus by a unitary,
//! read out by a projective pointer measurement and a calibration map.
//!
//! Tensor ordering is system-major throughout: the joint basis index of
//! `|s> (x) |a>` is `s * dim_a + a`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianOp, Ket};
use crate::povm::Povm;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScheme<T> {
    dim_system: usize,
    apparatus: Ket<T>,
    coupling: CMatrix<T>,
    pointer: Povm<T>,
    /// Outcome label for each pointer outcome, in pointer order.
    calibration: Vec<String>,
}

impl<T: Real> MeasurementScheme<T> {
    pub fn new(
        dim_system: usize,
        apparatus: Ket<T>,
        coupling: CMatrix<T>,
        pointer: Povm<T>,
        calibration: Vec<String>,
        tol: T,
    ) -> Result<Self> {
        let dim_a = apparatus.dim();
        let joint = dim_system * dim_a;
        if dim_system == 0 {
            return Err(Error::validation("dim_system", "must be positive"));
        }
        if coupling.rows() != joint || coupling.cols() != joint {
            return Err(Error::validation(
                "coupling",
                format!("expected {joint}x{joint}, found {}x{}", coupling.rows(), coupling.cols()),
            ));
        }
        coupling.check_finite()?;
        let defect = coupling.unitarity_defect();
        if defect > tol {
            return Err(Error::validation("coupling", format!("not unitary (defect {defect})")));
        }
        if pointer.dim() != dim_a {
            return Err(Error::validation(
                "pointer",
                format!("acts on dim {}, apparatus has dim {dim_a}", pointer.dim()),
            ));
        }
        let report = pointer.validate(tol)?;
        if !report.passed {
            return Err(Error::validation("pointer", "pointer effects do not form a POVM"));
        }
        for (i, e) in pointer.effects().iter().enumerate() {
            let sq = e.matrix().matmul(e.matrix())?;
            if sq.sub(e.matrix())?.max_abs() > tol {
                return Err(Error::validation(format!("pointer.effects[{i}]"), "not a projector"));
            }
            for (j, f) in pointer.effects().iter().enumerate().skip(i + 1) {
                if e.matrix().matmul(f.matrix())?.max_abs() > tol {
                    return Err(Error::validation(
                        format!("pointer.effects[{j}]"),
                        format!("not orthogonal to pointer effect {i}"),
                    ));
                }
            }
        }
        if calibration.len() != pointer.len() {
            return Err(Error::validation(
                "calibration",
                format!("{} entries for {} pointer outcomes", calibration.len(), pointer.len()),
            ));
        }
        Ok(Self {
            dim_system,
            apparatus,
            coupling,
            pointer,
            calibration,
        })
    }

    pub fn dim_system(&self) -> usize {
        self.dim_system
    }

    pub fn dim_apparatus(&self) -> usize {
        self.apparatus.dim()
    }

    pub fn apparatus(&self) -> &Ket<T> {
        &self.apparatus
    }

    pub fn coupling(&self) -> &CMatrix<T> {
        &self.coupling
    }

    pub fn pointer(&self) -> &Povm<T> {
        &self.pointer
    }

    pub fn calibration(&self) -> &[String] {
        &self.calibration
    }

    /// Distinct outcome labels in order of first appearance in the calibration.
    pub fn outcome_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for l in &self.calibration {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
        out
    }

    /// Pointer projector summed over the preimage of `label` under the calibration.
    fn pointer_cell(&self, label: &str) -> Result<HermitianOp<T>> {
        let idx: Vec<&str> = self
            .pointer
            .outcomes()
            .iter()
            .zip(&self.calibration)
            .filter(|(_, l)| *l == label)
            .map(|(o, _)| o.as_str())
            .collect();
        self.pointer.effect_of(&idx)
    }

    /// Isometry `V |s> = U (|s> (x) |phi_A>)`, a `(dim_s dim_a) x dim_s` matrix.
    fn isometry(&self) -> CMatrix<T> {
        let da = self.dim_apparatus();
        let phi = self.apparatus.amplitudes();
        CMatrix::from_fn(self.dim_system * da, self.dim_system, |row, s| {
            (0..da).map(|a| self.coupling[(row, s * da + a)] * phi[a]).sum()
        })
    }

    /// The POVM `E(B) = <phi_A| U^dagger (I (x) P_A(zeta^{-1}(B))) U |phi_A>`.
    pub fn extract_povm(&self) -> Result<Povm<T>> {
        let v = self.isometry();
        let vh = v.adjoint();
        let id = CMatrix::identity(self.dim_system);
        let labels = self.outcome_labels();
        let mut effects = Vec::with_capacity(labels.len());
        for l in &labels {
            let cell = id.kron(self.pointer_cell(l)?.matrix());
            let e = vh.matmul(&cell)?.matmul(&v)?;
            effects.push(HermitianOp::new(e)?);
        }
        Povm::new(labels, effects)
    }

    /// Exact outcome probabilities from the coupled evolution `U (psi (x) phi_A)`.
    pub fn coupled_probabilities(&self, psi: &Ket<T>) -> Result<Vec<(String, T)>> {
        if psi.dim() != self.dim_system {
            return Err(Error::DimensionMismatch {
                expected: self.dim_system,
                found: psi.dim(),
            });
        }
        let joint = self.coupling.mul_vec(psi.tensor(&self.apparatus).amplitudes())?;
        let da = self.dim_apparatus();
        let mut out = Vec::new();
        for l in self.outcome_labels() {
            let cell = self.pointer_cell(&l)?;
            let mut p = T::zero();
            for s in 0..self.dim_system {
                let block = &joint[s * da..(s + 1) * da];
                let moved = cell.apply(block)?;
                p += block
                    .iter()
                    .zip(&moved)
                    .map(|(a, b)| a.conj() * b)
                    .sum::<Complex<T>>()
                    .re;
            }
            out.push((l, p));
        }
        Ok(out)
    }

    /// Exact cell probabilities plus `n_samples` seeded draws from them.
    pub fn simulate_outcome_distribution(
        &self,
        psi: &Ket<T>,
        n_samples: usize,
        seed: u64,
    ) -> Result<EmpiricalDistribution<T>> {
        if n_samples == 0 {
            return Err(Error::validation("n_samples", "must be positive"));
        }
        let exact = self.coupled_probabilities(psi)?;
        let weights: Vec<f64> = exact
            .iter()
            .map(|(_, p)| p.max(T::zero()).to_f64().unwrap_or(0.0))
            .collect();
        let dist = WeightedIndex::new(&weights)
            .map_err(|e| Error::Numerical(format!("outcome weights: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0usize; exact.len()];
        for _ in 0..n_samples {
            counts[dist.sample(&mut rng)] += 1;
        }
        Ok(EmpiricalDistribution {
            labels: exact.iter().map(|(l, _)| l.clone()).collect(),
            exact: exact.into_iter().map(|(_, p)| p).collect(),
            counts,
            n_samples,
        })
    }

    /// Compares coupled-evolution probabilities with Born probabilities of the
    /// extracted POVM for every state and outcome set.
    ///
    /// All subsets are enumerated for up to 12 outcome labels; beyond that,
    /// singletons and the full set (enough by additivity).
    pub fn check_main_theorem(&self, states: &[Ket<T>]) -> Result<MainTheoremReport<T>> {
        let povm = self.extract_povm()?;
        let labels = povm.outcomes().to_vec();
        let sets = outcome_sets(&labels);
        let mut max_deviation = T::zero();
        let mut worst = None;
        for (k, psi) in states.iter().enumerate() {
            let coupled: BTreeMap<String, T> = self.coupled_probabilities(psi)?.into_iter().collect();
            for set in &sets {
                let lhs: T = set.iter().map(|l| coupled[l]).sum();
                let rhs = povm.born(psi, set)?;
                let dev = (lhs - rhs).abs();
                if dev > max_deviation || worst.is_none() {
                    max_deviation = max_deviation.max(dev);
                    worst = Some((k, set.clone()));
                }
            }
        }
        Ok(MainTheoremReport {
            max_deviation,
            worst_state: worst.as_ref().map(|w| w.0),
            worst_set: worst.map(|w| w.1).unwrap_or_default(),
            sets_checked: sets.len(),
        })
    }
}

fn outcome_sets(labels: &[String]) -> Vec<Vec<String>> {
    let n = labels.len();
    if n <= 12 {
        (0u32..(1 << n))
            .map(|mask| {
                labels
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, l)| l.clone())
                    .collect()
            })
            .collect()
    } else {
        let mut sets: Vec<Vec<String>> = labels.iter().map(|l| vec![l.clone()]).collect();
        sets.push(labels.to_vec());
        sets
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution<T> {
    pub labels: Vec<String>,
    pub exact: Vec<T>,
    pub counts: Vec<usize>,
    pub n_samples: usize,
}

impl<T: Real> EmpiricalDistribution<T> {
    pub fn frequencies(&self) -> Vec<T> {
        let n = T::lit(self.n_samples as f64);
        self.counts.iter().map(|&c| T::lit(c as f64) / n).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainTheoremReport<T> {
    pub max_deviation: T,
    pub worst_state: Option<usize>,
    pub worst_set: Vec<String>,
    pub sets_checked: usize,
}

/// Haar-distributed unitary: Gram-Schmidt on a seeded complex Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    loop {
        let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            let mut v: Vec<Complex<T>> = (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(T::lit(re), T::lit(im))
                })
                .collect();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for q in &cols {
                    let proj: Complex<T> = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, qi) in v.iter_mut().zip(q) {
                        *x -= proj * qi;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm < T::lit(1e-6) {
                ok = false;
                break;
            }
            for x in v.iter_mut() {
                *x /= norm;
            }
            cols.push(v);
        }
        if ok {
            return CMatrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

/// Projective pointer measurement in the computational basis of the apparatus,
/// outcomes labelled `"a0"`, `"a1"`, ...
pub fn computational_pointer<T: Real>(dim_a: usize) -> Povm<T> {
    Povm::new(
        (0..dim_a).map(|a| format!("a{a}")).collect(),
        (0..dim_a).map(|a| HermitianOp::projector(&Ket::basis(dim_a, a))).collect(),
    )
    .expect("computational basis pointer")
}

/// Seeded random scheme: Haar unitary coupling, random apparatus state, computational
/// pointer and a random calibration onto at most `dim_a` outcome labels.
pub fn random_scheme<T: Real>(dim_s: usize, dim_a: usize, seed: u64) -> MeasurementScheme<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let apparatus = Ket::random(dim_a, &mut rng);
    let coupling = random_unitary(dim_s * dim_a, &mut rng);
    let n_labels = rng.random_range(1..=dim_a);
    let calibration = (0..dim_a)
        .map(|_| format!("z{}", rng.random_range(0..n_labels)))
        .collect();
    MeasurementScheme::new(
        dim_s,
        apparatus,
        coupling,
        computational_pointer(dim_a),
        calibration,
        T::default_tol() * T::lit(100.0),
    )
    .expect("random scheme is valid")
}

/// `|s>|a> -> |s>|a XOR s>` on two qubits, system as control.
pub fn controlled_flip<T: Real>() -> CMatrix<T> {
    let mut u = CMatrix::zeros(4, 4);
    for s in 0..2 {
        for a in 0..2 {
            u[(s * 2 + (a ^ s), s * 2 + a)] = Complex::new(T::one(), T::zero());
        }
    }
    u
}

/// The controlled-flip qubit scheme with apparatus ready in `|0>` and identity calibration.
pub fn controlled_flip_scheme<T: Real>() -> MeasurementScheme<T> {
    MeasurementScheme::new(
        2,
        Ket::basis(2, 0),
        controlled_flip(),
        computational_pointer(2),
        vec!["0".to_string(), "1".to_string()],
        T::default_tol(),
    )
    .expect("controlled flip scheme")
}
