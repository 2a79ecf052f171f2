//! Explicit state vectors and a concrete unitary for the cloning machine,
//! and a Monte Carlo run of it.
//!
//! The register holds `n` qubits (the `m` inputs plus `n - m` blank
//! ancillas) and is followed by a one-qubit flag, so the composite index is
//! `register * 2 + flag`. Flag `|0>` heralds success, `|1>` failure, and the
//! failure state of the register is `|0...0>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cloner::PriorWeights;
use crate::curve::{self, CloningProblem, FlagOverlap};
use crate::error::{CloneError, Result};

pub type StateVector = DVector<Complex64>;

/// Largest composite dimension built as a dense matrix.
pub const MAX_DIM: usize = 4096;
/// Largest allowed mismatch between input and image Gram matrices.
pub const GRAM_TOL: f64 = 1e-10;
/// Success branches must reproduce the clones to this fidelity.
pub const CLONE_FIDELITY_TOL: f64 = 1e-10;
const MC_CHUNKS: u64 = 64;

const FLAG_DIM: usize = 2;
const FLAG_SUCCESS: usize = 0;
const FLAG_FAILURE: usize = 1;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `|psi1> = (1, 0)` and `|psi2> = (s, sqrt(1 - s^2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStatePair {
    pub psi1: StateVector,
    pub psi2: StateVector,
    pub s: f64,
}

impl PureStatePair {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || !(0.0..1.0).contains(&s) {
            return Err(CloneError::InvalidArgument(format!(
                "overlap {s} must satisfy 0 <= s < 1"
            )));
        }
        Ok(PureStatePair {
            psi1: DVector::from_vec(vec![c(1.0), c(0.0)]),
            psi2: DVector::from_vec(vec![c(s), c((1.0 - s * s).sqrt())]),
            s,
        })
    }

    pub fn state(&self, which: usize) -> &StateVector {
        if which == 0 {
            &self.psi1
        } else {
            &self.psi2
        }
    }
}

/// `k`-fold tensor power. `k = 0` gives the one-dimensional vector `(1)`.
pub fn tensor_power(state: &StateVector, k: u32) -> StateVector {
    (0..k).fold(DVector::from_element(1, c(1.0)), |acc, _| {
        acc.kronecker(state)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpaceDims {
    pub qubit: usize,
    pub register_qubits: u32,
    pub flag: usize,
    pub total: usize,
}

#[derive(Debug, Clone)]
pub struct CloningUnitary {
    pub matrix: DMatrix<Complex64>,
    pub dims: SpaceDims,
    pub problem: CloningProblem,
    pub q1: f64,
    pub q2: f64,
    pub states: PureStatePair,
    /// `|alpha_1> = |alpha_2>`.
    pub flag_success: StateVector,
    /// `|alpha_0>`.
    pub flag_failure: StateVector,
    /// `|Phi^n>`.
    pub failure_state: StateVector,
}

fn basis(dim: usize, k: usize) -> StateVector {
    let mut v = DVector::zeros(dim);
    v[k] = c(1.0);
    v
}

/// Gram-Schmidt completion of orthonormal `seed` columns to a unitary.
///
/// Candidates are the canonical basis vectors, projected out twice. While
/// the basis is incomplete some candidate keeps a residual of at least
/// `1/sqrt(dim)`, so accepting above half that never stalls.
fn complete_basis(seed: &[StateVector], dim: usize) -> DMatrix<Complex64> {
    let mut cols: Vec<StateVector> = seed.to_vec();
    let threshold = 0.5 / (dim as f64).sqrt();
    for k in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut v = basis(dim, k);
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v.axpy(-proj, u, c(1.0));
            }
        }
        let norm = v.norm();
        if norm > threshold {
            cols.push(v.unscale(norm));
        }
    }
    debug_assert_eq!(cols.len(), dim);
    DMatrix::from_columns(&cols)
}

/// Orthonormal pair spanning `{a, b}`; `b`'s component along `a` is `a^† b`.
fn orthonormal_pair(a: &StateVector, b: &StateVector) -> [StateVector; 2] {
    let e1 = a.normalize();
    let mut e2 = b.clone();
    for _ in 0..2 {
        let proj = e1.dotc(&e2);
        e2.axpy(-proj, &e1, c(1.0));
    }
    let e2 = e2.normalize();
    [e1, e2]
}

/// Builds a unitary with
/// `U |psi_i^m>|0> = sqrt(p_i) |psi_i^n>|alpha> + sqrt(q_i) |Phi^n>|alpha_0>`.
///
/// The two prescribed images must have the same inner product as the two
/// inputs, which is the unitarity condition at `(q1, q2)`; otherwise
/// [`CloneError::Infeasible`] is returned. Any unitary pairing of the
/// orthogonal complements then completes `U`.
pub fn build_unitary(problem: &CloningProblem, q1: f64, q2: f64) -> Result<CloningUnitary> {
    build_unitary_with_tol(problem, q1, q2, GRAM_TOL)
}

pub fn build_unitary_with_tol(
    problem: &CloningProblem,
    q1: f64,
    q2: f64,
    tol: f64,
) -> Result<CloningUnitary> {
    for (what, q) in [("q1", q1), ("q2", q2)] {
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(CloneError::Domain {
                what,
                value: q,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    let n = problem.n();
    let total = (1usize << n.min(62)).saturating_mul(FLAG_DIM);
    if n >= 62 || total > MAX_DIM {
        return Err(CloneError::DimensionTooLarge {
            dim: total,
            cap: MAX_DIM,
        });
    }
    let dims = SpaceDims {
        qubit: 2,
        register_qubits: n,
        flag: FLAG_DIM,
        total,
    };
    let states = PureStatePair::new(problem.s())?;
    let blank = basis(2, 0);
    let flag_success = basis(FLAG_DIM, FLAG_SUCCESS);
    let flag_failure = basis(FLAG_DIM, FLAG_FAILURE);
    let failure_state = basis(1 << n, 0);
    let ancilla = tensor_power(&blank, n - problem.m()).kronecker(&flag_success);

    let mut inputs = Vec::with_capacity(2);
    let mut images = Vec::with_capacity(2);
    for (i, q) in [q1, q2].into_iter().enumerate() {
        let psi = states.state(i);
        inputs.push(tensor_power(psi, problem.m()).kronecker(&ancilla));
        let clones = tensor_power(psi, n).kronecker(&flag_success);
        let fail = failure_state.kronecker(&flag_failure);
        images.push(clones * c((1.0 - q).sqrt()) + fail * c(q.sqrt()));
    }

    let gram_in = inputs[0].dotc(&inputs[1]);
    let gram_out = images[0].dotc(&images[1]);
    let mismatch = (gram_in - gram_out).norm();
    if mismatch > tol {
        return Err(CloneError::Infeasible {
            q1,
            q2,
            mismatch,
            tol,
        });
    }

    let domain = complete_basis(&orthonormal_pair(&inputs[0], &inputs[1]), total);
    let range = complete_basis(&orthonormal_pair(&images[0], &images[1]), total);
    let matrix = &range * domain.adjoint();

    Ok(CloningUnitary {
        matrix,
        dims,
        problem: *problem,
        q1,
        q2,
        states,
        flag_success,
        flag_failure,
        failure_state,
    })
}

impl CloningUnitary {
    /// `max |(U^† U - I)_jk|`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.matrix.adjoint() * &self.matrix;
        let mut worst: f64 = 0.0;
        for j in 0..gram.nrows() {
            for k in 0..gram.ncols() {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((gram[(j, k)] - c(target)).norm());
            }
        }
        worst
    }

    /// `|psi_i^m>|0>` for `i` in `{0, 1}`.
    pub fn input_state(&self, which: usize) -> StateVector {
        let blank = basis(2, 0);
        let ancilla =
            tensor_power(&blank, self.problem.n() - self.problem.m()).kronecker(&self.flag_success);
        tensor_power(self.states.state(which), self.problem.m()).kronecker(&ancilla)
    }

    pub fn output_state(&self, which: usize) -> StateVector {
        &self.matrix * self.input_state(which)
    }

    /// `<psi_i^n, alpha| U |psi_i^m, 0>`, which should equal `sqrt(p_i)`.
    pub fn success_amplitude(&self, which: usize) -> Complex64 {
        let target =
            tensor_power(self.states.state(which), self.problem.n()).kronecker(&self.flag_success);
        target.dotc(&self.output_state(which))
    }

    /// `<Phi^n, alpha_0| U |psi_i^m, 0>`, which should equal `sqrt(q_i)`.
    pub fn failure_amplitude(&self, which: usize) -> Complex64 {
        let target = self.failure_state.kronecker(&self.flag_failure);
        target.dotc(&self.output_state(which))
    }

    /// Born probabilities of the flag outcomes `(success, failure)` for input `i`.
    pub fn flag_probabilities(&self, which: usize) -> (f64, f64) {
        let out = self.output_state(which);
        let mut probs = [0.0; FLAG_DIM];
        for (k, amp) in out.iter().enumerate() {
            probs[k % FLAG_DIM] += amp.norm_sqr();
        }
        (probs[FLAG_SUCCESS], probs[FLAG_FAILURE])
    }

    /// Fidelity of the register after a success flag with `|psi_i^n>`.
    /// `None` when success has zero probability.
    pub fn clone_fidelity(&self, which: usize) -> Option<f64> {
        let out = self.output_state(which);
        let branch: StateVector = DVector::from_iterator(
            out.len() / FLAG_DIM,
            out.iter().skip(FLAG_SUCCESS).step_by(FLAG_DIM).copied(),
        );
        let norm = branch.norm();
        if norm <= 1e-12 {
            return None;
        }
        let target = tensor_power(self.states.state(which), self.problem.n());
        Some((target.dotc(&branch) / c(norm)).norm_sqr())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloTally {
    pub trials: u64,
    pub failures: u64,
    pub trials_by_state: [u64; 2],
    pub failures_by_state: [u64; 2],
    pub seed: u64,
    /// `failures / trials`.
    pub empirical_q: f64,
}

impl MonteCarloTally {
    /// Failure frequency conditioned on input `i`.
    pub fn empirical_q_of(&self, which: usize) -> f64 {
        if self.trials_by_state[which] == 0 {
            0.0
        } else {
            self.failures_by_state[which] as f64 / self.trials_by_state[which] as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    trials: [u64; 2],
    failures: [u64; 2],
}

impl Counts {
    fn merge(self, other: Self) -> Self {
        Counts {
            trials: [
                self.trials[0] + other.trials[0],
                self.trials[1] + other.trials[1],
            ],
            failures: [
                self.failures[0] + other.failures[0],
                self.failures[1] + other.failures[1],
            ],
        }
    }
}

/// Runs the machine `trials` times: each trial draws input `i` with
/// probability `eta_i`, applies `U` and samples the flag by the Born rule.
///
/// Trials are split into fixed chunks, each with its own ChaCha stream of
/// `seed`, so the tally is independent of the worker count.
pub fn simulate(
    problem: &CloningProblem,
    priors: PriorWeights,
    operating_point: (f64, f64),
    trials: u64,
    seed: u64,
) -> Result<MonteCarloTally> {
    if trials < 1 {
        return Err(CloneError::InvalidArgument(
            "need at least one trial".into(),
        ));
    }
    let (q1, q2) = operating_point;
    let residual = curve::constraint_residual(problem, FlagOverlap::CLONING, q1, q2);
    if residual.is_nan() || residual.abs() > GRAM_TOL {
        return Err(CloneError::Infeasible {
            q1,
            q2,
            mismatch: residual.abs(),
            tol: GRAM_TOL,
        });
    }
    let machine = build_unitary(problem, q1, q2)?;
    let mut fail_prob = [0.0; 2];
    for (i, slot) in fail_prob.iter_mut().enumerate() {
        let (p_success, p_fail) = machine.flag_probabilities(i);
        if p_success > 1e-12 {
            let fidelity = machine.clone_fidelity(i).unwrap_or(0.0);
            if fidelity < 1.0 - CLONE_FIDELITY_TOL {
                return Err(CloneError::Numeric(format!(
                    "success branch of input {} has clone fidelity {fidelity}",
                    i + 1
                )));
            }
        }
        *slot = p_fail;
    }

    let chunk_len = trials.div_ceil(MC_CHUNKS);
    let counts = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * chunk_len;
            let count = trials.saturating_sub(start).min(chunk_len);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut counts = Counts::default();
            for _ in 0..count {
                let which = if rng.gen::<f64>() < priors.eta1 { 0 } else { 1 };
                counts.trials[which] += 1;
                if rng.gen::<f64>() < fail_prob[which] {
                    counts.failures[which] += 1;
                }
            }
            counts
        })
        .reduce(Counts::default, Counts::merge);
    let failures = counts.failures[0] + counts.failures[1];
    Ok(MonteCarloTally {
        trials,
        failures,
        trials_by_state: counts.trials,
        failures_by_state: counts.failures,
        seed,
        empirical_q: failures as f64 / trials as f64,
    })
}
