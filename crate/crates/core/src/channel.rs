//! Pauli maps in eigenvalue form and their derived views: Pauli weights,
//! Kraus operators, the Choi matrix and the action on Bloch vectors.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Poles, TimeFunction};

/// Default threshold for "k_i >= 0".
pub const DEFAULT_EPS_CP: f64 = 1e-10;

/// One of the three Pauli axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Zero-based index (X = 0).
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// 1-based label used in reports: X = 1, Y = 2, Z = 3.
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn from_number(n: usize) -> Option<Axis> {
        match n {
            1 => Some(Axis::X),
            2 => Some(Axis::Y),
            3 => Some(Axis::Z),
            _ => None,
        }
    }
}

/// Weights of `I, X, Y, Z` in the operator-sum form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(pub [f64; 4]);

impl ProbabilityVector {
    pub fn k(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Index and value of the smallest weight.
    pub fn min(&self) -> (usize, f64) {
        self.0
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("four entries")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState(pub [f64; 3]);

impl BlochState {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Self {
        Self([r1, r2, r3])
    }

    pub fn axis(axis: Axis) -> Self {
        let mut r = [0.0; 3];
        r[axis.index()] = 1.0;
        Self(r)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_physical(&self) -> bool {
        self.0.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12
    }
}

/// `lambda_j = k0 + k_j - k_l - k_m`.
pub fn probs_to_lambdas(k: &ProbabilityVector) -> [f64; 3] {
    let [k0, k1, k2, k3] = k.0;
    [k0 + k1 - k2 - k3, k0 - k1 + k2 - k3, k0 - k1 - k2 + k3]
}

pub fn lambdas_to_probs(lambdas: [f64; 3]) -> ProbabilityVector {
    let [l1, l2, l3] = lambdas;
    ProbabilityVector([
        0.25 * (1.0 + l1 + l2 + l3),
        0.25 * (1.0 + l1 - l2 - l3),
        0.25 * (1.0 - l1 + l2 - l3),
        0.25 * (1.0 - l1 - l2 + l3),
    ])
}

/// A unital qubit Pauli map described by its three eigenvalue functions.
#[derive(Debug, Clone)]
pub struct PauliChannel {
    lambdas: [TimeFunction; 3],
    label: String,
    validated_until: f64,
}

impl PauliChannel {
    pub fn new(label: impl Into<String>, lambdas: [TimeFunction; 3]) -> Self {
        Self {
            lambdas,
            label: label.into(),
            validated_until: f64::INFINITY,
        }
    }

    pub fn identity() -> Self {
        Self::new(
            "identity",
            [
                TimeFunction::constant(1.0),
                TimeFunction::constant(1.0),
                TimeFunction::constant(1.0),
            ],
        )
    }

    /// Constant eigenvalues, mostly useful in tests.
    pub fn constant(label: impl Into<String>, lambdas: [f64; 3]) -> Self {
        Self::new(label, lambdas.map(TimeFunction::constant))
    }

    /// Marks the end of the region in which the map is known to be CP.
    pub fn with_validated_until(mut self, t: f64) -> Self {
        self.validated_until = t;
        self
    }

    pub fn validated_until(&self) -> f64 {
        self.validated_until
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lambda(&self, axis: Axis) -> &TimeFunction {
        &self.lambdas[axis.index()]
    }

    pub fn lambda_functions(&self) -> &[TimeFunction; 3] {
        &self.lambdas
    }

    pub fn lambdas_at(&self, t: f64) -> [f64; 3] {
        [
            self.lambdas[0].eval(t),
            self.lambdas[1].eval(t),
            self.lambdas[2].eval(t),
        ]
    }

    pub fn probs_at(&self, t: f64) -> ProbabilityVector {
        lambdas_to_probs(self.lambdas_at(t))
    }

    pub fn domain_end(&self) -> f64 {
        self.lambdas
            .iter()
            .map(TimeFunction::domain_end)
            .fold(f64::INFINITY, f64::min)
    }

    /// Union of the declared poles of the three eigenvalue functions.
    pub fn declared_poles(&self, horizon: f64) -> Vec<f64> {
        let poles = self
            .lambdas
            .iter()
            .fold(Poles::None, |acc, l| acc.union(l.poles(), horizon));
        poles.in_range(0.0, horizon)
    }
}

/// Outcome of a complete-positivity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpCheck {
    pub cp: bool,
    pub probs: ProbabilityVector,
    /// Smallest weight and its index, reported whether or not it violates.
    pub worst_index: usize,
    pub worst_value: f64,
}

pub fn check_cp_lambdas(lambdas: [f64; 3], eps_cp: f64) -> CpCheck {
    let probs = lambdas_to_probs(lambdas);
    let (worst_index, worst_value) = probs.min();
    CpCheck {
        cp: worst_value >= -eps_cp,
        probs,
        worst_index,
        worst_value,
    }
}

pub fn is_cp(ch: &PauliChannel, t: f64, eps_cp: f64) -> CpCheck {
    check_cp_lambdas(ch.lambdas_at(t), eps_cp)
}

/// Pauli matrices `[I, X, Y, Z]`.
pub fn pauli_matrices() -> [Matrix2<Complex64>; 4] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

/// Applies the map with eigenvalues `lambdas` to an arbitrary 2x2 operator
/// via its Pauli expansion.
fn apply_to_operator(lambdas: [f64; 3], m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let sigma = pauli_matrices();
    let scale = [1.0, lambdas[0], lambdas[1], lambdas[2]];
    let mut out = Matrix2::zeros();
    for (s, &l) in sigma.iter().zip(&scale) {
        let coeff = (s * m).trace() * 0.5;
        out += s * (coeff * l);
    }
    out
}

/// Choi matrix built from the normalised maximally entangled state, using
/// the map's action on matrix units:
/// `chi = 1/2 sum_ab E(|a><b|) (x) |a><b|`.
pub fn choi_from_lambdas(lambdas: [f64; 3]) -> Matrix4<Complex64> {
    let mut chi = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            let mut unit = Matrix2::<Complex64>::zeros();
            unit[(a, b)] = Complex64::new(1.0, 0.0);
            let image = apply_to_operator(lambdas, &unit);
            chi += image.kronecker(&unit) * Complex64::new(0.5, 0.0);
        }
    }
    chi
}

pub fn choi_matrix(ch: &PauliChannel, t: f64) -> Matrix4<Complex64> {
    choi_from_lambdas(ch.lambdas_at(t))
}

/// Eigenvalues of a Hermitian 4x4 matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    let eig = m.symmetric_eigen();
    let mut out = [0.0; 4];
    for (o, v) in out.iter_mut().zip(eig.eigenvalues.iter()) {
        *o = *v;
    }
    out.sort_by(f64::total_cmp);
    out
}

/// `r_j -> lambda_j(t) r_j`.
pub fn apply(ch: &PauliChannel, s: &BlochState, t: f64) -> BlochState {
    let l = ch.lambdas_at(t);
    BlochState([l[0] * s.0[0], l[1] * s.0[1], l[2] * s.0[2]])
}

/// Kraus operators `sqrt(k_i) sigma_i`, dropping zero weights.
pub fn kraus_operators(ch: &PauliChannel, t: f64, eps_cp: f64) -> Result<Vec<Matrix2<Complex64>>> {
    let check = is_cp(ch, t, eps_cp);
    if !check.cp {
        return Err(Error::NotCp {
            t,
            index: check.worst_index,
            value: check.worst_value,
        });
    }
    let sigma = pauli_matrices();
    Ok(check
        .probs
        .0
        .iter()
        .zip(sigma)
        .filter(|(k, _)| **k > 0.0)
        .map(|(k, s)| s * Complex64::new(k.sqrt(), 0.0))
        .collect())
}
