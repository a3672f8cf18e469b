//! State-vector simulation of the extended Wigner's friend protocol.
//!
//! Outcome label 1 is the `+n` projector of a qubit measurement, which at
//! `theta = 0` is the computational basis state `|0>`. Qubit 0 is the most
//! significant bit of an amplitude index.

pub mod grid;
pub mod optimize;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};

pub use grid::{tsirelson_grid, tsirelson_grid_capped, GridResult, DEFAULT_GRID_CAP};
pub use optimize::{optimize_from, optimize_violation, OptimizeResult};

/// Tolerance on the norm of a [`PureState`].
pub const NORM_TOLERANCE: f64 = 1e-12;

type Mat2 = [[Complex64; 2]; 2];
type Mat4 = [[Complex64; 4]; 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    qubit_count: usize,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateRepr> for PureState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        PureState::new(r.amplitudes.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<PureState> for StateRepr {
    fn from(s: PureState) -> Self {
        StateRepr { amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Dimension(format!("{n} amplitudes is not a power of two >= 2")));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Precondition(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(PureState { qubit_count: n.trailing_zeros() as usize, amplitudes })
    }

    /// `cos(chi)|01> - sin(chi)|10>`; the singlet at `chi = pi/4`.
    pub fn schmidt(chi: f64) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); 4];
        a[1] = Complex64::new(chi.cos(), 0.0);
        a[2] = Complex64::new(-chi.sin(), 0.0);
        PureState { amplitudes: a, qubit_count: 2 }
    }

    pub fn singlet() -> Self {
        Self::schmidt(std::f64::consts::FRAC_PI_4)
    }

    /// Product of z eigenstates, one outcome label (1 or 2) per qubit.
    pub fn product(outcomes: &[usize]) -> Result<Self> {
        if outcomes.is_empty() || outcomes.iter().any(|&o| o != 1 && o != 2) {
            return Err(Error::OutOfRange(format!("product state labels {outcomes:?}")));
        }
        let idx = outcomes.iter().fold(0usize, |acc, &o| (acc << 1) | (o - 1));
        let mut a = vec![Complex64::new(0.0, 0.0); 1 << outcomes.len()];
        a[idx] = Complex64::new(1.0, 0.0);
        PureState::new(a)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }
}

/// Projective qubit measurement along the Bloch direction
/// `(sin t cos f, sin t sin f, cos t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitMeasurement {
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl QubitMeasurement {
    pub fn new(theta: f64, phi: f64) -> Self {
        QubitMeasurement { theta, phi }
    }

    /// Measurement in the z-x plane.
    pub fn zx(theta: f64) -> Self {
        QubitMeasurement { theta, phi: 0.0 }
    }

    /// Eigenvector for outcome 1 (`+n`) or 2 (`-n`).
    pub fn eigenvector(&self, outcome: usize) -> [Complex64; 2] {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let e = Complex64::from_polar(1.0, self.phi);
        match outcome {
            1 => [Complex64::new(c, 0.0), e * s],
            _ => [Complex64::new(s, 0.0), -e * c],
        }
    }

    /// `(I +- n.sigma) / 2`.
    pub fn projector(&self, outcome: usize) -> Mat2 {
        let v = self.eigenvector(outcome);
        [[v[0] * v[0].conj(), v[0] * v[1].conj()], [v[1] * v[0].conj(), v[1] * v[1].conj()]]
    }
}

/// Apply a two-qubit gate to qubits `q1` (high bit of the gate index) and
/// `q2` of an `n`-qubit register.
fn apply_gate2(state: &mut [Complex64], n: usize, q1: usize, q2: usize, m: &Mat4) {
    let b1 = 1 << (n - 1 - q1);
    let b2 = 1 << (n - 1 - q2);
    for i in 0..state.len() {
        if i & b1 != 0 || i & b2 != 0 {
            continue;
        }
        let idx = [i, i | b2, i | b1, i | b1 | b2];
        let v = idx.map(|k| state[k]);
        for (r, &k) in idx.iter().enumerate() {
            state[k] = (0..4).map(|c| m[r][c] * v[c]).sum();
        }
    }
}

/// Controlled copy in `basis`: `|u_k>|0> -> |u_k>|k>` on (particle, record).
fn copy_gate(basis: &QubitMeasurement) -> Mat4 {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let id = [[one, zero], [zero, one]];
    let x = [[zero, one], [one, zero]];
    let (p1, p2) = (basis.projector(1), basis.projector(2));
    let mut m = [[zero; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let (pr, rr, pc, rc) = (r >> 1, r & 1, c >> 1, c & 1);
            m[r][c] = p1[pr][pc] * id[rr][rc] + p2[pr][pc] * x[rr][rc];
        }
    }
    m
}

fn adjoint(m: &Mat4) -> Mat4 {
    let mut out = *m;
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = m[c][r].conj();
        }
    }
    out
}

/// `sum |<u_i| (x) <v_j| psi|^2` over the other qubits.
fn joint_probability(state: &[Complex64], n: usize, q1: usize, u: &[Complex64; 2], q2: usize, v: &[Complex64; 2]) -> f64 {
    let b1 = 1 << (n - 1 - q1);
    let b2 = 1 << (n - 1 - q2);
    let mut p = 0.0;
    for i in 0..state.len() {
        if i & b1 != 0 || i & b2 != 0 {
            continue;
        }
        let amp = u[0].conj() * v[0].conj() * state[i]
            + u[0].conj() * v[1].conj() * state[i | b2]
            + u[1].conj() * v[0].conj() * state[i | b1]
            + u[1].conj() * v[1].conj() * state[i | b1 | b2];
        p += amp.norm_sqr();
    }
    p
}

/// `p(a,b|x,y) = <psi| P_a^x (x) P_b^y |psi>` for a two-qubit state.
pub fn born_behavior(state: &PureState, alice: &[QubitMeasurement], bob: &[QubitMeasurement]) -> Result<Behavior<f64>> {
    if state.qubit_count != 2 {
        return Err(Error::Dimension(format!("Born behavior needs 2 qubits, state has {}", state.qubit_count)));
    }
    if alice.is_empty() || bob.is_empty() {
        return Err(Error::Precondition("measurement lists must be nonempty".into()));
    }
    let sc = Scenario::new(alice.len(), bob.len(), 2, 2)?;
    Ok(Behavior::from_fn(sc, |a, b, x, y| {
        joint_probability(&state.amplitudes, 2, 0, &alice[x - 1].eigenvector(a), 1, &bob[y - 1].eigenvector(b))
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EwfsConfig {
    pub shared_state: PureState,
    pub charlie_basis: QubitMeasurement,
    pub debbie_basis: QubitMeasurement,
    /// Settings x = 2, 3, ...
    pub alice_settings: Vec<QubitMeasurement>,
    /// Settings y = 2, 3, ...
    pub bob_settings: Vec<QubitMeasurement>,
}

const A: usize = 0;
const C: usize = 1;
const B: usize = 2;
const D: usize = 3;

impl EwfsConfig {
    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(1 + self.alice_settings.len(), 1 + self.bob_settings.len(), 2, 2)
    }

    /// Alice's effective measurement per setting: the friend's basis at
    /// x = 1, then her own settings.
    pub fn effective_alice(&self) -> Vec<QubitMeasurement> {
        std::iter::once(self.charlie_basis).chain(self.alice_settings.iter().copied()).collect()
    }

    pub fn effective_bob(&self) -> Vec<QubitMeasurement> {
        std::iter::once(self.debbie_basis).chain(self.bob_settings.iter().copied()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.shared_state.qubit_count != 2 {
            return Err(Error::Dimension(format!("shared state has {} qubits, expected 2", self.shared_state.qubit_count)));
        }
        let finite = |m: &QubitMeasurement| m.theta.is_finite() && m.phi.is_finite();
        let all = [self.charlie_basis, self.debbie_basis]
            .into_iter()
            .chain(self.alice_settings.iter().copied())
            .chain(self.bob_settings.iter().copied());
        if !all.clone().all(|m| finite(&m)) {
            return Err(Error::OutOfRange("non-finite measurement angle".into()));
        }
        Ok(())
    }
}

/// Simulate the protocol on the register (Alice particle, Charlie record,
/// Bob particle, Debbie record).
pub fn ewfs_behavior(cfg: &EwfsConfig) -> Result<Behavior<f64>> {
    cfg.validate()?;
    let sc = cfg.scenario()?;
    // |psi>_{AB} |0>_C |0>_D in order (A, C, B, D)
    let mut reg = vec![Complex64::new(0.0, 0.0); 16];
    for (i, z) in cfg.shared_state.amplitudes.iter().enumerate() {
        reg[((i >> 1) << 3) | ((i & 1) << 1)] = *z;
    }
    let uc = copy_gate(&cfg.charlie_basis);
    let ud = copy_gate(&cfg.debbie_basis);
    apply_gate2(&mut reg, 4, A, C, &uc);
    apply_gate2(&mut reg, 4, B, D, &ud);
    let z = QubitMeasurement::zx(0.0);
    let mut table = vec![0.0; sc.len()];
    for x in 1..=sc.x_count {
        let mut rx = reg.clone();
        if x > 1 {
            apply_gate2(&mut rx, 4, A, C, &adjoint(&uc));
        }
        let (qa, ma) = if x == 1 { (C, z) } else { (A, cfg.alice_settings[x - 2]) };
        for y in 1..=sc.y_count {
            let mut rxy = rx.clone();
            if y > 1 {
                apply_gate2(&mut rxy, 4, B, D, &adjoint(&ud));
            }
            let (qb, mb) = if y == 1 { (D, z) } else { (B, cfg.bob_settings[y - 2]) };
            for a in 1..=2 {
                for b in 1..=2 {
                    table[sc.index(a, b, x, y)] = joint_probability(&rxy, 4, qa, &ma.eigenvector(a), qb, &mb.eigenvector(b));
                }
            }
        }
    }
    Behavior::from_table(sc, table)
}
