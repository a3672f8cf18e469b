//! Coordinate ascent over protocol configurations.
//!
//! Parameters are the Schmidt angle `chi` of `cos(chi)|01> - sin(chi)|10>`
//! and every measurement angle in the z-x plane. Each sweep visits the
//! parameters in order; a coordinate is first scanned on a coarse grid over
//! its full period, then refined by golden-section search around the best
//! sample. A move is taken only if it strictly improves the value, so the
//! value never decreases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ewfs_behavior, EwfsConfig, PureState, QubitMeasurement};
use crate::behavior::{evaluate_inequality, Inequality};
use crate::error::{Error, Result};

const SAMPLES: usize = 32;
const GOLDEN_ITERS: usize = 48;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub config: EwfsConfig,
    pub value: f64,
    /// Value after each sweep.
    pub history: Vec<f64>,
}

struct Problem<'a> {
    ineq: &'a Inequality<f64>,
    nx: usize,
    ny: usize,
}

impl Problem<'_> {
    fn new(ineq: &Inequality<f64>) -> Result<Problem<'_>> {
        if !ineq.scenario.is_binary() {
            return Err(Error::InvalidScenario(format!("optimizer needs binary outcomes, got {}", ineq.scenario)));
        }
        Ok(Problem { ineq, nx: ineq.scenario.x_count, ny: ineq.scenario.y_count })
    }

    /// `[chi, charlie, debbie, alice 2.., bob 2..]`
    fn config(&self, p: &[f64]) -> EwfsConfig {
        EwfsConfig {
            shared_state: PureState::schmidt(p[0]),
            charlie_basis: QubitMeasurement::zx(p[1]),
            debbie_basis: QubitMeasurement::zx(p[2]),
            alice_settings: p[3..3 + self.nx - 1].iter().map(|&t| QubitMeasurement::zx(t)).collect(),
            bob_settings: p[3 + self.nx - 1..].iter().map(|&t| QubitMeasurement::zx(t)).collect(),
        }
    }

    fn params(&self, cfg: &EwfsConfig) -> Result<Vec<f64>> {
        if cfg.alice_settings.len() + 1 != self.nx || cfg.bob_settings.len() + 1 != self.ny {
            return Err(Error::ScenarioMismatch("start configuration does not match the inequality's settings".into()));
        }
        let amp = cfg.shared_state.amplitudes();
        if amp.len() != 4 {
            return Err(Error::Dimension("start state must have 2 qubits".into()));
        }
        let chi = (-amp[2].re).atan2(amp[1].re);
        let rebuilt = PureState::schmidt(chi);
        if rebuilt.amplitudes().iter().zip(amp).any(|(a, b)| (a - b).norm() > 1e-12) {
            return Err(Error::Precondition("start state is not of the form cos(chi)|01> - sin(chi)|10>".into()));
        }
        let ms = [cfg.charlie_basis, cfg.debbie_basis]
            .into_iter()
            .chain(cfg.alice_settings.iter().copied())
            .chain(cfg.bob_settings.iter().copied());
        let mut p = vec![chi];
        for m in ms {
            if m.phi != 0.0 {
                return Err(Error::Precondition("optimizer works in the z-x plane (phi = 0)".into()));
            }
            p.push(m.theta);
        }
        Ok(p)
    }

    fn value(&self, p: &[f64]) -> f64 {
        let b = ewfs_behavior(&self.config(p)).expect("optimizer configs are valid");
        evaluate_inequality(self.ineq, &b).expect("scenario matches")
    }

    fn period(i: usize) -> f64 {
        if i == 0 {
            std::f64::consts::PI
        } else {
            2.0 * std::f64::consts::PI
        }
    }

    /// Best value of coordinate `i` with the others fixed.
    fn line_search(&self, p: &[f64], i: usize) -> (f64, f64) {
        let mut q = p.to_vec();
        let mut eval = |t: f64| {
            q[i] = t;
            self.value(&q)
        };
        let h = Self::period(i) / SAMPLES as f64;
        let (mut best_t, mut best_v) = (0.0, f64::NEG_INFINITY);
        for j in 0..SAMPLES {
            let t = j as f64 * h;
            let v = eval(t);
            if v > best_v {
                best_t = t;
                best_v = v;
            }
        }
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (best_t - h, best_t + h);
        let mut c = hi - g * (hi - lo);
        let mut d = lo + g * (hi - lo);
        let (mut fc, mut fd) = (eval(c), eval(d));
        for _ in 0..GOLDEN_ITERS {
            if fc > fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = eval(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = eval(d);
            }
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v > best_v {
                best_t = t;
                best_v = v;
            }
        }
        (best_t, best_v)
    }

    fn ascend(&self, mut p: Vec<f64>, steps: usize) -> OptimizeResult {
        let mut value = self.value(&p);
        let mut history = Vec::with_capacity(steps);
        for _ in 0..steps {
            for i in 0..p.len() {
                let (t, v) = self.line_search(&p, i);
                if v > value {
                    p[i] = t;
                    value = v;
                }
            }
            history.push(value);
        }
        OptimizeResult { config: self.config(&p), value, history }
    }
}

/// Maximize the inequality's functional over protocol configurations from a
/// seeded random start. Deterministic in `(ineq, steps, seed)`.
pub fn optimize_violation(ineq: &Inequality<f64>, steps: usize, seed: u64) -> Result<OptimizeResult> {
    let prob = Problem::new(ineq)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3 + (prob.nx - 1) + (prob.ny - 1);
    let p: Vec<f64> = (0..n).map(|i| rng.gen_range(0.0..Problem::period(i))).collect();
    Ok(prob.ascend(p, steps))
}

/// Same ascent from a given configuration (state in the Schmidt family,
/// all measurements in the z-x plane).
pub fn optimize_from(ineq: &Inequality<f64>, start: &EwfsConfig, steps: usize) -> Result<OptimizeResult> {
    let prob = Problem::new(ineq)?;
    let p = prob.params(start)?;
    Ok(prob.ascend(p, steps))
}
