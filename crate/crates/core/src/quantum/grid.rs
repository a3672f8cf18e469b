//! Exhaustive angle grid for the singlet in the z-x plane.
//!
//! Uses the closed form `p(a,b|s,t) = (1 - s_a s_b cos(s - t)) / 4` with
//! `s_1 = +1`, `s_2 = -1`, so it shares no code with the state-vector
//! simulator. Grid points are `2 pi k / resolution`. Alice's setting 1 is
//! pinned to angle 0: a common rotation of all angles leaves the singlet's
//! correlations unchanged and maps the grid to itself. For fixed Alice
//! angles the functional splits into one term per Bob setting, each
//! maximized over the grid independently.

use rayon::prelude::*;

use super::{EwfsConfig, PureState, QubitMeasurement};
use crate::behavior::Inequality;
use crate::error::{Error, Result};

/// Bound on `resolution^x_count * y_count` grid work units.
pub const DEFAULT_GRID_CAP: u128 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub value: f64,
    pub resolution: usize,
    pub alice_angles: Vec<f64>,
    pub bob_angles: Vec<f64>,
}

impl GridResult {
    /// The maximizing point as a protocol configuration with the singlet.
    pub fn to_config(&self) -> EwfsConfig {
        EwfsConfig {
            shared_state: PureState::singlet(),
            charlie_basis: QubitMeasurement::zx(self.alice_angles[0]),
            debbie_basis: QubitMeasurement::zx(self.bob_angles[0]),
            alice_settings: self.alice_angles[1..].iter().map(|&t| QubitMeasurement::zx(t)).collect(),
            bob_settings: self.bob_angles[1..].iter().map(|&t| QubitMeasurement::zx(t)).collect(),
        }
    }
}

pub fn tsirelson_grid(ineq: &Inequality<f64>, resolution: usize) -> Result<GridResult> {
    tsirelson_grid_capped(ineq, resolution, DEFAULT_GRID_CAP)
}

pub fn tsirelson_grid_capped(ineq: &Inequality<f64>, resolution: usize, cap: u128) -> Result<GridResult> {
    let sc = ineq.scenario;
    if !sc.is_binary() {
        return Err(Error::InvalidScenario(format!("grid search needs binary outcomes, got {sc}")));
    }
    if resolution == 0 {
        return Err(Error::OutOfRange("grid resolution must be positive".into()));
    }
    let r = resolution as u128;
    let needed = r
        .checked_pow(sc.x_count as u32)
        .and_then(|v| v.checked_mul(sc.y_count as u128))
        .unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::CapExceeded { what: format!("grid work for {sc} at resolution {resolution}"), needed, cap });
    }
    let (nx, ny) = (sc.x_count, sc.y_count);
    // correlator weight C[x][y] and constant K
    let sign = |o: usize| if o == 1 { 1.0 } else { -1.0 };
    let mut corr = vec![vec![0.0; ny]; nx];
    let mut constant = 0.0;
    for ((a, b, x, y), c) in sc.entries().zip(&ineq.coeffs) {
        corr[x - 1][y - 1] += sign(a) * sign(b) * c;
        constant += c / 4.0;
    }
    let step = 2.0 * std::f64::consts::PI / resolution as f64;
    let cos_table: Vec<f64> = (0..resolution).map(|k| (k as f64 * step).cos()).collect();
    let tuples = resolution.pow((nx - 1) as u32);
    let decode = |mut k: usize| -> Vec<usize> {
        let mut idx = vec![0usize; nx];
        for slot in idx[1..].iter_mut().rev() {
            *slot = k % resolution;
            k /= resolution;
        }
        idx
    };
    let best = (0..tuples)
        .into_par_iter()
        .map(|k| {
            let alice = decode(k);
            let mut total = constant;
            let mut bob = Vec::with_capacity(ny);
            for y in 0..ny {
                let mut arg = 0usize;
                let mut top = f64::NEG_INFINITY;
                for t in 0..resolution {
                    let mut v = 0.0;
                    for (x, &ax) in alice.iter().enumerate() {
                        v -= corr[x][y] * cos_table[(ax + resolution - t) % resolution];
                    }
                    if v > top {
                        top = v;
                        arg = t;
                    }
                }
                total += top / 4.0;
                bob.push(arg);
            }
            (total, k, bob)
        })
        .reduce_with(|p, q| if q.0 > p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p })
        .expect("at least one grid point");
    let (value, k, bob) = best;
    Ok(GridResult {
        value,
        resolution,
        alice_angles: decode(k).into_iter().map(|i| i as f64 * step).collect(),
        bob_angles: bob.into_iter().map(|i| i as f64 * step).collect(),
    })
}
