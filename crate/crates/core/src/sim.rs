//! Fixed-step RK4 integration of the canonical Pauli master equation on the
//! Bloch vector, used to check that the rates reproduce the closed-form map.
//!
//! For `L[rho] = sum_j gamma_j (sigma_j rho sigma_j - rho)` the Bloch
//! components decouple:
//!
//! ```text
//! r1' = -2 (gamma2 + gamma3) r1
//! r2' = -2 (gamma1 + gamma3) r2
//! r3' = -2 (gamma1 + gamma2) r3
//! ```

use serde::Serialize;

use crate::channel::{Axis, BlochState, PauliChannel};
use crate::error::{Error, Result};
use crate::generator::{decay_rates, DecayRates};

/// Excised half-width around a pole, in steps.
pub const EXCISION_STEPS: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub bloch_states: Vec<BlochState>,
    /// Eigenvalues implied by the rates (the same equation started from 1).
    pub lambda_traces: [Vec<f64>; 3],
}

impl TrajectoryRecord {
    fn push(&mut self, t: f64, y: &[f64; 6]) {
        self.times.push(t);
        self.bloch_states.push(BlochState([y[0], y[1], y[2]]));
        for j in 0..3 {
            self.lambda_traces[j].push(y[3 + j]);
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Consecutive samples where the Bloch vector grows, as `(t1, t2)` pairs.
    pub fn norm_increases(&self, tol: f64) -> Vec<(f64, f64)> {
        self.times
            .windows(2)
            .zip(self.bloch_states.windows(2))
            .filter(|(_, s)| s[1].norm() > s[0].norm() + tol)
            .map(|(t, _)| (t[0], t[1]))
            .collect()
    }
}

/// What to do when a rate pole lies inside the integration range.
#[derive(Debug, Clone, Copy)]
pub enum Excision<'a> {
    /// Fail with a pole-in-range error.
    Forbid,
    /// Stop `10 dt` before each pole and restart `10 dt` after it from the
    /// closed-form map of the given channel.
    Reanchor(&'a PauliChannel),
}

fn rhs(rates: &DecayRates, t: f64, y: &[f64; 6]) -> [f64; 6] {
    let g = rates.at(t);
    let c = [-2.0 * (g[1] + g[2]), -2.0 * (g[0] + g[2]), -2.0 * (g[0] + g[1])];
    [
        c[0] * y[0],
        c[1] * y[1],
        c[2] * y[2],
        c[0] * y[3],
        c[1] * y[4],
        c[2] * y[5],
    ]
}

fn rk4_step(rates: &DecayRates, t: f64, y: &[f64; 6], h: f64) -> [f64; 6] {
    let add = |a: &[f64; 6], b: &[f64; 6], s: f64| -> [f64; 6] { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = rhs(rates, t, y);
    let k2 = rhs(rates, t + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = rhs(rates, t + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = rhs(rates, t + h, &add(y, &k3, h));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Integrates the Bloch vector from `s0` over `[0, horizon]`. Each pole-free
/// segment is split into equal steps no longer than `dt`.
pub fn evolve(
    rates: &DecayRates,
    s0: BlochState,
    horizon: f64,
    dt: f64,
    excision: Excision<'_>,
) -> Result<TrajectoryRecord> {
    if !(dt > 0.0) || !(horizon >= 0.0) {
        return Err(Error::InvalidParameters(format!(
            "need dt > 0 and horizon >= 0, got dt = {dt}, horizon = {horizon}"
        )));
    }
    let poles = rates.poles_in(0.0, horizon);
    let channel = match (excision, poles.first()) {
        (Excision::Forbid, Some(&pole)) => {
            return Err(Error::PoleInRange {
                pole,
                start: 0.0,
                end: horizon,
            })
        }
        (Excision::Reanchor(ch), _) => Some(ch),
        (Excision::Forbid, None) => None,
    };

    let gap = EXCISION_STEPS * dt;
    let mut segments = Vec::new();
    let mut start = 0.0;
    for &p in &poles {
        segments.push((start, (p - gap).min(horizon)));
        start = p + gap;
    }
    segments.push((start, horizon));

    let mut record = TrajectoryRecord {
        times: Vec::new(),
        bloch_states: Vec::new(),
        lambda_traces: [Vec::new(), Vec::new(), Vec::new()],
    };
    let mut y = [s0.0[0], s0.0[1], s0.0[2], 1.0, 1.0, 1.0];
    for (i, &(a, b)) in segments.iter().enumerate() {
        if a > horizon {
            break;
        }
        if i > 0 {
            let ch = channel.expect("poles imply a re-anchoring channel");
            let l = ch.lambdas_at(a);
            y = [l[0] * s0.0[0], l[1] * s0.0[1], l[2] * s0.0[2], l[0], l[1], l[2]];
        }
        record.push(a, &y);
        if b <= a {
            continue;
        }
        let steps = ((b - a) / dt - 1e-9).ceil().max(1.0) as usize;
        let h = (b - a) / steps as f64;
        for k in 0..steps {
            let t = a + h * k as f64;
            y = rk4_step(rates, t, &y, h);
            let t_next = if k + 1 == steps { b } else { a + h * (k + 1) as f64 };
            record.push(t_next, &y);
        }
    }
    Ok(record)
}

/// Largest deviation between the integrated Bloch components and the
/// closed-form `lambda_j(t) r_j(0)`, over the three axis-aligned initial states.
pub fn roundtrip_error(ch: &PauliChannel, horizon: f64, dt: f64) -> Result<f64> {
    roundtrip_error_with(ch, horizon, dt, false)
}

pub fn roundtrip_error_with(ch: &PauliChannel, horizon: f64, dt: f64, excise: bool) -> Result<f64> {
    let rates = decay_rates(ch, horizon);
    let excision = if excise {
        Excision::Reanchor(ch)
    } else {
        Excision::Forbid
    };
    let mut worst = 0.0f64;
    for axis in Axis::ALL {
        let s0 = BlochState::axis(axis);
        let record = evolve(&rates, s0, horizon, dt, excision)?;
        for (t, s) in record.times.iter().zip(&record.bloch_states) {
            let expected = ch.lambdas_at(*t)[axis.index()];
            let err = (s.0[axis.index()] - expected).abs();
            if !err.is_finite() {
                return Err(Error::PoleInRange {
                    pole: *t,
                    start: 0.0,
                    end: horizon,
                });
            }
            worst = worst.max(err);
        }
    }
    Ok(worst)
}
