//! Parametric channel families: oscillating and semigroup flips, random
//! telegraph noise (RTN) channels, and dephasing channels defined by their
//! rate.

use std::f64::consts::PI;

use serde::Serialize;

use crate::channel::{Axis, PauliChannel};
use crate::error::{Error, Result};
use crate::mixing::{flip_channel_fn, MixtureWeights};
use crate::numerics::{integrate, linspace, Poles, TimeFunction};

/// Random telegraph noise parameters: spectral bandwidth `w` and coupling `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RtnParams {
    pub w: f64,
    pub d: f64,
}

/// Which closed form of the RTN eigenvalue applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RtnBranch {
    /// `2d > w`: damped oscillation with frequency `mu`.
    Oscillatory { mu: f64 },
    /// `2d = w`.
    Critical,
    /// `2d < w`: monotone decay, `nu = sqrt(1 - (2d/w)^2)`.
    Overdamped { nu: f64 },
}

const CRITICAL_TOL: f64 = 1e-14;

impl RtnParams {
    pub fn new(w: f64, d: f64) -> Result<Self> {
        if !(w > 0.0) || !(d > 0.0) || !w.is_finite() || !d.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "RTN needs w > 0 and d > 0, got w = {w}, d = {d}"
            )));
        }
        Ok(Self { w, d })
    }

    /// `(2d/w)^2 - 1`.
    pub fn mu_squared(&self) -> f64 {
        (2.0 * self.d / self.w).powi(2) - 1.0
    }

    pub fn branch(&self) -> RtnBranch {
        let m2 = self.mu_squared();
        if m2.abs() < CRITICAL_TOL {
            RtnBranch::Critical
        } else if m2 > 0.0 {
            RtnBranch::Oscillatory { mu: m2.sqrt() }
        } else {
            RtnBranch::Overdamped { nu: (-m2).sqrt() }
        }
    }
}

/// `Lambda(t) = e^{-wt} [sin(w t mu) / mu + cos(w t mu)]`, continued to the
/// hyperbolic form when `mu` is imaginary and to `e^{-wt}(1 + wt)` at `mu = 0`.
pub fn rtn_lambda(t: f64, p: &RtnParams) -> f64 {
    let x = p.w * t;
    match p.branch() {
        RtnBranch::Oscillatory { mu } => (-x).exp() * ((x * mu).sin() / mu + (x * mu).cos()),
        RtnBranch::Critical => (-x).exp() * (1.0 + x),
        RtnBranch::Overdamped { nu } => {
            // e^{-x} cosh(x nu) and e^{-x} sinh(x nu) without overflow
            let slow = (-x * (1.0 - nu)).exp();
            let fast = (-x * (1.0 + nu)).exp();
            0.5 * (slow + fast) + 0.5 * (slow - fast) / nu
        }
    }
}

pub fn rtn_lambda_derivative(t: f64, p: &RtnParams) -> f64 {
    let x = p.w * t;
    match p.branch() {
        RtnBranch::Oscillatory { mu } => -p.w * (-x).exp() * (x * mu).sin() * (1.0 / mu + mu),
        RtnBranch::Critical => -p.w * x * (-x).exp(),
        RtnBranch::Overdamped { nu } => {
            let slow = (-x * (1.0 - nu)).exp();
            let fast = (-x * (1.0 + nu)).exp();
            -p.w * 0.5 * (slow - fast) * (1.0 / nu - nu)
        }
    }
}

pub fn rtn_lambda_function(p: RtnParams) -> TimeFunction {
    TimeFunction::new(move |t| rtn_lambda(t, &p)).with_derivative(move |t| rtn_lambda_derivative(t, &p))
}

/// `f = (1 - Lambda) / 2`.
pub fn rtn_decoherence(p: RtnParams) -> TimeFunction {
    rtn_lambda_function(p).affine(0.5, -0.5)
}

/// Checks `0 <= Lambda <= 1` on a grid over `[0, horizon]`.
pub fn validate_confined(p: &RtnParams, horizon: f64, grid: usize) -> Result<()> {
    for t in linspace(0.0, horizon, grid.max(2)) {
        let v = rtn_lambda(t, p);
        if !(-1e-12..=1.0 + 1e-12).contains(&v) {
            return Err(Error::InvalidParameters(format!(
                "RTN Lambda({t}) = {v} leaves [0, 1] for w = {}, d = {}",
                p.w, p.d
            )));
        }
    }
    Ok(())
}

/// `f = sin^2(mu t) / 2`.
pub fn cosine_decoherence(mu: f64) -> TimeFunction {
    bounded_cosine_decoherence(0.5, mu)
}

/// `f = amplitude * sin^2(mu t)`.
pub fn bounded_cosine_decoherence(amplitude: f64, mu: f64) -> TimeFunction {
    TimeFunction::new(move |t| amplitude * (mu * t).sin().powi(2))
        .with_derivative(move |t| amplitude * mu * (2.0 * mu * t).sin())
}

/// `f = (1 - e^{-2 gamma0 t}) / 2`.
pub fn semigroup_decoherence(gamma0: f64) -> TimeFunction {
    TimeFunction::new(move |t| -0.5 * (-2.0 * gamma0 * t).exp_m1())
        .with_derivative(move |t| gamma0 * (-2.0 * gamma0 * t).exp())
}

/// `f = amplitude * (1 - e^{-rate t})`.
pub fn saturating_decoherence(amplitude: f64, rate: f64) -> TimeFunction {
    TimeFunction::new(move |t| -amplitude * (-rate * t).exp_m1())
        .with_derivative(move |t| amplitude * rate * (-rate * t).exp())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("{name} must be positive, got {v}")))
    }
}

pub fn cosine_flip(axis: Axis, mu: f64) -> Result<PauliChannel> {
    check_positive("mu", mu)?;
    Ok(relabel(
        flip_channel_fn(axis, &cosine_decoherence(mu)),
        format!("cosine_flip({axis:?}, mu={mu})"),
    ))
}

pub fn semigroup_flip(axis: Axis, gamma0: f64) -> Result<PauliChannel> {
    check_positive("gamma0", gamma0)?;
    Ok(relabel(
        flip_channel_fn(axis, &semigroup_decoherence(gamma0)),
        format!("semigroup_flip({axis:?}, gamma0={gamma0})"),
    ))
}

pub fn rtn_flip(axis: Axis, p: RtnParams) -> PauliChannel {
    relabel(
        flip_channel_fn(axis, &rtn_decoherence(p)),
        format!("rtn_flip({axis:?}, w={}, d={})", p.w, p.d),
    )
}

/// Mixture of X, Y and Z RTN flips sharing one `Lambda`:
/// `lambda_1 = 1 - (b + c)(1 - Lambda)` and cyclically.
pub fn isotropic_rtn(p: RtnParams, weights: MixtureWeights) -> PauliChannel {
    let base = rtn_lambda_function(p);
    let lambdas = Axis::ALL.map(|axis| {
        let s = weights.off_axis_sum(axis);
        // 1 - s (1 - Lambda) = (1 - s) + s Lambda
        base.affine(1.0 - s, s)
    });
    PauliChannel::new(format!("isotropic_rtn(w={}, d={})", p.w, p.d), lambdas)
}

/// [`isotropic_rtn`] after checking that `Lambda` stays in `[0, 1]` on the horizon.
pub fn isotropic_rtn_confined(
    p: RtnParams,
    weights: MixtureWeights,
    horizon: f64,
    grid: usize,
) -> Result<PauliChannel> {
    validate_confined(&p, horizon, grid)?;
    Ok(isotropic_rtn(p, weights))
}

fn relabel(ch: PauliChannel, label: String) -> PauliChannel {
    let validated = ch.validated_until();
    PauliChannel::new(label, ch.lambda_functions().clone()).with_validated_until(validated)
}

/// Rate of a dephasing generator `gamma(t) (sigma rho sigma - rho)`.
#[derive(Debug, Clone)]
pub enum RateProfile {
    Zero,
    /// `gamma = tan(omega t)`.
    Tan {
        omega: f64,
    },
    /// `gamma = tan^2(omega t)`.
    TanSquared {
        omega: f64,
    },
    /// Any rate; eigenvalues come from Simpson quadrature of the rate.
    Custom(TimeFunction),
}

/// Dephasing about `axis` with the given rate:
/// `lambda_axis = 1` and `lambda_off = exp(-2 int_0^t gamma)`.
///
/// For `tan` the closed form is `|cos(omega t)|^(2/omega)`, which is regular
/// across the poles of the rate. For `tan^2` the eigenvalue reaches zero at
/// the first pole `pi / (2 omega)` and the formula continued past it exceeds
/// one, so the channel is marked as CP-validated only up to that pole; the
/// poles are declared on the eigenvalue function and evaluate to the left
/// limit 0.
pub fn rate_defined_dephasing(profile: &RateProfile, axis: Axis) -> Result<PauliChannel> {
    let (off, label, validated) = match profile {
        RateProfile::Zero => (
            TimeFunction::constant(1.0),
            "rate_dephasing(0)".to_string(),
            f64::INFINITY,
        ),
        &RateProfile::Tan { omega } => {
            check_positive("omega", omega)?;
            let exponent = 2.0 / omega;
            let f = TimeFunction::new(move |t| (omega * t).cos().abs().powf(exponent)).with_derivative(move |t| {
                let c = (omega * t).cos();
                if c == 0.0 {
                    return 0.0;
                }
                -2.0 * (omega * t).sin() * c.signum() * c.abs().powf(exponent - 1.0)
            });
            (f, format!("rate_dephasing(tan, omega={omega})"), f64::INFINITY)
        }
        &RateProfile::TanSquared { omega } => {
            check_positive("omega", omega)?;
            let first = PI / (2.0 * omega);
            let value = move |t: f64| {
                if (omega * t).cos().abs() < 1e-12 {
                    0.0
                } else {
                    (-2.0 * ((omega * t).tan() / omega - t)).exp()
                }
            };
            let f = TimeFunction::new(value)
                .with_derivative(move |t| -2.0 * (omega * t).tan().powi(2) * value(t))
                .with_poles(Poles::Periodic {
                    first,
                    period: PI / omega,
                });
            (f, format!("rate_dephasing(tan^2, omega={omega})"), first)
        }
        RateProfile::Custom(gamma) => {
            let first_pole = gamma.poles().first_from(0.0).filter(|&p| p <= gamma.domain_end());
            let end = first_pole.unwrap_or(gamma.domain_end()).min(gamma.domain_end());
            let g = gamma.clone();
            let value = move |t: f64| {
                if let Some(p) = first_pole {
                    if (t - p).abs() < 1e-12 {
                        return 0.0;
                    }
                    if t > p {
                        return f64::NAN;
                    }
                }
                if t <= 0.0 {
                    return 1.0;
                }
                let panels = ((256.0 * t).ceil() as usize).max(16);
                match integrate(&g, 0.0, t, panels) {
                    Ok(acc) => (-2.0 * acc).exp(),
                    Err(_) => f64::NAN,
                }
            };
            let value = std::sync::Arc::new(value);
            let v = value.clone();
            let g = gamma.clone();
            let mut f = TimeFunction::new(move |t| value(t))
                .with_derivative(move |t| -2.0 * g.eval(t) * v(t))
                .with_domain_end(end);
            if let Some(p) = first_pole {
                f = f.with_poles(Poles::List(vec![p]));
            }
            (f, "rate_dephasing(custom)".to_string(), end)
        }
    };
    let lambdas = Axis::ALL.map(|a| {
        if a == axis {
            TimeFunction::constant(1.0)
        } else {
            off.clone()
        }
    });
    Ok(PauliChannel::new(label, lambdas).with_validated_until(validated))
}
