//! Canonical decay rates of a Pauli map, singular points and their sign
//! classification, and the CP-divisibility verdict.
//!
//! Rates are computed in eigenvalue space from the logarithmic derivatives
//! `l_j = d/dt ln lambda_j`:
//!
//! ```text
//! gamma_1 = (l_1 - l_2 - l_3) / 4     (and cyclically)
//! ```
//!
//! which is the inverse of `l_1 = -2 (gamma_2 + gamma_3)` for the generator
//! `L[rho] = sum_j gamma_j (sigma_j rho sigma_j - rho)`.

use serde::Serialize;

use crate::channel::{check_cp_lambdas, Axis, PauliChannel, ProbabilityVector, DEFAULT_EPS_CP};
use crate::error::{Error, Result};
use crate::numerics::{self, find_roots, linspace, Poles, TimeFunction, DEFAULT_GRID_DENSITY, DEFAULT_ROOT_TOL};

/// Rates below `-DEFAULT_EPS_RATE` count as negative.
pub const DEFAULT_EPS_RATE: f64 = 1e-8;

/// Singular times closer than this are the same singular point.
pub const SINGULAR_MERGE_RADIUS: f64 = 1e-6;

/// Grid and tolerance used when scanning eigenvalues for zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scan {
    /// Grid points per unit time.
    pub density: f64,
    pub tol: f64,
}

impl Default for Scan {
    fn default() -> Self {
        Self {
            density: DEFAULT_GRID_DENSITY,
            tol: DEFAULT_ROOT_TOL,
        }
    }
}

impl Scan {
    pub fn points(&self, t0: f64, t1: f64) -> usize {
        ((self.density * (t1 - t0)).ceil() as usize).max(2) + 1
    }
}

/// `d/dt ln lambda_j` for the three eigenvalues.
pub fn log_derivatives(ch: &PauliChannel, t: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (o, l) in out.iter_mut().zip(ch.lambda_functions()) {
        let value = l.eval(t);
        let slope = numerics::derivative(l, t);
        *o = if slope == 0.0 { 0.0 } else { slope / value };
    }
    out
}

/// Rates from logarithmic derivatives.
pub fn rates_from_log_derivatives(l: [f64; 3]) -> [f64; 3] {
    [
        0.25 * (l[0] - l[1] - l[2]),
        0.25 * (l[1] - l[0] - l[2]),
        0.25 * (l[2] - l[0] - l[1]),
    ]
}

/// The three canonical rates as time functions, with the singular times of
/// the underlying map declared as their poles.
#[derive(Debug, Clone)]
pub struct DecayRates {
    gammas: [TimeFunction; 3],
    pole_times: Vec<f64>,
}

impl DecayRates {
    /// Rates given directly as functions.
    pub fn from_functions(gammas: [TimeFunction; 3], pole_times: Vec<f64>) -> Self {
        let poles = Poles::List(pole_times.clone());
        Self {
            gammas: gammas.map(|g| g.with_poles(poles.clone())),
            pole_times,
        }
    }

    pub fn gamma(&self, axis: Axis) -> &TimeFunction {
        &self.gammas[axis.index()]
    }

    pub fn at(&self, t: f64) -> [f64; 3] {
        [self.gammas[0].eval(t), self.gammas[1].eval(t), self.gammas[2].eval(t)]
    }

    pub fn pole_times(&self) -> &[f64] {
        &self.pole_times
    }

    pub fn poles_in(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.pole_times
            .iter()
            .copied()
            .filter(|&p| p >= t0 && p <= t1)
            .collect()
    }
}

/// Rates of `ch` with poles located on `[0, horizon]`.
pub fn decay_rates(ch: &PauliChannel, horizon: f64) -> DecayRates {
    decay_rates_with(ch, horizon, Scan::default())
}

pub fn decay_rates_with(ch: &PauliChannel, horizon: f64, scan: Scan) -> DecayRates {
    let poles: Vec<f64> = singular_times(ch, horizon, scan).into_iter().map(|(t, _)| t).collect();
    let gammas = [0usize, 1, 2].map(|j| {
        let end = ch.domain_end();
        let ch = ch.clone();
        TimeFunction::new(move |t| rates_from_log_derivatives(log_derivatives(&ch, t))[j]).with_domain_end(end)
    });
    DecayRates::from_functions(gammas, poles)
}

/// Zeros of the eigenvalues on `[0, horizon]` with the axes that vanish there.
pub fn singular_times(ch: &PauliChannel, horizon: f64, scan: Scan) -> Vec<(f64, Vec<Axis>)> {
    let horizon = horizon.min(ch.domain_end());
    let mut candidates: Vec<(f64, Axis)> = Vec::new();
    for axis in Axis::ALL {
        let lambda = ch.lambda(axis);
        let poles = lambda.poles_in(0.0, horizon);
        for &p in &poles {
            if lambda.eval(p).abs() < scan.tol {
                candidates.push((p, axis));
            }
        }
        let mut edges = vec![0.0];
        edges.extend(poles.iter().copied());
        edges.push(horizon);
        for w in edges.windows(2) {
            let (s, e) = (w[0], w[1]);
            if e - s <= scan.tol {
                continue;
            }
            for r in find_roots(lambda, s, e, scan.points(s, e), scan.tol) {
                if !absorbed_by_pole(lambda, r, &poles, scan.tol) {
                    candidates.push((r, axis));
                }
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut groups: Vec<Vec<(f64, Axis)>> = Vec::new();
    for c in candidates {
        match groups.last_mut() {
            Some(g) if (c.0 - g[0].0).abs() < SINGULAR_MERGE_RADIUS => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let t = g
                .iter()
                .map(|&(t, a)| (t, ch.lambda(a).eval(t).abs()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .map(|(t, _)| t)
                .expect("non-empty group");
            let mut axes: Vec<Axis> = Axis::ALL
                .into_iter()
                .filter(|&a| g.iter().any(|&(_, b)| a == b) || ch.lambda(a).eval(t).abs() < scan.tol)
                .collect();
            axes.dedup();
            (t, axes)
        })
        .collect()
}

/// A numerical root that sits on the flat approach to a declared pole (the
/// eigenvalue stays below `tol` all the way to the pole) is the pole itself.
fn absorbed_by_pole(lambda: &TimeFunction, root: f64, poles: &[f64], tol: f64) -> bool {
    poles.iter().any(|&p| {
        if (p - root).abs() < SINGULAR_MERGE_RADIUS {
            return true;
        }
        let (a, b) = if root < p { (root, p) } else { (p, root) };
        linspace(a, b, 65)
            .into_iter()
            .filter(|&t| t != p)
            .all(|t| lambda.eval(t).abs() < tol)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    SignFlipping,
    NonFlipping,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityClass {
    pub kind: SingularityKind,
    pub delta: f64,
    pub left_rates: [f64; 3],
    pub right_rates: [f64; 3],
    pub left_signs: [i8; 3],
    pub right_signs: [i8; 3],
}

fn rate_signs(rates: [f64; 3], eps_rate: f64) -> [i8; 3] {
    let scale = rates
        .iter()
        .filter(|r| r.is_finite())
        .fold(1.0f64, |m, r| m.max(r.abs()));
    rates.map(|r| {
        if r > eps_rate * scale {
            1
        } else if r < -eps_rate * scale {
            -1
        } else {
            0
        }
    })
}

/// Compares the signs of the rates at `t_star - delta` and `t_star + delta`.
pub fn classify_singularity(rates: &DecayRates, t_star: f64, delta: f64) -> Result<SingularityClass> {
    if !(delta > 0.0) || t_star - delta < 0.0 {
        return Err(Error::OutOfDomain {
            t: t_star,
            h: delta,
            domain_end: rates.gammas[0].domain_end(),
        });
    }
    if let Some(&pole) = rates
        .pole_times
        .iter()
        .find(|&&p| (p - t_star).abs() >= SINGULAR_MERGE_RADIUS && (p - t_star).abs() <= delta)
    {
        return Err(Error::IllConditionedWindow { t_star, delta, pole });
    }
    let left_rates = rates.at(t_star - delta);
    let right_rates = rates.at(t_star + delta);
    let left_signs = rate_signs(left_rates, DEFAULT_EPS_RATE);
    let right_signs = rate_signs(right_rates, DEFAULT_EPS_RATE);
    let kind = if left_signs != right_signs {
        SingularityKind::SignFlipping
    } else {
        SingularityKind::NonFlipping
    };
    Ok(SingularityClass {
        kind,
        delta,
        left_rates,
        right_rates,
        left_signs,
        right_signs,
    })
}

/// Classification window: 1e-3 of the distance to the nearest other
/// singular point (or to the horizon when there is none), clamped to
/// `[1e-6, 1e-2]` and kept inside `t >= 0`.
pub fn default_delta(t_star: f64, others: &[f64], horizon: f64) -> f64 {
    let spacing = others
        .iter()
        .filter(|&&p| (p - t_star).abs() >= SINGULAR_MERGE_RADIUS)
        .map(|&p| (p - t_star).abs())
        .fold(horizon.max(t_star), f64::min);
    let delta = (1e-3 * spacing).clamp(1e-6, 1e-2);
    delta.min(0.5 * t_star)
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularPoint {
    pub time: f64,
    /// 1-based indices of the eigenvalues that vanish.
    pub vanishing: Vec<usize>,
    pub classification: Option<SingularityClass>,
    pub classification_error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityReport {
    pub horizon: f64,
    pub points: Vec<SingularPoint>,
}

impl SingularityReport {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.time).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn singular_points(ch: &PauliChannel, horizon: f64) -> SingularityReport {
    singular_points_with(ch, horizon, Scan::default())
}

pub fn singular_points_with(ch: &PauliChannel, horizon: f64, scan: Scan) -> SingularityReport {
    let found = singular_times(ch, horizon, scan);
    let times: Vec<f64> = found.iter().map(|(t, _)| *t).collect();
    let poles = Poles::List(times.clone());
    let gammas = [0usize, 1, 2].map(|j| {
        let ch = ch.clone();
        TimeFunction::new(move |t| rates_from_log_derivatives(log_derivatives(&ch, t))[j])
    });
    let rates = DecayRates {
        gammas: gammas.map(|g| g.with_poles(poles.clone())),
        pole_times: times.clone(),
    };
    let points = found
        .into_iter()
        .map(|(time, axes)| {
            let delta = default_delta(time, &times, horizon);
            let (classification, classification_error) = match classify_singularity(&rates, time, delta) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SingularPoint {
                time,
                vanishing: axes.into_iter().map(Axis::number).collect(),
                classification,
                classification_error,
            }
        })
        .collect();
    SingularityReport { horizon, points }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativeRateInterval {
    pub start: f64,
    pub end: f64,
    /// 1-based rate index.
    pub rate_index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisibilityVerdict {
    pub cp_divisible: bool,
    pub negative_rate_intervals: Vec<NegativeRateInterval>,
    /// Pole neighbourhoods left out of the scan.
    pub excluded_windows: Vec<(f64, f64)>,
    pub singular_times: Vec<f64>,
}

/// Scans the rates on `grid` points of `[0, horizon]`, skipping a radius of
/// `10 * delta` around every singular point, and collects maximal runs where
/// some rate is below `-DEFAULT_EPS_RATE`.
pub fn is_cp_divisible(ch: &PauliChannel, horizon: f64, grid: usize) -> DivisibilityVerdict {
    let rates = decay_rates(ch, horizon);
    let poles = rates.pole_times().to_vec();
    let excluded_windows: Vec<(f64, f64)> = poles
        .iter()
        .map(|&p| {
            let r = 10.0 * default_delta(p, &poles, horizon);
            (p - r, p + r)
        })
        .collect();
    let ts = linspace(0.0, horizon, grid.max(2));
    let samples: Vec<Option<[f64; 3]>> = ts
        .iter()
        .map(|&t| {
            if excluded_windows.iter().any(|&(a, b)| t >= a && t <= b) {
                None
            } else {
                Some(rates.at(t))
            }
        })
        .collect();

    let mut intervals = Vec::new();
    for j in 0..3 {
        let mut run: Option<(f64, f64)> = None;
        for (&t, s) in ts.iter().zip(&samples) {
            let negative = matches!(s, Some(g) if g[j].is_finite() && g[j] < -DEFAULT_EPS_RATE);
            match (negative, run) {
                (true, None) => run = Some((t, t)),
                (true, Some((a, _))) => run = Some((a, t)),
                (false, Some((a, b))) => {
                    intervals.push(NegativeRateInterval {
                        start: a,
                        end: b,
                        rate_index: j + 1,
                    });
                    run = None;
                }
                (false, None) => {}
            }
        }
        if let Some((a, b)) = run {
            intervals.push(NegativeRateInterval {
                start: a,
                end: b,
                rate_index: j + 1,
            });
        }
    }
    intervals.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.rate_index.cmp(&b.rate_index)));
    DivisibilityVerdict {
        cp_divisible: intervals.is_empty(),
        negative_rate_intervals: intervals,
        excluded_windows,
        singular_times: poles,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntermediateMap {
    pub lambdas: [f64; 3],
    pub cp: bool,
    pub probs: ProbabilityVector,
}

/// `E(t_f, t) = E(t_f) E(t)^-1`, defined only while no eigenvalue vanishes at `t`.
pub fn intermediate_map(ch: &PauliChannel, t: f64, t_f: f64) -> Result<IntermediateMap> {
    if t_f < t || t < 0.0 {
        return Err(Error::InvalidParameters(format!(
            "need 0 <= t <= t_f, got t = {t}, t_f = {t_f}"
        )));
    }
    let start = ch.lambdas_at(t);
    if let Some((index, &value)) = start.iter().enumerate().find(|(_, l)| l.abs() < DEFAULT_ROOT_TOL) {
        return Err(Error::UndefinedIntermediateMap {
            t,
            index: index + 1,
            value,
        });
    }
    let end = ch.lambdas_at(t_f);
    let lambdas = [end[0] / start[0], end[1] / start[1], end[2] / start[2]];
    let check = check_cp_lambdas(lambdas, DEFAULT_EPS_CP);
    Ok(IntermediateMap {
        lambdas,
        cp: check.cp,
        probs: check.probs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn semigroup_dephasing() -> PauliChannel {
        let e = TimeFunction::new(|t: f64| (-2.0 * t).exp()).with_derivative(|t: f64| -2.0 * (-2.0 * t).exp());
        PauliChannel::new("deph", [e.clone(), e, TimeFunction::constant(1.0)])
    }

    fn cosine_x_flip() -> PauliChannel {
        let c = TimeFunction::new(|t: f64| t.cos().powi(2)).with_derivative(|t: f64| -(2.0 * t).sin());
        PauliChannel::new("xflip", [TimeFunction::constant(1.0), c.clone(), c])
    }

    fn example_one() -> PauliChannel {
        let half =
            TimeFunction::new(|t: f64| 1.0 - 0.5 * t.sin().powi(2)).with_derivative(|t: f64| -0.5 * (2.0 * t).sin());
        let l3 = TimeFunction::new(|t: f64| 1.0 - t.sin().powi(2)).with_derivative(|t: f64| -(2.0 * t).sin());
        PauliChannel::new("ex1", [half.clone(), half, l3])
    }

    #[test]
    fn semigroup_rates_are_constant() {
        let rates = decay_rates(&semigroup_dephasing(), 5.0);
        assert!(rates.pole_times().is_empty());
        for t in linspace(0.0, 5.0, 50) {
            let g = rates.at(t);
            assert!(g[0].abs() < 1e-12 && g[1].abs() < 1e-12);
            assert!((g[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_rates_vanish() {
        let rates = decay_rates(&PauliChannel::identity(), 3.0);
        assert_eq!(rates.at(1.3), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn cosine_flip_rate_is_tan() {
        let rates = decay_rates(&cosine_x_flip(), 1.5);
        for t in linspace(0.01, 1.49, 40) {
            let g = rates.at(t);
            assert!((g[0] - t.tan()).abs() < 1e-9, "t = {t}");
            assert!(g[1].abs() < 1e-12 && g[2].abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_and_finite_difference_rates_agree() {
        let ch = example_one();
        let stripped = PauliChannel::new(
            "fd",
            [
                TimeFunction::new(|t: f64| 1.0 - 0.5 * t.sin().powi(2)),
                TimeFunction::new(|t: f64| 1.0 - 0.5 * t.sin().powi(2)),
                TimeFunction::new(|t: f64| 1.0 - t.sin().powi(2)),
            ],
        );
        let a = decay_rates(&ch, 3.0);
        let b = decay_rates(&stripped, 3.0);
        for t in linspace(0.05, 1.4, 60).into_iter().chain(linspace(1.75, 3.0, 40)) {
            let (ga, gb) = (a.at(t), b.at(t));
            for j in 0..3 {
                assert!((ga[j] - gb[j]).abs() < 1e-6, "t = {t}, j = {j}: {} vs {}", ga[j], gb[j]);
            }
        }
    }

    #[test]
    fn singular_points_of_identity_are_empty() {
        assert!(singular_points(&PauliChannel::identity(), 10.0).is_empty());
    }

    #[test]
    fn example_one_singularities() {
        let report = singular_points(&example_one(), 10.0);
        let times = report.times();
        let expected: Vec<f64> = (0..4)
            .map(|n| (2 * n + 1) as f64 * FRAC_PI_2)
            .filter(|&t| t <= 10.0)
            .collect();
        assert_eq!(times.len(), expected.len(), "{times:?}");
        for (p, e) in report.points.iter().zip(expected) {
            assert!((p.time - e).abs() < 1e-6);
            assert_eq!(p.vanishing, vec![3]);
            let class = p.classification.as_ref().unwrap();
            assert_eq!(class.kind, SingularityKind::SignFlipping);
        }
        let first = report.points[0].classification.as_ref().unwrap();
        assert_eq!(first.left_signs[0], 1);
        assert_eq!(first.right_signs[0], -1);
        assert_eq!(first.left_signs[1], 1);
        assert_eq!(first.right_signs[1], -1);
        assert_eq!(first.left_signs[2], -1);
        assert_eq!(first.right_signs[2], 1);
    }

    #[test]
    fn classify_example_one_at_fixed_window() {
        let rates = decay_rates(&example_one(), 4.0);
        let c = classify_singularity(&rates, FRAC_PI_2, 0.01).unwrap();
        assert_eq!(c.kind, SingularityKind::SignFlipping);
        // gamma_1 = tan(t) / 2 for this mixture
        assert!((c.left_rates[0] - 0.5 * (FRAC_PI_2 - 0.01).tan()).abs() < 1e-9);
    }

    #[test]
    fn window_straddling_a_pole_is_rejected() {
        let rates = decay_rates(&example_one(), 10.0);
        let err = classify_singularity(&rates, 3.0 * FRAC_PI_2, 3.5).unwrap_err();
        assert!(matches!(err, Error::IllConditionedWindow { .. }));
        assert!(classify_singularity(&rates, FRAC_PI_2, 2.0).is_err());
    }

    #[test]
    fn divisibility_of_semigroup_and_cosine_flip() {
        assert!(is_cp_divisible(&semigroup_dephasing(), 5.0, 500).cp_divisible);
        let v = is_cp_divisible(&cosine_x_flip(), 3.0, 3000);
        assert!(!v.cp_divisible);
        assert_eq!(v.negative_rate_intervals.len(), 1);
        let i = v.negative_rate_intervals[0];
        assert_eq!(i.rate_index, 1);
        assert!(i.start > FRAC_PI_2 && i.end < PI);
    }

    #[test]
    fn intermediate_map_examples() {
        let ch = example_one();
        let m = intermediate_map(&ch, 0.7, 0.7).unwrap();
        assert_eq!(m.lambdas, [1.0, 1.0, 1.0]);
        assert!(m.cp);

        let m = intermediate_map(&semigroup_dephasing(), 1.0, 2.0).unwrap();
        let e2 = (-2f64).exp();
        assert!((m.lambdas[0] - e2).abs() < 1e-15 && (m.lambdas[1] - e2).abs() < 1e-15);
        assert_eq!(m.lambdas[2], 1.0);
        assert!(m.cp);

        let err = intermediate_map(&ch, FRAC_PI_2, 2.0).unwrap_err();
        assert!(matches!(err, Error::UndefinedIntermediateMap { index: 3, .. }));
        assert!(intermediate_map(&ch, 1.0, 0.5).is_err());
    }

    #[test]
    fn default_delta_clamps() {
        assert_eq!(default_delta(1.0, &[1.0], 1e5), 1e-2);
        assert_eq!(default_delta(1.0, &[1.0, 1.0 + 1e-4], 10.0), 1e-6);
        assert!((default_delta(1.0, &[1.0, 3.0], 10.0) - 2e-3).abs() < 1e-15);
    }
}
