//! Ready-made mixtures for the four worked examples and their claim checks.
//! The CLI `example` command and the acceptance tests both run these.

use serde::Serialize;

use crate::channel::{Axis, PauliChannel};
use crate::error::{Error, Result};
use crate::families::{bounded_cosine_decoherence, cosine_decoherence, isotropic_rtn, isotropic_rtn_confined};
use crate::families::{rtn_lambda, saturating_decoherence, RtnParams};
use crate::generator::{is_cp_divisible, singular_points, SingularityKind};
use crate::mixing::{mix_flips, synchronization_report, DecoherenceFunction, FlipComponent, MixtureWeights};
use crate::numerics::{bisect, linspace};

pub const EXAMPLE1_HORIZON: f64 = 10.0;
pub const EXAMPLE2_HORIZON: f64 = 20.0;
pub const EXAMPLE3_HORIZON: f64 = 10.0;
pub const EXAMPLE4_HORIZON: f64 = 8.0;
pub const SWEEP_GRID: usize = 2001;

/// Overdamped RTN used for the confined three-way mixture.
pub const EXAMPLE2_RTN: RtnParams = RtnParams { w: 1.0, d: 0.25 };
/// Oscillatory RTN whose `Lambda` dips below `-1/2` (trough near `-0.588`).
pub const EXAMPLE3_RTN: RtnParams = RtnParams { w: 1.0, d: 3.0 };

/// Example 4 amplitudes of `q` and `r`, and the common crossing time
/// `t_R = ln 61` where `q = 3/5` and `r = 4/5`.
pub const EXAMPLE4_Q_AMPLITUDE: f64 = 0.61;
pub const EXAMPLE4_R_AMPLITUDE: f64 = 0.81;
pub const EXAMPLE4_P_AMPLITUDE: f64 = 0.2;
pub const EXAMPLE4_WEIGHTS: [f64; 3] = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 2.0];

pub fn example4_t_star() -> f64 {
    61f64.ln()
}

/// Rate of `r` chosen so that `r(ln 61) = 4/5` exactly.
pub fn example4_r_rate() -> f64 {
    81f64.ln() / 61f64.ln()
}

/// A flip mixture together with the pieces it was built from.
#[derive(Debug, Clone)]
pub struct FlipMixture {
    pub channel: PauliChannel,
    pub components: Vec<FlipComponent>,
    pub weights: Vec<f64>,
}

/// Equal mixture of an X flip with `p = sin^2(mu t)/2` and a Y flip with
/// `q = sin^2(nu t)/2`.
pub fn example1(mu: f64, nu: f64, horizon: f64) -> Result<FlipMixture> {
    let components = vec![
        FlipComponent::new(Axis::X, DecoherenceFunction::new(cosine_decoherence(mu), horizon)?),
        FlipComponent::new(Axis::Y, DecoherenceFunction::new(cosine_decoherence(nu), horizon)?),
    ];
    let weights = vec![0.5, 0.5];
    let channel = mix_flips(&components, &weights)?;
    Ok(FlipMixture {
        channel,
        components,
        weights,
    })
}

pub fn example2(horizon: f64) -> Result<PauliChannel> {
    isotropic_rtn_confined(EXAMPLE2_RTN, MixtureWeights::equal(), horizon, SWEEP_GRID)
}

pub fn example3(p: RtnParams) -> PauliChannel {
    isotropic_rtn(p, MixtureWeights::equal())
}

/// First `t` in `[0, horizon]` with `Lambda(t) = -1/2`, bracketed on a grid
/// and bisected to machine precision.
pub fn rtn_half_crossing(p: &RtnParams, horizon: f64) -> Option<f64> {
    let g = |t: f64| rtn_lambda(t, p) + 0.5;
    let ts = linspace(0.0, horizon, SWEEP_GRID.max((horizon * 1000.0) as usize));
    ts.windows(2)
        .find(|w| g(w[0]) > 0.0 && g(w[1]) <= 0.0)
        .map(|w| bisect(g, w[0], w[1]))
}

/// X, Y and Z flips with saturating `p`, `q`, `r` mixed with weights
/// `(1/3, 1/6, 1/2)`. `q` and `r` exceed 1/2.
pub fn example4(horizon: f64) -> Result<FlipMixture> {
    let components = vec![
        FlipComponent::new(
            Axis::X,
            DecoherenceFunction::new(saturating_decoherence(EXAMPLE4_P_AMPLITUDE, 1.0), horizon)?,
        ),
        FlipComponent::new(
            Axis::Y,
            DecoherenceFunction::new(saturating_decoherence(EXAMPLE4_Q_AMPLITUDE, 1.0), horizon)?,
        ),
        FlipComponent::new(
            Axis::Z,
            DecoherenceFunction::new(saturating_decoherence(EXAMPLE4_R_AMPLITUDE, example4_r_rate()), horizon)?,
        ),
    ];
    let weights = EXAMPLE4_WEIGHTS.to_vec();
    let channel = mix_flips(&components, &weights)?;
    Ok(FlipMixture {
        channel,
        components,
        weights,
    })
}

/// Bounded cosine flips on all three axes; handy for sweeps in tests.
pub fn bounded_cosine_mixture(amplitude: f64, mus: [f64; 3], weights: [f64; 3], horizon: f64) -> Result<FlipMixture> {
    let components = Axis::ALL
        .iter()
        .zip(mus)
        .map(|(&axis, mu)| {
            Ok(FlipComponent::new(
                axis,
                DecoherenceFunction::new(bounded_cosine_decoherence(amplitude, mu), horizon)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let channel = mix_flips(&components, &weights)?;
    Ok(FlipMixture {
        channel,
        components,
        weights: weights.to_vec(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl ClaimCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        ClaimCheck {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleRun {
    pub number: u8,
    pub title: String,
    pub horizon: f64,
    pub checks: Vec<ClaimCheck>,
    /// Channels worth sweeping, keyed by a file-friendly name.
    #[serde(skip)]
    pub channels: Vec<(String, PauliChannel)>,
}

impl ExampleRun {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_example(n: u8) -> Result<ExampleRun> {
    match n {
        1 => run_example1(),
        2 => run_example2(),
        3 => run_example3(),
        4 => run_example4(),
        _ => Err(Error::InvalidParameters(format!(
            "example number must be 1..=4, got {n}"
        ))),
    }
}

fn odd_half_pi_multiples(horizon: f64) -> Vec<f64> {
    (0..)
        .map(|n| (2 * n + 1) as f64 * std::f64::consts::FRAC_PI_2)
        .take_while(|&t| t <= horizon)
        .collect()
}

fn run_example1() -> Result<ExampleRun> {
    let h = EXAMPLE1_HORIZON;
    let sync = example1(1.0, 1.0, h)?;
    let report = singular_points(&sync.channel, h);
    let expected = odd_half_pi_multiples(h);
    let times = report.times();
    let located = times.len() == expected.len()
        && times.iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-6)
        && report.points.iter().all(|p| p.vanishing == vec![3]);
    let flipping = report.points.iter().all(|p| {
        p.classification
            .as_ref()
            .is_some_and(|c| c.kind == SingularityKind::SignFlipping)
    });
    let s = synchronization_report(&sync.channel, &sync.components, &sync.weights, h)?;

    let inc = example1(1.0, 2f64.sqrt(), 20.0)?;
    let inc_report = singular_points(&inc.channel, 20.0);

    let checks = vec![
        ClaimCheck::new(
            "singular at odd multiples of pi/2, lambda3 vanishing",
            located,
            format!("found {times:?}, expected {expected:?}"),
        ),
        ClaimCheck::new(
            "components singular at the same times",
            s.mixture_singular && s.all_synchronized,
            format!(
                "component times {:?}",
                s.components.iter().map(|c| &c.singular_times).collect::<Vec<_>>()
            ),
        ),
        ClaimCheck::new("every singular point is sign-flipping", flipping, String::new()),
        ClaimCheck::new(
            "incommensurate frequencies give no singular point on [0, 20]",
            inc_report.is_empty(),
            format!("found {:?}", inc_report.times()),
        ),
    ];
    Ok(ExampleRun {
        number: 1,
        title: "two synchronized cosine flips".into(),
        horizon: h,
        checks,
        channels: vec![
            ("example1_synchronized".into(), sync.channel),
            ("example1_incommensurate".into(), inc.channel),
        ],
    })
}

fn run_example2() -> Result<ExampleRun> {
    let h = EXAMPLE2_HORIZON;
    let ch = example2(h)?;
    let min = linspace(0.0, h, 20 * SWEEP_GRID)
        .into_iter()
        .flat_map(|t| ch.lambdas_at(t))
        .fold(f64::INFINITY, f64::min);
    let report = singular_points(&ch, h);
    let checks = vec![
        ClaimCheck::new(
            "min lambda_j >= 1/3 with Lambda confined to [0, 1]",
            min >= 1.0 / 3.0 - 1e-9,
            format!("min lambda = {min}"),
        ),
        ClaimCheck::new(
            "no singular point",
            report.is_empty(),
            format!("found {:?}", report.times()),
        ),
    ];
    Ok(ExampleRun {
        number: 2,
        title: "three-way equal RTN mixture stays regular".into(),
        horizon: h,
        checks,
        channels: vec![("example2_isotropic_rtn".into(), ch)],
    })
}

fn run_example3() -> Result<ExampleRun> {
    let h = EXAMPLE3_HORIZON;
    let p = EXAMPLE3_RTN;
    let ch = example3(p);
    let mut checks = Vec::new();
    match rtn_half_crossing(&p, h) {
        Some(t) => {
            let l = ch.lambdas_at(t);
            let f = 0.5 * (1.0 - rtn_lambda(t, &p));
            checks.push(ClaimCheck::new(
                "all lambda_j vanish where Lambda = -1/2",
                l.iter().all(|x| x.abs() < 1e-8),
                format!("t* = {t}, lambdas = {l:?}"),
            ));
            checks.push(ClaimCheck::new(
                "p = q = r = 3/4 at the singularity",
                (f - 0.75).abs() < 1e-8,
                format!("p(t*) = {f}"),
            ));
            let report = singular_points(&ch, h);
            let first = report.points.first();
            checks.push(ClaimCheck::new(
                "first singular point is sign-flipping",
                first.is_some_and(|pt| {
                    (pt.time - t).abs() < 1e-6
                        && pt
                            .classification
                            .as_ref()
                            .is_some_and(|c| c.kind == SingularityKind::SignFlipping)
                }),
                format!("{:?}", first.map(|pt| pt.time)),
            ));
        }
        None => checks.push(ClaimCheck::new(
            "Lambda reaches -1/2",
            false,
            format!("no crossing on [0, {h}] for w = {}, d = {}", p.w, p.d),
        )),
    }
    Ok(ExampleRun {
        number: 3,
        title: "three-way equal RTN mixture with Lambda below -1/2".into(),
        horizon: h,
        checks,
        channels: vec![("example3_isotropic_rtn".into(), ch)],
    })
}

fn run_example4() -> Result<ExampleRun> {
    let h = EXAMPLE4_HORIZON;
    let m = example4(h)?;
    let t_star = example4_t_star();
    let (q, r) = (m.components[1].f.eval(t_star), m.components[2].f.eval(t_star));
    let l1 = m.channel.lambdas_at(t_star)[0];
    let s = synchronization_report(&m.channel, &m.components, &m.weights, h)?;
    let comp_times: Vec<f64> = s.components[1..]
        .iter()
        .flat_map(|c| c.singular_times.clone())
        .collect();
    let report = singular_points(&m.channel, h);
    let found = report
        .points
        .iter()
        .find(|p| (p.time - t_star).abs() < 1e-6 && p.vanishing == vec![1]);
    let divisibility = is_cp_divisible(&m.channel, h, SWEEP_GRID);
    let checks = vec![
        ClaimCheck::new(
            "q = 3/5 and r = 4/5 at t_R",
            (q - 0.6).abs() < 1e-12 && (r - 0.8).abs() < 1e-12,
            format!("t_R = {t_star}, q = {q}, r = {r}"),
        ),
        ClaimCheck::new("lambda1 vanishes at t_R", l1.abs() < 1e-8, format!("lambda1 = {l1:e}")),
        ClaimCheck::new(
            "singular point located at t_R with lambda1 vanishing",
            found.is_some(),
            format!("found {:?}", report.times()),
        ),
        ClaimCheck::new(
            "component singular times differ from t_R",
            comp_times.len() == 2 && comp_times.iter().all(|&c| (c - t_star).abs() > 1e-3),
            format!("component times {comp_times:?}"),
        ),
        ClaimCheck::new(
            "singularity is sign-flipping and the process CP-indivisible",
            found.is_some_and(|p| {
                p.classification
                    .as_ref()
                    .is_some_and(|c| c.kind == SingularityKind::SignFlipping)
            }) && !divisibility.cp_divisible,
            String::new(),
        ),
    ];
    Ok(ExampleRun {
        number: 4,
        title: "asynchronous Type II mixture".into(),
        horizon: h,
        checks,
        channels: vec![("example4_mixture".into(), m.channel)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_examples_pass() {
        for n in 1..=4 {
            let run = run_example(n).unwrap();
            assert!(run.passed(), "example {n}: {:#?}", run.checks);
        }
    }

    #[test]
    fn example_numbers_are_checked() {
        assert!(run_example(0).is_err());
        assert!(run_example(5).is_err());
    }

    #[test]
    fn example4_crossing_time() {
        let t = example4_t_star();
        let q = 0.61 * (1.0 - (-t).exp());
        let r = 0.81 * (1.0 - (-example4_r_rate() * t).exp());
        assert!((q - 0.6).abs() < 1e-14 && (r - 0.8).abs() < 1e-14);
    }

    #[test]
    fn no_half_crossing_below_threshold() {
        assert!(rtn_half_crossing(&RtnParams::new(1.0, 2.0).unwrap(), 50.0).is_none());
        assert!(rtn_half_crossing(&EXAMPLE3_RTN, 10.0).is_some());
    }
}
