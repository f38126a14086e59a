//! Convex mixtures of Pauli maps, single-axis flip channels, singular-type
//! classification of decoherence functions, the randomised convexity check
//! for non-singular mixtures, and synchronisation analysis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{Axis, PauliChannel};
use crate::error::{Error, Result};
use crate::families::{self, RtnParams};
use crate::generator::{singular_times, Scan, SINGULAR_MERGE_RADIUS};
use crate::numerics::{find_roots, grid_sup, linspace, TimeFunction, DEFAULT_ROOT_TOL};

/// Tolerance on the supremum of a decoherence function when deciding its type.
pub const TYPE_TOL: f64 = 1e-6;

const WEIGHT_TOL: f64 = 1e-12;

/// Weights `(a, b, c)` of the X, Y and Z flip channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureWeights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl MixtureWeights {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        validate_weights(&[a, b, c])?;
        Ok(Self { a, b, c })
    }

    pub fn equal() -> Self {
        Self {
            a: 1.0 / 3.0,
            b: 1.0 / 3.0,
            c: 1.0 / 3.0,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// Total weight of the two channels that act on eigenvalue `axis`
    /// (for X this is `b + c`).
    pub fn off_axis_sum(&self, axis: Axis) -> f64 {
        let w = self.as_array();
        w.iter().sum::<f64>() - w[axis.index()]
    }
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("no weights".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::InvalidWeights(format!("negative or non-finite weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// A flip probability `p(t)` with `0 <= p <= 1` and `p(0) = 0`, together
/// with its supremum over the scan horizon.
#[derive(Debug, Clone)]
pub struct DecoherenceFunction {
    f: TimeFunction,
    sup_value: f64,
    sup_time: f64,
    horizon: f64,
}

impl DecoherenceFunction {
    pub fn new(f: TimeFunction, horizon: f64) -> Result<Self> {
        let points = Scan::default().points(0.0, horizon);
        Self::with_grid(f, horizon, points)
    }

    pub fn with_grid(f: TimeFunction, horizon: f64, grid: usize) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let at_zero = f.eval(0.0);
        if at_zero.abs() > 1e-12 {
            return Err(Error::InvalidDecoherence(format!("f(0) = {at_zero}, expected 0")));
        }
        for t in linspace(0.0, horizon, grid.max(2)) {
            let v = f.eval(t);
            if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                return Err(Error::InvalidDecoherence(format!("f({t}) = {v} outside [0, 1]")));
            }
        }
        let (sup_time, sup_value) = grid_sup(&f, 0.0, horizon, grid);
        Ok(Self {
            f,
            sup_value,
            sup_time,
            horizon,
        })
    }

    pub fn function(&self) -> &TimeFunction {
        &self.f
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.f.eval(t)
    }

    pub fn sup_value(&self) -> f64 {
        self.sup_value
    }

    pub fn sup_time(&self) -> f64 {
        self.sup_time
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// Flip channel about `axis`: `lambda_axis = 1`, the other two `1 - 2 f`.
pub fn flip_channel(axis: Axis, f: &DecoherenceFunction) -> PauliChannel {
    flip_channel_fn(axis, &f.f)
}

/// [`flip_channel`] without the range validation.
pub fn flip_channel_fn(axis: Axis, f: &TimeFunction) -> PauliChannel {
    let off = f.affine(1.0, -2.0);
    let lambdas = Axis::ALL.map(|a| {
        if a == axis {
            TimeFunction::constant(1.0)
        } else {
            off.clone()
        }
    });
    PauliChannel::new(format!("{axis:?}-flip"), lambdas)
}

/// Convex combination: eigenvalues mix linearly.
pub fn mix(channels: &[PauliChannel], weights: &[f64]) -> Result<PauliChannel> {
    if channels.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} channels but {} weights",
            channels.len(),
            weights.len()
        )));
    }
    validate_weights(weights)?;
    let domain = channels[0].domain_end();
    if channels.iter().any(|c| c.domain_end() != domain) {
        return Err(Error::InvalidParameters("channels have different domains".into()));
    }
    let lambdas = Axis::ALL.map(|axis| {
        let terms: Vec<(f64, &TimeFunction)> = channels
            .iter()
            .zip(weights)
            .map(|(c, &w)| (w, c.lambda(axis)))
            .collect();
        TimeFunction::linear_combination(0.0, &terms)
    });
    let label = channels.iter().map(PauliChannel::label).collect::<Vec<_>>().join("+");
    let validated = channels
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(c, _)| c.validated_until())
        .fold(f64::INFINITY, f64::min);
    Ok(PauliChannel::new(format!("mix({label})"), lambdas).with_validated_until(validated))
}

/// A flip channel together with its decoherence function.
#[derive(Debug, Clone)]
pub struct FlipComponent {
    pub axis: Axis,
    pub f: DecoherenceFunction,
}

impl FlipComponent {
    pub fn new(axis: Axis, f: DecoherenceFunction) -> Self {
        Self { axis, f }
    }

    pub fn channel(&self) -> PauliChannel {
        flip_channel(self.axis, &self.f)
    }
}

/// Mixture of flip channels in closed form:
/// `lambda_j = 1 - 2 sum_{i: axis_i != j} w_i f_i`.
pub fn mix_flips(components: &[FlipComponent], weights: &[f64]) -> Result<PauliChannel> {
    if components.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} components but {} weights",
            components.len(),
            weights.len()
        )));
    }
    validate_weights(weights)?;
    let lambdas = Axis::ALL.map(|axis| {
        let terms: Vec<(f64, &TimeFunction)> = components
            .iter()
            .zip(weights)
            .filter(|(c, _)| c.axis != axis)
            .map(|(c, &w)| (-2.0 * w, c.f.function()))
            .collect();
        TimeFunction::linear_combination(1.0, &terms)
    });
    Ok(PauliChannel::new("flip-mixture", lambdas))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChannelType {
    NonSingular,
    TypeI,
    TypeII,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelTypeVerdict {
    pub kind: ChannelType,
    pub sup_value: f64,
    /// Times where `f` crosses or touches 1/2.
    pub attaining_times: Vec<f64>,
}

/// Type of the flip channel generated by `f`, judged on `[0, horizon]`.
pub fn classify_type(f: &DecoherenceFunction, horizon: f64) -> ChannelTypeVerdict {
    let horizon = horizon.min(f.horizon);
    let (sup_time, sup_value) = if horizon < f.horizon {
        grid_sup(&f.f, 0.0, horizon, Scan::default().points(0.0, horizon))
    } else {
        (f.sup_time, f.sup_value)
    };
    // A supremum below 1/2 sitting on the right edge with f still rising is an
    // asymptotic approach, not an attained value.
    let asymptotic =
        sup_value < 0.5 && sup_time >= horizon * (1.0 - 1e-9) && crate::numerics::derivative(&f.f, horizon) > 0.0;
    let kind = if sup_value < 0.5 - TYPE_TOL || asymptotic {
        ChannelType::NonSingular
    } else if sup_value <= 0.5 + TYPE_TOL {
        ChannelType::TypeI
    } else {
        ChannelType::TypeII
    };
    let attaining_times = if kind == ChannelType::NonSingular {
        Vec::new()
    } else {
        let shifted = f.f.affine(-0.5, 1.0);
        let scan = Scan::default();
        find_roots(
            &shifted,
            0.0,
            horizon,
            scan.points(0.0, horizon),
            DEFAULT_ROOT_TOL.max(TYPE_TOL * TYPE_TOL),
        )
    };
    ChannelTypeVerdict {
        kind,
        sup_value,
        attaining_times,
    }
}

/// Parameters of the randomised convexity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Config {
    pub trials: usize,
    pub horizon: f64,
    pub seed: u64,
    /// Grid points per trial.
    pub grid: usize,
    /// Replace the non-singular families by a singular (Type II) RTN mixture.
    /// Only useful to show that the harness catches singular mixtures.
    pub inject_type_ii: bool,
}

impl Lemma1Config {
    pub fn new(trials: usize, horizon: f64, seed: u64) -> Self {
        Self {
            trials,
            horizon,
            seed,
            grid: 2001,
            inject_type_ii: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampledFamily {
    BoundedCosine,
    Semigroup,
    Saturating,
    InjectedRtn,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub weights: [f64; 3],
    pub families: [SampledFamily; 3],
    pub sups: [f64; 3],
    pub min_lambda: f64,
    pub min_axis: usize,
    pub min_time: f64,
    /// `min_t (lambda_j(t) - (1 - off-axis weight sum))` over the three axes.
    pub bound_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Report {
    pub config: Lemma1Config,
    pub failures: usize,
    pub global_min_lambda: f64,
    pub global_min_trial: usize,
    pub global_min_axis: usize,
    pub global_min_time: f64,
    pub min_bound_margin: f64,
}

/// Semigroup rates are capped so that `1/2 - f(horizon) >= 5e-5`.
fn sample_decoherence(rng: &mut ChaCha8Rng, horizon: f64) -> (SampledFamily, TimeFunction) {
    match rng.gen_range(0..3) {
        0 => {
            let amp = rng.gen_range(0.01..0.49);
            let mu = rng.gen_range(0.2..5.0);
            (
                SampledFamily::BoundedCosine,
                families::bounded_cosine_decoherence(amp, mu),
            )
        }
        1 => {
            let cap = (1e4f64.ln() / (2.0 * horizon)).min(3.0);
            let gamma0 = rng.gen_range(0.01 * cap..cap);
            (SampledFamily::Semigroup, families::semigroup_decoherence(gamma0))
        }
        _ => {
            let amp = rng.gen_range(0.01..0.49);
            let rate = rng.gen_range(0.1..5.0);
            (SampledFamily::Saturating, families::saturating_decoherence(amp, rate))
        }
    }
}

fn sample_weights(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let mut w = [0.0; 3];
    for x in w.iter_mut() {
        *x = -(1.0 - rng.gen::<f64>()).ln();
    }
    match rng.gen_range(0..10) {
        0 => {
            let keep = rng.gen_range(0..3);
            w = [0.0; 3];
            w[keep] = 1.0;
        }
        1 | 2 => w[rng.gen_range(0..3)] = 0.0,
        _ => {}
    }
    let total: f64 = w.iter().sum();
    let mut w = w.map(|x| x / total);
    // exact normalisation
    w[2] = 1.0 - w[0] - w[1];
    w
}

fn run_trial(cfg: &Lemma1Config, trial: usize) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);

    let (families, functions, weights) = if cfg.inject_type_ii {
        let rtn = families::rtn_decoherence(RtnParams::new(1.0, 3.0)?);
        (
            [SampledFamily::InjectedRtn; 3],
            [rtn.clone(), rtn.clone(), rtn],
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        )
    } else {
        let (f0, p) = sample_decoherence(&mut rng, cfg.horizon);
        let (f1, q) = sample_decoherence(&mut rng, cfg.horizon);
        let (f2, r) = sample_decoherence(&mut rng, cfg.horizon);
        ([f0, f1, f2], [p, q, r], sample_weights(&mut rng))
    };

    let components: Vec<DecoherenceFunction> = functions
        .into_iter()
        .map(|f| DecoherenceFunction::with_grid(f, cfg.horizon, cfg.grid))
        .collect::<Result<_>>()?;
    let sups = [
        components[0].sup_value,
        components[1].sup_value,
        components[2].sup_value,
    ];
    let strict = sups.iter().all(|&s| s < 0.5 - TYPE_TOL);
    if !cfg.inject_type_ii && !strict {
        return Err(Error::InvalidDecoherence(format!(
            "trial {trial} sampled a singular component (sups {sups:?})"
        )));
    }

    let mut outcome = TrialOutcome {
        trial,
        weights,
        families,
        sups,
        min_lambda: f64::INFINITY,
        min_axis: 0,
        min_time: 0.0,
        bound_margin: f64::INFINITY,
    };
    let [a, b, c] = weights;
    let bounds = [1.0 - (b + c), 1.0 - (a + c), 1.0 - (a + b)];
    for t in linspace(0.0, cfg.horizon, cfg.grid) {
        let (p, q, r) = (components[0].eval(t), components[1].eval(t), components[2].eval(t));
        let lambdas = [
            1.0 - 2.0 * (b * q + c * r),
            1.0 - 2.0 * (a * p + c * r),
            1.0 - 2.0 * (a * p + b * q),
        ];
        for (j, &l) in lambdas.iter().enumerate() {
            if l < outcome.min_lambda {
                outcome.min_lambda = l;
                outcome.min_axis = j + 1;
                outcome.min_time = t;
            }
            if l <= 0.0 {
                return Err(Error::LemmaViolation {
                    trial,
                    index: j + 1,
                    t,
                    value: l,
                });
            }
            let margin = l - bounds[j];
            outcome.bound_margin = outcome.bound_margin.min(margin);
            if strict && margin <= -1e-9 {
                return Err(Error::LemmaBoundViolation {
                    trial,
                    index: j + 1,
                    t,
                    value: l,
                    bound: bounds[j],
                });
            }
        }
    }
    Ok(outcome)
}

/// Mixes randomly drawn non-singular flip channels and checks that no
/// eigenvalue of any mixture reaches zero on the grid, and that
/// `lambda_1 > 1 - (b + c)` (and cyclically) holds. Trials run in parallel;
/// trial `i` draws from stream `i` of a ChaCha generator seeded with
/// `seed`, so results do not depend on scheduling.
pub fn verify_lemma1(cfg: &Lemma1Config) -> Result<Lemma1Report> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameters("need at least one trial".into()));
    }
    if !(cfg.horizon > 0.0) || cfg.grid < 2 {
        return Err(Error::InvalidParameters("need a positive horizon and grid >= 2".into()));
    }
    let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect();
    let mut ok = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        ok.push(o?);
    }
    let best = ok
        .iter()
        .min_by(|x, y| x.min_lambda.total_cmp(&y.min_lambda))
        .expect("at least one trial");
    Ok(Lemma1Report {
        config: *cfg,
        failures: 0,
        global_min_lambda: best.min_lambda,
        global_min_trial: best.trial,
        global_min_axis: best.min_axis,
        global_min_time: best.min_time,
        min_bound_margin: ok.iter().map(|o| o.bound_margin).fold(f64::INFINITY, f64::min),
    })
}

/// Single trial with caller-chosen components and weights; used to check
/// hand-built cases against the closed form.
pub fn lemma1_single(components: [&DecoherenceFunction; 3], weights: MixtureWeights, grid: usize) -> Result<f64> {
    let horizon = components.iter().map(|c| c.horizon).fold(f64::INFINITY, f64::min);
    let [a, b, c] = weights.as_array();
    let mut min = f64::INFINITY;
    for t in linspace(0.0, horizon, grid.max(2)) {
        let (p, q, r) = (components[0].eval(t), components[1].eval(t), components[2].eval(t));
        let lambdas = [
            1.0 - 2.0 * (b * q + c * r),
            1.0 - 2.0 * (a * p + c * r),
            1.0 - 2.0 * (a * p + b * q),
        ];
        for (j, &l) in lambdas.iter().enumerate() {
            if l <= 0.0 {
                return Err(Error::LemmaViolation {
                    trial: 0,
                    index: j + 1,
                    t,
                    value: l,
                });
            }
            min = min.min(l);
        }
    }
    Ok(min)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentSingularities {
    pub axis: usize,
    pub weight: f64,
    /// Times where the component's decoherence function equals 1/2.
    pub singular_times: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixtureSingularity {
    pub time: f64,
    pub vanishing: Vec<usize>,
    /// Axes of the contributing components singular at the same time.
    pub coincident_components: Vec<usize>,
    /// Every component feeding a vanishing eigenvalue is singular here too.
    pub synchronized: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynchronizationReport {
    pub horizon: f64,
    pub components: Vec<ComponentSingularities>,
    pub mixture: Vec<MixtureSingularity>,
    pub mixture_singular: bool,
    pub all_synchronized: bool,
}

/// Compares the singular times of a flip mixture with those of its components.
pub fn synchronization_report(
    mixture: &PauliChannel,
    components: &[FlipComponent],
    weights: &[f64],
    horizon: f64,
) -> Result<SynchronizationReport> {
    if components.len() != weights.len() {
        return Err(Error::InvalidWeights("components and weights differ in length".into()));
    }
    validate_weights(weights)?;
    let scan = Scan::default();
    let comps: Vec<ComponentSingularities> = components
        .iter()
        .zip(weights)
        .map(|(c, &w)| {
            let h = horizon.min(c.f.horizon);
            let shifted = c.f.f.affine(-0.5, 1.0);
            ComponentSingularities {
                axis: c.axis.number(),
                weight: w,
                singular_times: find_roots(&shifted, 0.0, h, scan.points(0.0, h), DEFAULT_ROOT_TOL),
            }
        })
        .collect();

    let coincide_radius = 1e3 * SINGULAR_MERGE_RADIUS;
    let mixture_points: Vec<MixtureSingularity> = singular_times(mixture, horizon, scan)
        .into_iter()
        .map(|(time, axes)| {
            let coincident: Vec<usize> = comps
                .iter()
                .filter(|c| c.singular_times.iter().any(|&s| (s - time).abs() < coincide_radius))
                .map(|c| c.axis)
                .collect();
            let synchronized = axes.iter().all(|&vanishing| {
                comps
                    .iter()
                    .filter(|c| c.weight > 0.0 && c.axis != vanishing.number())
                    .all(|c| coincident.contains(&c.axis))
            });
            MixtureSingularity {
                time,
                vanishing: axes.into_iter().map(Axis::number).collect(),
                coincident_components: coincident,
                synchronized,
            }
        })
        .collect();
    Ok(SynchronizationReport {
        horizon,
        mixture_singular: !mixture_points.is_empty(),
        all_synchronized: mixture_points.iter().all(|m| m.synchronized),
        components: comps,
        mixture: mixture_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cosine_decoherence, rtn_decoherence, semigroup_decoherence};
    use std::f64::consts::FRAC_PI_2;

    fn dec(f: TimeFunction, horizon: f64) -> DecoherenceFunction {
        DecoherenceFunction::new(f, horizon).unwrap()
    }

    #[test]
    fn weights_are_validated() {
        assert!(MixtureWeights::new(0.5, 0.5, 0.0).is_ok());
        assert!(MixtureWeights::new(0.5, 0.6, -0.1).is_err());
        assert!(MixtureWeights::new(0.5, 0.4, 0.0).is_err());
        let ch = PauliChannel::identity();
        assert!(matches!(
            mix(std::slice::from_ref(&ch), &[0.9]),
            Err(Error::InvalidWeights(_))
        ));
        assert!(mix(&[ch.clone(), ch], &[1.0]).is_err());
    }

    #[test]
    fn decoherence_range_is_checked() {
        assert!(DecoherenceFunction::new(TimeFunction::new(|t| 0.1 + t * 0.0), 1.0).is_err());
        assert!(DecoherenceFunction::new(TimeFunction::new(|t| t), 2.0).is_err());
        assert!(DecoherenceFunction::new(TimeFunction::new(|t| 0.25 * t), 2.0).is_ok());
    }

    #[test]
    fn flip_channel_examples() {
        let zero = dec(TimeFunction::constant(0.0), 1.0);
        let ch = flip_channel(Axis::X, &zero);
        assert_eq!(ch.lambdas_at(0.7), [1.0, 1.0, 1.0]);

        let ch = flip_channel(Axis::Z, &dec(semigroup_decoherence(1.0), 5.0));
        for t in [0.0, 0.5, 2.0] {
            let l = ch.lambdas_at(t);
            assert!((l[0] - (-2.0 * t).exp()).abs() < 1e-15);
            assert!((l[1] - (-2.0 * t).exp()).abs() < 1e-15);
            assert_eq!(l[2], 1.0);
        }

        let ch = flip_channel(Axis::X, &dec(cosine_decoherence(1.0), 5.0));
        for t in [0.3, 1.1, 2.9] {
            let l = ch.lambdas_at(t);
            assert_eq!(l[0], 1.0);
            assert!((l[1] - t.cos().powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn mixing_one_channel_is_identity_operation() {
        let ch = flip_channel(Axis::Y, &dec(cosine_decoherence(2.0), 3.0));
        let m = mix(std::slice::from_ref(&ch), &[1.0]).unwrap();
        for t in linspace(0.0, 3.0, 31) {
            assert_eq!(m.lambdas_at(t), ch.lambdas_at(t));
        }
    }

    #[test]
    fn flip_mixture_matches_closed_form_and_generic_mix() {
        let p = dec(cosine_decoherence(1.0), 5.0);
        let q = dec(semigroup_decoherence(0.7), 5.0);
        let r = dec(cosine_decoherence(2.3), 5.0);
        let (a, b, c) = (0.2, 0.5, 0.3);
        let comps = vec![
            FlipComponent::new(Axis::X, p.clone()),
            FlipComponent::new(Axis::Y, q.clone()),
            FlipComponent::new(Axis::Z, r.clone()),
        ];
        let fast = mix_flips(&comps, &[a, b, c]).unwrap();
        let generic = mix(
            &comps.iter().map(FlipComponent::channel).collect::<Vec<_>>(),
            &[a, b, c],
        )
        .unwrap();
        for t in linspace(0.0, 5.0, 101) {
            let (pv, qv, rv) = (p.eval(t), q.eval(t), r.eval(t));
            let expected = [
                1.0 - 2.0 * (b * qv + c * rv),
                1.0 - 2.0 * (a * pv + c * rv),
                1.0 - 2.0 * (a * pv + b * qv),
            ];
            let (lf, lg) = (fast.lambdas_at(t), generic.lambdas_at(t));
            for j in 0..3 {
                assert!((lf[j] - expected[j]).abs() < 1e-12);
                assert!((lg[j] - expected[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn equal_mix_of_identical_rtn_flips() {
        let params = RtnParams::new(1.0, 3.0).unwrap();
        let f = dec(rtn_decoherence(params), 10.0);
        let comps: Vec<FlipComponent> = Axis::ALL.iter().map(|&a| FlipComponent::new(a, f.clone())).collect();
        let third = 1.0 / 3.0;
        let m = mix_flips(&comps, &[third, third, 1.0 - 2.0 * third]).unwrap();
        for t in linspace(0.0, 10.0, 57) {
            let lam = families::rtn_lambda(t, &params);
            for l in m.lambdas_at(t) {
                assert!((l - (1.0 + 2.0 * lam) / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classification_examples() {
        let semi = dec(semigroup_decoherence(1.0), 10.0);
        let v = classify_type(&semi, 10.0);
        assert_eq!(v.kind, ChannelType::NonSingular);
        assert!(v.attaining_times.is_empty());

        let cos = dec(cosine_decoherence(1.0), 10.0);
        let v = classify_type(&cos, 10.0);
        assert_eq!(v.kind, ChannelType::TypeI);
        assert_eq!(v.attaining_times.len(), 3);
        assert!((v.attaining_times[0] - FRAC_PI_2).abs() < 1e-6);

        let rtn = dec(rtn_decoherence(RtnParams::new(1.0, 10.0).unwrap()), 10.0);
        assert_eq!(classify_type(&rtn, 10.0).kind, ChannelType::TypeII);
    }

    #[test]
    fn lemma1_small_run_passes() {
        let report = verify_lemma1(&Lemma1Config::new(64, 10.0, 42)).unwrap();
        assert_eq!(report.failures, 0);
        assert!(report.global_min_lambda > 0.0);
        assert!(report.min_bound_margin > -1e-9);
    }

    #[test]
    fn lemma1_is_deterministic() {
        let cfg = Lemma1Config::new(32, 5.0, 7);
        let a = verify_lemma1(&cfg).unwrap();
        let b = verify_lemma1(&cfg).unwrap();
        assert_eq!(a.global_min_lambda, b.global_min_lambda);
        assert_eq!(a.global_min_trial, b.global_min_trial);
    }

    #[test]
    fn lemma1_catches_injected_singular_family() {
        let mut cfg = Lemma1Config::new(10, 10.0, 1);
        cfg.inject_type_ii = true;
        assert!(matches!(verify_lemma1(&cfg), Err(Error::LemmaViolation { .. })));
        cfg.trials = 0;
        assert!(verify_lemma1(&cfg).is_err());
    }

    #[test]
    fn lemma1_plateau_case() {
        let plateau = dec(TimeFunction::new(|t: f64| 0.49 * (1.0 - (-50.0 * t).exp())), 10.0);
        let min = lemma1_single([&plateau, &plateau, &plateau], MixtureWeights::equal(), 4001).unwrap();
        // 1 - 2 (2/3) 0.49, up to the short ramp at t = 0
        assert!((min - (1.0 - 2.0 * (2.0 / 3.0) * 0.49)).abs() < 1e-9, "{min}");
    }

    #[test]
    fn lemma1_single_channel_case() {
        let p = dec(families::bounded_cosine_decoherence(0.3, 1.0), 10.0);
        let zero = dec(TimeFunction::constant(0.0), 10.0);
        let min = lemma1_single([&p, &zero, &zero], MixtureWeights::new(1.0, 0.0, 0.0).unwrap(), 20001).unwrap();
        assert!((min - (1.0 - 2.0 * p.sup_value())).abs() < 1e-6);
    }

    #[test]
    fn synchronization_of_example_one() {
        let f = dec(cosine_decoherence(1.0), 6.0);
        let comps = vec![FlipComponent::new(Axis::X, f.clone()), FlipComponent::new(Axis::Y, f)];
        let m = mix_flips(&comps, &[0.5, 0.5]).unwrap();
        let rep = synchronization_report(&m, &comps, &[0.5, 0.5], 6.0).unwrap();
        assert!(rep.mixture_singular);
        assert!(rep.all_synchronized);
        assert!((rep.mixture[0].time - FRAC_PI_2).abs() < 1e-6);
        assert_eq!(rep.mixture[0].vanishing, vec![3]);
        assert_eq!(rep.mixture[0].coincident_components, vec![1, 2]);
    }

    #[test]
    fn incommensurate_example_one_is_regular() {
        let p = dec(cosine_decoherence(1.0), 20.0);
        let q = dec(cosine_decoherence(2f64.sqrt()), 20.0);
        let comps = vec![FlipComponent::new(Axis::X, p), FlipComponent::new(Axis::Y, q)];
        let m = mix_flips(&comps, &[0.5, 0.5]).unwrap();
        let rep = synchronization_report(&m, &comps, &[0.5, 0.5], 20.0).unwrap();
        assert!(!rep.mixture_singular);
        assert!(rep.components.iter().all(|c| !c.singular_times.is_empty()));
    }
}
