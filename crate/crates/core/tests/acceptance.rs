//! Acceptance criteria. Each criterion prints one PASS/FAIL line; tolerances
//! are pinned here. Run with `cargo test -p pauli-dyn-core --test acceptance -- --nocapture`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pauli_dyn_core::channel::{
    choi_from_lambdas, hermitian_eigenvalues, kraus_operators, lambdas_to_probs, probs_to_lambdas,
};
use pauli_dyn_core::families::{
    cosine_flip, rate_defined_dephasing, rtn_lambda, semigroup_flip, RateProfile, RtnParams,
};
use pauli_dyn_core::generator::{decay_rates, is_cp_divisible, singular_points, SingularityKind, SingularityReport};
use pauli_dyn_core::mixing::{synchronization_report, verify_lemma1, Lemma1Config};
use pauli_dyn_core::numerics::{bisect, grid_sup, linspace, TimeFunction};
use pauli_dyn_core::scenarios::{example1, example2, example3, example4, example4_t_star, EXAMPLE2_RTN};
use pauli_dyn_core::sim::roundtrip_error;
use pauli_dyn_core::{Axis, PauliChannel, ProbabilityVector};

const SINGULAR_TIME_TOL: f64 = 1e-6;
const LEMMA_BOUND_SLACK: f64 = 1e-9;
const EXAMPLE1_MIN_LAMBDA3: f64 = 0.01;
const EXAMPLE2_SLACK: f64 = 1e-9;
const BISECTION_TOL: f64 = 1e-9;
const VANISHING_TOL: f64 = 1e-8;
const RATE_TOL_SEMIGROUP: f64 = 1e-6;
const RATE_TOL_COSINE: f64 = 1e-5;
const ROUNDTRIP_TOL: f64 = 1e-5;
const ROUNDTRIP_DT: f64 = 1e-4;
const CONVERGENCE_DT: f64 = 0.1;
const CONVERGENCE_RATIO: f64 = 8.0;
const ROUND_TRIP_TOL: f64 = 1e-12;
const CHOI_TOL: f64 = 1e-10;
const KRAUS_TOL: f64 = 1e-12;
const ASYNC_GAP: f64 = 1e-3;

/// Criteria that cannot hold as stated. Each entry explains why; the
/// suite checks that exactly these fail so a change in either direction
/// is noticed.
const UNATTAINABLE: &[(u8, &str)] = &[
    (
        2,
        "min lambda3 for mu = 1, nu = sqrt 2 on [0, 20] is about 0.0021 near t = 7.80, below the 0.01 threshold",
    ),
    (
        4,
        "for d = 2, w = 1 the RTN eigenvalue bottoms out at -exp(-pi/sqrt 15) = -0.444 and never reaches -1/2",
    ),
];

type Criterion = (u8, &'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn all_flipping(report: &SingularityReport) -> bool {
    report.points.iter().all(|p| {
        p.classification
            .as_ref()
            .is_some_and(|c| c.kind == SingularityKind::SignFlipping)
    })
}

fn criterion_1() -> Verdict {
    match verify_lemma1(&Lemma1Config::new(1000, 10.0, 42)) {
        Ok(r) => verdict(
            r.failures == 0 && r.global_min_lambda > 0.0 && r.min_bound_margin > -LEMMA_BOUND_SLACK,
            format!(
                "1000 trials, {} failures, min lambda {:.3e}, min bound margin {:.3e}",
                r.failures, r.global_min_lambda, r.min_bound_margin
            ),
        ),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn criterion_2() -> Verdict {
    let sync = example1(1.0, 1.0, 3.0).unwrap();
    let report = singular_points(&sync.channel, 3.0);
    let first = report.points.first();
    let located = first.is_some_and(|p| (p.time - FRAC_PI_2).abs() < SINGULAR_TIME_TOL && p.vanishing == vec![3]);

    let inc = example1(1.0, 2f64.sqrt(), 20.0).unwrap();
    let inc_report = singular_points(&inc.channel, 20.0);
    let l3 = inc.channel.lambda(Axis::Z).affine(0.0, -1.0);
    let (t_min, neg_min) = grid_sup(&l3, 0.0, 20.0, 200_001);
    let min_l3 = -neg_min;
    verdict(
        located && inc_report.is_empty() && min_l3 > EXAMPLE1_MIN_LAMBDA3,
        format!(
            "first t* = {:?} vanishing {:?}; incommensurate: {} singular points, min lambda3 = {min_l3:.5} at t = {t_min:.4} (need > {EXAMPLE1_MIN_LAMBDA3})",
            first.map(|p| p.time),
            first.map(|p| p.vanishing.clone()),
            inc_report.points.len()
        ),
    )
}

fn criterion_3() -> Verdict {
    let horizon = 20.0;
    match example2(horizon) {
        Ok(ch) => {
            let min = linspace(0.0, horizon, 200_001)
                .into_iter()
                .flat_map(|t| ch.lambdas_at(t))
                .fold(f64::INFINITY, f64::min);
            verdict(
                min >= 1.0 / 3.0 - EXAMPLE2_SLACK,
                format!(
                    "w = {}, d = {}: min lambda = {min:.6} (bound 1/3)",
                    EXAMPLE2_RTN.w, EXAMPLE2_RTN.d
                ),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn criterion_4() -> Verdict {
    let p = RtnParams::new(1.0, 2.0).unwrap();
    let horizon = 50.0;
    let ch = example3(p);
    let g = |t: f64| rtn_lambda(t, &p) + 0.5;
    let ts = linspace(0.0, horizon, 500_001);
    let bracket = ts.windows(2).find(|w| g(w[0]) > 0.0 && g(w[1]) <= 0.0);
    match bracket {
        Some(w) => {
            let t = bisect(g, w[0], w[1]);
            let l = ch.lambdas_at(t);
            let f = 0.5 * (1.0 - rtn_lambda(t, &p));
            verdict(
                (w[1] - w[0]) > 0.0
                    && g(t).abs() < BISECTION_TOL
                    && l.iter().all(|x| x.abs() < VANISHING_TOL)
                    && (f - 0.75).abs() < VANISHING_TOL,
                format!("t* = {t}, lambdas {l:?}, p = {f}"),
            )
        }
        None => {
            let lam = TimeFunction::new(move |t| -rtn_lambda(t, &p));
            let (t_min, neg) = grid_sup(&lam, 0.0, horizon, 500_001);
            verdict(
                false,
                format!(
                    "Lambda never reaches -1/2 on [0, {horizon}]: min Lambda = {:.6} at t = {t_min:.6}",
                    -neg
                ),
            )
        }
    }
}

fn criterion_5() -> Verdict {
    let m = example4(8.0).unwrap();
    let t_star = example4_t_star();
    let q = m.components[1].f.eval(t_star);
    let r = m.components[2].f.eval(t_star);
    let l1 = m.channel.lambdas_at(t_star)[0];
    let s = synchronization_report(&m.channel, &m.components, &m.weights, 8.0).unwrap();
    let comp: Vec<f64> = s.components[1..]
        .iter()
        .flat_map(|c| c.singular_times.clone())
        .collect();
    let located = s
        .mixture
        .iter()
        .any(|p| (p.time - t_star).abs() < SINGULAR_TIME_TOL && p.vanishing == vec![1]);
    verdict(
        l1.abs() < VANISHING_TOL
            && (q - 0.6).abs() < VANISHING_TOL
            && (r - 0.8).abs() < VANISHING_TOL
            && located
            && comp.len() == 2
            && comp.iter().all(|c| (c - t_star).abs() > ASYNC_GAP),
        format!("t_R = {t_star:.6}, q = {q}, r = {r}, lambda1 = {l1:.2e}, component times {comp:?}"),
    )
}

fn criterion_6() -> Verdict {
    let tan = rate_defined_dephasing(&RateProfile::Tan { omega: 1.0 }, Axis::Z).unwrap();
    let rep = singular_points(&tan, 3.0);
    let tan_ok = rep.points.len() == 1
        && (rep.points[0].time - FRAC_PI_2).abs() < SINGULAR_TIME_TOL
        && all_flipping(&rep)
        && !is_cp_divisible(&tan, 3.0, 4001).cp_divisible;

    let tan2 = rate_defined_dephasing(&RateProfile::TanSquared { omega: 1.0 }, Axis::Z).unwrap();
    let rep2 = singular_points(&tan2, 3.0);
    let tan2_ok = !rep2.is_empty()
        && rep2.points.iter().all(|p| {
            p.classification
                .as_ref()
                .is_some_and(|c| c.kind == SingularityKind::NonFlipping)
        })
        && is_cp_divisible(&tan2, 3.0, 4001).cp_divisible;
    verdict(
        tan_ok && tan2_ok,
        format!(
            "tan: {:?} ({tan_ok}); tan^2: {:?} ({tan2_ok})",
            rep.times(),
            rep2.times()
        ),
    )
}

fn criterion_7() -> Verdict {
    let semi = semigroup_flip(Axis::Z, 1.0).unwrap();
    let rates = decay_rates(&semi, 5.0);
    let semi_err = linspace(0.0, 5.0, 100)
        .into_iter()
        .flat_map(|t| {
            let g = rates.at(t);
            [g[0].abs(), g[1].abs(), (g[2] - 1.0).abs()]
        })
        .fold(0.0, f64::max);

    let cos = cosine_flip(Axis::X, 1.0).unwrap();
    let rates = decay_rates(&cos, 1.5);
    let cos_err = (1..=100)
        .map(|i| 1.5 * i as f64 / 101.0)
        .map(|t| (rates.at(t)[0] - t.tan()).abs())
        .fold(0.0, f64::max);
    verdict(
        semi_err < RATE_TOL_SEMIGROUP && cos_err < RATE_TOL_COSINE,
        format!("semigroup max error {semi_err:.2e}, cosine gamma1 vs tan max error {cos_err:.2e}"),
    )
}

fn criterion_8() -> Verdict {
    let semi = semigroup_flip(Axis::Z, 1.0).unwrap();
    let cos = cosine_flip(Axis::X, 1.0).unwrap();
    let e_semi = roundtrip_error(&semi, 2.0, ROUNDTRIP_DT).unwrap();
    let e_cos = roundtrip_error(&cos, 1.4, ROUNDTRIP_DT).unwrap();
    let ratio = |ch: &PauliChannel, h: f64| {
        roundtrip_error(ch, h, CONVERGENCE_DT).unwrap() / roundtrip_error(ch, h, CONVERGENCE_DT / 2.0).unwrap()
    };
    let (r_semi, r_cos) = (ratio(&semi, 2.0), ratio(&cos, 1.4));
    let e_fine = roundtrip_error(&cos, 1.4, ROUNDTRIP_DT / 2.0).unwrap();
    verdict(
        e_semi < ROUNDTRIP_TOL && e_cos < ROUNDTRIP_TOL && r_semi >= CONVERGENCE_RATIO && r_cos >= CONVERGENCE_RATIO,
        format!(
            "dt = 1e-4: semigroup {e_semi:.2e}, cosine {e_cos:.2e}; halving dt = {CONVERGENCE_DT}: ratios {r_semi:.1}, {r_cos:.1} (at dt = 1e-4 the ratio is {:.1}, rounding floor)",
            e_cos / e_fine
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut rt, mut choi, mut kraus) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let raw: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>());
        let s: f64 = raw.iter().sum();
        let k = ProbabilityVector(raw.map(|x| x / s));
        let lambdas = probs_to_lambdas(&k);
        let back = lambdas_to_probs(lambdas);
        rt = rt.max((0..4).map(|i| (back.0[i] - k.0[i]).abs()).fold(0.0, f64::max));

        let mut sorted = k.0;
        sorted.sort_by(f64::total_cmp);
        let eig = hermitian_eigenvalues(&choi_from_lambdas(lambdas));
        choi = choi.max((0..4).map(|i| (eig[i] - sorted[i]).abs()).fold(0.0, f64::max));

        let ops = kraus_operators(&PauliChannel::constant("c", lambdas), 0.0, 1e-10).unwrap();
        let sum = ops
            .iter()
            .fold(Matrix2::<Complex64>::zeros(), |acc, a| acc + a.adjoint() * a);
        kraus = kraus.max((sum - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    verdict(
        rt < ROUND_TRIP_TOL && choi < CHOI_TOL && kraus < KRAUS_TOL,
        format!("10^4 samples: round trip {rt:.1e}, Choi {choi:.1e}, Kraus {kraus:.1e}"),
    )
}

fn criterion_10() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, ch: &PauliChannel, horizon: f64| {
        let rep = singular_points(ch, horizon);
        if rep.is_empty() {
            parts.push(format!("{name}: no singular point"));
            return;
        }
        let flipping = all_flipping(&rep);
        let indivisible = !is_cp_divisible(ch, horizon, 4001).cp_divisible;
        ok &= flipping && indivisible;
        parts.push(format!(
            "{name}: {} points, flipping {flipping}, indivisible {indivisible}",
            rep.points.len()
        ));
    };
    check("example 1", &example1(1.0, 1.0, 10.0).unwrap().channel, 10.0);
    check("rtn d=2", &example3(RtnParams::new(1.0, 2.0).unwrap()), 10.0);
    check("rtn d=3", &example3(RtnParams::new(1.0, 3.0).unwrap()), 10.0);
    check("example 4", &example4(8.0).unwrap().channel, 8.0);

    let tan2 = rate_defined_dephasing(&RateProfile::TanSquared { omega: 1.0 }, Axis::Z).unwrap();
    let converse_fails = !singular_points(&tan2, 3.0).is_empty() && is_cp_divisible(&tan2, 3.0, 4001).cp_divisible;
    ok &= converse_fails;
    parts.push(format!("tan^2 singular yet CP-divisible: {converse_fails}"));
    verdict(ok, parts.join("; "))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        (1, "mixtures of non-singular flips stay invertible", criterion_1),
        (
            2,
            "synchronized cosine flips are singular at pi/2; incommensurate ones stay regular",
            criterion_2,
        ),
        (3, "three-way confined RTN mixture keeps lambda >= 1/3", criterion_3),
        (
            4,
            "RTN d=2, w=1 equal mixture singular where Lambda = -1/2",
            criterion_4,
        ),
        (5, "asynchronous Type II mixture singular at t_R", criterion_5),
        (6, "tan rate flips sign, tan^2 rate does not", criterion_6),
        (7, "rate formula reproduces known rates", criterion_7),
        (8, "master equation reproduces the map at fourth order", criterion_8),
        (9, "structural invariants", criterion_9),
        (10, "singular mixtures are CP-indivisible, not conversely", criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, name, run) in criteria {
        let v = run();
        println!(
            "{} criterion {n:>2}: {name} -- {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
        if !v.passed {
            failed.push(n);
        }
    }
    for (n, why) in UNATTAINABLE {
        println!("note: criterion {n} is expected to fail: {why}");
    }
    let expected: Vec<u8> = UNATTAINABLE.iter().map(|(n, _)| *n).collect();
    assert_eq!(
        failed, expected,
        "failing criteria differ from the documented unattainable set"
    );
}
