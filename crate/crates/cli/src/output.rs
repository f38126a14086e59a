use std::fmt::Write as _;

use pauli_dyn_core::generator::{decay_rates, default_delta};
use pauli_dyn_core::numerics::linspace;
use pauli_dyn_core::PauliChannel;

pub const CSV_HEADER: &str = "t,lambda1,lambda2,lambda3,k0,k1,k2,k3,gamma1,gamma2,gamma3";
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `v` with 12 significant digits in the style of C's `%.12g`:
/// fixed notation for exponents in `[-5, 12)`, scientific otherwise, with
/// trailing zeros removed.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

/// Sweep of a channel on `grid` points of `[0, horizon]` as CSV text. Rate
/// cells are left empty within `10 * delta` of a singular point and
/// wherever a rate is not finite.
pub fn sweep_csv(ch: &PauliChannel, horizon: f64, grid: usize) -> String {
    let rates = decay_rates(ch, horizon);
    let poles = rates.pole_times().to_vec();
    let windows: Vec<(f64, f64)> = poles
        .iter()
        .map(|&p| {
            let r = 10.0 * default_delta(p, &poles, horizon);
            (p - r, p + r)
        })
        .collect();
    let mut out = String::with_capacity(grid * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for t in linspace(0.0, horizon, grid) {
        let l = ch.lambdas_at(t);
        let k = ch.probs_at(t).0;
        let _ = write!(out, "{}", fmt_sig(t));
        for v in l.iter().chain(k.iter()) {
            let _ = write!(out, ",{}", fmt_sig(*v));
        }
        let excised = windows.iter().any(|&(a, b)| t >= a && t <= b);
        let g = rates.at(t);
        for v in g {
            out.push(',');
            if !excised && v.is_finite() {
                out.push_str(&fmt_sig(v));
            }
        }
        out.push('\n');
    }
    out
}

/// True when every lambda in the sweep is finite.
pub fn sweep_is_finite(ch: &PauliChannel, horizon: f64, grid: usize) -> Option<f64> {
    linspace(0.0, horizon, grid)
        .into_iter()
        .find(|&t| ch.lambdas_at(t).iter().any(|v| !v.is_finite()))
}
