//! Scalar time functions and the numerical primitives shared by every other
//! module: differentiation, composite Simpson quadrature, grid root scanning
//! and golden-section refinement.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Grid points per unit of time used when a caller does not pick a grid.
pub const DEFAULT_GRID_DENSITY: f64 = 4096.0;
/// Default absolute tolerance for root finding.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Points where a [`TimeFunction`] is singular or discontinuous.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Poles {
    #[default]
    None,
    List(Vec<f64>),
    /// `first + n * period` for n = 0, 1, 2, ...
    Periodic {
        first: f64,
        period: f64,
    },
}

impl Poles {
    /// Poles inside the closed interval `[t0, t1]`, ascending.
    pub fn in_range(&self, t0: f64, t1: f64) -> Vec<f64> {
        match self {
            Poles::None => Vec::new(),
            Poles::List(points) => {
                let mut out: Vec<f64> = points.iter().copied().filter(|&p| p >= t0 && p <= t1).collect();
                out.sort_by(f64::total_cmp);
                out
            }
            Poles::Periodic { first, period } => {
                let mut out = Vec::new();
                if !(*period > 0.0) {
                    return out;
                }
                let start = ((t0 - first) / period).ceil().max(0.0) as u64;
                let mut n = start;
                loop {
                    let p = first + n as f64 * period;
                    if p > t1 {
                        break;
                    }
                    if p >= t0 {
                        out.push(p);
                    }
                    n += 1;
                }
                out
            }
        }
    }

    /// Smallest pole `>= t0`, if any.
    pub fn first_from(&self, t0: f64) -> Option<f64> {
        match self {
            Poles::None => None,
            Poles::List(points) => points.iter().copied().filter(|&p| p >= t0).min_by(f64::total_cmp),
            Poles::Periodic { first, period } => {
                if !(*period > 0.0) {
                    return (*first >= t0).then_some(*first);
                }
                let n = ((t0 - first) / period).ceil().max(0.0);
                Some(first + n * period)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Poles::None) || matches!(self, Poles::List(v) if v.is_empty())
    }

    /// Union of two pole sets, materialised on `[0, horizon]` when either is periodic.
    pub fn union(&self, other: &Poles, horizon: f64) -> Poles {
        match (self, other) {
            (Poles::None, p) | (p, Poles::None) => p.clone(),
            (a, b) if a == b => a.clone(),
            _ => {
                let end = if horizon.is_finite() { horizon } else { 1e3 };
                let mut all = self.in_range(0.0, end);
                all.extend(other.in_range(0.0, end));
                all.sort_by(f64::total_cmp);
                all.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
                Poles::List(all)
            }
        }
    }
}

/// A real function of time on `[0, domain_end]` with an optional analytic
/// derivative and a set of declared poles.
#[derive(Clone)]
pub struct TimeFunction {
    eval: Scalar,
    derivative: Option<Scalar>,
    domain_end: f64,
    poles: Poles,
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeFunction")
            .field("analytic_derivative", &self.derivative.is_some())
            .field("domain_end", &self.domain_end)
            .field("poles", &self.poles)
            .finish()
    }
}

impl TimeFunction {
    /// A function on `[0, inf)` without a declared derivative.
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            derivative: None,
            domain_end: f64::INFINITY,
            poles: Poles::None,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(move |_| value).with_derivative(|_| 0.0)
    }

    pub fn with_derivative(mut self, derivative: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn with_domain_end(mut self, domain_end: f64) -> Self {
        self.domain_end = domain_end;
        self
    }

    pub fn with_poles(mut self, poles: Poles) -> Self {
        self.poles = poles;
        self
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// The declared analytic derivative, if any.
    #[inline]
    pub fn analytic_derivative(&self, t: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(t))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn poles(&self) -> &Poles {
        &self.poles
    }

    pub fn poles_in(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.poles.in_range(t0, t1)
    }

    /// `offset + scale * self`.
    pub fn affine(&self, offset: f64, scale: f64) -> TimeFunction {
        let inner = self.eval.clone();
        let mut out = TimeFunction::new(move |t| offset + scale * inner(t))
            .with_domain_end(self.domain_end)
            .with_poles(self.poles.clone());
        if let Some(d) = self.derivative.clone() {
            out = out.with_derivative(move |t| scale * d(t));
        }
        out
    }

    /// `offset + sum_i weight_i * f_i`. The analytic derivative is kept only
    /// when every term declares one.
    pub fn linear_combination(offset: f64, terms: &[(f64, &TimeFunction)]) -> TimeFunction {
        let evals: Vec<(f64, Scalar)> = terms.iter().map(|(w, f)| (*w, f.eval.clone())).collect();
        let domain_end = terms.iter().map(|(_, f)| f.domain_end).fold(f64::INFINITY, f64::min);
        let horizon = if domain_end.is_finite() { domain_end } else { 1e3 };
        let poles = terms
            .iter()
            .filter(|(w, _)| *w != 0.0)
            .fold(Poles::None, |acc, (_, f)| acc.union(&f.poles, horizon));
        let mut out = TimeFunction::new(move |t| offset + evals.iter().map(|(w, f)| w * f(t)).sum::<f64>())
            .with_domain_end(domain_end)
            .with_poles(poles);
        if terms.iter().all(|(_, f)| f.derivative.is_some()) {
            let derivs: Vec<(f64, Scalar)> = terms
                .iter()
                .map(|(w, f)| (*w, f.derivative.clone().expect("checked above")))
                .collect();
            out = out.with_derivative(move |t| derivs.iter().map(|(w, d)| w * d(t)).sum());
        }
        out
    }
}

/// Finite-difference step used when none is given.
pub fn default_step(t: f64) -> f64 {
    1e-6 * t.abs().max(1.0)
}

/// Derivative of `f` at `t` with step `h`: the analytic derivative when one
/// is declared, otherwise the central difference.
pub fn differentiate(f: &TimeFunction, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || t - h < 0.0 || t + h > f.domain_end {
        return Err(Error::OutOfDomain {
            t,
            h,
            domain_end: f.domain_end,
        });
    }
    if let Some(d) = f.analytic_derivative(t) {
        return Ok(d);
    }
    Ok((f.eval(t + h) - f.eval(t - h)) / (2.0 * h))
}

/// Like [`differentiate`] with the default step, but falls back to
/// second-order one-sided stencils at the ends of the domain instead of
/// failing.
pub fn derivative(f: &TimeFunction, t: f64) -> f64 {
    if let Some(d) = f.analytic_derivative(t) {
        return d;
    }
    let h = default_step(t);
    if t - h >= 0.0 && t + h <= f.domain_end {
        (f.eval(t + h) - f.eval(t - h)) / (2.0 * h)
    } else if t - h < 0.0 {
        (-3.0 * f.eval(t) + 4.0 * f.eval(t + h) - f.eval(t + 2.0 * h)) / (2.0 * h)
    } else {
        (3.0 * f.eval(t) - 4.0 * f.eval(t - h) + f.eval(t - 2.0 * h)) / (2.0 * h)
    }
}

/// Composite Simpson rule on `n` panels (rounded up to even).
pub fn integrate(f: &TimeFunction, t0: f64, t1: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("need n >= 2 panels, got {n}")));
    }
    if let Some(&pole) = f.poles_in(t0.min(t1), t0.max(t1)).first() {
        return Err(Error::PoleInRange {
            pole,
            start: t0,
            end: t1,
        });
    }
    let n = n + n % 2;
    let h = (t1 - t0) / n as f64;
    let mut acc = f.eval(t0) + f.eval(t1);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        let t = t0 + h * i as f64;
        let v = f.eval(t);
        if !v.is_finite() {
            return Err(Error::PoleInRange {
                pole: t,
                start: t0,
                end: t1,
            });
        }
        acc += w * v;
    }
    if !acc.is_finite() {
        return Err(Error::PoleInRange {
            pole: if f.eval(t0).is_finite() { t1 } else { t0 },
            start: t0,
            end: t1,
        });
    }
    Ok(acc * h / 3.0)
}

/// `n` evenly spaced points covering `[t0, t1]` inclusive.
pub fn linspace(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => {
            let step = (t1 - t0) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { t1 } else { t0 + step * i as f64 })
                .collect()
        }
    }
}

/// Grid size for `[t0, t1]` at the default density.
pub fn default_grid_points(t0: f64, t1: f64) -> usize {
    ((DEFAULT_GRID_DENSITY * (t1 - t0)).ceil() as usize).max(2) + 1
}

/// Bisection on a sign-change bracket, run until the midpoint no longer
/// separates the endpoints.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of `f` on `[a, b]`. Returns `(x, f(x))`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1e-300) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (c, fc), (d, fd), (b, f(b))];
    candidates
        .into_iter()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((0.5 * (a + b), f(0.5 * (a + b))))
}

/// Supremum of `f` over `[t0, t1]`: a grid scan refined by golden-section
/// search around the best grid point. Returns `(t, sup)`.
pub fn grid_sup(f: &TimeFunction, t0: f64, t1: f64, grid_points: usize) -> (f64, f64) {
    let ts = linspace(t0, t1, grid_points.max(2));
    let (best, _) = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| (i, f.eval(t)))
        .filter(|(_, v)| v.is_finite())
        .fold(
            (0usize, f64::NEG_INFINITY),
            |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
        );
    let lo = ts[best.saturating_sub(1)];
    let hi = ts[(best + 1).min(ts.len() - 1)];
    let (t, neg) = golden_min(|t| -f.eval(t), lo, hi);
    let grid_value = f.eval(ts[best]);
    if -neg >= grid_value {
        (t, -neg)
    } else {
        (ts[best], grid_value)
    }
}

/// All roots of `f` on `[t0, t1]`.
///
/// Sign changes between neighbouring grid points are bisected to machine
/// precision. Local minima of `|f|` without a neighbouring sign change are
/// refined by golden-section search and accepted when the refined value is
/// below `tol`; this is what finds tangential zeros such as those of
/// `cos^2`. A run of grid points where `f` is exactly zero is reported by its
/// first point. Roots closer than `tol` are merged.
pub fn find_roots(f: &TimeFunction, t0: f64, t1: f64, grid_points: usize, tol: f64) -> Vec<f64> {
    let n = grid_points.max(2);
    let ts = linspace(t0, t1, n);
    let fs: Vec<f64> = ts.iter().map(|&t| f.eval(t)).collect();
    let sign_change = |i: usize| -> bool {
        let (a, b) = (fs[i], fs[i + 1]);
        a.is_finite() && b.is_finite() && a != 0.0 && b != 0.0 && (a < 0.0) != (b < 0.0)
    };

    let mut roots = Vec::new();
    let mut i = 0;
    while i < n {
        if fs[i] == 0.0 {
            roots.push(ts[i]);
            while i < n && fs[i] == 0.0 {
                i += 1;
            }
            continue;
        }
        if i + 1 < n && sign_change(i) {
            roots.push(bisect(|t| f.eval(t), ts[i], ts[i + 1]));
        }
        i += 1;
    }

    for i in 0..n {
        let v = fs[i].abs();
        if !v.is_finite() || v == 0.0 {
            continue;
        }
        let left = if i > 0 { fs[i - 1].abs() } else { f64::INFINITY };
        let right = if i + 1 < n { fs[i + 1].abs() } else { f64::INFINITY };
        let is_min = v <= left && v <= right && (v < left || v < right);
        if !is_min {
            continue;
        }
        let near_sign_change = (i > 0 && sign_change(i - 1)) || (i + 1 < n && sign_change(i));
        let near_zero = (i > 0 && fs[i - 1] == 0.0) || (i + 1 < n && fs[i + 1] == 0.0);
        if near_sign_change || near_zero {
            continue;
        }
        let lo = ts[i.saturating_sub(1)];
        let hi = ts[(i + 1).min(n - 1)];
        let (x, fx) = golden_min(|t| f.eval(t).abs(), lo, hi);
        if fx < tol {
            // |f| is flat to second order at a touching zero, so golden section
            // stalls near sqrt(eps); the slope changes sign cleanly there.
            let (dl, dr) = (derivative(f, lo), derivative(f, hi));
            let x = if dl.is_finite() && dr.is_finite() && (dl < 0.0) != (dr < 0.0) {
                let y = bisect(|t| derivative(f, t), lo, hi);
                if f.eval(y).abs() <= fx {
                    y
                } else {
                    x
                }
            } else {
                x
            };
            roots.push(x);
        }
    }

    roots.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(last) if (r - *last).abs() < tol => {
                if f.eval(r).abs() < f.eval(*last).abs() {
                    *last = r;
                }
            }
            _ => merged.push(r),
        }
    }
    merged
}
