//! Shared numerical kernels: complex helpers, overflow-safe scaled values,
//! Gauss–Legendre rules and the exponential-polynomial moment primitive.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest real exponent for which `exp` stays finite in f64 (with margin).
pub const EXP_LIMIT: f64 = 700.0;

/// `(1 - e^{-z}) / z`, continuous through `z = 0`.
pub fn phi(z: C64) -> C64 {
    if z.norm() < 0.5 {
        // sum_{j>=0} (-z)^j / (j+1)!
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for j in 1..40 {
            term *= -z / (j as f64 + 1.0);
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (1.0 - (-z).exp()) / z
    }
}

/// `e^z - 1` without cancellation near the origin.
pub fn expm1(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let mut term = z;
        let mut sum = z;
        for j in 2..40 {
            term *= z / j as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        z.exp() - 1.0
    }
}

/// A complex value stored as `mantissa * exp(exponent)`.
///
/// Used wherever `e^{λ² t}` factors would overflow: the exponent is kept
/// symbolic and only folded in when the caller asks for a plain value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPair {
    pub mantissa: C64,
    pub exponent: C64,
}

impl ScaledPair {
    pub fn new(mantissa: C64, exponent: C64) -> Self {
        Self { mantissa, exponent }
    }

    pub fn plain(value: C64) -> Self {
        Self { mantissa: value, exponent: C64::new(0.0, 0.0) }
    }

    pub fn zero() -> Self {
        Self::plain(C64::new(0.0, 0.0))
    }

    /// Natural log of the magnitude; `-inf` for an exact zero.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.exponent.re
    }

    pub fn abs(&self) -> f64 {
        self.ln_abs().exp()
    }

    /// The plain value, or `None` when it would overflow.
    pub fn value(&self) -> Option<C64> {
        if self.mantissa == C64::new(0.0, 0.0) {
            return Some(self.mantissa);
        }
        if self.ln_abs() > EXP_LIMIT {
            return None;
        }
        Some(self.mantissa * self.exponent.exp())
    }

    /// Value multiplied by `exp(-shift)`, i.e. re-expressed against a new exponent.
    pub fn relative_to(&self, shift: C64) -> C64 {
        if self.mantissa == C64::new(0.0, 0.0) {
            return self.mantissa;
        }
        self.mantissa * (self.exponent - shift).exp()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { mantissa: self.mantissa * factor, exponent: self.exponent }
    }

    /// Sum of several scaled values, expressed against the largest exponent.
    pub fn sum(terms: &[ScaledPair]) -> Self {
        let lead = terms
            .iter()
            .filter(|p| p.mantissa != C64::new(0.0, 0.0))
            .max_by(|a, b| a.exponent.re.total_cmp(&b.exponent.re))
            .map(|p| p.exponent);
        match lead {
            None => Self::zero(),
            Some(e) => Self {
                mantissa: terms.iter().map(|p| p.relative_to(e)).sum(),
                exponent: e,
            },
        }
    }
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Arc<Vec<(f64, f64)>> {
    assert!(order >= 2, "Gauss-Legendre order must be at least 2");
    let mut cache = rule_cache().lock().expect("quadrature cache poisoned");
    cache
        .entry(order)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(order.try_into().expect("nonzero order"));
            Arc::new(rule.iter().map(|(x, w)| (*x, *w)).collect())
        })
        .clone()
}

/// Nodes and weights of a composite rule with `panels` equal panels on `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(x, w) in rule.iter() {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// Composite Gauss–Legendre integral of a complex integrand over `[a, b]`.
pub fn integrate_complex<F: Fn(f64) -> C64>(a: f64, b: f64, panels: usize, order: usize, f: F) -> C64 {
    composite_rule(a, b, panels, order)
        .into_iter()
        .map(|(x, w)| f(x) * w)
        .sum()
}

pub fn integrate_real<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, order: usize, f: F) -> f64 {
    composite_rule(a, b, panels, order)
        .into_iter()
        .map(|(x, w)| f(x) * w)
        .sum()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `∫_0^w s^m e^{-z s} ds` for complex `z`; `w = ∞` requires `Re z > 0`.
pub fn exp_poly_moment(m: u32, z: C64, w: f64) -> C64 {
    if w.is_infinite() {
        let fact: f64 = (1..=m).map(|j| j as f64).product();
        return fact / z.powu(m + 1);
    }
    if w == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let zw = z * w;
    if zw.norm() <= (m as f64).max(2.0) {
        // sum_j (-z)^j w^{m+j+1} / (j! (m+j+1))
        let mut pow = C64::new(w.powi(m as i32 + 1), 0.0);
        let mut sum = C64::new(0.0, 0.0);
        for j in 0..200u32 {
            let term = pow / (m + j + 1) as f64;
            sum += term;
            if j > 2 && term.norm() < 1e-18 * sum.norm().max(f64::MIN_POSITIVE) {
                break;
            }
            pow *= -zw / (j + 1) as f64;
        }
        sum
    } else {
        let decay = (-zw).exp();
        let mut acc = (1.0 - decay) / z;
        let mut wp = 1.0;
        for k in 1..=m {
            wp *= w;
            acc = (k as f64 * acc - wp * decay) / z;
        }
        acc
    }
}

/// `∫_lo^hi x^m e^{-z x} dx` with `0 <= lo < hi <= ∞`.
pub fn exp_poly_integral(m: u32, z: C64, lo: f64, hi: f64) -> C64 {
    if hi <= lo {
        return C64::new(0.0, 0.0);
    }
    if lo == 0.0 {
        return exp_poly_moment(m, z, hi);
    }
    let width = hi - lo;
    let shift = (-z * lo).exp();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..=m {
        acc += binomial(m, j) * lo.powi((m - j) as i32) * exp_poly_moment(j, z, width);
    }
    shift * acc
}

/// `∫_lo^hi e^{κ (τ - anchor)} dτ`, evaluated from whichever endpoint carries
/// the larger modulus so no intermediate exponential overflows needlessly.
pub fn exp_integral(kappa: C64, lo: f64, hi: f64, anchor: f64) -> C64 {
    if hi <= lo {
        return C64::new(0.0, 0.0);
    }
    let width = hi - lo;
    if kappa.re >= 0.0 {
        (kappa * (hi - anchor)).exp() * width * phi(kappa * width)
    } else {
        (kappa * (lo - anchor)).exp() * width * phi(-kappa * width)
    }
}

pub fn binom(n: u32, k: u32) -> f64 {
    binomial(n, k)
}

/// Chebyshev points of the first kind mapped into the open interval `(0, length)`.
pub fn chebyshev_interior(n: usize, length: f64) -> Vec<f64> {
    (1..=n)
        .map(|j| {
            let theta = (2 * j - 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
            0.5 * length * (1.0 - theta.cos())
        })
        .collect()
}

/// `n` equally spaced points strictly inside `(0, length)`.
pub fn uniform_interior(n: usize, length: f64) -> Vec<f64> {
    (1..=n).map(|j| j as f64 * length / (n + 1) as f64).collect()
}

/// Trapezoid rule on an arbitrary increasing grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Trapezoid weights for an increasing grid.
pub fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// `sqrt(∫ f²)` by the trapezoid rule.
pub fn l2_norm_trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let sq: Vec<f64> = y.iter().map(|v| v * v).collect();
    trapezoid(x, &sq).sqrt()
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(mut a: f64, mut b: f64, f: F) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("nonempty")
}

/// Sharpens an interior maximizer `x0` of a smooth `f` on `[a, b]` by secant
/// steps on a fourth-order central difference of `f'`. Golden section alone
/// stops at `√ε` relative accuracy because the peak is flat.
pub fn polish_max<F: Fn(f64) -> f64>(x0: f64, a: f64, b: f64, f: F) -> f64 {
    let h = 1e-3 * x0.abs().min(b - a);
    if !(h > 0.0) || x0 - 2.0 * h < a || x0 + 2.0 * h > b {
        return x0;
    }
    let slope = |x: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    let (mut x_prev, mut s_prev) = (x0 - 0.1 * h, slope(x0 - 0.1 * h));
    let (mut x, mut s) = (x0, slope(x0));
    for _ in 0..8 {
        if s == s_prev || !s.is_finite() {
            break;
        }
        let next = x - s * (x - x_prev) / (s - s_prev);
        if !(next - 2.0 * h >= a && next + 2.0 * h <= b) || (next - x0).abs() > h {
            return x0;
        }
        (x_prev, s_prev) = (x, s);
        x = next;
        s = slope(x);
        if (x - x_prev).abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    let scale = f(x0).abs();
    if f(x) >= f(x0) - 4.0 * f64::EPSILON * scale {
        x
    } else {
        x0
    }
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
