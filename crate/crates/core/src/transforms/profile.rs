use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, binom, exp_poly_integral, C64, I};

/// Spatial domain of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    HalfLine,
    Interval { length: f64 },
}

impl Domain {
    pub fn upper(&self) -> f64 {
        match self {
            Domain::HalfLine => f64::INFINITY,
            Domain::Interval { length } => *length,
        }
    }
}

/// Closed-form registry entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ClosedForm {
    Zero,
    /// `amp · e^{-a x}`
    ExpDecay { a: f64, amp: f64 },
    /// `amp` on `[0, b]`, zero elsewhere.
    Indicator { b: f64, amp: f64 },
    /// `amp · exp(-((x - c)/s)²)`
    GaussianBump { c: f64, s: f64, amp: f64 },
    /// `amp · sin(nπx/L)`; interval only.
    SineMode { n: u32, amp: f64 },
    /// `(Σ coeffs[m] x^m) · e^{-a x}`
    PolyExp { coeffs: Vec<f64>, a: f64 },
}

impl ClosedForm {
    /// Builds an entry from a registry id and named parameters.
    pub fn from_registry(id: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |k: &str, default: Option<f64>| -> Result<f64> {
            params
                .get(k)
                .copied()
                .or(default)
                .ok_or_else(|| Error::Parameter(format!("`{id}` requires parameter `{k}`")))
        };
        let allowed: &[&str] = match id {
            "zero" => &[],
            "exp_decay" => &["a", "amp"],
            "indicator" => &["b", "amp"],
            "gaussian_bump" => &["c", "s", "amp"],
            "sine_mode" => &["n", "amp"],
            "poly_exp" => &["a"],
            other => return Err(Error::UnknownEntry(other.to_string())),
        };
        for key in params.keys() {
            let coeff_key = id == "poly_exp" && key.starts_with('c') && key[1..].parse::<usize>().is_ok();
            if !allowed.contains(&key.as_str()) && !coeff_key {
                return Err(Error::Parameter(format!("`{id}` has no parameter `{key}`")));
            }
        }
        Ok(match id {
            "zero" => ClosedForm::Zero,
            "exp_decay" => ClosedForm::ExpDecay { a: get("a", None)?, amp: get("amp", Some(1.0))? },
            "indicator" => ClosedForm::Indicator { b: get("b", None)?, amp: get("amp", Some(1.0))? },
            "gaussian_bump" => ClosedForm::GaussianBump {
                c: get("c", None)?,
                s: get("s", None)?,
                amp: get("amp", Some(1.0))?,
            },
            "sine_mode" => {
                let n = get("n", None)?;
                if n < 1.0 || n.fract() != 0.0 {
                    return Err(Error::Parameter(format!("sine_mode n must be a positive integer, got {n}")));
                }
                ClosedForm::SineMode { n: n as u32, amp: get("amp", Some(1.0))? }
            }
            _ => {
                let degree = params
                    .keys()
                    .filter_map(|k| k.strip_prefix('c').and_then(|d| d.parse::<usize>().ok()))
                    .max()
                    .ok_or_else(|| Error::Parameter("poly_exp requires coefficients c0, c1, ...".into()))?;
                let coeffs = (0..=degree)
                    .map(|m| params.get(&format!("c{m}")).copied().unwrap_or(0.0))
                    .collect();
                ClosedForm::PolyExp { coeffs, a: get("a", Some(0.0))? }
            }
        })
    }

    pub fn registry_id(&self) -> &'static str {
        match self {
            ClosedForm::Zero => "zero",
            ClosedForm::ExpDecay { .. } => "exp_decay",
            ClosedForm::Indicator { .. } => "indicator",
            ClosedForm::GaussianBump { .. } => "gaussian_bump",
            ClosedForm::SineMode { .. } => "sine_mode",
            ClosedForm::PolyExp { .. } => "poly_exp",
        }
    }

    pub fn registry_params(&self) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        match self {
            ClosedForm::Zero => {}
            ClosedForm::ExpDecay { a, amp } => {
                p.insert("a".into(), *a);
                p.insert("amp".into(), *amp);
            }
            ClosedForm::Indicator { b, amp } => {
                p.insert("b".into(), *b);
                p.insert("amp".into(), *amp);
            }
            ClosedForm::GaussianBump { c, s, amp } => {
                p.insert("c".into(), *c);
                p.insert("s".into(), *s);
                p.insert("amp".into(), *amp);
            }
            ClosedForm::SineMode { n, amp } => {
                p.insert("n".into(), *n as f64);
                p.insert("amp".into(), *amp);
            }
            ClosedForm::PolyExp { coeffs, a } => {
                for (m, c) in coeffs.iter().enumerate() {
                    p.insert(format!("c{m}"), *c);
                }
                p.insert("a".into(), *a);
            }
        }
        p
    }
}

/// Quadrature rule attached to sampled data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Quadrature {
    Trapezoid,
    /// The grid must consist of the Gauss–Legendre nodes of each panel, in order.
    GaussLegendre { panel_edges: Vec<f64>, order: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub quadrature: Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    ClosedForm(ClosedForm),
    Samples(Samples),
}

/// One term `coef · x^power · e^{rate x}` supported on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ExpPolyTerm {
    coef: C64,
    power: u32,
    rate: C64,
    lo: f64,
    hi: f64,
}

impl ExpPolyTerm {
    fn eval(&self, x: f64) -> C64 {
        if x < self.lo || x > self.hi {
            return C64::new(0.0, 0.0);
        }
        self.coef * x.powi(self.power as i32) * (self.rate * x).exp()
    }

    /// `∫ e^{-iλx} (term) dx`
    fn fourier(&self, lambda: C64) -> C64 {
        self.coef * exp_poly_integral(self.power, I * lambda - self.rate, self.lo, self.hi)
    }

    fn moment(&self, k: u32) -> C64 {
        self.coef * exp_poly_integral(self.power + k, -self.rate, self.lo, self.hi)
    }

    /// Terms of `x ↦ term(L - x)` on `[0, L]`.
    fn reflect(&self, length: f64) -> Vec<ExpPolyTerm> {
        let lead = self.coef * (self.rate * length).exp();
        (0..=self.power)
            .map(|j| ExpPolyTerm {
                coef: lead
                    * binom(self.power, j)
                    * length.powi((self.power - j) as i32)
                    * if j % 2 == 0 { 1.0 } else { -1.0 },
                power: j,
                rate: -self.rate,
                lo: length - self.hi,
                hi: length - self.lo,
            })
            .collect()
    }
}

/// A function of one spatial variable on the half line or on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    domain: Domain,
    repr: Representation,
    decay_hint: Option<f64>,
    tail_eps: f64,
    terms: Option<Vec<ExpPolyTerm>>,
    weights: Vec<f64>,
    l1: f64,
    l2: f64,
}

pub const DEFAULT_TAIL_EPS: f64 = 1e-14;

impl Profile {
    pub fn closed_form(domain: Domain, form: ClosedForm) -> Result<Self> {
        Self::new(domain, Representation::ClosedForm(form), None)
    }

    pub fn from_registry(domain: Domain, id: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        Self::closed_form(domain, ClosedForm::from_registry(id, params)?)
    }

    pub fn zero(domain: Domain) -> Self {
        Self::closed_form(domain, ClosedForm::Zero).expect("zero profile is always valid")
    }

    pub fn exp_decay(domain: Domain, a: f64) -> Result<Self> {
        Self::closed_form(domain, ClosedForm::ExpDecay { a, amp: 1.0 })
    }

    pub fn samples(domain: Domain, samples: Samples, decay_hint: Option<f64>) -> Result<Self> {
        Self::new(domain, Representation::Samples(samples), decay_hint)
    }

    /// Samples `f` at the Gauss–Legendre nodes of `panels` equal panels on `[0, end]`.
    pub fn sample_gauss_legendre<F: Fn(f64) -> f64>(
        domain: Domain,
        end: f64,
        panels: usize,
        order: usize,
        decay_hint: Option<f64>,
        f: F,
    ) -> Result<Self> {
        let rule = numeric::composite_rule(0.0, end, panels, order);
        let grid: Vec<f64> = rule.iter().map(|(x, _)| *x).collect();
        let values = grid.iter().map(|&x| f(x)).collect();
        let panel_edges = numeric::linspace(0.0, end, panels + 1);
        Self::samples(
            domain,
            Samples { grid, values, quadrature: Quadrature::GaussLegendre { panel_edges, order } },
            decay_hint,
        )
    }

    pub fn new(domain: Domain, repr: Representation, decay_hint: Option<f64>) -> Result<Self> {
        if let Domain::Interval { length } = domain {
            if !(length > 0.0 && length.is_finite()) {
                return Err(Error::Parameter(format!("interval length must be positive, got {length}")));
            }
        }
        if let Some(a) = decay_hint {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Parameter(format!("decay hint must be positive, got {a}")));
            }
        }
        let mut profile = Profile {
            domain,
            repr,
            decay_hint,
            tail_eps: DEFAULT_TAIL_EPS,
            terms: None,
            weights: Vec::new(),
            l1: 0.0,
            l2: 0.0,
        };
        match &profile.repr {
            Representation::ClosedForm(form) => {
                profile.terms = profile.expand_terms(form)?;
            }
            Representation::Samples(s) => {
                profile.weights = validate_samples(domain, s)?;
            }
        }
        let (l1, l2) = profile.compute_norms();
        if !(l1.is_finite() && l2.is_finite()) {
            return Err(Error::Parameter("profile norms are not finite".into()));
        }
        profile.l1 = l1;
        profile.l2 = l2;
        Ok(profile)
    }

    pub fn with_tail_eps(mut self, tail_eps: f64) -> Self {
        self.tail_eps = tail_eps;
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn decay_hint(&self) -> Option<f64> {
        self.decay_hint
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2
    }

    pub fn is_zero(&self) -> bool {
        self.l1 == 0.0
    }

    /// Interval length, or `None` on the half line.
    pub fn length(&self) -> Option<f64> {
        match self.domain {
            Domain::Interval { length } => Some(length),
            Domain::HalfLine => None,
        }
    }

    fn expand_terms(&self, form: &ClosedForm) -> Result<Option<Vec<ExpPolyTerm>>> {
        let upper = self.domain.upper();
        let half_line = matches!(self.domain, Domain::HalfLine);
        let real = |c: f64| C64::new(c, 0.0);
        let need_decay = |a: f64| -> Result<()> {
            if half_line && a <= 0.0 {
                Err(Error::Parameter(format!("half-line profile needs decay rate a > 0, got {a}")))
            } else {
                Ok(())
            }
        };
        Ok(match form {
            ClosedForm::Zero => Some(Vec::new()),
            ClosedForm::ExpDecay { a, amp } => {
                need_decay(*a)?;
                Some(vec![ExpPolyTerm { coef: real(*amp), power: 0, rate: real(-a), lo: 0.0, hi: upper }])
            }
            ClosedForm::Indicator { b, amp } => {
                if *b <= 0.0 {
                    return Err(Error::Parameter(format!("indicator end must be positive, got {b}")));
                }
                Some(vec![ExpPolyTerm { coef: real(*amp), power: 0, rate: real(0.0), lo: 0.0, hi: b.min(upper) }])
            }
            ClosedForm::GaussianBump { s, .. } => {
                if *s <= 0.0 {
                    return Err(Error::Parameter(format!("gaussian width must be positive, got {s}")));
                }
                None
            }
            ClosedForm::SineMode { n, amp } => {
                let length = self
                    .length()
                    .ok_or_else(|| Error::Parameter("sine_mode is defined on an interval only".into()))?;
                let omega = *n as f64 * std::f64::consts::PI / length;
                // sin(ωx) = (e^{iωx} - e^{-iωx}) / 2i
                Some(vec![
                    ExpPolyTerm { coef: C64::new(0.0, -0.5 * amp), power: 0, rate: C64::new(0.0, omega), lo: 0.0, hi: length },
                    ExpPolyTerm { coef: C64::new(0.0, 0.5 * amp), power: 0, rate: C64::new(0.0, -omega), lo: 0.0, hi: length },
                ])
            }
            ClosedForm::PolyExp { coeffs, a } => {
                need_decay(*a)?;
                Some(
                    coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| **c != 0.0)
                        .map(|(m, c)| ExpPolyTerm { coef: real(*c), power: m as u32, rate: real(-a), lo: 0.0, hi: upper })
                        .collect(),
                )
            }
        })
    }

    /// Finite window carrying all but a negligible part of the profile.
    fn effective_support(&self) -> (f64, f64) {
        match &self.repr {
            Representation::Samples(s) => (s.grid[0].max(0.0), *s.grid.last().expect("nonempty")),
            Representation::ClosedForm(ClosedForm::GaussianBump { c, s, .. }) => {
                ((c - 8.5 * s).max(0.0), (c + 8.5 * s).min(self.domain.upper()))
            }
            Representation::ClosedForm(_) => {
                let terms = self.terms.as_ref().expect("closed forms expand to terms");
                let hi = terms
                    .iter()
                    .map(|t| {
                        if t.hi.is_finite() {
                            t.hi
                        } else {
                            (50.0 + 6.0 * t.power as f64) / (-t.rate.re)
                        }
                    })
                    .fold(0.0, f64::max);
                (0.0, hi)
            }
        }
    }

    fn compute_norms(&self) -> (f64, f64) {
        if let Representation::Samples(s) = &self.repr {
            let l1 = s.values.iter().zip(&self.weights).map(|(v, w)| v.abs() * w).sum::<f64>();
            let l2 = s.values.iter().zip(&self.weights).map(|(v, w)| v * v * w).sum::<f64>();
            let (l1_tail, l2_tail) = match (self.domain, self.decay_hint) {
                (Domain::HalfLine, Some(a)) => {
                    let (_, end) = self.tail_start(s);
                    (end.abs() / a, end * end / (2.0 * a))
                }
                _ => (0.0, 0.0),
            };
            return (l1 + l1_tail, (l2 + l2_tail).sqrt());
        }
        let (lo, hi) = self.effective_support();
        if hi <= lo {
            return (0.0, 0.0);
        }
        // Integrate piecewise so indicator jumps fall on panel edges.
        let mut edges = vec![lo, hi];
        if let Some(terms) = &self.terms {
            for t in terms {
                if t.hi.is_finite() && t.hi > lo && t.hi < hi {
                    edges.push(t.hi);
                }
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for w in edges.windows(2) {
            let panels = (((w[1] - w[0]) * 4.0).ceil() as usize).clamp(8, 4000);
            l1 += numeric::integrate_real(w[0], w[1], panels, 16, |x| self.eval(x).abs());
            l2 += numeric::integrate_real(w[0], w[1], panels, 16, |x| self.eval(x).powi(2));
        }
        (l1, l2.sqrt())
    }

    /// Pointwise value; samples are linearly interpolated.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.domain.upper() {
            return 0.0;
        }
        match &self.repr {
            Representation::ClosedForm(ClosedForm::GaussianBump { c, s, amp }) => amp * (-((x - c) / s).powi(2)).exp(),
            Representation::ClosedForm(_) => self
                .terms
                .as_ref()
                .expect("closed forms expand to terms")
                .iter()
                .map(|t| t.eval(x))
                .sum::<C64>()
                .re,
            Representation::Samples(s) => {
                let g = &s.grid;
                let v = &s.values;
                let last = g.len() - 1;
                if x >= g[last] {
                    return match (self.domain, self.decay_hint) {
                        (Domain::HalfLine, Some(a)) => v[last] * (-a * (x - g[last])).exp(),
                        _ if x == g[last] => v[last],
                        _ => 0.0,
                    };
                }
                if x <= g[0] {
                    return v[0];
                }
                let j = g.partition_point(|&p| p <= x) - 1;
                let t = (x - g[j]) / (g[j + 1] - g[j]);
                v[j] * (1.0 - t) + v[j + 1] * t
            }
        }
    }

    /// `∫ e^{-iλx} f(x) dx` over the profile's domain, without validity checks.
    pub(crate) fn fourier_unchecked(&self, lambda: C64) -> Result<C64> {
        match &self.repr {
            Representation::ClosedForm(ClosedForm::GaussianBump { .. }) => Ok(self.quadrature_transform(lambda, |x| x)),
            Representation::ClosedForm(_) => Ok(self
                .terms
                .as_ref()
                .expect("closed forms expand to terms")
                .iter()
                .map(|t| t.fourier(lambda))
                .sum()),
            Representation::Samples(s) => {
                let body: C64 = s
                    .grid
                    .iter()
                    .zip(&s.values)
                    .zip(&self.weights)
                    .map(|((x, v), w)| (-I * lambda * *x).exp() * (v * w))
                    .sum();
                if let Domain::HalfLine = self.domain {
                    let (end, f_end) = self.tail_start(s);
                    match self.decay_hint {
                        Some(a) => return Ok(body + f_end * (-I * lambda * end).exp() / (a + I * lambda)),
                        None => {
                            let scale = s.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                            if f_end.abs() > self.tail_eps * scale.max(1.0) {
                                return Err(Error::TruncationUnreliable(format!(
                                    "samples end at x = {end} with |f| = {:e} and no decay hint",
                                    f_end.abs()
                                )));
                            }
                        }
                    }
                }
                Ok(body)
            }
        }
    }

    /// `∫_0^L e^{-iλ(L-x)} f(x) dx`: the transform of the reflected profile.
    /// Bounded for `Im λ ≤ 0`, where the plain transform of an interval
    /// profile at `-λ` would grow like `e^{|Im λ| L}`.
    pub fn interval_fourier_reflected(&self, lambda: C64) -> Result<C64> {
        let length = self
            .length()
            .ok_or_else(|| Error::Parameter("reflected transform needs an interval profile".into()))?;
        Ok(match &self.repr {
            Representation::ClosedForm(ClosedForm::GaussianBump { .. }) => {
                self.quadrature_transform(lambda, |x| length - x)
            }
            Representation::ClosedForm(_) => self
                .terms
                .as_ref()
                .expect("closed forms expand to terms")
                .iter()
                .flat_map(|t| t.reflect(length))
                .map(|t| t.fourier(lambda))
                .sum(),
            Representation::Samples(s) => s
                .grid
                .iter()
                .zip(&s.values)
                .zip(&self.weights)
                .map(|((x, v), w)| (-I * lambda * (length - x)).exp() * (v * w))
                .sum(),
        })
    }

    /// `∫ e^{-iλ·phase(x)} f(x) dx` by composite Gauss–Legendre on the effective support.
    fn quadrature_transform<P: Fn(f64) -> f64>(&self, lambda: C64, phase: P) -> C64 {
        let (lo, hi) = self.effective_support();
        if hi <= lo {
            return C64::new(0.0, 0.0);
        }
        let panels = 8 + ((lambda.norm() * (hi - lo)) / 3.0).ceil() as usize;
        numeric::integrate_complex(lo, hi, panels.min(20_000), 16, |x| (-I * lambda * phase(x)).exp() * self.eval(x))
    }

    /// Where the quadrature coverage ends and the extrapolated exponential
    /// tail (decay hint) takes over, with the tail's initial value.
    fn tail_start(&self, s: &Samples) -> (f64, f64) {
        let x_last = *s.grid.last().expect("nonempty");
        let f_last = *s.values.last().expect("nonempty");
        let end = match &s.quadrature {
            Quadrature::Trapezoid => x_last,
            Quadrature::GaussLegendre { panel_edges, .. } => *panel_edges.last().expect("validated"),
        };
        match self.decay_hint {
            Some(a) => (end, f_last * (-a * (end - x_last)).exp()),
            None => (end, f_last),
        }
    }

    /// `∫ x^k f(x) dx`.
    pub fn moment(&self, k: u32) -> f64 {
        match &self.repr {
            Representation::ClosedForm(ClosedForm::GaussianBump { .. }) => {
                let (lo, hi) = self.effective_support();
                numeric::integrate_real(lo, hi, 64, 16, |x| x.powi(k as i32) * self.eval(x))
            }
            Representation::ClosedForm(_) => self
                .terms
                .as_ref()
                .expect("closed forms expand to terms")
                .iter()
                .map(|t| t.moment(k))
                .sum::<C64>()
                .re,
            Representation::Samples(s) => {
                let body: f64 = s
                    .grid
                    .iter()
                    .zip(&s.values)
                    .zip(&self.weights)
                    .map(|((x, v), w)| x.powi(k as i32) * v * w)
                    .sum();
                match (self.domain, self.decay_hint) {
                    (Domain::HalfLine, Some(a)) => {
                        let (end, f_end) = self.tail_start(s);
                        let tail = exp_poly_integral(k, C64::new(a, 0.0), end, f64::INFINITY) * (a * end).exp();
                        body + f_end * tail.re
                    }
                    _ => body,
                }
            }
        }
    }
}

fn validate_samples(domain: Domain, s: &Samples) -> Result<Vec<f64>> {
    if s.grid.len() < 2 || s.grid.len() != s.values.len() {
        return Err(Error::Parameter(format!(
            "samples need at least two points and matching lengths (grid {}, values {})",
            s.grid.len(),
            s.values.len()
        )));
    }
    if s.grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("sample grid must be strictly increasing".into()));
    }
    if s.grid[0] < 0.0 || s.grid[s.grid.len() - 1] > domain.upper() {
        return Err(Error::Parameter("sample grid leaves the profile's domain".into()));
    }
    if s.values.iter().chain(&s.grid).any(|v| !v.is_finite()) {
        return Err(Error::Parameter("sample values must be finite".into()));
    }
    match &s.quadrature {
        Quadrature::Trapezoid => Ok(numeric::trapezoid_weights(&s.grid)),
        Quadrature::GaussLegendre { panel_edges, order } => {
            if panel_edges.len() < 2 || panel_edges.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Parameter("panel edges must be strictly increasing".into()));
            }
            let mut nodes = Vec::new();
            for w in panel_edges.windows(2) {
                nodes.extend(numeric::composite_rule(w[0], w[1], 1, *order));
            }
            if nodes.len() != s.grid.len()
                || nodes.iter().zip(&s.grid).any(|((x, _), g)| (x - g).abs() > 1e-12 * (1.0 + g.abs()))
            {
                return Err(Error::Parameter("grid does not match the Gauss-Legendre panel nodes".into()));
            }
            Ok(nodes.into_iter().map(|(_, w)| w).collect())
        }
    }
}
