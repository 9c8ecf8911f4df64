use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, exp_integral, ScaledPair, C64};

/// Closed-form boundary signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum SignalForm {
    Zero,
    Const { value: f64 },
    /// `amp · e^{rate t}`
    Exp { amp: f64, rate: f64 },
    /// `amp · sin(omega t)`
    Sine { amp: f64, omega: f64 },
}

impl SignalForm {
    pub fn from_registry(id: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match id {
            "zero" => &[],
            "const" => &["value"],
            "exp" => &["amp", "rate"],
            "sine" => &["amp", "omega"],
            other => return Err(Error::UnknownEntry(other.to_string())),
        };
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Parameter(format!("`{id}` has no parameter `{bad}`")));
        }
        let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
        Ok(match id {
            "zero" => SignalForm::Zero,
            "const" => SignalForm::Const { value: get("value", 1.0) },
            "exp" => SignalForm::Exp { amp: get("amp", 1.0), rate: get("rate", 1.0) },
            _ => SignalForm::Sine { amp: get("amp", 1.0), omega: get("omega", std::f64::consts::PI) },
        })
    }

    pub fn registry_id(&self) -> &'static str {
        match self {
            SignalForm::Zero => "zero",
            SignalForm::Const { .. } => "const",
            SignalForm::Exp { .. } => "exp",
            SignalForm::Sine { .. } => "sine",
        }
    }

    pub fn registry_params(&self) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        match self {
            SignalForm::Zero => {}
            SignalForm::Const { value } => {
                p.insert("value".into(), *value);
            }
            SignalForm::Exp { amp, rate } => {
                p.insert("amp".into(), *amp);
                p.insert("rate".into(), *rate);
            }
            SignalForm::Sine { amp, omega } => {
                p.insert("amp".into(), *amp);
                p.insert("omega".into(), *omega);
            }
        }
        p
    }
}

/// Finite-dimensional bases on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "size", rename_all = "snake_case")]
pub enum Basis {
    /// Indicators of `K` equal subintervals.
    PiecewiseConstant(usize),
    /// `P_k(2t/T - 1)`, `k = 0..K`.
    Legendre(usize),
    /// `sin(kπt/T)`, `k = 1..=K`.
    Sine(usize),
}

impl Basis {
    pub fn size(&self) -> usize {
        match self {
            Basis::PiecewiseConstant(k) | Basis::Legendre(k) | Basis::Sine(k) => *k,
        }
    }

    pub fn with_size(&self, size: usize) -> Basis {
        match self {
            Basis::PiecewiseConstant(_) => Basis::PiecewiseConstant(size),
            Basis::Legendre(_) => Basis::Legendre(size),
            Basis::Sine(_) => Basis::Sine(size),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Basis::PiecewiseConstant(_) => "piecewise_constant",
            Basis::Legendre(_) => "legendre",
            Basis::Sine(_) => "sine",
        }
    }

    pub fn from_name(name: &str, size: usize) -> Result<Basis> {
        if size == 0 {
            return Err(Error::Parameter("basis size must be at least 1".into()));
        }
        match name {
            "piecewise_constant" => Ok(Basis::PiecewiseConstant(size)),
            "legendre" => Ok(Basis::Legendre(size)),
            "sine" => Ok(Basis::Sine(size)),
            other => Err(Error::UnknownEntry(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalRepr {
    ClosedForm(SignalForm),
    Basis { basis: Basis, coefficients: Vec<f64> },
}

/// A boundary function of time on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSignal {
    horizon: f64,
    repr: SignalRepr,
}

/// Above this `|k| t` the Legendre moment switches from quadrature to the
/// exact integration-by-parts sum.
const LEGENDRE_IBP_THRESHOLD: f64 = 100.0;

/// Default `Re(k) t` beyond which the plain t-transform value is refused.
pub const OVERFLOW_GUARD: f64 = 600.0;

impl TimeSignal {
    pub fn closed_form(horizon: f64, form: SignalForm) -> Result<Self> {
        Self::new(horizon, SignalRepr::ClosedForm(form))
    }

    pub fn from_registry(horizon: f64, id: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        Self::closed_form(horizon, SignalForm::from_registry(id, params)?)
    }

    pub fn zero(horizon: f64) -> Self {
        Self::closed_form(horizon, SignalForm::Zero).expect("positive horizon")
    }

    pub fn constant(horizon: f64, value: f64) -> Result<Self> {
        Self::closed_form(horizon, SignalForm::Const { value })
    }

    pub fn exp(horizon: f64, amp: f64, rate: f64) -> Result<Self> {
        Self::closed_form(horizon, SignalForm::Exp { amp, rate })
    }

    pub fn from_basis(horizon: f64, basis: Basis, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != basis.size() {
            return Err(Error::Parameter(format!(
                "basis of size {} given {} coefficients",
                basis.size(),
                coefficients.len()
            )));
        }
        Self::new(horizon, SignalRepr::Basis { basis, coefficients })
    }

    /// The `index`-th element of `basis` as a signal.
    pub fn basis_function(horizon: f64, basis: Basis, index: usize) -> Result<Self> {
        let mut c = vec![0.0; basis.size()];
        *c.get_mut(index).ok_or_else(|| Error::Parameter(format!("basis index {index} out of range")))? = 1.0;
        Self::from_basis(horizon, basis, c)
    }

    pub fn new(horizon: f64, repr: SignalRepr) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Parameter(format!("horizon must be positive, got {horizon}")));
        }
        if let SignalRepr::Basis { coefficients, basis } = &repr {
            if basis.size() == 0 || coefficients.iter().any(|c| !c.is_finite()) {
                return Err(Error::Parameter("basis coefficients must be finite and nonempty".into()));
            }
        }
        Ok(Self { horizon, repr })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn representation(&self) -> &SignalRepr {
        &self.repr
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            SignalRepr::ClosedForm(SignalForm::Zero) => true,
            SignalRepr::ClosedForm(SignalForm::Const { value }) => *value == 0.0,
            SignalRepr::ClosedForm(SignalForm::Exp { amp, .. }) | SignalRepr::ClosedForm(SignalForm::Sine { amp, .. }) => {
                *amp == 0.0
            }
            SignalRepr::Basis { coefficients, .. } => coefficients.iter().all(|c| *c == 0.0),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let horizon = self.horizon;
        match &self.repr {
            SignalRepr::ClosedForm(SignalForm::Zero) => 0.0,
            SignalRepr::ClosedForm(SignalForm::Const { value }) => *value,
            SignalRepr::ClosedForm(SignalForm::Exp { amp, rate }) => amp * (rate * t).exp(),
            SignalRepr::ClosedForm(SignalForm::Sine { amp, omega }) => amp * (omega * t).sin(),
            SignalRepr::Basis { basis: Basis::PiecewiseConstant(k), coefficients } => {
                let j = ((t / horizon * *k as f64).floor() as isize).clamp(0, *k as isize - 1) as usize;
                coefficients[j]
            }
            SignalRepr::Basis { basis: Basis::Legendre(_), coefficients } => legendre_eval(coefficients, 2.0 * t / horizon - 1.0),
            SignalRepr::Basis { basis: Basis::Sine(_), coefficients } => coefficients
                .iter()
                .enumerate()
                .map(|(j, c)| c * ((j + 1) as f64 * std::f64::consts::PI * t / horizon).sin())
                .sum(),
        }
    }

    /// `‖f‖_{L²(0,T)}`.
    pub fn l2_norm(&self) -> f64 {
        let panels = match &self.repr {
            SignalRepr::Basis { basis, .. } => 4 * basis.size().max(1),
            _ => 16,
        };
        // Piecewise-constant jumps sit on panel edges when panels is a multiple of K.
        numeric::integrate_real(0.0, self.horizon, panels, 16, |t| self.eval(t).powi(2)).sqrt()
    }

    /// `∫_0^t e^{kτ} f(τ) dτ` as `mantissa · exp(exponent)`.
    ///
    /// The exponent is `k t` when `Re k ≥ 0` and `0` otherwise, so the
    /// mantissa never carries the growing exponential.
    pub fn exp_moment(&self, k: C64, t: f64) -> Result<ScaledPair> {
        if t > self.horizon * (1.0 + 1e-12) {
            return Err(Error::Horizon { t, horizon: self.horizon });
        }
        if t < 0.0 {
            return Err(Error::Parameter(format!("time must be nonnegative, got {t}")));
        }
        let anchor = if k.re >= 0.0 { t } else { 0.0 };
        Ok(ScaledPair::new(self.anchored_moment(k, t, anchor), k * anchor))
    }

    /// Plain `∫_0^t e^{kτ} f(τ) dτ`; refuses when `Re(k) t` exceeds the overflow guard.
    pub fn t_transform(&self, k: C64, t: f64) -> Result<C64> {
        self.t_transform_guarded(k, t, OVERFLOW_GUARD)
    }

    pub fn t_transform_guarded(&self, k: C64, t: f64, guard: f64) -> Result<C64> {
        let pair = self.exp_moment(k, t)?;
        if k.re * t > guard {
            return Err(Error::Overflow { log_magnitude: pair.ln_abs() });
        }
        pair.value().ok_or(Error::Overflow { log_magnitude: pair.ln_abs() })
    }

    /// `∫_0^t e^{-k(t-τ)} f(τ) dτ`, i.e. the t-transform times `e^{-k t}`.
    pub fn damped(&self, k: C64, t: f64) -> Result<C64> {
        Ok(self.exp_moment(k, t)?.relative_to(k * t))
    }

    /// `∫_0^t e^{k(τ - anchor)} f(τ) dτ`.
    fn anchored_moment(&self, k: C64, t: f64, anchor: f64) -> C64 {
        let zero = C64::new(0.0, 0.0);
        if t == 0.0 {
            return zero;
        }
        let horizon = self.horizon;
        let exp_term = |amp: C64, rate: C64| -> C64 {
            if amp == zero {
                return zero;
            }
            amp * (rate * anchor).exp() * exp_integral(k + rate, 0.0, t, anchor)
        };
        match &self.repr {
            SignalRepr::ClosedForm(SignalForm::Zero) => zero,
            SignalRepr::ClosedForm(SignalForm::Const { value }) => *value * exp_integral(k, 0.0, t, anchor),
            SignalRepr::ClosedForm(SignalForm::Exp { amp, rate }) => exp_term(C64::new(*amp, 0.0), C64::new(*rate, 0.0)),
            SignalRepr::ClosedForm(SignalForm::Sine { amp, omega }) => {
                sine_moment(*amp, *omega, &exp_term)
            }
            SignalRepr::Basis { basis: Basis::PiecewiseConstant(kk), coefficients } => {
                let h = horizon / *kk as f64;
                coefficients
                    .iter()
                    .enumerate()
                    .filter(|(j, c)| **c != 0.0 && (*j as f64) * h < t)
                    .map(|(j, c)| *c * exp_integral(k, j as f64 * h, ((j + 1) as f64 * h).min(t), anchor))
                    .sum()
            }
            SignalRepr::Basis { basis: Basis::Sine(_), coefficients } => coefficients
                .iter()
                .enumerate()
                .map(|(j, c)| sine_moment(*c, (j + 1) as f64 * std::f64::consts::PI / horizon, &exp_term))
                .sum(),
            SignalRepr::Basis { basis: Basis::Legendre(_), coefficients } => {
                legendre_moment(coefficients, horizon, k, t, anchor)
            }
        }
    }
}

fn sine_moment<F: Fn(C64, C64) -> C64>(amp: f64, omega: f64, exp_term: &F) -> C64 {
    // amp sin(ωτ) = amp (e^{iωτ} - e^{-iωτ}) / 2i
    exp_term(C64::new(0.0, -0.5 * amp), C64::new(0.0, omega)) + exp_term(C64::new(0.0, 0.5 * amp), C64::new(0.0, -omega))
}

/// Legendre series `Σ c_n P_n(y)`.
pub(crate) fn legendre_eval(c: &[f64], y: f64) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let (mut p_prev, mut p) = (1.0, y);
    let mut sum = c[0];
    if c.len() > 1 {
        sum += c[1] * y;
    }
    for (n, cn) in c.iter().enumerate().skip(2) {
        let nf = (n - 1) as f64;
        let p_next = ((2.0 * nf + 1.0) * y * p - nf * p_prev) / (nf + 1.0);
        p_prev = p;
        p = p_next;
        sum += cn * p;
    }
    sum
}

/// Coefficients of the derivative of a Legendre series (in `y`).
pub(crate) fn legendre_derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return Vec::new();
    }
    let deg = n - 1;
    let mut work = c.to_vec();
    let mut der = vec![0.0; deg];
    for j in (3..=deg).rev() {
        der[j - 1] = (2 * j - 1) as f64 * work[j];
        work[j - 2] += work[j];
    }
    if deg >= 2 {
        der[1] = 3.0 * work[2];
    }
    der[0] = work[1];
    der
}

fn legendre_moment(c: &[f64], horizon: f64, k: C64, t: f64, anchor: f64) -> C64 {
    let y = |tau: f64| 2.0 * tau / horizon - 1.0;
    let degree = c.len().saturating_sub(1);
    if k.norm() * t <= LEGENDRE_IBP_THRESHOLD {
        let panels = 1 + (k.norm() * t / 6.0).ceil() as usize + degree / 8;
        return numeric::integrate_complex(0.0, t, panels, 16, |tau| (k * (tau - anchor)).exp() * legendre_eval(c, y(tau)));
    }
    // ∫ e^{kτ} p = [e^{kτ} Σ_m (-1)^m p^{(m)}(τ) / k^{m+1}]
    let mut deriv = c.to_vec();
    let mut scale = 1.0;
    let mut at_t = C64::new(0.0, 0.0);
    let mut at_0 = C64::new(0.0, 0.0);
    let mut kpow = k;
    let mut sign = 1.0;
    while !deriv.is_empty() {
        at_t += sign * scale * legendre_eval(&deriv, y(t)) / kpow;
        at_0 += sign * scale * legendre_eval(&deriv, y(0.0)) / kpow;
        deriv = legendre_derivative(&deriv);
        scale *= 2.0 / horizon;
        kpow *= k;
        sign = -sign;
    }
    (k * (t - anchor)).exp() * at_t - (k * (0.0 - anchor)).exp() * at_0
}
