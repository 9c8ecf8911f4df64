//! Heat equation on `[0, L]` with `u(0,t) = 0` and the control `u(L,t) = h(t)`.
//!
//! The terminal profile is `u(x,T) = U₀(x;T) - ∫_{∂D+} R dλ - ∫_{∂D-} R dλ`,
//! where `U₀` depends only on `u₀` and `R` only on `h`. Null control means
//! the right-hand side vanishes identically.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{interval_indent, ContourConfig, Defaults};
use crate::contours::{build_with, Contour, ContourKind, ContourParams};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::numeric::{binom, expm1, C64, I};
use crate::transforms::{interval_fourier, Domain, Profile, TimeSignal};

/// Below this `|λ| L` the removable singularity at the origin is handled by series.
pub const SERIES_THRESHOLD: f64 = 1e-3;
/// Distance to a nonzero pole `nπ/L` below which `R` is not evaluated.
pub const POLE_GUARD: f64 = 1e-8;
/// Minimum distance from contour nodes to the poles, checked at build time.
pub const NODE_POLE_CLEARANCE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct IntervalProblem {
    pub length: f64,
    pub u0: Profile,
    /// Right Dirichlet datum `u(L, t)`.
    pub h: TimeSignal,
    pub horizon: f64,
}

impl IntervalProblem {
    pub fn new(u0: Profile, h: TimeSignal) -> Result<Self> {
        let length = match u0.domain() {
            Domain::Interval { length } => length,
            Domain::HalfLine => return Err(Error::Parameter("interval problem needs an interval profile".into())),
        };
        Ok(Self { length, u0, horizon: h.horizon(), h })
    }

    /// Whether `u₀(0) = 0` and `u₀(L) = h(0)`. Not required, only recorded.
    pub fn compatible(&self) -> bool {
        let tol = 1e-12 * self.u0.l2_norm().max(1.0);
        self.u0.eval(0.0).abs() <= tol && (self.u0.eval(self.length) - self.h.eval(0.0)).abs() <= tol
    }
}

/// `û₀(λ) + iλe^{-iλL}h̃ - g̃₁ + e^{-iλL}h̃₁ - e^{λ²T}û_T(λ)`, zero for exact
/// solutions with `g₁ = u_x(0,·)` and `h₁ = u_x(L,·)`.
pub fn interval_global_relation_residual(
    p: &IntervalProblem,
    g1: &TimeSignal,
    h1: &TimeSignal,
    u_t: &Profile,
    t: f64,
    lambda: C64,
) -> Result<C64> {
    let k = lambda * lambda;
    let e = (-I * lambda * p.length).exp();
    let u0_hat = interval_fourier(&p.u0, lambda)?;
    let h_tilde = p.h.t_transform(k, t)?;
    let g1_tilde = g1.t_transform(k, t)?;
    let h1_tilde = h1.t_transform(k, t)?;
    let terminal = (k * t).exp() * interval_fourier(u_t, lambda)?;
    Ok(u0_hat + I * lambda * e * h_tilde - g1_tilde + e * h1_tilde - terminal)
}

/// `1 - (λL)²/6 + (λL)⁴/120`: `sin(λL)/(λL)` near the origin.
fn sinc_series(z: C64) -> C64 {
    let z2 = z * z;
    1.0 - z2 / 6.0 + z2 * z2 / 120.0
}

fn check_poles(lambda: C64, length: f64) -> Result<()> {
    let n = (lambda.re * length / PI).round();
    if n != 0.0 {
        let pole = n * PI / length;
        let distance = (lambda - pole).norm();
        if distance < POLE_GUARD {
            return Err(Error::PoleProximity { lambda, pole, distance });
        }
    }
    Ok(())
}

/// `R(λ; x, T, L) = (i/π) λ e^{iλx - λ²T} h̃(λ², T) / (e^{iλL} - e^{-iλL})`.
#[allow(non_snake_case)]
pub fn evaluate_R(lambda: C64, x: f64, t: f64, length: f64, h: &TimeSignal) -> Result<C64> {
    check_poles(lambda, length)?;
    if h.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let k = lambda * lambda;
    // e^{-λ²T} h̃(λ², T)
    let damped = h.damped(k, t)?;
    let z = lambda * length;
    if z.norm() < SERIES_THRESHOLD {
        return Ok((I * lambda * x).exp() * damped / (2.0 * PI * length * sinc_series(z)));
    }
    Ok(r_stable(lambda, x, length, damped))
}

/// `R` with the denominator factored so that no exponential grows:
/// `e^{iλL}(1 - e^{-2iλL})` below the axis, `e^{-iλL}(e^{2iλL} - 1)` above.
fn r_stable(lambda: C64, x: f64, length: f64, damped: C64) -> C64 {
    let pre = I / PI * lambda * damped;
    if lambda.im >= 0.0 {
        pre * (I * lambda * (x + length)).exp() / expm1(2.0 * I * lambda * length)
    } else {
        pre * (I * lambda * (x - length)).exp() / (-expm1(-2.0 * I * lambda * length))
    }
}

/// Bracket `[e^{iλL} V(-λ) - û₀(-λ)] / (e^{2iλL} - 1)` of the `∂D+` integrand of `U₀`,
/// where `V(λ) = ∫ e^{-iλ(L-y)} u₀(y) dy`.
pub fn u0_bracket_plus(u0: &Profile, lambda: C64) -> Result<C64> {
    let length = profile_length(u0)?;
    check_poles(lambda, length)?;
    let z = lambda * length;
    if z.norm() < SERIES_THRESHOLD {
        // Σ (iλ)^j/j! ∫ ((2L - y)^j - y^j) u₀  over  Σ (2iλL)^j/j!
        let moments = moments(u0, SERIES_TERMS);
        let (mut num, mut den) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let mut pw = C64::new(1.0, 0.0);
        let mut fact = 1.0;
        // The common factor iλ is divided out of both sums.
        for j in 1..=SERIES_TERMS {
            fact *= j as f64;
            num += pw / fact * (binomial_moment(&moments, j, 2.0 * length, -1.0) - moments[j as usize]);
            den += pw / fact * (2.0 * length).powi(j as i32);
            pw *= I * lambda;
        }
        return Ok(num / den);
    }
    let e = (I * lambda * length).exp();
    let v = u0.interval_fourier_reflected(-lambda)?;
    let w = interval_fourier(u0, -lambda)?;
    Ok((e * v - w) / expm1(2.0 * I * lambda * length))
}

/// Bracket `[e^{-iλL} û₀(λ) - V(λ)] / (1 - e^{-2iλL})` of the `∂D-` integrand of `U₀`.
pub fn u0_bracket_minus(u0: &Profile, lambda: C64) -> Result<C64> {
    let length = profile_length(u0)?;
    check_poles(lambda, length)?;
    let z = lambda * length;
    if z.norm() < SERIES_THRESHOLD {
        // Σ (-iλ)^j/j! ∫ ((L + y)^j - (L - y)^j) u₀  over  -Σ (-2iλL)^j/j!
        let moments = moments(u0, SERIES_TERMS);
        let (mut num, mut den) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let mut pw = C64::new(1.0, 0.0);
        let mut fact = 1.0;
        for j in 1..=SERIES_TERMS {
            fact *= j as f64;
            num += pw / fact * (binomial_moment(&moments, j, length, 1.0) - binomial_moment(&moments, j, length, -1.0));
            den -= pw / fact * (2.0 * length).powi(j as i32);
            pw *= -I * lambda;
        }
        return Ok(num / den);
    }
    let f = (-I * lambda * length).exp();
    let v = u0.interval_fourier_reflected(lambda)?;
    let hat = interval_fourier(u0, lambda)?;
    Ok((f * hat - v) / (-expm1(-2.0 * I * lambda * length)))
}

const SERIES_TERMS: u32 = 8;

fn moments(u0: &Profile, n: u32) -> Vec<f64> {
    (0..=n).map(|k| u0.moment(k)).collect()
}

/// `∫ (a + sign·y)^j u₀(y) dy` from the plain moments.
fn binomial_moment(m: &[f64], j: u32, a: f64, sign: f64) -> f64 {
    (0..=j).map(|i| binom(j, i) * a.powi((j - i) as i32) * sign.powi(i as i32) * m[i as usize]).sum()
}

fn profile_length(u0: &Profile) -> Result<f64> {
    u0.length().ok_or_else(|| Error::Parameter("U₀ needs an interval profile".into()))
}

/// Integrands of `U₀ = ∫_R I_R - ∫_{∂D+} I_+ - ∫_{∂D-} I_-`:
/// `I_R = e^{iλx-λ²T}û₀(λ)/2π`, `I_+ = e^{iλx-λ²T}B₊/2π`, `I_- = e^{-iλ(L-x)-λ²T}B₋/2π`.
pub fn u0_integrand(kind: ContourKind, u0: &Profile, lambda: C64, x: f64, t: f64) -> Result<C64> {
    let length = profile_length(u0)?;
    let damp = (-lambda * lambda * t).exp() / (2.0 * PI);
    Ok(match kind {
        ContourKind::RealLine => damp * (I * lambda * x).exp() * interval_fourier(u0, lambda)?,
        ContourKind::DPlus => damp * (I * lambda * x).exp() * u0_bracket_plus(u0, lambda)?,
        ContourKind::DMinus => damp * (I * lambda * (x - length)).exp() * u0_bracket_minus(u0, lambda)?,
    })
}

/// Contour parameters recorded alongside a terminal profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourMeta {
    pub theta: f64,
    pub lambda_max: f64,
    pub real_lambda_max: f64,
    pub panels_per_leg: usize,
    pub subdivisions: usize,
    pub order: usize,
    pub indent: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalProfile {
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: ContourMeta,
}

impl TerminalProfile {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Contours for evaluating the interval representation on `x ∈ [x_min, x_max] ⊂ (0, L)`.
#[derive(Debug, Clone)]
pub struct IntervalSolver {
    length: f64,
    real: Contour,
    plus: Contour,
    minus: Contour,
    t_min: f64,
    x_min: f64,
    x_max: f64,
    imag_tol: f64,
}

impl IntervalSolver {
    pub fn new(cfg: &ContourConfig, length: f64, t_min: f64, x_min: f64, x_max: f64) -> Result<Self> {
        if !(length > 0.0 && t_min > 0.0 && x_min > 0.0 && x_max >= x_min && x_max < length) {
            return Err(Error::Parameter(format!(
                "window needs t_min > 0 and 0 < x_min <= x_max < L (got t_min={t_min}, x in [{x_min}, {x_max}], L={length})"
            )));
        }
        cfg.validate()?;
        let indent = cfg.indent.unwrap_or_else(|| interval_indent(length));
        if !(indent > 0.0 && indent < PI / length) {
            return Err(Error::Parameter(format!("indent radius must lie in (0, π/L), got {indent}")));
        }
        let lambda_max = cfg.resolve_lambda_max(t_min, x_min.min(length - x_max));
        let panels = cfg.resolve_panels(lambda_max, indent);
        let params = ContourParams::new(cfg.theta, lambda_max, panels, indent).subdivisions(cfg.subdivisions).order(cfg.order);
        let plus = build_with(ContourKind::DPlus, params)?;
        let minus = build_with(ContourKind::DMinus, params)?;
        for c in [&plus, &minus] {
            let d = c.min_distance_to_poles(length);
            if d < NODE_POLE_CLEARANCE {
                let z = c
                    .nodes
                    .iter()
                    .copied()
                    .min_by(|a, b| {
                        let da = (a - C64::new((a.re * length / PI).round() * PI / length, 0.0)).norm();
                        let db = (b - C64::new((b.re * length / PI).round() * PI / length, 0.0)).norm();
                        da.total_cmp(&db)
                    })
                    .unwrap_or_default();
                let pole = (z.re * length / PI).round() * PI / length;
                return Err(Error::PoleProximity { lambda: z, pole, distance: d });
            }
        }
        let real_max = cfg.resolve_real_lambda_max(t_min);
        let real_panels = ((real_max * length) / 3.0).ceil() as usize + 4;
        let real = build_with(ContourKind::RealLine, ContourParams::new(0.0, real_max, real_panels, 0.0).order(cfg.order))?;
        Ok(Self { length, real, plus, minus, t_min, x_min, x_max, imag_tol: Defaults::default().imag_error_tol })
    }

    /// Solver for the default window: all 201 uniform interior points.
    pub fn for_problem(cfg: &ContourConfig, p: &IntervalProblem) -> Result<Self> {
        let n = Defaults::default().terminal_grid_points;
        let dx = p.length / (n + 1) as f64;
        Self::new(cfg, p.length, p.horizon, dx, p.length - dx)
    }

    pub fn meta(&self) -> ContourMeta {
        let pp = self.plus.params;
        ContourMeta {
            theta: pp.theta,
            lambda_max: pp.lambda_max,
            real_lambda_max: self.real.params.lambda_max,
            panels_per_leg: pp.panels_per_leg,
            subdivisions: pp.subdivisions,
            order: pp.order,
            indent: pp.indent,
            nodes: self.real.len() + self.plus.len() + self.minus.len(),
        }
    }

    pub fn imag_tol(&self) -> f64 {
        self.imag_tol
    }

    fn check_time(&self, t: f64, horizon: f64) -> Result<()> {
        if t > horizon * (1.0 + 1e-12) {
            return Err(Error::Horizon { t, horizon });
        }
        if t < self.t_min * (1.0 - 1e-12) {
            return Err(Error::Refused(format!("t = {t} is below the truncation design time t_min = {}", self.t_min)));
        }
        Ok(())
    }

    /// Node coefficients of `U₀(·; t)`.
    pub fn u0_field(&self, u0: &Profile, t: f64) -> Result<Field> {
        self.check_time(t, f64::INFINITY)?;
        if u0.length() != Some(self.length) {
            return Err(Error::Parameter("profile length differs from the solver's".into()));
        }
        let scale = 1.0 / (2.0 * PI);
        let weighted = |c: &Contour, sign: f64, f: &(dyn Fn(C64) -> Result<C64> + Sync)| -> Result<Vec<(C64, C64)>> {
            c.nodes
                .par_iter()
                .zip(&c.weights)
                .map(|(&l, &w)| Ok((l, sign * scale * w * (-l * l * t).exp() * f(l)?)))
                .collect()
        };
        let real = weighted(&self.real, 1.0, &|l| interval_fourier(u0, l))?;
        let plus = weighted(&self.plus, -1.0, &|l| u0_bracket_plus(u0, l))?;
        let minus = weighted(&self.minus, -1.0, &|l| u0_bracket_minus(u0, l))?;
        Ok(Field::new([real, plus].concat(), self.x_min, self.x_max).with_shifted(minus, self.length))
    }

    /// Node coefficients of `-∫_{∂D+} R - ∫_{∂D-} R` at time `t`.
    pub fn control_field(&self, h: &TimeSignal, t: f64) -> Result<Field> {
        self.check_time(t, h.horizon())?;
        let length = self.length;
        let plus = self
            .plus
            .nodes
            .par_iter()
            .zip(&self.plus.weights)
            .map(|(&l, &w)| {
                let damped = h.damped(l * l, t)?;
                let c = I / PI * l * damped * (I * l * length).exp() / expm1(2.0 * I * l * length);
                Ok((l, -w * c))
            })
            .collect::<Result<Vec<_>>>()?;
        let minus = self
            .minus
            .nodes
            .par_iter()
            .zip(&self.minus.weights)
            .map(|(&l, &w)| {
                let damped = h.damped(l * l, t)?;
                let c = I / PI * l * damped / (-expm1(-2.0 * I * l * length));
                Ok((l, -w * c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Field::new(plus, self.x_min, self.x_max).with_shifted(minus, length))
    }

    pub fn field(&self, p: &IntervalProblem, t: f64) -> Result<Field> {
        self.check_time(t, p.horizon)?;
        let mut f = self.u0_field(&p.u0, t)?;
        if !p.h.is_zero() {
            f.add_scaled(&self.control_field(&p.h, t)?, 1.0);
        }
        Ok(f)
    }

    pub fn terminal_profile(&self, p: &IntervalProblem, x_grid: &[f64]) -> Result<TerminalProfile> {
        let field = self.field(p, p.horizon)?;
        let values = field.eval_many(x_grid, self.imag_tol)?.into_iter().map(|v| v.value).collect();
        Ok(TerminalProfile { x_grid: x_grid.to_vec(), values, meta: self.meta() })
    }
}

/// `U₀(x; T)` with default contour parameters.
#[allow(non_snake_case)]
pub fn evaluate_U0(x: f64, t: f64, length: f64, u0: &Profile) -> Result<f64> {
    let solver = IntervalSolver::new(&ContourConfig::default(), length, t, x, x)?;
    solver.u0_field(u0, t)?.eval(x, solver.imag_tol).map(|v| v.value)
}

/// `u(·, T)` on an interior grid with default contour parameters.
pub fn terminal_profile(p: &IntervalProblem, x_grid: &[f64]) -> Result<TerminalProfile> {
    terminal_profile_with(p, x_grid, &ContourConfig::default())
}

pub fn terminal_profile_with(p: &IntervalProblem, x_grid: &[f64], cfg: &ContourConfig) -> Result<TerminalProfile> {
    if x_grid.is_empty() {
        return Err(Error::Parameter("empty evaluation grid".into()));
    }
    if x_grid.iter().any(|&x| !(x > 0.0 && x < p.length)) {
        return Err(Error::Parameter("evaluation points must lie strictly inside (0, L)".into()));
    }
    let lo = x_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    IntervalSolver::new(cfg, p.length, p.horizon, lo, hi)?.terminal_profile(p, x_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{ClosedForm, SignalForm};

    fn sine(length: f64) -> Profile {
        Profile::closed_form(Domain::Interval { length }, ClosedForm::SineMode { n: 1, amp: 1.0 }).unwrap()
    }

    #[test]
    fn manufactured_global_relation() {
        let l = 1.0;
        let decay = -PI * PI / (l * l);
        let p = IntervalProblem::new(sine(l), TimeSignal::zero(1.0)).unwrap();
        let g1 = TimeSignal::exp(1.0, PI / l, decay).unwrap();
        let h1 = TimeSignal::exp(1.0, -PI / l, decay).unwrap();
        let u_t = Profile::closed_form(Domain::Interval { length: l }, ClosedForm::SineMode { n: 1, amp: decay.exp() }).unwrap();
        let lambda = C64::new(1.0, 1.0);
        let res = interval_global_relation_residual(&p, &g1, &h1, &u_t, 1.0, lambda).unwrap();
        assert!(res.norm() < 1e-10, "{res}");

        let h1_big = TimeSignal::exp(1.0, -1.01 * PI / l, decay).unwrap();
        let res = interval_global_relation_residual(&p, &g1, &h1_big, &u_t, 1.0, lambda).unwrap();
        let expected = 0.01 * (-I * lambda * l).exp() * h1.t_transform(lambda * lambda, 1.0).unwrap();
        assert!((res - expected).norm() < 1e-12, "{res} vs {expected}");
    }

    #[test]
    fn zero_relation_is_exact() {
        let z = Profile::zero(Domain::Interval { length: 1.0 });
        let p = IntervalProblem::new(z.clone(), TimeSignal::zero(1.0)).unwrap();
        let zs = TimeSignal::zero(1.0);
        assert_eq!(interval_global_relation_residual(&p, &zs, &zs, &z, 1.0, C64::new(2.0, 3.0)).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn r_limit_at_origin() {
        let one = TimeSignal::constant(1.0, 1.0).unwrap();
        let r0 = evaluate_R(C64::new(0.0, 0.0), 0.5, 1.0, 1.0, &one).unwrap();
        assert!((r0 - 1.0 / (2.0 * PI)).norm() < 1e-15);
        // Direct formula at 1e-4 agrees with the series value there.
        let lambda = C64::new(1e-4, 0.0);
        let direct = I / PI * lambda * (I * lambda * 0.5 - lambda * lambda).exp()
            / ((I * lambda).exp() - (-I * lambda).exp())
            * one.t_transform(lambda * lambda, 1.0).unwrap();
        let series = evaluate_R(lambda, 0.5, 1.0, 1.0, &one).unwrap();
        assert!((direct - series).norm() < 1e-9);
    }

    #[test]
    fn r_zero_control_and_poles() {
        let z = TimeSignal::zero(1.0);
        assert_eq!(evaluate_R(C64::new(0.7, 0.2), 0.5, 1.0, 1.0, &z).unwrap(), C64::new(0.0, 0.0));
        let one = TimeSignal::constant(1.0, 1.0).unwrap();
        assert!(matches!(evaluate_R(C64::new(PI + 1e-9, 0.0), 0.5, 1.0, 1.0, &one), Err(Error::PoleProximity { .. })));
        assert!(evaluate_R(C64::new(PI + 1e-6, 0.0), 0.5, 1.0, 1.0, &one).is_ok());
    }

    #[test]
    fn r_matches_direct_formula_off_axis() {
        let one = TimeSignal::constant(1.0, 1.0).unwrap();
        for lambda in [C64::from_polar(1.0, PI / 8.0), C64::from_polar(3.0, -PI / 8.0), C64::new(-2.0, 0.5)] {
            let k = lambda * lambda;
            let direct = I / PI * lambda * (I * lambda * 0.5 - k).exp() / ((I * lambda).exp() - (-I * lambda).exp())
                * ((k.exp() - 1.0) / k);
            let v = evaluate_R(lambda, 0.5, 1.0, 1.0, &one).unwrap();
            assert!((v - direct).norm() < 1e-13 * direct.norm().max(1.0), "{lambda}");
        }
    }

    #[test]
    fn brackets_match_direct_quotients() {
        let u0 = Profile::closed_form(Domain::Interval { length: 1.0 }, ClosedForm::PolyExp { coeffs: vec![0.0, 1.0, -1.0], a: 0.0 }).unwrap();
        for lambda in [C64::from_polar(0.5, 2.0), C64::from_polar(2.0, -0.4), C64::new(1e-3, 1e-3)] {
            let plus = ((I * lambda).exp() * u0.interval_fourier_reflected(-lambda).unwrap() - interval_fourier(&u0, -lambda).unwrap())
                / ((2.0 * I * lambda).exp() - 1.0);
            let minus = ((-I * lambda).exp() * interval_fourier(&u0, lambda).unwrap() - u0.interval_fourier_reflected(lambda).unwrap())
                / (1.0 - (-2.0 * I * lambda).exp());
            assert!((u0_bracket_plus(&u0, lambda).unwrap() - plus).norm() < 1e-10);
            assert!((u0_bracket_minus(&u0, lambda).unwrap() - minus).norm() < 1e-10);
        }
    }

    #[test]
    fn removable_origin() {
        let one = TimeSignal::constant(1.0, 1.0).unwrap();
        let u0 = Profile::closed_form(Domain::Interval { length: 1.0 }, ClosedForm::PolyExp { coeffs: vec![0.0, 1.0, -1.0], a: 0.0 }).unwrap();
        let z = C64::new(0.0, 0.0);
        let d = C64::from_polar(1e-4, PI / 8.0);
        let r0 = evaluate_R(z, 0.5, 1.0, 1.0, &one).unwrap();
        let r_avg = 0.5 * (evaluate_R(d, 0.5, 1.0, 1.0, &one).unwrap() + evaluate_R(-d, 0.5, 1.0, 1.0, &one).unwrap());
        assert!((r_avg - r0).norm() < 1e-6);
        for kind in [ContourKind::RealLine, ContourKind::DPlus, ContourKind::DMinus] {
            let v0 = u0_integrand(kind, &u0, z, 0.5, 1.0).unwrap();
            let avg = 0.5 * (u0_integrand(kind, &u0, d, 0.5, 1.0).unwrap() + u0_integrand(kind, &u0, -d, 0.5, 1.0).unwrap());
            assert!((avg - v0).norm() < 1e-6, "{kind:?}");
        }
    }

    #[test]
    fn u0_of_sine_mode_is_its_heat_evolution() {
        let u0 = sine(1.0);
        for x in [0.25, 0.5, 0.75] {
            let v = evaluate_U0(x, 0.5, 1.0, &u0).unwrap();
            let exact = (-PI * PI * 0.5).exp() * (PI * x).sin();
            assert!((v - exact).abs() < 1e-9, "x={x}: {v} vs {exact}");
        }
        assert_eq!(evaluate_U0(0.5, 0.5, 1.0, &Profile::zero(Domain::Interval { length: 1.0 })).unwrap(), 0.0);
    }

    #[test]
    fn constant_control_against_series() {
        // u₀ = 0, h = 1: u = x - Σ 2(-1)^{n+1}/(nπ) e^{-n²π²t} sin(nπx).
        let u0 = Profile::zero(Domain::Interval { length: 1.0 });
        let p = IntervalProblem::new(u0, TimeSignal::constant(0.5, 1.0).unwrap()).unwrap();
        let xs = [0.1, 0.3, 0.5, 0.9];
        let prof = terminal_profile(&p, &xs).unwrap();
        for (x, v) in xs.iter().zip(&prof.values) {
            let series: f64 = (1..200)
                .map(|n| {
                    let nf = n as f64;
                    2.0 * (-1f64).powi(n + 1) / (nf * PI) * (-nf * nf * PI * PI * 0.5).exp() * (nf * PI * x).sin()
                })
                .sum();
            let exact = x - series;
            assert!((v - exact).abs() < 1e-8, "x={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn linearity_in_data() {
        let u0 = Profile::closed_form(Domain::Interval { length: 1.0 }, ClosedForm::PolyExp { coeffs: vec![0.0, 1.0, -1.0], a: 0.0 }).unwrap();
        let h = TimeSignal::closed_form(0.5, SignalForm::Sine { amp: 1.0, omega: 3.0 }).unwrap();
        let xs: Vec<f64> = (1..10).map(|j| j as f64 / 10.0).collect();
        let both = terminal_profile(&IntervalProblem::new(u0.clone(), h.clone()).unwrap(), &xs).unwrap();
        let a = terminal_profile(&IntervalProblem::new(u0, TimeSignal::zero(0.5)).unwrap(), &xs).unwrap();
        let b = terminal_profile(&IntervalProblem::new(Profile::zero(Domain::Interval { length: 1.0 }), h).unwrap(), &xs).unwrap();
        for j in 0..xs.len() {
            assert!((both.values[j] - a.values[j] - b.values[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_must_be_interior() {
        let p = IntervalProblem::new(sine(1.0), TimeSignal::zero(0.5)).unwrap();
        assert!(terminal_profile(&p, &[0.0, 0.5]).is_err());
        assert!(terminal_profile(&p, &[0.5, 1.0]).is_err());
    }

    #[test]
    fn compatibility_flag() {
        assert!(IntervalProblem::new(sine(1.0), TimeSignal::zero(1.0)).unwrap().compatible());
        assert!(!IntervalProblem::new(sine(1.0), TimeSignal::constant(1.0, 1.0).unwrap()).unwrap().compatible());
    }
}
