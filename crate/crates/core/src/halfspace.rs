//! The half space `ℝ × ℝ₊` (N = 2), reduced slice by slice in the tangential
//! frequency `λ′` to the half-line machinery.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfline::{certificate_from_asymmetry, growth_from_moments, CertificateReport, GrowthReport, Verdict};
use crate::numeric::{trapezoid_weights, ScaledPair, C64, I};
use crate::transforms::{half_line_fourier, Domain, Profile, Quadrature, Samples, TimeSignal};

/// Tangential factors `a(x′)` with closed-form transforms `â(λ′) = ∫_ℝ e^{-iλ′x′} a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Tangential {
    /// `amp · e^{-x²/s²}`
    Gaussian { amp: f64, s: f64 },
    /// `amp · e^{-r|x|}`
    TwoSidedExp { amp: f64, r: f64 },
}

impl Tangential {
    pub fn gaussian() -> Self {
        Tangential::Gaussian { amp: 1.0, s: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Tangential::Gaussian { amp, s } => amp.is_finite() && s > 0.0 && s.is_finite(),
            Tangential::TwoSidedExp { amp, r } => amp.is_finite() && r > 0.0 && r.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid tangential factor {self:?}")))
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Tangential::Gaussian { amp, s } => amp * (-(x / s).powi(2)).exp(),
            Tangential::TwoSidedExp { amp, r } => amp * (-r * x.abs()).exp(),
        }
    }

    pub fn transform(&self, lp: f64) -> f64 {
        match *self {
            Tangential::Gaussian { amp, s } => amp * s * PI.sqrt() * (-(s * lp).powi(2) / 4.0).exp(),
            Tangential::TwoSidedExp { amp, r } => amp * 2.0 * r / (r * r + lp * lp),
        }
    }

    /// `∫_ℝ a`
    pub fn integral(&self) -> f64 {
        self.transform(0.0)
    }
}

/// `[e^{τ∂²} a](x′) · b(x_N)`: a separable state whose tangential factor has
/// evolved freely for time `τ`.
#[derive(Debug, Clone)]
pub struct SeparableField {
    pub tangential: Tangential,
    pub heat_time: f64,
    pub normal: Profile,
}

impl SeparableField {
    pub fn new(tangential: Tangential, normal: Profile) -> Result<Self> {
        tangential.validate()?;
        if !matches!(normal.domain(), Domain::HalfLine) {
            return Err(Error::Parameter("normal factor must be a half-line profile".into()));
        }
        Ok(Self { tangential, heat_time: 0.0, normal })
    }

    pub fn evolved(mut self, tau: f64) -> Self {
        self.heat_time = tau;
        self
    }

    pub fn tangential_transform(&self, lp: f64) -> f64 {
        self.tangential.transform(lp) * (-lp * lp * self.heat_time).exp()
    }

    pub fn transform(&self, lp: f64, ln: C64) -> Result<C64> {
        Ok(self.tangential_transform(lp) * half_line_fourier(&self.normal, ln)?)
    }
}

/// Samples `values[i][j] = u₀(x′_j, x_N_i)` on a rectangular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampled2D {
    pub tangential_grid: Vec<f64>,
    pub normal_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// Exponential decay rate of the data beyond the normal grid.
    pub normal_decay_hint: Option<f64>,
}

impl Sampled2D {
    pub fn from_fn(tangential_grid: Vec<f64>, normal_grid: Vec<f64>, normal_decay_hint: Option<f64>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = normal_grid.iter().map(|&xn| tangential_grid.iter().map(|&xt| f(xt, xn)).collect()).collect();
        Self { tangential_grid, normal_grid, values, normal_decay_hint }
    }

    fn validate(&self) -> Result<()> {
        let (nt, nn) = (self.tangential_grid.len(), self.normal_grid.len());
        if nt < 2 || nn < 2 || self.values.len() != nn || self.values.iter().any(|r| r.len() != nt) {
            return Err(Error::Parameter("sampled data does not match its grids".into()));
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("sampled data must be finite".into()));
        }
        Ok(())
    }

    /// Tangential transform of every normal row by the trapezoid rule over the
    /// (truncated) tangential grid, split into real and imaginary normal profiles.
    fn tangential_slice(&self, lp: f64) -> Result<(Profile, Profile)> {
        let w = trapezoid_weights(&self.tangential_grid);
        let (mut re, mut im) = (Vec::new(), Vec::new());
        for row in &self.values {
            let v: C64 = row
                .iter()
                .zip(&self.tangential_grid)
                .zip(&w)
                .map(|((f, &x), wj)| wj * f * (-I * lp * x).exp())
                .sum();
            re.push(v.re);
            im.push(v.im);
        }
        let mk = |vals: Vec<f64>| {
            Profile::samples(
                Domain::HalfLine,
                Samples { grid: self.normal_grid.clone(), values: vals, quadrature: Quadrature::Trapezoid },
                self.normal_decay_hint,
            )
        };
        Ok((mk(re)?, mk(im)?))
    }
}

#[derive(Debug, Clone)]
pub enum HalfSpaceInitial {
    Separable(SeparableField),
    Sampled(Sampled2D),
}

/// Boundary datum `g(x′, t) = a_t(x′) G(t)`, with `a_t = a` or, when
/// `evolving`, `a_t = e^{t∂²} a`.
#[derive(Debug, Clone)]
pub struct SeparableBoundary {
    pub tangential: Tangential,
    pub evolving: bool,
    pub temporal: TimeSignal,
}

impl SeparableBoundary {
    /// `∫_0^t e^{|λ|²s} ĝ(λ′, s) ds` with `|λ|² = λ′² + λ_N²`.
    pub fn t_transform(&self, lp: f64, ln: C64, t: f64) -> Result<ScaledPair> {
        let k = if self.evolving { ln * ln } else { ln * ln + lp * lp };
        Ok(self.temporal.exp_moment(k, t)?.scale(C64::new(self.tangential.transform(lp), 0.0)))
    }
}

#[derive(Debug, Clone)]
pub struct HalfSpaceProblem2D {
    pub u0: HalfSpaceInitial,
    /// Dirichlet datum `u(x′, 0, t)`.
    pub g: SeparableBoundary,
    pub horizon: f64,
    pub lambda_prime_grid: Vec<f64>,
}

impl HalfSpaceProblem2D {
    pub fn new(u0: HalfSpaceInitial, g: SeparableBoundary, lambda_prime_grid: Vec<f64>) -> Result<Self> {
        check_symmetric(&lambda_prime_grid)?;
        if let HalfSpaceInitial::Sampled(s) = &u0 {
            s.validate()?;
        }
        g.tangential.validate()?;
        Ok(Self { horizon: g.temporal.horizon(), u0, g, lambda_prime_grid })
    }

    /// `û₀(λ′, λ_N)` and whether it came from sampled-data quadrature.
    pub fn initial_transform(&self, lp: f64, ln: C64) -> Result<(C64, bool)> {
        match &self.u0 {
            HalfSpaceInitial::Separable(f) => Ok((f.transform(lp, ln)?, false)),
            HalfSpaceInitial::Sampled(s) => {
                let (re, im) = s.tangential_slice(lp)?;
                Ok((half_line_fourier(&re, ln)? + I * half_line_fourier(&im, ln)?, true))
            }
        }
    }

    /// Manufactured solution `u = [e^{t∂²}e^{-x′²}] · e^{b²t - b x_N}`.
    pub fn manufactured(b: f64, horizon: f64, lambda_prime_grid: Vec<f64>) -> Result<(Self, SeparableBoundary)> {
        let u0 = SeparableField::new(Tangential::gaussian(), Profile::exp_decay(Domain::HalfLine, b)?)?;
        let g = SeparableBoundary { tangential: Tangential::gaussian(), evolving: true, temporal: TimeSignal::exp(horizon, 1.0, b * b)? };
        let h = SeparableBoundary { tangential: Tangential::gaussian(), evolving: true, temporal: TimeSignal::exp(horizon, -b, b * b)? };
        Ok((Self::new(HalfSpaceInitial::Separable(u0), g, lambda_prime_grid)?, h))
    }

    /// Snapshot at time `t` of [`Self::manufactured`].
    pub fn manufactured_snapshot(b: f64, t: f64) -> Result<SeparableField> {
        let normal = Profile::closed_form(Domain::HalfLine, crate::transforms::ClosedForm::ExpDecay { a: b, amp: (b * b * t).exp() })?;
        Ok(SeparableField::new(Tangential::gaussian(), normal)?.evolved(t))
    }
}

fn check_symmetric(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("λ′ grid must be nonempty and finite".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let symmetric = (0..n).all(|i| (sorted[i] + sorted[n - 1 - i]).abs() <= 1e-12 * sorted[n - 1].abs().max(1.0));
    if !symmetric {
        return Err(Error::Parameter("λ′ grid must be symmetric about 0".into()));
    }
    Ok(())
}

/// Residual value and whether sampled-data quadrature reduced its accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpaceResidual {
    pub residual: ScaledPair,
    pub reduced_accuracy: bool,
}

/// `e^{|λ|²t} û(λ,t) - [û₀(λ) - h̃(λ,t) - iλ_N g̃(λ,t)]` for the Neumann trace `h = u_{x_N}(x′,0,·)`.
pub fn halfspace_global_relation_residual(
    p: &HalfSpaceProblem2D,
    h: &SeparableBoundary,
    snapshot: &SeparableField,
    lp: f64,
    ln: C64,
    t: f64,
) -> Result<HalfSpaceResidual> {
    if ln.im > 0.0 {
        return Err(Error::DomainViolation { lambda: ln, region: "Im λ_N ≤ 0" });
    }
    let k = ln * ln + lp * lp;
    let lhs = ScaledPair::new(snapshot.transform(lp, ln)?, k * t);
    let (u0_hat, reduced) = p.initial_transform(lp, ln)?;
    let h_tilde = h.t_transform(lp, ln, t)?;
    let g_tilde = p.g.t_transform(lp, ln, t)?.scale(I * ln);
    Ok(HalfSpaceResidual {
        residual: ScaledPair::sum(&[lhs, ScaledPair::plain(-u0_hat), h_tilde, g_tilde]),
        reduced_accuracy: reduced,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub lambda_prime: f64,
    pub certificate: CertificateReport,
    pub reduced_accuracy: bool,
    /// Growth of `∫_0^T e^{λ_N² t} F(λ′, t) dt`, `F = e^{λ′²t} ĝ(λ′, t)`, when a datum is given.
    pub growth: Option<GrowthReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceCertificate {
    pub slices: Vec<SliceReport>,
    pub verdict: Verdict,
    /// The tangential grid the verdict rests on; no inversion of the
    /// tangential transform beyond it is claimed.
    pub lambda_prime_grid: Vec<f64>,
}

/// Per-`λ′` obstruction certificates, obstructed if any slice is.
pub fn halfspace_obstruction_certificate(
    u0: &HalfSpaceInitial,
    lambda_prime_grid: &[f64],
    lambda_n_scan: &[f64],
    datum: Option<(&SeparableBoundary, &[f64])>,
) -> Result<HalfSpaceCertificate> {
    halfspace_certificate_with_tol(u0, lambda_prime_grid, lambda_n_scan, datum, crate::config::Defaults::default().certificate_tol)
}

pub fn halfspace_certificate_with_tol(
    u0: &HalfSpaceInitial,
    lambda_prime_grid: &[f64],
    lambda_n_scan: &[f64],
    datum: Option<(&SeparableBoundary, &[f64])>,
    tol: f64,
) -> Result<HalfSpaceCertificate> {
    if lambda_prime_grid.is_empty() || lambda_n_scan.is_empty() {
        return Err(Error::Parameter("λ′ grid and λ_N scan must be nonempty".into()));
    }
    if lambda_n_scan.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::Parameter("λ_N scan must be positive".into()));
    }
    if let HalfSpaceInitial::Sampled(s) = u0 {
        s.validate()?;
    }
    let slices = lambda_prime_grid
        .par_iter()
        .map(|&lp| slice_report(u0, lp, lambda_n_scan, datum, tol))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if slices.iter().any(|s| s.certificate.verdict == Verdict::Obstructed) {
        Verdict::Obstructed
    } else {
        Verdict::Inconclusive
    };
    Ok(HalfSpaceCertificate { slices, verdict, lambda_prime_grid: lambda_prime_grid.to_vec() })
}

fn slice_report(
    u0: &HalfSpaceInitial,
    lp: f64,
    scan: &[f64],
    datum: Option<(&SeparableBoundary, &[f64])>,
    tol: f64,
) -> Result<SliceReport> {
    let (certificate, reduced) = match u0 {
        HalfSpaceInitial::Separable(f) => {
            let a = f.tangential_transform(lp);
            half_line_fourier(&f.normal, C64::new(scan[0], 0.0))?;
            let asym = |l: f64| {
                let lam = C64::new(l, 0.0);
                match (half_line_fourier(&f.normal, lam), half_line_fourier(&f.normal, -lam)) {
                    (Ok(x), Ok(y)) => (a * (x - y)).norm(),
                    _ => f64::NAN,
                }
            };
            (certificate_from_asymmetry(scan, tol, &asym), false)
        }
        HalfSpaceInitial::Sampled(s) => {
            let (re, im) = s.tangential_slice(lp)?;
            let hat = |lam: C64| -> Result<C64> { Ok(half_line_fourier(&re, lam)? + I * half_line_fourier(&im, lam)?) };
            hat(C64::new(scan[0], 0.0))?;
            let asym = |l: f64| {
                let lam = C64::new(l, 0.0);
                match (hat(lam), hat(-lam)) {
                    (Ok(x), Ok(y)) => (x - y).norm(),
                    _ => f64::NAN,
                }
            };
            (certificate_from_asymmetry(scan, tol, &asym), true)
        }
    };
    let growth = match datum {
        Some((g, k_grid)) => {
            let horizon = g.temporal.horizon();
            Some(growth_from_moments(k_grid, Some(certificate.m), &|k| {
                g.t_transform(lp, C64::new(k.sqrt(), 0.0), horizon)
            })?)
        }
        None => None,
    };
    Ok(SliceReport { lambda_prime: lp, certificate, reduced_accuracy: reduced, growth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfline::obstruction_certificate;
    use crate::numeric::{integrate_real, logspace};

    #[test]
    fn tangential_transforms_match_quadrature() {
        for a in [Tangential::gaussian(), Tangential::Gaussian { amp: 2.0, s: 0.7 }, Tangential::TwoSidedExp { amp: 1.0, r: 1.0 }] {
            for lp in [0.0, 0.8, 2.5] {
                let quad = integrate_real(-40.0, 40.0, 800, 16, |x| a.eval(x) * (lp * x).cos());
                assert!((a.transform(lp) - quad).abs() < 1e-12, "{a:?} {lp}");
            }
        }
    }

    #[test]
    fn manufactured_residual_vanishes() {
        let grid = vec![-1.0, 0.0, 1.0];
        let (p, h) = HalfSpaceProblem2D::manufactured(1.0, 1.0, grid).unwrap();
        let snap = HalfSpaceProblem2D::manufactured_snapshot(1.0, 0.6).unwrap();
        for (lp, ln) in [(0.0, C64::new(1.0, 0.0)), (0.7, C64::new(2.0, -1.0)), (-1.5, C64::new(-0.5, -0.3))] {
            let r = halfspace_global_relation_residual(&p, &h, &snap, lp, ln, 0.6).unwrap();
            assert!(r.residual.mantissa.norm() < 1e-9, "{r:?}");
            assert!(!r.reduced_accuracy);
        }
    }

    #[test]
    fn perturbed_trace_shows_up_linearly() {
        let (p, h) = HalfSpaceProblem2D::manufactured(1.0, 1.0, vec![0.0]).unwrap();
        let snap = HalfSpaceProblem2D::manufactured_snapshot(1.0, 0.6).unwrap();
        let bump = SeparableBoundary { tangential: Tangential::gaussian(), evolving: true, temporal: TimeSignal::exp(1.0, 0.05, 1.0).unwrap() };
        let h2 = SeparableBoundary { temporal: TimeSignal::exp(1.0, -1.0 + 0.05, 1.0).unwrap(), ..h };
        let (lp, ln) = (0.4, C64::new(1.2, -0.2));
        let r = halfspace_global_relation_residual(&p, &h2, &snap, lp, ln, 0.6).unwrap().residual.value().unwrap();
        let expected = bump.t_transform(lp, ln, 0.6).unwrap().value().unwrap();
        assert!((r - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn zero_data() {
        let z = SeparableField::new(Tangential::gaussian(), Profile::zero(Domain::HalfLine)).unwrap();
        let g = SeparableBoundary { tangential: Tangential::gaussian(), evolving: false, temporal: TimeSignal::zero(1.0) };
        let p = HalfSpaceProblem2D::new(HalfSpaceInitial::Separable(z.clone()), g.clone(), vec![0.0]).unwrap();
        let r = halfspace_global_relation_residual(&p, &g, &z, 0.3, C64::new(1.0, -1.0), 0.5).unwrap();
        assert_eq!(r.residual.mantissa, C64::new(0.0, 0.0));
        let cert = halfspace_obstruction_certificate(&p.u0, &[-1.0, 0.0, 1.0], &[0.5, 1.0, 2.0], None).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn separable_certificate_factorizes() {
        let b = Profile::exp_decay(Domain::HalfLine, 1.0).unwrap();
        let a = Tangential::gaussian();
        let u0 = HalfSpaceInitial::Separable(SeparableField::new(a.clone(), b.clone()).unwrap());
        let scan = logspace(1e-2, 1e2, 400);
        let one_d = obstruction_certificate(&b, &scan).unwrap();
        let lps = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let cert = halfspace_obstruction_certificate(&u0, &lps, &scan, None).unwrap();
        assert_eq!(cert.verdict, Verdict::Obstructed);
        for s in &cert.slices {
            let ah = a.transform(s.lambda_prime);
            assert!((s.certificate.gap - ah * one_d.gap).abs() < 1e-10);
            assert!((s.certificate.m - ah * one_d.m).abs() < 1e-10);
            assert!((s.certificate.lambda_star - one_d.lambda_star).abs() < 1e-6);
        }
    }

    #[test]
    fn sampled_data_is_flagged_and_close() {
        let xt: Vec<f64> = (-400..=400).map(|j| j as f64 * 0.02).collect();
        let xn: Vec<f64> = (0..=1500).map(|j| j as f64 * 0.02).collect();
        let s = Sampled2D::from_fn(xt, xn, Some(1.0), |x, y| (-x * x).exp() * (-y).exp());
        let cert = halfspace_obstruction_certificate(&HalfSpaceInitial::Sampled(s), &[0.0, 1.0], &[1.0], None).unwrap();
        for sl in &cert.slices {
            assert!(sl.reduced_accuracy);
            let exact = Tangential::gaussian().transform(sl.lambda_prime);
            assert!((sl.certificate.gap - exact).abs() < 1e-3, "{}", sl.certificate.gap);
        }
    }

    #[test]
    fn growth_diagnostic_for_a_nonzero_datum() {
        let b = Profile::exp_decay(Domain::HalfLine, 1.0).unwrap();
        let u0 = HalfSpaceInitial::Separable(SeparableField::new(Tangential::gaussian(), b).unwrap());
        let g = SeparableBoundary { tangential: Tangential::gaussian(), evolving: false, temporal: TimeSignal::constant(1.0, 1.0).unwrap() };
        let k_grid: Vec<f64> = (2..=40).map(|k| k as f64).collect();
        let cert = halfspace_obstruction_certificate(&u0, &[0.0], &[0.5, 1.0, 2.0], Some((&g, &k_grid))).unwrap();
        let growth = cert.slices[0].growth.as_ref().unwrap();
        assert_eq!(growth.flag, crate::halfline::GrowthFlag::UnboundedGrowth);
    }

    #[test]
    fn grid_must_be_symmetric() {
        let (p, _) = HalfSpaceProblem2D::manufactured(1.0, 1.0, vec![-1.0, 0.0, 1.0]).unwrap();
        assert!(HalfSpaceProblem2D::new(p.u0.clone(), p.g.clone(), vec![0.0, 1.0]).is_err());
    }
}
