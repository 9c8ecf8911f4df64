//! Boundary control: interval null-control synthesis and the half-line
//! experiment that shows why the same approach fails there.
//!
//! Both problems are linear in the boundary datum, so with the datum expanded
//! in a basis `Σ c_k φ_k` the terminal profile is `U₀ + A c`. Synthesis is
//! Tikhonov-regularized least squares on that affine map.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ContourConfig, Defaults};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::halfline::{obstruction_certificate, yosida_growth_test, GrowthFlag, HalfLineSolver, Verdict};
use crate::interval::{terminal_profile_with, IntervalProblem, IntervalSolver};
use crate::numeric::{chebyshev_interior, l2_norm_trapezoid, linspace, trapezoid_weights, uniform_interior, ScaledPair, C64, I};
use crate::transforms::{half_line_fourier, Basis, Domain, Profile, TimeSignal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum Regularization {
    /// `μ = value · ‖A‖₂²`
    Relative(f64),
    Absolute(f64),
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization::Relative(Defaults::default().tikhonov_relative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppliedRegularization {
    pub requested: Regularization,
    /// The weight actually used.
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub basis_size: usize,
    /// `‖A c + b‖² + μ‖c‖²` at the minimizer.
    pub objective: f64,
    pub terminal_rel_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSolution {
    pub basis: Basis,
    pub horizon: f64,
    pub coefficients: Vec<f64>,
    /// `‖u(·,T)‖₂ / ‖u₀‖₂` on the terminal grid; zero when `u₀ = 0`.
    pub terminal_rel_norm: f64,
    pub u0_norm: f64,
    pub residual_history: Vec<HistoryEntry>,
    pub regularization: AppliedRegularization,
    /// `σ_max / σ_min` of the system matrix.
    pub condition: f64,
    pub collocation_points: usize,
    pub terminal_grid_points: usize,
    /// Representation evaluations (one per basis function plus `U₀`).
    pub evaluations: usize,
}

impl ControlSolution {
    pub fn control(&self) -> Result<TimeSignal> {
        TimeSignal::from_basis(self.horizon, self.basis, self.coefficients.clone())
    }
}

struct TikhonovSolution {
    c: DVector<f64>,
    mu: f64,
    objective: f64,
    condition: f64,
}

/// `argmin ‖A c - rhs‖² + μ‖c‖²` through the SVD of `A`.
fn tikhonov(a: &DMatrix<f64>, rhs: &DVector<f64>, reg: Regularization) -> Result<TikhonovSolution> {
    if a.iter().any(|v| !v.is_finite()) || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Accuracy("non-finite entries in the control system; refine the contour parameters".into()));
    }
    let svd = a.clone().svd(true, true);
    let (u, v_t) = (svd.u.as_ref().expect("requested U"), svd.v_t.as_ref().expect("requested Vᵀ"));
    let s = &svd.singular_values;
    let s_max = s.iter().copied().fold(0.0, f64::max);
    let s_min = s.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    let mu = match reg {
        Regularization::Relative(r) => r * s_max * s_max,
        Regularization::Absolute(m) => m,
    };
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::Parameter(format!("Tikhonov weight must be finite and nonnegative, got {mu}")));
    }
    if mu == 0.0 && s_min <= 1e-14 * s_max {
        return Err(Error::RankCollapse { condition });
    }
    let mut c = DVector::zeros(a.ncols());
    for i in 0..s.len() {
        let si = s[i];
        if si == 0.0 {
            continue;
        }
        let coef = si / (si * si + mu) * u.column(i).dot(rhs);
        c += v_t.row(i).transpose() * coef;
    }
    let r = a * &c - rhs;
    let objective = r.norm_squared() + mu * c.norm_squared();
    Ok(TikhonovSolution { c, mu, objective, condition })
}

/// `Re u(x_j)` for every field, as matrix columns.
fn field_matrix(fields: &[Field], xs: &[f64], imag_tol: f64) -> Result<DMatrix<f64>> {
    let cols: Vec<Vec<f64>> = fields
        .par_iter()
        .map(|f| Ok(f.eval_many(xs, imag_tol)?.into_iter().map(|v| v.value).collect()))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(xs.len(), fields.len(), |j, k| cols[k][j]))
}

fn field_values(f: &Field, xs: &[f64], imag_tol: f64) -> Result<DVector<f64>> {
    Ok(DVector::from_iterator(xs.len(), f.eval_many(xs, imag_tol)?.into_iter().map(|v| v.value)))
}

fn basis_fields<F>(horizon: f64, basis: Basis, build: F) -> Result<Vec<Field>>
where
    F: Fn(&TimeSignal) -> Result<Field> + Sync,
{
    (0..basis.size())
        .into_par_iter()
        .map(|k| build(&TimeSignal::basis_function(horizon, basis, k)?))
        .collect()
}

/// Precomputed interval system for nested basis sizes `1..=basis.size()`.
pub struct IntervalSynthesizer {
    u0: Profile,
    horizon: f64,
    length: f64,
    basis: Basis,
    cfg: ContourConfig,
    colloc: Vec<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    grid: Vec<f64>,
    grid_u0: DVector<f64>,
    grid_a: DMatrix<f64>,
    u0_norm: f64,
}

impl IntervalSynthesizer {
    pub fn new(u0: &Profile, horizon: f64, basis: Basis, x_colloc: &[f64], cfg: &ContourConfig) -> Result<Self> {
        let length = u0.length().ok_or_else(|| Error::Parameter("interval synthesis needs an interval profile".into()))?;
        if basis.size() == 0 {
            return Err(Error::Parameter("basis size must be at least 1".into()));
        }
        if x_colloc.len() < basis.size() {
            return Err(Error::Parameter(format!(
                "{} collocation points cannot determine {} coefficients",
                x_colloc.len(),
                basis.size()
            )));
        }
        if x_colloc.iter().any(|&x| !(x > 0.0 && x < length)) {
            return Err(Error::Parameter("collocation points must lie strictly inside (0, L)".into()));
        }
        let defaults = Defaults::default();
        let grid = uniform_interior(defaults.terminal_grid_points, length);
        let lo = x_colloc.iter().copied().fold(grid[0], f64::min);
        let hi = x_colloc.iter().copied().fold(grid[grid.len() - 1], f64::max);
        let solver = IntervalSolver::new(cfg, length, horizon, lo, hi)?;
        let tol = solver.imag_tol();
        let u0_field = solver.u0_field(u0, horizon)?;
        let fields = basis_fields(horizon, basis, |phi| solver.control_field(phi, horizon))?;
        let a = field_matrix(&fields, x_colloc, tol)?;
        let b = -field_values(&u0_field, x_colloc, tol)?;
        let grid_a = field_matrix(&fields, &grid, tol)?;
        let grid_u0 = field_values(&u0_field, &grid, tol)?;
        let u0_vals: Vec<f64> = grid.iter().map(|&x| u0.eval(x)).collect();
        let u0_norm = l2_norm_trapezoid(&grid, &u0_vals);
        Ok(Self {
            u0: u0.clone(),
            horizon,
            length,
            basis,
            cfg: cfg.clone(),
            colloc: x_colloc.to_vec(),
            a,
            b,
            grid,
            grid_u0,
            grid_a,
            u0_norm,
        })
    }

    fn prefix_solve(&self, k: usize, reg: Regularization) -> Result<(TikhonovSolution, f64)> {
        let a = self.a.columns(0, k).into_owned();
        let sol = tikhonov(&a, &self.b, reg)?;
        let terminal = &self.grid_u0 + self.grid_a.columns(0, k) * &sol.c;
        let rel = l2_norm_trapezoid(&self.grid, terminal.as_slice()) / self.u0_norm;
        Ok((sol, rel))
    }

    /// Minimizer over the first `k` basis functions, with history over `1..=k`.
    pub fn solve(&self, k: usize, reg: Regularization) -> Result<ControlSolution> {
        if k == 0 || k > self.basis.size() {
            return Err(Error::Parameter(format!("basis size {k} outside 1..={}", self.basis.size())));
        }
        let basis = self.basis.with_size(k);
        if self.u0.is_zero() || self.u0_norm == 0.0 {
            return Ok(ControlSolution {
                basis,
                horizon: self.horizon,
                coefficients: vec![0.0; k],
                terminal_rel_norm: 0.0,
                u0_norm: 0.0,
                residual_history: Vec::new(),
                regularization: AppliedRegularization { requested: reg, mu: 0.0 },
                condition: f64::NAN,
                collocation_points: self.colloc.len(),
                terminal_grid_points: self.grid.len(),
                evaluations: 0,
            });
        }
        let mut history = Vec::with_capacity(k);
        for j in 1..k {
            let (sol, rel) = self.prefix_solve(j, reg)?;
            history.push(HistoryEntry { basis_size: j, objective: sol.objective, terminal_rel_norm: rel });
        }
        let (sol, rel) = self.prefix_solve(k, reg)?;
        history.push(HistoryEntry { basis_size: k, objective: sol.objective, terminal_rel_norm: rel });
        let coefficients: Vec<f64> = sol.c.iter().copied().collect();

        // The reported norm comes from a fresh evaluation of the synthesized control.
        let h = TimeSignal::from_basis(self.horizon, basis, coefficients.clone())?;
        let p = IntervalProblem::new(self.u0.clone(), h)?;
        let prof = terminal_profile_with(&p, &self.grid, &self.cfg)?;
        let terminal_rel_norm = l2_norm_trapezoid(&self.grid, &prof.values) / self.u0_norm;
        Ok(ControlSolution {
            basis,
            horizon: self.horizon,
            coefficients,
            terminal_rel_norm,
            u0_norm: self.u0_norm,
            residual_history: history,
            regularization: AppliedRegularization { requested: reg, mu: sol.mu },
            condition: sol.condition,
            collocation_points: self.colloc.len(),
            terminal_grid_points: self.grid.len(),
            evaluations: self.basis.size() + 1,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn terminal_grid(&self) -> &[f64] {
        &self.grid
    }
}

/// Interval null control with a Legendre basis of size `k` and default collocation.
pub fn synthesize_interval_control(u0: &Profile, horizon: f64, k: usize, reg: Regularization) -> Result<ControlSolution> {
    let length = u0.length().ok_or_else(|| Error::Parameter("interval synthesis needs an interval profile".into()))?;
    let colloc = chebyshev_interior(Defaults::default().collocation_points, length);
    synthesize_interval_control_with(u0, horizon, Basis::Legendre(k), reg, &colloc, &ContourConfig::default())
}

pub fn synthesize_interval_control_with(
    u0: &Profile,
    horizon: f64,
    basis: Basis,
    reg: Regularization,
    x_colloc: &[f64],
    cfg: &ContourConfig,
) -> Result<ControlSolution> {
    IntervalSynthesizer::new(u0, horizon, basis, x_colloc, cfg)?.solve(basis.size(), reg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    HalfLine,
    Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyEntry {
    pub basis_size: usize,
    pub best_terminal_rel_norm: f64,
    pub coefficients: Vec<f64>,
    pub control_l2: f64,
    pub growth_flag: GrowthFlag,
    pub growth_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub problem_kind: ProblemKind,
    pub horizon: f64,
    pub basis: String,
    pub entries: Vec<DichotomyEntry>,
    /// Terminal norm with the boundary datum forced to zero.
    pub baseline_terminal_rel_norm: f64,
    /// Representation evaluations used for the whole scan.
    pub evaluations: usize,
    pub certificate_gap: Option<f64>,
    #[serde(rename = "certificate_M")]
    pub certificate_m: Option<f64>,
    pub verdict_text: String,
}

impl DichotomyReport {
    pub fn best(&self) -> f64 {
        self.entries.iter().map(|e| e.best_terminal_rel_norm).fold(f64::INFINITY, f64::min)
    }
}

/// `λ²` grid for the growth diagnostic of candidate controls.
pub fn growth_grid() -> Vec<f64> {
    linspace(1.0, 40.0, 40)
}

fn check_scan(k_scan: &[usize]) -> Result<usize> {
    if k_scan.is_empty() || k_scan[0] == 0 || k_scan.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("basis sizes must be positive and strictly increasing".into()));
    }
    Ok(*k_scan.last().expect("nonempty"))
}

/// Best terminal norms on the half line over Legendre bases of the given
/// sizes, each a weighted least-squares fit on `(0, X]` with the same
/// evaluation budget as interval synthesis.
pub fn attempt_halfline_control(u0: &Profile, horizon: f64, k_scan: &[usize]) -> Result<DichotomyReport> {
    attempt_halfline_control_with(u0, horizon, k_scan, Regularization::default(), &ContourConfig::default())
}

pub fn attempt_halfline_control_with(
    u0: &Profile,
    horizon: f64,
    k_scan: &[usize],
    reg: Regularization,
    cfg: &ContourConfig,
) -> Result<DichotomyReport> {
    let k_max = check_scan(k_scan)?;
    if !matches!(u0.domain(), Domain::HalfLine) {
        return Err(Error::Parameter("half-line attempt needs a half-line profile".into()));
    }
    let defaults = Defaults::default();
    let scan = crate::numeric::logspace(defaults.scan_min, defaults.scan_max, defaults.scan_points);
    let cert = obstruction_certificate(u0, &scan)?;
    if cert.verdict != Verdict::Obstructed {
        return Err(Error::Refused(format!(
            "certificate is inconclusive (gap {:e}); the experiment is meaningless for this initial state",
            cert.gap
        )));
    }

    let window = defaults.half_line_window;
    let n = defaults.terminal_grid_points;
    let grid: Vec<f64> = (1..=n).map(|j| j as f64 * window / n as f64).collect();
    let solver = HalfLineSolver::new(cfg, horizon, grid[0], window)?;
    let tol = defaults.imag_error_tol;
    let basis = Basis::Legendre(k_max);
    let free = solver.free_field(u0, horizon)?;
    let fields = basis_fields(horizon, basis, |phi| solver.boundary_field(phi, horizon))?;
    let a_full = field_matrix(&fields, &grid, tol)?;
    let b = field_values(&free, &grid, tol)?;

    let sqrt_w = DVector::from_iterator(n, trapezoid_weights(&grid).into_iter().map(f64::sqrt));
    let u0_vals: Vec<f64> = grid.iter().map(|&x| u0.eval(x)).collect();
    let u0_norm = l2_norm_trapezoid(&grid, &u0_vals);
    let baseline = l2_norm_trapezoid(&grid, b.as_slice()) / u0_norm;
    let weighted_b = -b.component_mul(&sqrt_w);

    let kgrid = growth_grid();
    let entries = k_scan
        .iter()
        .map(|&k| {
            let a = a_full.columns(0, k).into_owned();
            let mut aw = a.clone();
            for mut col in aw.column_iter_mut() {
                col.component_mul_assign(&sqrt_w);
            }
            let sol = tikhonov(&aw, &weighted_b, reg)?;
            let terminal = &b + &a * &sol.c;
            let rel = l2_norm_trapezoid(&grid, terminal.as_slice()) / u0_norm;
            let coefficients: Vec<f64> = sol.c.iter().copied().collect();
            let g = TimeSignal::from_basis(horizon, basis.with_size(k), coefficients.clone())?;
            let growth = yosida_growth_test(&g, &kgrid, Some(cert.m))?;
            Ok(DichotomyEntry {
                basis_size: k,
                best_terminal_rel_norm: rel,
                control_l2: g.l2_norm(),
                coefficients,
                growth_flag: growth.flag,
                growth_slope: growth.slope,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best = entries.iter().map(|e| e.best_terminal_rel_norm).fold(f64::INFINITY, f64::min);
    let verdict_text = format!(
        "half line, T = {horizon}: best terminal norm {best:.3e} relative to ‖u0‖ over K in {k_scan:?} \
         (no control: {baseline:.3e}). û0(λ*) - û0(-λ*) has modulus {:.3e} at λ* = {:.4}, so exact null control \
         would need |g̃(λ², T)| = |û0(λ) - û0(-λ)|/(2|λ|) ≤ M = {:.3e} for all λ² > 1; candidates with nonzero g instead grow \
         like e^{{λ² T}} (flags above).",
        cert.gap, cert.lambda_star, cert.m
    );
    Ok(DichotomyReport {
        problem_kind: ProblemKind::HalfLine,
        horizon,
        basis: basis.name().into(),
        entries,
        baseline_terminal_rel_norm: baseline,
        evaluations: k_max + 1,
        certificate_gap: Some(cert.gap),
        certificate_m: Some(cert.m),
        verdict_text,
    })
}

/// The interval counterpart of [`attempt_halfline_control`], reported in the same shape.
pub fn interval_dichotomy_report(u0: &Profile, horizon: f64, k_scan: &[usize], reg: Regularization, cfg: &ContourConfig) -> Result<DichotomyReport> {
    let k_max = check_scan(k_scan)?;
    let length = u0.length().ok_or_else(|| Error::Parameter("interval report needs an interval profile".into()))?;
    let colloc = chebyshev_interior(Defaults::default().collocation_points.max(k_max), length);
    let synth = IntervalSynthesizer::new(u0, horizon, Basis::Legendre(k_max), &colloc, cfg)?;
    let baseline = l2_norm_trapezoid(&synth.grid, synth.grid_u0.as_slice()) / synth.u0_norm;
    let kgrid = growth_grid();
    let entries = k_scan
        .iter()
        .map(|&k| {
            let sol = synth.solve(k, reg)?;
            let h = sol.control()?;
            let growth = yosida_growth_test(&h, &kgrid, None)?;
            Ok(DichotomyEntry {
                basis_size: k,
                best_terminal_rel_norm: sol.terminal_rel_norm,
                control_l2: h.l2_norm(),
                coefficients: sol.coefficients,
                growth_flag: growth.flag,
                growth_slope: growth.slope,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = entries.iter().map(|e| e.best_terminal_rel_norm).fold(f64::INFINITY, f64::min);
    Ok(DichotomyReport {
        problem_kind: ProblemKind::Interval,
        horizon,
        basis: "legendre".into(),
        entries,
        baseline_terminal_rel_norm: baseline,
        evaluations: k_max + 1,
        certificate_gap: None,
        certificate_m: None,
        verdict_text: format!(
            "interval [0, {length}], T = {horizon}: best terminal norm {best:.3e} relative to ‖u0‖ over K in {k_scan:?} \
             (no control: {baseline:.3e})."
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyComparison {
    pub interval: DichotomyReport,
    pub half_line: DichotomyReport,
    /// Best half-line norm over best interval norm.
    pub ratio: f64,
    pub separated_by_decade: bool,
    pub verdict_text: String,
}

pub fn compare_dichotomy(interval: DichotomyReport, half_line: DichotomyReport) -> DichotomyComparison {
    let (bi, bh) = (interval.best(), half_line.best());
    let ratio = bh / bi;
    let separated = ratio >= 10.0;
    let verdict_text = format!(
        "interval best {bi:.3e}, half line best {bh:.3e}, ratio {ratio:.3e}: {}",
        if separated {
            "the interval is steered close to zero while the half line stays at least a decade above it"
        } else {
            "no decade of separation at this basis size and budget"
        }
    );
    DichotomyComparison { interval, half_line, ratio, separated_by_decade: separated, verdict_text }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubtractionResidual {
    /// `max |2iλ g̃(λ², T) - (û₀(λ) - û₀(-λ))|`; infinite when it exceeds the `f64` range.
    pub max_residual: f64,
    pub ln_max_residual: f64,
    pub lambda_at_max: f64,
}

/// Residual of the exact null-control equation `2iλ g̃(λ²,T) = û₀(λ) - û₀(-λ)` on a real grid.
pub fn verify_subtraction_identity(u0: &Profile, g: &TimeSignal, lambda_grid: &[f64]) -> Result<SubtractionResidual> {
    if lambda_grid.is_empty() || lambda_grid.iter().any(|l| *l == 0.0 || !l.is_finite()) {
        return Err(Error::Parameter("λ grid must be nonempty, finite and free of zero".into()));
    }
    let horizon = g.horizon();
    let mut best = SubtractionResidual { max_residual: 0.0, ln_max_residual: f64::NEG_INFINITY, lambda_at_max: lambda_grid[0] };
    for &l in lambda_grid {
        let lam = C64::new(l, 0.0);
        let lhs = g.exp_moment(lam * lam, horizon)?.scale(2.0 * I * lam);
        let rhs = half_line_fourier(u0, lam)? - half_line_fourier(u0, -lam)?;
        let r = ScaledPair::sum(&[lhs, ScaledPair::plain(-rhs)]);
        let ln = r.ln_abs();
        if ln > best.ln_max_residual {
            best = SubtractionResidual { max_residual: ln.exp(), ln_max_residual: ln, lambda_at_max: l };
        }
    }
    Ok(best)
}
