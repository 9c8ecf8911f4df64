//! Reference solvers that share no code with the contour machinery:
//! Crank–Nicolson finite differences, sine series and closed forms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::C64;
use crate::transforms::{interval_fourier, Domain, Profile, TimeSignal};

/// Backward-Euler half steps replacing the first two Crank–Nicolson steps.
const STARTUP_HALF_STEPS: usize = 4;
pub const TRUNCATION_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeMeta {
    pub scheme: String,
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    /// Right end of the computational domain.
    pub domain_end: f64,
    /// Half-line runs: max difference against a run on twice the domain.
    pub truncation_estimate: Option<f64>,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// `values[n][j] = u(x_j, t_n)`.
    pub values: Vec<Vec<f64>>,
    pub meta: SchemeMeta,
}

impl GridSolution {
    pub fn terminal(&self) -> &[f64] {
        self.values.last().expect("at least one time row")
    }

    /// Linear interpolation in `x` of the row at time index `n`.
    pub fn interpolate(&self, n: usize, x: f64) -> f64 {
        let row = &self.values[n];
        let dx = self.meta.dx;
        let s = (x / dx).clamp(0.0, (row.len() - 1) as f64);
        let j = (s.floor() as usize).min(row.len() - 2);
        let w = s - j as f64;
        (1.0 - w) * row[j] + w * row[j + 1]
    }

    pub fn terminal_at(&self, x: f64) -> f64 {
        self.interpolate(self.values.len() - 1, x)
    }

    /// `(x, t, value)` triples, time-major.
    pub fn triples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.t_grid
            .iter()
            .zip(&self.values)
            .flat_map(move |(&t, row)| self.x_grid.iter().zip(row).map(move |(&x, &v)| (x, t, v)))
    }
}

/// Solves `(1 + 2a) u_j - a (u_{j-1} + u_{j+1}) = d_j` in place.
fn thomas(a: f64, d: &mut [f64], c: &mut Vec<f64>) {
    let n = d.len();
    let (diag, off) = (1.0 + 2.0 * a, -a);
    c.clear();
    c.resize(n, 0.0);
    c[0] = off / diag;
    d[0] /= diag;
    for i in 1..n {
        let m = diag - off * c[i - 1];
        c[i] = off / m;
        d[i] = (d[i] - off * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
}

/// Crank–Nicolson on `[0, end]` with Dirichlet data `left(t)`, `right(t)`.
/// Boundary values enter from the first positive time level onward.
fn crank_nicolson(
    u0: &dyn Fn(f64) -> f64,
    left: &dyn Fn(f64) -> f64,
    right: &dyn Fn(f64) -> f64,
    end: f64,
    nx: usize,
    nt: usize,
    horizon: f64,
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let dx = end / nx as f64;
    let dt = horizon / nt as f64;
    let x_grid: Vec<f64> = (0..=nx).map(|j| j as f64 * dx).collect();
    let t_grid: Vec<f64> = (0..=nt).map(|n| n as f64 * dt).collect();
    let mut values = Vec::with_capacity(nt + 1);
    let mut u = cell_averages(u0, &x_grid, dx);
    values.push(u.clone());

    let mut rhs = vec![0.0; nx - 1];
    let mut scratch = Vec::new();
    let mut t = 0.0;
    // Backward-Euler half steps damp the start-up oscillations of an incompatible corner.
    let half = 0.5 * dt;
    let a_be = half / (dx * dx);
    for s in 0..STARTUP_HALF_STEPS {
        t = (s + 1) as f64 * half;
        let (bl, br) = (left(t), right(t));
        rhs.copy_from_slice(&u[1..nx]);
        rhs[0] += a_be * bl;
        rhs[nx - 2] += a_be * br;
        thomas(a_be, &mut rhs, &mut scratch);
        u[0] = bl;
        u[1..nx].copy_from_slice(&rhs);
        u[nx] = br;
        if s % 2 == 1 {
            values.push(u.clone());
        }
    }
    let a = 0.5 * dt / (dx * dx);
    for n in (STARTUP_HALF_STEPS / 2)..nt {
        let t_next = (n + 1) as f64 * dt;
        let (bl, br) = (left(t_next), right(t_next));
        for j in 1..nx {
            rhs[j - 1] = u[j] + a * (u[j - 1] - 2.0 * u[j] + u[j + 1]);
        }
        rhs[0] += a * bl;
        rhs[nx - 2] += a * br;
        thomas(a, &mut rhs, &mut scratch);
        u[0] = bl;
        u[1..nx].copy_from_slice(&rhs);
        u[nx] = br;
        values.push(u.clone());
        t = t_next;
    }
    debug_assert!((t - horizon).abs() < 1e-9 * horizon.max(1.0));
    (x_grid, t_grid, values)
}

/// Initial data as averages over the cells `[x_j - Δx/2, x_j + Δx/2]`, which
/// keeps jumps that fall on a node from costing an `O(Δx)` error. End
/// nodes take point values.
fn cell_averages(u0: &dyn Fn(f64) -> f64, x_grid: &[f64], dx: f64) -> Vec<f64> {
    let rule = crate::numeric::gauss_legendre(8);
    let n = x_grid.len();
    let half_cell = |lo: f64, hi: f64| -> f64 {
        rule.iter().map(|&(t, w)| 0.5 * (hi - lo) * w * u0(lo + 0.5 * (hi - lo) * (t + 1.0))).sum()
    };
    x_grid
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            if j == 0 || j == n - 1 {
                u0(x)
            } else {
                (half_cell(x - 0.5 * dx, x) + half_cell(x, x + 0.5 * dx)) / dx
            }
        })
        .collect()
}

fn check_steps(nx: usize, nt: usize) -> Result<()> {
    if nx < 16 || nt < 16 {
        return Err(Error::Parameter(format!("Crank–Nicolson needs Nx, Nt >= 16 (got {nx}, {nt})")));
    }
    Ok(())
}

/// Interval `[0, L]` with `u(0,t) = 0` and `u(L,t) = h(t)`.
pub fn crank_nicolson_interval(u0: &Profile, h: &TimeSignal, length: f64, horizon: f64, nx: usize, nt: usize) -> Result<GridSolution> {
    check_steps(nx, nt)?;
    if u0.length() != Some(length) {
        return Err(Error::Parameter("profile length differs from L".into()));
    }
    if horizon > h.horizon() * (1.0 + 1e-12) {
        return Err(Error::Horizon { t: horizon, horizon: h.horizon() });
    }
    let (x_grid, t_grid, values) = crank_nicolson(&|x| u0.eval(x), &|_| 0.0, &|t| h.eval(t), length, nx, nt, horizon);
    Ok(GridSolution {
        x_grid,
        t_grid,
        values,
        meta: SchemeMeta {
            scheme: "crank_nicolson".into(),
            nx,
            nt,
            dx: length / nx as f64,
            dt: horizon / nt as f64,
            domain_end: length,
            truncation_estimate: None,
            reliable: true,
        },
    })
}

/// Half line truncated to `[0, X_max]` with `u(X_max, t) = 0`. The truncation
/// error is estimated from a second run on `[0, 2 X_max]` at the same `Δx`.
pub fn crank_nicolson_halfline(u0: &Profile, g: &TimeSignal, x_max: f64, nx: usize, nt: usize, horizon: f64) -> Result<GridSolution> {
    check_steps(nx, nt)?;
    if !matches!(u0.domain(), Domain::HalfLine) {
        return Err(Error::Parameter("half-line oracle needs a half-line profile".into()));
    }
    if u0.eval(x_max).abs() >= 1e-10 {
        return Err(Error::Parameter(format!(
            "|u0(X_max)| = {:e} is not below 1e-10; enlarge X_max",
            u0.eval(x_max).abs()
        )));
    }
    if horizon > g.horizon() * (1.0 + 1e-12) {
        return Err(Error::Horizon { t: horizon, horizon: g.horizon() });
    }
    let f = |x: f64| u0.eval(x);
    let b = |t: f64| g.eval(t);
    let (x_grid, t_grid, values) = crank_nicolson(&f, &b, &|_| 0.0, x_max, nx, nt, horizon);
    let (_, _, wide) = crank_nicolson(&f, &b, &|_| 0.0, 2.0 * x_max, 2 * nx, nt, horizon);
    let last = values.len() - 1;
    let estimate = (0..=nx / 2).map(|j| (values[last][j] - wide[last][j]).abs()).fold(0.0, f64::max);
    Ok(GridSolution {
        x_grid,
        t_grid,
        values,
        meta: SchemeMeta {
            scheme: "crank_nicolson".into(),
            nx,
            nt,
            dx: x_max / nx as f64,
            dt: horizon / nt as f64,
            domain_end: x_max,
            truncation_estimate: Some(estimate),
            reliable: estimate <= TRUNCATION_TOL,
        },
    })
}

/// `Σ b_n e^{-(nπ/L)² t} sin(nπx/L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineSeries {
    pub length: f64,
    /// Time-evolved coefficients, mode `n = index + 1`.
    pub coefficients: Vec<f64>,
    pub warning: Option<String>,
}

impl SineSeries {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, b)| b * ((i + 1) as f64 * PI * x / self.length).sin())
            .sum()
    }

    pub fn sup_norm_on(&self, xs: &[f64]) -> f64 {
        xs.iter().map(|&x| self.eval(x).abs()).fold(0.0, f64::max)
    }

    /// Samples on a Gauss–Legendre grid, as a profile usable by the transforms.
    pub fn to_profile(&self, panels: usize) -> Result<Profile> {
        Profile::sample_gauss_legendre(Domain::Interval { length: self.length }, self.length, panels, 16, None, |x| self.eval(x))
    }
}

/// Sine coefficients `b_n = (2/L) ∫ u₀ sin(nπx/L)`, `n = 1..=count`.
pub fn sine_coefficients(u0: &Profile, count: usize) -> Result<Vec<f64>> {
    let length = u0.length().ok_or_else(|| Error::Parameter("sine projection needs an interval profile".into()))?;
    (1..=count)
        .map(|n| {
            let hat = interval_fourier(u0, C64::new(n as f64 * PI / length, 0.0))?;
            Ok(-2.0 / length * hat.im)
        })
        .collect()
}

/// Homogeneous Dirichlet solution from sine coefficients, truncated once
/// `e^{-(nπ/L)² t}` falls below `1e-16`.
pub fn sine_series_interval(b: &[f64], t: f64, length: f64) -> Result<SineSeries> {
    if !(length > 0.0 && t >= 0.0) {
        return Err(Error::Parameter(format!("need L > 0 and t >= 0 (got L={length}, t={t})")));
    }
    let mut coefficients = Vec::new();
    for (i, &bn) in b.iter().enumerate() {
        let decay = (-((i + 1) as f64 * PI / length).powi(2) * t).exp();
        if decay < 1e-16 {
            break;
        }
        coefficients.push(bn * decay);
    }
    let warning = if coefficients.len() == b.len() {
        let tail = b.iter().rev().take(3).fold(0.0f64, |m, v| m.max(v.abs()));
        let head = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (tail > 1e-8 * head.max(f64::MIN_POSITIVE)).then(|| {
            format!("series not converged: last coefficients reach {tail:e} relative to {head:e}")
        })
    } else {
        None
    };
    Ok(SineSeries { length, coefficients, warning })
}

/// Coefficients of `x(1-x)` on `[0, 1]`: `8/(nπ)³` for odd `n`.
pub fn parabola_coefficients(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|n| if n % 2 == 1 { 8.0 / (n as f64 * PI).powi(3) } else { 0.0 })
        .collect()
}

pub fn erfc(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

/// Half line, zero initial data, `g ≡ 1`: `u = erfc(x / 2√t)`.
pub fn erfc_solution(x: f64, t: f64) -> f64 {
    erfc(x / (2.0 * t.sqrt()))
}
