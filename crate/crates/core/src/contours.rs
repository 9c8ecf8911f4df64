//! Truncated, quadrature-discretized contours `∂D±` and the real line.
//!
//! `D± = {λ : ±Im λ > 0, Re λ² < 0}` is where `e^{-λ²t}` grows. Its boundary
//! rays sit at `arg λ = π/4, 3π/4` (and their reflections); the legs built here
//! sit at angle `θc` from the real axis, `θc = π/4` being the boundary itself
//! and `θc < π/4` a deformation into the wedge where `e^{-λ²t}` decays.
//!
//! Orientation follows the convention that `D±` lies to the left: `∂D+` runs
//! in along `arg λ = π - θc` and out along `θc`; `∂D-` runs in along `-θc`
//! and out along `-(π - θc)`. Nodes of `∂D-` are the conjugates of those of
//! `∂D+`; weights are `-conj`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourKind {
    DPlus,
    DMinus,
    /// `[-Λ, Λ]`, left to right.
    RealLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourParams {
    pub theta: f64,
    pub lambda_max: f64,
    pub panels_per_leg: usize,
    pub subdivisions: usize,
    pub order: usize,
    pub indent: f64,
    pub arc_panels: usize,
}

impl ContourParams {
    pub fn new(theta: f64, lambda_max: f64, panels_per_leg: usize, indent: f64) -> Self {
        Self { theta, lambda_max, panels_per_leg, subdivisions: 1, order: 16, indent, arc_panels: 2 }
    }

    pub fn subdivisions(mut self, subdivisions: usize) -> Self {
        self.subdivisions = subdivisions;
        self
    }

    pub fn order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub kind: ContourKind,
    pub params: ContourParams,
    pub nodes: Vec<C64>,
    /// Quadrature weight times `dλ/ds`, including the traversal sign.
    pub weights: Vec<C64>,
}

/// Builds `∂D±` with geometric panel grading toward the origin.
pub fn build_contour(kind: ContourKind, theta: f64, lambda_max: f64, panels_per_leg: usize, indent: f64) -> Result<Contour> {
    build_with(kind, ContourParams::new(theta, lambda_max, panels_per_leg, indent))
}

pub fn build_with(kind: ContourKind, params: ContourParams) -> Result<Contour> {
    let ContourParams { theta, lambda_max, panels_per_leg, subdivisions, order, indent, arc_panels } = params;
    if kind != ContourKind::RealLine && !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::Parameter(format!("leg angle must lie in (0, π/2), got {theta}")));
    }
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::Parameter(format!("truncation radius must be positive, got {lambda_max}")));
    }
    if panels_per_leg == 0 || subdivisions == 0 || order < 2 {
        return Err(Error::Parameter("panel counts must be positive and the order at least 2".into()));
    }
    if !(indent >= 0.0 && indent < lambda_max) {
        return Err(Error::Parameter(format!("indent radius must lie in [0, Λmax), got {indent}")));
    }
    if kind == ContourKind::RealLine {
        return Ok(real_line(params));
    }

    let radial = radial_rule(indent, lambda_max, panels_per_leg, subdivisions, order);
    let d_right = C64::new(theta.cos(), theta.sin());
    let d_left = C64::new(-theta.cos(), theta.sin());
    let mut nodes = Vec::with_capacity(2 * radial.len() + arc_panels * order);
    let mut weights = Vec::with_capacity(nodes.capacity());

    for &(r, w) in radial.iter().rev() {
        nodes.push(d_left * r);
        weights.push(-d_left * w);
    }
    if indent > 0.0 {
        // Clockwise from π - θ to θ through iρ.
        let h = (PI - 2.0 * theta) / arc_panels as f64;
        let rule = gauss_legendre(order);
        for p in (0..arc_panels).rev() {
            let lo = theta + p as f64 * h;
            for &(x, w) in rule.iter().rev() {
                let phi = lo + 0.5 * h * (x + 1.0);
                let z = C64::from_polar(indent, phi);
                nodes.push(z);
                weights.push(-C64::new(0.0, 1.0) * z * (0.5 * h * w));
            }
        }
    }
    for &(r, w) in radial.iter() {
        nodes.push(d_right * r);
        weights.push(d_right * w);
    }

    if kind == ContourKind::DMinus {
        for (z, w) in nodes.iter_mut().zip(weights.iter_mut()) {
            *z = z.conj();
            *w = -w.conj();
        }
    }
    Ok(Contour { kind, params, nodes, weights })
}

/// Nodes/weights in the radial variable on `[r0, Λ]`, panel edges
/// `r0 + (Λ - r0) 2^{-j}`.
fn radial_rule(r0: f64, lambda_max: f64, panels: usize, subdivisions: usize, order: usize) -> Vec<(f64, f64)> {
    let span = lambda_max - r0;
    let mut edges: Vec<f64> = (0..panels).map(|j| r0 + span * 0.5f64.powi(j as i32)).collect();
    edges.push(r0);
    edges.reverse();
    let rule = gauss_legendre(order);
    let mut out = Vec::with_capacity(panels * subdivisions * order);
    for e in edges.windows(2) {
        let h = (e[1] - e[0]) / subdivisions as f64;
        for s in 0..subdivisions {
            let lo = e[0] + s as f64 * h;
            for &(x, w) in rule.iter() {
                out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
    }
    out
}

/// Uniform panels on `[-Λ, Λ]`; `panels_per_leg` panels on each half.
fn real_line(params: ContourParams) -> Contour {
    let rule = gauss_legendre(params.order);
    let n = params.panels_per_leg * params.subdivisions;
    let h = params.lambda_max / n as f64;
    let mut nodes = Vec::with_capacity(2 * n * params.order);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for p in 0..2 * n {
        let lo = -params.lambda_max + p as f64 * h;
        for &(x, w) in rule.iter() {
            nodes.push(C64::new(lo + 0.5 * h * (x + 1.0), 0.0));
            weights.push(C64::new(0.5 * h * w, 0.0));
        }
    }
    Contour { kind: ContourKind::RealLine, params, nodes, weights }
}

impl Contour {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Smallest distance from any node to the real points `nπ/L`, `n ≠ 0`.
    pub fn min_distance_to_poles(&self, length: f64) -> f64 {
        self.nodes
            .iter()
            .map(|z| {
                let n = (z.re * length / PI).round();
                let n = if n == 0.0 { z.re.signum() } else { n };
                (z - C64::new(n * PI / length, 0.0)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// `Σ weights · f(nodes)`; the integrand is evaluated in parallel.
pub fn contour_integrate<F>(c: &Contour, integrand: F) -> Result<C64>
where
    F: Fn(C64) -> C64 + Sync,
{
    let values: Vec<C64> = c.nodes.par_iter().map(|&z| integrand(z)).collect();
    let mut acc = C64::new(0.0, 0.0);
    for ((z, w), v) in c.nodes.iter().zip(&c.weights).zip(values) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { lambda: *z });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Fallible-integrand variant of [`contour_integrate`].
pub fn contour_integrate_fallible<F>(c: &Contour, integrand: F) -> Result<C64>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let values: Vec<C64> = c.nodes.par_iter().map(|&z| integrand(z)).collect::<Result<_>>()?;
    let mut acc = C64::new(0.0, 0.0);
    for ((z, w), v) in c.nodes.iter().zip(&c.weights).zip(values) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { lambda: *z });
        }
        acc += w * v;
    }
    Ok(acc)
}
