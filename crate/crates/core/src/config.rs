//! Every numerical default in one place, serializable so that front ends can
//! echo the exact settings of a run.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContourConfig {
    /// Leg angle measured from the real axis; `π/4` is the boundary of `D`.
    pub theta: f64,
    /// Truncation radius; derived from the evaluation window when absent.
    pub lambda_max: Option<f64>,
    /// Geometric panels per leg; derived from `lambda_max` when absent.
    pub panels: Option<usize>,
    /// Equal sub-panels per geometric panel.
    pub subdivisions: usize,
    /// Gauss–Legendre order per sub-panel.
    pub order: usize,
    /// Origin indentation radius; the interval default is `min(0.1, π/(4L))`.
    pub indent: Option<f64>,
    /// Target exponent `-ln(tolerance)` of the discarded tails.
    pub decay_exponent: f64,
    /// Width of the innermost geometric panel when `panels` is derived.
    pub inner_width: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            theta: PI / 8.0,
            lambda_max: None,
            panels: None,
            subdivisions: 4,
            order: 16,
            indent: None,
            decay_exponent: 40.0,
            inner_width: 0.05,
        }
    }
}

impl ContourConfig {
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_lambda_max(mut self, lambda_max: f64) -> Self {
        self.lambda_max = Some(lambda_max);
        self
    }

    /// Rejects settings under which the deformed integrals do not converge.
    /// Past `π/4` the legs leave the sector where `e^{-λ²t}` decays.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Parameter(what));
        if !(self.theta > 0.0 && self.theta < PI / 4.0) {
            return bad(format!("leg angle must lie in (0, π/4), got {}", self.theta));
        }
        if let Some(l) = self.lambda_max {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("lambda_max must be positive, got {l}"));
            }
        }
        if self.panels == Some(0) || self.subdivisions == 0 || self.order == 0 {
            return bad("panels, subdivisions and order must be positive".into());
        }
        if let Some(r) = self.indent {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("indent radius must be positive, got {r}"));
            }
        }
        if !(self.decay_exponent > 0.0 && self.inner_width > 0.0) {
            return bad("decay_exponent and inner_width must be positive".into());
        }
        Ok(())
    }

    /// Truncation radius for the deformed legs. The `u₀` terms carry
    /// `e^{-λ²t}`, but boundary terms only decay like `e^{iλd}/λ` with `d`
    /// the distance to the nearest boundary, so both bounds must hold.
    pub fn resolve_lambda_max(&self, t_min: f64, distance_min: f64) -> f64 {
        if let Some(l) = self.lambda_max {
            return l;
        }
        let by_time = (self.decay_exponent / (t_min * (2.0 * self.theta).cos())).sqrt();
        let by_space = self.decay_exponent / (distance_min * self.theta.sin());
        by_time.max(by_space)
    }

    /// Truncation radius of the real-line integral.
    pub fn resolve_real_lambda_max(&self, t_min: f64) -> f64 {
        (self.decay_exponent / t_min).sqrt()
    }

    pub fn resolve_panels(&self, lambda_max: f64, indent: f64) -> usize {
        self.panels.unwrap_or_else(|| {
            let span = (lambda_max - indent).max(self.inner_width);
            ((span / self.inner_width).log2().ceil() as usize + 1).max(2)
        })
    }
}

/// Defaults shared by the solvers, the control layer and the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Defaults {
    pub contour: ContourConfig,
    /// A certificate is `obstructed` when the gap exceeds this.
    pub certificate_tol: f64,
    pub scan_min: f64,
    pub scan_max: f64,
    pub scan_points: usize,
    /// Tikhonov weight relative to `‖A‖₂²`.
    pub tikhonov_relative: f64,
    /// Points of the uniform interior grid on which terminal norms are measured.
    pub terminal_grid_points: usize,
    pub collocation_points: usize,
    /// Right end of the half-line window on which terminal norms are measured.
    pub half_line_window: f64,
    /// Imaginary parts above this are reported as accuracy errors.
    pub imag_error_tol: f64,
    /// Imaginary parts above this are flagged in diagnostics.
    pub imag_warn_tol: f64,
    pub overflow_guard: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            contour: ContourConfig::default(),
            certificate_tol: 1e-10,
            scan_min: 1e-2,
            scan_max: 1e2,
            scan_points: 400,
            tikhonov_relative: 1e-10,
            terminal_grid_points: 201,
            collocation_points: 48,
            half_line_window: 10.0,
            imag_error_tol: 1e-6,
            imag_warn_tol: 1e-8,
            overflow_guard: crate::transforms::OVERFLOW_GUARD,
        }
    }
}

/// Default indentation radius for an interval of length `L`.
pub fn interval_indent(length: f64) -> f64 {
    0.1f64.min(PI / (4.0 * length))
}
