//! A solution snapshot reduced to contour-node coefficients,
//! `u(x) = Σ c_j e^{iλ_j x} + Σ d_j e^{iλ_j (x - s)}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{C64, I};

/// A complex value whose imaginary part is numerical noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealValue {
    pub value: f64,
    pub imag: f64,
}

#[derive(Debug, Clone)]
pub struct Field {
    pub(crate) direct: Vec<(C64, C64)>,
    /// Terms carrying `e^{iλ(x - shift)}`, used on `∂D-` where `e^{iλx}` alone grows.
    pub(crate) shifted: Vec<(C64, C64)>,
    pub(crate) shift: f64,
    x_min: f64,
    x_max: f64,
}

impl Field {
    pub(crate) fn new(direct: Vec<(C64, C64)>, x_min: f64, x_max: f64) -> Self {
        Self { direct, shifted: Vec::new(), shift: 0.0, x_min, x_max }
    }

    pub(crate) fn with_shifted(mut self, shifted: Vec<(C64, C64)>, shift: f64) -> Self {
        self.shifted = shifted;
        self.shift = shift;
        self
    }

    pub fn node_count(&self) -> usize {
        self.direct.len() + self.shifted.len()
    }

    pub fn eval_complex(&self, x: f64) -> C64 {
        let a: C64 = self.direct.iter().map(|(l, c)| c * (I * l * x).exp()).sum();
        let b: C64 = self.shifted.iter().map(|(l, c)| c * (I * l * (x - self.shift)).exp()).sum();
        a + b
    }

    /// Real part at `x`; an accuracy error when the imaginary part reaches `imag_tol`.
    pub fn eval(&self, x: f64, imag_tol: f64) -> Result<RealValue> {
        let slack = 1e-12 * self.x_max.abs().max(1.0);
        if x < self.x_min - slack || x > self.x_max + slack {
            return Err(Error::Refused(format!(
                "x = {x} lies outside the window [{}, {}] the contours were built for",
                self.x_min, self.x_max
            )));
        }
        let v = self.eval_complex(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Accuracy(format!("non-finite solution value at x = {x}")));
        }
        if v.im.abs() >= imag_tol {
            return Err(Error::Accuracy(format!(
                "imaginary residue {:e} at x = {x}; refine the contour parameters",
                v.im.abs()
            )));
        }
        Ok(RealValue { value: v.re, imag: v.im })
    }

    pub fn eval_many(&self, xs: &[f64], imag_tol: f64) -> Result<Vec<RealValue>> {
        xs.par_iter().map(|&x| self.eval(x, imag_tol)).collect()
    }

    /// Appends `scale · other`; both must come from the same solver.
    pub fn add_scaled(&mut self, other: &Field, scale: f64) {
        self.direct.extend(other.direct.iter().map(|(l, c)| (*l, c * scale)));
        self.shifted.extend(other.shifted.iter().map(|(l, c)| (*l, c * scale)));
    }
}
