//! The three transform pairs: half-line Fourier, finite-interval Fourier,
//! and the time transform `∫_0^t e^{kτ} f(τ) dτ` of boundary data.

mod profile;
mod signal;

pub use profile::{ClosedForm, Domain, Profile, Quadrature, Representation, Samples, DEFAULT_TAIL_EPS};
pub use signal::{Basis, SignalForm, SignalRepr, TimeSignal, OVERFLOW_GUARD};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ScaledPair, C64};

/// `∫_0^∞ e^{-iλx} f(x) dx`, defined for `Im λ ≤ 0`.
pub fn half_line_fourier(f: &Profile, lambda: C64) -> Result<C64> {
    if !matches!(f.domain(), Domain::HalfLine) {
        return Err(Error::Parameter("half_line_fourier needs a half-line profile".into()));
    }
    if lambda.im > 0.0 {
        return Err(Error::DomainViolation { lambda, region: "Im λ ≤ 0" });
    }
    f.fourier_unchecked(lambda)
}

/// `∫_0^L e^{-iλx} f(x) dx`; entire in `λ`.
pub fn interval_fourier(f: &Profile, lambda: C64) -> Result<C64> {
    if !matches!(f.domain(), Domain::Interval { .. }) {
        return Err(Error::Parameter("interval_fourier needs an interval profile".into()));
    }
    f.fourier_unchecked(lambda)
}

/// `∫_0^t e^{kτ} f(τ) dτ` in overflow-safe scaled form. Call sites pass `k = λ²`.
pub fn t_transform(f: &TimeSignal, k: C64, t: f64) -> Result<ScaledPair> {
    f.exp_moment(k, t)
}

/// Plain-valued [`t_transform`]; errors with [`Error::Overflow`] when
/// `Re(k) t` exceeds [`OVERFLOW_GUARD`].
pub fn t_transform_value(f: &TimeSignal, k: C64, t: f64) -> Result<C64> {
    f.t_transform(k, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    LowerHalf,
    UpperHalf,
    RealLine,
    Entire,
}

impl Validity {
    pub fn contains(&self, lambda: C64) -> bool {
        match self {
            Validity::LowerHalf => lambda.im <= 0.0,
            Validity::UpperHalf => lambda.im >= 0.0,
            Validity::RealLine => lambda.im == 0.0,
            Validity::Entire => true,
        }
    }
}

/// Transform values at a list of spectral points, with the region where they are valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    points: Vec<C64>,
    values: Vec<C64>,
    validity: Validity,
}

impl SpectralFunction {
    pub fn new(points: Vec<C64>, values: Vec<C64>, validity: Validity) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Parameter("points and values differ in length".into()));
        }
        let region = match validity {
            Validity::LowerHalf => "Im λ ≤ 0",
            Validity::UpperHalf => "Im λ ≥ 0",
            Validity::RealLine => "Im λ = 0",
            Validity::Entire => "ℂ",
        };
        if let Some(&lambda) = points.iter().find(|p| !validity.contains(**p)) {
            return Err(Error::DomainViolation { lambda, region });
        }
        Ok(Self { points, values, validity })
    }

    /// `û(λ)` of a profile at the given points; half-line profiles are
    /// valid in the lower half plane, interval profiles everywhere.
    pub fn of_profile(f: &Profile, points: Vec<C64>) -> Result<Self> {
        let validity = match f.domain() {
            Domain::HalfLine => Validity::LowerHalf,
            Domain::Interval { .. } => Validity::Entire,
        };
        if let Some(&lambda) = points.iter().find(|p| !validity.contains(**p)) {
            return Err(Error::DomainViolation { lambda, region: "Im λ ≤ 0" });
        }
        let values = points.iter().map(|&l| f.fourier_unchecked(l)).collect::<Result<Vec<_>>>()?;
        Self::new(points, values, validity)
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }
}
