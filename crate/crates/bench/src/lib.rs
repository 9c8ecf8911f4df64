//! Problem fixtures shared by the benchmarks.

use utm_heat::{ClosedForm, Domain, HalfLineProblem, Profile, Result, SignalForm, TimeSignal};

/// `u₀ = 0`, `g = 1`: the erfc solution.
pub fn erfc_problem() -> Result<HalfLineProblem> {
    let u0 = Profile::closed_form(Domain::HalfLine, ClosedForm::Zero)?;
    let g = TimeSignal::closed_form(1.0, SignalForm::Const { value: 1.0 })?;
    HalfLineProblem::new(u0, g, None)
}

/// A smooth bump with an oscillating boundary value.
pub fn bump_problem() -> Result<HalfLineProblem> {
    let u0 = Profile::closed_form(Domain::HalfLine, ClosedForm::GaussianBump { c: 2.0, s: 0.5, amp: 1.0 })?;
    let g = TimeSignal::closed_form(1.0, SignalForm::Sine { amp: 1.0, omega: 3.0 })?;
    HalfLineProblem::new(u0, g, None)
}

/// The first Dirichlet mode on `[0, 1]`.
pub fn sine_mode() -> Result<Profile> {
    Profile::closed_form(Domain::Interval { length: 1.0 }, ClosedForm::SineMode { n: 1, amp: 1.0 })
}
