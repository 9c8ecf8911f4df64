//! Unified-transform toolkit for the heat equation `u_t = u_xx`.
//!
//! Half line and finite interval problems are solved from their contour
//! integral representations; the same transforms drive boundary-control
//! synthesis on the interval and the obstruction certificate on the half line.

pub mod config;
pub mod contours;
pub mod control;
pub mod error;
pub mod field;
pub mod halfline;
pub mod halfspace;
pub mod interval;
pub mod numeric;
pub mod oracle;
pub mod transforms;

pub use config::{ContourConfig, Defaults};
pub use contours::{build_contour, contour_integrate, Contour, ContourKind, ContourParams};
pub use control::{
    attempt_halfline_control, synthesize_interval_control, verify_subtraction_identity, ControlSolution, DichotomyReport,
    Regularization,
};
pub use error::{Error, Result};
pub use field::{Field, RealValue};
pub use halfline::{
    global_relation_residual, obstruction_certificate, yosida_growth_test, CertificateReport, GrowthFlag, GrowthReport,
    HalfLineProblem, HalfLineSolver, Verdict,
};
pub use halfspace::{halfspace_global_relation_residual, halfspace_obstruction_certificate, HalfSpaceProblem2D};
pub use interval::{evaluate_R, evaluate_U0, interval_global_relation_residual, terminal_profile, IntervalProblem, IntervalSolver, TerminalProfile};
pub use numeric::{ScaledPair, C64};
pub use oracle::{crank_nicolson_halfline, crank_nicolson_interval, sine_series_interval, GridSolution};
pub use transforms::{half_line_fourier, interval_fourier, t_transform, Basis, ClosedForm, Domain, Profile, SignalForm, TimeSignal};
