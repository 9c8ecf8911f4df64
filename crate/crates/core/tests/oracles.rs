use utm_heat::oracle::{erfc_solution, parabola_coefficients, sine_coefficients};
use utm_heat::transforms::ClosedForm;
use utm_heat::*;

fn unit() -> Domain {
    Domain::Interval { length: 1.0 }
}

fn registry() -> Vec<(&'static str, Profile)> {
    vec![
        ("sine", Profile::closed_form(unit(), ClosedForm::SineMode { n: 2, amp: 1.0 }).unwrap()),
        ("parabola", Profile::closed_form(unit(), ClosedForm::PolyExp { coeffs: vec![0.0, 1.0, -1.0], a: 0.0 }).unwrap()),
        ("indicator", Profile::closed_form(unit(), ClosedForm::Indicator { b: 0.5, amp: 1.0 }).unwrap()),
        ("gaussian", Profile::closed_form(unit(), ClosedForm::GaussianBump { c: 0.4, s: 0.1, amp: 1.0 }).unwrap()),
    ]
}

#[test]
fn sine_series_and_crank_nicolson_agree_without_control() {
    let horizon = 0.1;
    let xs: Vec<f64> = (1..=9).map(|j| j as f64 / 10.0).collect();
    for (name, u0) in registry() {
        let b = sine_coefficients(&u0, 400).unwrap();
        let series = sine_series_interval(&b, horizon, 1.0).unwrap();
        let cn = crank_nicolson_interval(&u0, &TimeSignal::zero(horizon), 1.0, horizon, 800, 800).unwrap();
        let err = xs.iter().map(|&x| (series.eval(x) - cn.terminal_at(x)).abs()).fold(0.0, f64::max);
        assert!(err < 1e-5, "{name}: {err:e}");
    }
}

#[test]
fn contour_solution_matches_the_sine_series() {
    let horizon = 0.1;
    let xs: Vec<f64> = (1..=9).map(|j| j as f64 / 10.0).collect();
    for (name, u0) in registry() {
        let b = sine_coefficients(&u0, 400).unwrap();
        let series = sine_series_interval(&b, horizon, 1.0).unwrap();
        let prof = terminal_profile(&IntervalProblem::new(u0.clone(), TimeSignal::zero(horizon)).unwrap(), &xs).unwrap();
        let err = xs.iter().zip(&prof.values).map(|(&x, v)| (series.eval(x) - v).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{name}: {err:e}");
    }
}

#[test]
fn parabola_coefficients_match_quadrature() {
    let u0 = registry().remove(1).1;
    let closed = parabola_coefficients(30);
    let quad = sine_coefficients(&u0, 30).unwrap();
    for (a, b) in closed.iter().zip(&quad) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn half_line_solver_tracks_erfc_across_the_window() {
    let p = HalfLineProblem::new(Profile::zero(Domain::HalfLine), TimeSignal::constant(2.0, 1.0).unwrap(), None).unwrap();
    let solver = HalfLineSolver::new(&ContourConfig::default(), 0.25, 0.1, 6.0).unwrap();
    for t in [0.25, 1.0, 2.0] {
        for x in [0.1, 0.5, 1.5, 3.0, 6.0] {
            let u = solver.solve(&p, x, t).unwrap();
            assert!((u - erfc_solution(x, t)).abs() < 1e-7, "x={x} t={t}: {u}");
        }
    }
}

#[test]
fn half_line_crank_nicolson_flags_short_domains() {
    let u0 = Profile::closed_form(Domain::HalfLine, ClosedForm::GaussianBump { c: 1.0, s: 0.2, amp: 1.0 }).unwrap();
    let wide = crank_nicolson_halfline(&u0, &TimeSignal::zero(1.0), 30.0, 3000, 200, 1.0).unwrap();
    assert!(wide.meta.reliable);
    let narrow = crank_nicolson_halfline(&u0, &TimeSignal::zero(1.0), 4.0, 400, 200, 1.0).unwrap();
    assert!(!narrow.meta.reliable);
}
