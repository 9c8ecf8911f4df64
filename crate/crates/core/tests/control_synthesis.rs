use utm_heat::control::{
    attempt_halfline_control, compare_dichotomy, interval_dichotomy_report, synthesize_interval_control, IntervalSynthesizer,
};
use utm_heat::numeric::{chebyshev_interior, l2_norm_trapezoid};
use utm_heat::transforms::ClosedForm;
use utm_heat::*;

fn unit() -> Domain {
    Domain::Interval { length: 1.0 }
}

fn sine() -> Profile {
    Profile::closed_form(unit(), ClosedForm::SineMode { n: 1, amp: 1.0 }).unwrap()
}

fn parabola() -> Profile {
    Profile::closed_form(unit(), ClosedForm::PolyExp { coeffs: vec![0.0, 1.0, -1.0], a: 0.0 }).unwrap()
}

fn oracle_rel_norm(u0: &Profile, sol: &ControlSolution, nx: usize, nt: usize) -> f64 {
    let h = sol.control().unwrap();
    let cn = crank_nicolson_interval(u0, &h, 1.0, sol.horizon, nx, nt).unwrap();
    let n = sol.terminal_grid_points;
    let grid: Vec<f64> = (1..=n).map(|j| j as f64 / (n + 1) as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| cn.terminal_at(x)).collect();
    let u0_vals: Vec<f64> = grid.iter().map(|&x| u0.eval(x)).collect();
    l2_norm_trapezoid(&grid, &vals) / l2_norm_trapezoid(&grid, &u0_vals)
}

#[test]
fn objective_never_increases_with_nested_bases() {
    let colloc = chebyshev_interior(48, 1.0);
    let synth = IntervalSynthesizer::new(&sine(), 0.5, Basis::Legendre(16), &colloc, &ContourConfig::default()).unwrap();
    let reg = Regularization::Absolute(1e-12);
    let k12 = synth.solve(12, reg).unwrap();
    let k16 = synth.solve(16, reg).unwrap();
    let obj12 = k12.residual_history.last().unwrap().objective;
    let obj16 = k16.residual_history.last().unwrap().objective;
    assert!(obj16 <= obj12 * (1.0 + 1e-9), "{obj16} > {obj12}");
    for w in k16.residual_history.windows(2) {
        assert!(w[1].objective <= w[0].objective * (1.0 + 1e-9), "{:?}", w);
    }
}

#[test]
fn weaker_regularization_never_hurts_the_objective_fit() {
    let colloc = chebyshev_interior(48, 1.0);
    let synth = IntervalSynthesizer::new(&sine(), 0.5, Basis::Legendre(12), &colloc, &ContourConfig::default()).unwrap();
    let norms: Vec<f64> = [1e-6, 1e-8, 1e-10]
        .iter()
        .map(|&mu| synth.solve(12, Regularization::Absolute(mu)).unwrap().terminal_rel_norm)
        .collect();
    for w in norms.windows(2) {
        assert!(w[1] <= w[0] * 1.05, "{norms:?}");
    }
}

#[test]
fn sine_mode_is_steered_to_rest_and_the_oracle_agrees() {
    let sol = synthesize_interval_control(&sine(), 0.5, 12, Regularization::default()).unwrap();
    assert!(sol.terminal_rel_norm <= 1e-2);
    assert_eq!(sol.collocation_points, 48);
    assert_eq!(sol.terminal_grid_points, 201);
    assert_eq!(sol.evaluations, 13);
    let cn = oracle_rel_norm(&sine(), &sol, 512, 1024);
    assert!(cn / sol.terminal_rel_norm < 2.0 && sol.terminal_rel_norm / cn < 2.0, "{cn} vs {}", sol.terminal_rel_norm);
}

#[test]
fn parabola_is_steered_to_rest_and_the_oracle_agrees() {
    let sol = synthesize_interval_control(&parabola(), 0.5, 12, Regularization::default()).unwrap();
    assert!(sol.terminal_rel_norm <= 1e-2, "{}", sol.terminal_rel_norm);
    let cn = oracle_rel_norm(&parabola(), &sol, 512, 1024);
    // The oracle floor is O(Δx², Δt²) times ‖h‖, so compare at that floor.
    assert!(cn <= sol.terminal_rel_norm.max(1e-6) * 2.0, "{cn} vs {}", sol.terminal_rel_norm);
}

#[test]
fn reported_norm_matches_a_fresh_terminal_profile() {
    let sol = synthesize_interval_control(&sine(), 0.5, 8, Regularization::default()).unwrap();
    let p = IntervalProblem::new(sine(), sol.control().unwrap()).unwrap();
    let grid: Vec<f64> = (1..=201).map(|j| j as f64 / 202.0).collect();
    let prof = terminal_profile(&p, &grid).unwrap();
    let u0: Vec<f64> = grid.iter().map(|&x| sine().eval(x)).collect();
    let rel = l2_norm_trapezoid(&grid, &prof.values) / l2_norm_trapezoid(&grid, &u0);
    assert!((rel - sol.terminal_rel_norm).abs() <= 1e-12 + 1e-9 * rel);
}

#[test]
fn half_line_baseline_matches_the_oracle() {
    let u0 = Profile::exp_decay(Domain::HalfLine, 1.0).unwrap();
    let rep = attempt_halfline_control(&u0, 1.0, &[2]).unwrap();
    let cn = crank_nicolson_halfline(&u0, &TimeSignal::zero(1.0), 40.0, 4000, 400, 1.0).unwrap();
    let grid: Vec<f64> = (1..=201).map(|j| j as f64 * 10.0 / 201.0).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| cn.terminal_at(x)).collect();
    let u0_vals: Vec<f64> = grid.iter().map(|&x| u0.eval(x)).collect();
    let rel = l2_norm_trapezoid(&grid, &vals) / l2_norm_trapezoid(&grid, &u0_vals);
    assert!((rel - rep.baseline_terminal_rel_norm).abs() < 1e-4, "{rel} vs {}", rep.baseline_terminal_rel_norm);
}

#[test]
fn half_line_candidates_are_checked_against_the_oracle() {
    let u0 = Profile::exp_decay(Domain::HalfLine, 1.0).unwrap();
    let rep = attempt_halfline_control(&u0, 1.0, &[4]).unwrap();
    let e = &rep.entries[0];
    let g = TimeSignal::from_basis(1.0, Basis::Legendre(4), e.coefficients.clone()).unwrap();
    let cn = crank_nicolson_halfline(&u0, &g, 40.0, 4000, 800, 1.0).unwrap();
    let grid: Vec<f64> = (1..=201).map(|j| j as f64 * 10.0 / 201.0).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| cn.terminal_at(x)).collect();
    let u0_vals: Vec<f64> = grid.iter().map(|&x| u0.eval(x)).collect();
    let rel = l2_norm_trapezoid(&grid, &vals) / l2_norm_trapezoid(&grid, &u0_vals);
    assert!((rel - e.best_terminal_rel_norm).abs() < 1e-3 * e.best_terminal_rel_norm.max(1.0), "{rel} vs {}", e.best_terminal_rel_norm);
}

#[test]
fn dichotomy_separates_interval_from_half_line() {
    let interval = interval_dichotomy_report(&sine(), 0.5, &[4, 8, 12], Regularization::default(), &ContourConfig::default()).unwrap();
    let half_line = attempt_halfline_control(&Profile::exp_decay(Domain::HalfLine, 1.0).unwrap(), 1.0, &[4, 8, 12]).unwrap();
    let cmp = compare_dichotomy(interval, half_line);
    assert!(cmp.separated_by_decade, "{}", cmp.verdict_text);
    assert!(cmp.ratio >= 10.0);
}

#[test]
fn terminal_state_is_affine_in_the_coefficients() {
    let horizon = 0.5;
    let grid = [0.2, 0.5, 0.8];
    let run = |c: Vec<f64>| {
        let h = TimeSignal::from_basis(horizon, Basis::Legendre(3), c).unwrap();
        terminal_profile(&IntervalProblem::new(sine(), h).unwrap(), &grid).unwrap().values
    };
    let base = run(vec![0.0; 3]);
    let e0 = run(vec![1.0, 0.0, 0.0]);
    let e2 = run(vec![0.0, 0.0, 1.0]);
    let mix = run(vec![2.0, 0.0, -3.0]);
    for j in 0..grid.len() {
        let predicted = base[j] + 2.0 * (e0[j] - base[j]) - 3.0 * (e2[j] - base[j]);
        assert!((mix[j] - predicted).abs() < 1e-12, "{} vs {predicted}", mix[j]);
    }
}
