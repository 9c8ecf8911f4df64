//! Executes a filled run document.

use serde::Serialize;
use serde_json::{json, Value};
use utm_heat::control::{
    attempt_halfline_control_with, compare_dichotomy, interval_dichotomy_report, IntervalSynthesizer, Regularization,
};
use utm_heat::halfline::GrowthFlag;
use utm_heat::halfspace::{halfspace_certificate_with_tol, HalfSpaceInitial, SeparableBoundary, SeparableField};
use utm_heat::numeric::{chebyshev_interior, l2_norm_trapezoid};
use utm_heat::oracle::sine_coefficients;
use utm_heat::transforms::Basis;
use utm_heat::{
    crank_nicolson_halfline, crank_nicolson_interval, global_relation_residual, half_line_fourier,
    halfspace_global_relation_residual, obstruction_certificate, sine_series_interval, yosida_growth_test, Defaults,
    DichotomyReport, Domain, GridSolution, HalfLineProblem, HalfLineSolver, HalfSpaceProblem2D, IntervalProblem,
    IntervalSolver, Profile, ScaledPair, TimeSignal, C64,
};

use crate::error::CliError;
use crate::spec::{Command, Manufactured, ProblemKind, ProblemSpecDocument};

/// Plot-ready rows; every cell is already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub struct Report {
    pub result: Value,
    pub table: Table,
    /// Set when the run completed but failed its own accuracy check.
    pub failure: Option<CliError>,
}

fn report(result: impl Serialize, table: Table) -> Result<Report, CliError> {
    let result = serde_json::to_value(result).map_err(|e| CliError::validation("Serialization", e.to_string()))?;
    Ok(Report { result, table, failure: None })
}

fn u0_of(doc: &ProblemSpecDocument) -> Result<Profile, CliError> {
    doc.u0
        .as_ref()
        .ok_or_else(|| CliError::validation("SpecDocument", "missing `u0`"))?
        .build(doc.domain())
}

fn signal_of(spec: &Option<crate::spec::SignalSpec>, name: &str, horizon: f64) -> Result<TimeSignal, CliError> {
    spec.as_ref()
        .ok_or_else(|| CliError::validation("SpecDocument", format!("missing `{name}`")))?
        .build(horizon)
}

fn window(xs: &[f64]) -> Result<(f64, f64), CliError> {
    if xs.is_empty() {
        return Err(CliError::validation("Parameter", "empty evaluation grid"));
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

fn regularization(doc: &ProblemSpecDocument) -> Regularization {
    doc.query.regularization.unwrap_or_default()
}

pub fn execute(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    match doc.command {
        Command::SolveHalfline => solve_halfline(doc),
        Command::SolveInterval => solve_interval(doc),
        Command::CheckGr => check_gr(doc),
        Command::Certify => certify(doc),
        Command::GrowthTest => growth_test(doc),
        Command::Synthesize => synthesize(doc),
        Command::AttemptHalfline => attempt_halfline(doc),
        Command::Dichotomy => dichotomy(doc),
        Command::HalfspaceCertify => halfspace_certify(doc),
        Command::OracleCompare => oracle_compare(doc),
    }
}

#[derive(Serialize)]
struct PointValue {
    x: f64,
    t: f64,
    u: f64,
    imag: f64,
}

fn point_table(values: &[PointValue]) -> Table {
    let mut table = Table::new(&["x", "t", "u", "imag"]);
    for v in values {
        table.push(vec![num(v.x), num(v.t), num(v.u), num(v.imag)]);
    }
    table
}

fn solve_halfline(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let p = HalfLineProblem::new(u0_of(doc)?, signal_of(&doc.g, "g", doc.horizon)?, None)?;
    let t = doc.query.t.unwrap_or(doc.horizon);
    let (lo, hi) = window(&doc.query.x)?;
    let solver = HalfLineSolver::new(&doc.contour, t, lo, hi)?;
    let field = solver.field(&p, t)?;
    let values: Vec<PointValue> = field
        .eval_many(&doc.query.x, solver.imag_tol())?
        .into_iter()
        .zip(&doc.query.x)
        .map(|(v, &x)| PointValue { x, t, u: v.value, imag: v.imag })
        .collect();
    let table = point_table(&values);
    report(json!({ "values": values, "contour_nodes": field.node_count() }), table)
}

fn solve_interval(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let p = IntervalProblem::new(u0_of(doc)?, signal_of(&doc.h, "h", doc.horizon)?)?;
    let t = doc.query.t.unwrap_or(doc.horizon);
    let (lo, hi) = window(&doc.query.x)?;
    let solver = IntervalSolver::new(&doc.contour, p.length, t, lo, hi)?;
    let field = solver.field(&p, t)?;
    let values: Vec<PointValue> = field
        .eval_many(&doc.query.x, solver.imag_tol())?
        .into_iter()
        .zip(&doc.query.x)
        .map(|(v, &x)| PointValue { x, t, u: v.value, imag: v.imag })
        .collect();
    let table = point_table(&values);
    report(json!({ "values": values, "contour": solver.meta(), "compatible": p.compatible() }), table)
}

#[derive(Serialize)]
struct ResidualRow {
    lambda_prime: Option<f64>,
    lambda: [f64; 2],
    residual: ScaledPair,
    /// `|residual| e^{-Re(exponent)}`: the residual relative to the size of its terms.
    scaled_magnitude: f64,
    magnitude: f64,
}

fn check_gr(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let q = &doc.query;
    let t = q.t.unwrap_or(doc.horizon);
    let mut rows = Vec::new();
    match q.manufactured.as_ref().ok_or_else(|| CliError::validation("SpecDocument", "missing `query.manufactured`"))? {
        Manufactured::Exp { a } => {
            let p = HalfLineProblem::manufactured_exp(*a, doc.horizon)?;
            let snap = HalfLineProblem::manufactured_exp_snapshot(*a, t)?;
            for &[re, im] in &q.lambda {
                let r = global_relation_residual(&p, &snap, t, C64::new(re, im))?;
                rows.push(ResidualRow {
                    lambda_prime: None,
                    lambda: [re, im],
                    residual: r,
                    scaled_magnitude: r.mantissa.norm(),
                    magnitude: r.abs(),
                });
            }
        }
        Manufactured::HalfSpace { b } => {
            let mut grid: Vec<f64> = q.lambda_prime.iter().flat_map(|&l| [l, -l]).collect();
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let (p, h) = HalfSpaceProblem2D::manufactured(*b, doc.horizon, grid)?;
            let snap = HalfSpaceProblem2D::manufactured_snapshot(*b, t)?;
            for &lp in &q.lambda_prime {
                for &[re, im] in &q.lambda {
                    let r = halfspace_global_relation_residual(&p, &h, &snap, lp, C64::new(re, im), t)?.residual;
                    rows.push(ResidualRow {
                        lambda_prime: Some(lp),
                        lambda: [re, im],
                        residual: r,
                        scaled_magnitude: r.mantissa.norm(),
                        magnitude: r.abs(),
                    });
                }
            }
        }
    }
    let max_scaled = rows.iter().map(|r| r.scaled_magnitude).fold(0.0, f64::max);
    let max_abs = rows.iter().map(|r| r.magnitude).fold(0.0, f64::max);
    let mut table = Table::new(&[
        "lambda_prime",
        "lambda_re",
        "lambda_im",
        "residual_mantissa_re",
        "residual_mantissa_im",
        "residual_exponent_re",
        "residual_exponent_im",
        "scaled_magnitude",
    ]);
    for r in &rows {
        table.push(vec![
            r.lambda_prime.map(num).unwrap_or_default(),
            num(r.lambda[0]),
            num(r.lambda[1]),
            num(r.residual.mantissa.re),
            num(r.residual.mantissa.im),
            num(r.residual.exponent.re),
            num(r.residual.exponent.im),
            num(r.scaled_magnitude),
        ]);
    }
    report(json!({ "t": t, "rows": rows, "max_scaled_magnitude": max_scaled, "max_magnitude": max_abs }), table)
}

fn certify(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let u0 = u0_of(doc)?;
    let scan = doc.query.scan.as_ref().expect("filled").values();
    let cert = obstruction_certificate(&u0, &scan)?;
    let mut table = Table::new(&["lambda", "gap", "gap_over_2lambda"]);
    for &l in &scan {
        let gap = (half_line_fourier(&u0, C64::new(l, 0.0))? - half_line_fourier(&u0, C64::new(-l, 0.0))?).norm();
        table.push(vec![num(l), num(gap), num(gap / (2.0 * l))]);
    }
    report(cert, table)
}

fn growth_test(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let g = signal_of(&doc.g, "g", doc.horizon)?;
    let grid = doc.query.k_grid.as_ref().expect("filled").values();
    let rep = yosida_growth_test(&g, &grid, doc.query.bound)?;
    let mut table = Table::new(&["lambda_squared", "mantissa", "exponent", "ln_abs"]);
    for r in &rep.rows {
        table.push(vec![num(r.k), num(r.mantissa), num(r.exponent), num(r.ln_abs)]);
    }
    report(rep, table)
}

fn synthesize(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let u0 = u0_of(doc)?;
    let q = &doc.query;
    let length = u0.length().expect("interval profile");
    let k_max = *q.k.iter().max().ok_or_else(|| CliError::validation("Parameter", "empty basis size list"))?;
    let basis = Basis::from_name(q.basis.as_deref().unwrap_or("legendre"), k_max)?;
    let colloc = chebyshev_interior(q.collocation_points.unwrap_or(48).max(k_max), length);
    let synth = IntervalSynthesizer::new(&u0, doc.horizon, basis, &colloc, &doc.contour)?;
    let solutions = q.k.iter().map(|&k| synth.solve(k, regularization(doc))).collect::<utm_heat::Result<Vec<_>>>()?;
    let last = solutions.last().expect("nonempty");
    let grid = synth.terminal_grid().to_vec();
    let p = IntervalProblem::new(u0.clone(), last.control()?)?;
    let terminal = utm_heat::interval::terminal_profile_with(&p, &grid, &doc.contour)?;
    let mut table = Table::new(&["x", "u0", "u_T"]);
    for (&x, &v) in grid.iter().zip(&terminal.values) {
        table.push(vec![num(x), num(u0.eval(x)), num(v)]);
    }
    report(json!({ "solutions": solutions, "terminal_contour": terminal.meta }), table)
}

fn dichotomy_table(entries: &[(&str, &DichotomyReport)]) -> Table {
    let mut table = Table::new(&["problem", "basis_size", "terminal_rel_norm", "control_l2", "growth_flag", "growth_slope"]);
    for (name, rep) in entries {
        for e in &rep.entries {
            let flag = match e.growth_flag {
                GrowthFlag::Bounded => "bounded",
                GrowthFlag::UnboundedGrowth => "unbounded_growth",
                GrowthFlag::Indeterminate => "indeterminate",
            };
            table.push(vec![
                name.to_string(),
                e.basis_size.to_string(),
                num(e.best_terminal_rel_norm),
                num(e.control_l2),
                flag.into(),
                e.growth_slope.map(num).unwrap_or_default(),
            ]);
        }
    }
    table
}

fn attempt_halfline(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let rep = attempt_halfline_control_with(&u0_of(doc)?, doc.horizon, &doc.query.k, regularization(doc), &doc.contour)?;
    let table = dichotomy_table(&[("half_line", &rep)]);
    report(rep, table)
}

fn dichotomy(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let arm = doc.query.interval.as_ref().expect("filled");
    let iv_u0 = arm.u0.build(Domain::Interval { length: arm.length })?;
    let reg = regularization(doc);
    let interval = interval_dichotomy_report(&iv_u0, arm.horizon, &doc.query.k, reg, &doc.contour)?;
    let half_line = attempt_halfline_control_with(&u0_of(doc)?, doc.horizon, &doc.query.k, reg, &doc.contour)?;
    let table = dichotomy_table(&[("interval", &interval), ("half_line", &half_line)]);
    report(compare_dichotomy(interval, half_line), table)
}

fn halfspace_certify(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let q = &doc.query;
    let tangential = q.tangential.clone().expect("filled");
    tangential.validate()?;
    let normal = u0_of(doc)?;
    let u0 = HalfSpaceInitial::Separable(SeparableField::new(tangential.clone(), normal)?);
    let scan = q.scan.as_ref().expect("filled").values();
    let boundary = match &doc.g {
        Some(g) => Some(SeparableBoundary {
            tangential: tangential.clone(),
            evolving: q.evolving.unwrap_or(false),
            temporal: g.build(doc.horizon)?,
        }),
        None => None,
    };
    let k_grid = q.k_grid.as_ref().map(|s| s.values()).unwrap_or_default();
    let datum = boundary.as_ref().map(|b| (b, k_grid.as_slice()));
    let cert = halfspace_certificate_with_tol(&u0, &q.lambda_prime, &scan, datum, Defaults::default().certificate_tol)?;
    let mut table = Table::new(&["lambda_prime", "gap", "lambda_star", "M", "verdict", "reduced_accuracy", "growth_slope"]);
    for s in &cert.slices {
        table.push(vec![
            num(s.lambda_prime),
            num(s.certificate.gap),
            num(s.certificate.lambda_star),
            num(s.certificate.m),
            format!("{:?}", s.certificate.verdict).to_lowercase(),
            s.reduced_accuracy.to_string(),
            s.growth.as_ref().and_then(|g| g.slope).map(num).unwrap_or_default(),
        ]);
    }
    report(cert, table)
}

fn oracle_compare(doc: &ProblemSpecDocument) -> Result<Report, CliError> {
    let q = &doc.query;
    let u0 = u0_of(doc)?;
    let xs = &q.x;
    let (lo, hi) = window(xs)?;
    let nx = q.nx.expect("filled");
    let nt = q.nt.expect("filled");
    let tol = q.tol.expect("filled");
    let (utm, grid, series): (Vec<f64>, GridSolution, Option<Vec<f64>>) = match doc.problem {
        ProblemKind::HalfLine => {
            let g = signal_of(&doc.g, "g", doc.horizon)?;
            let p = HalfLineProblem::new(u0.clone(), g.clone(), None)?;
            let solver = HalfLineSolver::new(&doc.contour, doc.horizon, lo, hi)?;
            let utm = solver.field(&p, doc.horizon)?.eval_many(xs, solver.imag_tol())?.into_iter().map(|v| v.value).collect();
            let cn = crank_nicolson_halfline(&u0, &g, q.x_max.expect("filled"), nx, nt, doc.horizon)?;
            (utm, cn, None)
        }
        _ => {
            let h = signal_of(&doc.h, "h", doc.horizon)?;
            let length = u0.length().expect("interval profile");
            let p = IntervalProblem::new(u0.clone(), h.clone())?;
            let utm = utm_heat::interval::terminal_profile_with(&p, xs, &doc.contour)?.values;
            let cn = crank_nicolson_interval(&u0, &h, length, doc.horizon, nx, nt)?;
            let series = if h.is_zero() {
                let s = sine_series_interval(&sine_coefficients(&u0, 400)?, doc.horizon, length)?;
                Some(xs.iter().map(|&x| s.eval(x)).collect())
            } else {
                None
            };
            (utm, cn, series)
        }
    };
    let oracle: Vec<f64> = xs.iter().map(|&x| grid.terminal_at(x)).collect();
    let diffs: Vec<f64> = utm.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).collect();
    let max_diff = diffs.iter().copied().fold(0.0, f64::max);
    let mut columns = vec!["x", "utm", "crank_nicolson", "abs_diff"];
    if series.is_some() {
        columns.push("sine_series");
    }
    let mut table = Table::new(&columns);
    for (j, &x) in xs.iter().enumerate() {
        let mut row = vec![num(x), num(utm[j]), num(oracle[j]), num(diffs[j])];
        if let Some(s) = &series {
            row.push(num(s[j]));
        }
        table.push(row);
    }
    let rel = {
        let o = l2_norm_trapezoid(xs, &oracle);
        if xs.len() >= 2 && o > 0.0 {
            Some(l2_norm_trapezoid(xs, &diffs) / o)
        } else {
            None
        }
    };
    let result = json!({
        "x": xs,
        "utm": utm,
        "crank_nicolson": oracle,
        "sine_series": series,
        "max_abs_diff": max_diff,
        "relative_l2_diff": rel,
        "tol": tol,
        "scheme": grid.meta,
    });
    let mut rep = report(result, table)?;
    if !(max_diff <= tol) {
        rep.failure = Some(CliError::accuracy(
            "OracleMismatch",
            format!("representation and Crank–Nicolson differ by {max_diff:e} > tol {tol:e}"),
        ));
    }
    Ok(rep)
}
