//! The run document: everything needed to reproduce a run, echoed verbatim
//! into every output file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use utm_heat::control::Regularization;
use utm_heat::halfspace::Tangential;
use utm_heat::numeric::{linspace, logspace};
use utm_heat::transforms::{Basis, Samples};
use utm_heat::{ContourConfig, Defaults, Domain, Profile, TimeSignal};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveHalfline,
    SolveInterval,
    CheckGr,
    Certify,
    GrowthTest,
    Synthesize,
    AttemptHalfline,
    Dichotomy,
    HalfspaceCertify,
    OracleCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum ProblemKind {
    #[serde(rename = "half_line")]
    #[value(name = "half_line", alias = "half-line")]
    HalfLine,
    #[serde(rename = "interval")]
    #[value(name = "interval")]
    Interval,
    #[serde(rename = "half_space_2d")]
    #[value(name = "half_space_2d")]
    HalfSpace2d,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryEntry {
    pub id: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledProfile {
    pub samples: Samples,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_hint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Registry(RegistryEntry),
    Sampled(SampledProfile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSignal {
    pub basis: String,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignalSpec {
    Registry(RegistryEntry),
    Basis(BasisSignal),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Manufactured {
    /// `u = e^{a²t - ax}` on the half line.
    Exp { a: f64 },
    /// `u = [e^{t∂²} e^{-x′²}] · e^{b²t - b x_N}` on the half space.
    HalfSpace { b: f64 },
}

/// Interval side of a dichotomy run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalArm {
    pub u0: ProfileSpec,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "L")]
    pub length: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Query {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Complex spectral points as `[re, im]`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lambda: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    /// `λ²` grid of the growth test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<ScanSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    /// Basis sizes.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularization: Option<Regularization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collocation_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manufactured: Option<Manufactured>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lambda_prime: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangential: Option<Tangential>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolving: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<IntervalArm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nt: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpecDocument {
    pub command: Command,
    pub problem: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<SignalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<SignalSpec>,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default)]
    pub contour: ContourConfig,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub query: Query,
}

impl ProblemSpecDocument {
    pub fn new(command: Command, problem: ProblemKind, horizon: f64) -> Self {
        Self {
            command,
            problem,
            u0: None,
            g: None,
            h: None,
            horizon,
            length: None,
            contour: ContourConfig::default(),
            output: OutputSpec::default(),
            query: Query::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::validation("SpecDocument", e.to_string()))
    }

    fn require<T>(field: &Option<T>, name: &str) -> Result<(), CliError> {
        match field {
            Some(_) => Ok(()),
            None => Err(CliError::validation("SpecDocument", format!("missing `{name}`"))),
        }
    }

    /// Fills every defaulted field so the echoed document is complete.
    /// Idempotent: a filled document is left unchanged.
    pub fn fill_defaults(&mut self) -> Result<(), CliError> {
        let d = Defaults::default();
        let q = &mut self.query;
        let log_scan = || ScanSpec { min: d.scan_min, max: d.scan_max, points: d.scan_points, spacing: Spacing::Log };
        let k_grid = || ScanSpec { min: 1.0, max: 40.0, points: 40, spacing: Spacing::Linear };
        let zero_entry = || RegistryEntry { id: "zero".into(), params: BTreeMap::new() };
        match self.command {
            Command::SolveHalfline => {
                expect_problem(self.command, self.problem, &[ProblemKind::HalfLine])?;
                self.u0.get_or_insert_with(|| ProfileSpec::Registry(zero_entry()));
                self.g.get_or_insert_with(|| SignalSpec::Registry(zero_entry()));
                q.t.get_or_insert(self.horizon);
                if q.x.is_empty() {
                    q.x = linspace(0.5, 5.0, 10);
                }
            }
            Command::SolveInterval => {
                expect_problem(self.command, self.problem, &[ProblemKind::Interval])?;
                let length = *self.length.get_or_insert(1.0);
                self.u0.get_or_insert_with(|| ProfileSpec::Registry(zero_entry()));
                self.h.get_or_insert_with(|| SignalSpec::Registry(zero_entry()));
                q.t.get_or_insert(self.horizon);
                if q.x.is_empty() {
                    q.x = (1..=19).map(|j| j as f64 * length / 20.0).collect();
                }
            }
            Command::CheckGr => {
                Self::require(&q.manufactured, "query.manufactured")?;
                match q.manufactured {
                    Some(Manufactured::Exp { .. }) => expect_problem(self.command, self.problem, &[ProblemKind::HalfLine])?,
                    _ => {
                        expect_problem(self.command, self.problem, &[ProblemKind::HalfSpace2d])?;
                        if q.lambda_prime.is_empty() {
                            q.lambda_prime = vec![-2.0, -1.0, 0.0, 1.0, 2.0];
                        }
                    }
                }
                q.t.get_or_insert(self.horizon);
                if q.lambda.is_empty() {
                    for re in [-3.0, -1.0, 0.0, 1.0, 3.0] {
                        for im in [0.0, -0.5, -1.0, -2.0] {
                            q.lambda.push([re, im]);
                        }
                    }
                }
            }
            Command::Certify => {
                expect_problem(self.command, self.problem, &[ProblemKind::HalfLine])?;
                Self::require(&self.u0, "u0")?;
                q.scan.get_or_insert_with(log_scan);
            }
            Command::GrowthTest => {
                Self::require(&self.g, "g")?;
                q.k_grid.get_or_insert_with(k_grid);
            }
            Command::Synthesize => {
                expect_problem(self.command, self.problem, &[ProblemKind::Interval])?;
                Self::require(&self.u0, "u0")?;
                self.length.get_or_insert(1.0);
                q.basis.get_or_insert_with(|| "legendre".into());
                if q.k.is_empty() {
                    q.k = vec![12];
                }
                q.regularization.get_or_insert(Regularization::default());
                q.collocation_points.get_or_insert(d.collocation_points);
            }
            Command::AttemptHalfline => {
                expect_problem(self.command, self.problem, &[ProblemKind::HalfLine])?;
                Self::require(&self.u0, "u0")?;
                if q.k.is_empty() {
                    q.k = vec![2, 4, 8, 16];
                }
                q.regularization.get_or_insert(Regularization::default());
            }
            Command::Dichotomy => {
                expect_problem(self.command, self.problem, &[ProblemKind::HalfLine])?;
                self.u0.get_or_insert_with(|| {
                    ProfileSpec::Registry(RegistryEntry { id: "exp_decay".into(), params: [("a".to_string(), 1.0)].into() })
                });
                q.interval.get_or_insert_with(|| IntervalArm {
                    u0: ProfileSpec::Registry(RegistryEntry { id: "sine_mode".into(), params: [("n".to_string(), 1.0)].into() }),
                    horizon: 0.5,
                    length: 1.0,
                });
                if q.k.is_empty() {
                    q.k = vec![2, 4, 8, 16];
                }
                q.regularization.get_or_insert(Regularization::default());
            }
            Command::HalfspaceCertify => {
                expect_problem(self.command, self.problem, &[ProblemKind::HalfSpace2d])?;
                Self::require(&self.u0, "u0")?;
                q.tangential.get_or_insert_with(Tangential::gaussian);
                if q.lambda_prime.is_empty() {
                    q.lambda_prime = vec![-2.0, -1.0, 0.0, 1.0, 2.0];
                }
                q.scan.get_or_insert_with(log_scan);
                if self.g.is_some() {
                    q.evolving.get_or_insert(false);
                    q.k_grid.get_or_insert_with(k_grid);
                }
            }
            Command::OracleCompare => {
                expect_problem(self.command, self.problem, &[ProblemKind::HalfLine, ProblemKind::Interval])?;
                self.u0.get_or_insert_with(|| ProfileSpec::Registry(zero_entry()));
                q.tol.get_or_insert(1e-3);
                if self.problem == ProblemKind::HalfLine {
                    self.g.get_or_insert_with(|| SignalSpec::Registry(zero_entry()));
                    if q.x.is_empty() {
                        q.x = vec![0.5, 1.0, 2.0, 3.0];
                    }
                    q.x_max.get_or_insert(40.0);
                    q.nx.get_or_insert(4000);
                    q.nt.get_or_insert(400);
                } else {
                    let length = *self.length.get_or_insert(1.0);
                    self.h.get_or_insert_with(|| SignalSpec::Registry(zero_entry()));
                    if q.x.is_empty() {
                        q.x = (1..=19).map(|j| j as f64 * length / 20.0).collect();
                    }
                    q.nx.get_or_insert(400);
                    q.nt.get_or_insert(400);
                    }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain {
        match self.problem {
            ProblemKind::Interval => Domain::Interval { length: self.length.unwrap_or(1.0) },
            _ => Domain::HalfLine,
        }
    }
}

impl ScanSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => logspace(self.min, self.max, self.points),
            Spacing::Linear => linspace(self.min, self.max, self.points),
        }
    }

    /// `min:max:points`, log-spaced unless `linear` is set.
    pub fn parse(text: &str, spacing: Spacing) -> Result<Self, CliError> {
        let bad = || CliError::validation("Argument", format!("expected min:max:points, got `{text}`"));
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(ScanSpec {
            min: parts[0].trim().parse().map_err(|_| bad())?,
            max: parts[1].trim().parse().map_err(|_| bad())?,
            points: parts[2].trim().parse().map_err(|_| bad())?,
            spacing,
        })
    }
}

fn expect_problem(command: Command, problem: ProblemKind, allowed: &[ProblemKind]) -> Result<(), CliError> {
    if allowed.contains(&problem) {
        Ok(())
    } else {
        Err(CliError::validation("SpecDocument", format!("{command:?} does not apply to problem {problem:?}")))
    }
}

/// Parameter a bare value binds to, as in `const:1` or `exp_decay:2`.
fn positional_key(id: &str) -> Option<&'static str> {
    match id {
        "exp_decay" | "poly_exp" => Some("a"),
        "indicator" => Some("b"),
        "sine_mode" => Some("n"),
        "const" => Some("value"),
        "exp" => Some("rate"),
        "sine" => Some("omega"),
        "gaussian" => Some("s"),
        "two_sided_exp" => Some("r"),
        _ => None,
    }
}

/// Parses `id`, `id:value` or `id:key=value,key=value`.
pub fn parse_entry(text: &str) -> Result<RegistryEntry, CliError> {
    let (id, rest) = match text.split_once(':') {
        Some((id, rest)) => (id.trim(), rest.trim()),
        None => (text.trim(), ""),
    };
    if id.is_empty() {
        return Err(CliError::validation("Argument", format!("empty registry id in `{text}`")));
    }
    let mut params = BTreeMap::new();
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = match item.split_once('=') {
            Some((k, v)) => (k.trim().to_string(), v.trim()),
            None => {
                let key = positional_key(id).ok_or_else(|| {
                    CliError::validation("Argument", format!("`{id}` takes named parameters (key=value), got `{item}`"))
                })?;
                if params.contains_key(key) {
                    return Err(CliError::validation("Argument", format!("`{id}` given `{key}` twice")));
                }
                (key.to_string(), item)
            }
        };
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::validation("Argument", format!("parameter `{key}` of `{id}` is not a number: `{value}`")))?;
        if params.insert(key.clone(), value).is_some() {
            return Err(CliError::validation("Argument", format!("`{id}` given `{key}` twice")));
        }
    }
    Ok(RegistryEntry { id: id.to_string(), params })
}

pub fn parse_profile(text: &str) -> Result<ProfileSpec, CliError> {
    parse_entry(text).map(ProfileSpec::Registry)
}

/// A registry signal, or `basis:c0,c1,...` for a basis expansion.
pub fn parse_signal(text: &str) -> Result<SignalSpec, CliError> {
    // Named parameters always mean a registry entry, so `sine:omega=3` is
    // the registry signal while `sine:1,0.5` is a sine-basis combination.
    if let Some((name, rest)) = text.split_once(':') {
        if !rest.contains('=') && Basis::from_name(name.trim(), 1).is_ok() {
            let coefficients = rest
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::validation("Argument", format!("basis coefficients must be numbers: `{rest}`")))?;
            return Ok(SignalSpec::Basis(BasisSignal { basis: name.trim().into(), coefficients }));
        }
    }
    parse_entry(text).map(SignalSpec::Registry)
}

pub fn parse_manufactured(text: &str) -> Result<Manufactured, CliError> {
    let e = parse_entry(text)?;
    let get = |k: &str| {
        e.params
            .get(k)
            .copied()
            .ok_or_else(|| CliError::validation("Argument", format!("manufactured `{}` requires `{k}`", e.id)))
    };
    let extra = |allowed: &str| e.params.keys().find(|k| k.as_str() != allowed).cloned();
    let check = |allowed: &str| match extra(allowed) {
        Some(k) => Err(CliError::validation("Argument", format!("manufactured `{}` has no parameter `{k}`", e.id))),
        None => Ok(()),
    };
    match e.id.as_str() {
        "exp" => check("a").and(Ok(Manufactured::Exp { a: get("a")? })),
        "half_space" | "halfspace" => check("b").and(Ok(Manufactured::HalfSpace { b: get("b")? })),
        other => Err(CliError::validation("UnknownEntry", format!("unknown manufactured family `{other}`"))),
    }
}

pub fn parse_tangential(text: &str) -> Result<Tangential, CliError> {
    let e = parse_entry(text)?;
    let mut obj = serde_json::Map::new();
    obj.insert("id".into(), e.id.clone().into());
    obj.insert("amp".into(), 1.0.into());
    for (k, v) in e.params {
        obj.insert(k, v.into());
    }
    let t: Tangential = serde_json::from_value(obj.into())
        .map_err(|err| CliError::validation("Argument", format!("tangential factor `{text}`: {err}")))?;
    t.validate()?;
    Ok(t)
}

/// `re,im` or a real number.
pub fn parse_complex(text: &str) -> Result<[f64; 2], CliError> {
    let bad = || CliError::validation("Argument", format!("expected re,im, got `{text}`"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok([re.parse().map_err(|_| bad())?, 0.0]),
        [re, im] => Ok([re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?]),
        _ => Err(bad()),
    }
}

impl ProfileSpec {
    pub fn build(&self, domain: Domain) -> Result<Profile, CliError> {
        Ok(match self {
            ProfileSpec::Registry(e) => Profile::from_registry(domain, &e.id, &e.params)?,
            ProfileSpec::Sampled(s) => Profile::samples(domain, s.samples.clone(), s.decay_hint)?,
        })
    }
}

impl SignalSpec {
    pub fn build(&self, horizon: f64) -> Result<TimeSignal, CliError> {
        Ok(match self {
            SignalSpec::Registry(e) => TimeSignal::from_registry(horizon, &e.id, &e.params)?,
            SignalSpec::Basis(b) => {
                TimeSignal::from_basis(horizon, Basis::from_name(&b.basis, b.coefficients.len())?, b.coefficients.clone())?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_names_and_registry_signals_are_told_apart() {
        assert!(matches!(parse_signal("sine:omega=3").unwrap(), SignalSpec::Registry(e) if e.params["omega"] == 3.0));
        assert!(matches!(parse_signal("sine:1,0.5").unwrap(), SignalSpec::Basis(b) if b.coefficients == [1.0, 0.5]));
        let t = parse_tangential("two_sided_exp:r=2").unwrap();
        assert_eq!(t.transform(0.0), 1.0);
    }

    #[test]
    fn entries_with_named_and_positional_values() {
        let e = parse_entry("exp_decay:a=1").unwrap();
        assert_eq!(e.id, "exp_decay");
        assert_eq!(e.params["a"], 1.0);
        assert_eq!(parse_entry("const:1").unwrap().params["value"], 1.0);
        assert!(parse_entry("zero").unwrap().params.is_empty());
        assert!(parse_entry("gaussian_bump:1").is_err());
        assert!(parse_entry("exp_decay:a=x").is_err());
        assert!(parse_entry("exp_decay:a=1,a=2").is_err());
    }

    #[test]
    fn basis_signals() {
        match parse_signal("legendre:1,0.5").unwrap() {
            SignalSpec::Basis(b) => assert_eq!(b.coefficients, vec![1.0, 0.5]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"command":"certify","problem":"half_line","T":1,"u0":{"id":"zero"},"extra":1}"#;
        assert!(ProblemSpecDocument::from_json(text).is_err());
        let text = r#"{"command":"certify","problem":"half_line","T":1,"u0":{"id":"zero"},"contour":{"thetta":0.3}}"#;
        assert!(ProblemSpecDocument::from_json(text).is_err());
    }

    #[test]
    fn filling_is_idempotent() {
        let mut doc = ProblemSpecDocument::new(Command::Synthesize, ProblemKind::Interval, 0.5);
        doc.u0 = Some(parse_profile("sine_mode:n=1").unwrap());
        doc.fill_defaults().unwrap();
        let once = doc.clone();
        doc.fill_defaults().unwrap();
        assert_eq!(once, doc);
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(ProblemSpecDocument::from_json(&text).unwrap(), doc);
    }
}
