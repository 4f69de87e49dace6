use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use toml::{Table as TomlTable, Value};

use super::CliError;
use crate::cavity::{ModelFamily, RecoveryMode};
use crate::ising::Decoder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    IsingMemory,
    CavitySteady,
    GapScan,
    ToyFidelity,
    MeanfieldPhase,
    OracleCheck,
    ToomDemo,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::IsingMemory,
        Kind::CavitySteady,
        Kind::GapScan,
        Kind::ToyFidelity,
        Kind::MeanfieldPhase,
        Kind::OracleCheck,
        Kind::ToomDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::IsingMemory => "ising-memory",
            Kind::CavitySteady => "cavity-steady",
            Kind::GapScan => "gap-scan",
            Kind::ToyFidelity => "toy-fidelity",
            Kind::MeanfieldPhase => "meanfield-phase",
            Kind::OracleCheck => "oracle-check",
            Kind::ToomDemo => "toom-demo",
        }
    }

    /// Numeric parameters that `sweep` may vary.
    pub fn sweepable(self) -> &'static [&'static str] {
        match self {
            Kind::IsingMemory => &["M", "beta", "kappa", "T", "n_traj"],
            Kind::CavitySteady => &["N", "kappa1", "kappa2"],
            Kind::GapScan => &["lam", "kappa1", "kappa2"],
            Kind::ToyFidelity => &["N", "kappa1", "kappad", "kappann", "kappa2", "T_noisy", "T_recovery"],
            Kind::MeanfieldPhase => &["kappann", "lam", "kappa2"],
            Kind::OracleCheck => &["M", "beta", "kappa"],
            Kind::ToomDemo => &["M", "island", "flip_prob", "steps"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown kind '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingMemoryParams {
    #[serde(rename = "M")]
    pub m: usize,
    pub beta: f64,
    pub kappa: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub n_traj: usize,
    pub decoder: Decoder,
    pub initial_bit: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CavitySteadyParams {
    pub model: ModelFamily,
    #[serde(rename = "N")]
    pub n: Vec<f64>,
    pub kappa1: Vec<f64>,
    pub kappa2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapScanParams {
    pub model: ModelFamily,
    pub lam: Vec<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToyFidelityParams {
    #[serde(rename = "N")]
    pub n: Vec<f64>,
    pub kappa1: f64,
    pub kappad: f64,
    pub kappann: f64,
    pub kappa2: f64,
    #[serde(rename = "T_noisy")]
    pub t_noisy: f64,
    #[serde(rename = "T_recovery")]
    pub t_recovery: f64,
    pub recovery: RecoveryMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanfieldPhaseParams {
    pub kappa1_min: f64,
    pub kappa1_max: f64,
    pub kappa1_steps: usize,
    pub kappad_min: f64,
    pub kappad_max: f64,
    pub kappad_steps: usize,
    /// Scan only κ_d = κ₁.
    pub diagonal: bool,
    pub kappann: f64,
    pub lam: f64,
    pub kappa2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheckParams {
    #[serde(rename = "M")]
    pub m: usize,
    pub beta: Vec<f64>,
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToomDemoParams {
    #[serde(rename = "M")]
    pub m: usize,
    /// Side of the initial square error island.
    pub island: usize,
    pub flip_prob: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    IsingMemory(IsingMemoryParams),
    CavitySteady(CavitySteadyParams),
    GapScan(GapScanParams),
    ToyFidelity(ToyFidelityParams),
    MeanfieldPhase(MeanfieldPhaseParams),
    OracleCheck(OracleCheckParams),
    ToomDemo(ToomDemoParams),
}

/// A validated run specification.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub params: Params,
    /// The `[parameters]` table as written, used to derive sweep variants.
    pub raw_parameters: TomlTable,
}

/// Values given on the command line that replace those in the document.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct SpecEcho<'a> {
    kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    workers: Option<usize>,
    parameters: &'a Params,
}

impl ExperimentSpec {
    pub fn is_stochastic(&self) -> bool {
        match &self.params {
            Params::IsingMemory(_) => true,
            Params::ToomDemo(p) => p.flip_prob > 0.0,
            _ => false,
        }
    }

    /// The resolved spec (defaults filled in) as a spec document.
    pub fn to_toml(&self) -> String {
        let echo = SpecEcho { kind: self.kind, seed: self.seed, workers: self.workers, parameters: &self.params };
        toml::to_string(&echo).expect("spec serializes")
    }

    /// Copy with one numeric parameter replaced.
    pub fn with_parameter(&self, key: &str, value: f64) -> Result<Self, CliError> {
        if !self.kind.sweepable().contains(&key) {
            return Err(CliError::Validation(vec![format!(
                "'{key}' is not a sweepable parameter of {} (choose from {})",
                self.kind,
                self.kind.sweepable().join(", ")
            )]));
        }
        let mut raw = self.raw_parameters.clone();
        let v = if value.fract() == 0.0 && value.abs() < 9e15 {
            Value::Integer(value as i64)
        } else {
            Value::Float(value)
        };
        raw.insert(key.to_string(), v);
        let params = parse_params(self.kind, &raw)?;
        Ok(Self { params, raw_parameters: raw, ..self.clone() })
    }
}

/// Collects typed parameter values and every problem found on the way.
struct Fields<'a> {
    table: &'a TomlTable,
    used: BTreeSet<String>,
    errors: Vec<String>,
}

impl<'a> Fields<'a> {
    fn new(table: &'a TomlTable) -> Self {
        Self { table, used: BTreeSet::new(), errors: Vec::new() }
    }

    fn take(&mut self, key: &str) -> Option<&'a Value> {
        self.used.insert(key.to_string());
        self.table.get(key)
    }

    fn missing(&mut self, key: &str) {
        self.errors.push(format!("parameters.{key}: required"));
    }

    fn number(v: &Value) -> Option<f64> {
        match v {
            Value::Integer(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            _ => None,
        }
    }

    fn f64(&mut self, key: &str, default: Option<f64>) -> f64 {
        match (self.take(key), default) {
            (Some(v), _) => Self::number(v).unwrap_or_else(|| {
                self.errors.push(format!("parameters.{key}: expected a number"));
                0.0
            }),
            (None, Some(d)) => d,
            (None, None) => {
                self.missing(key);
                0.0
            }
        }
    }

    fn f64_list(&mut self, key: &str, default: Option<Vec<f64>>) -> Vec<f64> {
        match (self.take(key), default) {
            (Some(Value::Array(items)), _) => {
                let vals: Option<Vec<f64>> = items.iter().map(Self::number).collect();
                match vals {
                    Some(v) if !v.is_empty() => v,
                    Some(_) => {
                        self.errors.push(format!("parameters.{key}: list is empty"));
                        Vec::new()
                    }
                    None => {
                        self.errors.push(format!("parameters.{key}: expected numbers"));
                        Vec::new()
                    }
                }
            }
            (Some(v), _) => match Self::number(v) {
                Some(x) => vec![x],
                None => {
                    self.errors.push(format!("parameters.{key}: expected a number or a list of numbers"));
                    Vec::new()
                }
            },
            (None, Some(d)) => d,
            (None, None) => {
                self.missing(key);
                Vec::new()
            }
        }
    }

    fn usize(&mut self, key: &str, default: Option<usize>) -> usize {
        match (self.take(key), default) {
            (Some(Value::Integer(i)), _) if *i >= 0 => *i as usize,
            (Some(_), _) => {
                self.errors.push(format!("parameters.{key}: expected a nonnegative integer"));
                0
            }
            (None, Some(d)) => d,
            (None, None) => {
                self.missing(key);
                0
            }
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> bool {
        match self.take(key) {
            Some(Value::Boolean(b)) => *b,
            Some(_) => {
                self.errors.push(format!("parameters.{key}: expected true or false"));
                default
            }
            None => default,
        }
    }

    fn choice<T: FromStr<Err = String>>(&mut self, key: &str, default: Option<T>) -> Option<T> {
        match (self.take(key), default) {
            (Some(Value::String(s)), _) => match s.parse() {
                Ok(v) => Some(v),
                Err(e) => {
                    self.errors.push(format!("parameters.{key}: {e}"));
                    None
                }
            },
            (Some(_), _) => {
                self.errors.push(format!("parameters.{key}: expected a string"));
                None
            }
            (None, Some(d)) => Some(d),
            (None, None) => {
                self.missing(key);
                None
            }
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.errors.push(msg());
        }
    }

    fn nonneg(&mut self, key: &str, v: f64) {
        self.check(v >= 0.0 && v.is_finite(), || format!("parameters.{key}: must be finite and nonnegative (got {v})"));
    }

    fn positive(&mut self, key: &str, v: f64) {
        self.check(v > 0.0 && v.is_finite(), || format!("parameters.{key}: must be positive (got {v})"));
    }

    fn finish<T>(mut self, value: Option<T>) -> Result<T, CliError> {
        for key in self.table.keys() {
            if !self.used.contains(key) {
                self.errors.push(format!("parameters.{key}: unknown key"));
            }
        }
        match value {
            Some(v) if self.errors.is_empty() => Ok(v),
            _ => Err(CliError::Validation(self.errors)),
        }
    }
}

fn parse_params(kind: Kind, t: &TomlTable) -> Result<Params, CliError> {
    let mut f = Fields::new(t);
    let params = match kind {
        Kind::IsingMemory => {
            let m = f.usize("M", None);
            let beta = f.f64("beta", None);
            let kappa = f.f64("kappa", Some(1.0));
            let t = f.f64("T", Some(800.0));
            let n_traj = f.usize("n_traj", None);
            let decoder = f.choice("decoder", Some(Decoder::Majority));
            let initial_bit = f.usize("initial_bit", Some(0));
            f.check(m >= 2, || format!("parameters.M: must be at least 2 (got {m})"));
            f.check(beta > 0.0, || format!("parameters.beta: must be positive (got {beta})"));
            f.positive("kappa", kappa);
            f.nonneg("T", t);
            f.check(n_traj >= 1, || "parameters.n_traj: must be at least 1".into());
            f.check(initial_bit <= 1, || "parameters.initial_bit: must be 0 or 1".into());
            decoder.map(|decoder| {
                Params::IsingMemory(IsingMemoryParams { m, beta, kappa, t, n_traj, decoder, initial_bit: initial_bit as u8 })
            })
        }
        Kind::CavitySteady => {
            let model = f.choice("model", None);
            let n = f.f64_list("N", None);
            let kappa1 = f.f64_list("kappa1", None);
            let kappa2 = f.f64("kappa2", Some(1.0));
            for &x in &n {
                f.positive("N", x);
            }
            for &x in &kappa1 {
                f.nonneg("kappa1", x);
            }
            f.positive("kappa2", kappa2);
            model.map(|model| Params::CavitySteady(CavitySteadyParams { model, n, kappa1, kappa2 }))
        }
        Kind::GapScan => {
            let model = f.choice("model", None);
            let lam = f.f64_list("lam", None);
            let kappa1 = f.f64("kappa1", None);
            let kappa2 = f.f64("kappa2", Some(1.0));
            for &x in &lam {
                f.positive("lam", x);
            }
            f.nonneg("kappa1", kappa1);
            f.positive("kappa2", kappa2);
            model.map(|model| Params::GapScan(GapScanParams { model, lam, kappa1, kappa2 }))
        }
        Kind::ToyFidelity => {
            let n = f.f64_list("N", None);
            let kappa1 = f.f64("kappa1", None);
            let kappad = f.f64("kappad", None);
            let kappann = f.f64("kappann", None);
            let kappa2 = f.f64("kappa2", Some(1.0));
            let t_noisy = f.f64("T_noisy", Some(15.0));
            let t_recovery = f.f64("T_recovery", Some(15.0));
            let recovery = f.choice("recovery", Some(RecoveryMode::KeepKnn));
            for &x in &n {
                f.positive("N", x);
            }
            f.nonneg("kappa1", kappa1);
            f.nonneg("kappad", kappad);
            f.nonneg("kappann", kappann);
            f.positive("kappa2", kappa2);
            f.nonneg("T_noisy", t_noisy);
            f.nonneg("T_recovery", t_recovery);
            recovery.map(|recovery| {
                Params::ToyFidelity(ToyFidelityParams { n, kappa1, kappad, kappann, kappa2, t_noisy, t_recovery, recovery })
            })
        }
        Kind::MeanfieldPhase => {
            let diagonal = f.bool("diagonal", false);
            let kappa1_min = f.f64("kappa1_min", None);
            let kappa1_max = f.f64("kappa1_max", None);
            let kappa1_steps = f.usize("kappa1_steps", None);
            let (kappad_min, kappad_max, kappad_steps) = if diagonal {
                let range = (
                    f.f64("kappad_min", Some(kappa1_min)),
                    f.f64("kappad_max", Some(kappa1_max)),
                    f.usize("kappad_steps", Some(kappa1_steps)),
                );
                f.check(range == (kappa1_min, kappa1_max, kappa1_steps), || {
                    "parameters.kappad_*: a diagonal scan needs the kappad range equal to the kappa1 range".into()
                });
                range
            } else {
                (f.f64("kappad_min", None), f.f64("kappad_max", None), f.usize("kappad_steps", None))
            };
            let kappann = f.f64("kappann", Some(0.3));
            let lam = f.f64("lam", Some(1.0));
            let kappa2 = f.f64("kappa2", Some(1.0));
            f.nonneg("kappa1_min", kappa1_min);
            f.nonneg("kappad_min", kappad_min);
            f.check(kappa1_max >= kappa1_min, || "parameters.kappa1_max: must not be below kappa1_min".into());
            f.check(kappad_max >= kappad_min, || "parameters.kappad_max: must not be below kappad_min".into());
            f.check(kappa1_steps >= 1, || "parameters.kappa1_steps: must be at least 1".into());
            f.check(kappad_steps >= 1, || "parameters.kappad_steps: must be at least 1".into());
            f.nonneg("kappann", kappann);
            f.nonneg("lam", lam);
            f.positive("kappa2", kappa2);
            Some(Params::MeanfieldPhase(MeanfieldPhaseParams {
                kappa1_min,
                kappa1_max,
                kappa1_steps,
                kappad_min,
                kappad_max,
                kappad_steps,
                diagonal,
                kappann,
                lam,
                kappa2,
            }))
        }
        Kind::OracleCheck => {
            let m = f.usize("M", Some(3));
            let beta = f.f64_list("beta", Some(vec![0.1, 0.3, 0.6]));
            let kappa = f.f64("kappa", Some(1.0));
            f.check((2..=3).contains(&m), || format!("parameters.M: exact enumeration supports 2 or 3 (got {m})"));
            for &b in &beta {
                f.positive("beta", b);
            }
            f.positive("kappa", kappa);
            Some(Params::OracleCheck(OracleCheckParams { m, beta, kappa }))
        }
        Kind::ToomDemo => {
            let m = f.usize("M", Some(8));
            let island = f.usize("island", Some(2));
            let flip_prob = f.f64("flip_prob", Some(0.0));
            let steps = f.usize("steps", Some(10));
            f.check(m >= 2, || format!("parameters.M: must be at least 2 (got {m})"));
            f.check(island <= m, || "parameters.island: must not exceed M".into());
            f.check((0.0..=1.0).contains(&flip_prob), || format!("parameters.flip_prob: must lie in [0, 1] (got {flip_prob})"));
            Some(Params::ToomDemo(ToomDemoParams { m, island, flip_prob, steps }))
        }
    };
    f.finish(params)
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

/// Parse and validate a spec document with no command-line overrides.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec, CliError> {
    parse_spec_with(text, &Overrides::default())
}

pub fn parse_spec_with(text: &str, overrides: &Overrides) -> Result<ExperimentSpec, CliError> {
    let doc: TomlTable = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let kind: Kind = match doc.get("kind") {
        Some(Value::String(s)) => s.parse().map_err(parse_err)?,
        Some(_) => return Err(parse_err("'kind' must be a string")),
        None => return Err(parse_err("missing 'kind'")),
    };
    let mut errors = Vec::new();
    for key in doc.keys() {
        if !["kind", "seed", "workers", "output", "parameters"].contains(&key.as_str()) {
            errors.push(format!("{key}: unknown key"));
        }
    }
    let seed = match doc.get("seed") {
        None => None,
        Some(Value::Integer(i)) if *i >= 0 => Some(*i as u64),
        Some(Value::String(s)) => match s.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                errors.push(format!("seed: '{s}' is not an unsigned 64-bit integer"));
                None
            }
        },
        Some(_) => {
            errors.push("seed: expected a nonnegative integer".into());
            None
        }
    };
    let workers = match doc.get("workers") {
        None => None,
        Some(Value::Integer(i)) if *i >= 1 => Some(*i as usize),
        Some(_) => {
            errors.push("workers: expected a positive integer".into());
            None
        }
    };
    let output = match doc.get("output") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => {
            errors.push("output: expected a path string".into());
            None
        }
    };
    let raw = match doc.get("parameters") {
        Some(Value::Table(t)) => t.clone(),
        Some(_) => return Err(parse_err("'parameters' must be a table")),
        None => TomlTable::new(),
    };
    let params = match parse_params(kind, &raw) {
        Ok(p) => Some(p),
        Err(CliError::Validation(mut e)) => {
            errors.append(&mut e);
            None
        }
        Err(e) => return Err(e),
    };
    let spec = ExperimentSpec {
        kind,
        seed: overrides.seed.or(seed),
        workers: overrides.workers.or(workers),
        output: overrides.output.clone().or(output),
        params: match params {
            Some(p) => p,
            None => return Err(CliError::Validation(errors)),
        },
        raw_parameters: raw,
    };
    if spec.is_stochastic() && spec.seed.is_none() {
        errors.push("seed: required for this kind".into());
    }
    if errors.is_empty() {
        Ok(spec)
    } else {
        Err(CliError::Validation(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
kind = "ising-memory"
seed = 7

[parameters]
M = 5
beta = 0.6
kappa = 1.0
T = 800
n_traj = 1000
"#;

    #[test]
    fn minimal_ising_spec() {
        let s = parse_spec(MINIMAL).unwrap();
        assert_eq!(s.kind, Kind::IsingMemory);
        assert_eq!(s.seed, Some(7));
        match &s.params {
            Params::IsingMemory(p) => {
                assert_eq!((p.m, p.n_traj, p.t), (5, 1000, 800.0));
                assert_eq!(p.decoder, Decoder::Majority);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn resolved_spec_round_trips() {
        let s = parse_spec(MINIMAL).unwrap();
        let again = parse_spec(&s.to_toml()).unwrap();
        assert_eq!(again.params, s.params);
        assert_eq!(again.seed, s.seed);
    }

    #[test]
    fn every_violation_is_reported() {
        let text = r#"
kind = "toy-fidelity"
[parameters]
N = [2, 4]
kappa1 = -0.1
kappad = 0.1
kappann = "x"
colour = 3
"#;
        match parse_spec(text) {
            Err(CliError::Validation(errs)) => {
                let joined = errs.join("\n");
                assert!(joined.contains("kappa1"), "{joined}");
                assert!(joined.contains("kappann"));
                assert!(joined.contains("colour: unknown key"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_kind_and_bad_syntax_are_parse_errors() {
        assert!(matches!(parse_spec("kind = \"teleport\""), Err(CliError::Parse(_))));
        assert!(matches!(parse_spec("kind = [1"), Err(CliError::Parse(_))));
    }

    #[test]
    fn stochastic_kinds_need_a_seed() {
        let text = MINIMAL.replace("seed = 7", "");
        assert!(matches!(parse_spec(&text), Err(CliError::Validation(_))));
        let s = parse_spec_with(&text, &Overrides { seed: Some(3), ..Default::default() }).unwrap();
        assert_eq!(s.seed, Some(3));
    }

    #[test]
    fn sweep_variant() {
        let s = parse_spec(MINIMAL).unwrap();
        let v = s.with_parameter("M", 9.0).unwrap();
        assert!(matches!(v.params, Params::IsingMemory(IsingMemoryParams { m: 9, .. })));
        assert!(s.with_parameter("M", 9.5).is_err());
        assert!(s.with_parameter("decoder", 1.0).is_err());
    }
}
