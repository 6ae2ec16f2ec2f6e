//! Scenario files: flat `key = value` lines, `#` comments, dotted keys.
//!
//! ```text
//! scenario = dispersion-compare
//! params.temperature = 2   # everything else keeps its default
//! time.points = 60
//! ```
//!
//! Parsing is strict. Every problem is collected with its line number:
//! malformed lines, unknown keys, duplicates, out-of-range values, missing
//! required keys and parameter combinations a scenario cannot run.

use std::path::{Path, PathBuf};

use qbrown_core::{make_params, PhysicalParams, RawParams};

use crate::error::{ConfigIssue, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    FreeZeroT,
    FreeHighFriction,
    VacuumSpreading,
    Harmonic,
    ClassicalTelegraph,
    QuantumZeroTPde,
    SemiclassicalPde,
    Equilibrium,
    DispersionCompare,
    Acceptance,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::FreeZeroT,
        Scenario::FreeHighFriction,
        Scenario::VacuumSpreading,
        Scenario::Harmonic,
        Scenario::ClassicalTelegraph,
        Scenario::QuantumZeroTPde,
        Scenario::SemiclassicalPde,
        Scenario::Equilibrium,
        Scenario::DispersionCompare,
        Scenario::Acceptance,
    ];

    const NAMES: [&'static str; 10] = [
        "free-zero-T",
        "free-high-friction",
        "vacuum-spreading",
        "harmonic",
        "classical-telegraph",
        "quantum-zero-T-pde",
        "semiclassical-pde",
        "equilibrium",
        "dispersion-compare",
        "acceptance",
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::NAMES.iter().position(|n| *n == name).map(|i| Self::ALL[i])
    }

    pub fn is_pde(self) -> bool {
        matches!(
            self,
            Scenario::ClassicalTelegraph | Scenario::QuantumZeroTPde | Scenario::SemiclassicalPde
        )
    }
}

/// Labels accepted by `compare.models`.
pub const COMPARE_MODELS: [&str; 9] = [
    "einstein",
    "pure_quantum",
    "superposition",
    "lambert_exact",
    "coth_interpolation",
    "semiclassical_log",
    "elementary_log",
    "overdamped_bounded",
    "overdamped_full",
];

#[derive(Debug, Clone, Copy)]
enum Rule {
    Positive,
    NonNegative,
    Finite,
    /// (0, 1]
    Fraction,
    Count(usize),
    Choice(&'static [&'static str]),
    List(&'static [&'static str]),
    Flag,
    Text,
}

#[derive(Debug, Clone, Copy)]
enum Fallback {
    Required,
    Optional,
    Value(&'static str),
}

#[derive(Debug, Clone, Copy)]
struct KeyDef {
    key: &'static str,
    rule: Rule,
    fallback: Fallback,
}

const fn def(key: &'static str, rule: Rule, default: &'static str) -> KeyDef {
    KeyDef {
        key,
        rule,
        fallback: Fallback::Value(default),
    }
}

const fn optional(key: &'static str, rule: Rule) -> KeyDef {
    KeyDef {
        key,
        rule,
        fallback: Fallback::Optional,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Count(usize),
    Word(String),
    Words(Vec<String>),
    Flag(bool),
    Text(String),
}

/// A resolved key: its parsed value, the text it came from and the line,
/// `None` when the default was used.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub key: &'static str,
    pub value: Value,
    pub text: String,
    pub line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub params: PhysicalParams,
    /// Reserved; every method is deterministic.
    pub seed: u64,
    pub output_dir: PathBuf,
    settings: Vec<Setting>,
}

impl ScenarioConfig {
    pub fn get(&self, key: &str) -> Option<&Setting> {
        self.settings.iter().find(|s| s.key == key)
    }

    /// Every key of the scenario in schema order, defaults included.
    pub fn settings(&self) -> &[Setting] {
        &self.settings
    }

    fn value(&self, key: &str) -> &Value {
        &self
            .get(key)
            .unwrap_or_else(|| panic!("`{key}` is not set for {}", self.scenario.name()))
            .value
    }

    pub fn number(&self, key: &str) -> f64 {
        self.optional_number(key)
            .unwrap_or_else(|| panic!("`{key}` is not a number for {}", self.scenario.name()))
    }

    pub fn optional_number(&self, key: &str) -> Option<f64> {
        match self.get(key).map(|s| &s.value) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn count(&self, key: &str) -> usize {
        match self.value(key) {
            Value::Count(n) => *n,
            v => panic!("`{key}` is not a count: {v:?}"),
        }
    }

    pub fn optional_count(&self, key: &str) -> Option<usize> {
        self.get(key).map(|_| self.count(key))
    }

    pub fn word(&self, key: &str) -> &str {
        match self.value(key) {
            Value::Word(w) => w,
            v => panic!("`{key}` is not a choice: {v:?}"),
        }
    }

    pub fn words(&self, key: &str) -> Vec<&str> {
        match self.value(key) {
            Value::Words(w) => w.iter().map(String::as_str).collect(),
            v => panic!("`{key}` is not a list: {v:?}"),
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        match self.value(key) {
            Value::Flag(b) => *b,
            v => panic!("`{key}` is not a flag: {v:?}"),
        }
    }

    /// Replaces `output.dir`, as `--out` does.
    pub fn set_output_dir(&mut self, dir: impl Into<PathBuf>) {
        let dir = dir.into();
        if let Some(s) = self.settings.iter_mut().find(|s| s.key == "output.dir") {
            s.text = dir.display().to_string();
            s.value = Value::Text(s.text.clone());
            s.line = None;
        }
        self.output_dir = dir;
    }
}

const SCHEMES: &[&str] = &["trapezoid", "simpson"];

fn params_schema(friction: &'static str, temperature: &'static str, omega0: &'static str) -> Vec<KeyDef> {
    vec![
        def("params.hbar", Rule::Positive, "1"),
        def("params.k_b", Rule::Positive, "1"),
        def("params.mass", Rule::Positive, "1"),
        def("params.friction", Rule::NonNegative, friction),
        def("params.temperature", Rule::NonNegative, temperature),
        def("params.omega0", Rule::NonNegative, omega0),
        def("params.force", Rule::Finite, "0"),
    ]
}

fn ode_schema() -> Vec<KeyDef> {
    vec![
        def("ode.rel_tol", Rule::Positive, "1e-10"),
        def("ode.abs_tol", Rule::Positive, "1e-12"),
        def("ode.max_steps", Rule::Count(1), "2000000"),
    ]
}

fn picard_schema() -> Vec<KeyDef> {
    vec![
        def("picard.theta", Rule::Fraction, "0.7"),
        def("picard.tol", Rule::Positive, "1e-8"),
        def("picard.max_iter", Rule::Count(1), "200"),
        def("picard.scheme", Rule::Choice(SCHEMES), "simpson"),
        def(
            "picard.convention",
            Rule::Choice(&["outer-unknown", "explicit-substitution"]),
            "outer-unknown",
        ),
    ]
}

fn packet_schema(sigma0: KeyDef) -> Vec<KeyDef> {
    vec![
        sigma0,
        def("init.sigma_rate", Rule::Finite, "0"),
        def("init.mu", Rule::Finite, "0"),
        def("init.mu_rate", Rule::Finite, "0"),
        def("time.t_final", Rule::Positive, "10"),
        def("time.points", Rule::Count(2), "101"),
    ]
}

fn schema(scenario: Scenario) -> Vec<KeyDef> {
    let mut keys = vec![
        KeyDef {
            key: "scenario",
            rule: Rule::Choice(&Scenario::NAMES),
            fallback: Fallback::Required,
        },
        def("seed", Rule::Count(0), "0"),
        def("output.dir", Rule::Text, "qbrown-out"),
    ];
    match scenario {
        Scenario::FreeZeroT => {
            keys.extend(params_schema("1", "0", "0"));
            keys.extend(packet_schema(def("init.sigma0", Rule::Positive, "1")));
            keys.extend(ode_schema());
        }
        Scenario::VacuumSpreading => {
            keys.extend(params_schema("0", "0", "0"));
            keys.extend(packet_schema(KeyDef {
                key: "init.sigma0",
                rule: Rule::Positive,
                fallback: Fallback::Required,
            }));
            keys.extend(ode_schema());
        }
        Scenario::FreeHighFriction => {
            keys.extend(params_schema("1", "1", "0"));
            keys.extend([
                def("time.t_min_tc", Rule::Positive, "1e-6"),
                def("time.t_max_tc", Rule::Positive, "100"),
                def("time.per_decade", Rule::Count(1), "20"),
            ]);
            keys.extend(picard_schema());
            keys.extend(ode_schema());
        }
        Scenario::DispersionCompare => {
            keys.extend(params_schema("1", "1", "0"));
            keys.extend([
                def("time.t_min_tc", Rule::Positive, "1e-3"),
                def("time.t_max_tc", Rule::Positive, "1e3"),
                def("time.points", Rule::Count(2), "60"),
                def(
                    "compare.models",
                    Rule::List(&COMPARE_MODELS),
                    "einstein,pure_quantum,superposition,lambert_exact,coth_interpolation,semiclassical_log,elementary_log,overdamped_bounded,overdamped_full",
                ),
            ]);
            keys.extend(picard_schema());
        }
        Scenario::Harmonic => {
            keys.extend(params_schema("1", "0.5", "1"));
            keys.extend([
                def("init.sigma2", Rule::Positive, "1"),
                def("init.sigma2_rate", Rule::Finite, "0"),
                def("init.mu", Rule::Finite, "0"),
                def("init.mu_rate", Rule::Finite, "0"),
                def("time.t_final", Rule::Positive, "20"),
                def("time.points", Rule::Count(2), "201"),
                def("beta.nodes", Rule::Count(3), "65"),
                def("beta.scheme", Rule::Choice(SCHEMES), "simpson"),
            ]);
            keys.extend(ode_schema());
        }
        Scenario::ClassicalTelegraph | Scenario::QuantumZeroTPde | Scenario::SemiclassicalPde => {
            let (temperature, model) = match scenario {
                Scenario::ClassicalTelegraph => ("1", "telegraph"),
                Scenario::QuantumZeroTPde => ("0", "smoluchowski"),
                _ => ("1", "smoluchowski"),
            };
            keys.extend(params_schema("1", temperature, "0"));
            keys.extend([
                def("pde.model", Rule::Choice(&["telegraph", "smoluchowski"]), model),
                def(
                    "pde.potential",
                    Rule::Choice(&["free", "linear", "harmonic", "quartic"]),
                    "free",
                ),
                optional("pde.k4", Rule::Positive),
                def("pde.x_min", Rule::Finite, "-10"),
                def("pde.x_max", Rule::Finite, "10"),
                def("pde.n", Rule::Count(3), "401"),
                def("pde.t_final", Rule::NonNegative, "5"),
                optional("pde.dt", Rule::Positive),
                def("pde.record_every", Rule::Count(1), "10"),
                def("pde.boundary", Rule::Choice(&["reflecting", "periodic"]), "reflecting"),
                def("init.mu", Rule::Finite, "0"),
                def("init.sigma2", Rule::Positive, "0.25"),
            ]);
            if scenario == Scenario::SemiclassicalPde {
                keys.push(def(
                    "pde.flux",
                    Rule::Choice(&["effective-potential", "position-dependent"]),
                    "effective-potential",
                ));
            }
        }
        Scenario::Equilibrium => {
            keys.extend(params_schema("1", "0.5", "1"));
            keys.extend([
                def("equilibrium.potential", Rule::Choice(&["harmonic", "quartic"]), "harmonic"),
                optional("equilibrium.k4", Rule::Positive),
                def("grid.half_width", Rule::Positive, "8"),
                def("grid.n", Rule::Count(16), "321"),
                def("imaginary.steps", Rule::Count(16), "512"),
                def("imaginary.initial", Rule::Choice(&["point-basis", "uniform"]), "point-basis"),
                optional("eigen.states", Rule::Count(1)),
            ]);
        }
        Scenario::Acceptance => {
            keys.push(def("acceptance.quick", Rule::Flag, "false"));
        }
    }
    keys
}

fn parse_value(rule: Rule, text: &str) -> std::result::Result<Value, String> {
    let number = || {
        text.parse::<f64>()
            .map_err(|_| format!("expected a number, got `{text}`"))
            .and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("must be finite, got {text}")) })
    };
    match rule {
        Rule::Finite => number().map(Value::Number),
        Rule::Positive => number().and_then(|v| {
            if v > 0.0 {
                Ok(Value::Number(v))
            } else {
                Err(format!("must be positive, got {text}"))
            }
        }),
        Rule::NonNegative => number().and_then(|v| {
            if v >= 0.0 {
                Ok(Value::Number(v))
            } else {
                Err(format!("must be non-negative, got {text}"))
            }
        }),
        Rule::Fraction => number().and_then(|v| {
            if v > 0.0 && v <= 1.0 {
                Ok(Value::Number(v))
            } else {
                Err(format!("must lie in (0, 1], got {text}"))
            }
        }),
        Rule::Count(min) => match text.parse::<usize>() {
            Ok(n) if n >= min => Ok(Value::Count(n)),
            Ok(_) => Err(format!("must be at least {min}, got {text}")),
            Err(_) => Err(format!("expected a whole number, got `{text}`")),
        },
        Rule::Choice(options) => {
            if options.contains(&text) {
                Ok(Value::Word(text.to_string()))
            } else {
                Err(format!("expected one of {}, got `{text}`", options.join(", ")))
            }
        }
        Rule::List(options) => {
            let mut items: Vec<String> = Vec::new();
            for item in text.split(',').map(str::trim) {
                if !options.contains(&item) {
                    return Err(format!("unknown entry `{item}`; expected any of {}", options.join(", ")));
                }
                if items.iter().any(|i| i == item) {
                    return Err(format!("`{item}` listed twice"));
                }
                items.push(item.to_string());
            }
            Ok(Value::Words(items))
        }
        Rule::Flag => match text {
            "true" => Ok(Value::Flag(true)),
            "false" => Ok(Value::Flag(false)),
            _ => Err(format!("expected true or false, got `{text}`")),
        },
        Rule::Text => Ok(Value::Text(text.to_string())),
    }
}

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    line: usize,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key.split('.').all(|part| {
            !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

fn lex<'a>(text: &'a str, issues: &mut Vec<ConfigIssue>) -> Vec<Entry<'a>> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            issues.push(ConfigIssue::at(line, format!("expected `key = value`, got `{content}`")));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !valid_key(key) {
            issues.push(ConfigIssue::at(line, format!("malformed key `{key}`")));
            continue;
        }
        if value.is_empty() {
            issues.push(ConfigIssue::at(line, format!("missing value for `{key}`")));
            continue;
        }
        if let Some(first) = entries.iter().find(|e| e.key == key) {
            issues.push(ConfigIssue::at(
                line,
                format!("duplicate key `{key}` (first set on line {}, again on line {line})", first.line),
            ));
            continue;
        }
        entries.push(Entry { key, value, line });
    }
    entries
}

/// Parses and validates a scenario file, collecting every problem.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut issues = Vec::new();
    let entries = lex(text, &mut issues);

    let scenario = match entries.iter().find(|e| e.key == "scenario") {
        None => {
            issues.push(ConfigIssue::general("missing required key `scenario`"));
            None
        }
        Some(e) => {
            let found = Scenario::from_name(e.value);
            if found.is_none() {
                issues.push(ConfigIssue::at(
                    e.line,
                    format!("unknown scenario `{}`; expected one of {}", e.value, Scenario::NAMES.join(", ")),
                ));
            }
            found
        }
    };
    let Some(scenario) = scenario else {
        for e in &entries {
            if !Scenario::ALL.iter().any(|s| schema(*s).iter().any(|d| d.key == e.key)) {
                issues.push(ConfigIssue::at(e.line, format!("unknown key `{}`", e.key)));
            }
        }
        return Err(finish(issues));
    };

    let defs = schema(scenario);
    let mut settings = Vec::with_capacity(defs.len());
    for e in &entries {
        if !defs.iter().any(|d| d.key == e.key) {
            issues.push(ConfigIssue::at(
                e.line,
                format!("unknown key `{}` for scenario {}", e.key, scenario.name()),
            ));
        }
    }
    for d in &defs {
        let given = entries.iter().find(|e| e.key == d.key);
        let (text, line) = match (given, d.fallback) {
            (Some(e), _) => (e.value, Some(e.line)),
            (None, Fallback::Value(v)) => (v, None),
            (None, Fallback::Optional) => continue,
            (None, Fallback::Required) => {
                issues.push(ConfigIssue::general(format!(
                    "missing required key `{}` for scenario {}",
                    d.key,
                    scenario.name()
                )));
                continue;
            }
        };
        match parse_value(d.rule, text) {
            Ok(value) => settings.push(Setting {
                key: d.key,
                value,
                text: text.to_string(),
                line,
            }),
            Err(msg) => issues.push(ConfigIssue {
                line,
                message: format!("`{}` {msg}", d.key),
            }),
        }
    }

    let view = Partial(&settings);
    check_scenario(scenario, &view, &mut issues);
    let params = if scenario == Scenario::Acceptance {
        Some(PhysicalParams::natural())
    } else {
        view.params(&mut issues)
    };

    match params {
        Some(params) if issues.is_empty() => {
            let seed = view.count("seed").unwrap_or(0) as u64;
            let output_dir = PathBuf::from(match view.get("output.dir").map(|s| &s.value) {
                Some(Value::Text(t)) => t.as_str(),
                _ => "qbrown-out",
            });
            Ok(ScenarioConfig {
                scenario,
                params,
                seed,
                output_dir,
                settings,
            })
        }
        _ => Err(finish(issues)),
    }
}

/// Reads and parses a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    parse_config(&text)
}

fn finish(mut issues: Vec<ConfigIssue>) -> Error {
    issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
    Error::Config(issues)
}

/// Settings that parsed, for cross-key checks.
struct Partial<'a>(&'a [Setting]);

impl Partial<'_> {
    fn get(&self, key: &str) -> Option<&Setting> {
        self.0.iter().find(|s| s.key == key)
    }

    fn number(&self, key: &str) -> Option<f64> {
        match self.get(key)?.value {
            Value::Number(v) => Some(v),
            _ => None,
        }
    }

    fn count(&self, key: &str) -> Option<usize> {
        match self.get(key)?.value {
            Value::Count(n) => Some(n),
            _ => None,
        }
    }

    fn word(&self, key: &str) -> Option<&str> {
        match &self.get(key)?.value {
            Value::Word(w) => Some(w),
            _ => None,
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.get(key).and_then(|s| s.line)
    }

    /// Issue pinned to the line of `key`, or marked as coming from the
    /// default when the key was not given.
    fn issue(&self, key: &str, message: String) -> ConfigIssue {
        match self.line(key) {
            Some(line) => ConfigIssue::at(line, message),
            None if self.get(key).is_some() => ConfigIssue::general(format!("{message} (default for `{key}`)")),
            None => ConfigIssue::general(message),
        }
    }

    fn params(&self, issues: &mut Vec<ConfigIssue>) -> Option<PhysicalParams> {
        let get = |k: &str| self.number(k);
        let raw = RawParams {
            hbar: get("params.hbar")?,
            k_b: get("params.k_b")?,
            mass: get("params.mass")?,
            friction: get("params.friction")?,
            temperature: get("params.temperature")?,
            omega0: get("params.omega0")?,
            force: get("params.force")?,
        };
        match make_params(raw) {
            Ok(p) => Some(p),
            Err(qbrown_core::Error::InvalidParameter { name, requirement }) => {
                let key = format!("params.{}", name.to_ascii_lowercase());
                issues.push(self.issue(&key, format!("`{key}` must be {requirement}")));
                None
            }
            Err(e) => {
                issues.push(ConfigIssue::general(e.to_string()));
                None
            }
        }
    }
}

fn check_scenario(scenario: Scenario, v: &Partial, issues: &mut Vec<ConfigIssue>) {
    let rule = |ok: Option<bool>, key: &str, message: &str| {
        (ok == Some(false)).then(|| v.issue(key, format!("`{key}` {message} for scenario {}", scenario.name())))
    };
    let zero = |k: &str| v.number(k).map(|x| x == 0.0);
    let positive = |k: &str| v.number(k).map(|x| x > 0.0);

    match scenario {
        Scenario::FreeZeroT => {
            issues.extend(rule(zero("params.temperature"), "params.temperature", "must be 0"));
            issues.extend(rule(zero("params.omega0"), "params.omega0", "must be 0"));
        }
        Scenario::VacuumSpreading => {
            issues.extend(rule(zero("params.friction"), "params.friction", "must be 0"));
            issues.extend(rule(zero("params.temperature"), "params.temperature", "must be 0"));
            issues.extend(rule(zero("params.omega0"), "params.omega0", "must be 0"));
        }
        Scenario::FreeHighFriction | Scenario::DispersionCompare => {
            issues.extend(rule(positive("params.temperature"), "params.temperature", "must be positive"));
            issues.extend(rule(positive("params.friction"), "params.friction", "must be positive"));
            issues.extend(rule(zero("params.omega0"), "params.omega0", "must be 0"));
            let ordered = v.number("time.t_min_tc").zip(v.number("time.t_max_tc")).map(|(a, b)| b > a);
            issues.extend(rule(ordered, "time.t_max_tc", "must exceed time.t_min_tc"));
        }
        Scenario::Harmonic => {
            issues.extend(rule(positive("params.temperature"), "params.temperature", "must be positive"));
            issues.extend(rule(positive("params.omega0"), "params.omega0", "must be positive"));
        }
        Scenario::ClassicalTelegraph | Scenario::SemiclassicalPde | Scenario::QuantumZeroTPde => {
            if scenario == Scenario::QuantumZeroTPde {
                issues.extend(rule(zero("params.temperature"), "params.temperature", "must be 0"));
            } else {
                issues.extend(rule(positive("params.temperature"), "params.temperature", "must be positive"));
            }
            if v.word("pde.model") == Some("smoluchowski") {
                issues.extend(rule(positive("params.friction"), "params.friction", "must be positive with pde.model = smoluchowski"));
            }
            let ordered = v.number("pde.x_min").zip(v.number("pde.x_max")).map(|(a, b)| b > a);
            issues.extend(rule(ordered, "pde.x_max", "must exceed pde.x_min"));
            let potential = v.word("pde.potential");
            match potential {
                Some("harmonic") => {
                    issues.extend(rule(positive("params.omega0"), "params.omega0", "must be positive with pde.potential = harmonic"))
                }
                Some(_) => issues.extend(rule(zero("params.omega0"), "params.omega0", "is only used by pde.potential = harmonic")),
                None => {}
            }
            if potential.is_some() && potential != Some("linear") {
                issues.extend(rule(zero("params.force"), "params.force", "is only used by pde.potential = linear"));
            }
            if potential == Some("quartic") && v.get("pde.k4").is_none() {
                issues.push(v.issue("pde.potential", "missing required key `pde.k4` for pde.potential = quartic".into()));
            }
        }
        Scenario::Equilibrium => {
            issues.extend(rule(positive("params.temperature"), "params.temperature", "must be positive"));
            issues.extend(rule(zero("params.force"), "params.force", "must be 0"));
            match v.word("equilibrium.potential") {
                Some("harmonic") => {
                    issues.extend(rule(positive("params.omega0"), "params.omega0", "must be positive with equilibrium.potential = harmonic"))
                }
                Some(_) => {
                    issues.extend(rule(zero("params.omega0"), "params.omega0", "is only used by equilibrium.potential = harmonic"));
                    if v.get("equilibrium.k4").is_none() {
                        issues.push(v.issue(
                            "equilibrium.potential",
                            "missing required key `equilibrium.k4` for equilibrium.potential = quartic".into(),
                        ));
                    }
                }
                None => {}
            }
        }
        Scenario::Acceptance => {}
    }
}
