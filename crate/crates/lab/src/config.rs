//! Experiment configuration: TOML with flat `key = value` sections.
//!
//! Validation never stops at the first problem; every violated constraint is
//! collected as a [`Diagnostic`] with the line it came from.

use std::fmt;
use std::path::{Path, PathBuf};

use convergence_core::dynamics::{DynSystem, TestFunction, DEFAULT_ALPHA};
use convergence_core::measure::DEFAULT_SUPPORT_CAP;
use convergence_core::sweepout::{AtomRule, SweepoutFamily};
use convergence_core::{Decomposition, LatticeMeasure, SequenceSpec};
use toml::{Table, Value};

use crate::format;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", render(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render(diags: &[Diagnostic]) -> String {
    let mut s = format!("{} configuration problem(s)", diags.len());
    for d in diags {
        s.push_str("\n  ");
        s.push_str(&d.to_string());
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub enum SequenceConfig {
    Iid {
        measure: LatticeMeasure,
        decomposition: Option<Decomposition>,
    },
    Sweepout(AtomRule),
    List {
        path: PathBuf,
        measures: Vec<LatticeMeasure>,
    },
}

impl SequenceConfig {
    pub fn build(&self) -> SequenceSpec {
        match self {
            SequenceConfig::Iid {
                measure,
                decomposition: None,
            } => SequenceSpec::iid(measure.clone()),
            SequenceConfig::Iid {
                measure,
                decomposition: Some(d),
            } => SequenceSpec::iid_decomposed(measure.clone(), d.clone()),
            SequenceConfig::Sweepout(rule) => SweepoutFamily::new(rule.clone()).spec(),
            SequenceConfig::List { path, measures } => SequenceSpec::from_list(measures.clone())
                .with_label(format!("list from {}", path.display())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionConfig {
    Block { start: u64, len: Option<u64> },
    Subset(Vec<u64>),
    Interval { lo: f64, hi: f64 },
    Trig(i64),
    Constant(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaledFunction {
    pub shape: FunctionConfig,
    pub scale: f64,
    /// Rescale so that `‖f‖₁ = 1` on the chosen system.
    pub normalize: bool,
}

impl ScaledFunction {
    pub fn build(&self, sys: &DynSystem) -> TestFunction {
        let base = match &self.shape {
            FunctionConfig::Block { start, len } => {
                let q = sys.state_count() as u64;
                TestFunction::block(*start, len.unwrap_or((q / 8).max(1)))
            }
            FunctionConfig::Subset(s) => TestFunction::subset(s),
            FunctionConfig::Interval { lo, hi } => TestFunction::interval(*lo, *hi),
            FunctionConfig::Trig(k) => TestFunction::trig(*k),
            FunctionConfig::Constant(c) => TestFunction::constant(*c),
        };
        let f = base.scaled(self.scale);
        if self.normalize {
            let n = f.norm_l1(sys);
            if n > 0.0 {
                return f.scaled(1.0 / n);
            }
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub horizon: usize,
    pub grid_size: usize,
    pub prune_eps: f64,
    pub support_cap: usize,
    pub lambdas: Vec<f64>,
    pub b_measure: f64,
    /// `K` of the dissipativity trace.
    pub radius: u64,
    /// Index of the state used by the convergence trace.
    pub state: usize,
    pub window: Option<usize>,
    pub d2_integrals: bool,
    pub spectrum_n: Vec<usize>,
    pub tail_delta: f64,
    pub trend_limit: f64,
    pub bounded_trend_limit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub max_denominator: u64,
    pub uniform_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub sequence: SequenceConfig,
    pub system: DynSystem,
    pub function: ScaledFunction,
    pub run: RunConfig,
    pub scan: ScanConfig,
    pub output_dir: Option<PathBuf>,
    /// Non-blank, non-comment lines of the source, echoed into outputs.
    pub echo: Vec<String>,
}

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "sequence",
        &[
            "family",
            "offset",
            "weights",
            "atom",
            "atom_weight",
            "rule",
            "p",
            "a",
            "table",
            "file",
        ],
    ),
    ("system", &["kind", "q", "alpha", "samples", "seed"]),
    (
        "function",
        &[
            "kind",
            "start",
            "len",
            "sites",
            "lo",
            "hi",
            "frequency",
            "value",
            "scale",
            "normalize",
        ],
    ),
    (
        "run",
        &[
            "horizon",
            "grid_size",
            "prune_eps",
            "support_cap",
            "lambdas",
            "b_measure",
            "radius",
            "state",
            "window",
            "d2_integrals",
            "spectrum_n",
            "tail_delta",
            "trend_limit",
            "bounded_trend_limit",
        ],
    ),
    ("scan", &["max_denominator", "uniform_points"]),
    ("output", &["dir"]),
];

/// 1-based line of `[section]`, or of `key = …` inside it.
fn locate(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.split(']').next()) {
            current = name.trim().to_string();
            if key.is_none() && current == section {
                return Some(i + 1);
            }
            continue;
        }
        if let Some(k) = key {
            if current == section {
                if let Some(rest) = t.strip_prefix(k) {
                    if rest.trim_start().starts_with('=') {
                        return Some(i + 1);
                    }
                }
            }
        }
    }
    None
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Reader<'a> {
    text: &'a str,
    table: &'a Table,
    diags: Vec<Diagnostic>,
}

impl<'a> Reader<'a> {
    fn report(&mut self, section: &str, key: &str, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            line: locate(self.text, section, Some(key))
                .or_else(|| locate(self.text, section, None)),
            key: format!("{section}.{key}"),
            message: message.into(),
        });
    }

    fn raw(&mut self, section: &str, key: &str) -> Option<&'a Value> {
        self.table.get(section)?.as_table()?.get(key)
    }

    fn int(&mut self, section: &str, key: &str, lo: i64, hi: i64) -> Option<i64> {
        let v = self.raw(section, key)?;
        match v.as_integer() {
            Some(x) if (lo..=hi).contains(&x) => Some(x),
            Some(x) => {
                self.report(section, key, format!("{x} outside [{lo}, {hi}]"));
                None
            }
            None => {
                self.report(section, key, format!("expected an integer, found {v}"));
                None
            }
        }
    }

    fn float(&mut self, section: &str, key: &str, lo: f64, hi: f64) -> Option<f64> {
        let v = self.raw(section, key)?;
        let x = match v {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            _ => {
                self.report(section, key, format!("expected a number, found {v}"));
                return None;
            }
        };
        if x.is_finite() && (lo..=hi).contains(&x) {
            Some(x)
        } else {
            self.report(section, key, format!("{x} outside [{lo}, {hi}]"));
            None
        }
    }

    fn boolean(&mut self, section: &str, key: &str) -> Option<bool> {
        let v = self.raw(section, key)?;
        match v.as_bool() {
            Some(b) => Some(b),
            None => {
                self.report(section, key, format!("expected true or false, found {v}"));
                None
            }
        }
    }

    fn string(&mut self, section: &str, key: &str) -> Option<&'a str> {
        let v = self.raw(section, key)?;
        match v.as_str() {
            Some(s) => Some(s),
            None => {
                self.report(section, key, format!("expected a string, found {v}"));
                None
            }
        }
    }

    fn choice(&mut self, section: &str, key: &str, options: &[&str]) -> Option<&'a str> {
        let s = self.string(section, key)?;
        if options.contains(&s) {
            Some(s)
        } else {
            self.report(
                section,
                key,
                format!("`{s}` is not one of {}", options.join(", ")),
            );
            None
        }
    }

    fn floats(&mut self, section: &str, key: &str) -> Option<Vec<f64>> {
        let v = self.raw(section, key)?;
        let Some(arr) = v.as_array() else {
            self.report(
                section,
                key,
                format!("expected an array of numbers, found {v}"),
            );
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        for x in arr {
            match x {
                Value::Float(f) if f.is_finite() => out.push(*f),
                Value::Integer(i) => out.push(*i as f64),
                _ => {
                    self.report(section, key, format!("entry {x} is not a finite number"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn ints(&mut self, section: &str, key: &str, lo: i64, hi: i64) -> Option<Vec<i64>> {
        let v = self.raw(section, key)?;
        let Some(arr) = v.as_array() else {
            self.report(
                section,
                key,
                format!("expected an array of integers, found {v}"),
            );
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        for x in arr {
            match x.as_integer() {
                Some(i) if (lo..=hi).contains(&i) => out.push(i),
                _ => {
                    self.report(
                        section,
                        key,
                        format!("entry {x} is not an integer in [{lo}, {hi}]"),
                    );
                    return None;
                }
            }
        }
        Some(out)
    }

    fn require<T>(&mut self, section: &str, key: &str, v: Option<T>) -> Option<T> {
        if v.is_none() && self.raw(section, key).is_none() {
            self.report(section, key, "required key is missing");
        }
        v
    }

    fn unknown_keys(&mut self) {
        let table = self.table;
        for (section, value) in table {
            let Some(allowed) = SECTIONS.iter().find(|(s, _)| s == section).map(|(_, k)| *k) else {
                self.diags.push(Diagnostic {
                    line: locate(self.text, section, None)
                        .or_else(|| locate(self.text, "", Some(section))),
                    key: section.clone(),
                    message: "unknown section".into(),
                });
                continue;
            };
            let Some(inner) = value.as_table() else {
                self.diags.push(Diagnostic {
                    line: locate(self.text, "", Some(section)),
                    key: section.clone(),
                    message: "expected a [section]".into(),
                });
                continue;
            };
            for key in inner.keys() {
                if !allowed.contains(&key.as_str()) {
                    self.report(section, key, "unknown key");
                }
            }
        }
    }
}

fn read_sequence(r: &mut Reader, base: &Path) -> Option<SequenceConfig> {
    const S: &str = "sequence";
    let family = r.choice(S, "family", &["iid", "sweepout", "list"]);
    let family = r.require(S, "family", family)?;
    match family {
        "iid" => {
            let offset = r
                .int(S, "offset", -1_000_000_000, 1_000_000_000)
                .unwrap_or(0);
            let weights = r.floats(S, "weights");
            let weights = r.require(S, "weights", weights)?;
            let measure = match LatticeMeasure::new(offset, weights) {
                Ok(m) => m,
                Err(e) => {
                    r.report(S, "weights", e.to_string());
                    return None;
                }
            };
            let atom = r.int(S, "atom", i64::MIN / 4, i64::MAX / 4);
            let weight = r.float(S, "atom_weight", 0.0, 1.0);
            let decomposition = match (atom, weight) {
                (Some(x), Some(a)) => match split_atom(&measure, x, a) {
                    Ok(d) => Some(d),
                    Err(msg) => {
                        r.report(S, "atom_weight", msg);
                        return None;
                    }
                },
                (None, None) => None,
                _ => {
                    r.report(S, "atom", "atom and atom_weight must be given together");
                    return None;
                }
            };
            Some(SequenceConfig::Iid {
                measure,
                decomposition,
            })
        }
        "sweepout" => {
            let rule = r
                .choice(S, "rule", &["inverse_power", "constant", "table"])
                .unwrap_or("inverse_power");
            let rule = match rule {
                "inverse_power" => AtomRule::InversePower {
                    p: r.float(S, "p", 1e-3, 16.0).unwrap_or(2.0),
                },
                "constant" => {
                    let a = r.float(S, "a", 0.0, 1.0);
                    let a = r.require(S, "a", a)?;
                    if a >= 1.0 {
                        r.report(S, "a", "a must be below 1");
                        return None;
                    }
                    AtomRule::Constant(a)
                }
                _ => {
                    let t = r.floats(S, "table");
                    let t = r.require(S, "table", t)?;
                    if t.is_empty() || t.iter().any(|a| !(0.0..1.0).contains(a)) {
                        r.report(S, "table", "entries must lie in [0, 1) and be nonempty");
                        return None;
                    }
                    AtomRule::Table(t)
                }
            };
            Some(SequenceConfig::Sweepout(rule))
        }
        _ => {
            let file = r.string(S, "file");
            let file = r.require(S, "file", file)?;
            let path = base.join(file);
            match std::fs::read_to_string(&path) {
                Ok(text) => match format::parse_measure_list(&text) {
                    Ok(measures) => Some(SequenceConfig::List { path, measures }),
                    Err(e) => {
                        r.report(S, "file", format!("{}: {e}", path.display()));
                        None
                    }
                },
                Err(e) => {
                    r.report(S, "file", format!("cannot read {}: {e}", path.display()));
                    None
                }
            }
        }
    }
}

/// `ν = a δ_x + (1 − a) γ`, solving for `γ`.
fn split_atom(nu: &LatticeMeasure, x: i64, a: f64) -> Result<Decomposition, String> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(format!("atom_weight {a} outside (0, 1]"));
    }
    if nu.get(x) + 1e-12 < a {
        return Err(format!("ν({x}) = {} is below atom_weight {a}", nu.get(x)));
    }
    let remainder = if a >= 1.0 {
        LatticeMeasure::delta(x)
    } else {
        let atoms: Vec<(i64, f64)> = nu
            .iter()
            .map(|(k, w)| {
                let w = if k == x { (w - a).max(0.0) } else { w };
                (k, w / (1.0 - a))
            })
            .filter(|&(_, w)| w > 0.0)
            .collect();
        LatticeMeasure::from_atoms(&atoms).map_err(|e| e.to_string())?
    };
    Ok(Decomposition {
        weight: a,
        atom: x,
        remainder,
    })
}

fn read_system(r: &mut Reader) -> Option<DynSystem> {
    const S: &str = "system";
    let kind = r
        .choice(S, "kind", &["cyclic", "rotation"])
        .unwrap_or("cyclic");
    if kind == "cyclic" {
        let q = r.int(S, "q", 1, 1 << 24);
        if q.is_none() && r.raw(S, "q").is_some() {
            return None;
        }
        return DynSystem::cyclic(q.unwrap_or(1024) as u64).ok();
    }
    let alpha = r.float(S, "alpha", 0.0, 1.0);
    if alpha.is_none() && r.raw(S, "alpha").is_some() {
        return None;
    }
    let alpha = alpha.unwrap_or(DEFAULT_ALPHA);
    if !(alpha > 0.0 && alpha < 1.0) {
        r.report(S, "alpha", "alpha must lie strictly between 0 and 1");
        return None;
    }
    let samples = r.int(S, "samples", 1, 1 << 22).unwrap_or(1000) as usize;
    let seed = r.int(S, "seed", 0, i64::MAX).unwrap_or(0) as u64;
    DynSystem::rotation(alpha, samples, seed).ok()
}

fn read_function(r: &mut Reader, sys: Option<&DynSystem>) -> Option<ScaledFunction> {
    const S: &str = "function";
    let default_kind = match sys {
        Some(DynSystem::Rotation { .. }) => "interval",
        _ => "block",
    };
    let kind = r
        .choice(
            S,
            "kind",
            &["block", "subset", "interval", "trig", "constant"],
        )
        .unwrap_or(default_kind);
    let q = match sys {
        Some(DynSystem::Cyclic { q }) => Some(*q as i64),
        _ => None,
    };
    if matches!(kind, "block" | "subset") && q.is_none() && sys.is_some() {
        r.report(S, "kind", format!("`{kind}` needs a cyclic system"));
        return None;
    }
    let q_max = q.unwrap_or(1 << 24);
    let shape = match kind {
        "block" => FunctionConfig::Block {
            start: r.int(S, "start", 0, q_max - 1).unwrap_or(0) as u64,
            len: r.int(S, "len", 0, q_max).map(|l| l as u64),
        },
        "subset" => {
            let sites = r.ints(S, "sites", 0, q_max - 1);
            let sites = r.require(S, "sites", sites)?;
            FunctionConfig::Subset(sites.into_iter().map(|s| s as u64).collect())
        }
        "interval" => {
            let lo = r.float(S, "lo", 0.0, 1.0).unwrap_or(0.0);
            let hi = r.float(S, "hi", 0.0, 1.0).unwrap_or(0.125);
            FunctionConfig::Interval { lo, hi }
        }
        "trig" => FunctionConfig::Trig(r.int(S, "frequency", -(1 << 30), 1 << 30).unwrap_or(1)),
        _ => FunctionConfig::Constant(r.float(S, "value", -1e12, 1e12).unwrap_or(1.0)),
    };
    Some(ScaledFunction {
        shape,
        scale: r.float(S, "scale", -1e12, 1e12).unwrap_or(1.0),
        normalize: r.boolean(S, "normalize").unwrap_or(false),
    })
}

fn read_run(r: &mut Reader, sys: Option<&DynSystem>) -> RunConfig {
    const S: &str = "run";
    let horizon = r.int(S, "horizon", 1, 100_000).unwrap_or(100) as usize;
    let grid_size = r.int(S, "grid_size", 16, 1 << 20).unwrap_or(1024) as usize;
    let prune_eps = r.float(S, "prune_eps", 0.0, 1e-8).unwrap_or(0.0);
    let support_cap = r
        .int(S, "support_cap", 1, 100_000_000)
        .map_or(DEFAULT_SUPPORT_CAP, |c| c as usize);
    let lambdas = match r.floats(S, "lambdas") {
        Some(l) if l.is_empty() || l.iter().any(|x| !x.is_finite() || *x <= 0.0) => {
            r.report(S, "lambdas", "levels must be positive and nonempty");
            vec![1.0, 2.0, 4.0, 8.0]
        }
        Some(l) => l,
        None => vec![1.0, 2.0, 4.0, 8.0],
    };
    let b_measure = r.float(S, "b_measure", 0.0, 1.0).unwrap_or(0.05);
    let radius = r.int(S, "radius", 1, 1 << 40).unwrap_or(50) as u64;
    let last_state = sys.map_or(i64::MAX, |s| s.state_count() as i64 - 1);
    let state = r.int(S, "state", 0, last_state).unwrap_or(0) as usize;
    let window = r.int(S, "window", 1, horizon as i64).map(|w| w as usize);
    let d2_integrals = r.boolean(S, "d2_integrals").unwrap_or(true);
    let spectrum_n = r
        .ints(S, "spectrum_n", 1, horizon as i64)
        .map(|v| v.into_iter().map(|n| n as usize).collect())
        .unwrap_or_else(|| vec![horizon]);
    let tail_delta = r.float(S, "tail_delta", 0.0, 0.5).unwrap_or(0.1);
    let trend_limit = r.float(S, "trend_limit", 1.0, 1e6).unwrap_or(2.0);
    let bounded_trend_limit = r.float(S, "bounded_trend_limit", 1.0, 1e6).unwrap_or(1.25);
    RunConfig {
        horizon,
        grid_size,
        prune_eps,
        support_cap,
        lambdas,
        b_measure,
        radius,
        state,
        window,
        d2_integrals,
        spectrum_n,
        tail_delta,
        trend_limit,
        bounded_trend_limit,
    }
}

/// Parses and validates `text`; relative paths resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let table: Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            let e: toml::de::Error = e;
            return Err(vec![Diagnostic {
                line: e.span().map(|s| line_of_offset(text, s.start)),
                key: "syntax".into(),
                message: e.message().trim().to_string(),
            }]);
        }
    };
    let mut r = Reader {
        text,
        table: &table,
        diags: Vec::new(),
    };
    if table.get("sequence").is_none() {
        r.diags.push(Diagnostic {
            line: None,
            key: "sequence".into(),
            message: "required section is missing".into(),
        });
    }
    let sequence = read_sequence(&mut r, base);
    let system = read_system(&mut r);
    let function = read_function(&mut r, system.as_ref());
    let run = read_run(&mut r, system.as_ref());
    let scan = ScanConfig {
        max_denominator: r.int("scan", "max_denominator", 1, 64).unwrap_or(8) as u64,
        uniform_points: r.int("scan", "uniform_points", 0, 1 << 16).unwrap_or(0) as usize,
    };
    let output_dir = r.string("output", "dir").map(PathBuf::from);
    r.unknown_keys();

    if let (Some(sys), Some(f)) = (&system, &function) {
        if let Err(e) = f.build(sys).validate(sys) {
            r.report("function", "kind", e.to_string());
        }
    }
    if r.diags.is_empty() {
        if let (Some(sequence), Some(system), Some(function)) = (sequence, system, function) {
            let echo = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect();
            return Ok(ExperimentConfig {
                sequence,
                system,
                function,
                run,
                scan,
                output_dir,
                echo,
            });
        }
    }
    r.diags
        .sort_by_key(|d| (d.line.unwrap_or(0), d.key.clone()));
    if r.diags.is_empty() {
        r.diags.push(Diagnostic {
            line: None,
            key: "config".into(),
            message: "incomplete configuration".into(),
        });
    }
    Err(r.diags)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base).map_err(ConfigError::Invalid)
}

/// Every violated constraint; empty for a valid file. Only I/O failures
/// are errors.
pub fn validate_config(path: &Path) -> Result<Vec<Diagnostic>, ConfigError> {
    match load_config(path) {
        Ok(_) => Ok(Vec::new()),
        Err(ConfigError::Invalid(d)) => Ok(d),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
# lazy walk
[sequence]
family = "iid"
offset = -1
weights = [0.25, 0.5, 0.25]

[system]
kind = "cyclic"
q = 64

[run]
horizon = 20
"#;

    #[test]
    fn well_formed_config_parses() {
        let c = parse_config(GOOD, Path::new(".")).unwrap();
        assert_eq!(c.run.horizon, 20);
        assert_eq!(c.system, DynSystem::Cyclic { q: 64 });
        assert!(matches!(c.sequence, SequenceConfig::Iid { .. }));
        assert_eq!(c.echo[0], "[sequence]");
    }

    #[test]
    fn range_violation_is_named_with_line() {
        let text = GOOD.replace("q = 64", "q = 0");
        let d = parse_config(&text, Path::new(".")).unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].key, "system.q");
        assert_eq!(d[0].line, Some(10));
    }

    #[test]
    fn every_unknown_key_is_reported() {
        let text = format!("{GOOD}colour = 3\n[extra]\nx = 1\n");
        let d = parse_config(&text, Path::new(".")).unwrap_err();
        let keys: Vec<_> = d.iter().map(|d| d.key.as_str()).collect();
        assert!(keys.contains(&"run.colour"), "{keys:?}");
        assert!(keys.contains(&"extra"), "{keys:?}");
    }

    #[test]
    fn syntax_error_has_line() {
        let d = parse_config("[run]\nhorizon = = 3\n", Path::new(".")).unwrap_err();
        assert_eq!(d[0].line, Some(2));
    }

    #[test]
    fn collects_several_problems() {
        let text = GOOD.replace("q = 64", "q = -3").replace(
            "horizon = 20",
            "horizon = 20\nprune_eps = 0.1\nlambdas = [1, -2]",
        );
        let d = parse_config(&text, Path::new(".")).unwrap_err();
        assert_eq!(d.len(), 3, "{d:?}");
    }

    #[test]
    fn iid_decomposition_is_solved() {
        let text = GOOD.replace(
            "weights = [0.25, 0.5, 0.25]",
            "weights = [0.25, 0.5, 0.25]\natom = 0\natom_weight = 0.5",
        );
        let c = parse_config(&text, Path::new(".")).unwrap();
        let spec = c.sequence.build();
        let d = spec.decomposition(3).unwrap();
        assert_eq!(d.remainder.weights(), &[0.5, 0.0, 0.5]);
    }
}
