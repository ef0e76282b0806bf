//! Run configuration: flat `key = value` text grouped into `[parameters]`, `[initial]`,
//! `[solver]` and `[sweep]` sections. `#` starts a comment. Values are decimal literals,
//! `a/b` ratios or `a^b` powers (`1/69.54`, `2^-6`).

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use fracsica::fde::MemoryPolicy;
use fracsica::model::{validate_params, Severity};
use fracsica::{ModelParameters, SolverConfig, State};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line of the offending entry, when it came from the file.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Which subcommand a config is validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Analyze,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub parameters: ModelParameters,
    pub initial_state: State,
    pub solver: SolverConfig,
    pub alphas: Vec<f64>,
    pub output_path: Option<PathBuf>,
    pub epsilon: f64,
    /// `section.key` → line it was set on.
    lines: HashMap<String, usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            parameters: ModelParameters::reference(0.001),
            initial_state: State::new(0.8, 0.1, 0.0, 0.0),
            solver: SolverConfig::new(0.9, 2f64.powi(-6), 500.0),
            alphas: vec![0.7, 0.8, 0.9, 1.0],
            output_path: None,
            epsilon: 1.0,
            lines: HashMap::new(),
        }
    }
}

const PARAMETER_KEYS: [&str; 10] = [
    "recruitment",
    "natural_death",
    "contact_rate",
    "eta_c",
    "eta_a",
    "treat_i",
    "default_i",
    "treat_a",
    "default_c",
    "aids_death",
];

/// Parses a numeric value: literal, `a/b` or `a^b`.
pub fn parse_value(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{}` is not a number", s.trim()))
    };
    if let Some((a, b)) = text.split_once('/') {
        return Ok(num(a)? / num(b)?);
    }
    if let Some((a, b)) = text.split_once('^') {
        return Ok(num(a)?.powf(num(b)?));
    }
    num(text)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Vec<ConfigError>> {
        let mut cfg = Self::default();
        let mut errors = Vec::new();
        let mut section: Option<String> = None;
        let mut memory_kind: Option<(String, usize)> = None;
        let mut window: Option<(usize, usize)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if ["parameters", "initial", "solver", "sweep"].contains(&name) {
                    section = Some(name.to_string());
                } else {
                    errors.push(ConfigError::at(
                        line_no,
                        format!("unknown section [{name}]"),
                    ));
                    section = None;
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(ConfigError::at(
                    line_no,
                    format!("expected `key = value`, got `{line}`"),
                ));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(sec) = section.as_deref() else {
                errors.push(ConfigError::at(
                    line_no,
                    format!("key `{key}` appears before any section"),
                ));
                continue;
            };
            let qualified = format!("{sec}.{key}");
            if let Some(prev) = cfg.lines.get(&qualified) {
                errors.push(ConfigError::at(
                    line_no,
                    format!("duplicate key `{key}` (first set on line {prev})"),
                ));
                continue;
            }

            let number = |errors: &mut Vec<ConfigError>| match parse_value(value) {
                Ok(v) => Some(v),
                Err(e) => {
                    errors.push(ConfigError::at(line_no, format!("{key}: {e}")));
                    None
                }
            };

            let known = match (sec, key) {
                ("parameters", k) if PARAMETER_KEYS.contains(&k) => {
                    if let Some(v) = number(&mut errors) {
                        let p = &mut cfg.parameters;
                        let slot = match k {
                            "recruitment" => &mut p.recruitment,
                            "natural_death" => &mut p.natural_death,
                            "contact_rate" => &mut p.contact_rate,
                            "eta_c" => &mut p.eta_c,
                            "eta_a" => &mut p.eta_a,
                            "treat_i" => &mut p.treat_i,
                            "default_i" => &mut p.default_i,
                            "treat_a" => &mut p.treat_a,
                            "default_c" => &mut p.default_c,
                            _ => &mut p.aids_death,
                        };
                        *slot = v;
                    }
                    true
                }
                ("initial", "S" | "I" | "C" | "A") => {
                    if let Some(v) = number(&mut errors) {
                        let x = &mut cfg.initial_state;
                        match key {
                            "S" => x.s = v,
                            "I" => x.i = v,
                            "C" => x.c = v,
                            _ => x.a = v,
                        }
                    }
                    true
                }
                ("solver", "alpha") => {
                    if let Some(v) = number(&mut errors) {
                        cfg.solver.alpha = v;
                    }
                    true
                }
                ("solver", "step") => {
                    if let Some(v) = number(&mut errors) {
                        cfg.solver.step = v;
                    }
                    true
                }
                ("solver", "t_end") => {
                    if let Some(v) = number(&mut errors) {
                        cfg.solver.t_end = v;
                    }
                    true
                }
                ("solver", "memory") => {
                    memory_kind = Some((value.to_string(), line_no));
                    true
                }
                ("solver", "window") => {
                    match value.parse::<usize>() {
                        Ok(w) => window = Some((w, line_no)),
                        Err(_) => errors.push(ConfigError::at(
                            line_no,
                            format!("window: `{value}` is not a step count"),
                        )),
                    }
                    true
                }
                ("sweep", "alphas") => {
                    let parsed: Result<Vec<f64>, String> =
                        value.split(',').map(parse_value).collect();
                    match parsed {
                        Ok(list) => cfg.alphas = list,
                        Err(e) => errors.push(ConfigError::at(line_no, format!("alphas: {e}"))),
                    }
                    true
                }
                ("sweep", "epsilon") => {
                    if let Some(v) = number(&mut errors) {
                        cfg.epsilon = v;
                    }
                    true
                }
                _ => false,
            };
            if known {
                cfg.lines.insert(qualified, line_no);
            } else {
                errors.push(ConfigError::at(
                    line_no,
                    format!("unknown key `{key}` in [{sec}]"),
                ));
            }
        }

        match memory_kind
            .as_ref()
            .map(|(kind, line)| (kind.as_str(), *line))
        {
            None | Some(("full", _)) => {
                if let Some((_, line)) = window {
                    errors.push(ConfigError::at(line, "window requires memory = truncated"));
                }
            }
            Some(("truncated", line)) => match window {
                Some((w, _)) => cfg.solver.memory = MemoryPolicy::Truncated { window: w },
                None => errors.push(ConfigError::at(
                    line,
                    "memory = truncated requires a window",
                )),
            },
            Some((kind, line)) => errors.push(ConfigError::at(
                line,
                format!("memory must be `full` or `truncated`, got `{kind}`"),
            )),
        }

        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(errors)
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.lines.get(key).copied()
    }

    /// Checks every invariant for `mode`; warnings from the parameter check are returned
    /// separately from hard errors.
    pub fn validate(&self, mode: Mode) -> Result<Vec<String>, Vec<ConfigError>> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        for issue in validate_params(&self.parameters).issues {
            let line = self.line_of(&format!("parameters.{}", issue.field));
            match issue.severity {
                Severity::Error => errors.push(ConfigError {
                    line,
                    message: issue.message,
                }),
                Severity::Warning => warnings.push(issue.message),
            }
        }

        if mode != Mode::Analyze {
            for (name, v) in [
                ("S", self.initial_state.s),
                ("I", self.initial_state.i),
                ("C", self.initial_state.c),
                ("A", self.initial_state.a),
            ] {
                if !v.is_finite() || v < 0.0 {
                    errors.push(ConfigError {
                        line: self.line_of(&format!("initial.{name}")),
                        message: format!("initial {name} must be finite and nonnegative, got {v}"),
                    });
                }
            }
            let solver = if mode == Mode::Sweep {
                // each alpha is checked below; validate the grid with a placeholder order
                SolverConfig {
                    alpha: 1.0,
                    ..self.solver
                }
            } else {
                self.solver
            };
            if let Err(e) = solver.validate() {
                let line = [
                    "solver.alpha",
                    "solver.step",
                    "solver.t_end",
                    "solver.window",
                ]
                .iter()
                .find_map(|k| {
                    let short = k.trim_start_matches("solver.");
                    e.to_string()
                        .contains(short)
                        .then(|| self.line_of(k))
                        .flatten()
                });
                errors.push(ConfigError {
                    line,
                    message: e.to_string(),
                });
            }
        }

        if mode != Mode::Simulate {
            let line = self.line_of("sweep.alphas");
            if self.alphas.is_empty() {
                errors.push(ConfigError {
                    line,
                    message: "alphas must not be empty".into(),
                });
            }
            if mode == Mode::Sweep && self.alphas.len() < 2 {
                errors.push(ConfigError {
                    line,
                    message: format!("sweep needs at least 2 alphas, got {}", self.alphas.len()),
                });
            }
            for &a in &self.alphas {
                if !(a > 0.0 && a <= 1.0) {
                    errors.push(ConfigError {
                        line,
                        message: format!("alpha {a} outside (0, 1]"),
                    });
                }
            }
        }
        if mode == Mode::Sweep && !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            errors.push(ConfigError {
                line: self.line_of("sweep.epsilon"),
                message: format!("epsilon must be positive, got {}", self.epsilon),
            });
        }

        if errors.is_empty() {
            Ok(warnings)
        } else {
            Err(errors)
        }
    }
}
