//! Flat `key = value` run configuration (TOML syntax, no tables).
//!
//! ```toml
//! preset = "fig5"          # optional base, later keys override it
//! A = 1
//! B = "1/sqrt(2)"          # numbers may be written as small expressions
//! delta = "-pi/6"
//! Gamma = 0.02
//! initial = "level1"
//! t_end = 100
//! dt_out = 0.1
//! tol = 1e-10
//! solver = "product"
//! csv = "fig5.csv"
//! svg = "fig5.svg"
//! quantities = ["pop1", "pop2", "pop3"]
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{c, DensityMatrix, Matrix3c};
use crate::fields::{FieldConfig, FieldError, InitialState, Sign};
use crate::observables::{purity, ObservableRecord};
use crate::presets;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Product of exponentials with Riccati exponents.
    #[default]
    Product,
    DirectEta,
    DirectRho,
    HydrogenAnalytic,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Product => "product",
            SolverKind::DirectEta => "direct_eta",
            SolverKind::DirectRho => "direct_rho",
            SolverKind::HydrogenAnalytic => "hydrogen_analytic",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "product" => SolverKind::Product,
            "direct_eta" => SolverKind::DirectEta,
            "direct_rho" => SolverKind::DirectRho,
            "hydrogen_analytic" => SolverKind::HydrogenAnalytic,
            _ => {
                return Err(ConfigError::new(
                    "solver",
                    format!("unknown solver {s:?} (expected product, direct_eta, direct_rho, hydrogen_analytic)"),
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Columns drawn in the SVG; empty means populations.
    pub quantities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub initial: InitialState,
    pub t_end: f64,
    pub dt_out: f64,
    pub tol: f64,
    pub solver: SolverKind,
    pub outputs: OutputSpec,
    /// `t_end` is a display choice rather than a physical parameter.
    pub desk_scale: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: FieldConfig::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0).expect("zero fields are valid"),
            initial: InitialState::Level1,
            t_end: 100.0,
            dt_out: 0.1,
            tol: 1e-10,
            solver: SolverKind::Product,
            outputs: OutputSpec::default(),
            desk_scale: false,
        }
    }
}

pub const MAX_TOL: f64 = 1e-3;

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::new("<syntax>", e.to_string().trim().to_string()))?;
        let mut cfg = match table.get("preset") {
            Some(toml::Value::String(name)) => presets::preset(name)
                .map_err(|e| ConfigError::new("preset", e.to_string()))?
                .run_config(),
            Some(_) => return Err(ConfigError::new("preset", "expected a preset name string")),
            None => RunConfig::default(),
        };
        cfg.apply(&table)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies the keys of a flat table on top of `self` (no validation).
    pub(crate) fn apply(&mut self, table: &toml::Table) -> Result<(), ConfigError> {
        let mut rho_re = None;
        let mut rho_im = None;
        let mut initial_name = None;
        for (key, value) in table {
            let k = key.as_str();
            match k {
                "preset" => {}
                "A" => self.field.eps_amplitude = number(k, value)?,
                "Omega" => self.field.eps_frequency = number(k, value)?,
                "B" => self.field.j_amplitude = number(k, value)?,
                "omega" => self.field.j_frequency = number(k, value)?,
                "delta" => self.field.phase = number(k, value)?,
                "Gamma" => self.field.gamma = number(k, value)?,
                "sign" => {
                    self.field.sign = Sign::from_factor(number(k, value)?)
                        .map_err(|e| ConfigError::new(k, e.to_string()))?
                }
                "initial" => initial_name = Some(string(k, value)?.to_string()),
                "rho_re" => rho_re = Some(matrix(k, value)?),
                "rho_im" => rho_im = Some(matrix(k, value)?),
                "t_end" => self.t_end = number(k, value)?,
                "dt_out" => self.dt_out = number(k, value)?,
                "tol" => self.tol = number(k, value)?,
                "solver" => self.solver = string(k, value)?.parse()?,
                "csv" => self.outputs.csv = Some(PathBuf::from(string(k, value)?)),
                "svg" => self.outputs.svg = Some(PathBuf::from(string(k, value)?)),
                "quantities" => {
                    let list = value
                        .as_array()
                        .ok_or_else(|| ConfigError::new(k, "expected a list of column names"))?;
                    self.outputs.quantities = list
                        .iter()
                        .map(|v| string(k, v).map(str::to_string))
                        .collect::<Result<_, _>>()?;
                }
                "desk_scale" => {
                    self.desk_scale = value
                        .as_bool()
                        .ok_or_else(|| ConfigError::new(k, "expected true or false"))?
                }
                _ => return Err(ConfigError::new(k, "unknown key")),
            }
        }

        match initial_name.as_deref() {
            Some("custom") => {
                let re = rho_re.ok_or_else(|| ConfigError::new("rho_re", "custom initial state needs rho_re"))?;
                let im = rho_im.unwrap_or([[0.0; 3]; 3]);
                let m = Matrix3c::from_fn(|i, j| c(re[i][j], im[i][j]));
                let rho = DensityMatrix::new(m).map_err(|e| ConfigError::new("rho_re", e.to_string()))?;
                self.initial = InitialState::Custom(rho);
            }
            Some(name) => {
                self.initial = name.parse().map_err(|e: crate::fields::UnknownInitialState| {
                    ConfigError::new("initial", e.to_string())
                })?;
                if rho_re.is_some() || rho_im.is_some() {
                    return Err(ConfigError::new("rho_re", "only allowed with initial = \"custom\""));
                }
            }
            None if rho_re.is_some() || rho_im.is_some() => {
                return Err(ConfigError::new("rho_re", "only allowed with initial = \"custom\""));
            }
            None => {}
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.field.validate().map_err(|e| {
            let key = match e {
                FieldError::NegativeGamma => "Gamma",
                FieldError::BadSign => "sign",
                FieldError::NonFinite(name) => name,
            };
            ConfigError::new(key, e.to_string())
        })?;
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(ConfigError::new("t_end", "t_end must be > 0"));
        }
        if !(self.dt_out > 0.0) || !self.dt_out.is_finite() {
            return Err(ConfigError::new("dt_out", "dt_out must be > 0"));
        }
        if !(self.tol > 0.0 && self.tol <= MAX_TOL) {
            return Err(ConfigError::new("tol", format!("tol must be in (0, {MAX_TOL:e}]")));
        }
        if let Some(bad) = self
            .outputs
            .quantities
            .iter()
            .find(|q| !ObservableRecord::COLUMNS[1..].contains(&q.as_str()))
        {
            return Err(ConfigError::new("quantities", format!("unknown column {bad:?}")));
        }
        if self.solver == SolverKind::HydrogenAnalytic {
            if !self.field.is_hydrogen() {
                return Err(ConfigError::new(
                    "solver",
                    "hydrogen_analytic requires hydrogen fields (Omega = omega != 0, delta = 0, A/B = sqrt 2)",
                ));
            }
            let p = purity(&self.initial.density());
            if (p - 1.0).abs() > 1e-9 {
                return Err(ConfigError::new("initial", "hydrogen_analytic requires a pure initial state"));
            }
        }
        Ok(())
    }

    /// Serializes every key; parsing the result gives back an identical config.
    pub fn to_config_string(&self) -> String {
        let f = &self.field;
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("A", float(f.eps_amplitude));
        line("Omega", float(f.eps_frequency));
        line("B", float(f.j_amplitude));
        line("omega", float(f.j_frequency));
        line("delta", float(f.phase));
        line("Gamma", float(f.gamma));
        line("sign", float(f.sign.factor()));
        line("initial", quoted(self.initial.name()));
        if let InitialState::Custom(rho) = &self.initial {
            let rows = |part: fn(&crate::algebra::C64) -> f64| {
                let rows: Vec<String> = (0..3)
                    .map(|i| {
                        let cells: Vec<String> = (0..3).map(|j| float(part(&rho.get(i, j)))).collect();
                        format!("[{}]", cells.join(", "))
                    })
                    .collect();
                format!("[{}]", rows.join(", "))
            };
            line("rho_re", rows(|z| z.re));
            line("rho_im", rows(|z| z.im));
        }
        line("t_end", float(self.t_end));
        line("dt_out", float(self.dt_out));
        line("tol", float(self.tol));
        line("solver", quoted(self.solver.name()));
        if let Some(p) = &self.outputs.csv {
            line("csv", quoted(&p.to_string_lossy()));
        }
        if let Some(p) = &self.outputs.svg {
            line("svg", quoted(&p.to_string_lossy()));
        }
        if !self.outputs.quantities.is_empty() {
            let q: Vec<String> = self.outputs.quantities.iter().map(|s| quoted(s)).collect();
            line("quantities", format!("[{}]", q.join(", ")));
        }
        if self.desk_scale {
            line("desk_scale", "true".into());
        }
        out
    }
}

fn float(x: f64) -> String {
    // Debug formatting is the shortest representation that parses back exactly.
    let s = format!("{x:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn string<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str, ConfigError> {
    v.as_str().ok_or_else(|| ConfigError::new(key, "expected a string"))
}

/// A number, or a string holding a small arithmetic expression.
pub(crate) fn number(key: &str, v: &toml::Value) -> Result<f64, ConfigError> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        toml::Value::String(s) => eval_expr(s).map_err(|e| ConfigError::new(key, e)),
        _ => Err(ConfigError::new(key, "expected a number")),
    }
}

fn matrix(key: &str, v: &toml::Value) -> Result<[[f64; 3]; 3], ConfigError> {
    let bad = || ConfigError::new(key, "expected a 3x3 array of numbers");
    let rows = v.as_array().filter(|r| r.len() == 3).ok_or_else(bad)?;
    let mut out = [[0.0; 3]; 3];
    for (i, row) in rows.iter().enumerate() {
        let cells = row.as_array().filter(|r| r.len() == 3).ok_or_else(bad)?;
        for (j, cell) in cells.iter().enumerate() {
            out[i][j] = number(key, cell)?;
        }
    }
    Ok(out)
}

/// Evaluates `+ - * /`, parentheses, `pi` and `sqrt(...)` over decimal literals.
pub fn eval_expr(src: &str) -> Result<f64, String> {
    let mut p = ExprParser {
        s: src.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(format!("unexpected {:?} in expression {src:?}", &src[p.pos..]));
    }
    if !v.is_finite() {
        return Err(format!("expression {src:?} is not finite"));
    }
    Ok(v)
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v += self.term()?;
            } else if self.eat(b'-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                v *= self.unary()?;
            } else if self.eat(b'/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<f64, String> {
        self.skip_ws();
        if self.eat(b'(') {
            let v = self.expr()?;
            return if self.eat(b')') { Ok(v) } else { Err("missing ')'".into()) };
        }
        let rest = &self.s[self.pos..];
        if rest.starts_with(b"pi") {
            self.pos += 2;
            return Ok(std::f64::consts::PI);
        }
        if rest.starts_with(b"sqrt") {
            self.pos += 4;
            if !self.eat(b'(') {
                return Err("expected '(' after sqrt".into());
            }
            let v = self.expr()?;
            if !self.eat(b')') {
                return Err("missing ')'".into());
            }
            return Ok(v.sqrt());
        }
        let start = self.pos;
        while let Some(&b) = self.s.get(self.pos) {
            let exp_sign = (b == b'-' || b == b'+')
                && self.pos > start
                && matches!(self.s[self.pos - 1], b'e' | b'E');
            if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let lit = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        lit.parse::<f64>()
            .map_err(|_| format!("expected a number at {:?}", String::from_utf8_lossy(&self.s[start..])))
    }
}
