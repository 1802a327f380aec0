//! Flat `key = value` run configuration with dotted section keys.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use floquet_work::ising::DriveProtocol;
use floquet_work::numerics::IntegratorConfig;

use crate::error::CliError;

const COMMON_KEYS: &[&str] = &[
    "protocol.kind",
    "protocol.h0",
    "protocol.amplitude",
    "protocol.omega",
    "protocol.phase",
    "protocol.table",
    "grid.n_k",
    "grid.integrator",
    "grid.steps_per_period",
    "grid.rel_tol",
    "grid.max_steps",
    "grid.max_phase_step",
    "output.dir",
    "output.format",
];

const S_GRID_KEYS: &[&str] = &[
    "task.s",
    "task.s_min",
    "task.s_max",
    "task.s_points",
    "task.s_spacing",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Cgf,
    Diagnose,
    Entropy,
    Workhist,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Cgf => "cgf",
            Command::Diagnose => "diagnose",
            Command::Entropy => "entropy",
            Command::Workhist => "workhist",
        }
    }

    fn task_keys(&self) -> Vec<&'static str> {
        match self {
            Command::Spectrum => vec![],
            Command::Cgf => [S_GRID_KEYS, &["task.n", "task.asymptotic"]].concat(),
            Command::Diagnose => [
                S_GRID_KEYS,
                &["task.tol_res", "task.tol_cdt", "task.l_max", "task.k_max"],
            ]
            .concat(),
            Command::Entropy => vec![
                "task.beta",
                "task.length",
                "task.omega_min",
                "task.omega_max",
                "task.omega_points",
            ],
            Command::Workhist => vec!["task.length", "task.bin_width", "task.periods"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(&self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(&self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

/// Validated key/value pairs plus the directory of the config file (for
/// resolving relative table paths).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    values: BTreeMap<String, String>,
    base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, command: Command, base_dir: &Path) -> Result<Self, CliError> {
        let allowed: Vec<&str> = COMMON_KEYS
            .iter()
            .copied()
            .chain(command.task_keys())
            .collect();
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !allowed.contains(&k) {
                return Err(CliError::Config(format!(
                    "line {}: unknown key `{k}` for `{}`",
                    i + 1,
                    command.name()
                )));
            }
            if v.is_empty() {
                return Err(CliError::Config(format!(
                    "line {}: empty value for `{k}`",
                    i + 1
                )));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Config(format!(
                    "line {}: duplicate key `{k}`",
                    i + 1
                )));
            }
        }
        Ok(Self {
            command,
            values,
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("`{key}` = `{v}`: {e}"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|e| CliError::Config(format!("`{key}` entry `{}`: {e}", x.trim())))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    pub fn format(&self) -> Result<OutputFormat, CliError> {
        match self.raw("output.format").unwrap_or("both") {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(CliError::Config(format!(
                "`output.format` = `{other}`: expected csv, json or both"
            ))),
        }
    }

    pub fn output_dir(&self, cli: Option<&Path>) -> Result<PathBuf, CliError> {
        match (cli, self.raw("output.dir")) {
            (Some(p), _) => Ok(p.to_path_buf()),
            (None, Some(d)) => Ok(self.base_dir.join(d)),
            (None, None) => Err(CliError::Config(
                "no output directory: pass --out or set `output.dir`".into(),
            )),
        }
    }

    pub fn protocol(&self) -> Result<DriveProtocol<f64>, CliError> {
        let kind = self.raw("protocol.kind").unwrap_or("sinusoidal");
        let omega: f64 = self.require("protocol.omega")?;
        let p = match kind {
            "sinusoidal" => DriveProtocol::sinusoidal(
                self.require("protocol.h0")?,
                self.require("protocol.amplitude")?,
                omega,
                self.get_or("protocol.phase", 0.0)?,
            ),
            "constant" => DriveProtocol::constant(self.require("protocol.h0")?, omega),
            "tabulated" => {
                let path = self
                    .base_dir
                    .join(self.require::<String>("protocol.table")?);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let samples = parse_samples(&text)?;
                DriveProtocol::tabulated(&samples, omega)
            }
            other => {
                return Err(CliError::Config(format!(
                    "`protocol.kind` = `{other}`: expected sinusoidal, constant or tabulated"
                )))
            }
        };
        p.map_err(CliError::from)
    }

    pub fn n_k(&self, default: usize) -> Result<usize, CliError> {
        self.get_or("grid.n_k", default)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, CliError> {
        let mut cfg = match self.raw("grid.integrator").unwrap_or("rk4") {
            "rk4" => IntegratorConfig::fixed(self.get_or("grid.steps_per_period", 512)?),
            "adaptive" => IntegratorConfig::adaptive(self.get_or("grid.rel_tol", 1e-10)?),
            other => {
                return Err(CliError::Config(format!(
                    "`grid.integrator` = `{other}`: expected rk4 or adaptive"
                )))
            }
        };
        if let Some(m) = self.get("grid.max_steps")? {
            cfg.max_steps = m;
        }
        if let Some(p) = self.get("grid.max_phase_step")? {
            cfg.max_phase_step = Some(p);
        }
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    /// `task.s` as an explicit list, or a `task.s_min..task.s_max` grid.
    pub fn s_grid(&self) -> Result<Option<Vec<f64>>, CliError> {
        if let Some(s) = self.list::<f64>("task.s")? {
            return Ok(Some(s));
        }
        let (lo, hi) = match (
            self.get::<f64>("task.s_min")?,
            self.get::<f64>("task.s_max")?,
        ) {
            (None, None) => return Ok(None),
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                return Err(CliError::Config(
                    "`task.s_min` and `task.s_max` go together".into(),
                ))
            }
        };
        let n: usize = self.get_or("task.s_points", 50)?;
        if n < 2 || !(hi > lo) {
            return Err(CliError::Config(
                "s grid needs s_max > s_min and s_points ≥ 2".into(),
            ));
        }
        match self.raw("task.s_spacing").unwrap_or("linear") {
            "linear" => Ok(Some(
                (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect(),
            )),
            "log" => floquet_work::asymptotic::log_grid(lo, hi, n)
                .map(Some)
                .map_err(CliError::from),
            other => Err(CliError::Config(format!(
                "`task.s_spacing` = `{other}`: expected linear or log"
            ))),
        }
    }
}

/// Drive samples: numbers separated by whitespace, commas or newlines;
/// `#` starts a comment.
fn parse_samples(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            out.push(
                tok.parse()
                    .map_err(|e| CliError::Config(format!("drive table entry `{tok}`: {e}")))?,
            );
        }
    }
    Ok(out)
}
