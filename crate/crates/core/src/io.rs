//! CSV and JSON serialisation of tables, curves and reports.
//!
//! CSV files are comma separated with LF line endings. Metadata lines start
//! with `# ` and precede the header row (or follow the last data row for
//! footers). Floats use 17 significant digits in scientific notation so
//! output is byte-identical for identical input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::protocol::ProtocolSpec;
use crate::ising::spectrum::{GridSpec, SmallKModel, SpectrumTable};
use crate::numerics::IntegratorConfig;
use crate::scalar::Real;
use crate::work::cgf::CgfCurve;
use crate::work::cumulants::EntropyCurve;
use crate::work::histogram::WorkHistogram;

/// `x` with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Row-oriented CSV builder.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
    footer: Vec<(String, String)>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn footer(mut self, key: &str, value: impl ToString) -> Self {
        self.footer.push((key.into(), value.to_string()));
        self
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.header.len());
        self.rows.push(values.to_vec());
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&x| fmt_float(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (k, v) in &self.footer {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out
    }
}

/// Parsed CSV: metadata/footer comments and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub comments: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv> {
    let mut comments = Vec::new();
    let mut header = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(c) = line.strip_prefix("# ") {
            let (k, v) = c.split_once(": ").unwrap_or((c, ""));
            comments.push((k.to_string(), v.to_string()));
        } else if line.trim().is_empty() {
            continue;
        } else if header.is_none() {
            header = Some(
                line.split(',')
                    .map(|s| s.trim().to_string())
                    .collect::<Vec<_>>(),
            );
        } else {
            let row = line
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {c:?}: {e}", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
    }
    Ok(ParsedCsv {
        comments,
        header: header.ok_or_else(|| Error::Parse("missing header row".into()))?,
        rows,
    })
}

/// Where an artifact came from: tool, command and the full run config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(command: &str, config: BTreeMap<String, String>) -> Self {
        Self {
            tool: "floquet-work".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
        }
    }

    /// Adds the provenance as CSV metadata lines.
    pub fn annotate(&self, mut csv: Csv) -> Csv {
        csv = csv
            .meta("tool", format!("{} {}", self.tool, self.version))
            .meta("command", &self.command);
        for (k, v) in &self.config {
            csv = csv.meta(&format!("config.{k}"), v);
        }
        csv
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<P> {
    pub provenance: Provenance,
    pub data: P,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<P: Serialize>(provenance: &Provenance, data: &P) -> Result<String> {
    let doc = Document {
        provenance: provenance.clone(),
        data,
    };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub k: f64,
    pub energy: f64,
    pub mu: f64,
    pub r_plus_sq: f64,
    pub xi: f64,
    pub alignment: f64,
    pub degenerate: bool,
    pub zone_edge: bool,
}

/// Serialisable view of a spectrum table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub protocol: ProtocolSpec,
    pub integrator: IntegratorConfig,
    pub grid: GridSpec,
    pub small_k: Option<SmallKModel<f64>>,
    pub modes: Vec<ModeRecord>,
}

impl SpectrumRecord {
    pub fn from_table<T: Real>(table: &SpectrumTable<T>) -> Self {
        Self {
            protocol: table.protocol.spec(),
            integrator: table.integrator,
            grid: table.grid,
            small_k: table.small_k.map(|m| SmallKModel {
                offset: m.offset.as_f64(),
                a_x: m.a_x.as_f64(),
                a_y: m.a_y.as_f64(),
                a_z: m.a_z.as_f64(),
                h_initial: m.h_initial.as_f64(),
            }),
            modes: table
                .modes
                .iter()
                .map(|m| ModeRecord {
                    k: m.k.as_f64(),
                    energy: m.energy.as_f64(),
                    mu: m.mu.as_f64(),
                    r_plus_sq: m.r_plus_sq.as_f64(),
                    xi: m.xi.as_f64(),
                    alignment: m.alignment.as_f64(),
                    degenerate: m.degenerate,
                    zone_edge: m.zone_edge,
                })
                .collect(),
        }
    }
}

/// Columns `k, E_k, mu_k, r_plus_sq, xi_k`.
pub fn spectrum_csv<T: Real>(table: &SpectrumTable<T>) -> Csv {
    let mut csv = Csv::new(&["k", "E_k", "mu_k", "r_plus_sq", "xi_k"]).meta("modes", table.len());
    for m in &table.modes {
        csv.row(&[
            m.k.as_f64(),
            m.energy.as_f64(),
            m.mu.as_f64(),
            m.r_plus_sq.as_f64(),
            m.xi.as_f64(),
        ]);
    }
    csv
}

/// Columns `s, value`.
pub fn curve_csv(s: &[f64], values: &[f64]) -> Csv {
    let mut csv = Csv::new(&["s", "value"]);
    for (&x, &y) in s.iter().zip(values) {
        csv.row(&[x, y]);
    }
    csv
}

pub fn cgf_csv<T: Real>(curve: &CgfCurve<T>) -> Csv {
    let s: Vec<f64> = curve.s.iter().map(|x| x.as_f64()).collect();
    let v: Vec<f64> = curve.values.iter().map(|x| x.as_f64()).collect();
    let periods = match curve.periods {
        crate::work::cgf::Periods::Finite(n) => n.to_string(),
        crate::work::cgf::Periods::Infinite => "infinite".into(),
    };
    curve_csv(&s, &v)
        .meta("periods", periods)
        .meta("temperature", "zero")
}

/// Columns `omega, entropy`.
pub fn entropy_csv<T: Real>(curve: &EntropyCurve<T>) -> Csv {
    let mut csv = Csv::new(&["omega", "entropy"])
        .meta("beta", fmt_float(curve.beta.as_f64()))
        .meta("length", curve.length)
        .meta("amplitude", fmt_float(curve.amplitude.as_f64()))
        .meta("modes", curve.n_k);
    for (w, s) in curve.omegas.iter().zip(&curve.entropy) {
        csv.row(&[w.as_f64(), s.as_f64()]);
    }
    csv
}

/// Columns `lo, hi, probability, mean`; the no-excitation weight goes in
/// the metadata, the total mass in the footer.
pub fn histogram_csv<T: Real>(h: &WorkHistogram<T>) -> Csv {
    let periods = match h.periods {
        crate::work::cgf::Periods::Finite(n) => n.to_string(),
        crate::work::cgf::Periods::Infinite => "infinite".into(),
    };
    let mut csv = Csv::new(&["lo", "hi", "probability", "mean"])
        .meta("length", h.length)
        .meta("periods", periods)
        .meta("delta0_weight", fmt_float(h.delta0_weight.as_f64()))
        .meta("threshold", fmt_float(h.threshold.as_f64()))
        .meta("bin_width", fmt_float(h.bin_width.as_f64()))
        .meta("time_averaged", h.time_averaged);
    for b in &h.bins {
        csv.row(&[
            b.lo.as_f64(),
            b.hi.as_f64(),
            b.probability.as_f64(),
            b.mean.as_f64(),
        ]);
    }
    csv.footer(
        "total_probability",
        fmt_float(h.total_probability().as_f64()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{build_spectrum, DriveProtocol};

    #[test]
    fn round_trip_and_format() {
        let mut c = Csv::new(&["s", "value"]).meta("a", 1).footer("z", "end");
        c.row(&[0.1, -2.5e-300]);
        let text = c.render();
        assert!(!text.contains('\r'));
        assert!(text.contains("1.0000000000000001e-1,-2.5000000000000000e-300\n"));
        let p = parse_csv(&text).unwrap();
        assert_eq!(p.header, vec!["s", "value"]);
        assert_eq!(p.rows, vec![vec![0.1, -2.5e-300]]);
        assert_eq!(p.comments.len(), 2);
    }

    #[test]
    fn spectrum_output_is_deterministic() {
        let p = DriveProtocol::<f64>::sinusoidal(1.0, 1.0, 2.0, 0.0).unwrap();
        let t = build_spectrum(&p, 100, &IntegratorConfig::default()).unwrap();
        let a = spectrum_csv(&t).render();
        let b =
            spectrum_csv(&build_spectrum(&p, 100, &IntegratorConfig::default()).unwrap()).render();
        assert_eq!(a, b);
        assert_eq!(parse_csv(&a).unwrap().rows.len(), 100);
        let prov = Provenance::new("spectrum", BTreeMap::new());
        let json = to_json(&prov, &SpectrumRecord::from_table(&t)).unwrap();
        let back: Document<SpectrumRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.data.modes.len(), 100);
    }
}
