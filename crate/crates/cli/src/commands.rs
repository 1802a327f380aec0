//! One function per subcommand. Each returns the files it wrote.

use std::path::{Path, PathBuf};

use serde::Serialize;

use floquet_work::asymptotic::{
    default_s_grid, diagnose, diagnostic_r, diagnostic_rc, DiagnosticCurve, ResonanceOptions,
    SingularityCase, DEFAULT_K_MAX,
};
use floquet_work::io::{
    cgf_csv, curve_csv, entropy_csv, histogram_csv, spectrum_csv, to_json, Csv, Provenance,
    SpectrumRecord,
};
use floquet_work::ising::{build_spectrum, SpectrumTable};
use floquet_work::work::{
    cgf_curve, cumulants_asymptotic, entropy_sweep, local_maxima, local_minima, log_excess,
    work_histogram_finite_l, CgfCurve, Periods,
};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Case label, set by `diagnose`.
    pub case: Option<SingularityCase>,
}

struct Writer {
    dir: PathBuf,
    format: OutputFormat,
    provenance: Provenance,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path, cfg: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format: cfg.format()?,
            provenance: Provenance::new(cfg.command.name(), cfg.values().clone()),
            files: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn csv(&mut self, name: &str, csv: Csv) -> Result<(), CliError> {
        if self.format.csv() {
            let text = self.provenance.annotate(csv).render();
            self.put(name, &text)?;
        }
        Ok(())
    }

    fn json<P: Serialize>(&mut self, name: &str, data: &P) -> Result<(), CliError> {
        if self.format.json() {
            self.report(name, data)?;
        }
        Ok(())
    }

    /// JSON written regardless of the format setting (reports have no CSV form).
    fn report<P: Serialize>(&mut self, name: &str, data: &P) -> Result<(), CliError> {
        let text = to_json(&self.provenance, data)?;
        self.put(name, &text)
    }

    fn finish(self, case: Option<SingularityCase>) -> Outcome {
        Outcome {
            files: self.files,
            case,
        }
    }
}

const DEFAULT_N_K: usize = 500;

fn spectrum(cfg: &RunConfig) -> Result<SpectrumTable<f64>, CliError> {
    let protocol = cfg.protocol()?;
    let integrator = cfg.integrator()?;
    Ok(build_spectrum(
        &protocol,
        cfg.n_k(DEFAULT_N_K)?,
        &integrator,
    )?)
}

pub fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let table = spectrum(cfg)?;
    let mut w = Writer::new(out, cfg)?;
    w.csv("spectrum.csv", spectrum_csv(&table))?;
    w.json("spectrum.json", &SpectrumRecord::from_table(&table))?;
    Ok(w.finish(None))
}

pub fn cmd_cgf(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let s = cfg.s_grid()?.ok_or_else(|| {
        CliError::Config("missing required key `task.s` (or `task.s_min`/`task.s_max`)".into())
    })?;
    if s.iter().any(|&x| !(x >= 0.0)) {
        return Err(CliError::Config(
            "`task.s` values must be non-negative".into(),
        ));
    }
    let ns: Vec<u64> = cfg.list("task.n")?.unwrap_or_default();
    let asymptotic: bool = cfg.get_or("task.asymptotic", true)?;
    if ns.is_empty() && !asymptotic {
        return Err(CliError::Config(
            "nothing to do: set `task.n` or `task.asymptotic = true`".into(),
        ));
    }
    let table = spectrum(cfg)?;
    let mut w = Writer::new(out, cfg)?;
    let mut curves: Vec<CgfCurve<f64>> = Vec::new();
    for &n in &ns {
        let c = cgf_curve(&table, Periods::Finite(n), &s)?;
        w.csv(&format!("cgf_n{n}.csv"), cgf_csv(&c))?;
        curves.push(c);
    }
    if asymptotic {
        let c = cgf_curve(&table, Periods::Infinite, &s)?;
        w.csv("cgf_asymptotic.csv", cgf_csv(&c))?;
        curves.push(c);
    }
    #[derive(Serialize)]
    struct CgfReport<'a> {
        curves: &'a [CgfCurve<f64>],
        cumulants_per_site: (f64, f64),
    }
    let k = cumulants_asymptotic(&table, 2)?;
    w.json(
        "cgf.json",
        &CgfReport {
            curves: &curves,
            cumulants_per_site: (k.k1_density(), k.k2_density()),
        },
    )?;
    Ok(w.finish(None))
}

fn curve_out(c: &DiagnosticCurve) -> Csv {
    let mut csv = curve_csv(&c.s, &c.values);
    for warning in &c.warnings {
        csv = csv.meta("warning", warning);
    }
    csv
}

pub fn cmd_diagnose(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let mut opts = ResonanceOptions::default();
    if let Some(t) = cfg.get("task.tol_res")? {
        opts.tol_res = t;
    }
    if let Some(t) = cfg.get("task.tol_cdt")? {
        opts.tol_cdt = t;
    }
    opts.l_max = cfg.get("task.l_max")?;
    let k_max: f64 = cfg.get_or("task.k_max", DEFAULT_K_MAX)?;
    let table = spectrum(cfg)?;
    let h_i = table.protocol.h_initial();
    let s = match cfg.s_grid()? {
        Some(s) => s,
        None => default_s_grid(h_i, 40)?,
    };
    let bundle = diagnose(&table, &opts, &s, Some(k_max))?;
    let mut w = Writer::new(out, cfg)?;
    w.report("resonance.json", &bundle.report)?;
    if let Some(fit) = &bundle.small_k {
        w.report("small_k.json", fit)?;
    }
    w.report("diagnosis.json", &bundle.diagnosis)?;
    match bundle.diagnosis.case {
        SingularityCase::C => {
            let mut csv = Csv::new(&["s", "value"]);
            for &x in &s {
                csv.row(&[x, log_excess(&table, x)?.exp()]);
            }
            w.csv("excess.csv", csv.meta("value", "ln G/L - g_inf"))?;
        }
        _ => {
            // both gapped diagnostics, so the wrong one can be seen failing
            let r = match bundle.diagnosis.case {
                SingularityCase::A => bundle.curve.clone().expect("case a carries R"),
                _ => diagnostic_r(&table, &s)?,
            };
            let rc = match bundle.diagnosis.case {
                SingularityCase::B => bundle.curve.clone().expect("case b carries R_c"),
                _ => diagnostic_rc(&table, &s)?,
            };
            w.csv("R.csv", curve_out(&r))?;
            w.csv("Rc.csv", curve_out(&rc))?;
        }
    }
    Ok(w.finish(Some(bundle.diagnosis.case)))
}

pub fn cmd_entropy(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    if let Some(h0) = cfg.get::<f64>("protocol.h0")? {
        if h0 != 1.0 {
            return Err(CliError::Config(format!(
                "`protocol.h0` = {h0}: the entropy sweep drives h(t) = 1 + A cos ω₀t"
            )));
        }
    }
    let amplitude: f64 = cfg.get_or("protocol.amplitude", 1.0)?;
    let beta: f64 = cfg.require("task.beta")?;
    let length: usize = cfg.get_or("task.length", 1000)?;
    let lo: f64 = cfg.require("task.omega_min")?;
    let hi: f64 = cfg.require("task.omega_max")?;
    let n: usize = cfg.get_or("task.omega_points", 400)?;
    if !(lo > 0.0) || !(hi > lo) || n < 3 {
        return Err(CliError::Config(
            "ω₀ sweep needs 0 < omega_min < omega_max and ≥ 3 points".into(),
        ));
    }
    let omegas: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let integrator = cfg.integrator()?;
    let curve = entropy_sweep(
        amplitude,
        &omegas,
        beta,
        length,
        cfg.n_k(length / 2)?,
        &integrator,
    )?;
    let mut w = Writer::new(out, cfg)?;
    w.csv("entropy.csv", entropy_csv(&curve))?;
    w.json("entropy.json", &curve)?;
    #[derive(Serialize)]
    struct Extrema {
        minima: Vec<f64>,
        maxima: Vec<f64>,
    }
    let ext = Extrema {
        minima: local_minima(&curve.entropy)
            .into_iter()
            .map(|i| omegas[i])
            .collect(),
        maxima: local_maxima(&curve.entropy)
            .into_iter()
            .map(|i| omegas[i])
            .collect(),
    };
    w.report("extrema.json", &ext)?;
    Ok(w.finish(None))
}

pub fn cmd_workhist(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let length: usize = cfg.require("task.length")?;
    if length == 0 || length % 2 == 1 || length > 20_000 {
        return Err(CliError::Config(format!(
            "`task.length` = {length}: must be even, in (0, 20000]"
        )));
    }
    if let Some(n) = cfg.get::<usize>("grid.n_k")? {
        if n != length / 2 {
            return Err(CliError::Config(format!(
                "`grid.n_k` = {n} disagrees with `task.length`/2 = {}",
                length / 2
            )));
        }
    }
    let bin_width: f64 = cfg.require("task.bin_width")?;
    let periods = match cfg.raw("task.periods").unwrap_or("infinite") {
        "infinite" => Periods::Infinite,
        n => Periods::Finite(
            n.parse()
                .map_err(|e| CliError::Config(format!("`task.periods` = `{n}`: {e}")))?,
        ),
    };
    let protocol = cfg.protocol()?;
    let table = build_spectrum(&protocol, length / 2, &cfg.integrator()?)?;
    let h = work_histogram_finite_l(&table, periods, length, bin_width)?;
    let mut w = Writer::new(out, cfg)?;
    w.csv("histogram.csv", histogram_csv(&h))?;
    w.json("histogram.json", &h)?;
    Ok(w.finish(None))
}
