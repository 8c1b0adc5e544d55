//! `magspec` command-line front-end: scenario files in, spectra and bound
//! reports out.
//!
//! Exit codes: 0 when every requested check holds, 2 when any fails (or a
//! solver does not converge), 1 on input errors.

pub mod config;
pub mod output;
pub mod run;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use magspec_core::bounds::BoundReport;

use config::{Config, Scenario, SweepParam};
use run::{RunError, Settings, Variation};

#[derive(Debug, Parser)]
#[command(name = "magspec", version, about = "Spectra of magnetic Schrödinger operators and their eigenvalue bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = "magspec-out")]
    pub out_dir: PathBuf,
    /// Overrides every scenario's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides every scenario's solver tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Overrides every scenario's eigenvalue count.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Replaces every report's rhs by a violated value (exercises the failure path).
    #[arg(long, global = true)]
    pub selftest_corrupt: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Verb {
    /// Closed-form flat-torus spectra for constant A and q.
    Exact,
    /// Numerical spectra only.
    Solve,
    /// Spectra plus all requested bound checks.
    Verify,
    /// One scenario over a range of a scalar parameter.
    Sweep,
    /// Built-in scenarios covering every check.
    Selftest,
}

/// Scenarios used by `selftest`.
pub const SELFTEST_CONFIG: &str = include_str!("selftest.toml");

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: String) -> Self {
        Self { code: 1, message }
    }
}

struct Loaded {
    path: String,
    source: String,
    config: Config,
}

impl Loaded {
    fn anchor(&self, scenario: &str, err: RunError) -> Failure {
        let line = config::scenario_line(&self.source, scenario);
        let at = line.map_or(String::new(), |l| format!(":{l}"));
        match err {
            RunError::Input(m) => Failure::input(format!("{}{at}: scenario `{scenario}`: {m}", self.path)),
            RunError::Solver(m) => Failure {
                code: 2,
                message: format!("{}{at}: scenario `{scenario}`: solver: {m}", self.path),
            },
        }
    }

    fn settings(&self, sc: &Scenario, cli: &Cli) -> Settings {
        let d = &self.config.defaults;
        Settings {
            k: cli.k.or(sc.k).unwrap_or(d.k),
            tol: cli.tol.or(sc.tol).unwrap_or(d.tol),
            seed: cli.seed.or(sc.seed).unwrap_or(d.seed),
        }
    }
}

fn load(path: &str, source: String) -> Result<Loaded, Failure> {
    let config: Config = toml::from_str(&source).map_err(|e| {
        let at = config::error_line(&source, &e).map_or(String::new(), |l| format!(":{l}"));
        Failure::input(format!("{path}{at}: {}", e.message()))
    })?;
    let loaded = Loaded { path: path.into(), source, config };
    let mut seen = HashSet::new();
    for sc in &loaded.config.scenario {
        let bad = |m: String| loaded.anchor(&sc.name, RunError::Input(m));
        if sc.name.is_empty() || !sc.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(bad("names may only use letters, digits, '-' and '_'".into()));
        }
        if !seen.insert(sc.name.clone()) {
            return Err(bad("duplicate scenario name".into()));
        }
        if sc.k == Some(0) {
            return Err(bad("k must be at least 1".into()));
        }
        if let Some(t) = sc.tol {
            if !(1e-12..=1e-4).contains(&t) {
                return Err(bad(format!("tol {t} outside [1e-12, 1e-4]")));
            }
        }
    }
    if loaded.config.defaults.k == 0 {
        return Err(Failure::input(format!("{path}: defaults.k must be at least 1")));
    }
    Ok(loaded)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    output::atomic_write(path, bytes).map_err(|e| Failure {
        code: 1,
        message: format!("writing {}: {e}", path.display()),
    })
}

fn corrupt(r: &mut BoundReport) {
    r.rhs = r.lhs - 1.0 - r.lhs.abs();
    r.margin = r.rhs - r.lhs;
    r.holds = r.margin >= -r.tol;
}

fn finish_reports(cli: &Cli, rows: Vec<(String, BoundReport)>) -> Result<i32, Failure> {
    write(&cli.out_dir.join("summary.csv"), &output::summary_csv(&rows))?;
    let mut all = true;
    for (sc, r) in &rows {
        all &= r.holds;
        println!(
            "{} {sc} {} lhs={} rhs={} margin={}",
            if r.holds { "PASS" } else { "FAIL" },
            r.name,
            output::num(r.lhs),
            output::num(r.rhs),
            output::num(r.margin)
        );
    }
    Ok(if all { 0 } else { 2 })
}

fn verify(cli: &Cli, loaded: &Loaded) -> Result<i32, Failure> {
    let results: Vec<Result<(String, Vec<BoundReport>), Failure>> = loaded
        .config
        .scenario
        .par_iter()
        .map(|sc| {
            let s = loaded.settings(sc, cli);
            let out = run::verify(sc, &s, &Variation::default()).map_err(|e| loaded.anchor(&sc.name, e))?;
            let mut reports = out.reports;
            if cli.selftest_corrupt {
                reports.iter_mut().for_each(corrupt);
            }
            write(&cli.out_dir.join(format!("{}.spectrum.csv", sc.name)), &output::spectrum_csv(&out.spectrum))?;
            write(&cli.out_dir.join(format!("{}.reports.json", sc.name)), &output::reports_json(&reports))?;
            Ok((out.name, reports))
        })
        .collect();
    let mut rows = Vec::new();
    let mut failure: Option<Failure> = None;
    for r in results {
        match r {
            Ok((name, reports)) => rows.extend(reports.into_iter().map(|x| (name.clone(), x))),
            Err(f) => {
                eprintln!("error: {}", f.message);
                if failure.as_ref().is_none_or(|g| f.code < g.code) {
                    failure = Some(f);
                }
            }
        }
    }
    if let Some(f) = failure {
        return Err(Failure { code: f.code, message: String::new() });
    }
    finish_reports(cli, rows)
}

fn solve(cli: &Cli, loaded: &Loaded) -> Result<i32, Failure> {
    let results: Vec<Result<bool, Failure>> = loaded
        .config
        .scenario
        .par_iter()
        .map(|sc| {
            let s = loaded.settings(sc, cli);
            let anchor = |e| loaded.anchor(&sc.name, e);
            let built = run::Built::new(sc, &Variation::default()).map_err(anchor)?;
            let r = run::solve(&built, s.k, &s).map_err(|e| loaded.anchor(&sc.name, e))?;
            write(&cli.out_dir.join(format!("{}.spectrum.csv", sc.name)), &output::spectrum_csv(&r))?;
            println!(
                "{} {} lambda_1={} pairs={}",
                if r.converged { "SOLVED" } else { "UNCONVERGED" },
                sc.name,
                output::num(r.eigenvalues[0]),
                r.eigenvalues.len()
            );
            Ok(r.converged)
        })
        .collect();
    let mut code = 0;
    for r in results {
        match r {
            Ok(true) => {}
            Ok(false) => code = code.max(2),
            Err(f) => {
                eprintln!("error: {}", f.message);
                return Err(Failure { code: f.code, message: String::new() });
            }
        }
    }
    Ok(code)
}

fn exact(cli: &Cli, loaded: &Loaded) -> Result<i32, Failure> {
    let mut rows = Vec::new();
    for sc in &loaded.config.scenario {
        let s = loaded.settings(sc, cli);
        let (modes, mut report) = run::exact(sc, &s).map_err(|e| loaded.anchor(&sc.name, e))?;
        if cli.selftest_corrupt {
            corrupt(&mut report);
        }
        write(&cli.out_dir.join(format!("{}.exact.csv", sc.name)), &output::exact_csv(&modes))?;
        write(
            &cli.out_dir.join(format!("{}.reports.json", sc.name)),
            &output::reports_json(std::slice::from_ref(&report)),
        )?;
        rows.push((sc.name.clone(), report));
    }
    finish_reports(cli, rows)
}

fn sweep(cli: &Cli, loaded: &Loaded) -> Result<i32, Failure> {
    let sw = loaded
        .config
        .sweep
        .as_ref()
        .ok_or_else(|| Failure::input(format!("{}: sweep needs a [sweep] table", loaded.path)))?;
    let sc = match &sw.scenario {
        Some(name) => loaded.config.scenario.iter().find(|s| &s.name == name),
        None => loaded.config.scenario.first(),
    }
    .ok_or_else(|| Failure::input(format!("{}: sweep scenario not found", loaded.path)))?;
    let points = sw
        .points()
        .map_err(|m| loaded.anchor(&sc.name, RunError::Input(format!("sweep: {m}"))))?;
    let s = loaded.settings(sc, cli);
    let param = match sw.param {
        SweepParam::FluxX => "flux_x",
        SweepParam::FluxY => "flux_y",
        SweepParam::QShift => "q_shift",
        SweepParam::AScale => "a_scale",
    };
    let variation = |v: f64| {
        let mut var = Variation::default();
        match sw.param {
            SweepParam::FluxX => var.flux[0] = v,
            SweepParam::FluxY => var.flux[1] = v,
            SweepParam::QShift => var.q_shift = v,
            SweepParam::AScale => var.a_scale = v,
        }
        var
    };
    let rows = if points.is_empty() {
        Vec::new()
    } else {
        let mu = run::geometry_mu(sc, &s).map_err(|e| loaded.anchor(&sc.name, e))?;
        points
            .par_iter()
            .map(|&v| run::sweep_point(sc, &s, &variation(v), mu, v))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| loaded.anchor(&sc.name, e))?
    };
    write(&cli.out_dir.join(format!("{}.sweep.csv", sc.name)), &output::sweep_csv(param, s.k, &rows))?;
    println!("SWEEP {} {param} points={}", sc.name, rows.len());
    Ok(if rows.iter().all(|r| r.converged) { 0 } else { 2 })
}

/// Runs the CLI and returns the process exit code.
pub fn run_cli(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    let loaded = match (&cli.verb, &cli.config) {
        (Verb::Selftest, None) => load("<selftest>", SELFTEST_CONFIG.to_string())?,
        (_, Some(path)) => {
            let source = fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            load(&path.display().to_string(), source)?
        }
        (_, None) => return Err(Failure::input("--config is required for this verb".into())),
    };
    if let Some(t) = cli.tol {
        if !(1e-12..=1e-4).contains(&t) {
            return Err(Failure::input(format!("--tol {t} outside [1e-12, 1e-4]")));
        }
    }
    if cli.k == Some(0) {
        return Err(Failure::input("--k must be at least 1".into()));
    }
    fs::create_dir_all(&cli.out_dir)
        .map_err(|e| Failure::input(format!("creating {}: {e}", cli.out_dir.display())))?;
    match cli.verb {
        Verb::Exact => exact(cli, &loaded),
        Verb::Solve => solve(cli, &loaded),
        Verb::Verify | Verb::Selftest => verify(cli, &loaded),
        Verb::Sweep => sweep(cli, &loaded),
    }
}
