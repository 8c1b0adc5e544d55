//! CSV and JSON artifacts, written atomically.

use std::fs;
use std::io;
use std::path::Path;

use magspec_core::bounds::BoundReport;
use magspec_core::eigen::SpectralResult;
use magspec_core::exact_torus::ExactMode;

use crate::run::SweepRow;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn to_csv(header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn spectrum_csv(r: &SpectralResult<f64>) -> Vec<u8> {
    let rows: Vec<Vec<String>> = r
        .eigenvalues
        .iter()
        .zip(&r.residuals)
        .enumerate()
        .map(|(j, (l, res))| vec![(j + 1).to_string(), num(*l), num(*res)])
        .collect();
    to_csv(&strings(&["j", "eigenvalue", "residual"]), &rows)
}

pub fn exact_csv(modes: &[ExactMode<f64>]) -> Vec<u8> {
    let dim = modes.first().map_or(0, |m| m.omega_coeffs.len());
    let mut header = strings(&["j", "eigenvalue"]);
    header.extend((1..=dim).map(|i| format!("omega_{i}")));
    let rows: Vec<Vec<String>> = modes
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let mut r = vec![(j + 1).to_string(), num(m.eigenvalue)];
            r.extend(m.omega_coeffs.iter().map(|c| c.to_string()));
            r
        })
        .collect();
    to_csv(&header, &rows)
}

pub fn reports_json(reports: &[BoundReport]) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialise");
    s.push('\n');
    s.into_bytes()
}

pub fn summary_csv(rows: &[(String, BoundReport)]) -> Vec<u8> {
    let header = strings(&["scenario", "name", "eq", "lhs", "rhs", "margin", "holds", "tol"]);
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(sc, r)| {
            vec![
                sc.clone(),
                r.name.clone(),
                r.eq.clone(),
                num(r.lhs),
                num(r.rhs),
                num(r.margin),
                r.holds.to_string(),
                num(r.tol),
            ]
        })
        .collect();
    to_csv(&header, &rows)
}

pub fn sweep_csv(param: &str, k: usize, rows: &[SweepRow]) -> Vec<u8> {
    let mut header = vec![param.to_string()];
    header.extend((1..=k).map(|j| format!("lambda_{j}")));
    header.extend(strings(&["gamma", "closed_rhs", "converged"]));
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![num(r.param)];
            v.extend((0..k).map(|j| r.eigenvalues.get(j).map_or(String::new(), |l| num(*l))));
            v.extend([num(r.gamma), num(r.closed_rhs), r.converged.to_string()]);
            v
        })
        .collect();
    to_csv(&header, &rows)
}
