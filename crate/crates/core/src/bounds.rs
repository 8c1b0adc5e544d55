//! Explicit eigenvalue bounds for `H_{A,q}` evaluated from scalar quantities
//! and spectra, with self-auditing reports.
//!
//! Every report is normalised to the form `lhs ≤ rhs`, so a lower bound such
//! as the Riesz-mean inequality stores the bound as `lhs` and the spectral
//! sum as `rhs`. `margin = rhs − lhs` except for equality reports
//! (`−|rhs − lhs|`) and strictness reports (`rhs − lhs − required gap`).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Echoed inputs of a report, keyed by name.
pub type Inputs = BTreeMap<String, f64>;

/// Threshold below which `λ₁` counts as zero in flux-quantization checks.
pub const ZERO_EIGENVALUE: f64 = 1e-9;
/// Relative agreement required between gauge-equivalent spectra.
pub const GAUGE_TOL: f64 = 1e-9;
/// Slack of the discrete diamagnetic inequality, relative to `max(1, |λ₁|)`.
pub const DIAMAGNETIC_SLACK: f64 = 1e-12;
/// `‖B‖²` below which a potential counts as closed.
pub const CLOSED_FIELD_TOL: f64 = 1e-10;
/// Weyl constant `W₂ = 4π² / ω₂` with `ω₂ = π`.
pub const WEYL_2: f64 = 4.0 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub eq: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    pub tol: f64,
    pub inputs: Inputs,
}

impl BoundReport {
    fn finish(name: &str, eq: &str, lhs: f64, rhs: f64, margin: f64, tol: f64, inputs: Inputs) -> Self {
        Self {
            name: name.into(),
            eq: eq.into(),
            lhs,
            rhs,
            margin,
            holds: margin >= -tol,
            tol,
            inputs,
        }
    }

    /// `lhs ≤ rhs` up to `tol`.
    pub fn inequality(name: &str, eq: &str, lhs: f64, rhs: f64, tol: f64, inputs: Inputs) -> Self {
        Self::finish(name, eq, lhs, rhs, rhs - lhs, tol, inputs)
    }

    /// `lhs = rhs` up to `tol`.
    pub fn equality(name: &str, eq: &str, lhs: f64, rhs: f64, tol: f64, inputs: Inputs) -> Self {
        Self::finish(name, eq, lhs, rhs, -(rhs - lhs).abs(), tol, inputs)
    }

    /// `lhs < rhs` by at least `gap`.
    pub fn strict(name: &str, eq: &str, lhs: f64, rhs: f64, gap: f64, inputs: Inputs) -> Self {
        let mut r = Self::finish(name, eq, lhs, rhs, rhs - lhs - gap, 0.0, inputs);
        r.inputs.insert("required_gap".into(), gap);
        r
    }

    /// Recomputes `lhs` and `rhs` from the echoed inputs.
    pub fn recompute(&self) -> Result<(f64, f64)> {
        let inp = &self.inputs;
        let get = |k: &str| {
            inp.get(k)
                .copied()
                .ok_or_else(|| invalid(format!("report {} lacks input {k}", self.name)))
        };
        let gamma_of = || -> Result<f64> {
            gamma(&Quantities {
                volume: get("volume")?,
                dist2: get("dist2")?,
                field_norm2: get("field_norm2")?,
                mu: get("mu")?,
                q_integral: get("q_integral")?,
                genus: None,
            })
        };
        match self.name.as_str() {
            "flat_torus_equality" => Ok((get("lambda1")?, get("dist2")? / get("volume")? + get("q_const")?)),
            "lambda1_general" => Ok((get("lambda_001")?, gamma_of()?)),
            "lambda1_closed" | "lambda1_closed_flat_equality" | "lambda1_closed_conformal_strict" => Ok((
                get("lambda_001")?,
                (get("dist2")? + get("q_integral")?) / get("volume")?,
            )),
            "lambda2_surface" => {
                let g = get("genus")?;
                Ok((
                    get("lambda_002")? * get("volume")?,
                    8.0 * PI * ((g + 3.0) / 2.0).floor() + get("field_norm2")? / get("mu")? + get("dist2")? + get("q_integral")?,
                ))
            }
            "riesz_mean" => {
                let z = get("z")?;
                let eigs = read_eigs(inp, "lambda")?;
                Ok((riesz_bound(get("volume")?, z, gamma_of()?), riesz_sum(&eigs, z)))
            }
            "eigenvalue_sum" => {
                let k = get("k")?;
                let eigs = read_eigs(inp, "lambda")?;
                let mean = eigs.iter().take(k as usize).sum::<f64>() / k;
                Ok((mean, 0.5 * WEYL_2 * (k - 1.0) / get("volume")? + gamma_of()?))
            }
            "kth_eigenvalue" => {
                let k = get("k")?;
                let eigs = read_eigs(inp, "lambda")?;
                Ok((eigs[k as usize - 1], kth_bound(k as usize, get("volume")?, gamma_of()?)))
            }
            "heat_trace" => {
                let t = get("t")?;
                let eigs = read_eigs(inp, "lambda")?;
                Ok((
                    get("volume")? / (4.0 * PI * t) * (-t * gamma_of()?).exp(),
                    eigs.iter().map(|l| (-t * l).exp()).sum(),
                ))
            }
            "comparison" => Ok((get("lambda_magnetic")?, get("lambda_scalar")?)),
            "diamagnetic" => Ok((get("lambda1_free")?, get("lambda1_magnetic")?)),
            "flux_quantization" => Ok((get("lambda1")?, ZERO_EIGENVALUE)),
            "solver_certificate" => Ok((get("max_relative_residual")?, get("solver_tol")?)),
            "gauge_invariance" => {
                let a = read_eigs(inp, "lambda")?;
                let b = read_eigs(inp, "gauged")?;
                Ok((max_relative_deviation(&a, &b), GAUGE_TOL))
            }
            other => Err(invalid(format!("no recomputation rule for report {other}"))),
        }
    }

    /// True when recomputation reproduces `lhs`, `rhs` to 1e-12 (relative to
    /// `max(1, |·|)`) and `holds` agrees with `margin ≥ −tol`.
    pub fn audit(&self) -> Result<bool> {
        let (l, r) = self.recompute()?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        let finite = self.inputs.values().all(|v| v.is_finite());
        Ok(close(l, self.lhs) && close(r, self.rhs) && self.holds == (self.margin >= -self.tol) && finite)
    }
}

/// Scalar geometric and potential data entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantities {
    pub volume: f64,
    /// `d(h, L_Z)²`.
    pub dist2: f64,
    /// `‖B‖²`.
    pub field_norm2: f64,
    /// First eigenvalue on coexact 1-forms.
    pub mu: f64,
    /// `∫ q`.
    pub q_integral: f64,
    pub genus: Option<u32>,
}

impl Quantities {
    fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(invalid("mu must be positive"));
        }
        if !(self.volume > 0.0) {
            return Err(invalid("volume must be positive"));
        }
        if !(self.field_norm2 >= 0.0 && self.dist2 >= 0.0) || !self.q_integral.is_finite() {
            return Err(invalid("field norm and distance must be nonnegative"));
        }
        Ok(())
    }

    fn echo(&self) -> Inputs {
        let mut m = Inputs::new();
        m.insert("volume".into(), self.volume);
        m.insert("dist2".into(), self.dist2);
        m.insert("field_norm2".into(), self.field_norm2);
        m.insert("mu".into(), self.mu);
        m.insert("q_integral".into(), self.q_integral);
        if let Some(g) = self.genus {
            m.insert("genus".into(), g as f64);
        }
        m
    }
}

/// `Γ = (d² + ‖B‖²/μ + ∫q) / |M|`.
pub fn gamma(q: &Quantities) -> Result<f64> {
    q.validate()?;
    Ok((q.dist2 + q.field_norm2 / q.mu + q.q_integral) / q.volume)
}

/// `max(1e-9, 10·solver_tol·|rhs|)`.
pub fn default_tol(solver_tol: f64, rhs: f64) -> f64 {
    (10.0 * solver_tol * rhs.abs()).max(1e-9)
}

fn echo_eigs(m: &mut Inputs, prefix: &str, eigs: &[f64]) {
    for (j, l) in eigs.iter().enumerate() {
        m.insert(format!("{prefix}_{:03}", j + 1), *l);
    }
}

fn read_eigs(m: &Inputs, prefix: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    while let Some(v) = m.get(&format!("{prefix}_{:03}", out.len() + 1)) {
        out.push(*v);
    }
    Ok(out)
}

fn need(eigs: &[f64], k: usize) -> Result<()> {
    if eigs.len() < k {
        return Err(Error::Precondition(format!("need {k} eigenvalues, have {}", eigs.len())));
    }
    Ok(())
}

/// `λ₁ ≤ Γ`.
pub fn check_lambda1_general(q: &Quantities, eigs: &[f64], tol: f64) -> Result<BoundReport> {
    need(eigs, 1)?;
    let rhs = gamma(q)?;
    let mut inputs = q.echo();
    echo_eigs(&mut inputs, "lambda", &eigs[..1]);
    Ok(BoundReport::inequality(
        "lambda1_general",
        "λ1 ≤ (d² + ‖B‖²/μ + ∫q)/|M|",
        eigs[0],
        rhs,
        tol,
        inputs,
    ))
}

/// Which refinement of the closed-potential bound applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedCase {
    /// Plain inequality.
    General,
    /// Flat torus with constant `q`: equality up to `tol`.
    FlatConstantQ,
    /// Non-flat conformal torus with constant `q`: strict, by more than `gap`.
    ConformalConstantQ { gap: f64 },
}

/// `λ₁ ≤ (d² + ∫q)/|M|` for closed `A`.
pub fn check_lambda1_closed(q: &Quantities, eigs: &[f64], tol: f64, case: ClosedCase) -> Result<BoundReport> {
    need(eigs, 1)?;
    q.validate()?;
    if q.field_norm2 > CLOSED_FIELD_TOL {
        return Err(Error::Precondition(format!(
            "closed-potential bound needs B = 0, got ‖B‖² = {:e}",
            q.field_norm2
        )));
    }
    let rhs = (q.dist2 + q.q_integral) / q.volume;
    let mut inputs = q.echo();
    echo_eigs(&mut inputs, "lambda", &eigs[..1]);
    let eq = "λ1 ≤ (d² + ∫q)/|M|";
    Ok(match case {
        ClosedCase::General => BoundReport::inequality("lambda1_closed", eq, eigs[0], rhs, tol, inputs),
        ClosedCase::FlatConstantQ => {
            BoundReport::equality("lambda1_closed_flat_equality", "λ1 = d²/|M| + q", eigs[0], rhs, tol, inputs)
        }
        ClosedCase::ConformalConstantQ { gap } => {
            BoundReport::strict("lambda1_closed_conformal_strict", "λ1 < (d² + ∫q)/|M|", eigs[0], rhs, gap, inputs)
        }
    })
}

/// `λ₂·|M| ≤ 8π⌊(γ+3)/2⌋ + ‖B‖²/μ + d² + ∫q` on closed surfaces of genus 0 or 1.
pub fn check_lambda2_surface(q: &Quantities, eigs: &[f64], tol: f64) -> Result<BoundReport> {
    q.validate()?;
    let genus = q
        .genus
        .ok_or_else(|| Error::Precondition("surface genus is required".into()))?;
    if genus >= 2 {
        return Err(Error::Unsupported(format!("genus {genus} surfaces")));
    }
    need(eigs, 2)?;
    let conformal = 8.0 * PI * ((genus as f64 + 3.0) / 2.0).floor();
    let rhs = conformal + q.field_norm2 / q.mu + q.dist2 + q.q_integral;
    let mut inputs = q.echo();
    echo_eigs(&mut inputs, "lambda", &eigs[..2]);
    Ok(BoundReport::inequality(
        "lambda2_surface",
        "λ2·|M| ≤ 8π⌊(γ+3)/2⌋ + ‖B‖²/μ + d² + ∫q",
        eigs[1] * q.volume,
        rhs,
        tol,
        inputs,
    ))
}

fn riesz_bound(volume: f64, z: f64, gamma: f64) -> f64 {
    let p = (z - gamma).max(0.0);
    volume * p * p / (2.0 * WEYL_2)
}

fn riesz_sum(eigs: &[f64], z: f64) -> f64 {
    eigs.iter().map(|l| (z - l).max(0.0)).sum()
}

/// `Σ(z − λⱼ)₊ ≥ |Ω|(z − Γ)₊² / (8π)` for planar domains.
///
/// `complete_below` certifies that `eigs` holds every eigenvalue below it.
pub fn check_riesz(q: &Quantities, eigs: &[f64], z: f64, complete_below: f64, tol: f64) -> Result<BoundReport> {
    let g = gamma(q)?;
    if z > complete_below {
        return Err(Error::Precondition(format!(
            "eigenvalue list is only complete below {complete_below}, z = {z}"
        )));
    }
    let used: Vec<f64> = eigs.iter().copied().filter(|l| *l < z).collect();
    let mut inputs = q.echo();
    inputs.insert("z".into(), z);
    echo_eigs(&mut inputs, "lambda", &used);
    Ok(BoundReport::inequality(
        "riesz_mean",
        "|Ω|(z − Γ)₊²/(8π) ≤ Σ(z − λj)₊",
        riesz_bound(q.volume, z, g),
        riesz_sum(&used, z),
        tol,
        inputs,
    ))
}

fn kth_bound(k: usize, volume: f64, gamma: f64) -> f64 {
    // 2·(n+2)^{2/n}·W_n·((k−1)/|Ω|)^{2/n} at n = 2.
    (2.0 * 4.0 * WEYL_2 * (k as f64 - 1.0) / volume).max(2.0 * gamma)
}

/// Mean of the first `k` eigenvalues, `(1/k)Σλⱼ ≤ ½·W₂·(k−1)/|Ω| + Γ`.
pub fn check_eigenvalue_sum(q: &Quantities, eigs: &[f64], k: usize, tol: f64) -> Result<BoundReport> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    need(eigs, k)?;
    let g = gamma(q)?;
    let mean = eigs[..k].iter().sum::<f64>() / k as f64;
    let mut inputs = q.echo();
    inputs.insert("k".into(), k as f64);
    echo_eigs(&mut inputs, "lambda", &eigs[..k]);
    Ok(BoundReport::inequality(
        "eigenvalue_sum",
        "(1/k)Σλj ≤ (n/(n+2))·W_n·((k−1)/|Ω|)^{2/n} + Γ",
        mean,
        0.5 * WEYL_2 * (k as f64 - 1.0) / q.volume + g,
        tol,
        inputs,
    ))
}

/// `λ_k ≤ max(2(n+2)^{2/n}·W_n·((k−1)/|Ω|)^{2/n}, 2Γ)`, valid when the
/// first `k` eigenvalues of `Δ + q` sum to a nonnegative number (up to `tol`).
pub fn check_kth_eigenvalue(q: &Quantities, eigs: &[f64], k: usize, scalar_sum: f64, tol: f64) -> Result<BoundReport> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    need(eigs, k)?;
    if scalar_sum < -tol {
        return Err(Error::Precondition(format!(
            "sum of the first {k} eigenvalues of Δ + q is negative ({scalar_sum})"
        )));
    }
    let g = gamma(q)?;
    let mut inputs = q.echo();
    inputs.insert("k".into(), k as f64);
    inputs.insert("scalar_sum".into(), scalar_sum);
    echo_eigs(&mut inputs, "lambda", &eigs[..k]);
    Ok(BoundReport::inequality(
        "kth_eigenvalue",
        "λk ≤ max(2(n+2)^{2/n}·W_n·((k−1)/|Ω|)^{2/n}, 2Γ)",
        eigs[k - 1],
        kth_bound(k, q.volume, g),
        tol,
        inputs,
    ))
}

/// `Σ e^{−tλⱼ} ≥ |Ω|/(4πt)·e^{−tΓ}`. A partial sum under-counts, so a pass
/// is certified.
pub fn check_heat_trace(q: &Quantities, eigs: &[f64], t: f64, tol: f64) -> Result<BoundReport> {
    if !(t > 0.0) {
        return Err(invalid("t must be positive"));
    }
    let g = gamma(q)?;
    let mut inputs = q.echo();
    inputs.insert("t".into(), t);
    echo_eigs(&mut inputs, "lambda", eigs);
    Ok(BoundReport::inequality(
        "heat_trace",
        "|Ω|/(4πt)·e^{−tΓ} ≤ Σ e^{−tλj}",
        q.volume / (4.0 * PI * t) * (-t * g).exp(),
        eigs.iter().map(|l| (-t * l).exp()).sum(),
        tol,
        inputs,
    ))
}

/// Eigenvalues computed on a named geometry.
#[derive(Debug, Clone, Copy)]
pub struct Spectrum<'a> {
    pub geometry: &'a str,
    pub eigenvalues: &'a [f64],
}

fn same_geometry(a: &Spectrum, b: &Spectrum) -> Result<()> {
    if a.geometry != b.geometry {
        return Err(Error::Precondition(format!(
            "spectra come from different geometries ({} vs {})",
            a.geometry, b.geometry
        )));
    }
    Ok(())
}

/// `λⱼ(H_{A,q}) ≤ λⱼ(Δ + |A|² + q)` for `j ≤ k`, with slack
/// `max(1e-6, 5h²λⱼ)`. Reports the index with the smallest slack-adjusted
/// margin.
pub fn check_comparison(magnetic: &Spectrum, scalar: &Spectrum, k: usize, h: f64) -> Result<BoundReport> {
    same_geometry(magnetic, scalar)?;
    need(magnetic.eigenvalues, k)?;
    need(scalar.eigenvalues, k)?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let slack = |l: f64| (5.0 * h * h * l.abs()).max(1e-6);
    let worst = (0..k)
        .min_by(|&i, &j| {
            let mi = scalar.eigenvalues[i] - magnetic.eigenvalues[i] + slack(scalar.eigenvalues[i]);
            let mj = scalar.eigenvalues[j] - magnetic.eigenvalues[j] + slack(scalar.eigenvalues[j]);
            mi.partial_cmp(&mj).unwrap()
        })
        .unwrap();
    let (lm, ls) = (magnetic.eigenvalues[worst], scalar.eigenvalues[worst]);
    let mut inputs = Inputs::new();
    inputs.insert("j".into(), (worst + 1) as f64);
    inputs.insert("k".into(), k as f64);
    inputs.insert("h".into(), h);
    inputs.insert("lambda_magnetic".into(), lm);
    inputs.insert("lambda_scalar".into(), ls);
    Ok(BoundReport::inequality(
        "comparison",
        "λj(Δ_A + q) ≤ λj(Δ + |A|² + q)",
        lm,
        ls,
        slack(ls),
        inputs,
    ))
}

/// `λ₁(H_{0,q}) ≤ λ₁(H_{A,q})`.
pub fn check_diamagnetic(magnetic: &Spectrum, free: &Spectrum) -> Result<BoundReport> {
    same_geometry(magnetic, free)?;
    need(magnetic.eigenvalues, 1)?;
    need(free.eigenvalues, 1)?;
    let (lm, l0) = (magnetic.eigenvalues[0], free.eigenvalues[0]);
    let mut inputs = Inputs::new();
    inputs.insert("lambda1_magnetic".into(), lm);
    inputs.insert("lambda1_free".into(), l0);
    Ok(BoundReport::inequality(
        "diamagnetic",
        "λ1(Δ + q) ≤ λ1(Δ_A + q)",
        l0,
        lm,
        DIAMAGNETIC_SLACK * l0.abs().max(lm.abs()).max(1.0),
        inputs,
    ))
}

/// For closed `A`: `λ₁(Δ_A) ≤ 1e-9` exactly when every flux is an integer.
/// The margin is the distance of `λ₁` from the threshold on the side
/// predicted by the fluxes.
pub fn check_flux_quantization(lambda1: f64, fluxes: &[f64]) -> Result<BoundReport> {
    if fluxes.is_empty() {
        return Err(invalid("at least one flux is required"));
    }
    let integral = fluxes.iter().all(|f| (f - f.round()).abs() <= ZERO_EIGENVALUE);
    let margin = if integral { ZERO_EIGENVALUE - lambda1 } else { lambda1 - ZERO_EIGENVALUE };
    let mut inputs = Inputs::new();
    inputs.insert("lambda1".into(), lambda1);
    inputs.insert("integral_fluxes".into(), if integral { 1.0 } else { 0.0 });
    for (i, f) in fluxes.iter().enumerate() {
        inputs.insert(format!("flux_{}", i + 1), *f);
    }
    Ok(BoundReport::finish(
        "flux_quantization",
        "λ1(Δ_A) = 0 ⇔ all fluxes of A are integers",
        lambda1,
        ZERO_EIGENVALUE,
        margin,
        0.0,
        inputs,
    ))
}

fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Spectra of `A` and `A + dφ` agree to `1e-9·max(1, |λ|)`.
pub fn check_gauge(original: &Spectrum, gauged: &Spectrum) -> Result<BoundReport> {
    same_geometry(original, gauged)?;
    if original.eigenvalues.len() != gauged.eigenvalues.len() || original.eigenvalues.is_empty() {
        return Err(Error::Precondition("gauge check needs two spectra of equal length".into()));
    }
    let mut inputs = Inputs::new();
    echo_eigs(&mut inputs, "lambda", original.eigenvalues);
    echo_eigs(&mut inputs, "gauged", gauged.eigenvalues);
    Ok(BoundReport::inequality(
        "gauge_invariance",
        "spec(Δ_{A+dφ} + q) = spec(Δ_A + q)",
        max_relative_deviation(original.eigenvalues, gauged.eigenvalues),
        GAUGE_TOL,
        0.0,
        inputs,
    ))
}

/// Every eigenpair satisfies `‖Hx − λMx‖_{M⁻¹} ≤ tol·max(1, |λ|)`.
pub fn check_certificate(max_relative_residual: f64, solver_tol: f64, pairs: usize) -> BoundReport {
    let mut inputs = Inputs::new();
    inputs.insert("max_relative_residual".into(), max_relative_residual);
    inputs.insert("solver_tol".into(), solver_tol);
    inputs.insert("pairs".into(), pairs as f64);
    BoundReport::inequality(
        "solver_certificate",
        "‖Hx − λMx‖_{M⁻¹} ≤ tol·max(1, |λ|)",
        max_relative_residual,
        solver_tol,
        0.0,
        inputs,
    )
}

/// Neumann eigenvalues `π²(m²/L₀² + n²/L₁²)` of a rectangle, sorted, all
/// those `≤ up_to` (at least `min_count`).
pub fn rectangle_neumann_modes(sides: [f64; 2], up_to: f64, min_count: usize) -> Vec<f64> {
    let mut bound = up_to.max(0.0);
    loop {
        let mut out = Vec::new();
        let mmax = (bound.sqrt() * sides[0] / PI).floor() as i64;
        let nmax = (bound.sqrt() * sides[1] / PI).floor() as i64;
        for m in 0..=mmax {
            for n in 0..=nmax {
                let l = PI * PI * ((m * m) as f64 / (sides[0] * sides[0]) + (n * n) as f64 / (sides[1] * sides[1]));
                if l <= bound {
                    out.push(l);
                }
            }
        }
        if out.len() >= min_count {
            out.sort_by(|a, b| a.partial_cmp(b).unwrap());
            return out;
        }
        bound = 2.0 * bound + 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Quantities {
        Quantities {
            volume: 1.0,
            dist2: 0.0,
            field_norm2: 0.0,
            mu: 2.0 * PI * PI,
            q_integral: 0.0,
            genus: None,
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&unit_square()).unwrap(), 0.0);
        let torus = Quantities {
            volume: 1.0,
            dist2: 0.0,
            field_norm2: 2.0 * PI * PI,
            mu: 4.0 * PI * PI,
            q_integral: 0.0,
            genus: Some(1),
        };
        assert!((gamma(&torus).unwrap() - 0.5).abs() < 1e-15);
        let sphere = Quantities {
            volume: 4.0 * PI,
            dist2: 0.0,
            field_norm2: 16.0 * PI / 3.0,
            mu: 2.0,
            q_integral: 0.0,
            genus: Some(0),
        };
        assert!((gamma(&sphere).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let bad = Quantities { mu: 0.0, ..sphere };
        assert!(gamma(&bad).is_err());
    }

    #[test]
    fn square_mode_list() {
        let m = rectangle_neumann_modes([1.0, 1.0], 0.0, 4);
        assert_eq!(m[0], 0.0);
        assert!((m[1] - PI * PI).abs() < 1e-12 && (m[2] - PI * PI).abs() < 1e-12);
        assert!((m[3] - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn riesz_examples() {
        let q = unit_square();
        let modes = rectangle_neumann_modes([1.0, 1.0], 100.0, 1);
        let r = check_riesz(&q, &modes, 30.0, 100.0, 1e-9).unwrap();
        assert!((r.rhs - 80.52).abs() < 0.01, "{}", r.rhs);
        assert!((r.lhs - 900.0 / (8.0 * PI)).abs() < 1e-12);
        assert!(r.holds && r.audit().unwrap());
        let r = check_riesz(&q, &modes, 100.0, 100.0, 1e-9).unwrap();
        assert!((r.lhs - 1e4 / (8.0 * PI)).abs() < 1e-9 && r.holds);
        assert!(check_riesz(&q, &modes, 101.0, 100.0, 1e-9).is_err());
    }

    #[test]
    fn sum_and_kth_examples() {
        let q = unit_square();
        let modes = rectangle_neumann_modes([1.0, 1.0], 0.0, 16);
        let r = check_eigenvalue_sum(&q, &modes, 1, 1e-9).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
        let r = check_eigenvalue_sum(&q, &modes, 4, 1e-9).unwrap();
        assert!((r.lhs - PI * PI).abs() < 1e-12);
        assert!((r.rhs - 6.0 * PI).abs() < 1e-12);
        let r = check_kth_eigenvalue(&q, &modes, 4, modes[..4].iter().sum(), 1e-9).unwrap();
        assert!((r.rhs - 96.0 * PI).abs() < 1e-12 && r.holds && r.audit().unwrap());
        assert!(check_kth_eigenvalue(&q, &modes, 4, -1.0, 1e-9).is_err());
    }

    #[test]
    fn heat_examples() {
        let q = unit_square();
        let modes = rectangle_neumann_modes([1.0, 1.0], 2000.0, 1);
        let r = check_heat_trace(&q, &modes, 0.1, 1e-9).unwrap();
        // Neumann modes factorise: (Σ_{m≥0} e^{−tπ²m²})².
        let one_d: f64 = (0..50).map(|m| (-0.1 * PI * PI * (m * m) as f64).exp()).sum();
        assert!((r.rhs - one_d * one_d).abs() < 1e-12, "{}", r.rhs);
        assert!((r.rhs - 1.938).abs() < 1e-3);
        assert!((r.lhs - 1.0 / (0.4 * PI)).abs() < 1e-12);
        let r = check_heat_trace(&q, &modes, 10.0, 1e-9).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-12 && r.holds);
        assert!(check_heat_trace(&q, &modes, 0.0, 1e-9).is_err());
    }

    #[test]
    fn lambda2_genus_rules() {
        let mut q = unit_square();
        q.mu = 4.0 * PI * PI;
        q.genus = Some(1);
        let r = check_lambda2_surface(&q, &[0.0, 4.0 * PI * PI], 1e-9).unwrap();
        assert!((r.rhs - 16.0 * PI).abs() < 1e-12 && r.holds);
        q.genus = Some(2);
        assert!(matches!(check_lambda2_surface(&q, &[0.0, 1.0], 1e-9), Err(Error::Unsupported(_))));
    }

    #[test]
    fn closed_bound_needs_zero_field() {
        let mut q = unit_square();
        q.field_norm2 = 1.0;
        assert!(matches!(
            check_lambda1_closed(&q, &[0.0], 1e-9, ClosedCase::General),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn flux_iff() {
        assert!(check_flux_quantization(0.0, &[1.0, 0.0]).unwrap().holds);
        assert!(check_flux_quantization(PI * PI, &[0.5, 0.0]).unwrap().holds);
        assert!(!check_flux_quantization(PI * PI, &[1.0, 0.0]).unwrap().holds);
        assert!(!check_flux_quantization(0.0, &[0.5]).unwrap().holds);
    }

    #[test]
    fn report_serialises_with_fixed_fields() {
        let r = check_lambda1_general(&unit_square(), &[0.0], 1e-9).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        assert_eq!(keys.len(), 8);
        for k in ["name", "eq", "lhs", "rhs", "margin", "holds", "tol", "inputs"] {
            assert!(keys.contains(&k));
        }
    }

    #[test]
    fn comparison_rejects_mixed_geometry() {
        let a = Spectrum { geometry: "torus", eigenvalues: &[1.0] };
        let b = Spectrum { geometry: "square", eigenvalues: &[1.0] };
        assert!(check_comparison(&a, &b, 1, 0.1).is_err());
        let r = check_comparison(&a, &a, 1, 0.1).unwrap();
        assert_eq!(r.margin, 0.0);
    }
}
