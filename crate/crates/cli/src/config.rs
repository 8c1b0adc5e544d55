//! TOML scenario files.

use std::f64::consts::PI;

use serde::Deserialize;

use magspec_core::potential::{Form2, Form3, FormTerm2, FormTerm3, ScalarField2, ScalarField3, ScalarTerm2, ScalarTerm3};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default)]
    pub scenario: Vec<Scenario>,
    pub sweep: Option<Sweep>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            k: default_k(),
            tol: default_tol(),
            seed: 0,
        }
    }
}

fn default_k() -> usize {
    6
}

fn default_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub geometry: Geometry,
    #[serde(default)]
    pub potential: Potential,
    pub k: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub params: CheckParams,
    /// Gauge functions for the `gauge` check, each a list of scalar terms.
    #[serde(default)]
    pub gauge: Vec<Vec<ScalarTerm>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    FlatTorus {
        /// Lattice generators, one per inner array.
        #[serde(default = "unit_basis")]
        basis: Vec<Vec<f64>>,
        resolution: Resolution,
    },
    ConformalTorus {
        #[serde(default = "unit_basis")]
        basis: Vec<Vec<f64>>,
        resolution: Resolution,
        phi: Vec<ScalarTerm>,
    },
    Rectangle {
        sides: [f64; 2],
        resolution: Resolution,
    },
    Sphere {
        subdiv: u32,
    },
    RevolutionTorus {
        major: f64,
        minor: f64,
        res: usize,
    },
    GenusSurface {
        genus: u32,
    },
}

fn unit_basis() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.0], vec![0.0, 1.0]]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Square(usize),
    Rect([usize; 2]),
}

impl Resolution {
    pub fn pair(self) -> [usize; 2] {
        match self {
            Resolution::Square(n) => [n, n],
            Resolution::Rect(r) => r,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potential {
    #[serde(default)]
    pub a: Vec<FormTerm>,
    #[serde(default)]
    pub q: Vec<ScalarTerm>,
}

/// Scalar catalog. Two-dimensional geometries read `k` as `[k₀, k₁]`,
/// surfaces in `R³` as `[k₀, k₁, k₂]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarTerm {
    Constant {
        value: f64,
    },
    /// `amp·cos(2π⟨k, x⟩ + phase)`.
    Cos {
        amp: f64,
        k: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
    /// `amp·sin(2π⟨k, x⟩ + phase)`.
    Sin {
        amp: f64,
        k: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
    /// `⟨c, x⟩`, surfaces only.
    Linear {
        c: [f64; 3],
    },
}

/// 1-form catalog.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormTerm {
    Constant {
        value: Vec<f64>,
    },
    /// Constant harmonic form with flux `alpha[i]` around generator `i`.
    Flux {
        alpha: [f64; 2],
    },
    /// 2D: `amp·cos(2π⟨k, x⟩ + phase)` in component `axis`.
    Wave {
        axis: usize,
        amp: f64,
        k: [f64; 2],
        #[serde(default)]
        phase: f64,
    },
    /// Surfaces: `dir·cos(2π⟨k, x⟩ + phase)`.
    Wave3 {
        dir: [f64; 3],
        k: [f64; 3],
        #[serde(default)]
        phase: f64,
    },
    Gradient {
        of: Vec<ScalarTerm>,
    },
    /// Surfaces: `amp·(axis × x)`.
    Rotation {
        amp: f64,
        #[serde(default = "z_axis")]
        axis: [f64; 3],
    },
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    #[serde(default = "default_riesz")]
    pub riesz_z: Vec<f64>,
    #[serde(default = "default_sum_k")]
    pub sum_k: Vec<usize>,
    #[serde(default = "default_heat_t")]
    pub heat_t: Vec<f64>,
    /// Extra absolute slack added to the `λ₁ ≤ Γ` and `λ₂` checks, as a
    /// fraction of the right-hand side (mesh discretisation allowance).
    #[serde(default)]
    pub mesh_slack: f64,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            riesz_z: default_riesz(),
            sum_k: default_sum_k(),
            heat_t: default_heat_t(),
            mesh_slack: 0.0,
        }
    }
}

fn default_riesz() -> Vec<f64> {
    vec![30.0]
}

fn default_sum_k() -> Vec<usize> {
    vec![1, 4]
}

fn default_heat_t() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Scenario to vary; defaults to the first one.
    pub scenario: Option<String>,
    pub param: SweepParam,
    pub values: Option<Vec<f64>>,
    pub range: Option<Range>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    FluxX,
    FluxY,
    QShift,
    AScale,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    /// Parameter values, `start, start+step, …` up to `stop` inclusive
    /// (with a 1e-9·step allowance). A range with `stop < start` is empty.
    pub fn points(&self) -> Result<Vec<f64>, String> {
        match (&self.values, &self.range) {
            (Some(v), None) => Ok(v.clone()),
            (None, Some(r)) => {
                if !(r.step > 0.0) {
                    return Err("sweep step must be positive".into());
                }
                let mut out = Vec::new();
                let mut i = 0usize;
                loop {
                    let x = r.start + r.step * i as f64;
                    if x > r.stop + 1e-9 * r.step {
                        break;
                    }
                    out.push(x);
                    i += 1;
                }
                Ok(out)
            }
            _ => Err("sweep needs exactly one of `values` or `range`".into()),
        }
    }
}

fn k2(k: &[f64]) -> Result<[f64; 2], String> {
    match k {
        [a, b] => Ok([*a, *b]),
        _ => Err(format!("wave vector {k:?} must have 2 components on planar geometries")),
    }
}

fn k3(k: &[f64]) -> Result<[f64; 3], String> {
    match k {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(format!("wave vector {k:?} must have 3 components on surfaces")),
    }
}

pub fn scalar2(terms: &[ScalarTerm]) -> Result<ScalarField2<f64>, String> {
    let mut out = Vec::new();
    for t in terms {
        out.push(match t {
            ScalarTerm::Constant { value } => ScalarTerm2::Constant(*value),
            ScalarTerm::Cos { amp, k, phase } => ScalarTerm2::Wave {
                amp: *amp,
                k: k2(k)?,
                phase: *phase,
            },
            ScalarTerm::Sin { amp, k, phase } => ScalarTerm2::Wave {
                amp: *amp,
                k: k2(k)?,
                phase: *phase - PI / 2.0,
            },
            ScalarTerm::Linear { .. } => return Err("linear scalars are only available on surfaces".into()),
        });
    }
    Ok(ScalarField2 { terms: out })
}

pub fn scalar3(terms: &[ScalarTerm]) -> Result<ScalarField3<f64>, String> {
    let mut out = Vec::new();
    for t in terms {
        out.push(match t {
            ScalarTerm::Constant { value } => ScalarTerm3::Constant(*value),
            ScalarTerm::Cos { amp, k, phase } => ScalarTerm3::Wave {
                amp: *amp,
                k: k3(k)?,
                phase: *phase,
            },
            ScalarTerm::Sin { amp, k, phase } => ScalarTerm3::Wave {
                amp: *amp,
                k: k3(k)?,
                phase: *phase - PI / 2.0,
            },
            ScalarTerm::Linear { c } => ScalarTerm3::Linear(*c),
        });
    }
    Ok(ScalarField3 { terms: out })
}

/// Planar 1-form; `dual` holds the dual-lattice generators used by `flux`.
pub fn form2(terms: &[FormTerm], dual: &[Vec<f64>]) -> Result<Form2<f64>, String> {
    let mut out = Vec::new();
    for t in terms {
        out.push(match t {
            FormTerm::Constant { value } => FormTerm2::Constant(k2(value)?),
            FormTerm::Flux { alpha } => {
                if dual.len() != 2 {
                    return Err("flux terms need a periodic geometry".into());
                }
                let mut c = [0.0; 2];
                for (a, d) in alpha.iter().zip(dual) {
                    c[0] += 2.0 * PI * a * d[0];
                    c[1] += 2.0 * PI * a * d[1];
                }
                FormTerm2::Constant(c)
            }
            FormTerm::Wave { axis, amp, k, phase } => {
                if *axis > 1 {
                    return Err(format!("wave axis {axis} out of range (0 or 1)"));
                }
                FormTerm2::Wave {
                    axis: *axis,
                    amp: *amp,
                    k: *k,
                    phase: *phase,
                }
            }
            FormTerm::Gradient { of } => FormTerm2::Gradient(scalar2(of)?),
            FormTerm::Wave3 { .. } | FormTerm::Rotation { .. } => {
                return Err("wave3 and rotation forms are only available on surfaces".into())
            }
        });
    }
    Ok(Form2 { terms: out })
}

pub fn form3(terms: &[FormTerm]) -> Result<Form3<f64>, String> {
    let mut out = Vec::new();
    for t in terms {
        out.push(match t {
            FormTerm::Constant { value } => FormTerm3::Constant(k3(value)?),
            FormTerm::Wave3 { dir, k, phase } => FormTerm3::Wave {
                dir: *dir,
                k: *k,
                phase: *phase,
            },
            FormTerm::Gradient { of } => FormTerm3::Gradient(scalar3(of)?),
            FormTerm::Rotation { amp, axis } => FormTerm3::Rotation { amp: *amp, axis: *axis },
            FormTerm::Flux { .. } | FormTerm::Wave { .. } => {
                return Err("flux and planar wave forms are not available on surfaces".into())
            }
        });
    }
    Ok(Form3 { terms: out })
}

/// 1-based line of `name = "<name>"` in the source text, if present.
pub fn scenario_line(source: &str, name: &str) -> Option<usize> {
    let quoted = format!("\"{name}\"");
    source.lines().position(|l| {
        let t = l.trim_start();
        t.starts_with("name") && t.contains(&quoted)
    })
    .map(|i| i + 1)
}

/// 1-based line of a TOML error span.
pub fn error_line(source: &str, err: &toml::de::Error) -> Option<usize> {
    err.span().map(|s| source[..s.start.min(source.len())].matches('\n').count() + 1)
}
