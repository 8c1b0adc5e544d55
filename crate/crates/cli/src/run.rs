//! Building discretizations from scenarios and evaluating requested checks.

use std::f64::consts::PI;

use magspec_core::bounds::{self, BoundReport, ClosedCase, Quantities, Spectrum};
use magspec_core::eigen::{lowest_eigenpairs, SpectralResult};
use magspec_core::exact_torus::{exact_modes, verify_genusone_equality, ConstantForm, ExactMode, FlatTorus};
use magspec_core::grid::{comparison_spectrum, first_positive_eigenvalue, Discretization, RectangleGrid, TorusGrid};
use magspec_core::lattice::Lattice;
use magspec_core::mesh::{make_sphere_mesh, make_torus_mesh, revolution_torus_rotation_dist2, TriMesh};
use magspec_core::potential::{Form2, Form3, FormTerm2, FormTerm3, ScalarField2, ScalarField3};
use magspec_core::Error as CoreError;

use crate::config::{form2, form3, scalar2, scalar3, Geometry, Scenario, ScalarTerm};

/// Errors while running one scenario.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Invalid or unsupported scenario content.
    #[error("{0}")]
    Input(String),
    /// The eigensolver could not deliver what a check needs.
    #[error("solver: {0}")]
    Solver(String),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Solver(m) => RunError::Solver(m),
            CoreError::Unsupported(m) => RunError::Input(format!("unsupported: {m}")),
            other => RunError::Input(other.to_string()),
        }
    }
}

impl From<String> for RunError {
    fn from(m: String) -> Self {
        RunError::Input(m)
    }
}

type RunResult<T> = Result<T, RunError>;

/// Resolved solver settings of a scenario.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub k: usize,
    pub tol: f64,
    pub seed: u64,
}

/// Modifications applied on top of a scenario's potential (used by sweeps).
#[derive(Debug, Clone, Copy)]
pub struct Variation {
    pub a_scale: f64,
    pub flux: [f64; 2],
    pub q_shift: f64,
}

impl Default for Variation {
    fn default() -> Self {
        Self {
            a_scale: 1.0,
            flux: [0.0; 2],
            q_shift: 0.0,
        }
    }
}

/// A scenario turned into a concrete discretization.
pub enum Built {
    Torus {
        grid: TorusGrid<f64>,
        form: Form2<f64>,
        q: ScalarField2<f64>,
        conformal: bool,
    },
    Rectangle {
        grid: RectangleGrid<f64>,
    },
    Mesh {
        mesh: TriMesh<f64>,
        form: Form3<f64>,
        q: ScalarField3<f64>,
        revolution: Option<(f64, f64)>,
    },
}

fn is_zero_field(terms: &[ScalarTerm]) -> bool {
    terms.iter().all(|t| match t {
        ScalarTerm::Constant { value } => *value == 0.0,
        ScalarTerm::Cos { amp, .. } | ScalarTerm::Sin { amp, .. } => *amp == 0.0,
        ScalarTerm::Linear { c } => c.iter().all(|v| *v == 0.0),
    })
}

impl Built {
    pub fn new(sc: &Scenario, var: &Variation) -> RunResult<Self> {
        match &sc.geometry {
            Geometry::FlatTorus { basis, resolution } => Self::torus(sc, basis, resolution.pair(), &[], var),
            Geometry::ConformalTorus { basis, resolution, phi } => Self::torus(sc, basis, resolution.pair(), phi, var),
            Geometry::Rectangle { sides, resolution } => {
                if var.flux != [0.0; 2] {
                    return Err("flux parameters need a periodic geometry".to_string().into());
                }
                let [n0, n1] = resolution.pair();
                let form = form2(&sc.potential.a, &[])?.scaled(var.a_scale);
                let q = scalar2(&sc.potential.q)?.plus(ScalarField2::constant(var.q_shift));
                let grid = RectangleGrid::new(*sides, n0, n1)?.with_potential(&q).with_form(&form);
                Ok(Built::Rectangle { grid })
            }
            Geometry::Sphere { subdiv } => Self::mesh(sc, make_sphere_mesh(*subdiv)?, None, var),
            Geometry::RevolutionTorus { major, minor, res } => {
                Self::mesh(sc, make_torus_mesh(*major, *minor, *res)?, Some((*major, *minor)), var)
            }
            Geometry::GenusSurface { genus } => {
                if *genus >= 2 {
                    Err(RunError::Input(format!("unsupported: genus {genus} surfaces")))
                } else {
                    Err(RunError::Input(format!(
                        "genus_surface only names unsupported topologies; use sphere or revolution_torus for genus {genus}"
                    )))
                }
            }
        }
    }

    fn torus(sc: &Scenario, basis: &[Vec<f64>], n: [usize; 2], phi: &[ScalarTerm], var: &Variation) -> RunResult<Self> {
        let lattice = Lattice::from_columns(basis.to_vec())?;
        let dual = lattice.dual()?.generators().to_vec();
        let mut form = form2(&sc.potential.a, &dual)?.scaled(var.a_scale);
        if var.flux != [0.0; 2] {
            let extra = crate::config::FormTerm::Flux { alpha: var.flux };
            form = form.plus(form2(&[extra], &dual)?);
        }
        let q = scalar2(&sc.potential.q)?.plus(ScalarField2::constant(var.q_shift));
        let phi_field = scalar2(phi)?;
        let grid = TorusGrid::new(lattice, n[0], n[1])?
            .with_conformal_factor(&phi_field)?
            .with_potential(&q)?
            .with_form(&form)?;
        Ok(Built::Torus {
            grid,
            form,
            q,
            conformal: !is_zero_field(phi),
        })
    }

    fn mesh(sc: &Scenario, mesh: TriMesh<f64>, revolution: Option<(f64, f64)>, var: &Variation) -> RunResult<Self> {
        if var.flux != [0.0; 2] {
            return Err("flux parameters need a flat torus".to_string().into());
        }
        let form = form3(&sc.potential.a)?.scaled(var.a_scale);
        let q = scalar3(&sc.potential.q)?.plus(ScalarField3::constant(var.q_shift));
        let mesh = mesh.with_potential(&q).with_form(&form);
        Ok(Built::Mesh {
            mesh,
            form,
            q,
            revolution,
        })
    }

    pub fn disc(&self) -> &dyn Discretization<f64> {
        match self {
            Built::Torus { grid, .. } => grid,
            Built::Rectangle { grid } => grid,
            Built::Mesh { mesh, .. } => mesh,
        }
    }

    fn genus(&self) -> Option<u32> {
        match self {
            Built::Torus { .. } => Some(1),
            Built::Rectangle { .. } => None,
            Built::Mesh { mesh, .. } => Some(mesh.genus()),
        }
    }

    fn dist2(&self) -> RunResult<f64> {
        match self {
            Built::Torus { grid, .. } => Ok(grid.harmonic_distance2()?),
            Built::Rectangle { .. } => Ok(0.0),
            Built::Mesh { revolution: None, .. } => Ok(0.0),
            Built::Mesh {
                revolution: Some((major, minor)),
                form,
                ..
            } => {
                let mut a = 0.0;
                for t in &form.terms {
                    match t {
                        FormTerm3::Rotation { amp, axis } if axis[0] == 0.0 && axis[1] == 0.0 => a += amp * axis[2],
                        FormTerm3::Constant(_) | FormTerm3::Gradient(_) => {}
                        _ => {
                            return Err(RunError::Input(
                                "harmonic part is only available for rotations about z, constants and gradients on the torus of revolution".into(),
                            ))
                        }
                    }
                }
                Ok(revolution_torus_rotation_dist2(*major, *minor, a))
            }
        }
    }

    fn q_is_constant(&self) -> bool {
        match self {
            Built::Torus { q, .. } => q.is_constant(),
            Built::Rectangle { grid } => {
                let p = grid.potential();
                p.iter().all(|v| *v == p[0])
            }
            Built::Mesh { q, .. } => q.is_constant(),
        }
    }

    /// Same scenario with `dψ` added to `A`.
    fn gauged(&self, sc: &Scenario, psi: &[ScalarTerm], var: &Variation) -> RunResult<Self> {
        match self {
            Built::Torus { grid, form, conformal: c, q } => {
                let g = form.clone().plus(Form2::gradient(scalar2(psi)?));
                Ok(Built::Torus {
                    grid: grid.clone().with_form(&g)?,
                    form: g,
                    q: q.clone(),
                    conformal: *c,
                })
            }
            Built::Rectangle { .. } => {
                let mut sc2 = sc.clone();
                sc2.potential.a.push(crate::config::FormTerm::Gradient { of: psi.to_vec() });
                Built::new(&sc2, var)
            }
            Built::Mesh { mesh, form, q, revolution } => {
                let extra = mesh.gradient_phases(&scalar3(psi)?);
                Ok(Built::Mesh {
                    mesh: mesh.clone().add_phases(&extra)?,
                    form: form.clone(),
                    q: q.clone(),
                    revolution: *revolution,
                })
            }
        }
    }
}

/// Lowest `k` eigenpairs, with `k` capped below the dimension.
pub fn solve(built: &Built, k: usize, s: &Settings) -> RunResult<SpectralResult<f64>> {
    let op = built.disc().operator()?;
    let k = k.min(op.dim() - 1).max(1);
    Ok(lowest_eigenpairs(&op, k, s.tol, s.seed)?)
}

fn max_relative_residual(r: &SpectralResult<f64>) -> f64 {
    r.eigenvalues
        .iter()
        .zip(&r.residuals)
        .map(|(l, res)| res / l.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Result of a scenario: spectrum and reports.
pub struct Outcome {
    pub name: String,
    pub spectrum: SpectralResult<f64>,
    pub reports: Vec<BoundReport>,
}

pub fn quantities(built: &Built, s: &Settings) -> RunResult<Quantities> {
    let disc = built.disc();
    let mu = match disc.coexact_eigenvalue() {
        Some(mu) => mu,
        None => first_positive_eigenvalue(disc, s.tol, s.seed)?,
    };
    Ok(Quantities {
        volume: disc.volume(),
        dist2: built.dist2()?,
        field_norm2: disc.field_norm2(),
        mu,
        q_integral: disc.q_integral(),
        genus: built.genus(),
    })
}

fn default_gauges(built: &Built) -> Vec<Vec<ScalarTerm>> {
    match built {
        // sin(2πx)cos(2πy) = ½ sin(2π(x+y)) + ½ sin(2π(x−y)).
        Built::Torus { .. } | Built::Rectangle { .. } => vec![vec![
            ScalarTerm::Sin { amp: 0.5, k: vec![1.0, 1.0], phase: 0.0 },
            ScalarTerm::Sin { amp: 0.5, k: vec![1.0, -1.0], phase: 0.0 },
        ]],
        Built::Mesh { .. } => vec![vec![ScalarTerm::Cos { amp: 1.0, k: vec![0.3, -0.2, 0.5], phase: 0.1 }]],
    }
}

/// `λ₁` on the same scenario at half resolution, for a Richardson error
/// estimate `|λ(N) − λ(N/2)|/3` of a second-order scheme.
fn richardson_error(sc: &Scenario, var: &Variation, s: &Settings, lambda1: f64) -> RunResult<f64> {
    let mut coarse = sc.clone();
    let halve = |r: crate::config::Resolution| {
        let [a, b] = r.pair();
        crate::config::Resolution::Rect([(a / 2).max(8), (b / 2).max(8)])
    };
    match &mut coarse.geometry {
        Geometry::FlatTorus { resolution, .. }
        | Geometry::ConformalTorus { resolution, .. }
        | Geometry::Rectangle { resolution, .. } => *resolution = halve(*resolution),
        _ => return Ok(0.0),
    }
    let b = Built::new(&coarse, var)?;
    let r = solve(&b, 1, s)?;
    Ok((lambda1 - r.eigenvalues[0]).abs() / 3.0)
}

pub const CHECK_NAMES: &[&str] = &[
    "lambda1_general",
    "lambda1_closed",
    "lambda2_surface",
    "riesz",
    "eigenvalue_sum",
    "kth_eigenvalue",
    "heat_trace",
    "comparison",
    "diamagnetic",
    "flux_quantization",
    "gauge",
    "flat_torus_equality",
];

/// Solves a scenario and evaluates its checks. A solver certificate report
/// is always included.
pub fn verify(sc: &Scenario, s: &Settings, var: &Variation) -> RunResult<Outcome> {
    for c in &sc.checks {
        if !CHECK_NAMES.contains(&c.as_str()) {
            return Err(RunError::Input(format!("unknown check `{c}`")));
        }
    }
    let built = Built::new(sc, var)?;
    let wants = |n: &str| sc.checks.iter().any(|c| c == n);
    let mut k = s.k.max(1);
    if wants("lambda2_surface") {
        k = k.max(2);
    }
    if wants("eigenvalue_sum") || wants("kth_eigenvalue") {
        k = k.max(sc.params.sum_k.iter().copied().max().unwrap_or(1));
    }
    let dim = built.disc().node_count();
    let mut spectrum = solve(&built, k, s)?;
    if wants("riesz") {
        let zmax = sc.params.riesz_z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        while *spectrum.eigenvalues.last().unwrap() <= zmax && spectrum.eigenvalues.len() < dim - 1 {
            k = (2 * spectrum.eigenvalues.len()).min(dim - 1);
            spectrum = solve(&built, k, s)?;
        }
    }
    let eigs = spectrum.eigenvalues.clone();
    let mut reports = vec![bounds::check_certificate(
        max_relative_residual(&spectrum),
        s.tol,
        eigs.len(),
    )];
    if !spectrum.converged {
        return Ok(Outcome {
            name: sc.name.clone(),
            spectrum,
            reports,
        });
    }

    let mut q_cache: Option<Quantities> = None;
    let mut quant = |built: &Built| -> RunResult<Quantities> {
        if let Some(q) = q_cache {
            return Ok(q);
        }
        let q = quantities(built, s)?;
        q_cache = Some(q);
        Ok(q)
    };
    let slack = sc.params.mesh_slack;
    let tag = sc.name.as_str();

    for check in &sc.checks {
        match check.as_str() {
            "lambda1_general" => {
                let q = quant(&built)?;
                let rhs = bounds::gamma(&q)?;
                let tol = bounds::default_tol(s.tol, rhs) + slack * rhs.abs();
                reports.push(bounds::check_lambda1_general(&q, &eigs, tol)?);
            }
            "lambda1_closed" => {
                let q = quant(&built)?;
                let rhs = (q.dist2 + q.q_integral) / q.volume;
                let (case, tol) = match &built {
                    Built::Torus { conformal, .. } if built.q_is_constant() => {
                        let rich = richardson_error(sc, var, s, eigs[0])?;
                        if *conformal {
                            let gap = 3.0 * (s.tol * eigs[0].abs().max(1.0) + rich);
                            (ClosedCase::ConformalConstantQ { gap }, 0.0)
                        } else {
                            // Equality is accepted within five Richardson error estimates.
                            (ClosedCase::FlatConstantQ, (5.0 * rich).max(1e-9 * rhs.abs().max(1.0)))
                        }
                    }
                    _ => (ClosedCase::General, bounds::default_tol(s.tol, rhs)),
                };
                reports.push(bounds::check_lambda1_closed(&q, &eigs, tol, case)?);
            }
            "lambda2_surface" => {
                let q = quant(&built)?;
                let rhs = 8.0 * PI * ((q.genus.unwrap_or(0) as f64 + 3.0) / 2.0).floor()
                    + q.field_norm2 / q.mu
                    + q.dist2
                    + q.q_integral;
                let tol = bounds::default_tol(s.tol, rhs) + slack * rhs.abs();
                reports.push(bounds::check_lambda2_surface(&q, &eigs, tol)?);
            }
            "riesz" => {
                let q = quant(&built)?;
                let complete = *eigs.last().unwrap();
                for &z in &sc.params.riesz_z {
                    reports.push(bounds::check_riesz(&q, &eigs, z, complete, bounds::default_tol(s.tol, z))?);
                }
            }
            "eigenvalue_sum" => {
                let q = quant(&built)?;
                for &kk in &sc.params.sum_k {
                    let tol = bounds::default_tol(s.tol, eigs[..kk].iter().map(|l| l.abs()).fold(1.0, f64::max));
                    reports.push(bounds::check_eigenvalue_sum(&q, &eigs, kk, tol)?);
                }
            }
            "kth_eigenvalue" => {
                let q = quant(&built)?;
                let kmax = sc.params.sum_k.iter().copied().max().unwrap_or(1);
                let scalar = built.disc().scalar_operator(built.disc().potential())?;
                let sr = lowest_eigenpairs(&scalar, kmax.min(dim - 1), s.tol, s.seed)?;
                for &kk in &sc.params.sum_k {
                    let ssum: f64 = sr.eigenvalues[..kk].iter().sum();
                    let tol = bounds::default_tol(s.tol, eigs[kk - 1]);
                    reports.push(bounds::check_kth_eigenvalue(&q, &eigs, kk, ssum, tol)?);
                }
            }
            "heat_trace" => {
                let q = quant(&built)?;
                for &t in &sc.params.heat_t {
                    reports.push(bounds::check_heat_trace(&q, &eigs, t, bounds::default_tol(s.tol, 1.0))?);
                }
            }
            "comparison" => {
                let kk = eigs.len();
                let sr = comparison_spectrum(built.disc(), kk, s.tol, s.seed)?;
                reports.push(bounds::check_comparison(
                    &Spectrum { geometry: tag, eigenvalues: &eigs },
                    &Spectrum { geometry: tag, eigenvalues: &sr.eigenvalues },
                    kk,
                    built.disc().mesh_width(),
                )?);
            }
            "diamagnetic" => {
                let free = built.disc().scalar_operator(built.disc().potential())?;
                let sr = lowest_eigenpairs(&free, 1, s.tol, s.seed)?;
                reports.push(bounds::check_diamagnetic(
                    &Spectrum { geometry: tag, eigenvalues: &eigs },
                    &Spectrum { geometry: tag, eigenvalues: &sr.eigenvalues },
                )?);
            }
            "flux_quantization" => {
                let Built::Torus { grid, .. } = &built else {
                    return Err(RunError::Input("flux_quantization needs a torus grid".into()));
                };
                if !built.disc().potential().iter().all(|v| *v == 0.0) {
                    return Err(RunError::Input("flux_quantization needs q = 0".into()));
                }
                if grid.field_norm2() > bounds::CLOSED_FIELD_TOL {
                    return Err(RunError::Input("flux_quantization needs a closed potential (B = 0)".into()));
                }
                let [n0, n1] = grid.resolution();
                let p = grid.phases();
                let fx: f64 = (0..n0).map(|i| p.x[i]).sum::<f64>() / (2.0 * PI);
                let fy: f64 = (0..n1).map(|j| p.y[j * n0]).sum::<f64>() / (2.0 * PI);
                reports.push(bounds::check_flux_quantization(eigs[0], &[fx, fy])?);
            }
            "gauge" => {
                let gauges = if sc.gauge.is_empty() { default_gauges(&built) } else { sc.gauge.clone() };
                for psi in &gauges {
                    let g = built.gauged(sc, psi, var)?;
                    let gr = solve(&g, eigs.len(), s)?;
                    if !gr.converged {
                        return Err(RunError::Solver("gauged spectrum did not converge".into()));
                    }
                    reports.push(bounds::check_gauge(
                        &Spectrum { geometry: tag, eigenvalues: &eigs },
                        &Spectrum { geometry: tag, eigenvalues: &gr.eigenvalues },
                    )?);
                }
            }
            "flat_torus_equality" => {
                let (torus, a, q) = exact_inputs(sc, var)?;
                reports.push(verify_genusone_equality(&torus, &a, q)?);
            }
            _ => unreachable!(),
        }
    }
    Ok(Outcome {
        name: sc.name.clone(),
        spectrum,
        reports,
    })
}

/// Flat torus, constant `A` and constant `q` of an exactly solvable scenario.
pub fn exact_inputs(sc: &Scenario, var: &Variation) -> RunResult<(FlatTorus<f64>, ConstantForm<f64>, f64)> {
    let Geometry::FlatTorus { basis, .. } = &sc.geometry else {
        return Err(RunError::Input("exact spectra need a flat_torus geometry".into()));
    };
    let lattice = Lattice::from_columns(basis.clone())?;
    let dual = lattice.dual()?.generators().to_vec();
    let mut form = form2(&sc.potential.a, &dual)?.scaled(var.a_scale);
    if var.flux != [0.0; 2] {
        form = form.plus(form2(&[crate::config::FormTerm::Flux { alpha: var.flux }], &dual)?);
    }
    let mut a = [0.0; 2];
    for t in &form.terms {
        match t {
            FormTerm2::Constant(c) => {
                a[0] += c[0];
                a[1] += c[1];
            }
            _ => return Err(RunError::Input("exact spectra need a constant potential A".into())),
        }
    }
    let q = scalar2(&sc.potential.q)?;
    if !q.is_constant() {
        return Err(RunError::Input("exact spectra need a constant q".into()));
    }
    Ok((FlatTorus::new(lattice), ConstantForm::new(a.to_vec()), q.eval(0.0, 0.0) + var.q_shift))
}

pub fn exact(sc: &Scenario, s: &Settings) -> RunResult<(Vec<ExactMode<f64>>, BoundReport)> {
    let (torus, a, q) = exact_inputs(sc, &Variation::default())?;
    let modes = exact_modes(&torus, &a, q, s.k.max(1))?;
    let report = verify_genusone_equality(&torus, &a, q)?;
    Ok((modes, report))
}

/// One sweep row: parameter, `λ₁..λ_k`, `Γ` and `(d² + ∫q)/|M|`.
pub struct SweepRow {
    pub param: f64,
    pub eigenvalues: Vec<f64>,
    pub gamma: f64,
    pub closed_rhs: f64,
    pub converged: bool,
}

pub fn sweep_point(sc: &Scenario, s: &Settings, var: &Variation, mu: f64, param: f64) -> RunResult<SweepRow> {
    let built = Built::new(sc, var)?;
    let r = solve(&built, s.k, s)?;
    let disc = built.disc();
    let q = Quantities {
        volume: disc.volume(),
        dist2: built.dist2()?,
        field_norm2: disc.field_norm2(),
        mu,
        q_integral: disc.q_integral(),
        genus: built.genus(),
    };
    Ok(SweepRow {
        param,
        gamma: bounds::gamma(&q)?,
        closed_rhs: (q.dist2 + q.q_integral) / q.volume,
        converged: r.converged,
        eigenvalues: r.eigenvalues,
    })
}

/// `μ` of the scenario's geometry (independent of the potentials).
pub fn geometry_mu(sc: &Scenario, s: &Settings) -> RunResult<f64> {
    let built = Built::new(sc, &Variation::default())?;
    Ok(quantities(&built, s)?.mu)
}
