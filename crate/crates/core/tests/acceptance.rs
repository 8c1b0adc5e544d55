//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p magspec-core --test acceptance`.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use magspec_core::bounds::{self, Quantities, Spectrum};
use magspec_core::eigen::{lowest_eigenpairs, lowest_eigenpairs_with, Method, SolverOptions};
use magspec_core::exact_torus::{exact_lambda1, exact_modes, FlatTorus};
use magspec_core::grid::{comparison_spectrum, first_positive_eigenvalue, Discretization, RectangleGrid, TorusGrid};
use magspec_core::lattice::{tie_tolerance, Lattice};
use magspec_core::mesh::{make_sphere_mesh, make_torus_mesh};
use magspec_core::operator::HermitianOperator;
use magspec_core::potential::{Form2, Form3, ScalarField2, ScalarField3};
use magspec_core::{ConstantForm, Cplx};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

const TOL: f64 = 1e-10;
const SEED: u64 = 2024;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn lowest(op: &HermitianOperator<f64>, k: usize) -> Result<Vec<f64>, String> {
    let r = lowest_eigenpairs(op, k, TOL, SEED).map_err(err)?;
    if !r.converged {
        return Err(format!("solver did not converge (k = {k}, dim = {})", op.dim()));
    }
    Ok(r.eigenvalues)
}

fn lambda1_torus(n: usize, a: &Form2<f64>, q: &ScalarField2<f64>, phi: Option<&ScalarField2<f64>>) -> Result<f64, String> {
    let mut g = TorusGrid::unit(n).map_err(err)?;
    if let Some(phi) = phi {
        g = g.with_conformal_factor(phi).map_err(err)?;
    }
    let g = g.with_form(a).map_err(err)?.with_potential(q).map_err(err)?;
    Ok(lowest(&g.operator().map_err(err)?, 1)?[0])
}

/// `I₀(x) = Σ (x/2)^{2k}/(k!)²`.
fn bessel_i0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= (x / 2.0) * (x / 2.0) / (k * k) as f64;
        sum += term;
    }
    sum
}

fn c1_exact_spectrum() -> Outcome {
    let torus = FlatTorus::new(Lattice::integer(2).map_err(err)?);
    let a = ConstantForm::new(vec![PI, 0.0]);
    let l1 = exact_lambda1(&torus, &a, 0.0).map_err(err)?;
    let modes = exact_modes(&torus, &a, 0.0, 3).map_err(err)?;
    let pi2 = PI * PI;
    let degenerate = (modes[0].eigenvalue - pi2).abs() <= 1e-12
        && (modes[1].eigenvalue - pi2).abs() <= 1e-12
        && modes[0].omega_coeffs != modes[1].omega_coeffs
        && modes[2].eigenvalue > pi2 + 1.0;

    let start = Instant::now();
    let g = TorusGrid::unit(128).map_err(err)?.with_form(&Form2::constant([PI, 0.0])).map_err(err)?;
    let eigs = lowest(&g.operator().map_err(err)?, 2)?;
    let elapsed = start.elapsed();
    let rel = eigs.iter().map(|l| (l - pi2).abs() / pi2).fold(0.0, f64::max);
    let pass = (l1 - pi2).abs() <= 1e-12 && degenerate && rel <= 1e-3 && elapsed < Duration::from_secs(30);
    Ok((
        pass,
        format!(
            "exact λ1 = {l1:.12} (double: {degenerate}), N=128 λ1,λ2 = {:.8}, {:.8}, rel err {rel:.2e} ≤ 1e-3, {:.1}s < 30s",
            eigs[0],
            eigs[1],
            elapsed.as_secs_f64()
        ),
    ))
}

fn c2_equality_case() -> Outcome {
    let a = Form2::constant([PI / 2.0, 0.0]);
    let q = ScalarField2::constant(1.0);
    let exact = PI * PI / 4.0 + 1.0;
    let fine = lambda1_torus(128, &a, &q, None)?;
    let coarse = lambda1_torus(64, &a, &q, None)?;
    let rich = (fine - coarse).abs() / 3.0;
    let error = (fine - exact).abs();
    let pass = error <= 2.0 * rich + 1e-12 && error / exact <= 1e-3;
    Ok((
        pass,
        format!("λ1(128) = {fine:.10}, d²/|M| + 1 = {exact:.10}, |err| = {error:.3e} ≤ 2·Richardson {rich:.3e}, rel {:.2e}", error / exact),
    ))
}

fn c3_strictness() -> Outcome {
    let a = Form2::constant([PI, 0.0]);
    let q = ScalarField2::zero();
    let phi = ScalarField2::cos(0.3, [1.0, 0.0], 0.0);
    let fine = lambda1_torus(64, &a, &q, Some(&phi))?;
    let coarse = lambda1_torus(32, &a, &q, Some(&phi))?;
    let rich = (fine - coarse).abs() / 3.0;
    let rhs = PI * PI / bessel_i0(0.6);
    let tol = TOL * fine.abs().max(1.0) + rich;
    let margin = rhs - fine;
    Ok((
        margin > 3.0 * tol,
        format!(
            "λ1 = {fine:.8} < π²/I0(0.6) = {rhs:.8}; gap {margin:.5} ({:.2}%), 3×tol = {:.2e}",
            100.0 * margin / rhs,
            3.0 * tol
        ),
    ))
}

fn c4_flux_sweep() -> Outcome {
    let mut worst_rel: f64 = 0.0;
    let mut zeros = Vec::new();
    for i in 0..=20 {
        let alpha = i as f64 * 0.05;
        let l = lambda1_torus(64, &Form2::constant([2.0 * PI * alpha, 0.0]), &ScalarField2::zero(), None)?;
        let dist = alpha - alpha.round();
        let exact = 4.0 * PI * PI * dist * dist;
        if exact == 0.0 {
            zeros.push(l);
        } else {
            worst_rel = worst_rel.max((l - exact).abs() / exact);
        }
    }
    let zero_max = zeros.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    Ok((
        worst_rel <= 1e-3 && zeros.len() == 2 && zero_max <= 1e-9,
        format!("21 points at N=64: max rel err {worst_rel:.2e} ≤ 1e-3; |λ1| at α∈{{0,1}} ≤ {zero_max:.1e}"),
    ))
}

fn gauge_report(name: &str, plain: &[f64], gauged: &[f64]) -> Result<(bool, f64), String> {
    let r = bounds::check_gauge(
        &Spectrum { geometry: name, eigenvalues: plain },
        &Spectrum { geometry: name, eigenvalues: gauged },
    )
    .map_err(err)?;
    Ok((r.holds, r.lhs))
}

fn c5_gauge() -> Outcome {
    let k = 10;
    let mut worst: f64 = 0.0;
    let mut all = true;
    let mut count = 0;

    let a = Form2::constant([1.3, -0.4]).plus(Form2::wave(1, 0.8, [1.0, 0.0], 0.2));
    let q = ScalarField2::cos(0.5, [0.0, 1.0], 0.0);
    let torus = |a: &Form2<f64>| -> Result<Vec<f64>, String> {
        let g = TorusGrid::unit(20).map_err(err)?.with_form(a).map_err(err)?.with_potential(&q).map_err(err)?;
        lowest(&g.operator().map_err(err)?, k)
    };
    let periodic = [
        ScalarField2::sin(1.0, [1.0, 1.0]),
        ScalarField2::cos(0.7, [2.0, 0.0], 0.3),
        ScalarField2::cos(2.0, [1.0, -1.0], 1.1).plus(ScalarField2::sin(0.4, [0.0, 3.0])),
    ];
    let base = torus(&a)?;
    for psi in &periodic {
        let (ok, dev) = gauge_report("torus", &base, &torus(&a.clone().plus(Form2::gradient(psi.clone())))?)?;
        all &= ok;
        worst = worst.max(dev);
        count += 1;
    }

    let rect = |a: &Form2<f64>| -> Result<Vec<f64>, String> {
        let g = RectangleGrid::new([1.2, 0.9], 20, 16).map_err(err)?.with_form(a).with_potential(&q);
        lowest(&g.operator().map_err(err)?, k)
    };
    let a = Form2::wave(0, 1.5, [0.3, 0.7], 0.0).plus(Form2::constant([0.5, 2.0]));
    let arbitrary = [
        ScalarField2::cos(1.0, [0.37, 0.81], 0.2),
        ScalarField2::sin(3.0, [1.3, 0.0]),
        ScalarField2::cos(0.5, [2.2, -1.7], 0.0).plus(ScalarField2::constant(4.0)),
    ];
    let base = rect(&a)?;
    for psi in &arbitrary {
        let (ok, dev) = gauge_report("rectangle", &base, &rect(&a.clone().plus(Form2::gradient(psi.clone())))?)?;
        all &= ok;
        worst = worst.max(dev);
        count += 1;
    }

    let gauges3 = [
        ScalarField3::cos(1.0, [0.3, -0.2, 0.5], 0.1),
        ScalarField3::linear([0.7, 1.1, -0.4]),
        ScalarField3::cos(2.0, [1.0, 1.0, 0.0], 0.0).plus(ScalarField3::cos(0.5, [0.0, 0.2, 1.4], 0.9)),
    ];
    let rot = Form3::rotation(1.0, [0.0, 0.0, 1.0]);
    for (name, mesh) in [
        ("sphere", make_sphere_mesh::<f64>(2).map_err(err)?),
        ("revolution_torus", make_torus_mesh::<f64>(2.0, 0.7, 24).map_err(err)?),
    ] {
        let m = mesh.with_form(&rot);
        let base = lowest(&m.operator().map_err(err)?, k)?;
        for psi in &gauges3 {
            let gauged = m.clone().add_phases(&m.gradient_phases(psi)).map_err(err)?;
            let (ok, dev) = gauge_report(name, &base, &lowest(&gauged.operator().map_err(err)?, k)?)?;
            all &= ok;
            worst = worst.max(dev);
            count += 1;
        }
    }
    Ok((all, format!("{count} gauge changes on torus, rectangle, sphere and torus meshes: max rel dev {worst:.2e} ≤ 1e-9")))
}

/// A randomized torus or rectangle scenario with smooth `A` and `q`.
fn random_scenario(rng: &mut ChaCha8Rng, torus: bool) -> Result<(String, Box<dyn Discretization<f64>>), String> {
    let n = if rng.gen_bool(0.5) { 16 } else { 20 };
    let q_const = rng.gen_range(-3.0..3.0);
    if torus {
        let periods = [rng.gen_range(0.8..1.3), rng.gen_range(0.8..1.3)];
        let lattice = Lattice::rectangular(&periods).map_err(err)?;
        let kvec = |rng: &mut ChaCha8Rng| {
            let (m, k) = loop {
                let m = rng.gen_range(0..3) as f64;
                let k = rng.gen_range(0..3) as f64;
                if m + k > 0.0 {
                    break (m, k);
                }
            };
            [m / periods[0], k / periods[1]]
        };
        let a = Form2::constant([rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)])
            .plus(Form2::wave(rng.gen_range(0..2), rng.gen_range(0.0..2.0), kvec(rng), rng.gen_range(0.0..6.3)));
        let q = ScalarField2::constant(q_const).plus(ScalarField2::cos(rng.gen_range(0.0..2.0), kvec(rng), rng.gen_range(0.0..6.3)));
        let g = TorusGrid::new(lattice, n, n)
            .map_err(err)?
            .with_form(&a)
            .map_err(err)?
            .with_potential(&q)
            .map_err(err)?;
        Ok((format!("torus {periods:.3?} N={n} q₀={q_const:.2}"), Box::new(g)))
    } else {
        let sides = [rng.gen_range(0.7..1.4), rng.gen_range(0.7..1.4)];
        let kvec = |rng: &mut ChaCha8Rng| [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let a = Form2::constant([rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)])
            .plus(Form2::wave(rng.gen_range(0..2), rng.gen_range(0.0..3.0), kvec(rng), rng.gen_range(0.0..6.3)));
        let q = ScalarField2::constant(q_const).plus(ScalarField2::cos(rng.gen_range(0.0..2.0), kvec(rng), rng.gen_range(0.0..6.3)));
        let g = RectangleGrid::new(sides, n, n).map_err(err)?.with_form(&a).with_potential(&q);
        Ok((format!("rectangle {sides:.3?} N={n} q₀={q_const:.2}"), Box::new(g)))
    }
}

fn c6_diamagnetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0;
    let mut negative_q = 0;
    let mut min_margin = f64::INFINITY;
    for i in 0..50 {
        let (_, disc) = random_scenario(&mut rng, i % 2 == 0)?;
        if disc.potential().iter().any(|v| *v < 0.0) {
            negative_q += 1;
        }
        let magnetic = lowest(&disc.operator().map_err(err)?, 1)?;
        let free = lowest(&disc.scalar_operator(disc.potential()).map_err(err)?, 1)?;
        let r = bounds::check_diamagnetic(
            &Spectrum { geometry: "g", eigenvalues: &magnetic },
            &Spectrum { geometry: "g", eigenvalues: &free },
        )
        .map_err(err)?;
        min_margin = min_margin.min(r.margin);
        if !r.holds {
            failures += 1;
        }
    }
    Ok((
        failures == 0 && negative_q > 0,
        format!("50 scenarios ({negative_q} with q < 0 somewhere): {failures} violations, min margin {min_margin:.3e}"),
    ))
}

fn c7_comparison() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k = 6;
    let mut violations = Vec::new();
    let mut first_violations = 0;
    for i in 0..20 {
        let (label, disc) = random_scenario(&mut rng, i % 2 == 0)?;
        let magnetic = lowest(&disc.operator().map_err(err)?, k)?;
        let scalar = comparison_spectrum(disc.as_ref(), k, TOL, SEED).map_err(err)?;
        if !scalar.converged {
            return Err("comparison solve did not converge".into());
        }
        let h = disc.mesh_width();
        let r = bounds::check_comparison(
            &Spectrum { geometry: "g", eigenvalues: &magnetic },
            &Spectrum { geometry: "g", eigenvalues: &scalar.eigenvalues },
            k,
            h,
        )
        .map_err(err)?;
        let slack = (5.0 * h * h * scalar.eigenvalues[0].abs()).max(1e-6);
        if magnetic[0] > scalar.eigenvalues[0] + slack {
            first_violations += 1;
        }
        if !r.holds {
            violations.push(format!("{label}: j={} {:.3} > {:.3}", r.inputs["j"], r.lhs, r.rhs));
        }
    }
    // Closed-form counterexample on R²/Z² with A = (π/2, 0): λ5 of Δ_A is
    // (5π/2)² while λ5 of Δ + π²/4 is 4π² + π²/4.
    let torus = FlatTorus::new(Lattice::integer(2).map_err(err)?);
    let magnetic = exact_modes(&torus, &ConstantForm::new(vec![PI / 2.0, 0.0]), 0.0, 5).map_err(err)?;
    let scalar = exact_modes(&torus, &ConstantForm::new(vec![0.0, 0.0]), PI * PI / 4.0, 5).map_err(err)?;
    let detail = format!(
        "20 scenarios, j ≤ 6: {} violating ({first_violations} at j=1){}; exact flat torus A=(π/2,0): λ5 = {:.3} vs {:.3}",
        violations.len(),
        violations.first().map_or(String::new(), |v| format!(", e.g. {v}")),
        magnetic[4].eigenvalue,
        scalar[4].eigenvalue
    );
    Ok((violations.is_empty(), detail))
}

fn c8_gamma_bound() -> Outcome {
    let torus_oracle = Quantities {
        volume: 1.0,
        dist2: 0.0,
        field_norm2: 2.0 * PI * PI,
        mu: 4.0 * PI * PI,
        q_integral: 0.0,
        genus: Some(1),
    };
    let g_torus = bounds::gamma(&torus_oracle).map_err(err)?;
    let grid = TorusGrid::unit(64).map_err(err)?.with_form(&Form2::wave(1, 1.0, [1.0, 0.0], 0.0)).map_err(err)?;
    let l_torus = lowest(&grid.operator().map_err(err)?, 1)?[0];

    let sphere_oracle = Quantities {
        volume: 4.0 * PI,
        dist2: 0.0,
        field_norm2: 16.0 * PI / 3.0,
        mu: 2.0,
        q_integral: 0.0,
        genus: Some(0),
    };
    let g_sphere = bounds::gamma(&sphere_oracle).map_err(err)?;
    let mesh = make_sphere_mesh::<f64>(3).map_err(err)?.with_form(&Form3::rotation(1.0, [0.0, 0.0, 1.0]));
    let l_sphere = lowest(&mesh.operator().map_err(err)?, 1)?[0];
    let pass = (g_torus - 0.5).abs() <= 1e-15
        && l_torus <= 0.5
        && (g_sphere - 2.0 / 3.0).abs() <= 1e-15
        && l_sphere <= (2.0 / 3.0) * 1.02;
    Ok((
        pass,
        format!("torus Γ = {g_torus}, λ1(N=64) = {l_torus:.8} ≤ 0.5; sphere Γ = {g_sphere:.15}, λ1(subdiv 3) = {l_sphere:.6} ≤ 2/3·1.02"),
    ))
}

fn c9_sphere_lambda2() -> Outcome {
    let mesh = make_sphere_mesh::<f64>(3).map_err(err)?;
    let area = mesh.area();
    let free = lowest(&mesh.operator().map_err(err)?, 4)?;
    let rel = (free[1] * area - 8.0 * PI).abs() / (8.0 * PI);

    let m = mesh.with_form(&Form3::rotation(1.0, [0.0, 0.0, 1.0]));
    let eigs = lowest(&m.operator().map_err(err)?, 2)?;
    let q = Quantities {
        volume: m.volume(),
        dist2: 0.0,
        field_norm2: m.field_norm2(),
        mu: first_positive_eigenvalue(&m, TOL, SEED).map_err(err)?,
        q_integral: m.q_integral(),
        genus: Some(m.genus()),
    };
    let r = bounds::check_lambda2_surface(&q, &eigs, bounds::default_tol(TOL, 8.0 * PI)).map_err(err)?;
    Ok((
        rel <= 0.02 && r.holds && r.margin > 0.0,
        format!("A=0: λ2·|M| = {:.5} vs 8π = {:.5} (rel {rel:.2e} ≤ 2%); rotation: {:.4} ≤ {:.4}", free[1] * area, 8.0 * PI, r.lhs, r.rhs),
    ))
}

fn euclidean_checks(eigs: &[f64], complete_below: f64) -> Result<(usize, usize, f64), String> {
    let q = Quantities {
        volume: 1.0,
        dist2: 0.0,
        field_norm2: 0.0,
        mu: PI * PI,
        q_integral: 0.0,
        genus: None,
    };
    let mut reports = Vec::new();
    for z in [30.0, 100.0] {
        reports.push(bounds::check_riesz(&q, eigs, z, complete_below, bounds::default_tol(TOL, z)).map_err(err)?);
    }
    for k in [1, 4, 16] {
        reports.push(bounds::check_eigenvalue_sum(&q, eigs, k, bounds::default_tol(TOL, 1.0)).map_err(err)?);
    }
    for t in [0.1, 1.0, 10.0] {
        reports.push(bounds::check_heat_trace(&q, eigs, t, bounds::default_tol(TOL, 1.0)).map_err(err)?);
    }
    let riesz30 = reports[0].rhs;
    Ok((reports.iter().filter(|r| r.holds).count(), reports.len(), riesz30))
}

fn c10_euclidean() -> Outcome {
    let closed = bounds::rectangle_neumann_modes([1.0, 1.0], 400.0, 25);
    let (ok_c, n_c, riesz_c) = euclidean_checks(&closed, 400.0)?;
    let g = RectangleGrid::new([1.0, 1.0], 32, 32).map_err(err)?;
    let grid = lowest(&g.operator().map_err(err)?, 25)?;
    let (ok_g, n_g, riesz_g) = euclidean_checks(&grid, grid[24])?;
    Ok((
        ok_c == n_c && ok_g == n_g,
        format!(
            "closed forms {ok_c}/{n_c} (Σ(30−λ)₊ = {riesz_c:.2} ≥ {:.2}); grid N=32, 25 eigenvalues {ok_g}/{n_g} (Σ(30−λ)₊ = {riesz_g:.2})",
            900.0 / (8.0 * PI)
        ),
    ))
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<Cplx<f64>>>, Vec<f64>) {
    let density = rng.gen_range(0.05..1.0);
    let mut h = vec![vec![Complex::new(0.0, 0.0); n]; n];
    for i in 0..n {
        h[i][i] = Complex::new(rng.gen_range(-5.0..5.0), 0.0);
        for j in i + 1..n {
            if rng.gen_bool(density) {
                let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[i][j] = z;
                h[j][i] = z.conj();
            }
        }
    }
    let mass = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    (h, mass)
}

/// Lowest eigenvalues of `M^{-1/2} H M^{-1/2}` via the real symmetric
/// embedding `[[Re, −Im], [Im, Re]]`, whose spectrum doubles each value.
fn nalgebra_lowest(h: &[Vec<Cplx<f64>>], mass: &[f64], k: usize) -> Vec<f64> {
    let n = h.len();
    let s: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let big = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (i, j) = (r % n, c % n);
        let z = h[i][j] * (s[i] * s[j]);
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut vals: Vec<f64> = SymmetricEigen::new(big).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.iter().step_by(2).take(k).copied().collect()
}

/// `‖Hx − λMx‖_{M⁻¹} / ‖x‖_M`, computed from the dense matrix.
fn independent_residual(h: &[Vec<Cplx<f64>>], mass: &[f64], x: &[Cplx<f64>], lambda: f64) -> f64 {
    let n = h.len();
    let xnorm = (0..n).map(|i| mass[i] * x[i].norm_sqr()).sum::<f64>().sqrt();
    let r2: f64 = (0..n)
        .map(|i| {
            let hx: Cplx<f64> = (0..n).map(|j| h[i][j] * x[j]).sum();
            (hx - x[i] * (lambda * mass[i])).norm_sqr() / mass[i]
        })
        .sum();
    r2.sqrt() / xnorm
}

fn c11_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = SolverOptions {
        method: Method::Iterative,
        ..SolverOptions::default()
    };
    let mut worst_dev: f64 = 0.0;
    let mut worst_cert: f64 = 0.0;
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = rng.gen_range(10..=200);
        let k = rng.gen_range(1..=8.min(n - 1));
        let (h, mass) = random_hermitian(&mut rng, n);
        let op = HermitianOperator::from_dense(&h, mass.clone()).map_err(err)?;
        let r = lowest_eigenpairs_with(&op, k, TOL, case, &opts).map_err(err)?;
        let oracle = nalgebra_lowest(&h, &mass, k);
        let dev = r
            .eigenvalues
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
            .fold(0.0, f64::max);
        let cert = r
            .eigenvectors
            .iter()
            .zip(&r.eigenvalues)
            .map(|(x, l)| independent_residual(&h, &mass, x, *l) / l.abs().max(1.0))
            .fold(0.0, f64::max);
        worst_dev = worst_dev.max(dev);
        worst_cert = worst_cert.max(cert);
        if !r.converged || dev > 1e-8 || cert > TOL {
            failures.push(format!("case {case} (n={n}, k={k}): converged={} dev={dev:.1e} cert={cert:.1e}", r.converged));
        }
    }
    Ok((
        failures.is_empty(),
        format!(
            "100 matrices, iterative path: max rel dev from dense oracle {worst_dev:.2e} ≤ 1e-8, max certificate {worst_cert:.2e} ≤ {TOL:.0e}{}",
            failures.first().map_or(String::new(), |f| format!("; first failure {f}"))
        ),
    ))
}

fn inverse(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let inv = DMatrix::from_fn(n, n, |i, j| m[i][j]).try_inverse().expect("nonsingular");
    (0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect()
}

/// Exhaustive closest-vector search over the coefficient box implied by
/// `‖Bc − t‖ ≤ ‖t‖` (the origin is a lattice point).
fn exhaustive_cvp(columns: &[Vec<f64>], target: &[f64]) -> (f64, Vec<Vec<i64>>) {
    let n = columns.len();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| columns[j][i]).collect()).collect();
    let inv = inverse(&rows);
    let radius = target.iter().map(|x| x * x).sum::<f64>().sqrt() * 1.01 + 1e-9;
    let c0: Vec<f64> = inv.iter().map(|r| r.iter().zip(target).map(|(a, b)| a * b).sum()).collect();
    let w: Vec<f64> = inv.iter().map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt() * radius).collect();
    let lo: Vec<i64> = (0..n).map(|i| (c0[i] - w[i]).floor() as i64 - 1).collect();
    let hi: Vec<i64> = (0..n).map(|i| (c0[i] + w[i]).ceil() as i64 + 1).collect();
    let mut all = Vec::new();
    let mut c = lo.clone();
    loop {
        let mut d2 = 0.0;
        for r in 0..n {
            let mut p = 0.0;
            for (j, cj) in c.iter().enumerate() {
                p += *cj as f64 * columns[j][r];
            }
            d2 += (p - target[r]) * (p - target[r]);
        }
        all.push((d2, c.clone()));
        let mut axis = n;
        loop {
            if axis == 0 {
                let best = all.iter().map(|(d, _)| *d).fold(f64::INFINITY, f64::min);
                let window = best + tie_tolerance(best);
                let mut mins: Vec<Vec<i64>> = all.into_iter().filter(|(d, _)| *d <= window).map(|(_, c)| c).collect();
                mins.sort();
                return (best, mins);
            }
            axis -= 1;
            if c[axis] < hi[axis] {
                c[axis] += 1;
                c[axis + 1..n].copy_from_slice(&lo[axis + 1..n]);
                break;
            }
        }
    }
}

fn random_lattice(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    loop {
        let cols: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
        let det = DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant().abs();
        if det > 0.3 {
            return cols;
        }
    }
}

fn c12_cvp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut mismatches = 0;
    let mut ties = 0;
    for i in 0..10_000 {
        let n = 2 + i % 2;
        // Every fourth instance is an integer lattice with a half-integer
        // target, where minimizers come in exact ties.
        let (cols, target) = if i % 4 == 0 {
            let cols: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| if a == b { 1.0 } else { 0.0 }).collect()).collect();
            let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..3) as f64 + if rng.gen_bool(0.7) { 0.5 } else { 0.0 }).collect();
            (cols, t)
        } else {
            (random_lattice(&mut rng, n), (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect())
        };
        let lattice = Lattice::from_columns(cols.clone()).map_err(err)?;
        let got = lattice.closest_vectors(&target).map_err(err)?;
        let (d2, mins) = exhaustive_cvp(&cols, &target);
        let mut got_mins = got.minimizers.coefficient_vectors();
        got_mins.sort();
        if mins.len() > 1 {
            ties += 1;
        }
        if (got.dist2 - d2).abs() > 1e-12 * d2.max(1.0) || got_mins != mins {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("10000 instances ({ties} with tied minimizers): {mismatches} mismatches")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact flat-torus spectrum", c1_exact_spectrum),
        ("flat-torus equality case", c2_equality_case),
        ("conformal strictness", c3_strictness),
        ("flux quantization sweep", c4_flux_sweep),
        ("gauge invariance", c5_gauge),
        ("diamagnetic inequality", c6_diamagnetic),
        ("comparison inequality", c7_comparison),
        ("Γ bound for λ1", c8_gamma_bound),
        ("λ2 bound on the sphere", c9_sphere_lambda2),
        ("Euclidean-domain suite", c10_euclidean),
        ("solver certification", c11_solver),
        ("closest-vector oracle", c12_cvp),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("criterion {id:>2} {} {name}: {detail} [{secs:.1}s]", if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
