use std::f64::consts::PI;

use magspec_core::bounds::{self, Quantities};
use magspec_core::eigen::lowest_eigenpairs;
use magspec_core::exact_torus::{counting_function, exact_spectrum, FlatTorus};
use magspec_core::grid::{Discretization, RectangleGrid, TorusGrid};
use magspec_core::lattice::{tie_tolerance, Lattice};
use magspec_core::mesh::make_sphere_mesh;
use magspec_core::potential::{Form2, Form3, ScalarField2, ScalarField3};
use magspec_core::ConstantForm;
use proptest::prelude::*;

fn basis2() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(-2.0..2.0f64, 4)
        .prop_map(|v| vec![vec![v[0], v[1]], vec![v[2], v[3]]])
        .prop_filter("well conditioned", |c| (c[0][0] * c[1][1] - c[0][1] * c[1][0]).abs() > 0.3)
}

/// Brute force over a generous coefficient box.
fn brute_cvp(cols: &[Vec<f64>], t: &[f64]) -> (f64, Vec<Vec<i64>>) {
    let mut all = Vec::new();
    for a in -40i64..=40 {
        for b in -40i64..=40 {
            let p = [a as f64 * cols[0][0] + b as f64 * cols[1][0], a as f64 * cols[0][1] + b as f64 * cols[1][1]];
            all.push(((p[0] - t[0]).powi(2) + (p[1] - t[1]).powi(2), vec![a, b]));
        }
    }
    let best = all.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
    let mut mins: Vec<Vec<i64>> = all.into_iter().filter(|x| x.0 <= best + tie_tolerance(best)).map(|x| x.1).collect();
    mins.sort();
    (best, mins)
}

fn unimodular() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0usize..4, -3i64..=3), 1..6).prop_map(|ops| {
        let mut u = vec![vec![1i64, 0], vec![0, 1]];
        for (kind, s) in ops {
            match kind {
                0 => u = vec![vec![u[0][0] + s * u[1][0], u[0][1] + s * u[1][1]], u[1].clone()],
                1 => u = vec![u[0].clone(), vec![u[1][0] + s * u[0][0], u[1][1] + s * u[0][1]]],
                2 => u.swap(0, 1),
                _ => u[0] = vec![-u[0][0], -u[0][1]],
            }
        }
        u
    })
}

fn spectrum(d: &dyn Discretization<f64>, k: usize) -> Vec<f64> {
    let r = lowest_eigenpairs(&d.operator().unwrap(), k, 1e-10, 3).unwrap();
    assert!(r.converged);
    r.eigenvalues
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closest_vectors_match_brute_force(cols in basis2(), t in prop::collection::vec(-3.0..3.0f64, 2)) {
        let lattice = Lattice::from_columns(cols.clone()).unwrap();
        let got = lattice.closest_vectors(&t).unwrap();
        let (d2, mins) = brute_cvp(&cols, &t);
        let mut got_mins = got.minimizers.coefficient_vectors();
        got_mins.sort();
        prop_assert!((got.dist2 - d2).abs() <= 1e-12 * d2.max(1.0));
        prop_assert_eq!(got_mins, mins);
    }

    #[test]
    fn closest_distance_ignores_basis_choice(cols in basis2(), u in unimodular(), t in prop::collection::vec(-3.0..3.0f64, 2)) {
        let a = Lattice::from_columns(cols).unwrap();
        let b = a.with_basis_transform(&u).unwrap();
        prop_assert!(a.same_lattice(&b));
        let (da, db) = (a.closest_vectors(&t).unwrap(), b.closest_vectors(&t).unwrap());
        prop_assert!((da.dist2 - db.dist2).abs() <= 1e-9 * da.dist2.max(1.0));
        prop_assert_eq!(da.minimizers.len(), db.minimizers.len());
    }

    #[test]
    fn dual_basis_is_biorthogonal(cols in basis2()) {
        let a = Lattice::from_columns(cols).unwrap();
        let d = a.dual().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let dot: f64 = a.generator(i).iter().zip(d.generator(j)).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn exact_spectrum_is_periodic_in_the_flux_lattice(
        a in prop::collection::vec(-5.0..5.0f64, 2),
        shift in prop::collection::vec(-2i64..=2, 2),
        q in -3.0..3.0f64,
    ) {
        let torus = FlatTorus::new(Lattice::rectangular(&[1.0, 1.4]).unwrap());
        let omega = [2.0 * PI * shift[0] as f64, 2.0 * PI * shift[1] as f64 / 1.4];
        let base = exact_spectrum(&torus, &ConstantForm::new(a.clone()), q, 8).unwrap();
        let moved = exact_spectrum(&torus, &ConstantForm::new(vec![a[0] + omega[0], a[1] + omega[1]]), q, 8).unwrap();
        for (x, y) in base.iter().zip(&moved) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
        let n = counting_function(&torus, &ConstantForm::new(a), q, base[7]).unwrap();
        prop_assert!(n >= 8);
    }

    #[test]
    fn gamma_grows_with_field_and_potential(
        volume in 0.1..10.0f64,
        dist2 in 0.0..10.0f64,
        field in 0.0..10.0f64,
        mu in 0.1..50.0f64,
        qi in -10.0..10.0f64,
        extra in 0.0..5.0f64,
    ) {
        let q = Quantities { volume, dist2, field_norm2: field, mu, q_integral: qi, genus: None };
        let g = bounds::gamma(&q).unwrap();
        let more_field = bounds::gamma(&Quantities { field_norm2: field + extra, ..q }).unwrap();
        let more_q = bounds::gamma(&Quantities { q_integral: qi + extra, ..q }).unwrap();
        let farther = bounds::gamma(&Quantities { dist2: dist2 + extra, ..q }).unwrap();
        let larger_mu = bounds::gamma(&Quantities { mu: mu + extra, ..q }).unwrap();
        prop_assert!(more_field >= g && more_q >= g && farther >= g && larger_mu <= g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torus_spectrum_is_gauge_invariant(
        a in prop::collection::vec(-6.0..6.0f64, 2),
        amp in 0.0..2.0f64,
        psi_amp in 0.1..3.0f64,
        m in 0i32..3,
        n in 1i32..3,
        phase in 0.0..6.0f64,
    ) {
        let form = Form2::constant([a[0], a[1]]).plus(Form2::wave(1, amp, [1.0, 0.0], 0.0));
        let psi = ScalarField2::cos(psi_amp, [m as f64, n as f64], phase);
        let g = TorusGrid::unit(10).unwrap();
        let plain = g.clone().with_form(&form).unwrap();
        let gauged = g.with_form(&form.clone().plus(Form2::gradient(psi))).unwrap();
        for (x, y) in spectrum(&plain, 6).iter().zip(spectrum(&gauged, 6)) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn rectangle_spectrum_is_gauge_invariant(
        a in prop::collection::vec(-6.0..6.0f64, 2),
        k in prop::collection::vec(-2.0..2.0f64, 2),
        psi_amp in 0.1..3.0f64,
    ) {
        let form = Form2::constant([a[0], a[1]]);
        let g = RectangleGrid::new([1.0, 0.8], 10, 8).unwrap();
        let plain = g.clone().with_form(&form);
        let gauged = g.with_form(&form.clone().plus(Form2::gradient(ScalarField2::cos(psi_amp, [k[0], k[1]], 0.4))));
        for (x, y) in spectrum(&plain, 6).iter().zip(spectrum(&gauged, 6)) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn assembled_operators_are_hermitian(
        a in prop::collection::vec(-6.0..6.0f64, 2),
        amp in 0.0..3.0f64,
        q in -3.0..3.0f64,
    ) {
        let form = Form2::constant([a[0], a[1]]).plus(Form2::wave(0, amp, [0.0, 1.0], 0.3));
        let pot = ScalarField2::constant(q);
        let t = TorusGrid::unit(8).unwrap().with_form(&form).unwrap().with_potential(&pot).unwrap();
        prop_assert_eq!(t.operator().unwrap().hermitian_defect(), 0.0);
        let r = RectangleGrid::new([1.0, 2.0], 8, 11).unwrap().with_form(&form).with_potential(&pot);
        prop_assert_eq!(r.operator().unwrap().hermitian_defect(), 0.0);
        let m = make_sphere_mesh::<f64>(1)
            .unwrap()
            .with_form(&Form3::rotation(amp, [a[0], a[1], 1.0]))
            .with_potential(&ScalarField3::constant(q));
        prop_assert_eq!(m.operator().unwrap().hermitian_defect(), 0.0);
    }
}
