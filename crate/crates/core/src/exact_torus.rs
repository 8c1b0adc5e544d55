//! Closed-form spectra of `Δ_A + q` on flat tori `Rⁿ/Γ` with a harmonic
//! (constant) potential `A` and constant `q`.
//!
//! The eigenfunctions are `e^{i⟨ω, x⟩}` for `ω ∈ 2πΓ*` with eigenvalues
//! `|A − ω|² + q`, so the spectrum is read off from lattice enumeration
//! around `A`.

use crate::bounds::{BoundReport, Inputs};
use crate::error::{invalid, Result};
use crate::lattice::{distance_to_flux_lattice, euclid, tie_tolerance, Lattice};
use crate::scalar::Real;

/// Flat torus `Rⁿ/Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTorus<T> {
    lattice: Lattice<T>,
    volume: T,
}

impl<T: Real> FlatTorus<T> {
    pub fn new(lattice: Lattice<T>) -> Self {
        let volume = lattice.covolume();
        Self { lattice, volume }
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    pub fn volume(&self) -> T {
        self.volume
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }
}

/// Constant-coefficient 1-form `Σ aᵢ dxᵢ`; harmonic on a flat torus.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantForm<T> {
    pub components: Vec<T>,
}

impl<T: Real> ConstantForm<T> {
    pub fn new(components: Vec<T>) -> Self {
        Self { components }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![T::zero(); n])
    }

    /// Pointwise norm, constant over the torus.
    pub fn norm(&self) -> T {
        euclid(&self.components)
    }

    pub fn translated(&self, by: &[T]) -> Self {
        Self::new(self.components.iter().zip(by).map(|(a, b)| *a + *b).collect())
    }

    /// Flux `(1/2π)·A(X)` around the loop `t ↦ tX` for a lattice vector `X`.
    pub fn flux_along(&self, loop_vector: &[T]) -> T {
        self.components.iter().zip(loop_vector).map(|(a, x)| *a * *x).sum::<T>() / T::two_pi()
    }
}

/// One eigenvalue together with the integral form `ω` of its eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMode<T> {
    pub eigenvalue: T,
    pub omega_coeffs: Vec<i64>,
}

fn check_dims<T: Real>(torus: &FlatTorus<T>, a: &ConstantForm<T>) -> Result<()> {
    if a.components.len() != torus.dim() {
        return Err(invalid("potential dimension differs from torus dimension"));
    }
    Ok(())
}

/// The `k` lowest eigenvalues with their `ω`, ordered by eigenvalue then by
/// coefficient vector.
pub fn exact_modes<T: Real>(
    torus: &FlatTorus<T>,
    a: &ConstantForm<T>,
    q: T,
    k: usize,
) -> Result<Vec<ExactMode<T>>> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    check_dims(torus, a)?;
    let flux = torus.lattice.flux_lattice()?;
    let mut radius = flux.covering_radius_bound();
    let found = loop {
        let set = flux.enumerate(&a.components, radius)?;
        if set.len() >= k {
            break set;
        }
        radius = radius + radius;
    };
    let mut d2: Vec<T> = found
        .points
        .iter()
        .map(|p| crate::lattice::dist2(&p.point, &a.components))
        .collect();
    d2.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let kth = d2[k - 1];
    // Re-enumerate at the k-th distance so ties at the boundary are complete.
    let set = flux.enumerate(&a.components, (kth + tie_tolerance(kth)).sqrt())?;
    let mut modes: Vec<ExactMode<T>> = set
        .points
        .into_iter()
        .map(|p| ExactMode {
            eigenvalue: crate::lattice::dist2(&p.point, &a.components) + q,
            omega_coeffs: p.coeffs,
        })
        .collect();
    modes.sort_by(|x, y| {
        x.eigenvalue
            .partial_cmp(&y.eigenvalue)
            .unwrap()
            .then_with(|| x.omega_coeffs.cmp(&y.omega_coeffs))
    });
    modes.truncate(k);
    Ok(modes)
}

/// The `k` lowest eigenvalues of `Δ_A + q`, repeated with multiplicity.
pub fn exact_spectrum<T: Real>(torus: &FlatTorus<T>, a: &ConstantForm<T>, q: T, k: usize) -> Result<Vec<T>> {
    Ok(exact_modes(torus, a, q, k)?.into_iter().map(|m| m.eigenvalue).collect())
}

/// `λ₁ = min_ω |A − ω|² + q` via a single closest-vector query.
pub fn exact_lambda1<T: Real>(torus: &FlatTorus<T>, a: &ConstantForm<T>, q: T) -> Result<T> {
    check_dims(torus, a)?;
    Ok(torus.lattice.flux_lattice()?.closest_vectors(&a.components)?.dist2 + q)
}

/// Number of eigenvalues `≤ lambda` (with multiplicity).
pub fn counting_function<T: Real>(torus: &FlatTorus<T>, a: &ConstantForm<T>, q: T, lambda: T) -> Result<usize> {
    check_dims(torus, a)?;
    let shifted = lambda - q;
    if shifted < T::zero() {
        return Ok(0);
    }
    Ok(torus.lattice.flux_lattice()?.enumerate(&a.components, shifted.sqrt())?.len())
}

/// Equality `λ₁ = d(A, L_Z)²/|M| + q` for constant `q` on a flat torus.
pub fn verify_genusone_equality<T: Real>(torus: &FlatTorus<T>, a: &ConstantForm<T>, q: T) -> Result<BoundReport> {
    let lambda1 = exact_lambda1(torus, a, q)?;
    let d2 = distance_to_flux_lattice(&torus.lattice, &a.components, torus.volume)?;
    let mut inputs = Inputs::new();
    inputs.insert("volume".into(), torus.volume.to_f64_lossy());
    inputs.insert("dist2".into(), d2.to_f64_lossy());
    inputs.insert("q_const".into(), q.to_f64_lossy());
    inputs.insert("lambda1".into(), lambda1.to_f64_lossy());
    let rhs = d2 / torus.volume + q;
    Ok(BoundReport::equality(
        "flat_torus_equality",
        "λ1 = d²/|M| + q",
        lambda1.to_f64_lossy(),
        rhs.to_f64_lossy(),
        1e-12 * rhs.abs().to_f64_lossy().max(1.0),
        inputs,
    ))
}
