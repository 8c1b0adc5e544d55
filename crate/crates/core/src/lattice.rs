//! Full-rank lattices in `Rⁿ` (n ≤ 3): duals, the flux lattice `2πΓ*`,
//! ball enumeration and exact closest-vector search.
//!
//! Closest vectors are found by enumerating every lattice point inside a
//! ball whose radius is the distance to the Babai rounding point, so the
//! search is exhaustive and returns all ties.

use std::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Coefficient rounding tolerance used when comparing lattices.
pub const LATTICE_EQ_TOL: f64 = 1e-9;

const MIN_ABS_DET: f64 = 1e-12;

/// Lattice `Γ = B·Zⁿ` stored by its generator columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T> {
    columns: Vec<Vec<T>>,
}

/// One lattice point: integer coefficients and its Cartesian embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint<T> {
    pub coeffs: Vec<i64>,
    pub point: Vec<T>,
}

/// Lattice points ordered lexicographically by coefficient vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LatticePointSet<T> {
    pub points: Vec<LatticePoint<T>>,
}

impl<T> LatticePointSet<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coefficient_vectors(&self) -> Vec<Vec<i64>> {
        self.points.iter().map(|p| p.coeffs.clone()).collect()
    }

    fn sort(&mut self) {
        self.points.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    }
}

/// Result of a closest-vector query.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestVectors<T> {
    pub dist2: T,
    pub minimizers: LatticePointSet<T>,
}

impl<T: Real> Lattice<T> {
    /// Builds a lattice from generator columns.
    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let n = columns.len();
        if !(1..=3).contains(&n) {
            return Err(invalid(format!("lattice dimension {n} not in 1..=3")));
        }
        if columns.iter().any(|c| c.len() != n) {
            return Err(invalid("generator columns must have length n"));
        }
        if columns.iter().flatten().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite basis entry"));
        }
        let lattice = Self { columns };
        let det = lattice.determinant();
        if det.abs().to_f64_lossy() <= MIN_ABS_DET {
            return Err(Error::Rank {
                det: det.to_f64_lossy(),
            });
        }
        Ok(lattice)
    }

    /// Builds a lattice from a row-major matrix whose columns are generators.
    pub fn from_matrix(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("basis matrix must be square"));
        }
        let columns = (0..n).map(|c| (0..n).map(|r| rows[r][c]).collect()).collect();
        Self::from_columns(columns)
    }

    /// `Zⁿ`.
    pub fn integer(n: usize) -> Result<Self> {
        Self::from_columns(
            (0..n)
                .map(|c| (0..n).map(|r| if r == c { T::one() } else { T::zero() }).collect())
                .collect(),
        )
    }

    /// Axis-aligned rectangular lattice with the given periods.
    pub fn rectangular(periods: &[T]) -> Result<Self> {
        let n = periods.len();
        Self::from_columns(
            (0..n)
                .map(|c| (0..n).map(|r| if r == c { periods[c] } else { T::zero() }).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn generator(&self, i: usize) -> &[T] {
        &self.columns[i]
    }

    pub fn generators(&self) -> &[Vec<T>] {
        &self.columns
    }

    /// Row-major copy of the basis matrix.
    pub fn matrix(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        (0..n).map(|r| (0..n).map(|c| self.columns[c][r]).collect()).collect()
    }

    pub fn determinant(&self) -> T {
        determinant(&self.matrix())
    }

    /// Volume of a fundamental domain, `|det B|`.
    pub fn covolume(&self) -> T {
        self.determinant().abs()
    }

    /// `B·c`.
    pub fn embed(&self, coeffs: &[i64]) -> Vec<T> {
        let n = self.dim();
        let mut p = vec![T::zero(); n];
        for (c, &k) in coeffs.iter().enumerate() {
            let kf = T::from_i64(k).expect("coefficient representable");
            for (r, pr) in p.iter_mut().enumerate() {
                *pr += self.columns[c][r] * kf;
            }
        }
        p
    }

    /// Real coordinates `B⁻¹·p`.
    pub fn coordinates(&self, p: &[T]) -> Vec<T> {
        let inv = inverse(&self.matrix()).expect("full rank checked at construction");
        mat_vec(&inv, p)
    }

    /// Dual lattice `Γ* = {v : ⟨v, w⟩ ∈ Z ∀ w ∈ Γ}`, basis `B^{-T}`.
    pub fn dual(&self) -> Result<Self> {
        let inv = inverse(&self.matrix())?;
        // Columns of B^{-T} are the rows of B^{-1}.
        Self::from_columns(inv)
    }

    /// Integral harmonic forms on `Rⁿ/Γ`, identified with `2πΓ*`.
    pub fn flux_lattice(&self) -> Result<Self> {
        Ok(self.dual()?.scaled(T::two_pi()))
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            columns: self
                .columns
                .iter()
                .map(|c| c.iter().map(|&x| x * s).collect())
                .collect(),
        }
    }

    /// Basis `B·U` for an integer matrix `U` (row-major).
    pub fn with_basis_transform(&self, u: &[Vec<i64>]) -> Result<Self> {
        let n = self.dim();
        if u.len() != n || u.iter().any(|r| r.len() != n) {
            return Err(invalid("transform must be n×n"));
        }
        let columns = (0..n)
            .map(|c| {
                let coeffs: Vec<i64> = (0..n).map(|r| u[r][c]).collect();
                self.embed(&coeffs)
            })
            .collect();
        Self::from_columns(columns)
    }

    /// Whether both bases generate the same point set.
    pub fn same_lattice(&self, other: &Self) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let Ok(inv) = inverse(&self.matrix()) else {
            return false;
        };
        let tol = T::lit(LATTICE_EQ_TOL);
        // Every generator of `other` must have integral coordinates in `self`
        // and the change of basis must be unimodular.
        let mut change = Vec::with_capacity(self.dim());
        for col in other.generators() {
            let c = mat_vec(&inv, col);
            if c.iter().any(|x| (*x - x.round()).abs() > tol) {
                return false;
            }
            change.push(c.iter().map(|x| x.round()).collect::<Vec<T>>());
        }
        (determinant(&change).abs() - T::one()).abs() <= tol
    }

    /// Sum of half generator lengths, an upper bound on the covering radius.
    pub fn covering_radius_bound(&self) -> T {
        self.columns.iter().map(|c| euclid(c)).sum::<T>() * T::lit(0.5)
    }

    fn point_tolerance(&self, center: &[T], radius: T) -> T {
        let scale = radius + euclid(center) + self.columns.iter().map(|c| euclid(c)).fold(T::zero(), T::max);
        T::lit(64.0) * T::epsilon() * scale * scale
    }

    /// All lattice points `p` with `|p − center| ≤ radius`.
    ///
    /// The coefficient box comes from `|cᵢ − c⁰ᵢ| ≤ ‖row i of B⁻¹‖·radius`,
    /// which holds for every point of the ball.
    pub fn enumerate(&self, center: &[T], radius: T) -> Result<LatticePointSet<T>> {
        if radius < T::zero() || !radius.is_finite() {
            return Err(invalid("radius must be finite and nonnegative"));
        }
        if center.len() != self.dim() {
            return Err(invalid("center has wrong dimension"));
        }
        let tol = self.point_tolerance(center, radius);
        let bound2 = radius * radius + tol;
        self.enumerate_within(center, bound2)
    }

    fn enumerate_within(&self, center: &[T], bound2: T) -> Result<LatticePointSet<T>> {
        let n = self.dim();
        let inv = inverse(&self.matrix())?;
        let c0 = mat_vec(&inv, center);
        let r = bound2.sqrt();
        let slack = T::lit(1e-9);
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for i in 0..n {
            let w = euclid(&inv[i]) * r;
            lo.push(to_i64((c0[i] - w - slack).ceil())?);
            hi.push(to_i64((c0[i] + w + slack).floor())?);
        }
        let mut set = LatticePointSet::default();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Ok(set);
        }
        let mut coeffs = lo.clone();
        loop {
            let p = self.embed(&coeffs);
            if dist2(&p, center) <= bound2 {
                set.points.push(LatticePoint {
                    coeffs: coeffs.clone(),
                    point: p,
                });
            }
            // Odometer over the box.
            let mut axis = n;
            loop {
                if axis == 0 {
                    set.sort();
                    return Ok(set);
                }
                axis -= 1;
                if coeffs[axis] < hi[axis] {
                    coeffs[axis] += 1;
                    for (j, c) in coeffs.iter_mut().enumerate().skip(axis + 1) {
                        *c = lo[j];
                    }
                    break;
                }
            }
        }
    }

    /// Squared distance from `target` to the lattice and every minimizer.
    pub fn closest_vectors(&self, target: &[T]) -> Result<ClosestVectors<T>> {
        if target.len() != self.dim() {
            return Err(invalid("target has wrong dimension"));
        }
        // Babai rounding gives a lattice point, hence a certified radius.
        let c = self.coordinates(target);
        let rounded = c
            .iter()
            .map(|x| to_i64(x.round()))
            .collect::<Result<Vec<i64>>>()?;
        let babai = dist2(&self.embed(&rounded), target);
        let tie = tie_tolerance(babai);
        let tol = self.point_tolerance(target, babai.sqrt());
        let candidates = self.enumerate_within(target, babai + tie + tol)?;
        let best = candidates
            .points
            .iter()
            .map(|p| dist2(&p.point, target))
            .fold(T::infinity(), T::min);
        let window = best + tie_tolerance(best);
        let points = candidates
            .points
            .into_iter()
            .filter(|p| dist2(&p.point, target) <= window)
            .collect();
        Ok(ClosestVectors {
            dist2: best,
            minimizers: LatticePointSet { points },
        })
    }
}

/// Tie window on squared distances: `1e-9` relative with unit floor, widened
/// to a few hundred ulps for single precision.
pub fn tie_tolerance<T: Real>(value: T) -> T {
    let base = T::lit(1e-9).max(T::lit(1e3) * T::epsilon());
    base * value.abs().max(T::one())
}

/// `d(h, L_Z)²` in the L² norm on the flat torus `Rⁿ/Γ` of the given volume.
///
/// Harmonic forms on a flat torus are parallel, so the L² distance is the
/// volume times the pointwise one.
pub fn distance_to_flux_lattice<T: Real>(lattice: &Lattice<T>, h: &[T], volume: T) -> Result<T> {
    if !(volume > T::zero()) {
        return Err(invalid("volume must be positive"));
    }
    let flux = lattice.flux_lattice()?;
    Ok(volume * flux.closest_vectors(h)?.dist2)
}

pub(crate) fn euclid<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

pub(crate) fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum()
}

fn to_i64<T: Real>(x: T) -> Result<i64> {
    x.to_i64()
        .filter(|v| v.unsigned_abs() < (1u64 << 40))
        .ok_or_else(|| invalid("coefficient search box too large"))
}

fn mat_vec<T: Real>(m: &[Vec<T>], v: &[T]) -> Vec<T> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| *a * *b).sum())
        .collect()
}

fn determinant<T: Real>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(Ordering::Equal))
            .unwrap();
        if a[piv][col] == T::zero() {
            return T::zero();
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    det
}

/// Gauss–Jordan inverse with partial pivoting.
fn inverse<T: Real>(m: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut inv: Vec<Vec<T>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { T::one() } else { T::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(Ordering::Equal))
            .unwrap();
        if a[piv][col].abs().to_f64_lossy() <= f64::MIN_POSITIVE {
            return Err(Error::Rank { det: 0.0 });
        }
        a.swap(piv, col);
        inv.swap(piv, col);
        let d = a[col][col];
        for c in 0..n {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != T::zero() {
                    for c in 0..n {
                        let (ac, ic) = (a[col][c], inv[col][c]);
                        a[r][c] -= f * ac;
                        inv[r][c] -= f * ic;
                    }
                }
            }
        }
    }
    Ok(inv)
}
