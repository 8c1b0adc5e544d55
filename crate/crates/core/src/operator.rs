//! Sparse Hermitian operators with a positive diagonal mass, the common
//! currency between the discretizations and the eigensolver.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::scalar::{Cplx, Real};

/// Sparse Hermitian matrix `H` with diagonal mass `M`, for `H x = λ M x`.
///
/// Rows are stored in full (both triangles) in CSR layout. Every coupling is
/// inserted once and written to both `(i, j)` and `(j, i)` as conjugates, so
/// `H = Hᴴ` holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Cplx<T>>,
    mass: Vec<T>,
}

/// Accumulates diagonal entries and couplings before compression.
#[derive(Debug, Clone)]
pub struct OperatorBuilder<T> {
    dim: usize,
    diag: Vec<T>,
    couplings: Vec<(usize, usize, Cplx<T>)>,
}

impl<T: Real> OperatorBuilder<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            diag: vec![T::zero(); dim],
            couplings: Vec::new(),
        }
    }

    pub fn add_diagonal(&mut self, i: usize, v: T) {
        self.diag[i] += v;
    }

    /// Adds `v` at `(i, j)` and `conj(v)` at `(j, i)`.
    pub fn add_coupling(&mut self, i: usize, j: usize, v: Cplx<T>) {
        assert_ne!(i, j, "diagonal entries go through add_diagonal");
        self.couplings.push((i, j, v));
    }

    /// Link term `w·|u_i − e^{iθ} u_j|²` of a gauge-covariant quadratic form:
    /// diagonal `+w` on both ends, coupling `−w e^{iθ}` at `(i, j)`.
    pub fn add_link(&mut self, i: usize, j: usize, weight: T, theta: T) {
        self.add_diagonal(i, weight);
        self.add_diagonal(j, weight);
        self.add_coupling(i, j, crate::scalar::phase(theta) * (-weight));
    }

    pub fn build(self, mass: Vec<T>) -> Result<HermitianOperator<T>> {
        if mass.len() != self.dim {
            return Err(invalid("mass length differs from dimension"));
        }
        if mass.iter().any(|m| !(*m > T::zero()) || !m.is_finite()) {
            return Err(invalid("mass entries must be positive and finite"));
        }
        let n = self.dim;
        let mut rows: Vec<Vec<(usize, Cplx<T>)>> = vec![Vec::new(); n];
        for (i, d) in self.diag.iter().enumerate() {
            rows[i].push((i, Complex::new(*d, T::zero())));
        }
        for (i, j, v) in self.couplings {
            rows[i].push((j, v));
            rows[j].push((i, v.conj()));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(HermitianOperator {
            dim: n,
            row_ptr,
            cols,
            vals,
            mass,
        })
    }
}

impl<T: Real> HermitianOperator<T> {
    /// Dense constructor, mostly for tests. `h` must be Hermitian.
    pub fn from_dense(h: &[Vec<Cplx<T>>], mass: Vec<T>) -> Result<Self> {
        let n = h.len();
        let mut b = OperatorBuilder::new(n);
        for i in 0..n {
            if h[i].len() != n {
                return Err(invalid("matrix must be square"));
            }
            if h[i][i].im != T::zero() {
                return Err(invalid("diagonal must be real"));
            }
            b.add_diagonal(i, h[i][i].re);
            for j in i + 1..n {
                if h[j][i] != h[i][j].conj() {
                    return Err(invalid("matrix is not Hermitian"));
                }
                if h[i][j] != Complex::new(T::zero(), T::zero()) {
                    b.add_coupling(i, j, h[i][j]);
                }
            }
        }
        b.build(mass)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> (&[usize], &[Cplx<T>]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn diagonal(&self, i: usize) -> T {
        let (c, v) = self.row(i);
        c.binary_search(&i).map(|k| v[k].re).unwrap_or_else(|_| T::zero())
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[Cplx<T>], y: &mut [Cplx<T>]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    /// `H + c·M`.
    pub fn shifted(&self, c: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    out.vals[k].re += c * self.mass[i];
                }
            }
        }
        out
    }

    /// Same stiffness with a different mass.
    pub fn with_mass(&self, mass: Vec<T>) -> Result<Self> {
        if mass.len() != self.dim || mass.iter().any(|m| !(*m > T::zero())) {
            return Err(invalid("mass must be positive with matching length"));
        }
        let mut out = self.clone();
        out.mass = mass;
        Ok(out)
    }

    pub fn to_dense(&self) -> Vec<Vec<Cplx<T>>> {
        let mut d = vec![vec![Complex::new(T::zero(), T::zero()); self.dim]; self.dim];
        for (i, row) in d.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            for (cc, vv) in c.iter().zip(v) {
                row[*cc] = *vv;
            }
        }
        d
    }

    /// `max |H_ij − conj(H_ji)|` over stored entries.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            let (c, v) = self.row(i);
            for (j, hij) in c.iter().zip(v) {
                let (cj, vj) = self.row(*j);
                let hji = cj
                    .binary_search(&i)
                    .map(|k| vj[k])
                    .unwrap_or_else(|_| Complex::new(T::zero(), T::zero()));
                worst = worst.max((*hij - hji.conj()).norm());
            }
        }
        worst
    }

    /// Gershgorin interval containing the spectrum of `M^{-1/2} H M^{-1/2}`.
    pub fn gershgorin_bounds(&self) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..self.dim {
            let (c, v) = self.row(i);
            let mut center = T::zero();
            let mut radius = T::zero();
            for (j, hij) in c.iter().zip(v) {
                if *j == i {
                    center = hij.re / self.mass[i];
                } else {
                    radius += hij.norm() / (self.mass[i] * self.mass[*j]).sqrt();
                }
            }
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        (lo, hi)
    }

    /// `xᴴ H x / xᴴ M x`.
    pub fn rayleigh_quotient(&self, x: &[Cplx<T>]) -> T {
        let mut hx = vec![Complex::new(T::zero(), T::zero()); self.dim];
        self.apply(x, &mut hx);
        let num = crate::scalar::dot(x, &hx).re;
        let den: T = x.iter().zip(&self.mass).map(|(z, m)| z.norm_sqr() * *m).sum();
        num / den
    }
}
