//! Gauge-covariant finite differences for `H_{A,q}` on 2D flat or conformally
//! flat tori and on Neumann rectangles.
//!
//! Each edge carries the exact line integral `θ_e = ∫_e A` and contributes the
//! link energy `w_e |e^{-iθ_e} u_j − u_i|²`. In two dimensions the Dirichlet
//! energy is conformally invariant, so a metric `e^{2φ}·flat` only enters
//! through the mass `cellArea·e^{2φ}`.

use num_complex::Complex;

use crate::eigen::{lowest_eigenpairs, SpectralResult};
use crate::error::{invalid, Error, Result};
use crate::exact_torus::ConstantForm;
use crate::lattice::{distance_to_flux_lattice, Lattice};
use crate::operator::{HermitianOperator, OperatorBuilder};
use crate::potential::{Form2, ScalarField2};
use crate::scalar::{Cplx, Real};

/// Smallest admissible resolution per axis.
pub const MIN_RESOLUTION: usize = 8;

/// Edge integrals of a 1-form on a periodic `n₀ × n₁` grid.
///
/// `x[i + n₀ j]` integrates along `(i, j) → (i+1, j)` and `y[i + n₀ j]` along
/// `(i, j) → (i, j+1)`, indices taken periodically.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledForm<T> {
    pub n: [usize; 2],
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> SampledForm<T> {
    pub fn zeros(n: [usize; 2]) -> Self {
        Self {
            n,
            x: vec![T::zero(); n[0] * n[1]],
            y: vec![T::zero(); n[0] * n[1]],
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| *a + *b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| *a - *b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.x.iter().chain(&self.y).fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }
}

/// Hodge pieces of a sampled periodic 1-form: `A = exact + coexact + h`.
#[derive(Debug, Clone)]
pub struct HodgeParts<T> {
    pub harmonic: ConstantForm<T>,
    pub coexact: SampledForm<T>,
    pub exact: SampledForm<T>,
    /// Potential `f` with `exact = df`, zero mean.
    pub potential: Vec<T>,
}

/// Per-cell magnetic field and its L² norm.
#[derive(Debug, Clone)]
pub struct PlaquetteField<T> {
    pub b: Vec<T>,
    pub norm2: T,
}

/// Scalars entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridScalars<T> {
    pub volume: T,
    pub q_integral: T,
    pub mu: T,
}

/// Common surface of the discretizations used by the bound checks.
pub trait Discretization<T: Real> {
    /// Discrete `H_{A,q}`.
    fn operator(&self) -> Result<HermitianOperator<T>>;
    /// Scalar `Δ + W` on the same geometry, `W` given per node.
    fn scalar_operator(&self, w: &[T]) -> Result<HermitianOperator<T>>;
    /// Nodal `q`.
    fn potential(&self) -> &[T];
    /// Nodal `|A|²` in the surface metric.
    fn form_norm2(&self) -> Vec<T>;
    fn volume(&self) -> T;
    fn q_integral(&self) -> T;
    /// `‖B‖²`.
    fn field_norm2(&self) -> T;
    /// Characteristic mesh width.
    fn mesh_width(&self) -> T;
    fn node_count(&self) -> usize;
    /// Closed-form first eigenvalue on coexact 1-forms, when known.
    fn coexact_eigenvalue(&self) -> Option<T> {
        None
    }
}

/// First positive eigenvalue `μ` of the scalar Laplacian (`A = 0`, `q = 0`).
pub fn first_positive_eigenvalue<T: Real, D: Discretization<T> + ?Sized>(disc: &D, tol: T, seed: u64) -> Result<T> {
    let h = disc.scalar_operator(&vec![T::zero(); disc.node_count()])?;
    let r = lowest_eigenpairs(&h, 2, tol, seed)?;
    if !r.converged {
        return Err(Error::Solver("fewer than 2 converged eigenvalues for μ".into()));
    }
    Ok(r.eigenvalues[1])
}

/// `|M|`, `∫q` and `μ` for any discretization.
pub fn scalar_quantities<T: Real, D: Discretization<T> + ?Sized>(disc: &D, tol: T, seed: u64) -> Result<GridScalars<T>> {
    Ok(GridScalars {
        volume: disc.volume(),
        q_integral: disc.q_integral(),
        mu: match disc.coexact_eigenvalue() {
            Some(mu) => mu,
            None => first_positive_eigenvalue(disc, tol, seed)?,
        },
    })
}

/// Spectrum of `Δ + |A|² + q` on the same geometry.
pub fn comparison_spectrum<T: Real, D: Discretization<T> + ?Sized>(
    disc: &D,
    k: usize,
    tol: T,
    seed: u64,
) -> Result<SpectralResult<T>> {
    let w: Vec<T> = disc
        .form_norm2()
        .iter()
        .zip(disc.potential())
        .map(|(a, q)| *a + *q)
        .collect();
    lowest_eigenpairs(&disc.scalar_operator(&w)?, k, tol, seed)
}

/// Periodic grid on a rectangular flat torus with conformal factor `e^{2φ}`.
#[derive(Debug, Clone)]
pub struct TorusGrid<T> {
    lattice: Lattice<T>,
    periods: [T; 2],
    n: [usize; 2],
    phi: Vec<T>,
    q: Vec<T>,
    phases: SampledForm<T>,
    form: Option<Form2<T>>,
}

impl<T: Real> TorusGrid<T> {
    /// Grid on `R²/Γ` for an axis-aligned lattice `Γ`.
    pub fn new(lattice: Lattice<T>, n0: usize, n1: usize) -> Result<Self> {
        if lattice.dim() != 2 {
            return Err(invalid("torus grids are two-dimensional"));
        }
        if n0 < MIN_RESOLUTION || n1 < MIN_RESOLUTION {
            return Err(invalid(format!("resolution must be at least {MIN_RESOLUTION} per axis")));
        }
        let m = lattice.matrix();
        let scale = m.iter().flatten().fold(T::zero(), |a, b| a.max(b.abs()));
        if m[0][1].abs() > T::lit(1e-12) * scale || m[1][0].abs() > T::lit(1e-12) * scale {
            return Err(Error::Geometry(
                "finite-difference torus needs axis-aligned generators".into(),
            ));
        }
        let periods = [m[0][0].abs(), m[1][1].abs()];
        let nodes = n0 * n1;
        Ok(Self {
            lattice,
            periods,
            n: [n0, n1],
            phi: vec![T::zero(); nodes],
            q: vec![T::zero(); nodes],
            phases: SampledForm::zeros([n0, n1]),
            form: Some(Form2::zero()),
        })
    }

    pub fn unit(n: usize) -> Result<Self> {
        Self::new(Lattice::integer(2)?, n, n)
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    pub fn resolution(&self) -> [usize; 2] {
        self.n
    }

    pub fn periods(&self) -> [T; 2] {
        self.periods
    }

    pub fn spacing(&self) -> [T; 2] {
        [
            self.periods[0] / T::from_usize_lossy(self.n[0]),
            self.periods[1] / T::from_usize_lossy(self.n[1]),
        ]
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        (i % self.n[0]) + self.n[0] * (j % self.n[1])
    }

    pub fn node(&self, i: usize, j: usize) -> [T; 2] {
        let h = self.spacing();
        [T::from_usize_lossy(i) * h[0], T::from_usize_lossy(j) * h[1]]
    }

    fn for_nodes(&self, f: &ScalarField2<T>) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n[0] * self.n[1]);
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let p = self.node(i, j);
                out.push(f.eval(p[0], p[1]));
            }
        }
        out
    }

    fn require_periodic(&self, ok: bool, what: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("{what} is not periodic on this torus")))
        }
    }

    pub fn with_conformal_factor(mut self, phi: &ScalarField2<T>) -> Result<Self> {
        self.require_periodic(phi.is_periodic(self.periods), "conformal factor")?;
        self.phi = self.for_nodes(phi);
        Ok(self)
    }

    pub fn with_potential(mut self, q: &ScalarField2<T>) -> Result<Self> {
        self.require_periodic(q.is_periodic(self.periods), "scalar potential")?;
        self.q = self.for_nodes(q);
        Ok(self)
    }

    pub fn with_form(mut self, a: &Form2<T>) -> Result<Self> {
        self.require_periodic(a.is_periodic(self.periods), "magnetic potential")?;
        self.phases = self.sample_form(a);
        self.form = Some(a.clone());
        Ok(self)
    }

    /// Replaces the edge phases; nodal `|A|²` is then estimated from them.
    pub fn with_phases(mut self, phases: SampledForm<T>) -> Result<Self> {
        if phases.n != self.n || !phases.is_finite() {
            return Err(invalid("phase field does not match grid"));
        }
        self.phases = phases;
        self.form = None;
        Ok(self)
    }

    pub fn phases(&self) -> &SampledForm<T> {
        &self.phases
    }

    pub fn conformal_factor(&self) -> &[T] {
        &self.phi
    }

    /// Exact edge integrals of an analytic form.
    pub fn sample_form(&self, a: &Form2<T>) -> SampledForm<T> {
        let mut s = SampledForm::zeros(self.n);
        let h = self.spacing();
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let p = self.node(i, j);
                let k = i + self.n[0] * j;
                s.x[k] = a.line_integral(p, [p[0] + h[0], p[1]]);
                s.y[k] = a.line_integral(p, [p[0], p[1] + h[1]]);
            }
        }
        s
    }

    /// Edge differences `ψ(end) − ψ(start)` of a periodic scalar.
    pub fn gradient_of(&self, psi: &ScalarField2<T>) -> Result<SampledForm<T>> {
        self.require_periodic(psi.is_periodic(self.periods), "gauge function")?;
        let f = self.for_nodes(psi);
        Ok(self.discrete_gradient(&f))
    }

    fn discrete_gradient(&self, f: &[T]) -> SampledForm<T> {
        let mut s = SampledForm::zeros(self.n);
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let k = self.index(i, j);
                s.x[k] = f[self.index(i + 1, j)] - f[k];
                s.y[k] = f[self.index(i, j + 1)] - f[k];
            }
        }
        s
    }

    fn weights(&self) -> [T; 2] {
        let h = self.spacing();
        [h[1] / h[0], h[0] / h[1]]
    }

    pub fn cell_area(&self) -> T {
        let h = self.spacing();
        h[0] * h[1]
    }

    /// Nodal mass `cellArea·e^{2φ}`.
    pub fn mass(&self) -> Vec<T> {
        let a = self.cell_area();
        self.phi.iter().map(|p| a * (*p + *p).exp()).collect()
    }

    /// Area of the flat fundamental domain.
    pub fn flat_area(&self) -> T {
        self.periods[0] * self.periods[1]
    }

    fn assemble(&self, phases: Option<&SampledForm<T>>, w_nodes: &[T]) -> Result<HermitianOperator<T>> {
        let nodes = self.n[0] * self.n[1];
        let mass = self.mass();
        let w = self.weights();
        let mut b = OperatorBuilder::new(nodes);
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let k = self.index(i, j);
                let (tx, ty) = phases.map_or((T::zero(), T::zero()), |p| (p.x[k], p.y[k]));
                b.add_link(k, self.index(i + 1, j), w[0], -tx);
                b.add_link(k, self.index(i, j + 1), w[1], -ty);
                b.add_diagonal(k, w_nodes[k] * mass[k]);
            }
        }
        let op = b.build(mass)?;
        debug_assert!(op.hermitian_defect() == T::zero());
        Ok(op)
    }

    /// Per-cell `B = (oriented phase sum)/cellArea` and `‖B‖² = Σ B²·cellArea`.
    pub fn plaquette_field(&self) -> PlaquetteField<T> {
        let area = self.cell_area();
        let p = &self.phases;
        let mut b = Vec::with_capacity(self.n[0] * self.n[1]);
        let mut norm2 = T::zero();
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let c = p.x[self.index(i, j)] + p.y[self.index(i + 1, j)] - p.x[self.index(i, j + 1)] - p.y[self.index(i, j)];
                norm2 += c * c / area;
                b.push(c / area);
            }
        }
        PlaquetteField { b, norm2 }
    }

    /// `⟨α, β⟩ = Σ w_e α_e β_e`, the discrete L² pairing of 1-forms.
    pub fn form_inner(&self, a: &SampledForm<T>, b: &SampledForm<T>) -> T {
        let w = self.weights();
        let sx: T = a.x.iter().zip(&b.x).map(|(u, v)| *u * *v).sum();
        let sy: T = a.y.iter().zip(&b.y).map(|(u, v)| *u * *v).sum();
        w[0] * sx + w[1] * sy
    }

    /// Discrete Hodge decomposition in the flat metric (coclosed, closed and
    /// exact subspaces of 1-forms coincide for conformal metrics in 2D).
    pub fn hodge_decompose(&self, a: &SampledForm<T>) -> Result<HodgeParts<T>> {
        if a.n != self.n {
            return Err(invalid("form does not match grid"));
        }
        let nn = T::from_usize_lossy(self.n[0] * self.n[1]);
        let mean_x = a.x.iter().copied().sum::<T>() / nn;
        let mean_y = a.y.iter().copied().sum::<T>() / nn;
        let h = self.spacing();
        let harmonic = ConstantForm::new(vec![mean_x / h[0], mean_y / h[1]]);

        // Divergence δα at each node.
        let w = self.weights();
        let mut div = vec![T::zero(); self.n[0] * self.n[1]];
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let k = self.index(i, j);
                let left = self.index(i + self.n[0] - 1, j);
                let down = self.index(i, j + self.n[1] - 1);
                div[k] = w[0] * (a.x[k] - a.x[left]) + w[1] * (a.y[k] - a.y[down]);
            }
        }
        let f = solve_periodic_poisson(self.n, w, &div);
        let exact = self.discrete_gradient(&f);
        let mut harm = SampledForm::zeros(self.n);
        harm.x.iter_mut().for_each(|v| *v = mean_x);
        harm.y.iter_mut().for_each(|v| *v = mean_y);
        let coexact = a.minus(&exact).minus(&harm);
        Ok(HodgeParts {
            harmonic,
            coexact,
            exact,
            potential: f,
        })
    }

    /// `d(h, L_Z)²` for the harmonic part of the current phases.
    pub fn harmonic_distance2(&self) -> Result<T> {
        let parts = self.hodge_decompose(&self.phases)?;
        distance_to_flux_lattice(&self.lattice, &parts.harmonic.components, self.flat_area())
    }

    /// Same distance evaluated with the conformal metric:
    /// `Σ e^{-2φ}|h − ω|²·mass`, node by node.
    pub fn harmonic_distance2_conformal(&self) -> Result<T> {
        let parts = self.hodge_decompose(&self.phases)?;
        let flux = self.lattice.flux_lattice()?;
        let cv = flux.closest_vectors(&parts.harmonic.components)?;
        let omega = &cv.minimizers.points[0].point;
        let pointwise: T = parts
            .harmonic
            .components
            .iter()
            .zip(omega)
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .sum();
        Ok(self
            .phi
            .iter()
            .zip(self.mass())
            .map(|(p, m)| (-(*p + *p)).exp() * pointwise * m)
            .sum())
    }
}

impl<T: Real> Discretization<T> for TorusGrid<T> {
    fn operator(&self) -> Result<HermitianOperator<T>> {
        self.assemble(Some(&self.phases), &self.q)
    }

    fn scalar_operator(&self, w: &[T]) -> Result<HermitianOperator<T>> {
        if w.len() != self.node_count() {
            return Err(invalid("potential length differs from node count"));
        }
        self.assemble(None, w)
    }

    fn potential(&self) -> &[T] {
        &self.q
    }

    fn form_norm2(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.node_count());
        let h = self.spacing();
        let half = T::lit(0.5);
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let k = self.index(i, j);
                let flat = match &self.form {
                    Some(f) => {
                        let p = self.node(i, j);
                        let a = f.eval(p[0], p[1]);
                        a[0] * a[0] + a[1] * a[1]
                    }
                    None => {
                        let ax = (self.phases.x[k] + self.phases.x[self.index(i + self.n[0] - 1, j)]) * half / h[0];
                        let ay = (self.phases.y[k] + self.phases.y[self.index(i, j + self.n[1] - 1)]) * half / h[1];
                        ax * ax + ay * ay
                    }
                };
                out.push(flat * (-(self.phi[k] + self.phi[k])).exp());
            }
        }
        out
    }

    fn volume(&self) -> T {
        self.mass().into_iter().sum()
    }

    fn q_integral(&self) -> T {
        self.q.iter().zip(self.mass()).map(|(q, m)| *q * m).sum()
    }

    fn field_norm2(&self) -> T {
        self.plaquette_field().norm2
    }

    fn mesh_width(&self) -> T {
        let h = self.spacing();
        h[0].max(h[1])
    }

    fn node_count(&self) -> usize {
        self.n[0] * self.n[1]
    }
}

/// Solves `div(grad f) = rhs` on the periodic grid with zero mean, via a
/// separable discrete Fourier transform.
fn solve_periodic_poisson<T: Real>(n: [usize; 2], w: [T; 2], rhs: &[T]) -> Vec<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut data: Vec<Cplx<T>> = rhs.iter().map(|v| Complex::new(*v, T::zero())).collect();
    dft_axis(&mut data, n, 0, false);
    dft_axis(&mut data, n, 1, false);
    let two = T::lit(2.0);
    for j in 0..n[1] {
        for i in 0..n[0] {
            let k = i + n[0] * j;
            let ci = (T::two_pi() * T::from_usize_lossy(i) / T::from_usize_lossy(n[0])).cos();
            let cj = (T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(n[1])).cos();
            let eig = w[0] * (two * ci - two) + w[1] * (two * cj - two);
            data[k] = if i == 0 && j == 0 { zero } else { data[k] / eig };
        }
    }
    dft_axis(&mut data, n, 0, true);
    dft_axis(&mut data, n, 1, true);
    let scale = T::one() / T::from_usize_lossy(n[0] * n[1]);
    data.iter().map(|z| z.re * scale).collect()
}

fn dft_axis<T: Real>(data: &mut [Cplx<T>], n: [usize; 2], axis: usize, inverse: bool) {
    let len = n[axis];
    let sign = if inverse { T::one() } else { -T::one() };
    let twiddle: Vec<Cplx<T>> = (0..len)
        .map(|m| crate::scalar::phase(sign * T::two_pi() * T::from_usize_lossy(m) / T::from_usize_lossy(len)))
        .collect();
    let (count, stride, step) = if axis == 0 { (n[1], n[0], 1) } else { (n[0], 1, n[0]) };
    let mut line = vec![Complex::new(T::zero(), T::zero()); len];
    for c in 0..count {
        let base = c * stride;
        for f in 0..len {
            let mut acc = Complex::new(T::zero(), T::zero());
            for t in 0..len {
                acc += data[base + t * step] * twiddle[(f * t) % len];
            }
            line[f] = acc;
        }
        for (t, v) in line.iter().enumerate() {
            data[base + t * step] = *v;
        }
    }
}

/// Cell-centred grid on `[0, L₀] × [0, L₁]` with magnetic Neumann conditions.
///
/// The natural boundary condition of the quadratic form is obtained by
/// keeping only links between interior cell centres.
#[derive(Debug, Clone)]
pub struct RectangleGrid<T> {
    sides: [T; 2],
    n: [usize; 2],
    q: Vec<T>,
    /// `(n₀−1)·n₁` horizontal links, indexed `i + (n₀−1) j`.
    phase_x: Vec<T>,
    /// `n₀·(n₁−1)` vertical links, indexed `i + n₀ j`.
    phase_y: Vec<T>,
    form: Form2<T>,
}

impl<T: Real> RectangleGrid<T> {
    pub fn new(sides: [T; 2], n0: usize, n1: usize) -> Result<Self> {
        if !(sides[0] > T::zero() && sides[1] > T::zero()) {
            return Err(invalid("rectangle sides must be positive"));
        }
        if n0 < MIN_RESOLUTION || n1 < MIN_RESOLUTION {
            return Err(invalid(format!("resolution must be at least {MIN_RESOLUTION} per axis")));
        }
        Ok(Self {
            sides,
            n: [n0, n1],
            q: vec![T::zero(); n0 * n1],
            phase_x: vec![T::zero(); (n0 - 1) * n1],
            phase_y: vec![T::zero(); n0 * (n1 - 1)],
            form: Form2::zero(),
        })
    }

    pub fn sides(&self) -> [T; 2] {
        self.sides
    }

    pub fn resolution(&self) -> [usize; 2] {
        self.n
    }

    pub fn spacing(&self) -> [T; 2] {
        [
            self.sides[0] / T::from_usize_lossy(self.n[0]),
            self.sides[1] / T::from_usize_lossy(self.n[1]),
        ]
    }

    pub fn center(&self, i: usize, j: usize) -> [T; 2] {
        let h = self.spacing();
        let half = T::lit(0.5);
        [
            (T::from_usize_lossy(i) + half) * h[0],
            (T::from_usize_lossy(j) + half) * h[1],
        ]
    }

    pub fn with_potential(mut self, q: &ScalarField2<T>) -> Self {
        let mut out = Vec::with_capacity(self.n[0] * self.n[1]);
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let c = self.center(i, j);
                out.push(q.eval(c[0], c[1]));
            }
        }
        self.q = out;
        self
    }

    pub fn with_form(mut self, a: &Form2<T>) -> Self {
        let [n0, n1] = self.n;
        for j in 0..n1 {
            for i in 0..n0 {
                let c = self.center(i, j);
                if i + 1 < n0 {
                    self.phase_x[i + (n0 - 1) * j] = a.line_integral(c, self.center(i + 1, j));
                }
                if j + 1 < n1 {
                    self.phase_y[i + n0 * j] = a.line_integral(c, self.center(i, j + 1));
                }
            }
        }
        self.form = a.clone();
        self
    }

    fn assemble(&self, with_phases: bool, w_nodes: &[T]) -> Result<HermitianOperator<T>> {
        let [n0, n1] = self.n;
        let h = self.spacing();
        let w = [h[1] / h[0], h[0] / h[1]];
        let area = h[0] * h[1];
        let mut b = OperatorBuilder::new(n0 * n1);
        for j in 0..n1 {
            for i in 0..n0 {
                let k = i + n0 * j;
                if i + 1 < n0 {
                    let t = if with_phases { self.phase_x[i + (n0 - 1) * j] } else { T::zero() };
                    b.add_link(k, k + 1, w[0], -t);
                }
                if j + 1 < n1 {
                    let t = if with_phases { self.phase_y[i + n0 * j] } else { T::zero() };
                    b.add_link(k, k + n0, w[1], -t);
                }
                b.add_diagonal(k, w_nodes[k] * area);
            }
        }
        let op = b.build(vec![area; n0 * n1])?;
        debug_assert!(op.hermitian_defect() == T::zero());
        Ok(op)
    }

    /// Plaquettes between four cell centres. Plaquettes touching the
    /// boundary also cover the adjacent half-cell strip in `‖B‖²`.
    pub fn plaquette_field(&self) -> PlaquetteField<T> {
        let [n0, n1] = self.n;
        let h = self.spacing();
        let area = h[0] * h[1];
        let half = T::lit(0.5);
        let mut b = Vec::with_capacity((n0 - 1) * (n1 - 1));
        let mut norm2 = T::zero();
        for j in 0..n1 - 1 {
            for i in 0..n0 - 1 {
                let c = self.phase_x[i + (n0 - 1) * j] + self.phase_y[(i + 1) + n0 * j]
                    - self.phase_x[i + (n0 - 1) * (j + 1)]
                    - self.phase_y[i + n0 * j];
                let bc = c / area;
                let ex = T::one() + if i == 0 { half } else { T::zero() } + if i + 2 == n0 { half } else { T::zero() };
                let ey = T::one() + if j == 0 { half } else { T::zero() } + if j + 2 == n1 { half } else { T::zero() };
                norm2 += bc * bc * area * ex * ey;
                b.push(bc);
            }
        }
        PlaquetteField { b, norm2 }
    }
}

impl<T: Real> Discretization<T> for RectangleGrid<T> {
    fn operator(&self) -> Result<HermitianOperator<T>> {
        self.assemble(true, &self.q)
    }

    fn scalar_operator(&self, w: &[T]) -> Result<HermitianOperator<T>> {
        if w.len() != self.node_count() {
            return Err(invalid("potential length differs from node count"));
        }
        self.assemble(false, w)
    }

    fn potential(&self) -> &[T] {
        &self.q
    }

    fn form_norm2(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.node_count());
        for j in 0..self.n[1] {
            for i in 0..self.n[0] {
                let c = self.center(i, j);
                let a = self.form.eval(c[0], c[1]);
                out.push(a[0] * a[0] + a[1] * a[1]);
            }
        }
        out
    }

    fn volume(&self) -> T {
        self.sides[0] * self.sides[1]
    }

    fn q_integral(&self) -> T {
        let h = self.spacing();
        self.q.iter().copied().sum::<T>() * h[0] * h[1]
    }

    fn field_norm2(&self) -> T {
        self.plaquette_field().norm2
    }

    fn mesh_width(&self) -> T {
        let h = self.spacing();
        h[0].max(h[1])
    }

    fn node_count(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// Coexact 1-forms with absolute boundary conditions on a planar domain
    /// are Hodge duals of Dirichlet eigenfunctions: `π²(1/L₀² + 1/L₁²)`.
    fn coexact_eigenvalue(&self) -> Option<T> {
        let pi = T::PI();
        Some(pi * pi * (T::one() / (self.sides[0] * self.sides[0]) + T::one() / (self.sides[1] * self.sides[1])))
    }
}
