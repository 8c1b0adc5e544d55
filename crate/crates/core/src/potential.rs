//! Analytic catalog of scalar potentials and magnetic 1-forms.
//!
//! Every entry has a closed-form line integral along straight segments
//! (or an exact endpoint difference for gradients), so edge phases are
//! exact up to rounding and discrete gauge invariance holds exactly.

use crate::scalar::Real;

/// `amp·cos(2π⟨k, x⟩ + phase)` or a constant, on the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarTerm2<T> {
    Constant(T),
    Wave { amp: T, k: [T; 2], phase: T },
}

/// Sum of [`ScalarTerm2`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarField2<T> {
    pub terms: Vec<ScalarTerm2<T>>,
}

impl<T: Real> ScalarField2<T> {
    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    pub fn constant(c: T) -> Self {
        Self {
            terms: vec![ScalarTerm2::Constant(c)],
        }
    }

    pub fn cos(amp: T, k: [T; 2], phase: T) -> Self {
        Self {
            terms: vec![ScalarTerm2::Wave { amp, k, phase }],
        }
    }

    pub fn sin(amp: T, k: [T; 2]) -> Self {
        Self::cos(amp, k, -T::FRAC_PI_2())
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| match t {
            ScalarTerm2::Constant(_) => true,
            ScalarTerm2::Wave { amp, .. } => *amp == T::zero(),
        })
    }

    pub fn eval(&self, x: T, y: T) -> T {
        let tau = T::two_pi();
        self.terms
            .iter()
            .map(|t| match *t {
                ScalarTerm2::Constant(c) => c,
                ScalarTerm2::Wave { amp, k, phase } => amp * (tau * (k[0] * x + k[1] * y) + phase).cos(),
            })
            .sum()
    }

    pub fn gradient(&self, x: T, y: T) -> [T; 2] {
        let tau = T::two_pi();
        let mut g = [T::zero(); 2];
        for t in &self.terms {
            if let ScalarTerm2::Wave { amp, k, phase } = *t {
                let s = -amp * tau * (tau * (k[0] * x + k[1] * y) + phase).sin();
                g[0] += s * k[0];
                g[1] += s * k[1];
            }
        }
        g
    }

    /// Whether every wave is periodic with the given periods.
    pub fn is_periodic(&self, periods: [T; 2]) -> bool {
        let tol = T::lit(1e-9);
        self.terms.iter().all(|t| match *t {
            ScalarTerm2::Constant(_) => true,
            ScalarTerm2::Wave { k, .. } => (0..2).all(|i| {
                let c = k[i] * periods[i];
                (c - c.round()).abs() <= tol
            }),
        })
    }
}

/// One term of a planar 1-form.
#[derive(Debug, Clone, PartialEq)]
pub enum FormTerm2<T> {
    /// `a₀ dx + a₁ dy`.
    Constant([T; 2]),
    /// `amp·cos(2π⟨k, x⟩ + phase) dx_axis`.
    Wave { axis: usize, amp: T, k: [T; 2], phase: T },
    /// `dψ`.
    Gradient(ScalarField2<T>),
}

/// Planar 1-form as a sum of catalog terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Form2<T> {
    pub terms: Vec<FormTerm2<T>>,
}

/// `∫₀¹ cos(α + βs) ds`.
fn mean_cos<T: Real>(alpha: T, beta: T) -> T {
    let half = beta * T::lit(0.5);
    let sinc = if half.abs() < T::lit(1e-6) {
        T::one() - half * half / T::lit(6.0)
    } else {
        half.sin() / half
    };
    (alpha + half).cos() * sinc
}

impl<T: Real> Form2<T> {
    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    pub fn constant(a: [T; 2]) -> Self {
        Self {
            terms: vec![FormTerm2::Constant(a)],
        }
    }

    pub fn wave(axis: usize, amp: T, k: [T; 2], phase: T) -> Self {
        assert!(axis < 2);
        Self {
            terms: vec![FormTerm2::Wave { axis, amp, k, phase }],
        }
    }

    pub fn gradient(psi: ScalarField2<T>) -> Self {
        Self {
            terms: vec![FormTerm2::Gradient(psi)],
        }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Multiplies every term by `s`.
    pub fn scaled(&self, s: T) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                FormTerm2::Constant(a) => FormTerm2::Constant([a[0] * s, a[1] * s]),
                FormTerm2::Wave { axis, amp, k, phase } => FormTerm2::Wave {
                    axis: *axis,
                    amp: *amp * s,
                    k: *k,
                    phase: *phase,
                },
                FormTerm2::Gradient(psi) => FormTerm2::Gradient(ScalarField2 {
                    terms: psi
                        .terms
                        .iter()
                        .map(|p| match *p {
                            ScalarTerm2::Constant(c) => ScalarTerm2::Constant(c * s),
                            ScalarTerm2::Wave { amp, k, phase } => ScalarTerm2::Wave { amp: amp * s, k, phase },
                        })
                        .collect(),
                }),
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, x: T, y: T) -> [T; 2] {
        let tau = T::two_pi();
        let mut a = [T::zero(); 2];
        for t in &self.terms {
            match t {
                FormTerm2::Constant(c) => {
                    a[0] += c[0];
                    a[1] += c[1];
                }
                FormTerm2::Wave { axis, amp, k, phase } => {
                    a[*axis] += *amp * (tau * (k[0] * x + k[1] * y) + *phase).cos();
                }
                FormTerm2::Gradient(psi) => {
                    let g = psi.gradient(x, y);
                    a[0] += g[0];
                    a[1] += g[1];
                }
            }
        }
        a
    }

    /// `∫ A` along the straight segment `p → q`, in closed form.
    pub fn line_integral(&self, p: [T; 2], q: [T; 2]) -> T {
        let tau = T::two_pi();
        let d = [q[0] - p[0], q[1] - p[1]];
        self.terms
            .iter()
            .map(|t| match t {
                FormTerm2::Constant(c) => c[0] * d[0] + c[1] * d[1],
                FormTerm2::Wave { axis, amp, k, phase } => {
                    let alpha = tau * (k[0] * p[0] + k[1] * p[1]) + *phase;
                    let beta = tau * (k[0] * d[0] + k[1] * d[1]);
                    *amp * d[*axis] * mean_cos(alpha, beta)
                }
                FormTerm2::Gradient(psi) => psi.eval(q[0], q[1]) - psi.eval(p[0], p[1]),
            })
            .sum()
    }

    /// Magnetic field `B = ∂ₓA_y − ∂_yA_x` at a point.
    pub fn field(&self, x: T, y: T) -> T {
        let tau = T::two_pi();
        let mut b = T::zero();
        for t in &self.terms {
            if let FormTerm2::Wave { axis, amp, k, phase } = t {
                let ds = -*amp * tau * (tau * (k[0] * x + k[1] * y) + *phase).sin();
                if *axis == 1 {
                    b += ds * k[0];
                } else {
                    b -= ds * k[1];
                }
            }
        }
        b
    }

    /// Whether the form is closed (no wave terms with nonzero field).
    pub fn is_closed(&self) -> bool {
        self.terms.iter().all(|t| match t {
            FormTerm2::Wave { axis, amp, k, .. } => *amp == T::zero() || k[1 - *axis] == T::zero(),
            _ => true,
        })
    }

    pub fn is_periodic(&self, periods: [T; 2]) -> bool {
        let tol = T::lit(1e-9);
        self.terms.iter().all(|t| match t {
            FormTerm2::Constant(_) => true,
            FormTerm2::Wave { k, .. } => (0..2).all(|i| {
                let c = k[i] * periods[i];
                (c - c.round()).abs() <= tol
            }),
            FormTerm2::Gradient(psi) => psi.is_periodic(periods),
        })
    }
}

/// Scalar function on `R³`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarTerm3<T> {
    Constant(T),
    /// `⟨c, x⟩`.
    Linear([T; 3]),
    /// `amp·cos(2π⟨k, x⟩ + phase)`.
    Wave { amp: T, k: [T; 3], phase: T },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarField3<T> {
    pub terms: Vec<ScalarTerm3<T>>,
}

impl<T: Real> ScalarField3<T> {
    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    pub fn constant(c: T) -> Self {
        Self {
            terms: vec![ScalarTerm3::Constant(c)],
        }
    }

    pub fn linear(c: [T; 3]) -> Self {
        Self {
            terms: vec![ScalarTerm3::Linear(c)],
        }
    }

    pub fn cos(amp: T, k: [T; 3], phase: T) -> Self {
        Self {
            terms: vec![ScalarTerm3::Wave { amp, k, phase }],
        }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| match t {
            ScalarTerm3::Constant(_) => true,
            ScalarTerm3::Linear(c) => c.iter().all(|x| *x == T::zero()),
            ScalarTerm3::Wave { amp, .. } => *amp == T::zero(),
        })
    }

    pub fn eval(&self, p: [T; 3]) -> T {
        let tau = T::two_pi();
        self.terms
            .iter()
            .map(|t| match *t {
                ScalarTerm3::Constant(c) => c,
                ScalarTerm3::Linear(c) => c[0] * p[0] + c[1] * p[1] + c[2] * p[2],
                ScalarTerm3::Wave { amp, k, phase } => {
                    amp * (tau * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2]) + phase).cos()
                }
            })
            .sum()
    }

    pub fn gradient(&self, p: [T; 3]) -> [T; 3] {
        let tau = T::two_pi();
        let mut g = [T::zero(); 3];
        for t in &self.terms {
            match *t {
                ScalarTerm3::Constant(_) => {}
                ScalarTerm3::Linear(c) => {
                    for i in 0..3 {
                        g[i] += c[i];
                    }
                }
                ScalarTerm3::Wave { amp, k, phase } => {
                    let s = -amp * tau * (tau * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2]) + phase).sin();
                    for i in 0..3 {
                        g[i] += s * k[i];
                    }
                }
            }
        }
        g
    }
}

/// One term of an ambient 1-form restricted to a surface in `R³`.
#[derive(Debug, Clone, PartialEq)]
pub enum FormTerm3<T> {
    Constant([T; 3]),
    /// `amp·(axis × x)`, the flat of a rotation Killing field.
    Rotation { amp: T, axis: [T; 3] },
    /// `dir·cos(2π⟨k, x⟩ + phase)`.
    Wave { dir: [T; 3], k: [T; 3], phase: T },
    /// `dψ`; its chord integrals are endpoint differences.
    Gradient(ScalarField3<T>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Form3<T> {
    pub terms: Vec<FormTerm3<T>>,
}

const GAUSS4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GAUSS4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

impl<T: Real> Form3<T> {
    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    pub fn rotation(amp: T, axis: [T; 3]) -> Self {
        Self {
            terms: vec![FormTerm3::Rotation { amp, axis }],
        }
    }

    pub fn gradient(psi: ScalarField3<T>) -> Self {
        Self {
            terms: vec![FormTerm3::Gradient(psi)],
        }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `s·A`.
    pub fn scaled(&self, s: T) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                FormTerm3::Constant(c) => FormTerm3::Constant(c.map(|v| v * s)),
                FormTerm3::Rotation { amp, axis } => FormTerm3::Rotation { amp: *amp * s, axis: *axis },
                FormTerm3::Wave { dir, k, phase } => FormTerm3::Wave {
                    dir: dir.map(|v| v * s),
                    k: *k,
                    phase: *phase,
                },
                FormTerm3::Gradient(psi) => FormTerm3::Gradient(ScalarField3 {
                    terms: psi
                        .terms
                        .iter()
                        .map(|u| match *u {
                            ScalarTerm3::Constant(c) => ScalarTerm3::Constant(c * s),
                            ScalarTerm3::Linear(c) => ScalarTerm3::Linear(c.map(|v| v * s)),
                            ScalarTerm3::Wave { amp, k, phase } => ScalarTerm3::Wave { amp: amp * s, k, phase },
                        })
                        .collect(),
                }),
            })
            .collect();
        Self { terms }
    }

    /// Ambient vector `A(x)`.
    pub fn eval(&self, p: [T; 3]) -> [T; 3] {
        let tau = T::two_pi();
        let mut a = [T::zero(); 3];
        for t in &self.terms {
            let v = match t {
                FormTerm3::Constant(c) => *c,
                FormTerm3::Rotation { amp, axis } => {
                    let c = cross(*axis, p);
                    [c[0] * *amp, c[1] * *amp, c[2] * *amp]
                }
                FormTerm3::Wave { dir, k, phase } => {
                    let c = (tau * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2]) + *phase).cos();
                    [dir[0] * c, dir[1] * c, dir[2] * c]
                }
                FormTerm3::Gradient(psi) => psi.gradient(p),
            };
            for i in 0..3 {
                a[i] += v[i];
            }
        }
        a
    }

    /// `∫ A` along the chord `p → q`: 4-point Gauss–Legendre, except for
    /// gradient terms which integrate exactly to `ψ(q) − ψ(p)`.
    pub fn chord_integral(&self, p: [T; 3], q: [T; 3]) -> T {
        let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
        let half = T::lit(0.5);
        let mut total = T::zero();
        let mut quad = Form3::zero();
        for t in &self.terms {
            match t {
                FormTerm3::Gradient(psi) => total += psi.eval(q) - psi.eval(p),
                other => quad.terms.push(other.clone()),
            }
        }
        if !quad.terms.is_empty() {
            for (xi, w) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
                let s = half * (T::one() + T::lit(*xi));
                let x = [p[0] + d[0] * s, p[1] + d[1] * s, p[2] + d[2] * s];
                let a = quad.eval(x);
                total += half * T::lit(w) * (a[0] * d[0] + a[1] * d[1] + a[2] * d[2]);
            }
        }
        total
    }
}

pub(crate) fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
