//! Dense Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL with Wilkinson shifts.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

const MAX_QL_SWEEPS: usize = 60;

/// Eigenvalues in ascending order and the leading eigenvectors.
#[derive(Debug, Clone)]
pub struct DenseEigen<T> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors for `values[..vectors.len()]`.
    pub vectors: Vec<Vec<Cplx<T>>>,
}

/// Eigen-decomposes the Hermitian matrix `a` (row-major, `n × n`), returning
/// the first `n_vectors` eigenvectors. Only the lower triangle is read.
pub fn hermitian_eigen<T: Real>(a: &[Cplx<T>], n: usize, n_vectors: usize) -> Result<DenseEigen<T>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(DenseEigen {
            values: vec![],
            vectors: vec![],
        });
    }
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let two = T::lit(2.0);

    // Symmetrize from the lower triangle.
    let mut m = a.to_vec();
    for i in 0..n {
        m[i * n + i] = Complex::new(m[i * n + i].re, T::zero());
        for j in 0..i {
            m[j * n + i] = m[i * n + j].conj();
        }
    }
    let mut q = vec![zero; n * n];
    for i in 0..n {
        q[i * n + i] = one;
    }

    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let s = k + 1;
        let alpha = (s..n).map(|r| m[r * n + k].norm_sqr()).sum::<T>().sqrt();
        let tail: T = (s + 1..n).map(|r| m[r * n + k].norm_sqr()).sum();
        if alpha == T::zero() || tail == T::zero() {
            continue;
        }
        let x0 = m[s * n + k];
        let ph = if x0.norm() > T::zero() { x0 / x0.norm() } else { one };
        for r in s..n {
            v[r] = m[r * n + k];
        }
        v[s] += ph * alpha;
        let vn = (s..n).map(|r| v[r].norm_sqr()).sum::<T>().sqrt();
        for r in s..n {
            v[r] /= vn;
        }
        // p = A22 v, w = p − (vᴴp) v, A22 ← A22 − 2(v wᴴ + w vᴴ).
        for r in s..n {
            let mut acc = zero;
            for c in s..n {
                acc += m[r * n + c] * v[c];
            }
            p[r] = acc;
        }
        let mut kk = zero;
        for r in s..n {
            kk += v[r].conj() * p[r];
        }
        for r in s..n {
            p[r] -= v[r] * kk;
        }
        for r in s..n {
            let vr = v[r] * two;
            let pr = p[r] * two;
            for c in s..n {
                m[r * n + c] -= vr * p[c].conj() + pr * v[c].conj();
            }
        }
        let sub = -ph * alpha;
        m[s * n + k] = sub;
        m[k * n + s] = sub.conj();
        for r in s + 1..n {
            m[r * n + k] = zero;
            m[k * n + r] = zero;
        }
        // Q ← Q H.
        for row in 0..n {
            let mut acc = zero;
            for c in s..n {
                acc += q[row * n + c] * v[c];
            }
            let acc = acc * two;
            for c in s..n {
                q[row * n + c] -= acc * v[c].conj();
            }
        }
    }

    let mut d: Vec<T> = (0..n).map(|i| m[i * n + i].re).collect();
    let mut e = vec![T::zero(); n];
    // Diagonal unitary making the off-diagonal real and nonnegative.
    let mut phases = vec![one; n];
    for k in 0..n - 1 {
        let sub = m[(k + 1) * n + k];
        let r = sub.norm();
        e[k] = r;
        phases[k + 1] = if r > T::zero() { phases[k] * (sub / r) } else { phases[k] };
    }
    for row in 0..n {
        for c in 0..n {
            q[row * n + c] *= phases[c];
        }
    }

    let mut z: Vec<Vec<T>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { T::one() } else { T::zero() }).collect())
        .collect();
    tql(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .iter()
        .take(n_vectors.min(n))
        .map(|&j| {
            let zc = &z[j];
            (0..n)
                .map(|row| {
                    let mut acc = zero;
                    for (r, zr) in zc.iter().enumerate() {
                        acc += q[row * n + r] * *zr;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(DenseEigen { values, vectors })
}

/// Implicit QL on the symmetric tridiagonal `(d, e)` where `e[i]` couples
/// `i` and `i + 1`. Rotations are accumulated into the columns `z`.
fn tql<T: Real>(d: &mut [T], e: &mut [T], z: &mut [Vec<T>]) -> Result<()> {
    let n = d.len();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Solver("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (left, right) = z.split_at_mut(i + 1);
                let zi = &mut left[i];
                let zi1 = &mut right[0];
                for (a, bb) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *bb;
                    *bb = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let n = 5;
        let mut a = vec![Complex::new(0.0, 0.0); n * n];
        for i in 0..n {
            a[i * n + i] = Complex::new((n - i) as f64, 0.0);
        }
        let r = hermitian_eigen(&a, n, 2).unwrap();
        assert_eq!(r.values, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!((r.vectors[0][4].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_complex() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let a = vec![
            Complex::<f64>::new(2.0, 0.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, -1.0),
            Complex::new(2.0, 0.0),
        ];
        let r = hermitian_eigen(&a, 2, 2).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-14);
        assert!((r.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_random_hermitian() {
        let n = 7;
        let mut a = vec![Complex::new(0.0, 0.0); n * n];
        let mut s = 1u64;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            a[i * n + i] = Complex::new(rnd(), 0.0);
            for j in 0..i {
                let z = Complex::new(rnd(), rnd());
                a[i * n + j] = z;
                a[j * n + i] = z.conj();
            }
        }
        let r = hermitian_eigen(&a, n, n).unwrap();
        for (lam, x) in r.values.iter().zip(&r.vectors) {
            for i in 0..n {
                let mut ax = Complex::new(0.0, 0.0);
                for j in 0..n {
                    ax += a[i * n + j] * x[j];
                }
                assert!((ax - x[i] * *lam).norm() < 1e-12);
            }
        }
    }
}
