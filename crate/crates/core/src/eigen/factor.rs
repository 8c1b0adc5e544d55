//! Envelope (skyline) Cholesky factorization of `H − σM` after reverse
//! Cuthill–McKee reordering. Used as the shift-invert kernel.

use std::collections::VecDeque;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::scalar::{Cplx, Real};

/// `P (H − σM) Pᵀ = L Lᴴ` with `L` stored row by row over its envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky<T> {
    n: usize,
    /// New index → original index.
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<Cplx<T>>,
}

impl<T: Real> EnvelopeCholesky<T> {
    pub fn factor(op: &HermitianOperator<T>, shift: T) -> Result<Self> {
        let n = op.dim();
        let perm = reverse_cuthill_mckee(op);
        let mut iperm = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let mut first = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            let (cols, _) = op.row(old);
            first[new] = cols.iter().map(|&c| iperm[c]).filter(|&c| c <= new).min().unwrap_or(new).min(new);
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut data = vec![zero; start[n]];
        for (new, &old) in perm.iter().enumerate() {
            let (cols, vals) = op.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                let cn = iperm[c];
                if cn <= new {
                    let mut v = v;
                    if cn == new {
                        v.re -= shift * op.mass()[old];
                    }
                    data[start[new] + (cn - first[new])] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = data[start[i] + (j - fi)];
                let ri = &data[start[i] + (lo - fi)..start[i] + (j - fi)];
                let rj = &data[start[j] + (lo - fj)..start[j] + (j - fj)];
                for (a, b) in ri.iter().zip(rj) {
                    s -= *a * b.conj();
                }
                let djj = data[start[j] + (j - fj)].re;
                data[start[i] + (j - fi)] = s / djj;
            }
            let row = &data[start[i]..start[i] + (i - fi)];
            let d = data[start[i] + (i - fi)].re - row.iter().map(|z| z.norm_sqr()).sum::<T>();
            if !(d > T::zero()) {
                return Err(Error::Solver(format!(
                    "shifted operator not positive definite at pivot {i}"
                )));
            }
            data[start[i] + (i - fi)] = Complex::new(d.sqrt(), T::zero());
        }
        Ok(Self {
            n,
            perm,
            first,
            start,
            data,
        })
    }

    /// Number of stored entries of `L`.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `(H − σM) x = b` in place.
    pub fn solve(&self, b: &mut [Cplx<T>]) {
        let n = self.n;
        let mut y: Vec<Cplx<T>> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i] + (i - fi)];
            let mut s = y[i];
            for (l, yk) in row.iter().zip(&y[fi..i]) {
                s -= *l * *yk;
            }
            y[i] = s / self.data[self.start[i] + (i - fi)].re;
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = y[i] / self.data[self.start[i] + (i - fi)].re;
            y[i] = xi;
            let row = &self.data[self.start[i]..self.start[i] + (i - fi)];
            for (l, yk) in row.iter().zip(&mut y[fi..i]) {
                *yk -= l.conj() * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}

fn bfs_levels(adj: &[Vec<usize>], root: usize, seen: &mut [bool]) -> Vec<Vec<usize>> {
    let mut levels = vec![vec![root]];
    seen[root] = true;
    loop {
        let mut next = Vec::new();
        for &u in levels.last().unwrap() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    levels
}

/// Reverse Cuthill–McKee ordering from pseudo-peripheral roots.
pub fn reverse_cuthill_mckee<T: Real>(op: &HermitianOperator<T>) -> Vec<usize> {
    let n = op.dim();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| op.row(i).0.iter().copied().filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for seed in 0..n {
        if placed[seed] {
            continue;
        }
        // George–Liu pseudo-peripheral node search within this component.
        let mut root = seed;
        let mut depth = bfs_levels(&adj, root, &mut placed.clone()).len();
        loop {
            let levels = bfs_levels(&adj, root, &mut placed.clone());
            let cand = *levels.last().unwrap().iter().min_by_key(|&&v| (degree[v], v)).unwrap();
            let cand_depth = bfs_levels(&adj, cand, &mut placed.clone()).len();
            if cand_depth > depth {
                root = cand;
                depth = cand_depth;
            } else {
                break;
            }
        }
        let mut queue = VecDeque::from([root]);
        placed[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = adj[u].iter().copied().filter(|&w| !placed[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}
