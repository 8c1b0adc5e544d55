//! Cotan-weight magnetic Schrödinger operators on triangulated closed
//! surfaces in `R³`: geodesic icospheres and tori of revolution.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::grid::Discretization;
use crate::operator::{HermitianOperator, OperatorBuilder};
use crate::potential::{cross, Form3, ScalarField3};
use crate::scalar::Real;

/// Smallest interior angle accepted by the cotan assembly (radians).
pub const MIN_ANGLE: f64 = 1e-6;

/// Closed orientable triangle mesh with edge phases and vertex potential.
#[derive(Debug, Clone)]
pub struct TriMesh<T> {
    vertices: Vec<[T; 3]>,
    faces: Vec<[usize; 3]>,
    /// Undirected edges `(i, j)` with `i < j`.
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    /// `∫ A` along `i → j` for each `(i, j)` in `edges`.
    phases: Vec<T>,
    q: Vec<T>,
    form: Form3<T>,
}

fn sub<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn len3<T: Real>(a: [T; 3]) -> T {
    dot3(a, a).sqrt()
}

fn normalized<T: Real>(a: [T; 3]) -> [T; 3] {
    let l = len3(a);
    [a[0] / l, a[1] / l, a[2] / l]
}

impl<T: Real> TriMesh<T> {
    /// Validates that the mesh is a closed orientable surface with
    /// nondegenerate faces and Euler characteristic 2 or 0.
    pub fn new(vertices: Vec<[T; 3]>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &faces {
            if f.iter().any(|&v| v >= nv) || f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Geometry("face with invalid vertex indices".into()));
            }
            for e in 0..3 {
                *directed.entry((f[e], f[(e + 1) % 3])).or_default() += 1;
            }
        }
        let mut edges = Vec::new();
        for (&(a, b), &count) in &directed {
            if count != 1 || directed.get(&(b, a)) != Some(&1) {
                return Err(Error::Geometry(
                    "mesh is not a closed orientable 2-manifold".into(),
                ));
            }
            if a < b {
                edges.push((a, b));
            }
        }
        edges.sort_unstable();
        let edge_index = edges.iter().enumerate().map(|(k, e)| (*e, k)).collect();
        let mesh = Self {
            q: vec![T::zero(); nv],
            phases: vec![T::zero(); edges.len()],
            vertices,
            faces,
            edges,
            edge_index,
            form: Form3::zero(),
        };
        let chi = mesh.euler_characteristic();
        if chi != 2 && chi != 0 {
            return Err(Error::Geometry(format!("unsupported Euler characteristic {chi}")));
        }
        if mesh.faces.iter().any(|f| !(mesh.face_area(f) > T::zero())) {
            return Err(Error::MeshQuality("face with zero area".into()));
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[[T; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn genus(&self) -> u32 {
        ((2 - self.euler_characteristic()) / 2) as u32
    }

    fn face_area(&self, f: &[usize; 3]) -> T {
        let [a, b, c] = f.map(|i| self.vertices[i]);
        len3(cross(sub(b, a), sub(c, a))) * T::lit(0.5)
    }

    pub fn area(&self) -> T {
        self.faces.iter().map(|f| self.face_area(f)).sum()
    }

    /// Barycentric lumped mass: a third of each incident face area.
    pub fn lumped_mass(&self) -> Vec<T> {
        let mut m = vec![T::zero(); self.vertices.len()];
        let third = T::one() / T::lit(3.0);
        for f in &self.faces {
            let a = self.face_area(f) * third;
            for &v in f {
                m[v] += a;
            }
        }
        m
    }

    pub fn with_potential(mut self, q: &ScalarField3<T>) -> Self {
        self.q = self.vertices.iter().map(|p| q.eval(*p)).collect();
        self
    }

    /// Edge phases from chord integrals of an ambient 1-form.
    pub fn with_form(mut self, a: &Form3<T>) -> Self {
        self.phases = self
            .edges
            .iter()
            .map(|&(i, j)| a.chord_integral(self.vertices[i], self.vertices[j]))
            .collect();
        self.form = a.clone();
        self
    }

    /// `ψ(x_j) − ψ(x_i)` per edge, the exact integrals of `dψ`.
    pub fn gradient_phases(&self, psi: &ScalarField3<T>) -> Vec<T> {
        self.edges
            .iter()
            .map(|&(i, j)| psi.eval(self.vertices[j]) - psi.eval(self.vertices[i]))
            .collect()
    }

    /// Adds extra phases per edge (e.g. a gauge change). The analytic form
    /// used for `|A|²` is left unchanged.
    pub fn add_phases(mut self, extra: &[T]) -> Result<Self> {
        if extra.len() != self.edges.len() || extra.iter().any(|v| !v.is_finite()) {
            return Err(invalid("phase list does not match edges"));
        }
        for (p, e) in self.phases.iter_mut().zip(extra) {
            *p += *e;
        }
        Ok(self)
    }

    /// Oriented phase from `i` to `j` along an existing edge.
    fn phase(&self, i: usize, j: usize) -> T {
        if i < j {
            self.phases[self.edge_index[&(i, j)]]
        } else {
            -self.phases[self.edge_index[&(j, i)]]
        }
    }

    /// `(cot α + cot β)/2` per edge.
    pub fn cotan_weights(&self) -> Result<Vec<T>> {
        let mut w = vec![T::zero(); self.edges.len()];
        let min_angle = T::lit(MIN_ANGLE);
        for f in &self.faces {
            for c in 0..3 {
                let (o, a, b) = (f[c], f[(c + 1) % 3], f[(c + 2) % 3]);
                let u = sub(self.vertices[a], self.vertices[o]);
                let v = sub(self.vertices[b], self.vertices[o]);
                let cr = len3(cross(u, v));
                let d = dot3(u, v);
                if cr.atan2(d) < min_angle {
                    return Err(Error::MeshQuality(format!(
                        "triangle {f:?} has an angle below {MIN_ANGLE} rad"
                    )));
                }
                let key = (a.min(b), a.max(b));
                w[self.edge_index[&key]] += T::lit(0.5) * d / cr;
            }
        }
        Ok(w)
    }

    fn assemble(&self, with_phases: bool, w_nodes: &[T]) -> Result<HermitianOperator<T>> {
        let weights = self.cotan_weights()?;
        let mass = self.lumped_mass();
        let mut b = OperatorBuilder::new(self.vertices.len());
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            let t = if with_phases { self.phases[k] } else { T::zero() };
            b.add_link(i, j, weights[k], -t);
        }
        for (i, w) in w_nodes.iter().enumerate() {
            b.add_diagonal(i, *w * mass[i]);
        }
        let op = b.build(mass)?;
        debug_assert!(op.hermitian_defect() == T::zero());
        Ok(op)
    }

    /// Per-face circulation `c_f` and `‖B‖² = Σ c_f² / area_f`.
    pub fn field_per_face(&self) -> (Vec<T>, T) {
        let mut circ = Vec::with_capacity(self.faces.len());
        let mut norm2 = T::zero();
        for f in &self.faces {
            let c = self.phase(f[0], f[1]) + self.phase(f[1], f[2]) + self.phase(f[2], f[0]);
            norm2 += c * c / self.face_area(f);
            circ.push(c);
        }
        (circ, norm2)
    }

    /// Area-weighted vertex normals (outward for the generated meshes).
    pub fn vertex_normals(&self) -> Vec<[T; 3]> {
        let mut n = vec![[T::zero(); 3]; self.vertices.len()];
        for f in &self.faces {
            let [a, b, c] = f.map(|i| self.vertices[i]);
            let fc = cross(sub(b, a), sub(c, a));
            for &v in f {
                for d in 0..3 {
                    n[v][d] += fc[d];
                }
            }
        }
        n.into_iter().map(normalized).collect()
    }

    pub fn max_edge_length(&self) -> T {
        self.edges
            .iter()
            .map(|&(i, j)| len3(sub(self.vertices[i], self.vertices[j])))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Object File Format text.
    pub fn to_off(&self) -> String {
        let mut s = format!("OFF\n{} {} {}\n", self.vertices.len(), self.faces.len(), self.edges.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
        }
        for f in &self.faces {
            let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
        }
        s
    }

    pub fn write_off(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_off()).map_err(|e| invalid(format!("writing {}: {e}", path.display())))
    }
}

impl<T: Real> Discretization<T> for TriMesh<T> {
    fn operator(&self) -> Result<HermitianOperator<T>> {
        self.assemble(true, &self.q)
    }

    fn scalar_operator(&self, w: &[T]) -> Result<HermitianOperator<T>> {
        if w.len() != self.vertices.len() {
            return Err(invalid("potential length differs from vertex count"));
        }
        self.assemble(false, w)
    }

    fn potential(&self) -> &[T] {
        &self.q
    }

    /// Squared tangential part of the ambient `A` at each vertex.
    fn form_norm2(&self) -> Vec<T> {
        self.vertices
            .iter()
            .zip(self.vertex_normals())
            .map(|(p, n)| {
                let a = self.form.eval(*p);
                let an = dot3(a, n);
                dot3(a, a) - an * an
            })
            .collect()
    }

    fn volume(&self) -> T {
        self.area()
    }

    fn q_integral(&self) -> T {
        self.q.iter().zip(self.lumped_mass()).map(|(q, m)| *q * m).sum()
    }

    fn field_norm2(&self) -> T {
        self.field_per_face().1
    }

    fn mesh_width(&self) -> T {
        self.max_edge_length()
    }

    fn node_count(&self) -> usize {
        self.vertices.len()
    }
}

/// The regular icosahedron inscribed in the unit sphere.
pub fn icosahedron<T: Real>() -> (Vec<[T; 3]>, Vec<[usize; 3]>) {
    let t = (T::one() + T::lit(5.0).sqrt()) * T::lit(0.5);
    let (o, z) = (T::one(), T::zero());
    let raw = [
        [-o, t, z],
        [o, t, z],
        [-o, -t, z],
        [o, -t, z],
        [z, -o, t],
        [z, o, t],
        [z, -o, -t],
        [z, o, -t],
        [t, z, -o],
        [t, z, o],
        [-t, z, -o],
        [-t, z, o],
    ];
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (raw.into_iter().map(normalized).collect(), faces)
}

/// Geodesic icosphere: `subdiv` rounds of 1→4 midpoint splitting, with all
/// vertices projected to the unit sphere.
pub fn make_sphere_mesh<T: Real>(subdiv: u32) -> Result<TriMesh<T>> {
    if !(1..=6).contains(&subdiv) {
        return Err(invalid(format!("sphere subdivision must be in 1..=6, got {subdiv}")));
    }
    let (mut verts, mut faces) = icosahedron::<T>();
    for _ in 0..subdiv {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[T; 3]>| -> usize {
            *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalized([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriMesh::new(verts, faces)
}

/// Number of segments around the tube for a torus with `res` segments
/// around the axis: the two edge lengths match on the core circle.
pub fn tube_resolution(major: f64, minor: f64, res: usize) -> usize {
    ((res as f64 * minor / major).round() as usize).max(8)
}

/// Torus of revolution about the `z` axis with core radius `major` and tube
/// radius `minor`.
pub fn make_torus_mesh<T: Real>(major: T, minor: T, res: usize) -> Result<TriMesh<T>> {
    if !(major > minor && minor > T::zero()) {
        return Err(invalid("torus needs R > r > 0"));
    }
    if res < 8 {
        return Err(invalid("torus resolution must be at least 8"));
    }
    let m = tube_resolution(major.to_f64_lossy(), minor.to_f64_lossy(), res);
    let tau = T::two_pi();
    let mut verts = Vec::with_capacity(res * m);
    for i in 0..res {
        let phi = tau * T::from_usize_lossy(i) / T::from_usize_lossy(res);
        for j in 0..m {
            let th = tau * T::from_usize_lossy(j) / T::from_usize_lossy(m);
            let rho = major + minor * th.cos();
            verts.push([rho * phi.cos(), rho * phi.sin(), minor * th.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % res) * m + (j % m);
    let mut faces = Vec::with_capacity(2 * res * m);
    for i in 0..res {
        for j in 0..m {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh::new(verts, faces)
}

/// Harmonic data of the rotation form `a·(ẑ × x)` restricted to the torus
/// of revolution: its harmonic part is `c·a·dϕ` with `c = R√(R² − r²)`, and
/// `d(h, L_Z)² = dist(c·a, Z)²·‖dϕ‖²` with `‖dϕ‖² = 4π²r/√(R² − r²)`.
pub fn revolution_torus_rotation_dist2(major: f64, minor: f64, a: f64) -> f64 {
    let s = (major * major - minor * minor).sqrt();
    let coeff = major * s * a;
    let frac = coeff - coeff.round();
    frac * frac * 4.0 * std::f64::consts::PI.powi(2) * minor / s
}
