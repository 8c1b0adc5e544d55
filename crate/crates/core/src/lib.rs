//! Magnetic Schrödinger operators `H_{A,q} = Δ_A + q` on flat and conformal
//! tori, Neumann rectangles and triangulated closed surfaces.
//!
//! The crate builds gauge-covariant discretizations (link phases on every
//! edge), computes their low spectra with certified residuals, and checks
//! the classical upper bounds for `λ₁`, `λ₂` and the Euclidean Riesz-mean,
//! eigenvalue-sum and heat-trace inequalities.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod bounds;
pub mod eigen;
pub mod error;
pub mod exact_torus;
pub mod grid;
pub mod lattice;
pub mod mesh;
pub mod operator;
pub mod potential;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type Lattice = lattice::Lattice<f64>;
pub type LatticePointSet = lattice::LatticePointSet<f64>;
pub type FlatTorus = exact_torus::FlatTorus<f64>;
pub type ConstantForm = exact_torus::ConstantForm<f64>;
pub type TorusGrid = grid::TorusGrid<f64>;
pub type RectangleGrid = grid::RectangleGrid<f64>;
pub type SampledForm = grid::SampledForm<f64>;
pub type TriMesh = mesh::TriMesh<f64>;
pub type HermitianOperator = operator::HermitianOperator<f64>;
pub type SpectralResult = eigen::SpectralResult<f64>;
pub type ScalarField2 = potential::ScalarField2<f64>;
pub type Form2 = potential::Form2<f64>;
pub type ScalarField3 = potential::ScalarField3<f64>;
pub type Form3 = potential::Form3<f64>;

pub use bounds::{BoundReport, Quantities};
