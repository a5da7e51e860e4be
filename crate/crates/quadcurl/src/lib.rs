//! Mixed interior-penalty discontinuous Galerkin solver for the quad-curl
//! problem in two and three dimensions.
//!
//! The vector unknown lives in a patch-reconstructed polynomial space with a
//! single degree of freedom per element per component: nodal values at element
//! barycenters are extended to high-order polynomials by a constrained least
//! squares fit over an element patch. The divergence constraint is imposed
//! through a piecewise-constant multiplier, giving a symmetric indefinite
//! saddle-point system solved by a sparse direct factorization.
//!
//! The crate is organized as
//! - [`mesh`]: structured simplicial meshes of the unit square/cube,
//! - [`quadrature`]: conical-product rules on reference simplices,
//! - [`poly`]: scaled monomial expansions and the curl/div calculus,
//! - [`reconstruction`]: element patches and the least-squares reconstruction,
//! - [`assembly`]: the mixed bilinear forms and the saddle-point solve,
//! - [`norms`]: mesh-dependent DG/energy norms and error measurement,
//! - [`harness`]: manufactured problems and convergence-study driving.

pub mod assembly;
pub mod harness;
pub mod mesh;
pub mod norms;
pub mod poly;
pub mod quadrature;
pub mod reconstruction;
pub mod sparse;

pub use mesh::Mesh;
pub use reconstruction::ReconstructedSpace;

use thiserror::Error;

/// Errors surfaced by mesh construction, reconstruction and the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature degree {0} out of range (supported 1..=20)")]
    DegreeOutOfRange(usize),
    #[error("patch size {requested} exceeds mesh element count {available}")]
    PatchExceedsMesh { requested: usize, available: usize },
    #[error("degenerate patch geometry for element {element}: collocation points do not determine a degree-{order} polynomial")]
    DegeneratePatch { element: usize, order: usize },
    #[error("system singular or penalty too small (relative residual {residual:.3e}); try a larger eta")]
    SingularSystem { residual: f64 },
    #[error("mesh import: {0}")]
    MeshImport(String),
    #[error("curl of a scalar field is only defined in 2D")]
    ScalarCurlIn3d,
    #[error("manufactured solution rejected: {0}")]
    ManufacturedMismatch(String),
    #[error("{0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
