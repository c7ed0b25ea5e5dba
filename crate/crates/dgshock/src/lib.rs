//! Modal discontinuous Galerkin discretization of 1D scalar convex
//! conservation laws, stationary discrete shock profiles, and the linear
//! stability analysis of those profiles.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod error;
pub mod flux;
pub mod legendre;
pub mod linalg;
pub mod oracle;
pub mod profile;
pub mod scalar;
pub mod scheme;
pub mod stability;
pub mod svv;

pub use error::{Error, Result};
pub use flux::{
    burgers, AlphaRule, Burgers, ConvexFlux, FluxPartials, KinkBranch, NumericalFlux,
    NumericalFluxKind, ShockPair,
};
pub use legendre::{BasisOrder, CouplingMatrices};
pub use profile::{Branch, TraceCheck};
pub use scalar::Real;
pub use scheme::{BoundaryData, RkOrder, RunConfig};
pub use stability::{EigenOptions, KinkPolicy};
pub use svv::SvvConfig;

pub type QuadratureRule = legendre::QuadratureRule<f64>;
pub type Mesh1D = scheme::Mesh1D<f64>;
pub type ModalSolution = scheme::ModalSolution<f64>;
pub type RunReport = scheme::RunReport<f64>;
pub type DgScheme<F = Burgers> = scheme::DgScheme<f64, F>;
pub type ShockProfile = profile::ShockProfile<f64>;
pub type OracleResult = oracle::OracleResult<f64>;
pub type DenseMatrix = linalg::DenseMatrix<f64>;
pub type BlockTridiagonalOperator = stability::BlockTridiagonalOperator<f64>;
pub type Spectrum = stability::Spectrum<f64>;
pub type StabilityConstants = stability::StabilityConstants<f64>;
