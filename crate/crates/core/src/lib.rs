//! Numerical tools for the convex closure of the output entropy of
//! finite-dimensional quantum channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: dense complex linear algebra, density matrices, partial
//!   traces, purification, truncation projectors and seeded random states.
//! - [`entropy`]: von Neumann entropy, the extended entropy of positive
//!   operators, relative entropy, power traces and Gibbs/energy machinery.
//! - [`channels`]: Kraus-form channels, complementary channels and the named
//!   constructions (measure-prepare, direct-sum mixture, random-phase).
//! - [`roof`]: convex-roof estimates, χ-function, entanglement of formation
//!   and minimal output entropy.
//! - [`lab`]: superadditivity / subadditivity margins, truncation traces,
//!   continuity and complementary-transfer probes, batch scans.
//!
//! All numerical code is generic over the real scalar type `T: Real`
//! (`f32` or `f64`). Concrete `f64` aliases are exported at the crate root;
//! the tolerances quoted in the docs refer to `f64`.
#![forbid(unsafe_code)]

pub mod channels;
pub mod entropy;
mod error;
pub mod json;
pub mod lab;
pub mod quantum;
pub mod roof;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{lit, tol, Real};

/// Complex scalar over the real type `T`.
pub type C<T> = nalgebra::Complex<T>;
/// Dense complex matrix.
pub type CMatrix<T> = nalgebra::DMatrix<nalgebra::Complex<T>>;
/// Dense complex column vector.
pub type CVector<T> = nalgebra::DVector<nalgebra::Complex<T>>;

pub type DensityMatrix64 = quantum::DensityMatrix<f64>;
pub type PureState64 = quantum::PureState<f64>;
pub type Channel64 = channels::Channel<f64>;
pub type Ensemble64 = roof::Ensemble<f64>;
pub type RoofResult64 = roof::RoofResult<f64>;

pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
pub type PureState32 = quantum::PureState<f32>;
pub type Channel32 = channels::Channel<f32>;
