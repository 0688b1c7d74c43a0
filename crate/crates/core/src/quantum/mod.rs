//! Dense states and linear algebra: Hermitian eigendecomposition, tensor
//! products, partial traces, purification, truncation projectors and seeded
//! random states.

pub mod linalg;
pub mod random;
mod state;
mod truncation;

pub use linalg::{
    hermitian_eig, is_psd, partial_trace_matrix, partial_transpose, tensor, HermitianEig, PsdCheck,
};
pub use random::{random_density, random_pure, random_unitary};
pub use state::{clip_eigenvalue, clipped_spectrum, DensityMatrix, PureState, SubsystemShape};
pub use truncation::{truncate_state, TruncationProjector};
