//! Seeded random states, unitaries and matrices.
//!
//! Every generator is a pure function of its arguments: the `*_rng`
//! variants draw from a caller-provided stream, the seeded variants build a
//! fresh `ChaCha8Rng` from the seed.

use nalgebra::{Complex, ComplexField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, PureState};
use crate::{lit, CMatrix, CVector, Error, Real, Result};

/// Deterministic RNG for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian (real and imaginary parts each N(0, 1/2)).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re * s), lit(im * s))
}

pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> CMatrix<T> {
    // fill row by row so the stream order does not depend on storage order
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

pub fn random_density_rng<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<DensityMatrix<T>> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::Parameter(format!(
            "random_density: rank {rank} must lie in 1..={dim}"
        )));
    }
    let g = gaussian_matrix::<T, _>(rng, dim, rank);
    let gg = &g * g.adjoint();
    let tr = super::linalg::trace_re(&gg);
    DensityMatrix::new(gg / Complex::from(tr))
}

/// `G G* / Tr(G G*)` with `G` a `dim x rank` complex Gaussian matrix.
pub fn random_density<T: Real>(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix<T>> {
    random_density_rng(&mut rng_for(seed, 0), dim, rank)
}

pub fn random_pure_rng<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<PureState<T>> {
    if dim == 0 {
        return Err(Error::Parameter("random_pure: dim must be positive".into()));
    }
    let v = CVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian::<T, _>(rng)));
    PureState::normalized(v)
}

pub fn random_pure<T: Real>(dim: usize, seed: u64) -> Result<PureState<T>> {
    random_pure_rng(&mut rng_for(seed, 0), dim)
}

/// Haar-random unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn random_unitary_rng<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    let g = gaussian_matrix::<T, _>(rng, dim, dim);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.modulus();
        if n > T::zero() {
            let phase = d / Complex::from(n);
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn random_unitary<T: Real>(dim: usize, seed: u64) -> CMatrix<T> {
    random_unitary_rng(&mut rng_for(seed, 0), dim)
}

/// `dim x cols` matrix with orthonormal columns (first columns of a Haar unitary).
pub fn random_isometry_rng<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    cols: usize,
) -> CMatrix<T> {
    let u = random_unitary_rng::<T, _>(rng, dim);
    u.columns(0, cols).into_owned()
}

/// Hermitian matrix `(G + G*)/2` with Gaussian `G`.
pub fn random_hermitian<T: Real>(dim: usize, seed: u64) -> CMatrix<T> {
    let g = gaussian_matrix::<T, _>(&mut rng_for(seed, 0), dim, dim);
    super::linalg::hermitian_part(&g)
}
