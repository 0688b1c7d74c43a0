use nalgebra::Complex;

use super::linalg::{eig_sorted, max_abs_diff, tensor_all, trace_re};
use super::{DensityMatrix, SubsystemShape};
use crate::{tol, CMatrix, Error, Real, Result};

/// Tensor product of per-factor orthogonal projectors `W = P_1 ⊗ ... ⊗ P_k`.
///
/// Each projector is stored as a family of orthonormal columns; its rank
/// is the number of columns.
#[derive(Clone, Debug)]
pub struct TruncationProjector<T: Real> {
    frames: Vec<CMatrix<T>>,
}

impl<T: Real> TruncationProjector<T> {
    /// Checks orthonormality of every frame within `1e-10`.
    pub fn new(frames: Vec<CMatrix<T>>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::Dimension(
                "truncation projector needs at least one factor".into(),
            ));
        }
        for (k, f) in frames.iter().enumerate() {
            if f.ncols() == 0 || f.ncols() > f.nrows() {
                return Err(Error::Parameter(format!(
                    "factor {k}: rank {} must lie in 1..={}",
                    f.ncols(),
                    f.nrows()
                )));
            }
            let gram = f.adjoint() * f;
            if max_abs_diff(&gram, &CMatrix::identity(f.ncols(), f.ncols())) > tol::<T>(1e-10) {
                return Err(Error::Validity(format!(
                    "factor {k}: columns are not orthonormal"
                )));
            }
        }
        Ok(Self { frames })
    }

    pub fn identity(shape: &SubsystemShape) -> Self {
        Self {
            frames: shape
                .factor_dims()
                .iter()
                .map(|&d| CMatrix::identity(d, d))
                .collect(),
        }
    }

    /// Per-factor projectors onto the top-`ranks[k]` eigenvectors of the
    /// single-factor marginals of `omega`.
    pub fn top_marginal(
        omega: &DensityMatrix<T>,
        shape: &SubsystemShape,
        ranks: &[usize],
    ) -> Result<Self> {
        if ranks.len() != shape.num_factors() {
            return Err(Error::Dimension(format!(
                "{} ranks given for {} factors",
                ranks.len(),
                shape.num_factors()
            )));
        }
        let mut frames = Vec::with_capacity(ranks.len());
        for (k, &r) in ranks.iter().enumerate() {
            let marginal = omega.partial_trace(shape, &[k])?;
            let eig = eig_sorted(marginal.into_matrix())?;
            if r == 0 || r > eig.dim() {
                return Err(Error::Parameter(format!(
                    "factor {k}: rank {r} must lie in 1..={}",
                    eig.dim()
                )));
            }
            frames.push(eig.vectors.columns(0, r).into_owned());
        }
        Self::new(frames)
    }

    pub fn num_factors(&self) -> usize {
        self.frames.len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.ncols()).collect()
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.nrows()).collect()
    }

    pub fn frame(&self, k: usize) -> &CMatrix<T> {
        &self.frames[k]
    }

    /// `Q_k Q_k*`.
    pub fn factor_projector(&self, k: usize) -> CMatrix<T> {
        let f = &self.frames[k];
        f * f.adjoint()
    }

    /// Full projector on the composite space.
    pub fn full(&self) -> CMatrix<T> {
        let ps: Vec<CMatrix<T>> = (0..self.frames.len())
            .map(|k| self.factor_projector(k))
            .collect();
        tensor_all(&ps)
    }

    /// Tensor product of the projectors of the listed factors.
    pub fn sub_projector(&self, factors: &[usize]) -> CMatrix<T> {
        let ps: Vec<CMatrix<T>> = factors.iter().map(|&k| self.factor_projector(k)).collect();
        tensor_all(&ps)
    }
}

/// `(WωW / Tr(WωW), Tr(WωW))`.
pub fn truncate_state<T: Real>(
    omega: &DensityMatrix<T>,
    w: &TruncationProjector<T>,
) -> Result<(DensityMatrix<T>, T)> {
    let dims = w.factor_dims();
    if dims.iter().product::<usize>() != omega.dim() {
        return Err(Error::Dimension(format!(
            "projector factors {dims:?} do not match state dimension {}",
            omega.dim()
        )));
    }
    let p = w.full();
    let projected = &p * omega.matrix() * &p;
    let weight = trace_re(&projected);
    if weight <= tol::<T>(1e-12) {
        return Err(Error::DegenerateTruncation {
            weight: weight.to_f64().unwrap_or(0.0),
        });
    }
    let state = DensityMatrix::from_trusted(projected / Complex::from(weight));
    Ok((state, weight))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::is_psd;
    use crate::quantum::random::{random_density, random_pure};

    #[test]
    fn identity_projector_is_noop() {
        let shape = SubsystemShape::new(vec![2, 3]).unwrap();
        let w = random_density::<f64>(6, 4, 1).unwrap();
        let (out, weight) = truncate_state(&w, &TruncationProjector::identity(&shape)).unwrap();
        assert!((weight - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(out.matrix(), w.matrix()) < 1e-12);
    }

    #[test]
    fn support_preserving_projector() {
        let a = random_pure::<f64>(2, 1).unwrap();
        let b = random_pure::<f64>(3, 2).unwrap();
        let omega = a.tensor(&b).to_density();
        let w = TruncationProjector::new(vec![
            CMatrix::from_column_slice(2, 1, a.amplitudes().as_slice()),
            CMatrix::from_column_slice(3, 1, b.amplitudes().as_slice()),
        ])
        .unwrap();
        let (out, weight) = truncate_state(&omega, &w).unwrap();
        assert!((weight - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(out.matrix(), omega.matrix()) < 1e-12);
    }

    #[test]
    fn rank_one_per_factor_on_four_qubits() {
        let shape = SubsystemShape::new(vec![2, 2, 2, 2]).unwrap();
        for seed in 0..5 {
            let omega = random_density::<f64>(16, 16, seed).unwrap();
            let w = TruncationProjector::top_marginal(&omega, &shape, &[1, 1, 1, 1]).unwrap();
            let (out, weight) = truncate_state(&omega, &w).unwrap();
            assert!(weight > 0.0 && weight < 1.0);
            // oracle: direct matrix product
            let p = w.full();
            let direct = trace_re(&(&p * omega.matrix() * &p));
            assert!((direct - weight).abs() < 1e-12);
            assert!((trace_re(out.matrix()) - 1.0).abs() < 1e-12);
            assert!(is_psd(out.matrix(), 1e-10).unwrap().is_psd);
        }
    }

    #[test]
    fn nested_weights_non_decreasing() {
        let shape = SubsystemShape::new(vec![3, 3]).unwrap();
        let omega = random_density::<f64>(9, 5, 4).unwrap();
        let mut last = 0.0;
        for r in 1..=3 {
            let w = TruncationProjector::top_marginal(&omega, &shape, &[r, r]).unwrap();
            let (_, weight) = truncate_state(&omega, &w).unwrap();
            assert!(weight + 1e-12 >= last);
            last = weight;
        }
        assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_missing_support_is_degenerate() {
        let omega = DensityMatrix::<f64>::basis(2, 0).unwrap();
        let w = TruncationProjector::new(vec![CMatrix::from_column_slice(
            2,
            1,
            &[Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
        )])
        .unwrap();
        assert!(matches!(
            truncate_state(&omega, &w),
            Err(Error::DegenerateTruncation { .. })
        ));
    }

    #[test]
    fn projectors_are_idempotent_hermitian() {
        let shape = SubsystemShape::new(vec![3, 2]).unwrap();
        let omega = random_density::<f64>(6, 6, 8).unwrap();
        let w = TruncationProjector::top_marginal(&omega, &shape, &[2, 1]).unwrap();
        for k in 0..2 {
            let p = w.factor_projector(k);
            assert!(max_abs_diff(&(&p * &p), &p) < 1e-10);
            assert!(max_abs_diff(&p.adjoint(), &p) < 1e-10);
            assert!((trace_re(&p) - w.ranks()[k] as f64).abs() < 1e-10);
        }
    }
}
