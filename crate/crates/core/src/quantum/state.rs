use nalgebra::Complex;

use super::linalg::{
    eig_sorted, hermitian_part, hermiticity_defect, partial_trace_matrix, tensor, trace_re,
    HermitianEig,
};
use crate::{lit, tol, CMatrix, CVector, Error, Real, Result};

/// Hermitian, positive semidefinite, unit-trace matrix.
///
/// Validity is checked on construction with tolerance `1e-10` for every
/// invariant. The stored matrix is the exact Hermitian part of the input.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    m: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "density matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let t = tol::<T>(1e-10);
        let defect = hermiticity_defect(&m);
        if defect > t {
            return Err(Error::Validity(format!(
                "density matrix is not Hermitian (defect {defect})"
            )));
        }
        let m = hermitian_part(&m);
        let tr = trace_re(&m);
        if (tr - T::one()).abs() > t {
            return Err(Error::Validity(format!(
                "density matrix trace is {tr}, not 1"
            )));
        }
        let eig = eig_sorted(m.clone())?;
        if eig.min_value() < -t {
            return Err(Error::Validity(format!(
                "density matrix has negative eigenvalue {}",
                eig.min_value()
            )));
        }
        Ok(Self { m })
    }

    /// Trusted constructor for matrices that are valid by construction.
    pub(crate) fn from_trusted(m: CMatrix<T>) -> Self {
        Self {
            m: hermitian_part(&m),
        }
    }

    /// `|ψ><ψ|`.
    pub fn from_pure(psi: &PureState<T>) -> Self {
        Self { m: psi.projector() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = Complex::from(T::one() / lit::<T>(dim as f64));
        Self {
            m: CMatrix::identity(dim, dim) * w,
        }
    }

    /// `|i><i|` in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        Ok(Self::from_pure(&PureState::basis(dim, i)?))
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(p: &[T]) -> Result<Self> {
        let n = p.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::from(p[i])
            } else {
                Complex::from(T::zero())
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    pub fn eig(&self) -> Result<HermitianEig<T>> {
        eig_sorted(self.m.clone())
    }

    /// Eigenvalues descending, with `[-1e-10, 0)` clipped to zero.
    pub fn spectrum(&self) -> Result<Vec<T>> {
        clipped_spectrum(&self.m)
    }

    /// Number of eigenvalues above `1e-12`.
    pub fn rank(&self) -> Result<usize> {
        let cut = tol::<T>(1e-12);
        Ok(self.spectrum()?.iter().filter(|&&v| v > cut).count())
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            m: tensor(&self.m, &other.m),
        }
    }

    /// Reduced state on the factors in `keep`.
    pub fn partial_trace(&self, shape: &SubsystemShape, keep: &[usize]) -> Result<Self> {
        shape.check(self.dim())?;
        let r = partial_trace_matrix(&self.m, shape.factor_dims(), keep)?;
        Ok(Self::from_trusted(r))
    }

    /// Convex combination `t·self + (1-t)·other`.
    pub fn mix(&self, other: &Self, t: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "mix: dimensions {} and {} differ",
                self.dim(),
                other.dim()
            )));
        }
        if !(T::zero()..=T::one()).contains(&t) {
            return Err(Error::Parameter(format!("mix: weight {t} outside [0, 1]")));
        }
        Ok(Self {
            m: &self.m * Complex::from(t) + &other.m * Complex::from(T::one() - t),
        })
    }

    /// Unitary conjugation `U ρ U*`.
    pub fn conjugate(&self, u: &CMatrix<T>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::Dimension(
                "conjugate: unitary has wrong shape".into(),
            ));
        }
        Ok(Self::from_trusted(u * &self.m * u.adjoint()))
    }

    /// Canonical purification `Σ_j √λ_j |e_j> ⊗ |j>` in dimension `dim²`.
    pub fn purify(&self) -> Result<PureState<T>> {
        let eig = self.eig()?;
        let n = self.dim();
        let mut v = CVector::zeros(n * n);
        for j in 0..n {
            let lam = clip_eigenvalue(eig.values[j])?;
            if lam == T::zero() {
                continue;
            }
            let s = Complex::from(lam.sqrt());
            for i in 0..n {
                v[i * n + j] = eig.vectors[(i, j)] * s;
            }
        }
        PureState::normalized(v)
    }
}

/// Clips eigenvalues in `[-1e-10, 0)` to zero; more negative values are a
/// validity error.
pub fn clip_eigenvalue<T: Real>(v: T) -> Result<T> {
    if v >= T::zero() {
        Ok(v)
    } else if v >= -tol::<T>(1e-10) {
        Ok(T::zero())
    } else {
        Err(Error::Validity(format!("negative eigenvalue {v}")))
    }
}

/// Descending spectrum of a Hermitian PSD matrix with roundoff clipped.
pub fn clipped_spectrum<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>> {
    let eig = eig_sorted(hermitian_part(m))?;
    eig.values.iter().map(|&v| clip_eigenvalue(v)).collect()
}

/// Unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T: Real> {
    v: CVector<T>,
}

impl<T: Real> PureState<T> {
    /// Checks `|‖ψ‖ - 1| ≤ 1e-12`.
    pub fn new(v: CVector<T>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Dimension("pure state must be non-empty".into()));
        }
        let n = v.norm();
        if (n - T::one()).abs() > tol::<T>(1e-12) {
            return Err(Error::Validity(format!("pure state norm is {n}, not 1")));
        }
        Ok(Self { v })
    }

    pub fn normalized(v: CVector<T>) -> Result<Self> {
        let n = v.norm();
        if v.is_empty() || n <= T::zero() {
            return Err(Error::Validity("cannot normalise a zero vector".into()));
        }
        Ok(Self {
            v: v / Complex::from(n),
        })
    }

    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::Dimension(format!(
                "basis index {i} out of range for {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[i] = Complex::from(T::one());
        Ok(Self { v })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.v
    }

    pub fn projector(&self) -> CMatrix<T> {
        &self.v * self.v.adjoint()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            v: self.v.kronecker(&other.v),
        }
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(self)
    }
}

/// Ordered tensor-factor dimensions.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SubsystemShape {
    factor_dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.contains(&0) {
            return Err(Error::Dimension(format!(
                "subsystem shape {factor_dims:?} must be non-empty with positive factors"
            )));
        }
        Ok(Self { factor_dims })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total(&self) -> usize {
        self.factor_dims.iter().product()
    }

    /// Product of the listed factor dimensions.
    pub fn dim_of(&self, factors: &[usize]) -> usize {
        factors.iter().map(|&i| self.factor_dims[i]).product()
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::Dimension(format!(
                "shape {:?} has total dimension {}, state has {dim}",
                self.factor_dims,
                self.total()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for SubsystemShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.factor_dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{is_psd, max_abs_diff};
    use crate::quantum::random::{random_density, random_pure};

    fn bell() -> PureState<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![
            Complex::new(s, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(s, 0.0),
        ]))
        .unwrap()
    }

    #[test]
    fn constructor_rejects_invalid() {
        let mut m = CMatrix::<f64>::identity(2, 2) * Complex::new(0.5, 0.0);
        m[(0, 1)] = Complex::new(0.1, 0.0);
        assert!(matches!(
            DensityMatrix::new(m.clone()),
            Err(Error::Validity(_))
        ));
        let m = CMatrix::<f64>::identity(2, 2);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Validity(_))));
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex::new(1.5, 0.0),
            Complex::new(-0.5, 0.0),
        ]));
        assert!(matches!(DensityMatrix::new(m), Err(Error::Validity(_))));
    }

    #[test]
    fn product_state_partial_trace() {
        let rho = random_density::<f64>(2, 2, 1).unwrap();
        let sigma = random_density::<f64>(3, 2, 2).unwrap();
        let shape = SubsystemShape::new(vec![2, 3]).unwrap();
        let omega = rho.tensor(&sigma);
        let r = omega.partial_trace(&shape, &[0]).unwrap();
        assert!(max_abs_diff(r.matrix(), rho.matrix()) <= 1e-12);
        let s = omega.partial_trace(&shape, &[1]).unwrap();
        assert!(max_abs_diff(s.matrix(), sigma.matrix()) <= 1e-12);
    }

    #[test]
    fn bell_marginals_are_maximally_mixed() {
        let w = bell().to_density();
        let shape = SubsystemShape::new(vec![2, 2]).unwrap();
        for k in 0..2 {
            let r = w.partial_trace(&shape, &[k]).unwrap();
            assert!(max_abs_diff(r.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
        }
    }

    #[test]
    fn random_bipartite_marginals_valid() {
        let shape = SubsystemShape::new(vec![2, 3]).unwrap();
        for seed in 0..20 {
            let w = random_density::<f64>(6, 1 + (seed as usize % 6), seed).unwrap();
            for keep in [&[0][..], &[1], &[0, 1]] {
                let r = w.partial_trace(&shape, keep).unwrap();
                assert!((trace_re(r.matrix()) - 1.0).abs() < 1e-10);
                assert!(is_psd(r.matrix(), 1e-10).unwrap().is_psd);
            }
        }
    }

    #[test]
    fn purification_of_pure_state() {
        let r = DensityMatrix::<f64>::basis(2, 0).unwrap();
        let p = r.purify().unwrap();
        assert!((p.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purification_of_maximally_mixed_is_maximally_entangled() {
        let p = DensityMatrix::<f64>::maximally_mixed(2).purify().unwrap();
        let shape = SubsystemShape::new(vec![2, 2]).unwrap();
        let w = p.to_density();
        for k in 0..2 {
            let r = w.partial_trace(&shape, &[k]).unwrap();
            assert!(max_abs_diff(r.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);
        }
    }

    #[test]
    fn purification_round_trip() {
        for seed in 0..10 {
            let rho = random_density::<f64>(4, 3, seed).unwrap();
            let p = rho.purify().unwrap();
            let shape = SubsystemShape::new(vec![4, 4]).unwrap();
            let back = p.to_density().partial_trace(&shape, &[0]).unwrap();
            assert!(max_abs_diff(back.matrix(), rho.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn pure_state_norm_check() {
        let v = CVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]);
        assert!(PureState::<f64>::new(v.clone()).is_err());
        assert!(PureState::normalized(v).is_ok());
        let p = random_pure::<f64>(5, 3).unwrap();
        assert!((p.amplitudes().norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn shape_errors() {
        assert!(SubsystemShape::new(vec![]).is_err());
        assert!(SubsystemShape::new(vec![2, 0]).is_err());
        let shape = SubsystemShape::new(vec![2, 2]).unwrap();
        let r = DensityMatrix::<f64>::maximally_mixed(3);
        assert!(matches!(
            r.partial_trace(&shape, &[0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn f32_maximally_mixed_is_valid() {
        let r = DensityMatrix::<f32>::maximally_mixed(4);
        assert!(DensityMatrix::new(r.matrix().clone()).is_ok());
    }
}
