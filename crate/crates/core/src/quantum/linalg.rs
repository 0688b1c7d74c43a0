//! Dense Hermitian linear algebra on `CMatrix<T>`.
//!
//! Composite indices are row-major over tensor factors: for factor
//! dimensions `(d_1, ..., d_k)` the basis vector `|i_1 ... i_k>` sits at
//! `((i_1 * d_2 + i_2) * d_3 + ...) + i_k`, first factor slowest. This is
//! the same convention `Matrix::kronecker` uses.

use nalgebra::{Complex, ComplexField, DVector, SymmetricEigen};

use crate::{lit, tol, CMatrix, Error, Real, Result};

const EIG_MAX_ITER: usize = 10_000;

/// Eigendecomposition `A = V diag(values) V*` with eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermitianEig<T: Real> {
    pub values: DVector<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Rebuilds `V f(diag) V*`.
    pub fn map<F: Fn(T) -> T>(&self, f: F) -> CMatrix<T> {
        let n = self.dim();
        let mut out = CMatrix::<T>::zeros(n, n);
        for k in 0..n {
            let fk = f(self.values[k]);
            if fk == T::zero() {
                continue;
            }
            let col = self.vectors.column(k);
            for j in 0..n {
                let cj = col[j].conj() * Complex::from(fk);
                for i in 0..n {
                    out[(i, j)] += col[i] * cj;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.map(|x| x)
    }

    pub fn min_value(&self) -> T {
        self.values[self.dim() - 1]
    }
}

fn require_square<T: Real>(a: &CMatrix<T>, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "{what}: expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

/// `(A + A*) / 2`.
pub fn hermitian_part<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let half = Complex::from(lit::<T>(0.5));
    (a + a.adjoint()) * half
}

/// Largest entrywise modulus of `A - A*`.
pub fn hermiticity_defect<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.nrows().min(a.ncols());
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).modulus();
            if d > worst {
                worst = d;
            }
        }
    }
    if a.nrows() != a.ncols() {
        return T::max_value().unwrap_or_else(T::one);
    }
    worst
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
///
/// The input is symmetrised as `(A + A*)/2` first; it must already be
/// Hermitian within `1e-8` (relative to its largest entry when that is
/// bigger than one).
pub fn hermitian_eig<T: Real>(a: &CMatrix<T>) -> Result<HermitianEig<T>> {
    let n = require_square(a, "hermitian_eig")?;
    if n == 0 {
        return Err(Error::Dimension("hermitian_eig: empty matrix".into()));
    }
    let scale = a.iter().fold(T::one(), |m, z| {
        let v = z.modulus();
        if v > m {
            v
        } else {
            m
        }
    });
    let defect = hermiticity_defect(a);
    if defect > tol::<T>(1e-8) * scale {
        return Err(Error::Validity(format!(
            "hermitian_eig: matrix is not Hermitian (defect {defect})"
        )));
    }
    let h = hermitian_part(a);
    eig_sorted(h)
}

/// Eigendecomposition of a matrix the caller guarantees to be Hermitian.
pub(crate) fn eig_sorted<T: Real>(h: CMatrix<T>) -> Result<HermitianEig<T>> {
    let n = h.nrows();
    if n == 1 {
        return Ok(HermitianEig {
            values: DVector::from_element(1, h[(0, 0)].re),
            vectors: CMatrix::identity(1, 1),
        });
    }
    if n == 2 {
        return Ok(eig2(&h));
    }
    let eig = SymmetricEigen::try_new(h.clone(), T::default_epsilon(), EIG_MAX_ITER).ok_or(
        Error::NonConvergence {
            iterations: EIG_MAX_ITER,
        },
    )?;
    let (raw, basis) = jacobi_polish(&h, eig.eigenvectors);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        raw[j]
            .partial_cmp(&raw[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = DVector::from_iterator(n, order.iter().map(|&k| raw[k]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &basis.column(src));
    }
    Ok(HermitianEig { values, vectors })
}

const JACOBI_SWEEPS: usize = 30;

/// Cyclic 2x2 Jacobi sweeps on `V* H V` until the off-diagonal part is at
/// roundoff level. nalgebra's QR iteration can stop early on clustered
/// eigenvalues (residuals around 1e-9); from its output this converges in
/// one or two sweeps, and costs one extra product when nothing is left to do.
fn jacobi_polish<T: Real>(h: &CMatrix<T>, mut v: CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = h.nrows();
    let mut d = hermitian_part(&(v.adjoint() * h * &v));
    let norm = h
        .iter()
        .fold(T::zero(), |s, z| s + z.modulus_squared())
        .sqrt();
    let target = lit::<T>(n as f64) * T::default_epsilon() * norm;
    let mut last = off(&d);
    for _ in 0..JACOBI_SWEEPS {
        if last <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if d[(p, q)].modulus() <= T::default_epsilon() * target {
                    continue;
                }
                let block =
                    CMatrix::from_row_slice(2, 2, &[d[(p, p)], d[(p, q)], d[(q, p)], d[(q, q)]]);
                let g = eig2(&block).vectors;
                rotate_columns(&mut d, p, q, &g);
                rotate_columns(&mut v, p, q, &g);
                // rows: d <- G* d on (p, q)
                for k in 0..n {
                    let (a, b) = (d[(p, k)], d[(q, k)]);
                    d[(p, k)] = g[(0, 0)].conj() * a + g[(1, 0)].conj() * b;
                    d[(q, k)] = g[(0, 1)].conj() * a + g[(1, 1)].conj() * b;
                }
            }
        }
        let now = off(&d);
        // stalled at the roundoff floor
        if now > lit::<T>(0.5) * last {
            break;
        }
        last = now;
    }
    ((0..n).map(|k| d[(k, k)].re).collect(), v)
}

fn off<T: Real>(d: &CMatrix<T>) -> T {
    let mut s = T::zero();
    for j in 0..d.ncols() {
        for i in 0..d.nrows() {
            if i != j {
                s += d[(i, j)].modulus_squared();
            }
        }
    }
    s.sqrt()
}

fn rotate_columns<T: Real>(m: &mut CMatrix<T>, p: usize, q: usize, g: &CMatrix<T>) {
    for k in 0..m.nrows() {
        let (a, b) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = a * g[(0, 0)] + b * g[(1, 0)];
        m[(k, q)] = a * g[(0, 1)] + b * g[(1, 1)];
    }
}

/// Closed-form 2x2 Hermitian eigendecomposition.
fn eig2<T: Real>(h: &CMatrix<T>) -> HermitianEig<T> {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let half = lit::<T>(0.5);
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let bn = b.modulus();
    let radius = (diff * diff + bn * bn).sqrt();
    let values = DVector::from_vec(vec![mean + radius, mean - radius]);
    let mut vectors = CMatrix::zeros(2, 2);
    if radius == T::zero() || bn <= T::default_epsilon() * radius {
        // diagonal up to roundoff
        if a >= d {
            vectors[(0, 0)] = Complex::from(T::one());
            vectors[(1, 1)] = Complex::from(T::one());
        } else {
            vectors[(1, 0)] = Complex::from(T::one());
            vectors[(0, 1)] = Complex::from(T::one());
        }
        return HermitianEig { values, vectors };
    }
    // top eigenvector ∝ (b, λ₊ - a) or (λ₊ - d, b*), pick the better conditioned
    let lp = mean + radius;
    let (x, y) = if diff >= T::zero() {
        (Complex::from(lp - d), b.conj())
    } else {
        (b, Complex::from(lp - a))
    };
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let x = x / Complex::from(norm);
    let y = y / Complex::from(norm);
    vectors[(0, 0)] = x;
    vectors[(1, 0)] = y;
    // orthogonal complement
    vectors[(0, 1)] = -y.conj();
    vectors[(1, 1)] = x.conj();
    HermitianEig { values, vectors }
}

/// Kronecker product, first factor slowest.
pub fn tensor<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// Kronecker product of a list of matrices.
pub fn tensor_all<T: Real>(factors: &[CMatrix<T>]) -> CMatrix<T> {
    let mut it = factors.iter();
    let first = it
        .next()
        .cloned()
        .unwrap_or_else(|| CMatrix::identity(1, 1));
    it.fold(first, |acc, f| acc.kronecker(f))
}

/// Row-major strides for a list of factor dimensions.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Offsets of every composite index over the selected factors, embedded in
/// the full index space.
fn offsets(dims: &[usize], strides: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &base in &out {
            for i in 0..dims[f] {
                next.push(base + i * strides[f]);
            }
        }
        out = next;
    }
    out
}

/// Partial trace of a square matrix over every factor not listed in `keep`.
///
/// `keep` must be non-empty and strictly increasing.
pub fn partial_trace_matrix<T: Real>(
    a: &CMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<CMatrix<T>> {
    let n = require_square(a, "partial_trace")?;
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::Dimension(format!(
            "partial_trace: factor dims {dims:?} multiply to {total}, matrix is {n}x{n}"
        )));
    }
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Dimension(format!(
            "partial_trace: keep set {keep:?} must be non-empty and strictly increasing"
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "partial_trace: factor {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_off = offsets(dims, &st, keep);
    let traced_off = offsets(dims, &st, &traced);
    let m = kept_off.len();
    let mut out = CMatrix::zeros(m, m);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &t in &traced_off {
                acc += a[(ro + t, co + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Partial transpose on the listed factors.
pub fn partial_transpose<T: Real>(
    a: &CMatrix<T>,
    dims: &[usize],
    factors: &[usize],
) -> Result<CMatrix<T>> {
    let n = require_square(a, "partial_transpose")?;
    if dims.iter().product::<usize>() != n {
        return Err(Error::Dimension(format!(
            "partial_transpose: factor dims {dims:?} do not match {n}"
        )));
    }
    let st = strides(dims);
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; dims.len()];
        for (k, s) in st.iter().enumerate() {
            d[k] = idx / s;
            idx %= s;
        }
        d
    };
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        let dr = digits(r);
        for c in 0..n {
            let dc = digits(c);
            let (mut r2, mut c2) = (0, 0);
            for k in 0..dims.len() {
                let (x, y) = if factors.contains(&k) {
                    (dc[k], dr[k])
                } else {
                    (dr[k], dc[k])
                };
                r2 += x * st[k];
                c2 += y * st[k];
            }
            out[(r2, c2)] = a[(r, c)];
        }
    }
    Ok(out)
}

/// Result of a positive-semidefiniteness test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdCheck<T> {
    pub is_psd: bool,
    /// Smallest eigenvalue.
    pub witness: T,
}

/// `λ_min(A) ≥ -tol`, with `λ_min` returned as a witness.
pub fn is_psd<T: Real>(a: &CMatrix<T>, tolerance: T) -> Result<PsdCheck<T>> {
    let n = require_square(a, "is_psd")?;
    if n == 0 {
        return Err(Error::Dimension("is_psd: empty matrix".into()));
    }
    let scale = a.iter().fold(T::one(), |m, z| m.max(z.modulus()));
    if hermiticity_defect(a) > tolerance.max(tol::<T>(1e-8)) * scale {
        return Err(Error::Validity("is_psd: matrix is not Hermitian".into()));
    }
    let eig = eig_sorted(hermitian_part(a))?;
    let witness = eig.min_value();
    Ok(PsdCheck {
        is_psd: witness >= -tolerance,
        witness,
    })
}

/// Real trace.
pub fn trace_re<T: Real>(a: &CMatrix<T>) -> T {
    (0..a.nrows().min(a.ncols())).fold(T::zero(), |s, i| s + a[(i, i)].re)
}

/// Largest entrywise modulus of `A - B`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |m, (x, y)| m.max((*x - *y).modulus()))
}

/// Sum of singular values of a Hermitian matrix.
pub fn trace_norm<T: Real>(a: &CMatrix<T>) -> Result<T> {
    let eig = eig_sorted(hermitian_part(a))?;
    Ok(eig.values.iter().fold(T::zero(), |s, v| s + v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::{random_hermitian, random_unitary};
    use nalgebra::Complex;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn diag(v: &[f64]) -> CMatrix<f64> {
        CMatrix::from_fn(v.len(), v.len(), |i, j| {
            if i == j {
                c(v[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn identity_eigenvalues() {
        let e = hermitian_eig(&CMatrix::<f64>::identity(3, 3)).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let e = hermitian_eig(&diag(&[-1.0, 2.0])).unwrap();
        assert_eq!(e.values.as_slice(), &[2.0, -1.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
        let e = hermitian_eig(&diag(&[2.0, -1.0])).unwrap();
        assert_eq!(e.values.as_slice(), &[2.0, -1.0]);
        assert!((e.vectors[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_seed7() {
        for n in [2, 3, 6] {
            let a = random_hermitian::<f64>(n, 7);
            let e = hermitian_eig(&a).unwrap();
            let scale = a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            assert!(max_abs_diff(&e.reconstruct(), &a) <= 1e-9 * scale);
            let vv = e.vectors.adjoint() * &e.vectors;
            assert!(max_abs_diff(&vv, &CMatrix::identity(n, n)) <= 1e-9);
            assert!(e.values.as_slice().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn clustered_eigenvalues_reconstruct() {
        // nalgebra alone leaves a 3e-9 residual on this one
        let (x, y) = (0.03986517312330813, -0.03957503894811896);
        let re = [
            1.0,
            x,
            y,
            x,
            1.0,
            0.03986517312330859,
            y,
            0.03986517312330859,
            1.0,
        ];
        let a = CMatrix::from_row_slice(3, 3, &re.map(|v| Complex::new(v, 0.0)));
        let e = hermitian_eig(&a).unwrap();
        assert!(max_abs_diff(&e.reconstruct(), &a) <= 1e-14);
        let vv = e.vectors.adjoint() * &e.vectors;
        assert!(max_abs_diff(&vv, &CMatrix::identity(3, 3)) <= 1e-14);
    }

    #[test]
    fn non_square_is_dimension_error() {
        let a = CMatrix::<f64>::zeros(2, 3);
        assert!(matches!(hermitian_eig(&a), Err(Error::Dimension(_))));
        assert!(matches!(is_psd(&a, 1e-10), Err(Error::Dimension(_))));
    }

    #[test]
    fn tensor_identities_and_diagonals() {
        let i2 = CMatrix::<f64>::identity(2, 2);
        assert_eq!(tensor(&i2, &i2), CMatrix::identity(4, 4));
        let t = tensor(&diag(&[2.0, 3.0]), &diag(&[5.0, 7.0]));
        assert_eq!(t, diag(&[10.0, 14.0, 15.0, 21.0]));
    }

    #[test]
    fn tensor_trace_multiplies() {
        for seed in 0..10 {
            let a = random_hermitian::<f64>(3, seed);
            let b = random_hermitian::<f64>(3, 100 + seed);
            // oracle: direct double sum of the diagonal
            let mut direct = 0.0;
            for i in 0..3 {
                for k in 0..3 {
                    direct += (a[(i, i)] * b[(k, k)]).re;
                }
            }
            assert!((trace_re(&tensor(&a, &b)) - direct).abs() < 1e-12);
            assert!((direct - trace_re(&a) * trace_re(&b)).abs() < 1e-12);
        }
    }

    /// Exhaustive index-sum oracle for a partial trace.
    fn partial_trace_oracle(a: &CMatrix<f64>, dims: &[usize], keep: &[usize]) -> CMatrix<f64> {
        let n: usize = dims.iter().product();
        let digits = |mut x: usize| {
            let mut d = vec![0; dims.len()];
            for k in (0..dims.len()).rev() {
                d[k] = x % dims[k];
                x /= dims[k];
            }
            d
        };
        let kept: usize = keep.iter().map(|&k| dims[k]).product();
        let compose = |d: &[usize]| keep.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
        let mut out = CMatrix::zeros(kept, kept);
        for r in 0..n {
            for cidx in 0..n {
                let dr = digits(r);
                let dc = digits(cidx);
                let traced_equal = (0..dims.len())
                    .filter(|k| !keep.contains(k))
                    .all(|k| dr[k] == dc[k]);
                if traced_equal {
                    out[(compose(&dr), compose(&dc))] += a[(r, cidx)];
                }
            }
        }
        out
    }

    #[test]
    fn partial_trace_matches_index_oracle() {
        for (seed, dims) in [
            (1, vec![2, 3]),
            (2, vec![3, 2]),
            (3, vec![2, 2, 2]),
            (4, vec![2, 3, 2]),
        ] {
            let n: usize = dims.iter().product();
            let a = random_hermitian::<f64>(n, seed);
            for keep in [vec![0], vec![1], vec![0, 1]] {
                let got = partial_trace_matrix(&a, &dims, &keep).unwrap();
                let want = partial_trace_oracle(&a, &dims, &keep);
                assert!(
                    max_abs_diff(&got, &want) < 1e-12,
                    "dims {dims:?} keep {keep:?}"
                );
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_shapes() {
        let a = CMatrix::<f64>::identity(6, 6);
        assert!(partial_trace_matrix(&a, &[2, 2], &[0]).is_err());
        assert!(partial_trace_matrix(&a, &[2, 3], &[]).is_err());
        assert!(partial_trace_matrix(&a, &[2, 3], &[1, 0]).is_err());
        assert!(partial_trace_matrix(&a, &[2, 3], &[2]).is_err());
    }

    #[test]
    fn psd_checks() {
        let r = is_psd(&CMatrix::<f64>::identity(3, 3), 1e-10).unwrap();
        assert!(r.is_psd);
        assert_eq!(r.witness, 1.0);
        let r = is_psd(&diag(&[1.0, -0.5]), 1e-10).unwrap();
        assert!(!r.is_psd);
        assert!((r.witness + 0.5).abs() < 1e-15);
        for seed in 0..10 {
            let g = random_unitary::<f64>(4, seed);
            let a =
                &g * CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    c(0.1, 0.0),
                    c(0.2, 0.0),
                    c(0.0, 0.0),
                    c(0.3, 0.0),
                ])) * g.adjoint();
            let cmat = random_hermitian::<f64>(4, 50 + seed);
            let b = &a + &cmat * cmat.adjoint();
            assert!(is_psd(&(b - a), 1e-10).unwrap().is_psd);
        }
    }

    #[test]
    fn partial_transpose_twice_is_identity() {
        let a = random_hermitian::<f64>(6, 3);
        let t = partial_transpose(&a, &[2, 3], &[1]).unwrap();
        let back = partial_transpose(&t, &[2, 3], &[1]).unwrap();
        assert_eq!(back, a);
        let full = partial_transpose(&a, &[2, 3], &[0, 1]).unwrap();
        assert!(max_abs_diff(&full, &a.transpose()) == 0.0);
    }
}
