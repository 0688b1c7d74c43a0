//! Descent on the complex Stiefel manifold `{M : M*M = I}`.
//!
//! Euclidean gradients use the convention `df = Re Tr(G* dM)`; they are
//! projected onto the tangent space and steps are pulled back by the polar
//! retraction. Step sizes follow Barzilai–Borwein with Armijo backtracking.

use nalgebra::{Complex, ComplexField};

use crate::quantum::linalg::eig_sorted;
use crate::{lit, CMatrix, Real};

pub(crate) trait StiefelObjective<T: Real>: Sync {
    fn value(&self, m: &CMatrix<T>) -> T;

    /// Value and Euclidean gradient.
    fn value_and_gradient(&self, m: &CMatrix<T>) -> (T, CMatrix<T>) {
        let v = self.value(m);
        (v, fd_gradient(|x| self.value(x), m, lit(1e-6)))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Outcome<T: Real> {
    pub point: CMatrix<T>,
    pub value: T,
    pub gradient_norm: T,
    /// Gradient below tolerance, or no further decrease at working precision.
    pub converged: bool,
}

/// `Re Tr(A* B)`.
pub(crate) fn inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc + x.re * y.re + x.im * y.im)
}

/// `Z − M sym(M* Z)`.
pub(crate) fn project_tangent<T: Real>(m: &CMatrix<T>, z: &CMatrix<T>) -> CMatrix<T> {
    let b = m.adjoint() * z;
    let sym = (&b + b.adjoint()) * Complex::from(lit::<T>(0.5));
    z - m * sym
}

/// `Y (Y*Y)^{-1/2}`.
pub(crate) fn retract<T: Real>(y: &CMatrix<T>) -> Option<CMatrix<T>> {
    let eig = eig_sorted(y.adjoint() * y).ok()?;
    let floor = lit::<T>(1e-300);
    if eig.min_value() <= floor {
        return None;
    }
    let inv_sqrt = eig.map(|v| T::one() / v.sqrt());
    Some(y * inv_sqrt)
}

/// Central finite differences over real and imaginary parts of every entry.
pub(crate) fn fd_gradient<T: Real>(
    f: impl Fn(&CMatrix<T>) -> T,
    m: &CMatrix<T>,
    h: T,
) -> CMatrix<T> {
    let two_h = h + h;
    let mut x = m.clone();
    let mut g = CMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let orig = x[(i, j)];
            let mut part = |d: Complex<T>| {
                x[(i, j)] = orig + d;
                let up = f(&x);
                x[(i, j)] = orig - d;
                let down = f(&x);
                x[(i, j)] = orig;
                (up - down) / two_h
            };
            let re = part(Complex::new(h, T::zero()));
            let im = part(Complex::new(T::zero(), h));
            g[(i, j)] = Complex::new(re, im);
        }
    }
    g
}

fn all_finite<T: Real>(m: &CMatrix<T>) -> bool {
    m.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

fn gradient_at<T: Real, O: StiefelObjective<T> + ?Sized>(
    obj: &O,
    x: &CMatrix<T>,
) -> (T, CMatrix<T>) {
    let (f, g) = obj.value_and_gradient(x);
    if all_finite(&g) {
        (f, g)
    } else {
        (f, fd_gradient(|y| obj.value(y), x, lit(1e-6)))
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 60;
const STALL_LIMIT: usize = 25;

pub(crate) fn minimize<T: Real, O: StiefelObjective<T> + ?Sized>(
    obj: &O,
    start: CMatrix<T>,
    max_iterations: usize,
    gradient_tolerance: T,
) -> Outcome<T> {
    let mut x = start;
    let (mut f, g) = gradient_at(obj, &x);
    let mut xi = project_tangent(&x, &g);
    let mut gn = inner(&xi, &xi).sqrt();
    let mut step = T::one() / gn.max(T::one());
    let mut stall = 0;
    let mut stationary = false;
    let tiny = lit::<T>(1e-14);
    for _ in 0..max_iterations {
        if !(gn > gradient_tolerance) {
            break;
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..MAX_BACKTRACK {
            if let Some(cand) = retract(&(&x - &xi * Complex::from(t))) {
                let fc = obj.value(&cand);
                if fc.is_finite() && fc <= f - lit::<T>(ARMIJO) * t * gn * gn {
                    accepted = Some((cand, fc, t));
                    break;
                }
            }
            t *= lit(0.5);
        }
        let Some((cand, fc, t_used)) = accepted else {
            // no decrease even for tiny steps: stationary to working precision
            stationary = true;
            break;
        };
        let (fc2, gc) = gradient_at(obj, &cand);
        let fc = if fc2.is_finite() { fc2 } else { fc };
        let xi_c = project_tangent(&cand, &gc);
        let s = &cand - &x;
        let y = &xi_c - &xi;
        let sy = inner(&s, &y);
        step = if sy > T::zero() {
            inner(&s, &s) / sy
        } else {
            t_used + t_used
        };
        step = step.max(lit(1e-12)).min(lit(1e6));
        if f - fc <= tiny * f.abs().max(T::one()) {
            stall += 1;
        } else {
            stall = 0;
        }
        x = cand;
        f = fc;
        xi = xi_c;
        gn = inner(&xi, &xi).sqrt();
        if stall >= STALL_LIMIT {
            stationary = true;
            break;
        }
    }
    Outcome {
        point: x,
        value: f,
        gradient_norm: gn,
        converged: stationary || gn <= gradient_tolerance,
    }
}

/// `[I; 0]` padded to `rows x cols`.
pub(crate) fn canonical_frame<T: Real>(rows: usize, cols: usize) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |i, j| {
        if i == j {
            Complex::from(T::one())
        } else {
            Complex::from(T::zero())
        }
    })
}

pub(crate) fn orthonormality_defect<T: Real>(m: &CMatrix<T>) -> T {
    let g = m.adjoint() * m;
    let id = CMatrix::<T>::identity(m.ncols(), m.ncols());
    (g - id)
        .iter()
        .fold(T::zero(), |acc, c| acc.max(c.modulus()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::{random_isometry_rng, rng_for};

    struct Trace {
        a: CMatrix<f64>,
    }

    // f(M) = Re Tr(M* A M), minimised over St(n, k) by the bottom eigenvectors of A
    impl StiefelObjective<f64> for Trace {
        fn value(&self, m: &CMatrix<f64>) -> f64 {
            (m.adjoint() * &self.a * m).trace().re
        }
        fn value_and_gradient(&self, m: &CMatrix<f64>) -> (f64, CMatrix<f64>) {
            (self.value(m), &self.a * m * Complex::new(2.0, 0.0))
        }
    }

    #[test]
    fn retraction_lands_on_manifold() {
        let mut rng = rng_for(1, 0);
        let m = random_isometry_rng::<f64, _>(&mut rng, 5, 3);
        let z = crate::quantum::random::gaussian_matrix::<f64, _>(&mut rng, 5, 3);
        let xi = project_tangent(&m, &z);
        // tangent: M*ξ is skew-Hermitian
        let b = m.adjoint() * &xi;
        assert!((b.clone() + b.adjoint()).iter().all(|c| c.norm() < 1e-12));
        let r = retract(&(m + xi * Complex::new(0.3, 0.0))).unwrap();
        assert!(orthonormality_defect(&r) < 1e-12);
    }

    #[test]
    fn fd_gradient_matches_analytic() {
        let mut rng = rng_for(2, 0);
        let a = crate::quantum::random::random_hermitian::<f64>(4, 3);
        let obj = Trace { a };
        let m = random_isometry_rng::<f64, _>(&mut rng, 4, 2);
        let (_, g) = obj.value_and_gradient(&m);
        let fd = fd_gradient(|x| obj.value(x), &m, 1e-6);
        assert!((g - fd).iter().all(|c| c.norm() < 1e-6));
    }

    #[test]
    fn minimises_trace_to_bottom_eigenvalues() {
        let a = crate::quantum::random::random_hermitian::<f64>(5, 4);
        let eig = crate::quantum::hermitian_eig(&a).unwrap();
        let want = eig.values[3] + eig.values[4];
        let obj = Trace { a };
        let mut rng = rng_for(3, 0);
        let start = random_isometry_rng::<f64, _>(&mut rng, 5, 2);
        let out = minimize(&obj, start, 2000, 1e-9);
        assert!(out.converged);
        assert!((out.value - want).abs() < 1e-9);
        assert!(orthonormality_defect(&out.point) < 1e-10);
    }
}
