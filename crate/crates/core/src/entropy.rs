//! Entropy functionals in nats: von Neumann entropy, the extended entropy
//! `H(A) = -Tr A ln A + Tr A ln Tr A` of a positive operator, relative
//! entropy, binary entropy, power traces, and the Gibbs / energy-constraint
//! machinery for sets `{ρ : Tr Hρ ≤ h}`.

use nalgebra::{Complex, DVector};

use crate::quantum::linalg::{eig_sorted, hermitian_part, hermiticity_defect, trace_re};
use crate::quantum::{clip_eigenvalue, DensityMatrix};
use crate::{lit, tol, CMatrix, Error, Real, Result};

/// `-x ln x` with `0 ln 0 = 0`.
#[inline]
pub fn eta<T: Real>(x: T) -> T {
    if x > T::zero() {
        -x * x.ln()
    } else {
        T::zero()
    }
}

/// Shannon entropy of a (clipped) probability vector.
pub fn spectrum_entropy<T: Real>(p: &[T]) -> T {
    p.iter().fold(T::zero(), |s, &x| s + eta(x))
}

pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(spectrum_entropy(&rho.spectrum()?))
}

/// Extended entropy of a positive semidefinite operator,
/// `H(A) = (Tr A) S(A / Tr A)`, zero when `Tr A ≤ 1e-14`.
pub fn extended_entropy<T: Real>(a: &CMatrix<T>) -> Result<T> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "extended_entropy: expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if hermiticity_defect(a) > tol::<T>(1e-10) {
        return Err(Error::Validity(
            "extended_entropy: operator is not Hermitian".into(),
        ));
    }
    let tr = trace_re(a);
    if tr <= tol::<T>(1e-14) {
        if tr < -tol::<T>(1e-10) {
            return Err(Error::Validity(format!(
                "extended_entropy: negative trace {tr}"
            )));
        }
        return Ok(T::zero());
    }
    let eig = eig_sorted(hermitian_part(a))?;
    let mut lam = Vec::with_capacity(eig.dim());
    for &v in eig.values.iter() {
        lam.push(clip_eigenvalue(v)?);
    }
    Ok(extended_entropy_of_spectrum(&lam))
}

/// `-Σ λ ln λ + (Σ λ) ln(Σ λ)` for non-negative eigenvalues.
pub fn extended_entropy_of_spectrum<T: Real>(lam: &[T]) -> T {
    let tr = lam.iter().fold(T::zero(), |s, &x| s + x);
    if tr <= T::zero() {
        return T::zero();
    }
    let h = spectrum_entropy(lam) - eta(tr);
    h.max(T::zero())
}

/// `Tr ρ (ln ρ - ln σ)`, or `+∞` when the support of `ρ` is not contained
/// in the support of `σ`.
///
/// Support containment is decided in the eigenbasis of `σ`: an eigenvector
/// with eigenvalue `≤ 1e-12` that carries `ρ`-weight `> 1e-10` makes the
/// result infinite. These two thresholds are the only support test in the
/// crate.
pub fn relative_entropy<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "relative_entropy: dimensions {} and {} differ",
            rho.dim(),
            sigma.dim()
        )));
    }
    let floor = tol::<T>(1e-12);
    let weight_cut = tol::<T>(1e-10);
    let es = sigma.eig()?;
    let mut cross = T::zero();
    for k in 0..es.dim() {
        let v = es.vectors.column(k);
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        let mu = es.values[k];
        if mu <= floor {
            if w > weight_cut {
                return Ok(lit(f64::INFINITY));
            }
            continue;
        }
        cross += w * mu.ln();
    }
    let neg_s = -von_neumann_entropy(rho)?;
    Ok(neg_s - cross)
}

/// `h₂(p) = -p ln p - (1-p) ln(1-p)`.
pub fn binary_entropy<T: Real>(p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Parameter(format!(
            "binary_entropy: p = {p} outside [0, 1]"
        )));
    }
    Ok(eta(p) + eta(T::one() - p))
}

/// Fannes–Audenaert bound `T ln(d-1) + h₂(T)` on `|S(ρ) - S(σ)|` for states
/// of dimension `d` at trace distance `T = ‖ρ - σ‖₁/2`, capped at `ln d`.
pub fn fannes_audenaert_bound<T: Real>(t: T, d: usize) -> T {
    if d <= 1 {
        return T::zero();
    }
    let dd = lit::<T>(d as f64);
    let cap = dd.ln();
    if !t.is_finite() || t >= T::one() - T::one() / dd {
        return cap;
    }
    let t = t.max(T::zero());
    (t * (dd - T::one()).ln() + eta(t) + eta(T::one() - t)).min(cap)
}

/// `Tr ρ^λ = Σ λ_i^λ` for `0 < λ < 1`.
pub fn power_trace<T: Real>(rho: &DensityMatrix<T>, lambda: T) -> Result<T> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::Parameter(format!(
            "power_trace: exponent {lambda} outside (0, 1)"
        )));
    }
    Ok(rho
        .spectrum()?
        .iter()
        .filter(|&&x| x > T::zero())
        .fold(T::zero(), |s, &x| s + x.powf(lambda)))
}

/// Hamiltonian `H` with an energy level `h`, describing `{ρ : Tr Hρ ≤ h}`.
#[derive(Clone, Debug)]
pub struct EnergyConstraint<T: Real> {
    hamiltonian: CMatrix<T>,
    level: T,
    energies: DVector<T>,
    basis: CMatrix<T>,
}

impl<T: Real> EnergyConstraint<T> {
    pub fn new(hamiltonian: CMatrix<T>, level: T) -> Result<Self> {
        if hamiltonian.nrows() != hamiltonian.ncols() || hamiltonian.nrows() == 0 {
            return Err(Error::Dimension(
                "hamiltonian must be square and non-empty".into(),
            ));
        }
        if hermiticity_defect(&hamiltonian) > tol::<T>(1e-10) {
            return Err(Error::Validity("hamiltonian is not Hermitian".into()));
        }
        let hamiltonian = hermitian_part(&hamiltonian);
        let eig = eig_sorted(hamiltonian.clone())?;
        let n = eig.dim();
        // ascending order
        let energies = DVector::from_iterator(n, (0..n).rev().map(|k| eig.values[k]));
        let mut basis = CMatrix::zeros(n, n);
        for k in 0..n {
            basis.set_column(k, &eig.vectors.column(n - 1 - k));
        }
        Ok(Self {
            hamiltonian,
            level,
            energies,
            basis,
        })
    }

    pub fn hamiltonian(&self) -> &CMatrix<T> {
        &self.hamiltonian
    }

    pub fn level(&self) -> T {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Eigenvalues of `H`, ascending.
    pub fn energies(&self) -> &DVector<T> {
        &self.energies
    }

    pub fn min_energy(&self) -> T {
        self.energies[0]
    }

    pub fn max_energy(&self) -> T {
        self.energies[self.dim() - 1]
    }

    /// `Tr H / d`, the energy of the maximally mixed state.
    pub fn mean_energy(&self) -> T {
        self.energies.sum() / lit(self.dim() as f64)
    }

    pub fn energy(&self, rho: &DensityMatrix<T>) -> Result<T> {
        if rho.dim() != self.dim() {
            return Err(Error::Dimension(
                "energy: state and hamiltonian differ in dimension".into(),
            ));
        }
        Ok((&self.hamiltonian * rho.matrix()).trace().re)
    }

    pub fn contains(&self, rho: &DensityMatrix<T>) -> Result<bool> {
        Ok(self.energy(rho)? <= self.level)
    }

    /// State diagonal in the eigenbasis of `H` with the given weights.
    fn state_from_weights(&self, w: &[T]) -> DensityMatrix<T> {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (k, &wk) in w.iter().enumerate() {
            if wk == T::zero() {
                continue;
            }
            let v = self.basis.column(k);
            m += v * v.adjoint() * Complex::from(wk);
        }
        DensityMatrix::from_trusted(m)
    }

    /// Boltzmann weights `exp(-βE_k) / Z`, computed with a shifted exponent.
    fn weights(&self, beta: T) -> Vec<T> {
        let shift = if beta >= T::zero() {
            self.min_energy()
        } else {
            self.max_energy()
        };
        let raw: Vec<T> = self
            .energies
            .iter()
            .map(|&e| (-(beta * (e - shift))).exp())
            .collect();
        let z = raw.iter().fold(T::zero(), |s, &x| s + x);
        raw.into_iter().map(|x| x / z).collect()
    }

    fn weighted_energy(&self, w: &[T]) -> T {
        w.iter()
            .zip(self.energies.iter())
            .fold(T::zero(), |s, (&p, &e)| s + p * e)
    }

    /// Uniform weights on the eigenspace of the extreme energy `target`.
    fn edge_weights(&self, target: T) -> Vec<T> {
        let gap = tol::<T>(1e-12) * (T::one() + target.abs());
        let members: Vec<bool> = self
            .energies
            .iter()
            .map(|&e| (e - target).abs() <= gap)
            .collect();
        let count = members.iter().filter(|&&b| b).count();
        let w = T::one() / lit(count as f64);
        members
            .into_iter()
            .map(|b| if b { w } else { T::zero() })
            .collect()
    }
}

/// Output of [`gibbs_state`].
#[derive(Clone, Debug)]
pub struct GibbsState<T: Real> {
    pub state: DensityMatrix<T>,
    /// Inverse temperature; `±∞` at the spectral endpoints.
    pub beta: T,
    pub entropy: T,
    pub energy: T,
}

const GIBBS_BRACKET: f64 = 50.0;
const GIBBS_MAX_BRACKET: f64 = 1e8;

/// `exp(-βH)/Tr exp(-βH)` with `Tr Hρ_β = h`, the entropy maximiser on the
/// level set `{Tr Hρ = h}`.
///
/// β is found by bisection in the spectral basis of `H`, starting from the
/// bracket `[-50, 50]`; the bracket is widened when the level lies closer to
/// an endpoint than `β = ±50` can reach. At an endpoint of the spectral
/// range the maximally mixed state on the corresponding eigenspace is
/// returned with `β = ±∞`.
pub fn gibbs_state<T: Real>(c: &EnergyConstraint<T>) -> Result<GibbsState<T>> {
    let (lo, hi) = (c.min_energy(), c.max_energy());
    let h = c.level;
    let scale = T::one() + lo.abs().max(hi.abs());
    let edge = tol::<T>(1e-12) * scale;
    if h < lo - edge || h > hi + edge {
        return Err(Error::Infeasible {
            level: h.to_f64().unwrap_or(f64::NAN),
            min: lo.to_f64().unwrap_or(f64::NAN),
            max: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let finish = |w: Vec<T>, beta: T| {
        let energy = c.weighted_energy(&w);
        GibbsState {
            state: c.state_from_weights(&w),
            beta,
            entropy: spectrum_entropy(&w),
            energy,
        }
    };
    if hi - lo <= edge {
        return Ok(finish(c.weights(T::zero()), T::zero()));
    }
    if (h - lo).abs() <= edge {
        return Ok(finish(c.edge_weights(lo), lit(f64::INFINITY)));
    }
    if (h - hi).abs() <= edge {
        return Ok(finish(c.edge_weights(hi), lit(f64::NEG_INFINITY)));
    }
    let energy_at = |b: T| c.weighted_energy(&c.weights(b));
    let mut bound = lit::<T>(GIBBS_BRACKET);
    // E(β) is decreasing; widen until [E(bound), E(-bound)] contains h
    while (energy_at(bound) > h || energy_at(-bound) < h) && bound < lit(GIBBS_MAX_BRACKET) {
        bound *= lit(4.0);
    }
    let (mut a, mut b) = (-bound, bound);
    let target_tol = tol::<T>(1e-13) * scale;
    let mut beta = (a + b) * lit(0.5);
    for _ in 0..400 {
        beta = (a + b) * lit(0.5);
        let e = energy_at(beta);
        if (e - h).abs() <= target_tol {
            break;
        }
        if e > h {
            a = beta;
        } else {
            b = beta;
        }
        if b - a <= T::default_epsilon() * (T::one() + beta.abs()) {
            break;
        }
    }
    Ok(finish(c.weights(beta), beta))
}

/// Maximum-entropy state of `{ρ : Tr Hρ ≤ h}`: the Gibbs state at level `h`
/// when `h` lies below the mean energy, the maximally mixed state otherwise.
pub fn max_entropy_state<T: Real>(c: &EnergyConstraint<T>) -> Result<GibbsState<T>> {
    if c.level >= c.mean_energy() {
        let n = c.dim();
        let w = vec![T::one() / lit(n as f64); n];
        return Ok(GibbsState {
            state: DensityMatrix::maximally_mixed(n),
            beta: T::zero(),
            entropy: lit::<T>(n as f64).ln(),
            energy: c.weighted_energy(&w),
        });
    }
    gibbs_state(c)
}

/// `min_U Tr(H U ρ U*)`: eigenvalues of `H` ascending paired with those of
/// `ρ` descending.
pub fn min_orbit_energy<T: Real>(hamiltonian: &CMatrix<T>, rho: &DensityMatrix<T>) -> Result<T> {
    if hamiltonian.nrows() != rho.dim() || hamiltonian.ncols() != rho.dim() {
        return Err(Error::Dimension(format!(
            "min_orbit_energy: hamiltonian is {}x{}, state has dimension {}",
            hamiltonian.nrows(),
            hamiltonian.ncols(),
            rho.dim()
        )));
    }
    let c = EnergyConstraint::new(hamiltonian.clone(), T::zero())?;
    let p = rho.spectrum()?;
    Ok(c.energies()
        .iter()
        .zip(p.iter())
        .fold(T::zero(), |s, (&e, &q)| s + e * q))
}

/// Bits from nats.
pub fn to_bits<T: Real>(nats: T) -> T {
    nats / T::ln_2()
}
