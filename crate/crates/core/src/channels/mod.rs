//! Kraus-form channels and the named constructions.

mod phase;

pub use phase::{
    estimate_entropy_constant, phase_channel_complement_mp, random_phase_channel, schur_matrix,
    tail_entropy_bound, tail_quantities, DualGrid, MeasurePrepareComplement, PhaseDensity,
    RandomPhaseSpec, TailQuantities,
};

use nalgebra::Complex;
use rand::Rng;

use crate::entropy::von_neumann_entropy;
use crate::quantum::linalg::{
    eig_sorted, hermitian_part, max_abs_diff, partial_transpose, strides, PsdCheck,
};
use crate::quantum::random::random_isometry_rng;
use crate::quantum::{is_psd, DensityMatrix, SubsystemShape};
use crate::{lit, tol, CMatrix, Error, Real, Result};

/// Completely positive trace-preserving map `ρ ↦ Σ K_i ρ K_i*`.
///
/// Trace preservation `Σ K_i* K_i = I` is checked within `1e-9` on
/// construction; the environment dimension is the number of Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T: Real> {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix<T>>,
    label: String,
}

impl<T: Real> Channel<T> {
    pub fn new(kraus: Vec<CMatrix<T>>, label: impl Into<String>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Parameter("channel needs at least one Kraus operator".into()))?;
        let (out_dim, in_dim) = first.shape();
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::Dimension("Kraus operators must be non-empty".into()));
        }
        if let Some(bad) = kraus.iter().position(|k| k.shape() != (out_dim, in_dim)) {
            return Err(Error::Dimension(format!(
                "Kraus operator {bad} has shape {:?}, expected {:?}",
                kraus[bad].shape(),
                (out_dim, in_dim)
            )));
        }
        let mut sum = CMatrix::<T>::zeros(in_dim, in_dim);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let defect = max_abs_diff(&sum, &CMatrix::identity(in_dim, in_dim));
        if defect > tol::<T>(1e-9) {
            return Err(Error::Validity(format!(
                "Kraus operators are not trace preserving (defect {defect})"
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            kraus,
            label: label.into(),
        })
    }

    pub fn noiseless(dim: usize) -> Self {
        Self {
            in_dim: dim,
            out_dim: dim,
            kraus: vec![CMatrix::identity(dim, dim)],
            label: format!("noiseless({dim})"),
        }
    }

    /// `ρ ↦ Tr(ρ) I/d`.
    pub fn completely_depolarizing(dim: usize) -> Self {
        let s = Complex::from(T::one() / lit::<T>(dim as f64).sqrt());
        let mut kraus = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut k = CMatrix::zeros(dim, dim);
                k[(i, j)] = s;
                kraus.push(k);
            }
        }
        Self {
            in_dim: dim,
            out_dim: dim,
            kraus,
            label: format!("depolarizing({dim})"),
        }
    }

    /// Qubit dephasing with Kraus operators `{√(1-q) I, √q Z}`.
    pub fn dephasing(q: T) -> Result<Self> {
        if !(q >= T::zero() && q <= T::one()) {
            return Err(Error::Parameter(format!(
                "dephasing: q = {q} outside [0, 1]"
            )));
        }
        let a = Complex::from((T::one() - q).sqrt());
        let b = Complex::from(q.sqrt());
        let id = CMatrix::identity(2, 2) * a;
        let mut z = CMatrix::zeros(2, 2);
        z[(0, 0)] = b;
        z[(1, 1)] = -b;
        Self::new(vec![id, z], format!("dephasing({q})"))
    }

    /// Constant channel onto `sigma`.
    pub fn constant(in_dim: usize, sigma: &DensityMatrix<T>) -> Result<Self> {
        let mut c = measure_prepare(
            &[CMatrix::identity(in_dim, in_dim)],
            std::slice::from_ref(sigma),
        )?;
        c.label = format!("constant({in_dim}->{})", sigma.dim());
        Ok(c)
    }

    /// Stinespring channel from a random isometry `C^in → C^out ⊗ C^env`.
    pub fn random_stinespring<R: Rng + ?Sized>(
        rng: &mut R,
        in_dim: usize,
        out_dim: usize,
        env_dim: usize,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 || env_dim == 0 || out_dim * env_dim < in_dim {
            return Err(Error::Parameter(format!(
                "random channel {in_dim}->{out_dim} with environment {env_dim} has no isometric dilation"
            )));
        }
        let v = random_isometry_rng::<T, _>(rng, out_dim * env_dim, in_dim);
        let kraus = (0..env_dim)
            .map(|e| CMatrix::from_fn(out_dim, in_dim, |j, k| v[(j * env_dim + e, k)]))
            .collect();
        Self::new(
            kraus,
            format!("stinespring({in_dim}->{out_dim},env={env_dim})"),
        )
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn env_dim(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[CMatrix<T>] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn check_input(&self, dim: usize) -> Result<()> {
        if dim != self.in_dim {
            return Err(Error::Dimension(format!(
                "channel '{}' expects input dimension {}, got {dim}",
                self.label, self.in_dim
            )));
        }
        Ok(())
    }

    /// `Σ K_i A K_i*` on an arbitrary square matrix.
    pub fn apply_matrix(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        if a.nrows() != self.in_dim || a.ncols() != self.in_dim {
            return Err(Error::Dimension(format!(
                "channel '{}' expects {}x{} input, got {}x{}",
                self.label,
                self.in_dim,
                self.in_dim,
                a.nrows(),
                a.ncols()
            )));
        }
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += k * a * k.adjoint();
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        self.check_input(rho.dim())?;
        Ok(DensityMatrix::from_trusted(
            self.apply_matrix(rho.matrix())?,
        ))
    }

    /// Dual map `X ↦ Σ K_i* X K_i`.
    pub fn apply_dual(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        if x.nrows() != self.out_dim || x.ncols() != self.out_dim {
            return Err(Error::Dimension("dual map: wrong operator shape".into()));
        }
        let mut out = CMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            out += k.adjoint() * x * k;
        }
        Ok(out)
    }

    /// `H_Φ(ρ) = S(Φ(ρ))` in nats.
    pub fn output_entropy(&self, rho: &DensityMatrix<T>) -> Result<T> {
        von_neumann_entropy(&self.apply(rho)?)
    }

    /// `Φ ⊗ Ψ`, Kraus operators `K_a ⊗ L_b` with `a` the slow index.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        Self {
            in_dim: self.in_dim * other.in_dim,
            out_dim: self.out_dim * other.out_dim,
            kraus,
            label: format!("({})⊗({})", self.label, other.label),
        }
    }

    /// Complementary channel from the Stinespring isometry
    /// `V|ψ> = Σ_i K_i|ψ> ⊗ |i>`, tracing out the output instead of the
    /// environment. Kraus operators `(K̂_j)_{ik} = (K_i)_{jk}`.
    pub fn complementary(&self) -> Self {
        let env = self.kraus.len();
        let kraus = (0..self.out_dim)
            .map(|j| CMatrix::from_fn(env, self.in_dim, |i, k| self.kraus[i][(j, k)]))
            .collect();
        Self {
            in_dim: self.in_dim,
            out_dim: env,
            kraus,
            label: format!("complement({})", self.label),
        }
    }

    /// Stinespring isometry `V: C^in → C^out ⊗ C^env`.
    pub fn stinespring(&self) -> CMatrix<T> {
        let env = self.kraus.len();
        CMatrix::from_fn(self.out_dim * env, self.in_dim, |r, k| {
            self.kraus[r % env][(r / env, k)]
        })
    }

    /// `(Id ⊗ Φ)(|Ω><Ω|)` with `|Ω> = Σ_i |i>|i>` unnormalised; input factor
    /// first.
    pub fn choi(&self) -> CMatrix<T> {
        let (n, m) = (self.in_dim, self.out_dim);
        let mut c = CMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                // Φ(|i><j|) = Σ_k K_k[:, i] K_k[:, j]*
                for k in &self.kraus {
                    for a in 0..m {
                        let ka = k[(a, i)];
                        if ka == Complex::from(T::zero()) {
                            continue;
                        }
                        for b in 0..m {
                            c[(i * m + a, j * m + b)] += ka * k[(b, j)].conj();
                        }
                    }
                }
            }
        }
        c
    }

    /// Positivity of the partial transpose of the Choi matrix, a necessary
    /// condition for entanglement breaking.
    pub fn choi_ppt(&self, tolerance: T) -> Result<PsdCheck<T>> {
        let pt = partial_transpose(&self.choi(), &[self.in_dim, self.out_dim], &[1])?;
        is_psd(&pt, tolerance)
    }
}

/// `q Id ⊕ (1-q) Φ₀`: the same input is fed to both branches, the output
/// lives in `H_in ⊕ H_out(Φ₀)` with the noiseless branch in the top block.
///
/// For `0 < q < 1`:
/// `H_{Φ_q}(ρ) = q S(ρ) + (1-q) H_{Φ₀}(ρ) + h₂(q)`.
pub fn direct_sum_mixture<T: Real>(q: T, base: &Channel<T>) -> Result<Channel<T>> {
    if !(q >= T::zero() && q <= T::one()) {
        return Err(Error::Parameter(format!(
            "direct_sum_mixture: q = {q} outside [0, 1]"
        )));
    }
    let n = base.in_dim;
    let out = n + base.out_dim;
    let mut kraus = Vec::with_capacity(base.env_dim() + 1);
    if q > T::zero() {
        let s = Complex::from(q.sqrt());
        let mut top = CMatrix::zeros(out, n);
        for i in 0..n {
            top[(i, i)] = s;
        }
        kraus.push(top);
    }
    if q < T::one() {
        let s = Complex::from((T::one() - q).sqrt());
        for k in base.kraus() {
            let mut m = CMatrix::zeros(out, n);
            m.view_mut((n, 0), (base.out_dim, n)).copy_from(&(k * s));
            kraus.push(m);
        }
    }
    Channel::new(kraus, format!("mix({q}; id ⊕ {})", base.label))
}

/// Measure-prepare channel `ρ ↦ Σ_i σ_i Tr(ρ M_i)`.
///
/// Kraus operators `√(μ_ij m_ik) |φ_ij><m_ik|` from the spectral
/// decompositions `σ_i = Σ_j μ_ij |φ_ij><φ_ij|` and `M_i = Σ_k m_ik |m_ik><m_ik|`.
pub fn measure_prepare<T: Real>(
    povm: &[CMatrix<T>],
    outputs: &[DensityMatrix<T>],
) -> Result<Channel<T>> {
    if povm.is_empty() || povm.len() != outputs.len() {
        return Err(Error::Parameter(format!(
            "measure_prepare: {} effects and {} output states",
            povm.len(),
            outputs.len()
        )));
    }
    let n = povm[0].nrows();
    let m = outputs[0].dim();
    if povm.iter().any(|e| e.shape() != (n, n)) || outputs.iter().any(|s| s.dim() != m) {
        return Err(Error::Dimension(
            "measure_prepare: inconsistent dimensions".into(),
        ));
    }
    let mut sum = CMatrix::<T>::zeros(n, n);
    for e in povm {
        sum += e;
    }
    let defect = max_abs_diff(&sum, &CMatrix::identity(n, n));
    if defect > tol::<T>(1e-9) {
        return Err(Error::Validity(format!(
            "POVM is incomplete (defect {defect})"
        )));
    }
    let cut = tol::<T>(1e-14);
    let mut kraus = Vec::new();
    for (e, sigma) in povm.iter().zip(outputs) {
        let check = is_psd(e, tol::<T>(1e-9))?;
        if !check.is_psd {
            return Err(Error::Validity(format!(
                "POVM effect has negative eigenvalue {}",
                check.witness
            )));
        }
        let ee = eig_sorted(hermitian_part(e))?;
        let se = sigma.eig()?;
        for j in 0..se.dim() {
            let mu = se.values[j];
            if mu <= cut {
                continue;
            }
            for k in 0..ee.dim() {
                let w = ee.values[k];
                if w <= cut {
                    continue;
                }
                let s = Complex::from((mu * w).sqrt());
                let phi = se.vectors.column(j);
                let mk = ee.vectors.column(k);
                kraus.push(phi * mk.adjoint() * s);
            }
        }
    }
    Channel::new(
        kraus,
        format!("measure_prepare({}->{m}, {} outcomes)", n, povm.len()),
    )
}

/// Computational-basis measurement followed by preparation of the
/// corresponding output state.
pub fn basis_measure_prepare<T: Real>(outputs: &[DensityMatrix<T>]) -> Result<Channel<T>> {
    let n = outputs.len();
    let povm: Vec<CMatrix<T>> = (0..n)
        .map(|i| {
            let mut e = CMatrix::zeros(n, n);
            e[(i, i)] = Complex::from(T::one());
            e
        })
        .collect();
    measure_prepare(&povm, outputs)
}

/// Partial-trace channel keeping the listed factors.
pub fn partial_trace_channel<T: Real>(
    shape: &SubsystemShape,
    keep: &[usize],
) -> Result<Channel<T>> {
    let dims = shape.factor_dims();
    if keep.is_empty()
        || keep.windows(2).any(|w| w[0] >= w[1])
        || keep.iter().any(|&k| k >= dims.len())
    {
        return Err(Error::Dimension(format!(
            "partial_trace_channel: keep set {keep:?} invalid for shape {shape}"
        )));
    }
    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let offsets = |factors: &[usize]| {
        let mut out = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(out.len() * dims[f]);
            for &b in &out {
                for i in 0..dims[f] {
                    next.push(b + i * st[f]);
                }
            }
            out = next;
        }
        out
    };
    let kept_off = offsets(keep);
    let traced_off = offsets(&traced);
    let total = shape.total();
    let kraus = traced_off
        .iter()
        .map(|&t| {
            let mut k = CMatrix::zeros(kept_off.len(), total);
            for (r, &o) in kept_off.iter().enumerate() {
                k[(r, o + t)] = Complex::from(T::one());
            }
            k
        })
        .collect();
    let kept: Vec<String> = keep.iter().map(|k| k.to_string()).collect();
    Channel::new(kraus, format!("trace({shape}; keep {})", kept.join(",")))
}
