//! Convex roof of the output entropy, the χ-function, entanglement of
//! formation and minimal output entropy.
//!
//! Decompositions of `ρ = Σ_j λ_j |e_j><e_j|` (rank `r`) are parameterised
//! by `m x r` matrices `M` with orthonormal columns: `v_i = Σ_j M_ij √λ_j e_j`.
//! The objective `Σ_i H(Φ(v_i v_i*))` uses the extended entropy, so no
//! normalisation enters the gradient. Every value returned here is an
//! upper bound on the roof: it is the average output entropy of an explicit
//! ensemble.

mod stiefel;

use nalgebra::{Complex, ComplexField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{partial_trace_channel, Channel};
use crate::entropy::{eta, relative_entropy, von_neumann_entropy};
use crate::quantum::linalg::eig_sorted;
use crate::quantum::random::{random_isometry_rng, rng_for};
use crate::quantum::{DensityMatrix, PureState, SubsystemShape};
use crate::{lit, tol, CMatrix, CVector, Error, Real, Result};

use stiefel::{
    canonical_frame, minimize, orthonormality_defect, retract, Outcome, StiefelObjective,
};

const RANK_CUT: f64 = 1e-12;
const WEIGHT_CUT: f64 = 1e-14;
const TIE: f64 = 1e-12;

/// Finite pure-state ensemble `{π_i, ψ_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<T: Real> {
    weights: Vec<T>,
    states: Vec<PureState<T>>,
}

impl<T: Real> Ensemble<T> {
    /// Weights must be positive and sum to 1 within `1e-10`.
    pub fn new(weights: Vec<T>, states: Vec<PureState<T>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::Parameter(format!(
                "ensemble: {} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::Dimension(
                "ensemble states have different dimensions".into(),
            ));
        }
        if weights.iter().any(|&w| !(w > T::zero())) {
            return Err(Error::Parameter("ensemble weights must be positive".into()));
        }
        let total = weights.iter().fold(T::zero(), |s, &w| s + w);
        if (total - T::one()).abs() > tol::<T>(1e-10) {
            return Err(Error::Parameter(format!("ensemble weights sum to {total}")));
        }
        Ok(Self { weights, states })
    }

    pub fn singleton(psi: PureState<T>) -> Self {
        Self {
            weights: vec![T::one()],
            states: vec![psi],
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState<T>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `Σ π_i |ψ_i><ψ_i|`.
    pub fn barycenter(&self) -> DensityMatrix<T> {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in self.weights.iter().zip(&self.states) {
            m += s.projector() * Complex::from(*w);
        }
        DensityMatrix::from_trusted(m)
    }

    /// Normalises the columns of `v` into an ensemble, dropping columns with
    /// squared norm `≤ 1e-14`.
    fn from_columns(v: &CMatrix<T>) -> Result<Self> {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for col in v.column_iter() {
            let w = col.iter().fold(T::zero(), |s, c| s + c.modulus_squared());
            if w > lit(WEIGHT_CUT) {
                weights.push(w);
                states.push(PureState::normalized(col.into_owned())?);
            }
        }
        let total = weights.iter().fold(T::zero(), |s, &w| s + w);
        if weights.is_empty() || !(total > T::zero()) {
            return Err(Error::Validity("ensemble has no weight".into()));
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(Self { weights, states })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoofOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// Ensemble size `m`; `None` means `rank²` capped at 64 (but never below
    /// the rank).
    pub ensemble_size: Option<usize>,
    /// Pure vectors mixed into each member by `chi_direct`.
    pub members_per_state: usize,
    pub seed: u64,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            restarts: 24,
            max_iterations: 500,
            gradient_tolerance: 1e-7,
            ensemble_size: None,
            members_per_state: 1,
            seed: 0,
        }
    }
}

impl RoofOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_ensemble_size(mut self, m: usize) -> Self {
        self.ensemble_size = Some(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Parameter("restarts must be at least 1".into()));
        }
        if !(self.gradient_tolerance.is_finite() && self.gradient_tolerance > 0.0) {
            return Err(Error::Parameter(
                "gradient tolerance must be positive".into(),
            ));
        }
        if self.members_per_state == 0 {
            return Err(Error::Parameter(
                "members_per_state must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn ensemble_size_for(&self, rank: usize) -> Result<usize> {
        self.validate()?;
        match self.ensemble_size {
            Some(m) if m < rank => Err(Error::Parameter(format!(
                "ensemble size {m} is below the rank {rank}"
            ))),
            Some(m) => Ok(m),
            None => Ok((rank * rank).min(64).max(rank)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RoofResult<T: Real> {
    /// Upper bound on the roof, in nats.
    pub value: T,
    pub ensemble: Ensemble<T>,
    pub restarts_used: usize,
    pub best_restart_index: usize,
    pub gradient_norm_at_exit: T,
    pub converged: bool,
}

/// `A = [√λ_j e_j]` over eigenvalues `> 1e-12`.
fn spectral_factor<T: Real>(rho: &DensityMatrix<T>) -> Result<CMatrix<T>> {
    let eig = rho.eig()?;
    let r = eig
        .values
        .iter()
        .filter(|&&v| v > lit(RANK_CUT))
        .count()
        .max(1);
    let mut a = eig.vectors.columns(0, r).into_owned();
    for j in 0..r {
        let s = Complex::from(eig.values[j].max(T::zero()).sqrt());
        for i in 0..a.nrows() {
            a[(i, j)] *= s;
        }
    }
    Ok(a)
}

/// Ensemble `v_i = Σ_j M_ij √λ_j e_j` from a mixing matrix with orthonormal
/// columns (`r = rank ρ` columns, `m ≥ r` rows).
pub fn ensemble_from_mixing<T: Real>(
    rho: &DensityMatrix<T>,
    m: &CMatrix<T>,
) -> Result<Ensemble<T>> {
    let a = spectral_factor(rho)?;
    let r = a.ncols();
    if m.ncols() != r || m.nrows() < r {
        return Err(Error::Parameter(format!(
            "mixing matrix is {}x{}, need m x {r} with m ≥ {r}",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = orthonormality_defect(m);
    if defect > tol::<T>(1e-6) {
        return Err(Error::Parameter(format!(
            "mixing matrix columns are not orthonormal (defect {defect})"
        )));
    }
    Ensemble::from_columns(&(&a * m.transpose()))
}

/// `Σ π_i H_Φ(ψ_i)`.
pub fn average_output_entropy<T: Real>(channel: &Channel<T>, ensemble: &Ensemble<T>) -> Result<T> {
    let mut total = T::zero();
    for (w, s) in ensemble.weights.iter().zip(&ensemble.states) {
        total += *w * channel.output_entropy(&s.to_density())?;
    }
    Ok(total)
}

/// Kraus operators stacked vertically, so `K v` holds all `K_k v` at once.
struct StackedKraus<T: Real> {
    stack: CMatrix<T>,
    out: usize,
    count: usize,
}

impl<T: Real> StackedKraus<T> {
    fn new(channel: &Channel<T>) -> Self {
        let out = channel.out_dim();
        let count = channel.env_dim();
        let mut stack = CMatrix::zeros(out * count, channel.in_dim());
        for (k, op) in channel.kraus().iter().enumerate() {
            stack
                .view_mut((k * out, 0), (out, channel.in_dim()))
                .copy_from(op);
        }
        Self { stack, out, count }
    }

    /// `Y = [K_1 v, ..., K_n v]` for one stacked column `Kv`.
    fn unstack(&self, kv: &CMatrix<T>, col: usize) -> CMatrix<T> {
        CMatrix::from_fn(self.out, self.count, |i, k| kv[(k * self.out + i, col)])
    }

    /// `H(Y Y*)` and, if requested, `G Y` with `G = ln Tr X − ln X` on the
    /// range of `X = Y Y*`. Uses `Y f(Y*Y) = f(Y Y*) Y` to work with the
    /// smaller Gram matrix.
    fn entropy(&self, y: &CMatrix<T>, with_gradient: bool) -> (T, Option<CMatrix<T>>) {
        let left = y.nrows() <= y.ncols();
        let gram = if left {
            y * y.adjoint()
        } else {
            y.adjoint() * y
        };
        let Ok(eig) = eig_sorted(gram) else {
            return (lit(f64::NAN), None);
        };
        let lam: Vec<T> = eig.values.iter().map(|&v| v.max(T::zero())).collect();
        let tr = lam.iter().fold(T::zero(), |s, &v| s + v);
        if !(tr > T::zero()) {
            return (
                T::zero(),
                with_gradient.then(|| CMatrix::zeros(y.nrows(), y.ncols())),
            );
        }
        let h = lam.iter().fold(T::zero(), |s, &v| s + eta(v)) - eta(tr);
        if !with_gradient {
            return (h, None);
        }
        let ln_tr = tr.ln();
        let f = eig.map(|v| {
            if v > T::zero() {
                ln_tr - v.ln()
            } else {
                T::zero()
            }
        });
        let gy = if left { f * y } else { y * f };
        (h, Some(gy))
    }

    /// `Σ_k K_k* z_k` for `Z = [z_1, ..., z_n]`.
    fn adjoint_sum(&self, z: &CMatrix<T>) -> CVector<T> {
        let flat = CVector::from_fn(self.out * self.count, |r, _| {
            z[(r % self.out, r / self.out)]
        });
        self.stack.adjoint() * flat
    }

    /// `(Σ_i H(Φ(v_i v_i*)), [Σ_k K_k* G_i K_k v_i]_i)` over the columns of `v`.
    fn evaluate(&self, v: &CMatrix<T>, with_gradient: bool) -> (T, Option<CMatrix<T>>) {
        let kv = &self.stack * v;
        let mut total = T::zero();
        let mut w = with_gradient.then(|| CMatrix::zeros(v.nrows(), v.ncols()));
        for i in 0..v.ncols() {
            let y = self.unstack(&kv, i);
            let (h, gy) = self.entropy(&y, with_gradient);
            total += h;
            if let (Some(w), Some(gy)) = (w.as_mut(), gy) {
                w.set_column(i, &self.adjoint_sum(&gy));
            }
        }
        (total, w)
    }
}

/// `M ↦ Σ_i H(Φ(v_i v_i*))` with `V = A Mᵀ`.
struct RoofObjective<T: Real> {
    kraus: StackedKraus<T>,
    a: CMatrix<T>,
}

impl<T: Real> StiefelObjective<T> for RoofObjective<T> {
    fn value(&self, m: &CMatrix<T>) -> T {
        self.kraus.evaluate(&(&self.a * m.transpose()), false).0
    }

    fn value_and_gradient(&self, m: &CMatrix<T>) -> (T, CMatrix<T>) {
        let (f, w) = self.kraus.evaluate(&(&self.a * m.transpose()), true);
        let w = w.expect("gradient requested");
        // row i of the gradient is (2 A* w_i)ᵀ
        let g = (self.a.adjoint() * w).transpose() * Complex::from(lit::<T>(2.0));
        (f, g)
    }
}

/// Unit vector `ψ ↦ H(Φ(ψψ*))` on `St(d, 1)`.
struct SphereObjective<T: Real> {
    kraus: StackedKraus<T>,
}

impl<T: Real> StiefelObjective<T> for SphereObjective<T> {
    fn value(&self, m: &CMatrix<T>) -> T {
        self.kraus.evaluate(m, false).0
    }

    fn value_and_gradient(&self, m: &CMatrix<T>) -> (T, CMatrix<T>) {
        let (f, w) = self.kraus.evaluate(m, true);
        (
            f,
            w.expect("gradient requested") * Complex::from(lit::<T>(2.0)),
        )
    }
}

struct Winner<T: Real> {
    outcome: Outcome<T>,
    index: usize,
    total: usize,
    any_converged: bool,
}

/// Runs the deterministic starts followed by random ones (stream = restart
/// index) and picks the lowest value, ties to the lowest index.
fn best_of<T: Real, O: StiefelObjective<T>>(
    obj: &O,
    fixed: Vec<CMatrix<T>>,
    rows: usize,
    cols: usize,
    opts: &RoofOptions,
) -> Result<Winner<T>> {
    let total = opts.restarts.max(fixed.len());
    let tolerance = lit::<T>(opts.gradient_tolerance);
    let outcomes: Vec<Outcome<T>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = match fixed.get(i) {
                Some(s) => s.clone(),
                None => random_isometry_rng::<T, _>(&mut rng_for(opts.seed, i as u64), rows, cols),
            };
            minimize(obj, start, opts.max_iterations, tolerance)
        })
        .collect();
    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if !o.value.is_finite() {
            continue;
        }
        match best {
            Some(b) if !(o.value < outcomes[b].value - lit::<T>(TIE)) => {}
            _ => best = Some(i),
        }
    }
    let index = best.ok_or(Error::NonConvergence {
        iterations: opts.max_iterations,
    })?;
    let any_converged = outcomes.iter().any(|o| o.converged);
    Ok(Winner {
        outcome: outcomes.into_iter().nth(index).expect("index in range"),
        index,
        total,
        any_converged,
    })
}

/// Upper bound on the convex roof `Ĥ_Φ(ρ)`.
pub fn ccooe<T: Real>(
    channel: &Channel<T>,
    rho: &DensityMatrix<T>,
    opts: &RoofOptions,
) -> Result<RoofResult<T>> {
    ccooe_with_starts(channel, rho, opts, &[])
}

/// As [`ccooe`], additionally descending from each supplied decomposition of
/// `ρ` (padded with zero vectors to the ensemble size). The result is never
/// worse than the best supplied ensemble.
pub fn ccooe_with_starts<T: Real>(
    channel: &Channel<T>,
    rho: &DensityMatrix<T>,
    opts: &RoofOptions,
    starts: &[Ensemble<T>],
) -> Result<RoofResult<T>> {
    if rho.dim() != channel.in_dim() {
        return Err(Error::Dimension(format!(
            "state of dimension {} for channel with input dimension {}",
            rho.dim(),
            channel.in_dim()
        )));
    }
    let a = spectral_factor(rho)?;
    let r = a.ncols();
    let m = opts.ensemble_size_for(r)?;
    let mut fixed = Vec::with_capacity(starts.len() + 1);
    for e in starts {
        fixed.push(mixing_matrix_of(&a, e, m)?);
    }
    // the eigen-decomposition is always tried first among the generic starts
    fixed.push(canonical_frame(m, r));
    let obj = RoofObjective {
        kraus: StackedKraus::new(channel),
        a: a.clone(),
    };
    let win = best_of(&obj, fixed, m, r, opts)?;
    let ensemble = Ensemble::from_columns(&(&a * win.outcome.point.transpose()))?;
    let value = average_output_entropy(channel, &ensemble)?;
    Ok(RoofResult {
        value,
        ensemble,
        restarts_used: win.total,
        best_restart_index: win.index,
        gradient_norm_at_exit: win.outcome.gradient_norm,
        converged: win.outcome.converged || win.any_converged,
    })
}

/// Rows `m_iᵀ = (A⁺ √π_i ψ_i)ᵀ`, padded with zeros and re-orthonormalised.
fn mixing_matrix_of<T: Real>(a: &CMatrix<T>, e: &Ensemble<T>, m: usize) -> Result<CMatrix<T>> {
    if e.dim() != a.nrows() {
        return Err(Error::Dimension(
            "start ensemble has the wrong dimension".into(),
        ));
    }
    if e.len() > m {
        return Err(Error::Parameter(format!(
            "start ensemble has {} members, ensemble size is {m}",
            e.len()
        )));
    }
    // A = E diag(√λ) has orthogonal columns, so A⁺ = diag(1/λ) A*
    let r = a.ncols();
    let norms: Vec<T> = (0..r)
        .map(|j| {
            a.column(j)
                .iter()
                .fold(T::zero(), |s, c| s + c.modulus_squared())
        })
        .collect();
    let mut mix = CMatrix::zeros(m, r);
    for (i, (w, s)) in e.weights.iter().zip(&e.states).enumerate() {
        let v = s.amplitudes() * Complex::from(w.sqrt());
        let coeff = a.adjoint() * v;
        for j in 0..r {
            mix[(i, j)] = coeff[j] / Complex::from(norms[j]);
        }
    }
    if orthonormality_defect(&mix) > tol::<T>(1e-6) {
        return Err(Error::Parameter(
            "start ensemble does not decompose the state".into(),
        ));
    }
    retract(&mix).ok_or_else(|| Error::Parameter("start ensemble is degenerate".into()))
}

/// Entanglement of formation: the roof of the partial trace onto the first
/// factor.
pub fn eof<T: Real>(
    omega: &DensityMatrix<T>,
    shape: &SubsystemShape,
    opts: &RoofOptions,
) -> Result<RoofResult<T>> {
    if shape.num_factors() != 2 {
        return Err(Error::Dimension(format!(
            "entanglement of formation needs two factors, got {shape}"
        )));
    }
    shape.check(omega.dim())?;
    let tr = partial_trace_channel::<T>(shape, &[0])?;
    ccooe(&tr, omega, opts)
}

/// `χ_Φ(ρ) ≥ H_Φ(ρ) − Ĥ-upper_Φ(ρ)`.
pub fn chi_from_roof<T: Real>(
    channel: &Channel<T>,
    rho: &DensityMatrix<T>,
    opts: &RoofOptions,
) -> Result<T> {
    let roof = ccooe(channel, rho, opts)?;
    Ok(channel.output_entropy(rho)? - roof.value)
}

#[derive(Clone, Debug)]
pub struct ChiDirectResult<T: Real> {
    /// Lower bound on `χ_Φ(ρ)`, in nats.
    pub value: T,
    pub weights: Vec<T>,
    pub members: Vec<DensityMatrix<T>>,
    /// Members whose relative entropy to `Φ(ρ)` was infinite and was dropped.
    pub discarded_terms: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// `−Σ_g π_g D(Φ(ρ_g) ‖ Φ(ρ))` with members `ρ_g` summing groups of
/// consecutive decomposition vectors.
struct ChiObjective<'a, T: Real> {
    channel: &'a Channel<T>,
    a: CMatrix<T>,
    group: usize,
    target: DensityMatrix<T>,
}

struct ChiTerms<T: Real> {
    value: T,
    weights: Vec<T>,
    members: Vec<DensityMatrix<T>>,
    discarded: usize,
}

impl<T: Real> ChiObjective<'_, T> {
    fn terms(&self, m: &CMatrix<T>) -> ChiTerms<T> {
        let v = &self.a * m.transpose();
        let d = v.nrows();
        let mut out = ChiTerms {
            value: T::zero(),
            weights: Vec::new(),
            members: Vec::new(),
            discarded: 0,
        };
        for start in (0..v.ncols()).step_by(self.group) {
            let end = (start + self.group).min(v.ncols());
            let block = v.columns(start, end - start);
            let rho_g = block * block.adjoint();
            let w = (0..d).fold(T::zero(), |s, i| s + rho_g[(i, i)].re);
            if w <= lit(WEIGHT_CUT) {
                continue;
            }
            let member = DensityMatrix::from_trusted(rho_g / Complex::from(w));
            let d_rel = self
                .channel
                .apply(&member)
                .and_then(|o| relative_entropy(&o, &self.target));
            match d_rel {
                Ok(x) if x.is_finite() => {
                    out.value += w * x;
                    out.weights.push(w);
                    out.members.push(member);
                }
                Ok(_) => out.discarded += 1,
                Err(_) => {
                    out.value = lit(f64::NAN);
                    return out;
                }
            }
        }
        out
    }
}

impl<T: Real> StiefelObjective<T> for ChiObjective<'_, T> {
    fn value(&self, m: &CMatrix<T>) -> T {
        -self.terms(m).value
    }
}

/// Lower bound on `χ_Φ(ρ) = sup Σ π_i D(Φ(ρ_i) ‖ Φ(ρ))` by direct
/// maximisation (finite-difference gradients).
pub fn chi_direct<T: Real>(
    channel: &Channel<T>,
    rho: &DensityMatrix<T>,
    opts: &RoofOptions,
) -> Result<ChiDirectResult<T>> {
    if rho.dim() != channel.in_dim() {
        return Err(Error::Dimension(
            "chi_direct: state and channel dimensions differ".into(),
        ));
    }
    let a = spectral_factor(rho)?;
    let r = a.ncols();
    let m = opts.ensemble_size_for(r)?;
    let obj = ChiObjective {
        channel,
        a,
        group: opts.members_per_state,
        target: channel.apply(rho)?,
    };
    let win = best_of(&obj, vec![canonical_frame(m, r)], m, r, opts)?;
    let terms = obj.terms(&win.outcome.point);
    let total = terms.weights.iter().fold(T::zero(), |s, &w| s + w);
    let weights = terms
        .weights
        .iter()
        .map(|&w| w / total.max(lit(WEIGHT_CUT)))
        .collect();
    Ok(ChiDirectResult {
        value: terms.value,
        weights,
        members: terms.members,
        discarded_terms: terms.discarded,
        restarts_used: win.total,
        converged: win.outcome.converged || win.any_converged,
    })
}

#[derive(Clone, Debug)]
pub struct MinOutputResult<T: Real> {
    /// Upper bound on `H_min(Φ)`, in nats.
    pub value: T,
    pub argmin: PureState<T>,
    pub restarts_used: usize,
    pub best_restart_index: usize,
    pub converged: bool,
}

/// Upper bound on `min_ψ H(Φ(ψψ*))`.
pub fn min_output_entropy<T: Real>(
    channel: &Channel<T>,
    opts: &RoofOptions,
) -> Result<MinOutputResult<T>> {
    opts.validate()?;
    let d = channel.in_dim();
    let obj = SphereObjective {
        kraus: StackedKraus::new(channel),
    };
    let win = best_of(&obj, vec![canonical_frame(d, 1)], d, 1, opts)?;
    let argmin = PureState::normalized(win.outcome.point.column(0).into_owned())?;
    let value = channel.output_entropy(&argmin.to_density())?;
    Ok(MinOutputResult {
        value,
        argmin,
        restarts_used: win.total,
        best_restart_index: win.index,
        converged: win.outcome.converged || win.any_converged,
    })
}

/// `S(Φ(ρ))` for convenience alongside the roof quantities.
pub fn output_entropy<T: Real>(channel: &Channel<T>, rho: &DensityMatrix<T>) -> Result<T> {
    von_neumann_entropy(&channel.apply(rho)?)
}
