//! Discretised random-phase channel `ρ ↦ ∫ U_t ρ U_t* p(t) dt` with
//! `(U_t ψ)(x) = e^{-itx} ψ(x)` on a midpoint grid of `[-a, a]`.
//!
//! On the grid the channel is a Schur multiplier: `Φ(ρ)_{jk} = B_{jk} ρ_{jk}`
//! with `B_{jk} = p̂(x_j − x_k)` the characteristic function of `p`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::{basis_measure_prepare, Channel};
use crate::entropy::{binary_entropy, fannes_audenaert_bound};
use crate::quantum::linalg::eig_sorted;
use crate::quantum::random::{random_pure_rng, rng_for};
use crate::quantum::DensityMatrix;
use crate::{lit, CMatrix, CVector, Error, Real, Result};

/// Density of the phase parameter `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PhaseDensity {
    /// Centred normal with standard deviation `s`.
    Gaussian { s: f64 },
    /// Uniform on `(-w, w)`.
    Uniform { w: f64 },
    /// Values `p` at nodes `t` with quadrature weights.
    Custom {
        t: Vec<f64>,
        p: Vec<f64>,
        weights: Vec<f64>,
    },
}

const CUSTOM_NORM_TOL: f64 = 1e-8;
// a table "has tails" when it has decayed to this level at both ends
const TAIL_EDGE: f64 = 1e-10;

impl PhaseDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian { s } if !(s.is_finite() && *s > 0.0) => Err(Error::Parameter(format!(
                "gaussian density needs s > 0, got {s}"
            ))),
            Self::Uniform { w } if !(w.is_finite() && *w > 0.0) => Err(Error::Parameter(format!(
                "uniform density needs w > 0, got {w}"
            ))),
            Self::Custom { t, p, weights } => {
                if t.is_empty() || t.len() != p.len() || t.len() != weights.len() {
                    return Err(Error::Parameter(format!(
                        "custom density: {} nodes, {} values, {} weights",
                        t.len(),
                        p.len(),
                        weights.len()
                    )));
                }
                if t.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Parameter(
                        "custom density: nodes must be increasing".into(),
                    ));
                }
                if p.iter()
                    .chain(weights)
                    .any(|v| !(v.is_finite() && *v >= 0.0))
                {
                    return Err(Error::Parameter(
                        "custom density: values and weights must be finite and non-negative".into(),
                    ));
                }
                let mass: f64 = p.iter().zip(weights).map(|(a, b)| a * b).sum();
                if (mass - 1.0).abs() > CUSTOM_NORM_TOL {
                    return Err(Error::Parameter(format!(
                        "custom density integrates to {mass}, expected 1"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Tabulates a closed-form density on `n` uniformly spaced nodes of
    /// `[lo, hi]` with trapezoid weights.
    pub fn tabulate(&self, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(lo < hi) {
            return Err(Error::Parameter("tabulate: need n ≥ 2 and lo < hi".into()));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let t: Vec<f64> = (0..n).map(|k| lo + k as f64 * h).collect();
        let p: Vec<f64> = t.iter().map(|&x| self.pdf(x)).collect::<Result<_>>()?;
        let mut weights = vec![h; n];
        weights[0] = h / 2.0;
        weights[n - 1] = h / 2.0;
        let mass: f64 = p.iter().zip(&weights).map(|(a, b)| a * b).sum();
        if mass <= 0.0 {
            return Err(Error::Resolution(
                "tabulate: density vanishes on the interval".into(),
            ));
        }
        let p = p.into_iter().map(|v| v / mass).collect();
        Ok(Self::Custom { t, p, weights })
    }

    /// `p` restricted to `[-d, d]` and renormalised, tabulated with `n` nodes.
    pub fn truncated(&self, d: f64, n: usize) -> Result<Self> {
        self.tabulate(-d, d, n)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Self::Gaussian { s } => (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt()),
            Self::Uniform { w } => {
                if x.abs() < *w {
                    0.5 / w
                } else {
                    0.0
                }
            }
            Self::Custom { t, p, .. } => interpolate(t, p, x),
        })
    }

    /// `p̂(u) = ∫ e^{-itu} p(t) dt`.
    pub fn characteristic(&self, u: f64) -> Complex<f64> {
        match self {
            Self::Gaussian { s } => Complex::new((-s * s * u * u / 2.0).exp(), 0.0),
            Self::Uniform { w } => Complex::new(sinc(w * u), 0.0),
            Self::Custom { t, p, weights } => t
                .iter()
                .zip(p)
                .zip(weights)
                .map(|((&tk, &pk), &wk)| Complex::from_polar(wk * pk, -tk * u))
                .sum(),
        }
    }

    /// Amplitude `φ` whose translates have overlaps `⟨φ_{x}|φ_{y}⟩ ∝ p̂(x−y)`:
    /// the inverse Fourier transform of `√p`, up to normalisation.
    fn dual_amplitude(&self, y: f64) -> Complex<f64> {
        match self {
            Self::Gaussian { s } => Complex::new((-s * s * y * y).exp(), 0.0),
            Self::Uniform { w } => Complex::new(w * sinc(w * y), 0.0),
            Self::Custom { t, p, weights } => t
                .iter()
                .zip(p)
                .zip(weights)
                .map(|((&tk, &pk), &wk)| Complex::from_polar(wk * pk.sqrt(), tk * y))
                .sum(),
        }
    }

    fn is_symmetric_closed_form(&self) -> bool {
        !matches!(self, Self::Custom { .. })
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn interpolate(t: &[f64], p: &[f64], x: f64) -> f64 {
    if x < t[0] || x > t[t.len() - 1] {
        return 0.0;
    }
    let i = t.partition_point(|&v| v <= x);
    if i == 0 {
        return p[0];
    }
    if i >= t.len() {
        return p[t.len() - 1];
    }
    let (t0, t1) = (t[i - 1], t[i]);
    let f = (x - t0) / (t1 - t0);
    p[i - 1] * (1.0 - f) + p[i] * f
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPhaseSpec {
    /// Half-width of the position interval.
    pub a: f64,
    /// Number of grid points.
    pub d: usize,
    pub density: PhaseDensity,
}

impl RandomPhaseSpec {
    pub fn new(a: f64, d: usize, density: PhaseDensity) -> Result<Self> {
        let spec = Self { a, d, density };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::Parameter(format!(
                "half-width a must be positive, got {}",
                self.a
            )));
        }
        if self.d == 0 {
            return Err(Error::Parameter("grid size d must be positive".into()));
        }
        self.density.validate()
    }

    /// Midpoints `x_j = -a + (j + ½)·2a/d`.
    pub fn grid(&self) -> Vec<f64> {
        let h = 2.0 * self.a / self.d as f64;
        (0..self.d)
            .map(|j| -self.a + (j as f64 + 0.5) * h)
            .collect()
    }

    pub fn with_density(&self, density: PhaseDensity) -> Self {
        Self {
            a: self.a,
            d: self.d,
            density,
        }
    }
}

/// `B_{jk} = p̂(x_j − x_k)`.
pub fn schur_matrix(spec: &RandomPhaseSpec) -> Result<DMatrix<Complex<f64>>> {
    spec.validate()?;
    let x = spec.grid();
    Ok(DMatrix::from_fn(spec.d, spec.d, |j, k| {
        spec.density.characteristic(x[j] - x[k])
    }))
}

const SCHUR_TOL: f64 = 1e-8;
const KRAUS_CLIP: f64 = 1e-12;

/// Discretised random-phase channel with diagonal Kraus operators
/// `diag(√μ_l b_l)` from the eigendecomposition `B = Σ μ_l b_l b_l*`.
pub fn random_phase_channel<T: Real>(spec: &RandomPhaseSpec) -> Result<Channel<T>> {
    let b = schur_matrix(spec)?;
    let d = spec.d;
    let diag_defect = (0..d)
        .map(|j| (b[(j, j)] - Complex::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    if diag_defect > SCHUR_TOL {
        return Err(Error::Resolution(format!(
            "Schur matrix diagonal deviates from 1 by {diag_defect:.3e}; refine the quadrature of p"
        )));
    }
    let eig = eig_sorted(crate::quantum::linalg::hermitian_part(&b))?;
    let min = eig.min_value();
    if min < -SCHUR_TOL {
        return Err(Error::Resolution(format!(
            "Schur matrix has eigenvalue {min:.3e} < 0; refine the quadrature of p"
        )));
    }
    let mut kraus = Vec::new();
    for l in 0..d {
        let mu = eig.values[l];
        if mu <= KRAUS_CLIP {
            continue;
        }
        let s = mu.sqrt();
        let diag = CVector::<T>::from_fn(d, |j, _| {
            let v = eig.vectors[(j, l)] * s;
            Complex::new(lit(v.re), lit(v.im))
        });
        kraus.push(CMatrix::from_diagonal(&diag));
    }
    Channel::new(
        kraus,
        format!(
            "phase(a={}, d={}, {})",
            spec.a,
            d,
            density_label(&spec.density)
        ),
    )
}

fn density_label(p: &PhaseDensity) -> String {
    match p {
        PhaseDensity::Gaussian { s } => format!("gaussian s={s}"),
        PhaseDensity::Uniform { w } => format!("uniform w={w}"),
        PhaseDensity::Custom { t, .. } => format!("custom {} nodes", t.len()),
    }
}

/// Sampling grid for the prepared vectors of the measure-prepare complement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualGrid {
    pub points: usize,
    pub half_width: f64,
}

impl Default for DualGrid {
    fn default() -> Self {
        Self {
            points: 64,
            half_width: 8.0,
        }
    }
}

impl DualGrid {
    pub fn nodes(&self) -> Vec<f64> {
        let h = 2.0 * self.half_width / self.points as f64;
        (0..self.points)
            .map(|m| -self.half_width + (m as f64 + 0.5) * h)
            .collect()
    }
}

/// Measure-prepare complement together with a rigorous bound on how far its
/// pure-input output entropies can be from the Schur-form channel's.
#[derive(Clone, Debug)]
pub struct MeasurePrepareComplement<T: Real> {
    pub channel: Channel<T>,
    /// `max |G_{jk} − B_{jk}|` for the Gram matrix `G` of the prepared vectors.
    pub gram_defect: f64,
    /// Entropy tolerance implied by `gram_defect` (trace-distance continuity).
    pub entropy_tolerance: f64,
}

/// Position measurement followed by preparation of the translates
/// `φ(· − x_j)` sampled on `grid`, where `φ` is the inverse Fourier
/// transform of `√p`.
///
/// For a pure input `ψ`, `Φ(ψ) = D B D*` and the complement's output has the
/// nonzero spectrum of `|D| Ḡ |D|` with `D = diag(ψ)`; so
/// `‖Ĥ(ψ) − H(ψ)‖ ≤ T ln(d−1) + h₂(T)` with `T = ‖G − B‖_op / 2`.
pub fn phase_channel_complement_mp<T: Real>(
    spec: &RandomPhaseSpec,
    grid: DualGrid,
) -> Result<MeasurePrepareComplement<T>> {
    spec.validate()?;
    if grid.points == 0 || !(grid.half_width > 0.0) {
        return Err(Error::Parameter(
            "dual grid needs points > 0 and half_width > 0".into(),
        ));
    }
    let x = spec.grid();
    let y = grid.nodes();
    let mut vectors = Vec::with_capacity(spec.d);
    for (j, &xj) in x.iter().enumerate() {
        let v: Vec<Complex<f64>> = y
            .iter()
            .map(|&ym| spec.density.dual_amplitude(ym - xj))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-150) || !norm.is_finite() {
            return Err(Error::Resolution(format!(
                "prepared vector {j} vanishes on the dual grid; widen or refine the grid"
            )));
        }
        vectors.push(v.into_iter().map(|c| c / norm).collect::<Vec<_>>());
    }
    let b = schur_matrix(spec)?;
    let gram = DMatrix::from_fn(spec.d, spec.d, |j, k| {
        vectors[j]
            .iter()
            .zip(&vectors[k])
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex<f64>>()
    });
    // spectra of |D|G|D| and |D|Ḡ|D| coincide, so compare against both B and B̄
    let defect = |target: &DMatrix<Complex<f64>>| {
        let e = &gram - target;
        let op = eig_sorted(crate::quantum::linalg::hermitian_part(&e))
            .map(|ev| ev.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .unwrap_or(f64::INFINITY);
        let max = e.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        (op, max)
    };
    let (op1, max1) = defect(&b);
    let (op2, max2) = if spec.density.is_symmetric_closed_form() {
        (op1, max1)
    } else {
        defect(&b.map(|c| c.conj()))
    };
    let (op, gram_defect) = if op1 <= op2 { (op1, max1) } else { (op2, max2) };
    let entropy_tolerance = fannes_audenaert_bound(op / 2.0, spec.d);

    let outputs: Vec<DensityMatrix<T>> = vectors
        .iter()
        .map(|v| {
            let psi = CVector::<T>::from_iterator(
                v.len(),
                v.iter().map(|c| Complex::new(lit(c.re), lit(c.im))),
            );
            DensityMatrix::from_trusted(&psi * psi.adjoint())
        })
        .collect();
    let channel = basis_measure_prepare(&outputs)?.with_label(format!(
        "phase-complement(a={}, d={}, {}, grid {}x±{})",
        spec.a,
        spec.d,
        density_label(&spec.density),
        grid.points,
        grid.half_width
    ));
    Ok(MeasurePrepareComplement {
        channel,
        gram_defect,
        entropy_tolerance,
    })
}

/// Fannes–Audenaert bound `T ln(d−1) + h₂(T)`, saturating at `ln d`.

/// `α(d) = ∫_{|t|>d} p`, `β(d) = |∫_{|t|>d} p ln p|`,
/// `γ(d) = Σ_{k≤-1} p(-d+k+1) + Σ_{k≥0} p(d+k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailQuantities {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn tail_quantities(p: &PhaseDensity, d: f64) -> Result<TailQuantities> {
    p.validate()?;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Parameter(format!(
            "tail cutoff must be positive, got {d}"
        )));
    }
    if let PhaseDensity::Custom { p: vals, .. } = p {
        let edge = vals[0].max(vals[vals.len() - 1]);
        if edge > TAIL_EDGE {
            return Err(Error::Unsupported(format!(
                "custom density is not tabulated into its tails (edge value {edge:.3e})"
            )));
        }
    }
    Ok(TailQuantities {
        alpha: tail_alpha(p, d),
        beta: tail_beta(p, d),
        gamma: tail_gamma(p, d),
    })
}

fn tail_alpha(p: &PhaseDensity, d: f64) -> f64 {
    let d = d.max(0.0);
    match p {
        PhaseDensity::Gaussian { s } => erfc(d / (s * std::f64::consts::SQRT_2)),
        PhaseDensity::Uniform { w } => (1.0 - d / w).max(0.0),
        PhaseDensity::Custom { t, p, weights } => t
            .iter()
            .zip(p)
            .zip(weights)
            .filter(|((tk, _), _)| tk.abs() > d)
            .map(|((_, pk), wk)| pk * wk)
            .sum::<f64>()
            .min(1.0),
    }
}

fn tail_beta(p: &PhaseDensity, d: f64) -> f64 {
    let d = d.max(0.0);
    match p {
        PhaseDensity::Gaussian { s } => {
            // -∫ p ln p = ln(s√2π) α + E[t²; |t|>d] / 2s², E = s²(α + 2zφ(z))
            let z = d / s;
            let alpha = erfc(z / std::f64::consts::SQRT_2);
            let phi = (-z * z / 2.0).exp() / (2.0 * PI).sqrt();
            ((s * (2.0 * PI).sqrt()).ln() * alpha + 0.5 * (alpha + 2.0 * z * phi)).abs()
        }
        PhaseDensity::Uniform { w } => (1.0 - d / w).max(0.0) * (2.0 * w).ln().abs(),
        PhaseDensity::Custom { t, p, weights } => t
            .iter()
            .zip(p)
            .zip(weights)
            .filter(|((tk, pk), _)| tk.abs() > d && **pk > 0.0)
            .map(|((_, pk), wk)| pk * pk.ln() * wk)
            .sum::<f64>()
            .abs(),
    }
}

fn tail_gamma(p: &PhaseDensity, d: f64) -> f64 {
    const TERM_CUT: f64 = 1e-14;
    const MAX_TERMS: usize = 1_000_000;
    let pdf = |x: f64| p.pdf(x).unwrap_or(0.0);
    let mut sum = 0.0;
    for sign in [-1.0, 1.0] {
        for k in 0..MAX_TERMS {
            let x = sign * (d + k as f64);
            let term = pdf(x);
            sum += term;
            // past the cutoff the tails are monotone, so a negligible term ends the sum
            if term < TERM_CUT {
                break;
            }
        }
    }
    sum
}

/// Right side `α(d)/(1−α(d))·H + h₂(α(d)) + α(d−1)·C + β(d−1)`.
pub fn tail_entropy_bound(p: &PhaseDensity, d: f64, c: f64, h: f64) -> Result<f64> {
    let q = tail_quantities(p, d)?;
    if q.alpha >= 1.0 {
        return Err(Error::Parameter(format!(
            "α({d}) = {} is not below 1",
            q.alpha
        )));
    }
    if !(c >= 0.0 && h >= 0.0) {
        return Err(Error::Parameter("C and H must be non-negative".into()));
    }
    let a1 = tail_alpha(p, d - 1.0);
    let b1 = tail_beta(p, d - 1.0);
    Ok(q.alpha / (1.0 - q.alpha) * h + binary_entropy(q.alpha)? + a1 * c + b1)
}

/// Empirical estimate of `C = sup_ψ H(∫_0^1 U_t ψψ* U_t* dt)` on the grid of
/// `spec`: the integral is the uniform channel with `w = ½` up to a diagonal
/// unitary, maximised over `samples` random pure states.
pub fn estimate_entropy_constant(spec: &RandomPhaseSpec, samples: usize, seed: u64) -> Result<f64> {
    let unif = spec.with_density(PhaseDensity::Uniform { w: 0.5 });
    let ch = random_phase_channel::<f64>(&unif)?;
    let mut rng = rng_for(seed, 0);
    let mut best = 0.0f64;
    for _ in 0..samples.max(1) {
        let psi = random_pure_rng::<f64, _>(&mut rng, spec.d)?.to_density();
        best = best.max(ch.output_entropy(&psi)?);
    }
    // the uniform superposition is a natural maximiser candidate
    let flat = crate::quantum::PureState::normalized(CVector::from_element(
        spec.d,
        Complex::new(1.0, 0.0),
    ))?;
    best = best.max(ch.output_entropy(&flat.to_density())?);
    let _ = rng.gen::<u8>();
    Ok(best)
}
