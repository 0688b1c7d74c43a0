//! Continuity of the roof along convergent state sequences, and transfer of
//! superadditivity to complementary channels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{superadditivity_margin, LabOptions, Verdict};
use crate::channels::Channel;
use crate::entropy::fannes_audenaert_bound;
use crate::quantum::linalg::trace_norm;
use crate::quantum::random::{random_density, random_density_rng, rng_for};
use crate::quantum::DensityMatrix;
use crate::roof::{ccooe, RoofOptions};
use crate::Result;

/// Roof-column trend tolerance.
const TREND_SLACK: f64 = 5e-3;
/// Agreement required between `Ĥ_Φ` and `Ĥ_{Φ̂}`.
const ROOF_AGREEMENT: f64 = 5e-3;

/// Sequence `ρ_n → ρ_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSchedule {
    /// `ρ_n = ρ_0`.
    Constant,
    /// `ρ_n = (1 − 1/n) ρ_0 + σ/n` with `σ` a seeded full-rank random state.
    RandomMixture { seed: u64 },
}

impl Default for PerturbationSchedule {
    fn default() -> Self {
        Self::RandomMixture { seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub n: usize,
    /// `‖ρ_n − ρ_0‖₁`.
    pub distance: f64,
    /// `|H_Φ(ρ_n) − H_Φ(ρ_0)|`.
    pub entropy_gap: f64,
    /// Fannes–Audenaert bound on `entropy_gap` from the output distance.
    pub entropy_gap_bound: f64,
    /// `|Ĥ(ρ_n) − Ĥ(ρ_0)|` between upper-bound estimates.
    pub roof_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityTable {
    pub channel: String,
    pub schedule: PerturbationSchedule,
    pub roof_at_target: f64,
    pub rows: Vec<ContinuityRow>,
    /// Every entropy gap lies within its continuity bound.
    pub entropy_within_bound: bool,
    /// 3-point moving median of the roof column is non-increasing within 5e-3.
    pub roof_trend_ok: bool,
}

fn moving_median(xs: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 2).min(xs.len());
            let mut w = xs[lo..hi].to_vec();
            w.sort_by(f64::total_cmp);
            w[w.len() / 2]
        })
        .collect()
}

pub fn continuity_probe(
    channel: &Channel<f64>,
    target: &DensityMatrix<f64>,
    length: usize,
    schedule: PerturbationSchedule,
    roof: &RoofOptions,
) -> Result<ContinuityTable> {
    let sigma = match schedule {
        PerturbationSchedule::Constant => target.clone(),
        PerturbationSchedule::RandomMixture { seed } => {
            random_density(target.dim(), target.dim(), seed)?
        }
    };
    let out0 = channel.apply(target)?;
    let h0 = crate::entropy::von_neumann_entropy(&out0)?;
    let roof0 = ccooe(channel, target, roof)?.value;
    let mut rows = Vec::with_capacity(length);
    for n in 1..=length {
        let rho = target.mix(&sigma, 1.0 - 1.0 / n as f64)?;
        let out = channel.apply(&rho)?;
        let out_distance = trace_norm(&(out.matrix() - out0.matrix()))?;
        rows.push(ContinuityRow {
            n,
            distance: trace_norm(&(rho.matrix() - target.matrix()))?,
            entropy_gap: (crate::entropy::von_neumann_entropy(&out)? - h0).abs(),
            entropy_gap_bound: fannes_audenaert_bound(out_distance / 2.0, channel.out_dim()),
            roof_gap: (ccooe(channel, &rho, roof)?.value - roof0).abs(),
        });
    }
    let med = moving_median(&rows.iter().map(|r| r.roof_gap).collect::<Vec<_>>());
    Ok(ContinuityTable {
        channel: channel.label().to_string(),
        schedule,
        roof_at_target: roof0,
        entropy_within_bound: rows
            .iter()
            .all(|r| r.entropy_gap <= r.entropy_gap_bound + 1e-12),
        roof_trend_ok: med.windows(2).all(|w| w[1] <= w[0] + TREND_SLACK),
        rows,
    })
}

/// `(Ĥ_Φ(ρ), Ĥ_{Φ̂}(ρ))`, equal in exact arithmetic.
pub fn complement_roof_gap(
    channel: &Channel<f64>,
    rho: &DensityMatrix<f64>,
    roof: &RoofOptions,
) -> Result<(f64, f64)> {
    Ok((
        ccooe(channel, rho, roof)?.value,
        ccooe(&channel.complementary(), rho, roof)?.value,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub item: usize,
    pub margin: f64,
    pub verdict: Verdict,
    pub margin_complement: f64,
    pub verdict_complement: Verdict,
    /// `Ĥ_Φ(ω_1)` and `Ĥ_{Φ̂}(ω_1)`.
    pub roof_first: f64,
    pub roof_first_complement: f64,
    pub roof_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub channels: Vec<String>,
    pub seed: u64,
    pub rows: Vec<TransferRow>,
    pub max_roof_gap: f64,
    /// `max_roof_gap ≤ 5e-3`.
    pub roof_agreement: bool,
}

/// Superadditivity margins for `(Φ, Ψ)` and `(Φ̂, Ψ̂)` on `samples` random
/// states; item `i` draws its state and roof seed from stream `i` of `seed`.
pub fn complementary_transfer_probe(
    phi: &Channel<f64>,
    psi: &Channel<f64>,
    samples: usize,
    seed: u64,
    opts: &LabOptions,
) -> Result<TransferReport> {
    opts.validate()?;
    let (phi_c, psi_c) = (phi.complementary(), psi.complementary());
    let d = phi.in_dim() * psi.in_dim();
    let mut rows = Vec::with_capacity(samples);
    for item in 0..samples {
        let mut rng = rng_for(seed, item as u64);
        let rank = rng.gen_range(1..=d);
        let omega = random_density_rng::<f64, _>(&mut rng, d, rank)?;
        let o = LabOptions {
            roof: opts.roof.clone().with_seed(rng.gen()),
            tolerance: opts.tolerance,
        };
        let direct = superadditivity_margin(phi, psi, &omega, &o)?;
        let dual = superadditivity_margin(&phi_c, &psi_c, &omega, &o)?;
        let a = direct.term("first").map_or(f64::NAN, |t| t.value);
        let b = dual.term("first").map_or(f64::NAN, |t| t.value);
        rows.push(TransferRow {
            item,
            margin: direct.margin,
            verdict: direct.verdict,
            margin_complement: dual.margin,
            verdict_complement: dual.verdict,
            roof_first: a,
            roof_first_complement: b,
            roof_gap: (a - b).abs(),
        });
    }
    let max_roof_gap = rows.iter().map(|r| r.roof_gap).fold(0.0, f64::max);
    Ok(TransferReport {
        channels: vec![phi.label().to_string(), psi.label().to_string()],
        seed,
        rows,
        max_roof_gap,
        roof_agreement: max_roof_gap <= ROOF_AGREEMENT,
    })
}
