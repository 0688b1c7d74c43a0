//! Seeded batch scans over random channel pairs and input states.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{corollary_min_output_check, AdditivityReport, LabOptions, ReportKind, Verdict};
use crate::channels::{measure_prepare, random_phase_channel, Channel, RandomPhaseSpec};
use crate::json::{ChannelJson, MatrixJson};
use crate::quantum::random::{random_density_rng, random_isometry_rng, rng_for};
use crate::roof::RoofOptions;
use crate::{CMatrix, Error, Result};

/// Channel family a scan draws from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelGenerator {
    Noiseless {
        dim: usize,
    },
    Depolarizing {
        dim: usize,
    },
    /// Qubit dephasing; `q` drawn uniformly from `[0, 1)` when absent.
    Dephasing {
        #[serde(default)]
        q: Option<f64>,
    },
    RandomStinespring {
        in_dim: usize,
        out_dim: usize,
        env_dim: usize,
    },
    /// Rank-one random POVM with `outcomes ≥ dim` elements followed by random
    /// state preparation (entanglement breaking).
    MeasurePrepare {
        dim: usize,
        outcomes: usize,
        out_dim: usize,
    },
    Phase {
        spec: RandomPhaseSpec,
    },
}

impl ChannelGenerator {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Channel<f64>> {
        match self {
            Self::Noiseless { dim } => positive(*dim, "dim").map(Channel::noiseless),
            Self::Depolarizing { dim } => {
                positive(*dim, "dim").map(Channel::completely_depolarizing)
            }
            Self::Dephasing { q } => Channel::dephasing(q.unwrap_or_else(|| rng.gen())),
            Self::RandomStinespring {
                in_dim,
                out_dim,
                env_dim,
            } => Channel::random_stinespring(rng, *in_dim, *out_dim, *env_dim),
            Self::MeasurePrepare {
                dim,
                outcomes,
                out_dim,
            } => {
                positive(*dim, "dim")?;
                positive(*out_dim, "out_dim")?;
                if outcomes < dim {
                    return Err(Error::Parameter(format!(
                        "measure_prepare: {outcomes} outcomes cannot form a rank-one POVM on dimension {dim}"
                    )));
                }
                let v: CMatrix<f64> = random_isometry_rng(rng, *outcomes, *dim);
                let povm: Vec<CMatrix<f64>> = (0..*outcomes)
                    .map(|m| {
                        let row = v.row(m).adjoint();
                        &row * row.adjoint()
                    })
                    .collect();
                let states = (0..*outcomes)
                    .map(|_| {
                        let rank = rng.gen_range(1..=*out_dim);
                        random_density_rng(rng, *out_dim, rank)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(measure_prepare(&povm, &states)?.with_label(format!(
                    "measure_prepare({dim}->{out_dim},{outcomes} outcomes)"
                )))
            }
            Self::Phase { spec } => random_phase_channel(spec),
        }
    }
}

fn positive(d: usize, what: &str) -> Result<usize> {
    if d == 0 {
        return Err(Error::Parameter(format!("{what} must be positive")));
    }
    Ok(d)
}

/// Everything needed to replay one flagged item.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaggedCase {
    pub item: usize,
    pub phi: ChannelJson,
    pub psi: ChannelJson,
    /// Absent for the minimal-output-entropy check, which has no input state.
    pub omega: Option<MatrixJson>,
    pub roof: RoofOptions,
    pub report: AdditivityReport,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub count: usize,
    pub min_margin: Option<f64>,
    pub mean_margin: Option<f64>,
    pub flagged: usize,
    pub inconclusive: usize,
    pub refined: usize,
}

impl ScanSummary {
    pub fn of(reports: &[AdditivityReport]) -> Self {
        let n = reports.len();
        let count_of = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
        Self {
            count: n,
            min_margin: reports.iter().map(|r| r.margin).reduce(f64::min),
            mean_margin: (n > 0).then(|| reports.iter().map(|r| r.margin).sum::<f64>() / n as f64),
            flagged: count_of(Verdict::Flagged),
            inconclusive: count_of(Verdict::Inconclusive),
            refined: reports.iter().filter(|r| r.refined).count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub kind: ReportKind,
    pub seed: u64,
    pub reports: Vec<AdditivityReport>,
    pub summary: ScanSummary,
    pub flagged_cases: Vec<FlaggedCase>,
}

/// Superadditivity scan; see [`scan_random_kind`].
pub fn scan_random(
    phi: &ChannelGenerator,
    psi: &ChannelGenerator,
    n: usize,
    seed: u64,
    opts: &LabOptions,
) -> Result<ScanReport> {
    scan_random_kind(ReportKind::Superadditivity, phi, psi, n, seed, opts)
}

/// Item `i` draws both channels, a random-rank input state and the roof seed
/// from stream `i` of `seed`, so batches are reproducible and independent of
/// scheduling.
pub fn scan_random_kind(
    kind: ReportKind,
    phi: &ChannelGenerator,
    psi: &ChannelGenerator,
    n: usize,
    seed: u64,
    opts: &LabOptions,
) -> Result<ScanReport> {
    opts.validate()?;
    let items = (0..n)
        .into_par_iter()
        .map(|i| scan_item(kind, phi, psi, i, seed, opts))
        .collect::<Result<Vec<_>>>()?;
    let (reports, cases): (Vec<_>, Vec<_>) = items.into_iter().unzip();
    Ok(ScanReport {
        kind,
        seed,
        summary: ScanSummary::of(&reports),
        flagged_cases: cases.into_iter().flatten().collect(),
        reports,
    })
}

fn scan_item(
    kind: ReportKind,
    gen_phi: &ChannelGenerator,
    gen_psi: &ChannelGenerator,
    item: usize,
    seed: u64,
    opts: &LabOptions,
) -> Result<(AdditivityReport, Option<FlaggedCase>)> {
    let mut rng = rng_for(seed, item as u64);
    let phi = gen_phi.sample(&mut rng)?;
    let psi = gen_psi.sample(&mut rng)?;
    let d = phi.in_dim() * psi.in_dim();
    let rank = rng.gen_range(1..=d);
    let omega = random_density_rng::<f64, _>(&mut rng, d, rank)?;
    let o = LabOptions {
        roof: opts.roof.clone().with_seed(rng.gen()),
        tolerance: opts.tolerance,
    };
    let (report, omega) = if kind == ReportKind::CorollaryMinOutput {
        (corollary_min_output_check(&phi, &psi, &o)?, None)
    } else {
        let r = super::run(&phi, &psi, &omega, &o, &[kind])?.remove(0);
        (
            r.with_state(format!("random, dim {d}, rank {rank}")),
            Some(omega),
        )
    };
    let report = report.with_item(item);
    let case = (report.verdict == Verdict::Flagged).then(|| FlaggedCase {
        item,
        phi: ChannelJson::from_channel(&phi),
        psi: ChannelJson::from_channel(&psi),
        omega: omega.as_ref().map(crate::json::density_to_json),
        roof: o.roof.clone(),
        report: report.clone(),
    });
    Ok((report, case))
}
