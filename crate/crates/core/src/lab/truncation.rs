//! Finite-rank truncation of a state on `H ⊗ L ⊗ K ⊗ N` with `Φ = Tr_L`,
//! `Ψ = Tr_N`, tracking the operator inequality
//! `(P⊗Q) Φ⊗Ψ(ω) (P⊗Q) / Tr Wω ≥ Φ⊗Ψ(ω_n)` and the entropy bound it implies.

use serde::{Deserialize, Serialize};

use crate::channels::partial_trace_channel;
use crate::entropy::von_neumann_entropy;
use crate::quantum::random::{random_unitary_rng, rng_for};
use crate::quantum::{
    hermitian_eig, truncate_state, DensityMatrix, SubsystemShape, TruncationProjector,
};
use crate::roof::{ccooe, RoofOptions};
use crate::{CMatrix, Error, Result};

/// How the nested per-factor projectors are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProjectorChoice {
    /// Top eigenvectors of each single-factor marginal of `ω`.
    #[default]
    TopMarginal,
    /// Leading columns of a seeded Haar unitary per factor.
    Random { seed: u64 },
    /// First `n` computational basis vectors, i.e. the energy-sorted choice
    /// for a diagonal Hamiltonian with increasing levels.
    ComputationalBasis,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationOptions {
    pub projectors: ProjectorChoice,
    /// Also estimate the roof of `Φ⊗Ψ` at each `ω_n` (slow for 16-dim inputs).
    pub roof: Option<RoofOptions>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationStep {
    pub n: usize,
    pub ranks: Vec<usize>,
    /// `Tr W_n ω`.
    pub weight: f64,
    /// The projected weight fell below `1e-12`; the remaining fields are empty.
    pub degenerate: bool,
    /// `H(Φ⊗Ψ(ω_n))`.
    pub output_entropy: Option<f64>,
    /// `H(Φ⊗Ψ(ω)) / Tr W_n ω`.
    pub entropy_bound: Option<f64>,
    pub roof: Option<f64>,
    /// Smallest eigenvalue of the operator-inequality residual.
    pub lambda_min: Option<f64>,
}

/// CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationRow {
    pub n: usize,
    pub weight: f64,
    #[serde(rename = "H_n")]
    pub h_n: Option<f64>,
    pub roof_n: Option<f64>,
    pub lambda_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationTrace {
    pub factor_dims: Vec<usize>,
    pub projectors: ProjectorChoice,
    /// `H(Φ⊗Ψ(ω))`.
    pub untruncated_entropy: f64,
    pub steps: Vec<TruncationStep>,
}

impl TruncationTrace {
    pub fn rows(&self) -> Vec<TruncationRow> {
        self.steps
            .iter()
            .map(|s| TruncationRow {
                n: s.n,
                weight: s.weight,
                h_n: s.output_entropy,
                roof_n: s.roof,
                lambda_min: s.lambda_min,
            })
            .collect()
    }

    pub fn weights_monotone(&self, slack: f64) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[1].weight >= w[0].weight - slack)
    }

    /// Smallest residual eigenvalue over the non-degenerate steps.
    pub fn min_lambda(&self) -> Option<f64> {
        self.steps
            .iter()
            .filter_map(|s| s.lambda_min)
            .reduce(f64::min)
    }

    /// Largest `H(Φ⊗Ψ(ω_n)) − H(Φ⊗Ψ(ω))/Tr W_n ω`; non-positive when the
    /// entropy bound holds.
    pub fn worst_entropy_excess(&self) -> Option<f64> {
        self.steps
            .iter()
            .filter_map(|s| Some(s.output_entropy? - s.entropy_bound?))
            .reduce(f64::max)
    }
}

fn frames(
    omega: &DensityMatrix<f64>,
    shape: &SubsystemShape,
    ranks: &[usize],
    choice: ProjectorChoice,
) -> Result<TruncationProjector<f64>> {
    match choice {
        ProjectorChoice::TopMarginal => TruncationProjector::top_marginal(omega, shape, ranks),
        ProjectorChoice::Random { seed } => {
            // the same unitaries at every n keep the projectors nested
            let f = shape
                .factor_dims()
                .iter()
                .zip(ranks)
                .enumerate()
                .map(|(k, (&d, &r))| {
                    let u = random_unitary_rng::<f64, _>(&mut rng_for(seed, k as u64), d);
                    u.columns(0, r).into_owned()
                })
                .collect();
            TruncationProjector::new(f)
        }
        ProjectorChoice::ComputationalBasis => TruncationProjector::new(
            shape
                .factor_dims()
                .iter()
                .zip(ranks)
                .map(|(&d, &r)| CMatrix::identity(d, r))
                .collect(),
        ),
    }
}

/// Runs the truncation sequence for ascending `ranks`; factor `k` uses rank
/// `min(n, dim_k)` at step `n`.
pub fn truncation_experiment(
    omega: &DensityMatrix<f64>,
    shape: &SubsystemShape,
    ranks: &[usize],
    opts: &TruncationOptions,
) -> Result<TruncationTrace> {
    if shape.num_factors() != 4 {
        return Err(Error::Dimension(format!(
            "truncation needs a four-factor shape H⊗L⊗K⊗N, got {shape}"
        )));
    }
    shape.check(omega.dim())?;
    if ranks.is_empty() || ranks[0] == 0 || ranks.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter(format!(
            "ranks {ranks:?} must be a non-empty ascending list of positive integers"
        )));
    }
    let max_dim = shape.factor_dims().iter().copied().max().unwrap_or(1);
    if let Some(&n) = ranks.iter().find(|&&n| n > max_dim) {
        return Err(Error::Parameter(format!(
            "rank {n} exceeds every factor dimension of {shape}"
        )));
    }
    if let Some(r) = &opts.roof {
        r.validate()?;
    }

    let keep = [0, 2];
    let out = omega.partial_trace(shape, &keep)?;
    let h = von_neumann_entropy(&out)?;
    let joint = match &opts.roof {
        Some(_) => Some(partial_trace_channel::<f64>(shape, &keep)?),
        None => None,
    };

    let mut steps = Vec::with_capacity(ranks.len());
    for &n in ranks {
        let rk: Vec<usize> = shape.factor_dims().iter().map(|&d| n.min(d)).collect();
        let w = frames(omega, shape, &rk, opts.projectors)?;
        let (omega_n, weight) = match truncate_state(omega, &w) {
            Ok(t) => t,
            Err(Error::DegenerateTruncation { weight }) => {
                steps.push(TruncationStep {
                    n,
                    ranks: rk,
                    weight,
                    degenerate: true,
                    output_entropy: None,
                    entropy_bound: None,
                    roof: None,
                    lambda_min: None,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let out_n = omega_n.partial_trace(shape, &keep)?;
        let pq = w.sub_projector(&keep);
        let residual =
            &pq * out.matrix() * &pq / nalgebra::Complex::new(weight, 0.0) - out_n.matrix();
        let lambda_min = hermitian_eig(&residual)?.min_value();
        let roof = match (&joint, &opts.roof) {
            (Some(ch), Some(r)) => Some(ccooe(ch, &omega_n, r)?.value),
            _ => None,
        };
        steps.push(TruncationStep {
            n,
            ranks: rk,
            weight,
            degenerate: false,
            output_entropy: Some(von_neumann_entropy(&out_n)?),
            entropy_bound: Some(h / weight),
            roof,
            lambda_min: Some(lambda_min),
        });
    }
    Ok(TruncationTrace {
        factor_dims: shape.factor_dims().to_vec(),
        projectors: opts.projectors,
        untruncated_entropy: h,
        steps,
    })
}
