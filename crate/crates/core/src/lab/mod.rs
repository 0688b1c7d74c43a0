//! Numerical checks of the superadditivity inequality for the convex roof
//! and the companion χ-subadditivity inequality.
//!
//! Every reported value carries a [`BoundDir`]: the roof optimiser only
//! produces upper bounds, χ obtained from a roof is therefore a lower bound,
//! and output entropies are exact. The verdict logic consumes these tags, so
//! a negative margin is never reported as a violation on the strength of
//! one-sided numerics it cannot support.
//!
//! Reports are oriented so that `lhs ≥ rhs` is the expected inequality and
//! `margin = lhs − rhs`.

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::quantum::{DensityMatrix, SubsystemShape};
use crate::roof::{
    ccooe, min_output_entropy, output_entropy, MinOutputResult, RoofOptions, RoofResult,
};
use crate::{Error, Result};

mod probes;
mod scan;
mod truncation;

pub use probes::{
    complement_roof_gap, complementary_transfer_probe, continuity_probe, ContinuityRow,
    ContinuityTable, PerturbationSchedule, TransferReport, TransferRow,
};
pub use scan::{
    scan_random, scan_random_kind, ChannelGenerator, FlaggedCase, ScanReport, ScanSummary,
};
pub use truncation::{
    truncation_experiment, ProjectorChoice, TruncationOptions, TruncationRow, TruncationStep,
    TruncationTrace,
};

/// What a computed value is known to be relative to the true quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDir {
    Exact,
    Upper,
    Lower,
}

impl std::fmt::Display for BoundDir {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Upper => "upper",
            Self::Lower => "lower",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconclusive,
    Flagged,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Consistent => "consistent",
            Self::Inconclusive => "inconclusive",
            Self::Flagged => "flagged",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    /// `Ĥ_{Φ⊗Ψ}(ω) ≥ Ĥ_Φ(ω_1) + Ĥ_Ψ(ω_2)`.
    Superadditivity,
    /// `χ_Φ(ω_1) + χ_Ψ(ω_2) ≥ χ_{Φ⊗Ψ}(ω)`.
    ChiSubadditivity,
    /// `Ĥ_{Φ⊗Ψ}(ω) ≥ max(Ĥ_Φ(ω_1), Ĥ_Ψ(ω_2))`.
    Corollary,
    /// `H_min(Φ⊗Ψ) ≥ max(H_min(Φ), H_min(Ψ))`.
    CorollaryMinOutput,
}

/// One ingredient of a report, with optimiser diagnostics where relevant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value: f64,
    pub bound: BoundDir,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts_used: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_restart_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

impl Term {
    fn exact(name: &str, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: BoundDir::Exact,
            restarts_used: None,
            best_restart_index: None,
            gradient_norm: None,
            converged: None,
        }
    }

    fn roof(name: &str, r: &RoofResult<f64>) -> Self {
        Self {
            name: name.into(),
            value: r.value,
            bound: BoundDir::Upper,
            restarts_used: Some(r.restarts_used),
            best_restart_index: Some(r.best_restart_index),
            gradient_norm: Some(r.gradient_norm_at_exit),
            converged: Some(r.converged),
        }
    }

    fn min_output(name: &str, r: &MinOutputResult<f64>) -> Self {
        Self {
            name: name.into(),
            value: r.value,
            bound: BoundDir::Upper,
            restarts_used: Some(r.restarts_used),
            best_restart_index: Some(r.best_restart_index),
            gradient_norm: None,
            converged: Some(r.converged),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub item: usize,
    pub kind: ReportKind,
    pub channels: Vec<String>,
    pub state: String,
    pub lhs: f64,
    pub lhs_bound_dir: BoundDir,
    pub rhs: f64,
    pub rhs_bound_dir: BoundDir,
    pub margin: f64,
    pub verdict: Verdict,
    /// Whether the values come from the doubled-restart refinement pass.
    pub refined: bool,
    pub tolerance: f64,
    pub terms: Vec<Term>,
}

/// Flat row for CSV output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub item: usize,
    pub lhs: f64,
    pub lhs_bound_dir: BoundDir,
    pub rhs: f64,
    pub rhs_bound_dir: BoundDir,
    pub margin: f64,
    pub verdict: Verdict,
}

impl AdditivityReport {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: ReportKind,
        channels: Vec<String>,
        state: String,
        (lhs, lhs_bound_dir): (f64, BoundDir),
        (rhs, rhs_bound_dir): (f64, BoundDir),
        terms: Vec<Term>,
        tolerance: f64,
        refined: bool,
    ) -> Self {
        let margin = lhs - rhs;
        let verdict = verdict_for(margin, lhs_bound_dir, rhs_bound_dir, tolerance);
        Self {
            item: 0,
            kind,
            channels,
            state,
            lhs,
            lhs_bound_dir,
            rhs,
            rhs_bound_dir,
            margin,
            verdict,
            refined,
            tolerance,
            terms,
        }
    }

    pub fn with_item(mut self, item: usize) -> Self {
        self.item = item;
        self
    }

    pub fn with_state(mut self, state: impl Into<String>) -> Self {
        self.state = state.into();
        self
    }

    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    /// A negative margin that only a refinement pass can settle.
    fn needs_refinement(&self) -> bool {
        self.verdict == Verdict::Flagged && !self.refined
    }

    pub fn row(&self) -> ReportRow {
        ReportRow {
            item: self.item,
            lhs: self.lhs,
            lhs_bound_dir: self.lhs_bound_dir,
            rhs: self.rhs,
            rhs_bound_dir: self.rhs_bound_dir,
            margin: self.margin,
            verdict: self.verdict,
        }
    }
}

/// Verdict for an expected `lhs ≥ rhs` given the estimates' directions.
///
/// A lower-bound `lhs` against an upper-bound `rhs` can drift apart in the
/// "wrong" direction purely from optimiser slack, so such margins are
/// inconclusive. In every other combination a margin below `-tolerance`
/// is flagged (callers run a refinement pass before accepting that).
pub fn verdict_for(margin: f64, lhs: BoundDir, rhs: BoundDir, tolerance: f64) -> Verdict {
    if margin >= -tolerance {
        Verdict::Consistent
    } else if lhs == BoundDir::Lower && rhs == BoundDir::Upper {
        Verdict::Inconclusive
    } else {
        Verdict::Flagged
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabOptions {
    pub roof: RoofOptions,
    /// Margin tolerance in nats.
    pub tolerance: f64,
}

impl Default for LabOptions {
    fn default() -> Self {
        Self {
            roof: RoofOptions::default(),
            tolerance: 1e-3,
        }
    }
}

impl LabOptions {
    pub fn validate(&self) -> Result<()> {
        self.roof.validate()?;
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::Parameter(format!(
                "tolerance {} must be non-negative",
                self.tolerance
            )));
        }
        Ok(())
    }

    fn refined(&self) -> RoofOptions {
        // same seed: the refined run replays the original restarts and adds more
        let mut r = self.roof.clone();
        r.restarts *= 2;
        r
    }
}

/// The three reports that share one set of roof evaluations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditivityBundle {
    pub superadditivity: AdditivityReport,
    pub chi: AdditivityReport,
    pub corollary: AdditivityReport,
}

fn check_pair(
    phi: &Channel<f64>,
    psi: &Channel<f64>,
    omega: &DensityMatrix<f64>,
) -> Result<SubsystemShape> {
    let d = phi.in_dim() * psi.in_dim();
    if omega.dim() != d {
        return Err(Error::Dimension(format!(
            "state of dimension {} cannot feed {} ⊗ {} (input dimension {d})",
            omega.dim(),
            phi.label(),
            psi.label()
        )));
    }
    SubsystemShape::new(vec![phi.in_dim(), psi.in_dim()])
}

pub fn describe_state(omega: &DensityMatrix<f64>) -> String {
    match omega.rank() {
        Ok(r) => format!("dim {}, rank {r}", omega.dim()),
        Err(_) => format!("dim {}", omega.dim()),
    }
}

struct Evaluation {
    joint: RoofResult<f64>,
    first: RoofResult<f64>,
    second: RoofResult<f64>,
    h_joint: f64,
    h_first: f64,
    h_second: f64,
}

struct Pair<'a> {
    phi: &'a Channel<f64>,
    psi: &'a Channel<f64>,
    joint: Channel<f64>,
    omega: &'a DensityMatrix<f64>,
    first_marginal: DensityMatrix<f64>,
    second_marginal: DensityMatrix<f64>,
}

impl<'a> Pair<'a> {
    fn new(
        phi: &'a Channel<f64>,
        psi: &'a Channel<f64>,
        omega: &'a DensityMatrix<f64>,
    ) -> Result<Self> {
        let shape = check_pair(phi, psi, omega)?;
        Ok(Self {
            phi,
            psi,
            joint: phi.tensor(psi),
            omega,
            first_marginal: omega.partial_trace(&shape, &[0])?,
            second_marginal: omega.partial_trace(&shape, &[1])?,
        })
    }

    fn evaluate(&self, roof: &RoofOptions) -> Result<Evaluation> {
        Ok(Evaluation {
            joint: ccooe(&self.joint, self.omega, roof)?,
            first: ccooe(self.phi, &self.first_marginal, roof)?,
            second: ccooe(self.psi, &self.second_marginal, roof)?,
            h_joint: output_entropy(&self.joint, self.omega)?,
            h_first: output_entropy(self.phi, &self.first_marginal)?,
            h_second: output_entropy(self.psi, &self.second_marginal)?,
        })
    }

    fn report(
        &self,
        e: &Evaluation,
        kind: ReportKind,
        tolerance: f64,
        refined: bool,
    ) -> AdditivityReport {
        let labels = vec![self.phi.label().to_string(), self.psi.label().to_string()];
        let roofs = || {
            vec![
                Term::roof("joint", &e.joint),
                Term::roof("first", &e.first),
                Term::roof("second", &e.second),
            ]
        };
        let up = BoundDir::Upper;
        let (lhs, rhs, terms) = match kind {
            ReportKind::Superadditivity => (
                (e.joint.value, up),
                (e.first.value + e.second.value, up),
                roofs(),
            ),
            ReportKind::Corollary => (
                (e.joint.value, up),
                (e.first.value.max(e.second.value), up),
                roofs(),
            ),
            ReportKind::ChiSubadditivity => {
                let chi_joint = e.h_joint - e.joint.value;
                let chi_first = e.h_first - e.first.value;
                let chi_second = e.h_second - e.second.value;
                let mut terms = roofs();
                terms.extend([
                    Term::exact("output_entropy_joint", e.h_joint),
                    Term::exact("output_entropy_first", e.h_first),
                    Term::exact("output_entropy_second", e.h_second),
                ]);
                (
                    (chi_first + chi_second, BoundDir::Lower),
                    (chi_joint, BoundDir::Lower),
                    terms,
                )
            }
            ReportKind::CorollaryMinOutput => unreachable!("handled by corollary_min_output_check"),
        };
        AdditivityReport::assemble(
            kind,
            labels,
            describe_state(self.omega),
            lhs,
            rhs,
            terms,
            tolerance,
            refined,
        )
    }
}

fn run(
    phi: &Channel<f64>,
    psi: &Channel<f64>,
    omega: &DensityMatrix<f64>,
    opts: &LabOptions,
    kinds: &[ReportKind],
) -> Result<Vec<AdditivityReport>> {
    opts.validate()?;
    let pair = Pair::new(phi, psi, omega)?;
    let e = pair.evaluate(&opts.roof)?;
    let reports: Vec<_> = kinds
        .iter()
        .map(|&k| pair.report(&e, k, opts.tolerance, false))
        .collect();
    if !reports.iter().any(AdditivityReport::needs_refinement) {
        return Ok(reports);
    }
    // all reports are recomputed from the refined roofs so that they stay
    // mutually consistent
    let e = pair.evaluate(&opts.refined())?;
    Ok(kinds
        .iter()
        .map(|&k| pair.report(&e, k, opts.tolerance, true))
        .collect())
}

/// Superadditivity margin `Ĥ_{Φ⊗Ψ}(ω) − Ĥ_Φ(ω_1) − Ĥ_Ψ(ω_2)` (upper vs upper).
pub fn superadditivity_margin(
    phi: &Channel<f64>,
    psi: &Channel<f64>,
    omega: &DensityMatrix<f64>,
    opts: &LabOptions,
) -> Result<AdditivityReport> {
    Ok(run(phi, psi, omega, opts, &[ReportKind::Superadditivity])?.remove(0))
}

/// χ-subadditivity margin `χ_Φ(ω_1) + χ_Ψ(ω_2) − χ_{Φ⊗Ψ}(ω)` with every χ
/// computed as output entropy minus roof (lower vs lower).
pub fn chi_subadditivity_margin(
    phi: &Channel<f64>,
    psi: &Channel<f64>,
    omega: &DensityMatrix<f64>,
    opts: &LabOptions,
) -> Result<AdditivityReport> {
    Ok(run(phi, psi, omega, opts, &[ReportKind::ChiSubadditivity])?.remove(0))
}

/// `Ĥ_{Φ⊗Ψ}(ω) − max(Ĥ_Φ(ω_1), Ĥ_Ψ(ω_2))`.
pub fn corollary_bound_check(
    phi: &Channel<f64>,
    psi: &Channel<f64>,
    omega: &DensityMatrix<f64>,
    opts: &LabOptions,
) -> Result<AdditivityReport> {
    Ok(run(phi, psi, omega, opts, &[ReportKind::Corollary])?.remove(0))
}

/// Superadditivity, χ and corollary reports from one shared set of roofs, so
/// that `chi.margin = superadditivity.margin − (H_{Φ⊗Ψ} − H_Φ − H_Ψ)` holds
/// to rounding.
pub fn additivity_reports(
    phi: &Channel<f64>,
    psi: &Channel<f64>,
    omega: &DensityMatrix<f64>,
    opts: &LabOptions,
) -> Result<AdditivityBundle> {
    let mut r = run(
        phi,
        psi,
        omega,
        opts,
        &[
            ReportKind::Superadditivity,
            ReportKind::ChiSubadditivity,
            ReportKind::Corollary,
        ],
    )?;
    let corollary = r.pop().expect("three reports");
    let chi = r.pop().expect("three reports");
    let superadditivity = r.pop().expect("three reports");
    Ok(AdditivityBundle {
        superadditivity,
        chi,
        corollary,
    })
}

/// `H_min(Φ⊗Ψ) − max(H_min(Φ), H_min(Ψ))`, all three minima being optimiser
/// upper bounds.
pub fn corollary_min_output_check(
    phi: &Channel<f64>,
    psi: &Channel<f64>,
    opts: &LabOptions,
) -> Result<AdditivityReport> {
    opts.validate()?;
    let joint = phi.tensor(psi);
    let eval = |roof: &RoofOptions| -> Result<_> {
        Ok((
            min_output_entropy(&joint, roof)?,
            min_output_entropy(phi, roof)?,
            min_output_entropy(psi, roof)?,
        ))
    };
    let build = |(j, a, b): &(
        MinOutputResult<f64>,
        MinOutputResult<f64>,
        MinOutputResult<f64>,
    ),
                 refined| {
        AdditivityReport::assemble(
            ReportKind::CorollaryMinOutput,
            vec![phi.label().to_string(), psi.label().to_string()],
            "minimum over pure inputs".into(),
            (j.value, BoundDir::Upper),
            (a.value.max(b.value), BoundDir::Upper),
            vec![
                Term::min_output("joint", j),
                Term::min_output("first", a),
                Term::min_output("second", b),
            ],
            opts.tolerance,
            refined,
        )
    };
    let report = build(&eval(&opts.roof)?, false);
    if !report.needs_refinement() {
        return Ok(report);
    }
    Ok(build(&eval(&opts.refined())?, true))
}
