//! Execution of a resolved [`RunConfig`].

use anyhow::{bail, Context, Result};
use roofkit::channels::{
    estimate_entropy_constant, phase_channel_complement_mp, random_phase_channel,
    tail_entropy_bound, tail_quantities, DualGrid, RandomPhaseSpec,
};
use roofkit::entropy::{gibbs_state, power_trace, to_bits, von_neumann_entropy, EnergyConstraint};
use roofkit::json::{density_to_json, RoofResultJson};
use roofkit::lab::{
    chi_subadditivity_margin, complementary_transfer_probe, corollary_bound_check,
    corollary_min_output_check, scan_random_kind, superadditivity_margin, truncation_experiment,
    AdditivityReport, LabOptions, TruncationOptions, Verdict,
};
use roofkit::quantum::random::{random_pure_rng, rng_for};
use roofkit::quantum::SubsystemShape;
use roofkit::roof::{ccooe, chi_direct, eof, output_entropy};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, PhaseProbe, RunConfig};
use crate::inputs;

/// Result of one command before it is wrapped into a report.
pub struct Outcome {
    pub result: Value,
    /// CSV body for tabular results.
    pub csv: Option<String>,
    /// Human-readable lines.
    pub summary: Vec<String>,
    /// Flagged verdicts or violated invariants (exit code 2).
    pub flagged: bool,
}

impl Outcome {
    fn new(result: impl Serialize) -> Result<Self> {
        Ok(Self {
            result: serde_json::to_value(result)?,
            csv: None,
            summary: Vec::new(),
            flagged: false,
        })
    }

    fn table<R: Serialize>(mut self, rows: &[R]) -> Result<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        self.csv = Some(String::from_utf8(w.into_inner()?)?);
        Ok(self)
    }

    fn line(mut self, s: impl Into<String>) -> Self {
        self.summary.push(s.into());
        self
    }

    fn flag(mut self, flagged: bool) -> Self {
        self.flagged |= flagged;
        self
    }
}

struct Units {
    bits: bool,
}

impl Units {
    fn show(&self, nats: f64) -> String {
        let (x, unit) = if self.bits {
            (to_bits(nats), "bits")
        } else {
            (nats, "nats")
        };
        if x != 0.0 && x.abs() < 1e-4 {
            format!("{x:.3e} {unit}")
        } else {
            format!("{x:.6} {unit}")
        }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let u = Units { bits: cfg.bits };
    let seed = cfg.seed;
    let lab = LabOptions {
        roof: cfg.roof.clone(),
        tolerance: cfg.tolerance,
    };
    match &cfg.command {
        Command::Entropy { state, lambda } => {
            let rho = inputs::state(state, seed)?;
            let s = von_neumann_entropy(&rho)?;
            let eigenvalues = rho.spectrum()?;
            let traces = lambda
                .iter()
                .map(|&l| Ok(json!({ "lambda": l, "value": power_trace(&rho, l)? })))
                .collect::<Result<Vec<_>>>()?;
            let rows: Vec<_> = eigenvalues
                .iter()
                .enumerate()
                .map(|(index, &eigenvalue)| EigenRow { index, eigenvalue })
                .collect();
            Ok(Outcome::new(json!({
                "entropy_nats": s,
                "eigenvalues": eigenvalues,
                "power_traces": traces,
                "state": density_to_json(&rho),
            }))?
            .table(&rows)?
            .line(format!("S = {}", u.show(s))))
        }
        Command::Ccooe { channel, state } => {
            let ch = inputs::channel(channel, seed)?;
            let rho = inputs::state(state, seed)?;
            let h = output_entropy(&ch, &rho)?;
            let r = ccooe(&ch, &rho, &cfg.roof)?;
            Ok(Outcome::new(json!({
                "channel": ch.label(),
                "output_entropy_nats": h,
                "roof": RoofResultJson::from_result(&r),
            }))?
            .line(format!("convex roof ≤ {} (upper bound)", u.show(r.value)))
            .line(format!("output entropy = {}", u.show(h))))
        }
        Command::Eof { state, dims } => {
            let rho = inputs::state(state, seed)?;
            let shape = SubsystemShape::new(dims.clone())?;
            let r = eof(&rho, &shape, &cfg.roof)?;
            Ok(Outcome::new(json!({
                "dims": dims,
                "roof": RoofResultJson::from_result(&r),
            }))?
            .line(format!(
                "entanglement of formation ≤ {} (upper bound)",
                u.show(r.value)
            )))
        }
        Command::Chi {
            channel,
            state,
            direct,
        } => {
            let ch = inputs::channel(channel, seed)?;
            let rho = inputs::state(state, seed)?;
            let h = output_entropy(&ch, &rho)?;
            let out = if *direct {
                let r = chi_direct(&ch, &rho, &cfg.roof)?;
                Outcome::new(json!({
                    "channel": ch.label(),
                    "route": "direct",
                    "value_nats": r.value,
                    "lower_bound": true,
                    "output_entropy_nats": h,
                    "weights": r.weights,
                    "discarded_terms": r.discarded_terms,
                    "restarts_used": r.restarts_used,
                    "converged": r.converged,
                }))?
                .line(format!("χ ≥ {} (lower bound)", u.show(r.value)))
            } else {
                let r = ccooe(&ch, &rho, &cfg.roof)?;
                Outcome::new(json!({
                    "channel": ch.label(),
                    "route": "roof",
                    "value_nats": h - r.value,
                    "lower_bound": true,
                    "output_entropy_nats": h,
                    "roof": RoofResultJson::from_result(&r),
                }))?
                .line(format!("χ ≥ {} (lower bound)", u.show(h - r.value)))
            };
            Ok(out)
        }
        Command::AdditivityMargin {
            first,
            second,
            state,
        } => {
            let (phi, psi) = (
                inputs::channel(first, seed)?,
                inputs::channel(second, seed)?,
            );
            let rho = inputs::state(state, seed)?;
            single_report(superadditivity_margin(&phi, &psi, &rho, &lab)?, &u)
        }
        Command::AdditivityChi {
            first,
            second,
            state,
        } => {
            let (phi, psi) = (
                inputs::channel(first, seed)?,
                inputs::channel(second, seed)?,
            );
            let rho = inputs::state(state, seed)?;
            single_report(chi_subadditivity_margin(&phi, &psi, &rho, &lab)?, &u)
        }
        Command::AdditivityCorollary {
            first,
            second,
            state,
        } => {
            let (phi, psi) = (
                inputs::channel(first, seed)?,
                inputs::channel(second, seed)?,
            );
            let report = match state {
                Some(s) => corollary_bound_check(&phi, &psi, &inputs::state(s, seed)?, &lab)?,
                None => corollary_min_output_check(&phi, &psi, &lab)?,
            };
            single_report(report, &u)
        }
        Command::AdditivityTruncate {
            state,
            dims,
            ranks,
            projectors,
            with_roof,
        } => {
            let rho = inputs::state(state, seed)?;
            let shape = SubsystemShape::new(dims.clone())?;
            let opts = TruncationOptions {
                projectors: *projectors,
                roof: with_roof.then(|| cfg.roof.clone()),
            };
            let t = truncation_experiment(&rho, &shape, ranks, &opts)?;
            let lambda = t.min_lambda();
            let excess = t.worst_entropy_excess();
            let broken = lambda.is_some_and(|l| l < -1e-9) || excess.is_some_and(|e| e > 1e-8);
            let rows = t.rows();
            Ok(Outcome::new(&t)?
                .table(&rows)?
                .line(format!(
                    "{} steps, final weight {:.12}, min residual eigenvalue {}",
                    t.steps.len(),
                    t.steps.last().map_or(f64::NAN, |s| s.weight),
                    lambda.map_or("n/a".into(), |l| format!("{l:.3e}"))
                ))
                .flag(broken))
        }
        Command::AdditivityScan {
            first,
            second,
            count,
            kind,
        } => {
            let s = scan_random_kind((*kind).into(), first, second, *count, seed, &lab)?;
            let rows: Vec<_> = s.reports.iter().map(AdditivityReport::row).collect();
            let line = format!(
                "{} items, min margin {}, mean margin {}, {} flagged, {} inconclusive",
                s.summary.count,
                s.summary.min_margin.map_or("n/a".into(), |m| u.show(m)),
                s.summary.mean_margin.map_or("n/a".into(), |m| u.show(m)),
                s.summary.flagged,
                s.summary.inconclusive,
            );
            let flagged = s.summary.flagged > 0;
            Ok(Outcome::new(&s)?.table(&rows)?.line(line).flag(flagged))
        }
        Command::AdditivityComplement {
            first,
            second,
            samples,
        } => {
            let (phi, psi) = (
                inputs::channel(first, seed)?,
                inputs::channel(second, seed)?,
            );
            let t = complementary_transfer_probe(&phi, &psi, *samples, seed, &lab)?;
            let flagged = !t.roof_agreement
                || t.rows.iter().any(|r| {
                    r.verdict == Verdict::Flagged || r.verdict_complement == Verdict::Flagged
                });
            Ok(Outcome::new(&t)?
                .table(&t.rows)?
                .line(format!(
                    "{} samples, max roof gap {}",
                    t.rows.len(),
                    u.show(t.max_roof_gap)
                ))
                .flag(flagged))
        }
        Command::PhaseChannel { spec, probe } => phase_channel(spec, probe, seed, &u),
        Command::Gibbs { hamiltonian, level } => {
            let h = inputs::hamiltonian(hamiltonian)?;
            let c = EnergyConstraint::new(h, *level)?;
            let g = gibbs_state(&c)?;
            Ok(Outcome::new(json!({
                "level": level,
                "beta": g.beta,
                "entropy_nats": g.entropy,
                "energy": g.energy,
                "state": density_to_json(&g.state),
            }))?
            .line(format!("β = {:.12}, S = {}", g.beta, u.show(g.entropy))))
        }
    }
}

#[derive(Serialize)]
struct EigenRow {
    index: usize,
    eigenvalue: f64,
}

fn single_report(r: AdditivityReport, u: &Units) -> Result<Outcome> {
    let line = format!(
        "lhs {} ({}), rhs {} ({}), margin {}: {}",
        u.show(r.lhs),
        r.lhs_bound_dir,
        u.show(r.rhs),
        r.rhs_bound_dir,
        u.show(r.margin),
        r.verdict
    );
    let flagged = r.verdict == Verdict::Flagged;
    Ok(Outcome::new([&r])?
        .table(&[r.row()])?
        .line(line)
        .flag(flagged))
}

#[derive(Serialize)]
struct SweepRow {
    d: usize,
    max_entropy: f64,
    mean_entropy: f64,
}

#[derive(Serialize)]
struct TailRow {
    d: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    bound: f64,
}

#[derive(Serialize)]
struct ComplementRow {
    sample: usize,
    schur: f64,
    measure_prepare: f64,
    difference: f64,
}

fn dims(d_min: usize, d_max: usize) -> Result<std::ops::RangeInclusive<usize>> {
    if d_min == 0 || d_min > d_max {
        bail!("need 1 ≤ d_min ≤ d_max, got {d_min}..{d_max}");
    }
    Ok(d_min..=d_max)
}

fn phase_channel(spec: &str, probe: &PhaseProbe, seed: u64, u: &Units) -> Result<Outcome> {
    let spec = inputs::phase_spec(spec)?;
    match *probe {
        PhaseProbe::Sweep {
            d_min,
            d_max,
            samples,
        } => {
            if samples == 0 {
                bail!("sweep needs at least one sample");
            }
            let mut rows = Vec::new();
            for d in dims(d_min, d_max)? {
                let ch = random_phase_channel::<f64>(&RandomPhaseSpec::new(
                    spec.a,
                    d,
                    spec.density.clone(),
                )?)?;
                let mut rng = rng_for(seed, d as u64);
                let mut hs = Vec::with_capacity(samples);
                for _ in 0..samples {
                    hs.push(
                        ch.output_entropy(&random_pure_rng::<f64, _>(&mut rng, d)?.to_density())?,
                    );
                }
                rows.push(SweepRow {
                    d,
                    max_entropy: hs.iter().copied().fold(0.0, f64::max),
                    mean_entropy: hs.iter().sum::<f64>() / samples as f64,
                });
            }
            let worst = rows.iter().map(|r| r.max_entropy).fold(0.0, f64::max);
            Ok(Outcome::new(json!({ "spec": spec, "rows": &rows }))?
                .table(&rows)?
                .line(format!("largest sampled output entropy {}", u.show(worst))))
        }
        PhaseProbe::Tails { d_min, d_max, c, h } => {
            let c = match c {
                Some(c) => c,
                None => estimate_entropy_constant(&spec, 64, seed)?,
            };
            let mut rows = Vec::new();
            for d in dims(d_min, d_max)? {
                let q = tail_quantities(&spec.density, d as f64)?;
                let bound = tail_entropy_bound(&spec.density, d as f64, c, h)
                    .with_context(|| format!("tail bound at d = {d}"))?;
                rows.push(TailRow {
                    d,
                    alpha: q.alpha,
                    beta: q.beta,
                    gamma: q.gamma,
                    bound,
                });
            }
            let monotone = rows.windows(2).all(|w| w[1].bound <= w[0].bound + 1e-12);
            Ok(Outcome::new(
                json!({ "spec": spec, "c": c, "h": h, "rows": &rows, "monotone": monotone }),
            )?
            .table(&rows)?
            .line(format!(
                "{} rows, bound non-increasing: {monotone}",
                rows.len()
            ))
            .flag(!monotone))
        }
        PhaseProbe::Complement {
            points,
            half_width,
            samples,
        } => {
            let ch = random_phase_channel::<f64>(&spec)?;
            let mp = phase_channel_complement_mp::<f64>(&spec, DualGrid { points, half_width })?;
            let mut rng = rng_for(seed, 0);
            let mut rows = Vec::with_capacity(samples);
            for sample in 0..samples {
                let psi = random_pure_rng::<f64, _>(&mut rng, spec.d)?.to_density();
                let a = ch.output_entropy(&psi)?;
                let b = mp.channel.output_entropy(&psi)?;
                rows.push(ComplementRow {
                    sample,
                    schur: a,
                    measure_prepare: b,
                    difference: (a - b).abs(),
                });
            }
            let worst = rows.iter().map(|r| r.difference).fold(0.0, f64::max);
            let within = worst <= mp.entropy_tolerance + 1e-9;
            Ok(Outcome::new(json!({
                "spec": spec,
                "grid": { "points": points, "half_width": half_width },
                "gram_defect": mp.gram_defect,
                "entropy_tolerance": mp.entropy_tolerance,
                "max_difference": worst,
                "within_tolerance": within,
                "rows": &rows,
            }))?
            .table(&rows)?
            .line(format!(
                "max |ΔH| {} within grid tolerance {}: {within}",
                u.show(worst),
                u.show(mp.entropy_tolerance)
            ))
            .flag(!within))
        }
    }
}
