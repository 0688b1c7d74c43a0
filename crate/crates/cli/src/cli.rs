use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use roofkit::lab::ProjectorChoice;
use roofkit::roof::RoofOptions;

use crate::config::{Command, Format, PhaseProbe, RunConfig, ScanKind};
use crate::inputs;

/// Output entropies, convex roofs and additivity experiments for quantum
/// channels. Values are in nats unless --bits is given (display only).
///
/// States: maximally-mixed:D, basis:D:I, bell, werner:F, random:D[:RANK],
/// random-pure:D, a JSON file or inline JSON.
/// Channels: noiseless:D, depolarizing:D, dephasing:Q, random:IN:OUT:ENV,
/// complement:<channel>, phase:<spec>, a JSON file or inline JSON.
///
/// Exit status: 0 clean, 1 error, 2 flagged findings.
/// ROOFKIT_THREADS caps the worker threads.
#[derive(Debug, Parser)]
#[command(name = "roofkit", version, verbatim_doc_comment)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random choice (states, channels, optimiser restarts).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Optimiser restarts per roof evaluation [default: 24].
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Optimiser iterations per restart [default: 500].
    #[arg(long, global = true)]
    pub max_iterations: Option<usize>,
    /// Directory for report files; without it the report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Show summaries in bits.
    #[arg(long, global = true)]
    pub bits: bool,
    /// Margin tolerance in nats for additivity verdicts.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tolerance: f64,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Von Neumann entropy, spectrum and power traces of a state.
    Entropy {
        state: String,
        /// Exponents λ ∈ (0, 1) for Tr ρ^λ.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
    },
    /// Upper bound on the convex roof of the output entropy.
    Ccooe { channel: String, state: String },
    /// Upper bound on the entanglement of formation.
    Eof {
        state: String,
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        dims: Vec<usize>,
    },
    /// Lower bound on the χ-function.
    Chi {
        channel: String,
        state: String,
        /// Maximise the Holevo quantity directly instead of going through the roof.
        #[arg(long)]
        direct: bool,
    },
    /// Superadditivity and subadditivity experiments.
    #[command(subcommand)]
    Additivity(AdditivityCmd),
    /// Probes of the random-phase channel.
    PhaseChannel {
        /// Spec JSON file or inline JSON.
        #[arg(long)]
        spec: String,
        #[command(subcommand)]
        probe: ProbeCmd,
    },
    /// Gibbs state for a Hamiltonian at a mean energy level.
    Gibbs {
        /// diag:E0,E1,... or a matrix JSON file.
        hamiltonian: String,
        #[arg(long)]
        level: f64,
    },
    /// Run a configuration file (the "config" object of any report).
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum AdditivityCmd {
    /// Roof of Φ⊗Ψ against the sum of the single-channel roofs.
    Margin {
        first: String,
        second: String,
        state: String,
    },
    /// χ of Φ⊗Ψ against the sum of the single-channel χ values.
    Chi {
        first: String,
        second: String,
        state: String,
    },
    /// Roof of Φ⊗Ψ against the larger single-channel roof; without a state,
    /// the same check for minimal output entropies.
    Corollary {
        first: String,
        second: String,
        state: Option<String>,
    },
    /// Truncation sequence for a state on H⊗L⊗K⊗N with Φ = Tr_L, Ψ = Tr_N.
    Truncate {
        state: String,
        #[arg(long, value_delimiter = ',', default_value = "2,2,2,2")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        ranks: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Projectors::TopMarginal)]
        projectors: Projectors,
        /// Also estimate the roof at every step.
        #[arg(long)]
        with_roof: bool,
    },
    /// Seeded batch over random channel pairs and states.
    Scan {
        /// noiseless:D, depolarizing:D, dephasing[:Q], stinespring:IN:OUT:ENV,
        /// measure-prepare:D:OUTCOMES:OUT, phase:<spec>, or generator JSON.
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, value_enum, default_value_t = ScanKind::Margin)]
        kind: ScanKind,
    },
    /// Margins for (Φ, Ψ) and for the complementary pair on random states.
    Complement {
        first: String,
        second: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProbeCmd {
    /// Max/mean output entropy over random pure inputs, per dimension.
    Sweep {
        #[arg(long, default_value_t = 2)]
        d_min: usize,
        #[arg(long, default_value_t = 16)]
        d_max: usize,
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Tail quantities and the tail entropy bound, per dimension.
    Tails {
        #[arg(long, default_value_t = 2)]
        d_min: usize,
        #[arg(long, default_value_t = 16)]
        d_max: usize,
        /// Entropy constant; estimated when omitted.
        #[arg(long)]
        c: Option<f64>,
        /// Energy bound.
        #[arg(long, default_value_t = 1.0)]
        h: f64,
    },
    /// Cross-check against the measure-prepare complement.
    Complement {
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 8.0)]
        half_width: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Projectors {
    TopMarginal,
    /// Seeded Haar frames (uses --seed).
    Random,
    ComputationalBasis,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let g = self.global;
        let command = match self.command {
            Cmd::Run { config } => {
                let text = std::fs::read_to_string(&config)
                    .with_context(|| format!("cannot read {}", config.display()))?;
                return serde_json::from_str(&text)
                    .with_context(|| format!("invalid config {}", config.display()));
            }
            Cmd::Entropy { state, lambda } => Command::Entropy { state, lambda },
            Cmd::Ccooe { channel, state } => Command::Ccooe { channel, state },
            Cmd::Eof { state, dims } => Command::Eof { state, dims },
            Cmd::Chi {
                channel,
                state,
                direct,
            } => Command::Chi {
                channel,
                state,
                direct,
            },
            Cmd::Additivity(a) => match a {
                AdditivityCmd::Margin {
                    first,
                    second,
                    state,
                } => Command::AdditivityMargin {
                    first,
                    second,
                    state,
                },
                AdditivityCmd::Chi {
                    first,
                    second,
                    state,
                } => Command::AdditivityChi {
                    first,
                    second,
                    state,
                },
                AdditivityCmd::Corollary {
                    first,
                    second,
                    state,
                } => Command::AdditivityCorollary {
                    first,
                    second,
                    state,
                },
                AdditivityCmd::Truncate {
                    state,
                    dims,
                    ranks,
                    projectors,
                    with_roof,
                } => Command::AdditivityTruncate {
                    state,
                    dims,
                    ranks,
                    projectors: match projectors {
                        Projectors::TopMarginal => ProjectorChoice::TopMarginal,
                        Projectors::Random => ProjectorChoice::Random { seed: g.seed },
                        Projectors::ComputationalBasis => ProjectorChoice::ComputationalBasis,
                    },
                    with_roof,
                },
                AdditivityCmd::Scan {
                    first,
                    second,
                    count,
                    kind,
                } => Command::AdditivityScan {
                    first: inputs::generator(&first)?,
                    second: inputs::generator(&second)?,
                    count,
                    kind,
                },
                AdditivityCmd::Complement {
                    first,
                    second,
                    samples,
                } => Command::AdditivityComplement {
                    first,
                    second,
                    samples,
                },
            },
            Cmd::PhaseChannel { spec, probe } => Command::PhaseChannel {
                spec,
                probe: match probe {
                    ProbeCmd::Sweep {
                        d_min,
                        d_max,
                        samples,
                    } => PhaseProbe::Sweep {
                        d_min,
                        d_max,
                        samples,
                    },
                    ProbeCmd::Tails { d_min, d_max, c, h } => {
                        PhaseProbe::Tails { d_min, d_max, c, h }
                    }
                    ProbeCmd::Complement {
                        points,
                        half_width,
                        samples,
                    } => PhaseProbe::Complement {
                        points,
                        half_width,
                        samples,
                    },
                },
            },
            Cmd::Gibbs { hamiltonian, level } => Command::Gibbs { hamiltonian, level },
        };
        let mut roof = RoofOptions::default();
        if let Some(r) = g.restarts {
            roof.restarts = r;
        }
        if let Some(m) = g.max_iterations {
            roof.max_iterations = m;
        }
        Ok(RunConfig {
            command,
            seed: g.seed,
            roof,
            tolerance: g.tolerance,
            out: g.out,
            format: g.format,
            bits: g.bits,
        })
    }
}
