//! Resolved run configuration. Every subcommand is turned into a
//! [`RunConfig`], which is echoed verbatim into the report; the same
//! structure can be loaded from a file with `roofkit run --config`.

use std::path::PathBuf;

use roofkit::lab::{ChannelGenerator, ProjectorChoice, ReportKind};
use roofkit::roof::RoofOptions;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    /// `roof.seed` is overwritten by `seed` during resolution.
    #[serde(default)]
    pub roof: RoofOptions,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Display summaries in bits; stored values are always nats.
    #[serde(default)]
    pub bits: bool,
}

pub fn default_tolerance() -> f64 {
    1e-3
}

impl RunConfig {
    pub fn resolve(mut self) -> Self {
        self.roof.seed = self.seed;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Margin,
    Chi,
    Corollary,
    MinOutput,
}

impl From<ScanKind> for ReportKind {
    fn from(k: ScanKind) -> Self {
        match k {
            ScanKind::Margin => ReportKind::Superadditivity,
            ScanKind::Chi => ReportKind::ChiSubadditivity,
            ScanKind::Corollary => ReportKind::Corollary,
            ScanKind::MinOutput => ReportKind::CorollaryMinOutput,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseProbe {
    /// Max/mean output entropy over random pure inputs for each dimension.
    Sweep {
        d_min: usize,
        d_max: usize,
        samples: usize,
    },
    /// Tail quantities and the entropy bound for each dimension.
    Tails {
        d_min: usize,
        d_max: usize,
        /// Entropy constant; estimated empirically when absent.
        #[serde(default)]
        c: Option<f64>,
        /// Energy bound used in the entropy bound.
        h: f64,
    },
    /// Schur-form channel against the measure-prepare complement.
    Complement {
        points: usize,
        half_width: f64,
        samples: usize,
    },
}

/// Input arguments are strings naming a family (`bell`, `dephasing:0.25`,
/// ...), a JSON file, or inline JSON starting with `{`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    Entropy {
        state: String,
        #[serde(default)]
        lambda: Vec<f64>,
    },
    Ccooe {
        channel: String,
        state: String,
    },
    Eof {
        state: String,
        dims: Vec<usize>,
    },
    Chi {
        channel: String,
        state: String,
        #[serde(default)]
        direct: bool,
    },
    AdditivityMargin {
        first: String,
        second: String,
        state: String,
    },
    AdditivityChi {
        first: String,
        second: String,
        state: String,
    },
    AdditivityCorollary {
        first: String,
        second: String,
        /// Absent: compare minimal output entropies instead of roofs.
        #[serde(default)]
        state: Option<String>,
    },
    AdditivityTruncate {
        state: String,
        dims: Vec<usize>,
        ranks: Vec<usize>,
        #[serde(default)]
        projectors: ProjectorChoice,
        #[serde(default)]
        with_roof: bool,
    },
    AdditivityScan {
        first: ChannelGenerator,
        second: ChannelGenerator,
        count: usize,
        kind: ScanKind,
    },
    AdditivityComplement {
        first: String,
        second: String,
        samples: usize,
    },
    PhaseChannel {
        spec: String,
        probe: PhaseProbe,
    },
    Gibbs {
        hamiltonian: String,
        level: f64,
    },
}

impl Command {
    /// Stem used for output file names.
    pub fn stem(&self) -> &'static str {
        match self {
            Self::Entropy { .. } => "entropy",
            Self::Ccooe { .. } => "ccooe",
            Self::Eof { .. } => "eof",
            Self::Chi { .. } => "chi",
            Self::AdditivityMargin { .. } => "additivity-margin",
            Self::AdditivityChi { .. } => "additivity-chi",
            Self::AdditivityCorollary { .. } => "additivity-corollary",
            Self::AdditivityTruncate { .. } => "additivity-truncate",
            Self::AdditivityScan { .. } => "additivity-scan",
            Self::AdditivityComplement { .. } => "additivity-complement",
            Self::PhaseChannel { .. } => "phase-channel",
            Self::Gibbs { .. } => "gibbs",
        }
    }
}
