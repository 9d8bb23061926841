use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "gwforge", version, about = "Galton-Watson tree laboratory: exact laws, samplers and local limits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for Monte Carlo and enumeration. Outputs do not depend on it.
    #[arg(long, global = true, env = "GWFORGE_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,

    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    /// Output format. Records default to `text`, tables to `csv`, samples to JSON lines.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Dist {
    /// Preset (critical-binary, sub-binary, super-binary, aperiodic-critical, geom:a),
    /// inline JSON such as '{"pmf":{"0":"1/4","2":"3/4"}}', or a JSON file.
    #[arg(long, default_value = "critical-binary")]
    pub dist: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Budget {
    /// Largest tree size (enumeration) or node count (sampling).
    #[arg(long)]
    pub cap_size: Option<usize>,
    /// Largest height a sampled tree may reach.
    #[arg(long)]
    pub cap_height: Option<usize>,
    /// Rejections allowed per conditioned sample.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_rejections: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Extinction probability, mean, period, radius and criticality.
    Solve {
        #[command(flatten)]
        dist: Dist,
    },
    /// Derived offspring laws.
    Derive {
        #[command(flatten)]
        dist: Dist,
        #[arg(long, value_enum)]
        law: DerivedLaw,
    },
    /// The tilted law p_θ^A.
    Tilt {
        #[command(flatten)]
        dist: Dist,
        /// Degree set: `0`, `0,2,5` or `3+`.
        #[arg(long, default_value = "0")]
        set: String,
        /// Tilt parameter, rational (`5/4`) or decimal.
        #[arg(long)]
        theta: String,
    },
    /// Genericity of a sub-critical law for a degree set.
    Classify {
        #[command(flatten)]
        dist: Dist,
        #[arg(long, default_value = "0")]
        set: String,
    },
    /// Draw trees or process paths, one per line.
    Sample {
        #[command(flatten)]
        dist: Dist,
        #[arg(long, value_enum, default_value = "gw")]
        kind: SampleKind,
        /// Restriction level (gw, kesten, conditioned, condensation, survivor).
        #[arg(long)]
        h: Option<usize>,
        /// Generations (process, immigration).
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value = "size")]
        functional: String,
        /// Conditioning window: `n`, `n:n1` for [n, n+n1) or `n+`.
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[command(flatten)]
        budget: Budget,
    },
    /// Exact or floating-point laws from the enumeration oracle.
    Law {
        #[command(flatten)]
        dist: Dist,
        #[arg(long, value_enum, default_value = "tree")]
        kind: LawKind,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long, default_value = "size")]
        functional: String,
        #[arg(long)]
        window: Option<String>,
        /// `exact` uses rationals, `mc` floating point.
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 9)]
        cap_size: usize,
    },
    /// The hitting-time identity P(|τ| = n) = P(S_n = -1) / n.
    Dwass {
        #[command(flatten)]
        dist: Dist,
        #[arg(long)]
        n: usize,
    },
    /// Ratios P(A ∈ [n+s, n+s+n1)) / P(A ∈ [n, n+n1)).
    Ratio {
        #[command(flatten)]
        dist: Dist,
        #[arg(long, default_value = "height")]
        functional: String,
        /// Comma-separated values or inclusive ranges, e.g. `10,20,40` or `1..=9`.
        #[arg(long)]
        ns: String,
        /// Window width; omitted for tails.
        #[arg(long)]
        n1: Option<u64>,
        #[arg(long, default_value_t = 1)]
        step: u64,
    },
    /// TV distance of conditioned restrictions to the local limit.
    Converge {
        #[command(flatten)]
        dist: Dist,
        #[arg(long, default_value = "size")]
        functional: String,
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
        window: Vec<String>,
        #[arg(long, default_value_t = 2)]
        h: usize,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[command(flatten)]
        budget: Budget,
    },
    /// Monte Carlo check of E[W_n] = 1 and P(W = 0) = q.
    KestenStigum {
        #[command(flatten)]
        dist: Dist,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Depth of the infinite node of the condensation tree against (1 - m) m^k.
    Condense {
        #[command(flatten)]
        dist: Dist,
        /// Tilt first to the extremal law for this degree set.
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 8)]
        depth_cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivedLaw {
    Conjugate,
    SizeBiased,
    Survivor,
    Condensation,
    Leaf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Gw,
    Kesten,
    Conditioned,
    Condensation,
    Survivor,
    Process,
    Immigration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Tree,
    Restriction,
    Kesten,
    Conditioned,
    Functional,
}
