use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Largest accepted truncation. N_max = 32 already has 58905 basis states.
pub const MAX_NMAX: i64 = 32;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "kreinlab", version, about = "Batch verification reports for the covariant Heisenberg-Weyl toolkit")]
pub struct Cli {
    /// Fock truncation N_max (per-command default when omitted).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub nmax: Option<i64>,
    /// Quadrature nodes per axis.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Override for the command's primary tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Check identities on every basis column, ignoring the truncation guard.
    #[arg(long, global = true)]
    pub no_guard: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Operator commutators, generator table and pseudo-unitarity.
    VerifyAlgebra(VerifyArgs),
    /// Spectrum of X·X + P·P on guarded levels.
    Spectrum,
    /// Krein inner products of Fock states, algebraic and by quadrature.
    InnerTable,
    /// Coherent-state overlaps and the eigenvector contract.
    Overlap(OverlapArgs),
    /// Heisenberg and Schrödinger flows of the free particle.
    Evolve(EvolveArgs),
    /// Galilean and classical contraction scans.
    Contract(ContractArgs),
    /// Flat-measure divergence and the ρ-integral series.
    Divergence(DivergenceArgs),
    /// Every command above with its defaults, in one report.
    Suite,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyAlgebra(_) => "verify-algebra",
            Command::Spectrum => "spectrum",
            Command::InnerTable => "inner-table",
            Command::Overlap(_) => "overlap",
            Command::Evolve(_) => "evolve",
            Command::Contract(_) => "contract",
            Command::Divergence(_) => "divergence",
            Command::Suite => "suite",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Seeded random boosts and displacements checked for pseudo-unitarity.
    #[arg(long, default_value_t = 3)]
    pub unitarity_samples: usize,
    /// Seeded random polynomial pairs checked for [L, R] = 0.
    #[arg(long, default_value_t = 5)]
    pub commutant_samples: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OverlapArgs {
    /// Number of seeded random label pairs (components in [−0.5, 0.5]).
    #[arg(long, default_value_t = 4)]
    pub pairs: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EvolveArgs {
    #[arg(long, default_value_t = 2.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 3.0)]
    pub tau: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ContractArgs {
    /// Speeds of light for the time-separation slope.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 8.0])]
    pub c_values: Vec<f64>,
    /// Speeds of light for the energy-factor exponent.
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 20.0, 40.0, 80.0])]
    pub e_c_values: Vec<f64>,
    /// Base speed of light for the boost-generator rate; it is also doubled.
    #[arg(long, default_value_t = 100.0)]
    pub boost_c: f64,
    /// Scale pairs kx:kp for the classical and separation scans.
    #[arg(long, value_delimiter = ',', value_parser = parse_k_pair,
          default_values = ["4:5", "8:10", "16:20", "32:40"])]
    pub k_values: Vec<(f64, f64)>,
}

fn parse_k_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected kx:kp, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DivergenceArgs {
    /// Cutoffs ρ_c for the ρ-integral series.
    #[arg(long, value_delimiter = ',',
          default_values_t = [0.0, 0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999])]
    pub rho_values: Vec<f64>,
    /// Time coordinates at which the vacuum log-density is sampled.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 8.0])]
    pub t_values: Vec<f64>,
}

/// Subcommand parameters, echoed in the report.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Params {
    None,
    Verify(VerifyArgs),
    Overlap(OverlapArgs),
    Evolve(EvolveArgs),
    Contract(ContractArgs),
    Divergence(DivergenceArgs),
}

/// Fully resolved configuration of one command.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n_max: Option<usize>,
    pub nodes: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub respect_guard: bool,
    pub format: Format,
    pub parameters: Params,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// (N_max, nodes, tolerance) used when the flags are absent.
fn defaults(command: &str) -> (Option<usize>, Option<usize>, f64) {
    match command {
        "verify-algebra" => (Some(8), None, 1e-10),
        "spectrum" => (Some(6), None, 1e-9),
        "inner-table" => (Some(3), Some(48), 1e-8),
        "overlap" => (Some(16), Some(48), 1e-8),
        "evolve" => (None, None, 1e-12),
        "contract" => (Some(3), Some(16), 1e-12),
        "divergence" => (None, Some(48), 1e-4),
        _ => (None, None, 0.0),
    }
}

impl Cli {
    fn validate(&self) -> Result<(), UsageError> {
        if let Some(n) = self.nmax {
            if !(0..=MAX_NMAX).contains(&n) {
                return Err(UsageError(format!("--nmax must lie in 0..={MAX_NMAX}, got {n}")));
            }
        }
        if let Some(n) = self.nodes {
            if !(1..=200).contains(&n) {
                return Err(UsageError(format!("--nodes must lie in 1..=200, got {n}")));
            }
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(UsageError(format!("--tol must be finite and non-negative, got {t}")));
            }
        }
        Ok(())
    }

    /// Configuration for `command` with the global flags applied.
    pub fn resolve(&self, command: &Command) -> Result<RunConfig, UsageError> {
        self.validate()?;
        let name = command.name();
        let (nmax, nodes, tol) = defaults(name);
        let parameters = match command {
            Command::VerifyAlgebra(a) => Params::Verify(a.clone()),
            Command::Overlap(a) => Params::Overlap(a.clone()),
            Command::Evolve(a) => {
                if !(a.mass.is_finite() && a.mass > 0.0) {
                    return Err(UsageError(format!("--mass must be positive, got {}", a.mass)));
                }
                if !a.tau.is_finite() {
                    return Err(UsageError("--tau must be finite".into()));
                }
                Params::Evolve(a.clone())
            }
            Command::Contract(a) => {
                let cs = a.c_values.iter().chain(&a.e_c_values).chain([&a.boost_c]);
                let ks = a.k_values.iter().flat_map(|&(x, p)| [x, p]);
                if cs.copied().chain(ks).any(|v| !(v.is_finite() && v > 0.0)) {
                    return Err(UsageError("speeds of light and scale factors must be positive".into()));
                }
                Params::Contract(a.clone())
            }
            Command::Divergence(a) => {
                if let Some(r) = a.rho_values.iter().find(|r| !(0.0..1.0).contains(*r)) {
                    return Err(UsageError(format!("--rho-values must lie in [0, 1), got {r}")));
                }
                if a.t_values.iter().any(|t| !t.is_finite()) {
                    return Err(UsageError("--t-values must be finite".into()));
                }
                Params::Divergence(a.clone())
            }
            Command::Spectrum | Command::InnerTable | Command::Suite => Params::None,
        };
        Ok(RunConfig {
            command: name.to_string(),
            n_max: nmax.map(|d| self.nmax.map_or(d, |n| n as usize)),
            nodes: nodes.map(|d| self.nodes.unwrap_or(d)),
            tol: self.tol.unwrap_or(tol),
            seed: self.seed,
            respect_guard: !self.no_guard,
            format: self.format,
            parameters,
        })
    }
}

/// Every subcommand of the suite, with its default parameters.
pub fn suite_commands() -> Vec<Command> {
    let parse = |args: &[&str]| Cli::try_parse_from(args).expect("defaults parse").command;
    [
        ["kreinlab", "verify-algebra"],
        ["kreinlab", "spectrum"],
        ["kreinlab", "inner-table"],
        ["kreinlab", "overlap"],
        ["kreinlab", "evolve"],
        ["kreinlab", "contract"],
        ["kreinlab", "divergence"],
    ]
    .iter()
    .map(|a| parse(a))
    .collect()
}

#[cfg(test)]
impl RunConfig {
    pub fn for_test(command: &str) -> Self {
        let (n_max, nodes, tol) = defaults(command);
        RunConfig {
            command: command.to_string(),
            n_max,
            nodes,
            tol,
            seed: DEFAULT_SEED,
            respect_guard: true,
            format: Format::Json,
            parameters: Params::None,
        }
    }
}
