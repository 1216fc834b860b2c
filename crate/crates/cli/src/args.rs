//! Command-line flags and the optional TOML config file.
//!
//! Every option may also be given in the config file under the table named
//! after its subcommand (`[simulate]`, `[fit]`, ...). A flag on the command
//! line wins over the file; the file wins over built-in defaults. The output
//! directory falls back to `$DIMER_OUT_DIR`, then to `dimer-out`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::read_text;

pub const OUT_DIR_ENV: &str = "DIMER_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "dimer-out";

#[derive(Debug, Parser)]
#[command(
    name = "dimer",
    version,
    about = "Spin-dimer entanglement from magnetic susceptibility"
)]
pub struct Cli {
    /// Directory for all output files [env: DIMER_OUT_DIR]
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// TOML file with default options; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic χ(T) curve from the dimer + impurity model
    Simulate(SimulateArgs),
    /// Fit the model to a χ(T) curve
    Fit(FitArgs),
    /// Concurrence and entanglement profile plus entanglement-temperature estimates
    Entangle(EntangleArgs),
    /// Run the built-in consistency checks
    Verify(VerifyArgs),
}

/// Fills every `None` field of `self` from `file`.
macro_rules! merge_from {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl $ty {
            pub fn merge(self, file: $ty) -> $ty {
                $ty { $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// Exchange constant J/k_B in kelvin (negative: antiferromagnetic)
    #[arg(long, allow_negative_numbers = true)]
    pub j_over_kb: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    /// Impurity fraction p in [0, 1)
    #[arg(long)]
    pub p: Option<f64>,
    /// Weiss temperature of the impurity term, kelvin
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Gaussian noise width, cm³/mol
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Free-text label stored in the CSV header comment
    #[arg(long)]
    pub label: Option<String>,
}
merge_from!(SimulateArgs {
    j_over_kb,
    g,
    p,
    theta,
    tmin,
    tmax,
    step,
    noise,
    seed,
    label
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitArgs {
    /// Input curve CSV
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Parameters to fit, comma separated (J, g, p, theta) [default: J,g,p]
    #[arg(long, value_delimiter = ',')]
    pub free: Option<Vec<String>>,
    /// Hold a parameter fixed at a value, e.g. `g=2`; repeatable
    #[arg(long, value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub freeze: Option<Vec<String>>,
    /// Starting value for a free parameter, e.g. `J=-60`; repeatable
    #[arg(long, value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub init: Option<Vec<String>>,
    /// Relative parameter-step tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}
merge_from!(FitArgs {
    input,
    free,
    freeze,
    init,
    tol,
    max_iter
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntangleArgs {
    /// Input curve CSV (raw or impurity-corrected)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// fit.json from a previous `fit` run; adds the fit estimate and model overlay
    #[arg(long)]
    pub fit: Option<PathBuf>,
    /// g-factor for the Curie reference [default: fitted g, else 2]
    #[arg(long)]
    pub g: Option<f64>,
}
merge_from!(EntangleArgs { input, fit, g });

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    #[default]
    Coarse,
    Fine,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// Sweep density for the oracle comparisons
    #[arg(long, value_enum)]
    pub grid: Option<Grid>,
    /// Corrupt one term of the decomposition at T_E (self-test of the checker)
    #[arg(long, hide = true)]
    pub perturb_term: Option<usize>,
}
merge_from!(VerifyArgs { grid, perturb_term });

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub out_dir: Option<PathBuf>,
    pub simulate: SimulateArgs,
    pub fit: FitArgs,
    pub entangle: EntangleArgs,
    pub verify: VerifyArgs,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }
}

/// Flag, then config file, then environment, then the default.
pub fn resolve_out_dir(flag: Option<PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.or(file)
        .or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: ConfigFile = toml::from_str(
            "out_dir = \"from-file\"\n[simulate]\nj_over_kb = -50.0\ng = 2.1\n[fit]\nfreeze = [\"g=2\"]\n",
        )
        .unwrap();
        let cli = Cli::parse_from(["dimer", "simulate", "--j-over-kb", "-68"]);
        let Command::Simulate(flags) = cli.command else {
            panic!()
        };
        let merged = flags.merge(file.simulate);
        assert_eq!(merged.j_over_kb, Some(-68.0));
        assert_eq!(merged.g, Some(2.1));
        assert_eq!(file.fit.freeze.unwrap(), vec!["g=2"]);
        assert_eq!(resolve_out_dir(None, file.out_dir), PathBuf::from("from-file"));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(toml::from_str::<ConfigFile>("[simulate]\nj = 1.0\n").is_err());
    }

    #[test]
    fn negative_values_parse() {
        let cli = Cli::parse_from([
            "dimer", "fit", "--input", "c.csv", "--init", "J=-60", "--freeze", "theta=-2",
        ]);
        let Command::Fit(f) = cli.command else { panic!() };
        assert_eq!(f.init.unwrap(), vec!["J=-60"]);
        assert_eq!(f.freeze.unwrap(), vec!["theta=-2"]);
    }
}
