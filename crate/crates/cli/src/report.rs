//! JSON documents written by the subcommands.

use dimer_core::analysis::{CompositeModel, FitParam, FitResult, TeEstimates};
use dimer_core::entanglement::entanglement_temperature;
use dimer_core::magnetics::ClusterSpec;
use dimer_core::spin::DimerParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const UNITS: &str = "cgs";

/// Echo of everything a run depended on; written as `manifest.json`.
#[derive(Debug, Serialize)]
pub struct Manifest<P: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub units: &'static str,
    pub parameters: P,
    pub outputs: Vec<String>,
}

impl<P: Serialize> Manifest<P> {
    pub fn new(command: &'static str, parameters: P, outputs: &[&str]) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            units: UNITS,
            parameters,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParameters {
    pub j_over_kb: f64,
    pub g: f64,
    pub impurity_fraction: f64,
    pub weiss_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ParameterErrors {
    pub j_over_kb: Option<f64>,
    pub g: Option<f64>,
    pub impurity_fraction: Option<f64>,
    pub weiss_theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpurityReport {
    pub n: u32,
    pub spin: f64,
    pub g: f64,
    pub shares_dimer_g: bool,
}

/// `fit.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub converged: bool,
    pub iterations: usize,
    pub points: usize,
    pub free: Vec<String>,
    pub parameters: ModelParameters,
    pub std_errors: ParameterErrors,
    pub rss: f64,
    pub reduced_chi_square: Option<f64>,
    pub gradient_norm: f64,
    #[serde(rename = "entanglement_temperature_K")]
    pub entanglement_temperature_k: Option<f64>,
    pub impurity: ImpurityReport,
}

impl FitReport {
    pub fn from_result(fit: &FitResult) -> Self {
        let m = &fit.model;
        let dof = fit.degrees_of_freedom();
        let spec = m.impurity_spec;
        FitReport {
            converged: fit.converged,
            iterations: fit.iterations,
            points: fit.points,
            free: fit.free.iter().map(|p| p.name().to_owned()).collect(),
            parameters: ModelParameters {
                j_over_kb: m.dimer.j_over_kb,
                g: m.dimer.g,
                impurity_fraction: m.impurity_fraction,
                weiss_theta: m.weiss_theta,
            },
            std_errors: ParameterErrors {
                j_over_kb: fit.std_errors.get(FitParam::J),
                g: fit.std_errors.get(FitParam::G),
                impurity_fraction: fit.std_errors.get(FitParam::P),
                weiss_theta: fit.std_errors.get(FitParam::Theta),
            },
            rss: fit.rss,
            reduced_chi_square: (dof > 0).then(|| fit.rss / dof as f64),
            gradient_norm: fit.gradient_norm,
            entanglement_temperature_k: entanglement_temperature(&m.dimer),
            impurity: ImpurityReport {
                n: spec.n(),
                spin: spec.spin(),
                g: if m.impurity_shares_g { m.dimer.g } else { spec.g() },
                shares_dimer_g: m.impurity_shares_g,
            },
        }
    }

    pub fn model(&self) -> CliResult<CompositeModel> {
        let p = &self.parameters;
        let dimer = DimerParams::new(p.j_over_kb, p.g)?;
        let mut model = CompositeModel::new(dimer, p.impurity_fraction)?.with_theta(p.weiss_theta);
        model.impurity_spec = ClusterSpec::new(self.impurity.n, self.impurity.spin, self.impurity.g)?;
        model.impurity_shares_g = self.impurity.shares_dimer_g;
        model.validate()?;
        Ok(model)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("bad fit report: {e}")))
    }
}

/// `te.json`; absent estimates are `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeReport {
    pub from_crossing: Option<f64>,
    pub from_fit: Option<f64>,
    pub from_peak: Option<f64>,
}

impl From<TeEstimates> for TeReport {
    fn from(te: TeEstimates) -> Self {
        TeReport {
            from_crossing: te.from_crossing,
            from_fit: te.from_fit,
            from_peak: te.from_peak,
        }
    }
}
