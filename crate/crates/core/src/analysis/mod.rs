//! Susceptibility-curve pipeline: impurity modelling and subtraction,
//! least-squares fitting, peak location, entanglement-temperature estimates
//! and concurrence profiles.

mod curve;
mod fit;
mod model;
mod peak;
mod profile;
mod synth;

pub use curve::{temperature_grid, CurvePoint, SusceptibilityCurve};
pub use fit::{fit_curve, model_gradient, param_value, set_param_value, FitConfig, FitParam, FitResult, StdErrors};
pub use model::{model_chi, subtract_impurity, CompositeModel};
pub use peak::find_peak;
pub use profile::{
    crossing_temperature, entanglement_profile, estimate_te, estimate_te_for_dimer, theoretical_overlay,
    EntanglementProfile, OverlayPoint, ProfileRow, TeEstimates,
};
pub use synth::synthesize_curve;
