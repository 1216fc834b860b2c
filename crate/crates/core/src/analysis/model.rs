use alloc::vec::Vec;

use crate::analysis::curve::{CurvePoint, SusceptibilityCurve};
use crate::analysis::peak::find_peak;
use crate::error::{check_temperature, Error, Result};
use crate::magnetics::{bleaney_bowers_chi, curie_constant, peak_temperature_ratio, ClusterSpec};
use crate::spin::DimerParams;

/// Dimer susceptibility diluted by a Curie–Weiss impurity:
///
/// `χ(T) = (1 - p)·χ_BB(T) + p·C_imp/(T - θ)`
///
/// where `p` is the fraction of the molar susceptibility carried by the
/// mononuclear impurity centers and `C_imp` their Curie constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeModel {
    pub dimer: DimerParams,
    pub impurity_fraction: f64,
    pub impurity_spec: ClusterSpec,
    /// When set, the impurity g-factor follows the dimer's (also during fits).
    pub impurity_shares_g: bool,
    /// Weiss temperature θ in kelvin.
    pub weiss_theta: f64,
}

impl CompositeModel {
    /// Spin-1/2 monomer impurity sharing the dimer g, θ = 0.
    pub fn new(dimer: DimerParams, impurity_fraction: f64) -> Result<Self> {
        let model = Self {
            dimer,
            impurity_fraction,
            impurity_spec: ClusterSpec::monomer(dimer.g)?,
            impurity_shares_g: true,
            weiss_theta: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.weiss_theta = theta;
        self
    }

    /// Pure dimer, no impurity.
    pub fn pure(dimer: DimerParams) -> Result<Self> {
        Self::new(dimer, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.dimer.validate()?;
        let p = self.impurity_fraction;
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain {
                what: "impurity fraction",
                value: p,
            });
        }
        if !self.weiss_theta.is_finite() {
            return Err(Error::Domain {
                what: "Weiss temperature",
                value: self.weiss_theta,
            });
        }
        Ok(())
    }

    /// Checks the Curie–Weiss pole lies below every sample.
    pub fn validate_for(&self, curve: &SusceptibilityCurve) -> Result<()> {
        self.validate()?;
        if let Some(tmin) = curve.min_temperature() {
            if self.weiss_theta >= tmin {
                return Err(Error::InvalidModel(
                    "Weiss temperature must lie below the lowest measured temperature",
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn impurity_spec_effective(&self) -> ClusterSpec {
        if self.impurity_shares_g {
            ClusterSpec::new(self.impurity_spec.n(), self.impurity_spec.spin(), self.dimer.g)
                .unwrap_or(self.impurity_spec)
        } else {
            self.impurity_spec
        }
    }

    /// Curie constant of the impurity centers, cm³·K·mol⁻¹.
    pub fn impurity_curie_constant(&self) -> f64 {
        curie_constant(&self.impurity_spec_effective())
    }

    /// Unweighted impurity contribution `p·C_imp/(T - θ)`.
    pub fn impurity_chi(&self, t: f64) -> Result<f64> {
        check_temperature(t)?;
        let denom = t - self.weiss_theta;
        if denom == 0.0 {
            return Err(Error::Domain {
                what: "temperature at the Weiss pole",
                value: t,
            });
        }
        Ok(self.impurity_fraction * self.impurity_curie_constant() / denom)
    }

    /// Default starting point for a fit: g = 2, J from the susceptibility
    /// peak, p = 0.02, θ = 0.
    pub fn initial_guess(curve: &SusceptibilityCurve) -> Self {
        let g = 2.0;
        let j = find_peak(curve)
            .ok()
            .flatten()
            .map(|peak| -peak.t_max / peak_temperature_ratio())
            .unwrap_or(-1.0);
        let dimer = DimerParams { j_over_kb: j, g };
        Self {
            dimer,
            impurity_fraction: 0.02,
            impurity_spec: ClusterSpec::monomer(g).expect("g = 2 is valid"),
            impurity_shares_g: true,
            weiss_theta: 0.0,
        }
    }
}

pub fn model_chi(model: &CompositeModel, t: f64) -> Result<f64> {
    let imp = model.impurity_chi(t)?;
    let bb = bleaney_bowers_chi(&model.dimer, t)?;
    Ok((1.0 - model.impurity_fraction) * bb + imp)
}

/// Removes the impurity term and rescales by `1/(1 - p)`.
///
/// Points that turn negative are kept (measurement noise) and logged.
pub fn subtract_impurity(curve: &SusceptibilityCurve, model: &CompositeModel) -> Result<SusceptibilityCurve> {
    model.validate()?;
    let keep = 1.0 - model.impurity_fraction;
    let mut negative = 0usize;
    let points = curve
        .points()
        .iter()
        .map(|p| {
            let chi = (p.chi - model.impurity_chi(p.t)?) / keep;
            if chi < 0.0 {
                negative += 1;
            }
            Ok(CurvePoint {
                t: p.t,
                chi,
                sigma: p.sigma.map(|s| s / keep),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if negative > 0 {
        log::warn!("{negative} points negative after impurity subtraction");
    }
    SusceptibilityCurve::new(points, curve.label.clone())
}
