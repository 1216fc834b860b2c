use alloc::vec::Vec;

use crate::analysis::curve::SusceptibilityCurve;
use crate::analysis::fit::FitResult;
use crate::analysis::peak::find_peak;
use crate::entanglement::{dimer_concurrence, entanglement_of_formation, entanglement_temperature};
use crate::error::Result;
use crate::magnetics::{concurrence_from_chi, curie_chi_dimer, te_from_tmax};
use crate::spin::DimerParams;

/// Entanglement temperature from three independent routes, in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TeEstimates {
    /// Where the data cross two thirds of the Curie dimer law.
    pub from_crossing: Option<f64>,
    /// From the fitted exchange constant.
    pub from_fit: Option<f64>,
    /// From the empirical susceptibility maximum.
    pub from_peak: Option<f64>,
}

impl TeEstimates {
    pub fn all(&self) -> [Option<f64>; 3] {
        [self.from_crossing, self.from_fit, self.from_peak]
    }
}

/// Temperature where `χ - (2/3)·χ_Curie` goes from negative to non-negative,
/// scanning down from the hottest point so a low-temperature impurity tail
/// re-crossing the threshold is ignored.
pub fn crossing_temperature(curve: &SusceptibilityCurve, g: f64) -> Result<Option<f64>> {
    let pts = curve.points();
    let excess = pts
        .iter()
        .map(|p| Ok(p.chi - 2.0 / 3.0 * curie_chi_dimer(g, p.t)?))
        .collect::<Result<Vec<f64>>>()?;
    for i in (1..pts.len()).rev() {
        let (lo, hi) = (excess[i - 1], excess[i]);
        if lo < 0.0 && hi >= 0.0 {
            let (t0, t1) = (pts[i - 1].t, pts[i].t);
            return Ok(Some(t0 + (t1 - t0) * (-lo) / (hi - lo)));
        }
    }
    Ok(None)
}

/// Runs every estimator that applies; missing ones are `None`.
pub fn estimate_te(curve: &SusceptibilityCurve, g: f64, fitted: Option<&FitResult>) -> Result<TeEstimates> {
    estimate_te_for_dimer(curve, g, fitted.map(|f| &f.model.dimer))
}

/// As [`estimate_te`], taking the fitted dimer parameters directly.
pub fn estimate_te_for_dimer(curve: &SusceptibilityCurve, g: f64, fitted: Option<&DimerParams>) -> Result<TeEstimates> {
    let from_crossing = crossing_temperature(curve, g)?;
    let from_fit = fitted.and_then(entanglement_temperature);
    let from_peak = match find_peak(curve) {
        Ok(Some(peak)) => Some(te_from_tmax(peak.t_max)?),
        _ => None,
    };
    Ok(TeEstimates {
        from_crossing,
        from_fit,
        from_peak,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub t: f64,
    pub chi: f64,
    pub concurrence: f64,
    pub entanglement: f64,
    /// Raw concurrence fell outside `[0, 1]`.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntanglementProfile {
    pub rows: Vec<ProfileRow>,
}

/// Concurrence and entanglement of formation inferred point by point from χ.
pub fn entanglement_profile(curve: &SusceptibilityCurve, g: f64) -> Result<EntanglementProfile> {
    let rows = curve
        .points()
        .iter()
        .map(|p| {
            let cc = concurrence_from_chi(p.chi, p.t, g)?;
            Ok(ProfileRow {
                t: p.t,
                chi: p.chi,
                concurrence: cc.concurrence.value(),
                entanglement: cc.concurrence.entanglement().value(),
                clamped: cc.clamped,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementProfile { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayPoint {
    pub t: f64,
    pub concurrence: f64,
    pub entanglement: f64,
}

/// Model concurrence and entanglement of formation of the thermal dimer state.
pub fn theoretical_overlay(params: &DimerParams, temperatures: &[f64]) -> Result<Vec<OverlayPoint>> {
    temperatures
        .iter()
        .map(|&t| {
            let c = dimer_concurrence(params, t)?;
            Ok(OverlayPoint {
                t,
                concurrence: c.value(),
                entanglement: entanglement_of_formation(c).value(),
            })
        })
        .collect()
}
