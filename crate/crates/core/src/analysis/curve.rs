use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One measured sample: temperature (K), molar susceptibility (cm³/mol) and
/// optional one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub chi: f64,
    pub sigma: Option<f64>,
}

impl CurvePoint {
    pub fn new(t: f64, chi: f64) -> Self {
        Self { t, chi, sigma: None }
    }

    pub fn with_sigma(t: f64, chi: f64, sigma: f64) -> Self {
        Self {
            t,
            chi,
            sigma: Some(sigma),
        }
    }
}

/// χ(T) series with strictly increasing positive temperatures.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityCurve {
    points: Vec<CurvePoint>,
    pub label: String,
}

impl SusceptibilityCurve {
    pub fn new(points: Vec<CurvePoint>, label: impl Into<String>) -> Result<Self> {
        let mut prev = 0.0;
        for (i, p) in points.iter().enumerate() {
            if !(p.t > prev && p.t.is_finite()) {
                return Err(Error::InvalidCurve(format!(
                    "temperature at row {i} ({}) must be positive and strictly increasing",
                    p.t
                )));
            }
            if !p.chi.is_finite() {
                return Err(Error::InvalidCurve(format!("non-finite susceptibility at row {i}")));
            }
            if let Some(s) = p.sigma {
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::InvalidCurve(format!(
                        "uncertainty at row {i} ({s}) must be positive"
                    )));
                }
            }
            prev = p.t;
        }
        Ok(Self {
            points,
            label: label.into(),
        })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn temperatures(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    pub fn min_temperature(&self) -> Option<f64> {
        self.points.first().map(|p| p.t)
    }

    pub fn has_sigma(&self) -> bool {
        self.points.iter().any(|p| p.sigma.is_some())
    }
}

/// `tmin, tmin + step, …` up to and including `tmax` (to within rounding).
pub fn temperature_grid(tmin: f64, tmax: f64, step: f64) -> Result<Vec<f64>> {
    if !(tmin > 0.0 && tmax >= tmin && step > 0.0 && tmax.is_finite()) {
        return Err(Error::InvalidCurve(format!(
            "bad temperature grid: tmin={tmin}, tmax={tmax}, step={step}"
        )));
    }
    let n = libm::floor((tmax - tmin) / step + 1e-9) as usize;
    Ok((0..=n).map(|i| tmin + i as f64 * step).collect())
}
