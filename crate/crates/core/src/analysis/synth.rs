use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::analysis::curve::{CurvePoint, SusceptibilityCurve};
use crate::analysis::model::{model_chi, CompositeModel};
use crate::error::{Error, Result};

/// Model curve on `grid` plus seeded Gaussian noise of width `noise_sigma`.
///
/// The same `(model, grid, noise_sigma, seed)` always yields the same curve.
pub fn synthesize_curve(
    model: &CompositeModel,
    grid: &[f64],
    noise_sigma: f64,
    seed: u64,
) -> Result<SusceptibilityCurve> {
    model.validate()?;
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::Domain {
            what: "noise sigma",
            value: noise_sigma,
        });
    }
    let exact = grid
        .iter()
        .map(|&t| Ok(CurvePoint::new(t, model_chi(model, t)?)))
        .collect::<Result<Vec<_>>>();
    // report grid problems as curve errors rather than temperature errors
    let mut points = match exact {
        Ok(p) => p,
        Err(Error::NonPositiveTemperature(t)) => {
            return Err(Error::InvalidCurve(format!("grid temperature {t} is not positive")))
        }
        Err(e) => return Err(e),
    };
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma).map_err(|_| Error::Domain {
            what: "noise sigma",
            value: noise_sigma,
        })?;
        for p in &mut points {
            p.chi += normal.sample(&mut rng);
        }
    }
    let label = format!(
        "synthetic J/kB={} g={} p={} theta={} noise={} seed={}",
        model.dimer.j_over_kb, model.dimer.g, model.impurity_fraction, model.weiss_theta, noise_sigma, seed
    );
    SusceptibilityCurve::new(points, label)
}
