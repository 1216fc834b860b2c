//! Closed-form magnetochemistry of dimers and spin clusters.
//!
//! All susceptibilities are molar, cm³·mol⁻¹, and scale with
//! [`C1`](crate::units::C1).

mod lambert;

pub use lambert::lambert_w;

use core::f64::consts::E;

use crate::entanglement::Concurrence;
use crate::error::{check_temperature, Error, Result};
use crate::spin::DimerParams;
use crate::units::{C1, LN_3};

/// Mole of `n`-nuclear clusters of spins `S` with a common g-factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSpec {
    n: u32,
    twice_spin: u32,
    g: f64,
}

impl ClusterSpec {
    /// `s` must be a positive multiple of 1/2.
    pub fn new(n: u32, s: f64, g: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain {
                what: "spins per cluster",
                value: 0.0,
            });
        }
        let twice = 2.0 * s;
        if !(twice >= 1.0 && libm::trunc(twice) == twice && twice <= u32::MAX as f64) {
            return Err(Error::Domain {
                what: "spin quantum number",
                value: s,
            });
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Domain {
                what: "g-factor",
                value: g,
            });
        }
        Ok(Self {
            n,
            twice_spin: twice as u32,
            g,
        })
    }

    /// Two spin-1/2 centers.
    pub fn dimer(g: f64) -> Result<Self> {
        Self::new(2, 0.5, g)
    }

    /// A single spin-1/2 center.
    pub fn monomer(g: f64) -> Result<Self> {
        Self::new(1, 0.5, g)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn spin(&self) -> f64 {
        self.twice_spin as f64 / 2.0
    }

    pub fn g(&self) -> f64 {
        self.g
    }
}

/// Location and height of the susceptibility maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakCoordinates {
    pub t_max: f64,
    pub chi_max: f64,
}

/// Bleaney–Bowers molar susceptibility of a Heisenberg dimer.
pub fn bleaney_bowers_chi(params: &DimerParams, t: f64) -> Result<f64> {
    check_temperature(t)?;
    let a = 2.0 * params.j_over_kb / t;
    let scale = 2.0 * C1 * params.g * params.g / t;
    // both branches keep the exponential in (0, 1]
    Ok(if a >= 0.0 {
        scale / (3.0 + libm::exp(-a))
    } else {
        let ea = libm::exp(a);
        scale * ea / (3.0 * ea + 1.0)
    })
}

/// Powder average `√((gx² + gy² + gz²)/3)`.
pub fn powder_g(gx: f64, gy: f64, gz: f64) -> Result<f64> {
    for g in [gx, gy, gz] {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Domain {
                what: "g-factor component",
                value: g,
            });
        }
    }
    Ok(libm::sqrt((gx * gx + gy * gy + gz * gz) / 3.0))
}

/// Curie law of two independent spins 1/2: `N_A g² μ_B² / (2 k_B T)`.
pub fn curie_chi_dimer(g: f64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    Ok(g * g * C1 / (2.0 * t))
}

/// Curie law for a mole of clusters: `n N_A g² μ_B² S(S+1) / (3 k_B T)`.
pub fn curie_chi_cluster(spec: &ClusterSpec, t: f64) -> Result<f64> {
    check_temperature(t)?;
    Ok(curie_constant(spec) / t)
}

/// Curie constant `n g² S(S+1) C₁ / 3` in cm³·K·mol⁻¹.
pub fn curie_constant(spec: &ClusterSpec) -> f64 {
    let s = spec.spin();
    spec.n as f64 * spec.g * spec.g * s * (s + 1.0) * C1 / 3.0
}

fn w_three_over_e() -> f64 {
    lambert_w(3.0 / E).expect("3/e lies on the principal branch")
}

/// `k_B T_max / |J| = 2 / (1 + W(3/e))`.
pub fn peak_temperature_ratio() -> f64 {
    2.0 / (1.0 + w_three_over_e())
}

/// `|J| χ_max / (N_A g² μ_B²) = W(3/e) / 3`.
pub fn peak_susceptibility_ratio() -> f64 {
    w_three_over_e() / 3.0
}

/// `T_E / T_max = (1 + W(3/e)) / ln 3`.
pub fn te_over_tmax_ratio() -> f64 {
    (1.0 + w_three_over_e()) / LN_3
}

/// Maximum of the Bleaney–Bowers curve; only antiferromagnets have one.
pub fn chi_peak(params: &DimerParams) -> Result<PeakCoordinates> {
    if params.j_over_kb >= 0.0 {
        return Err(Error::Domain {
            what: "J/k_B for a susceptibility maximum (must be negative)",
            value: params.j_over_kb,
        });
    }
    let j = params.j_over_kb.abs();
    Ok(PeakCoordinates {
        t_max: peak_temperature_ratio() * j,
        chi_max: peak_susceptibility_ratio() * params.g * params.g * C1 / j,
    })
}

pub fn te_from_tmax(t_max: f64) -> Result<f64> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain {
            what: "peak temperature",
            value: t_max,
        });
    }
    Ok(te_over_tmax_ratio() * t_max)
}

/// Concurrence inferred from a measured susceptibility, with a flag telling
/// whether the raw value fell outside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiConcurrence {
    pub concurrence: Concurrence,
    pub clamped: bool,
}

/// `C = 1 - (3/2)·χ/χ_Curie`, clamped to `[0, 1]`.
///
/// Noisy inputs (including negative χ after background subtraction) are
/// clamped and flagged rather than rejected.
pub fn concurrence_from_chi(chi: f64, t: f64, g: f64) -> Result<ChiConcurrence> {
    let curie = curie_chi_dimer(g, t)?;
    let raw = 1.0 - 1.5 * chi / curie;
    let value = raw.clamp(0.0, 1.0);
    Ok(ChiConcurrence {
        concurrence: Concurrence::new(value).expect("clamped into range"),
        clamped: !(0.0..=1.0).contains(&raw),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessVerdict {
    pub entangled: bool,
    pub threshold: f64,
}

/// Susceptibility witness `χ_p < χ_Curie / (1 + S)`; the boundary counts as
/// separable.
pub fn witness_chi(chi_p: f64, t: f64, spec: &ClusterSpec) -> Result<WitnessVerdict> {
    let threshold = curie_chi_cluster(spec, t)? / (1.0 + spec.spin());
    Ok(WitnessVerdict {
        entangled: chi_p < threshold,
        threshold,
    })
}

/// Effective moment `√(3 k_B T χ / N_A) / μ_B`, in Bohr magnetons.
pub fn mu_eff(chi: f64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    if chi.is_nan() || chi < 0.0 {
        return Err(Error::Domain {
            what: "susceptibility",
            value: chi,
        });
    }
    Ok(libm::sqrt(3.0 * t * chi / C1))
}

/// Moment below which a cluster is entangled: `g·√(nS)`.
pub fn mu_eff_threshold(spec: &ClusterSpec) -> f64 {
    spec.g * libm::sqrt(spec.n as f64 * spec.spin())
}
