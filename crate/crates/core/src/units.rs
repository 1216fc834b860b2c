//! Physical constants in cgs-emu units.
//!
//! Susceptibilities are molar (cm³·mol⁻¹), temperatures in kelvin, fields in
//! gauss, exchange constants as J/k_B in kelvin.

/// `N_A·μ_B²/k_B` in cm³·K·mol⁻¹.
///
/// Every closed-form susceptibility in this crate scales with this single
/// bundle. For g = 2 it gives the two-spin Curie constant 0.75025.
pub const C1: f64 = 0.375125;

/// Bohr magneton over Boltzmann constant, K·G⁻¹ (CODATA 2018).
pub const MU_B_OVER_K_B: f64 = 9.274_010_078_3e-21 / 1.380_649e-16;

/// Molar moment scale `N_A·μ_B` in erg·G⁻¹·mol⁻¹, chosen so that
/// `N_A_MU_B * MU_B_OVER_K_B == C1`.
pub const N_A_MU_B: f64 = C1 / MU_B_OVER_K_B;

/// Default field step for the finite-difference susceptibility, gauss.
pub const DEFAULT_FIELD_STEP: f64 = 1.0;

/// Natural logarithm of 3.
pub const LN_3: f64 = 1.098_612_288_668_109_7;
