//! Concurrence and entanglement of formation for two-qubit states.

use nalgebra::{Matrix4, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{check_temperature, Error, Result};
use crate::spin::{DensityMatrix4, DimerParams};

/// Largest tolerated magnitude on entries that must vanish in X form.
pub const X_FORM_TOL: f64 = 1e-10;
/// Eigenvalues of ρ below this fraction of the largest are treated as zero
/// by the general concurrence.
const RANK_CUTOFF: f64 = 64.0 * f64::EPSILON;
const OVERSHOOT_WARN: f64 = 1e-9;

/// Off-diagonal positions that are zero in the block form
/// `[[u],[x₁ w; w* x₂],[v]]` (upper triangle; the lower follows by symmetry).
const X_FORM_ZEROS: [(usize, usize); 5] = [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)];

/// Two-qubit concurrence, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Concurrence(f64);

impl Concurrence {
    pub const ZERO: Concurrence = Concurrence(0.0);
    pub const ONE: Concurrence = Concurrence(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain {
                what: "concurrence",
                value,
            })
        }
    }

    /// Clamps a raw floating-point evaluation into `[0, 1]`.
    pub(crate) fn clamped(raw: f64) -> Self {
        if !(-OVERSHOOT_WARN..=1.0 + OVERSHOOT_WARN).contains(&raw) {
            log::warn!("concurrence {raw:e} outside [0, 1] beyond rounding; clamping");
        }
        Self(raw.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn entanglement(self) -> EntanglementOfFormation {
        entanglement_of_formation(self)
    }
}

/// Entanglement of formation in bits, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntanglementOfFormation(f64);

impl EntanglementOfFormation {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Concurrence of a block-form (X) state: `2·max(|w| - √(uv), 0)`.
pub fn concurrence_x_form(rho: &DensityMatrix4) -> Result<Concurrence> {
    let max_forbidden = X_FORM_ZEROS
        .iter()
        .map(|&(i, j)| rho.get(i, j).norm().max(rho.get(j, i).norm()))
        .fold(0.0, f64::max);
    if max_forbidden > X_FORM_TOL {
        return Err(Error::NotXForm { max_forbidden });
    }
    let u = rho.get(0, 0).re;
    let v = rho.get(3, 3).re;
    let w = rho.get(1, 2).norm();
    let raw = 2.0 * (w - libm::sqrt((u * v).max(0.0))).max(0.0);
    Ok(Concurrence::clamped(raw))
}

/// `σ_y ⊗ σ_y` in the product basis (real).
fn spin_flip() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

/// Wootters' λ values (square roots of the eigenvalues of `ρ·ρ̃`), descending.
///
/// Computed as the singular values of `Xᵀ(σ_y⊗σ_y)X` for the factor
/// `ρ = X·X†` built from the eigendecomposition of ρ. Eigenvalues at
/// rounding level are dropped, so rank-deficient states give exact zeros.
pub fn wootters_spectrum(rho: &DensityMatrix4) -> Result<[f64; 4]> {
    let m = rho.matrix();
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let largest = eig.eigenvalues.max();
    let cutoff = RANK_CUTOFF * largest.max(0.0);
    let mut factor = eig.eigenvectors;
    for (k, &d) in eig.eigenvalues.iter().enumerate() {
        let scale = if d > cutoff { libm::sqrt(d) } else { 0.0 };
        factor.column_mut(k).scale_mut(scale);
    }
    let tau = factor.transpose() * spin_flip() * factor;
    let svd = SVD::new(tau, false, false);
    let mut lambdas = [0.0; 4];
    lambdas.copy_from_slice(svd.singular_values.as_slice());
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas)
}

/// General two-qubit concurrence `max(0, λ₁ - λ₂ - λ₃ - λ₄)`.
pub fn concurrence_wootters(rho: &DensityMatrix4) -> Result<Concurrence> {
    rho.validate()?;
    let l = wootters_spectrum(rho)?;
    Ok(Concurrence::clamped((l[0] - l[1] - l[2] - l[3]).max(0.0)))
}

/// Binary entropy in bits with `0·log₂0 = 0`, given `p` and `q = 1 - p`
/// separately so a tiny `q` keeps full precision.
fn binary_entropy(p: f64, q: f64) -> f64 {
    let term = |x: f64, ln_x: f64| if x > 0.0 { -x * ln_x } else { 0.0 };
    (term(p, libm::log1p(-q)) + term(q, libm::log(q))) / core::f64::consts::LN_2
}

pub fn entanglement_of_formation(c: Concurrence) -> EntanglementOfFormation {
    let c = c.value();
    let s = libm::sqrt((1.0 - c * c).max(0.0));
    // (1 - s)/2 without cancellation for small c
    let q = c * c / (2.0 * (1.0 + s));
    let p = 1.0 - q;
    EntanglementOfFormation(binary_entropy(p, q).clamp(0.0, 1.0))
}

/// Closed-form thermal concurrence of the dimer.
pub fn dimer_concurrence(params: &DimerParams, t: f64) -> Result<Concurrence> {
    check_temperature(t)?;
    if params.j_over_kb >= 0.0 {
        return Ok(Concurrence::ZERO);
    }
    let x = 3.0 * libm::exp(-2.0 * params.j_over_kb.abs() / t);
    Ok(Concurrence::clamped(((1.0 - x) / (1.0 + x)).max(0.0)))
}

/// `T_E = 2|J|/(k_B ln 3)` for an antiferromagnet; `None` otherwise.
pub fn entanglement_temperature(params: &DimerParams) -> Option<f64> {
    (params.j_over_kb < 0.0).then(|| 2.0 * params.j_over_kb.abs() / crate::units::LN_3)
}
