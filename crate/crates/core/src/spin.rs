//! Exact quantum mechanics of the two-spin-1/2 Heisenberg dimer.
//!
//! The Hamiltonian is `H = -(J/2) σ₁·σ₂` written in the product basis
//! `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`. Energies are carried in kelvin (E/k_B), so the
//! singlet sits at `3J/2` and the triplet at `-J/2`.

use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::error::{check_temperature, Error, Result};
use crate::units::{MU_B_OVER_K_B, N_A_MU_B};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_SLACK: f64 = 1e-10;

/// Exchange constant and g-factor of a Heisenberg dimer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    /// J/k_B in kelvin; negative is antiferromagnetic.
    pub j_over_kb: f64,
    /// Isotropic or powder-averaged g-factor.
    pub g: f64,
}

impl DimerParams {
    pub fn new(j_over_kb: f64, g: f64) -> Result<Self> {
        let params = Self { j_over_kb, g };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.j_over_kb.is_finite() {
            return Err(Error::Domain {
                what: "exchange constant J/k_B",
                value: self.j_over_kb,
            });
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::Domain {
                what: "g-factor",
                value: self.g,
            });
        }
        Ok(())
    }

    pub fn is_antiferromagnetic(&self) -> bool {
        self.j_over_kb < 0.0
    }
}

/// Two-qubit density matrix in the fixed product basis.
#[derive(Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Matrix4<Complex64>);

impl fmt::Debug for DensityMatrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.0.row_iter().map(|r| [r[0], r[1], r[2], r[3]]))
            .finish()
    }
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let rho = Self(m);
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix without checking the density-matrix invariants.
    pub fn new_unchecked(m: Matrix4<Complex64>) -> Self {
        Self(m)
    }

    /// Real matrix scaled by `scale`, used for the rational limit states.
    pub fn from_real_scaled(rows: [[f64; 4]; 4], scale: f64) -> Self {
        Self(Matrix4::from_fn(|i, j| Complex64::new(rows[i][j] * scale, 0.0)))
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry"));
        }
        if self.hermiticity_defect() > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix("not Hermitian"));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix("trace differs from one"));
        }
        if self.eigenvalues().iter().any(|&l| l < -PSD_SLACK) {
            return Err(Error::InvalidDensityMatrix("negative eigenvalue"));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest elementwise `|ρᵢⱼ - ρⱼᵢ*|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.0;
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let herm = (self.0 + self.0.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(herm);
        let mut out = [0.0; 4];
        out.copy_from_slice(eig.eigenvalues.as_slice());
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix4) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reduced state of the first spin.
    pub fn partial_trace_second(&self) -> Matrix2<Complex64> {
        let m = &self.0;
        Matrix2::from_fn(|a, b| m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)])
    }

    /// Reduced state of the second spin.
    pub fn partial_trace_first(&self) -> Matrix2<Complex64> {
        let m = &self.0;
        Matrix2::from_fn(|a, b| m[(a, b)] + m[(a + 2, b + 2)])
    }
}

/// The two levels of the dimer and its four eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DimerSpectrum {
    /// Singlet energy `3J/2`, kelvin.
    pub singlet_energy: f64,
    /// Threefold triplet energy `-J/2`, kelvin.
    pub triplet_energy: f64,
    /// Singlet, `|↑↑⟩`, `|↓↓⟩`, symmetric triplet, in that order.
    pub eigenvectors: [Vector4<Complex64>; 4],
}

impl DimerSpectrum {
    pub fn gap(&self) -> f64 {
        (self.singlet_energy - self.triplet_energy).abs()
    }

    pub fn ground_energy(&self) -> f64 {
        self.singlet_energy.min(self.triplet_energy)
    }

    /// Energies in eigenvector order.
    pub fn energies(&self) -> [f64; 4] {
        let t = self.triplet_energy;
        [self.singlet_energy, t, t, t]
    }
}

/// Matrix of `σ₁·σ₂` in the product basis.
pub fn spin_product_matrix() -> Matrix4<f64> {
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 2.0, 0.0, //
        0.0, 2.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    )
}

/// `H/k_B = -(J/2)·σ₁·σ₂`, in kelvin.
pub fn hamiltonian_matrix(params: &DimerParams) -> Matrix4<f64> {
    spin_product_matrix() * (-0.5 * params.j_over_kb)
}

pub fn spectrum(params: &DimerParams) -> DimerSpectrum {
    let j = params.j_over_kb;
    let c = |x: f64| Complex64::new(x, 0.0);
    let h = FRAC_1_SQRT_2;
    DimerSpectrum {
        singlet_energy: 1.5 * j,
        triplet_energy: -0.5 * j,
        eigenvectors: [
            Vector4::new(c(0.0), c(h), c(-h), c(0.0)),
            Vector4::new(c(1.0), c(0.0), c(0.0), c(0.0)),
            Vector4::new(c(0.0), c(0.0), c(0.0), c(1.0)),
            Vector4::new(c(0.0), c(h), c(h), c(0.0)),
        ],
    }
}

/// Singlet and per-state triplet populations at temperature `t`.
///
/// Boltzmann weights are shifted by the ground energy so the partition sum
/// stays in `[1, 4]` for any `|J|/t`.
pub(crate) fn level_populations(j_over_kb: f64, t: f64) -> (f64, f64) {
    let singlet = 1.5 * j_over_kb;
    let triplet = -0.5 * j_over_kb;
    let ground = singlet.min(triplet);
    let ws = libm::exp(-(singlet - ground) / t);
    let wt = libm::exp(-(triplet - ground) / t);
    let z = ws + 3.0 * wt;
    (ws / z, wt / z)
}

/// Gibbs state `exp(-H/k_B t)/Z` of the dimer.
pub fn thermal_state(params: &DimerParams, t: f64) -> Result<DensityMatrix4> {
    check_temperature(t)?;
    let (ps, pt) = level_populations(params.j_over_kb, t);
    let diag = 0.5 * (pt + ps);
    let off = 0.5 * (pt - ps);
    Ok(DensityMatrix4::from_real_scaled(
        [
            [pt, 0.0, 0.0, 0.0],
            [0.0, diag, off, 0.0],
            [0.0, off, diag, 0.0],
            [0.0, 0.0, 0.0, pt],
        ],
        1.0,
    ))
}

/// Limiting thermal states of the dimer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    /// Antiferromagnet at `T → 0`: the pure singlet.
    ZeroTempAfm,
    /// `T → ∞`: the maximally mixed state.
    InfiniteTemp,
    /// Antiferromagnet exactly at the entanglement temperature.
    AtTe,
    /// Ferromagnet at `T → 0`: equal mixture of the triplet.
    TripletMixed,
}

impl LimitKind {
    pub const ALL: [LimitKind; 4] = [
        LimitKind::ZeroTempAfm,
        LimitKind::InfiniteTemp,
        LimitKind::AtTe,
        LimitKind::TripletMixed,
    ];
}

pub fn limit_state(kind: LimitKind) -> DensityMatrix4 {
    match kind {
        LimitKind::ZeroTempAfm => DensityMatrix4::from_real_scaled(
            [
                [0.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, -1.0, 0.0],
                [0.0, -1.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 0.0],
            ],
            0.5,
        ),
        LimitKind::InfiniteTemp => DensityMatrix4::from_real_scaled(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            0.25,
        ),
        LimitKind::AtTe => DensityMatrix4::from_real_scaled(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 2.0, -1.0, 0.0],
                [0.0, -1.0, 2.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            1.0 / 6.0,
        ),
        LimitKind::TripletMixed => DensityMatrix4::from_real_scaled(
            [
                [2.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 1.0, 0.0],
                [0.0, 1.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 2.0],
            ],
            1.0 / 6.0,
        ),
    }
}

/// Diagonal of `(σ₁ᶻ + σ₂ᶻ)/2` in the product basis.
const TOTAL_SZ: [f64; 4] = [1.0, 0.0, 0.0, -1.0];

/// Molar magnetization along z in a field of `b` gauss, erg·G⁻¹·mol⁻¹.
///
/// Diagonalizes `H - B·M_z` numerically; independent of the closed-form
/// susceptibility so it can serve as its oracle.
pub fn magnetization_z(params: &DimerParams, t: f64, b: f64) -> Result<f64> {
    check_temperature(t)?;
    let zeeman = params.g * MU_B_OVER_K_B * b;
    let mut h = hamiltonian_matrix(params);
    for (i, sz) in TOTAL_SZ.iter().enumerate() {
        h[(i, i)] -= zeeman * sz;
    }
    let eig = SymmetricEigen::new(h);
    let ground = eig.eigenvalues.min();
    let mut z = 0.0;
    let mut moment = 0.0;
    for (k, &e) in eig.eigenvalues.iter().enumerate() {
        let w = libm::exp(-(e - ground) / t);
        let v = eig.eigenvectors.column(k);
        let sz: f64 = (0..4).map(|i| v[i] * v[i] * TOTAL_SZ[i]).sum();
        z += w;
        moment += w * sz;
    }
    Ok(N_A_MU_B * params.g * moment / z)
}

/// Central-difference susceptibility `∂M/∂B` at zero field, cm³·mol⁻¹.
pub fn susceptibility_numeric(params: &DimerParams, t: f64, db: f64) -> Result<f64> {
    if !(db > 0.0 && db.is_finite()) {
        return Err(Error::Domain {
            what: "field step",
            value: db,
        });
    }
    let up = magnetization_z(params, t, db)?;
    let down = magnetization_z(params, t, -db)?;
    Ok((up - down) / (2.0 * db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(j: f64) -> DimerParams {
        DimerParams::new(j, 2.0).unwrap()
    }

    #[test]
    fn hamiltonian_for_small_afm_coupling() {
        let h = hamiltonian_matrix(&p(-2.0));
        let expected = Matrix4::new(
            1.0, 0.0, 0.0, 0.0, //
            0.0, -1.0, 2.0, 0.0, //
            0.0, 2.0, -1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        );
        assert_eq!(h, expected);
        assert_eq!(h.trace(), 0.0);
        assert_eq!(hamiltonian_matrix(&p(0.0)), Matrix4::zeros());
    }

    #[test]
    fn hamiltonian_eigenvalues_match_levels() {
        for j in [-68.0, -3.5, 0.0, 10.0, 200.0] {
            let mut ev: [f64; 4] = [0.0; 4];
            ev.copy_from_slice(SymmetricEigen::new(hamiltonian_matrix(&p(j))).eigenvalues.as_slice());
            ev.sort_by(f64::total_cmp);
            let mut expected = [1.5 * j, -0.5 * j, -0.5 * j, -0.5 * j];
            expected.sort_by(f64::total_cmp);
            for (a, b) in ev.iter().zip(expected) {
                assert!((a - b).abs() < 1e-12 * (1.0 + j.abs()), "J={j}: {ev:?}");
            }
        }
    }

    #[test]
    fn spectrum_levels() {
        let s = spectrum(&p(-68.0));
        assert_eq!(s.singlet_energy, -102.0);
        assert_eq!(s.triplet_energy, 34.0);
        assert_eq!(s.gap(), 136.0);
        assert_eq!(s.ground_energy(), s.singlet_energy);

        let s = spectrum(&p(0.0));
        assert!(s.energies().iter().all(|&e| e == 0.0));

        let s = spectrum(&p(10.0));
        assert_eq!(s.triplet_energy, -5.0);
        assert_eq!(s.singlet_energy, 15.0);
    }

    #[test]
    fn eigenvectors_are_orthonormal_eigenstates() {
        let params = p(-7.0);
        let s = spectrum(&params);
        let h = hamiltonian_matrix(&params).map(|x| Complex64::new(x, 0.0));
        for (a, va) in s.eigenvectors.iter().enumerate() {
            for (b, vb) in s.eigenvectors.iter().enumerate() {
                let dot = va.dotc(vb);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
            let hv = h * va;
            let resid = hv - va.scale(s.energies()[a]);
            assert!(resid.norm() < 1e-12);
        }
    }

    #[test]
    fn thermal_state_rejects_non_positive_temperature() {
        assert!(matches!(
            thermal_state(&p(-68.0), 0.0),
            Err(Error::NonPositiveTemperature(_))
        ));
        assert!(thermal_state(&p(-68.0), -1.0).is_err());
        assert!(magnetization_z(&p(-68.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn thermal_state_survives_extreme_ratios() {
        for &(j, t) in &[(-200.0, 0.001), (200.0, 0.001), (-1e4, 1.0), (1e4, 1.0)] {
            let rho = thermal_state(&p(j), t).unwrap();
            rho.validate().unwrap();
        }
    }

    #[test]
    fn thermal_limits() {
        let rho = thermal_state(&p(-68.0), 0.001).unwrap();
        assert!(rho.max_abs_diff(&limit_state(LimitKind::ZeroTempAfm)) < 1e-9);

        let rho = thermal_state(&p(-68.0), 1e9).unwrap();
        assert!(rho.max_abs_diff(&limit_state(LimitKind::InfiniteTemp)) < 1e-6);

        let te = 2.0 * 68.0 / libm::log(3.0);
        let rho = thermal_state(&p(-68.0), te).unwrap();
        assert!(rho.max_abs_diff(&limit_state(LimitKind::AtTe)) < 1e-10);

        let rho = thermal_state(&p(68.0), 0.001).unwrap();
        assert!(rho.max_abs_diff(&limit_state(LimitKind::TripletMixed)) < 1e-9);
    }

    #[test]
    fn limit_states_are_valid() {
        for kind in LimitKind::ALL {
            limit_state(kind).validate().unwrap();
        }
    }

    #[test]
    fn density_matrix_validation_errors() {
        let mut m = *limit_state(LimitKind::InfiniteTemp).matrix();
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix4::new(m).is_err());

        let m = limit_state(LimitKind::InfiniteTemp).matrix().scale(2.0);
        assert!(DensityMatrix4::new(m).is_err());

        let neg = DensityMatrix4::from_real_scaled(
            [
                [1.5, 0.0, 0.0, 0.0],
                [0.0, -0.5, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0],
            ],
            1.0,
        );
        assert_eq!(neg.validate(), Err(Error::InvalidDensityMatrix("negative eigenvalue")));
    }

    #[test]
    fn partial_traces_of_singlet_are_maximally_mixed() {
        let rho = limit_state(LimitKind::ZeroTempAfm);
        let half = Matrix2::identity().map(|x: f64| Complex64::new(x * 0.5, 0.0));
        assert!((rho.partial_trace_first() - half).norm() < 1e-15);
        assert!((rho.partial_trace_second() - half).norm() < 1e-15);
    }

    #[test]
    fn magnetization_is_odd_and_vanishes_at_zero_field() {
        let params = p(-68.0);
        assert_eq!(magnetization_z(&params, 50.0, 0.0).unwrap(), 0.0);
        let up = magnetization_z(&params, 50.0, 3.0).unwrap();
        let down = magnetization_z(&params, 50.0, -3.0).unwrap();
        assert_relative_eq!(up, -down, max_relative = 1e-12);
    }

    #[test]
    fn free_spins_follow_curie_law() {
        // Two free spins, first order in b: M/b = N_A g² μ_B² / (2 k_B t).
        let params = p(0.0);
        let (t, b) = (10.0, 0.5);
        let m = magnetization_z(&params, t, b).unwrap();
        let curie = crate::units::C1 * 4.0 / (2.0 * t);
        assert_relative_eq!(m / b, curie, max_relative = 1e-6);
    }

    #[test]
    fn numeric_susceptibility_examples() {
        let chi = susceptibility_numeric(&p(0.0), 100.0, 1.0).unwrap();
        assert_relative_eq!(chi, 0.75025 / 100.0, max_relative = 1e-6);

        let zero_g = DimerParams {
            j_over_kb: -68.0,
            g: 0.0,
        };
        assert_eq!(susceptibility_numeric(&zero_g, 100.0, 1.0).unwrap(), 0.0);

        assert!(susceptibility_numeric(&p(0.0), 100.0, 0.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(DimerParams::new(-68.0, 0.0).is_err());
        assert!(DimerParams::new(f64::NAN, 2.0).is_err());
        assert!(DimerParams::new(-68.0, 2.0).unwrap().is_antiferromagnetic());
    }
}
