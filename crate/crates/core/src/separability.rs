//! Explicit separable decompositions `ρ = Σ wᵢ ρᵢ⁽¹⁾ ⊗ ρᵢ⁽²⁾`.

use alloc::vec::Vec;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::DensityMatrix4;

const TERM_TOL: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-12;

pub type Qubit = Matrix2<Complex64>;

/// Eigenstates of the Pauli operators, as projectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliState {
    /// `|0⟩`
    ZUp,
    /// `|1⟩`
    ZDown,
    /// `(|0⟩ + |1⟩)/√2`
    XUp,
    /// `(|0⟩ - |1⟩)/√2`
    XDown,
    /// `(|0⟩ + i|1⟩)/√2`
    YUp,
    /// `(|0⟩ - i|1⟩)/√2`
    YDown,
}

impl PauliState {
    /// The orthogonal state on the same axis.
    pub fn flipped(self) -> Self {
        use PauliState::*;
        match self {
            ZUp => ZDown,
            ZDown => ZUp,
            XUp => XDown,
            XDown => XUp,
            YUp => YDown,
            YDown => YUp,
        }
    }

    pub fn projector(self) -> Qubit {
        let c = Complex64::new;
        let (a, b, d) = match self {
            PauliState::ZUp => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            PauliState::ZDown => (c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
            PauliState::XUp => (c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)),
            PauliState::XDown => (c(0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)),
            PauliState::YUp => (c(0.5, 0.0), c(0.0, -0.5), c(0.5, 0.0)),
            PauliState::YDown => (c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0)),
        };
        Matrix2::new(a, b, b.conj(), d)
    }
}

const PAULI_STATES: [PauliState; 6] = [
    PauliState::ZUp,
    PauliState::ZDown,
    PauliState::XUp,
    PauliState::XDown,
    PauliState::YUp,
    PauliState::YDown,
];

#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub rho_a: Qubit,
    pub rho_b: Qubit,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProductDecomposition {
    pub terms: Vec<ProductTerm>,
}

fn qubit_defect(rho: &Qubit) -> f64 {
    let herm = (rho[(0, 1)] - rho[(1, 0)].conj())
        .norm()
        .max(rho[(0, 0)].im.abs())
        .max(rho[(1, 1)].im.abs());
    let trace = (rho[(0, 0)].re + rho[(1, 1)].re - 1.0).abs();
    // 2×2 Hermitian with unit trace is PSD iff det ≥ 0
    let det = rho[(0, 0)].re * rho[(1, 1)].re - rho[(0, 1)].norm_sqr();
    herm.max(trace).max((-det).max(0.0))
}

fn kron(a: &Qubit, b: &Qubit) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

impl ProductDecomposition {
    /// Indices of terms with a negative or non-finite weight or an invalid
    /// single-qubit state, and the total weight.
    pub fn defects(&self) -> (Vec<usize>, f64) {
        let bad = self
            .terms
            .iter()
            .enumerate()
            .filter(|(_, t)| {
                !(t.weight >= 0.0 && t.weight.is_finite())
                    || qubit_defect(&t.rho_a) > TERM_TOL
                    || qubit_defect(&t.rho_b) > TERM_TOL
            })
            .map(|(i, _)| i)
            .collect();
        (bad, self.terms.iter().map(|t| t.weight).sum())
    }

    pub fn validate(&self) -> Result<()> {
        let (terms, weight_sum) = self.defects();
        if terms.is_empty() && (weight_sum - 1.0).abs() <= WEIGHT_SUM_TOL {
            Ok(())
        } else {
            Err(Error::InvalidDecomposition { terms, weight_sum })
        }
    }

    fn mixture(&self) -> Matrix4<Complex64> {
        self.terms.iter().fold(Matrix4::zeros(), |acc, t| {
            acc + kron(&t.rho_a, &t.rho_b).scale(t.weight)
        })
    }
}

/// `Σ wᵢ ρᵢ⁽¹⁾ ⊗ ρᵢ⁽²⁾` of a valid decomposition.
pub fn reconstruct(decomp: &ProductDecomposition) -> Result<DensityMatrix4> {
    decomp.validate()?;
    DensityMatrix4::new(decomp.mixture())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub ok: bool,
    pub max_abs_residual: f64,
    /// Terms that violate the decomposition invariants.
    pub invalid_terms: Vec<usize>,
    pub weight_sum: f64,
}

pub fn verify_decomposition(decomp: &ProductDecomposition, target: &DensityMatrix4, tol: f64) -> VerificationReport {
    let (invalid_terms, weight_sum) = decomp.defects();
    let valid = invalid_terms.is_empty() && (weight_sum - 1.0).abs() <= WEIGHT_SUM_TOL;
    let max_abs_residual = DensityMatrix4::new_unchecked(decomp.mixture()).max_abs_diff(target);
    VerificationReport {
        ok: valid && max_abs_residual <= tol,
        max_abs_residual,
        invalid_terms,
        weight_sum,
    }
}

/// States with a known six-term separable decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    /// The dimer at its entanglement temperature.
    AtTe,
    /// Equal mixture of the three triplet states.
    TripletMixed,
}

/// Equal-weight mixture over the six Pauli eigenstates on the first spin.
///
/// For the state at `T_E` the second spin carries the antipodal state, giving
/// `(I⊗I - σ₁·σ₂/3)/4`; for the triplet mixture it carries the same state,
/// giving `(I⊗I + σ₁·σ₂/3)/4`.
pub fn canonical_decomposition(kind: DecompositionKind) -> ProductDecomposition {
    let terms = PAULI_STATES
        .iter()
        .map(|&s| {
            let partner = match kind {
                DecompositionKind::AtTe => s.flipped(),
                DecompositionKind::TripletMixed => s,
            };
            ProductTerm {
                weight: 1.0 / 6.0,
                rho_a: s.projector(),
                rho_b: partner.projector(),
            }
        })
        .collect();
    ProductDecomposition { terms }
}
