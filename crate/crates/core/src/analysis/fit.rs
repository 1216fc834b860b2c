//! Damped least-squares (Levenberg–Marquardt) fit of [`CompositeModel`] to a
//! measured curve.
//!
//! Internally p is optimized as `logit(p)` so it stays in `(0, 1)`; J/k_B, g
//! and θ are used directly. Steps that would push g to zero or θ onto the
//! data are rejected like any cost increase.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::analysis::curve::SusceptibilityCurve;
use crate::analysis::model::{model_chi, CompositeModel};
use crate::error::{Error, Result};
use crate::units::C1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FitParam {
    /// Exchange constant J/k_B.
    J,
    /// Dimer g-factor.
    G,
    /// Impurity fraction p.
    P,
    /// Weiss temperature θ.
    Theta,
}

impl FitParam {
    pub const ALL: [FitParam; 4] = [FitParam::J, FitParam::G, FitParam::P, FitParam::Theta];

    pub fn name(self) -> &'static str {
        match self {
            FitParam::J => "J",
            FitParam::G => "g",
            FitParam::P => "p",
            FitParam::Theta => "theta",
        }
    }
}

impl fmt::Display for FitParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "J" | "j" | "j_over_kb" => Ok(FitParam::J),
            "g" | "G" => Ok(FitParam::G),
            "p" | "P" | "impurity_fraction" => Ok(FitParam::P),
            "theta" | "weiss_theta" => Ok(FitParam::Theta),
            _ => Err(Error::InvalidModel("unknown fit parameter (expected J, g, p or theta)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Converged once every parameter step satisfies `|δ| ≤ tol·(|x| + 1)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Bound on the scaled gradient (cosine between residual and Jacobian
    /// columns) required for convergence.
    pub gradient_tol: f64,
    pub initial_damping: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            gradient_tol: 1e-6,
            initial_damping: 1e-3,
        }
    }
}

/// One-sigma uncertainties; `None` for frozen or undetermined parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StdErrors {
    pub j_over_kb: Option<f64>,
    pub g: Option<f64>,
    pub impurity_fraction: Option<f64>,
    pub weiss_theta: Option<f64>,
}

impl StdErrors {
    pub fn get(&self, param: FitParam) -> Option<f64> {
        match param {
            FitParam::J => self.j_over_kb,
            FitParam::G => self.g,
            FitParam::P => self.impurity_fraction,
            FitParam::Theta => self.weiss_theta,
        }
    }

    fn set(&mut self, param: FitParam, value: Option<f64>) {
        let slot = match param {
            FitParam::J => &mut self.j_over_kb,
            FitParam::G => &mut self.g,
            FitParam::P => &mut self.impurity_fraction,
            FitParam::Theta => &mut self.weiss_theta,
        };
        *slot = value;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: CompositeModel,
    pub free: Vec<FitParam>,
    pub std_errors: StdErrors,
    /// Weighted residual sum of squares `Σ((χᵢ - model)/σᵢ)²`.
    pub rss: f64,
    pub points: usize,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

impl FitResult {
    pub fn degrees_of_freedom(&self) -> usize {
        self.points.saturating_sub(self.free.len())
    }
}

pub fn param_value(model: &CompositeModel, param: FitParam) -> f64 {
    match param {
        FitParam::J => model.dimer.j_over_kb,
        FitParam::G => model.dimer.g,
        FitParam::P => model.impurity_fraction,
        FitParam::Theta => model.weiss_theta,
    }
}

pub fn set_param_value(model: &mut CompositeModel, param: FitParam, value: f64) {
    match param {
        FitParam::J => model.dimer.j_over_kb = value,
        FitParam::G => model.dimer.g = value,
        FitParam::P => model.impurity_fraction = value,
        FitParam::Theta => model.weiss_theta = value,
    }
}

fn logit(p: f64) -> f64 {
    libm::log(p / (1.0 - p))
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

const P_FLOOR: f64 = 1e-9;

struct Problem<'a> {
    curve: &'a SusceptibilityCurve,
    free: Vec<FitParam>,
    base: CompositeModel,
    t_min: f64,
}

impl Problem<'_> {
    fn encode(&self, model: &CompositeModel) -> DVector<f64> {
        DVector::from_iterator(
            self.free.len(),
            self.free.iter().map(|&p| match p {
                FitParam::P => logit(model.impurity_fraction.clamp(P_FLOOR, 1.0 - P_FLOOR)),
                other => param_value(model, other),
            }),
        )
    }

    fn decode(&self, x: &DVector<f64>) -> Option<CompositeModel> {
        let mut m = self.base;
        for (&p, &v) in self.free.iter().zip(x.iter()) {
            let v = if p == FitParam::P { logistic(v) } else { v };
            set_param_value(&mut m, p, v);
        }
        let ok = x.iter().all(|v| v.is_finite())
            && m.dimer.g > 0.0
            && m.impurity_fraction < 1.0
            && m.weiss_theta < self.t_min;
        ok.then_some(m)
    }

    fn residuals(&self, model: &CompositeModel) -> Option<DVector<f64>> {
        let pts = self.curve.points();
        let mut r = DVector::zeros(pts.len());
        for (slot, p) in r.iter_mut().zip(pts) {
            let m = model_chi(model, p.t).ok()?;
            *slot = (p.chi - m) / p.sigma.unwrap_or(1.0);
        }
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    /// Jacobian of the residuals with respect to the internal parameters.
    fn jacobian(&self, model: &CompositeModel) -> DMatrix<f64> {
        let pts = self.curve.points();
        let mut jac = DMatrix::zeros(pts.len(), self.free.len());
        for (i, p) in pts.iter().enumerate() {
            let grad = model_gradient(model, p.t);
            let w = p.sigma.unwrap_or(1.0);
            for (k, &param) in self.free.iter().enumerate() {
                let d = match param {
                    FitParam::J => grad[0],
                    FitParam::G => grad[1],
                    // dp/dlogit = p(1 - p)
                    FitParam::P => grad[2] * model.impurity_fraction * (1.0 - model.impurity_fraction),
                    FitParam::Theta => grad[3],
                };
                jac[(i, k)] = -d / w;
            }
        }
        jac
    }
}

/// Partial derivatives of `model_chi` with respect to (J/k_B, g, p, θ).
pub fn model_gradient(model: &CompositeModel, t: f64) -> [f64; 4] {
    let j = model.dimer.j_over_kb;
    let g = model.dimer.g;
    let p = model.impurity_fraction;
    let a = 2.0 * C1 * g * g;
    // bb = a / (t (3 + x)), x = exp(-2J/t); written with exponentials ≤ 1
    let (bb, dbb_dj) = if j >= 0.0 {
        let x = libm::exp(-2.0 * j / t);
        (a / (t * (3.0 + x)), 2.0 * a * x / (t * t * (3.0 + x) * (3.0 + x)))
    } else {
        let y = libm::exp(2.0 * j / t);
        let d = 3.0 * y + 1.0;
        (a * y / (t * d), 2.0 * a * y / (t * t * d * d))
    };
    let curie = model.impurity_curie_constant();
    let denom = t - model.weiss_theta;
    let imp = curie / denom;
    let dimp_dg = if model.impurity_shares_g { 2.0 * imp / g } else { 0.0 };
    [
        (1.0 - p) * dbb_dj,
        (1.0 - p) * 2.0 * bb / g + p * dimp_dg,
        imp - bb,
        p * curie / (denom * denom),
    ]
}

fn solve_damped(a: &DMatrix<f64>, grad: &DVector<f64>, damping: f64) -> Option<DVector<f64>> {
    let scale = a.diagonal().max().max(f64::MIN_POSITIVE);
    let mut m = a.clone();
    for k in 0..m.nrows() {
        let d = a[(k, k)].max(1e-12 * scale);
        m[(k, k)] += damping * d;
    }
    let step = m.cholesky()?.solve(&(-grad));
    step.iter().all(|v| v.is_finite()).then_some(step)
}

/// Largest cosine between the residual vector and a Jacobian column, with
/// the residual norm floored at 1e-8 of the weighted data norm.
fn scaled_gradient(jac: &DMatrix<f64>, r: &DVector<f64>, data_norm: f64) -> f64 {
    let rn = r.norm().max(1e-8 * data_norm);
    if rn == 0.0 {
        return 0.0;
    }
    jac.column_iter()
        .map(|col| {
            let cn = col.norm();
            if cn == 0.0 {
                0.0
            } else {
                col.dot(r).abs() / (cn * rn)
            }
        })
        .fold(0.0, f64::max)
}

const MAX_DAMPING: f64 = 1e16;

/// Fits the free parameters of `init` to `curve`.
///
/// Non-convergence is reported through [`FitResult::converged`]; only
/// invalid input is an error.
pub fn fit_curve(
    curve: &SusceptibilityCurve,
    free: &[FitParam],
    init: &CompositeModel,
    config: &FitConfig,
) -> Result<FitResult> {
    let mut free: Vec<FitParam> = free.to_vec();
    free.sort();
    free.dedup();
    let needed = free.len() + 1;
    if curve.len() < needed {
        return Err(Error::InsufficientPoints {
            needed,
            got: curve.len(),
        });
    }
    init.validate_for(curve)?;

    let problem = Problem {
        curve,
        t_min: curve.min_temperature().unwrap_or(f64::INFINITY),
        free,
        base: *init,
    };
    let data_norm = libm::sqrt(
        curve
            .points()
            .iter()
            .map(|p| {
                let w = p.chi / p.sigma.unwrap_or(1.0);
                w * w
            })
            .sum::<f64>(),
    );

    let start_r = problem
        .residuals(init)
        .ok_or(Error::InvalidModel("initial model is not finite on the data"))?;
    if problem.free.is_empty() {
        return Ok(FitResult {
            model: *init,
            free: vec![],
            std_errors: StdErrors::default(),
            rss: start_r.norm_squared(),
            points: curve.len(),
            iterations: 0,
            converged: true,
            gradient_norm: 0.0,
        });
    }

    let mut x = problem.encode(init);
    let mut model = problem
        .decode(&x)
        .ok_or(Error::InvalidModel("initial model violates parameter bounds"))?;
    let mut r = problem
        .residuals(&model)
        .ok_or(Error::InvalidModel("initial model is not finite on the data"))?;
    let mut cost = r.norm_squared();
    let mut damping = config.initial_damping;
    let mut iterations = 0;
    let mut small_step = false;

    'outer: while iterations < config.max_iter {
        iterations += 1;
        let jac = problem.jacobian(&model);
        let a = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        loop {
            let Some(step) = solve_damped(&a, &grad, damping) else {
                damping *= 10.0;
                if damping > MAX_DAMPING {
                    break 'outer;
                }
                continue;
            };
            let tiny = step
                .iter()
                .zip(x.iter())
                .all(|(d, v)| d.abs() <= config.tol * (v.abs() + 1.0));
            let x_new = &x + &step;
            let trial = problem
                .decode(&x_new)
                .and_then(|m| problem.residuals(&m).map(|r| (m, r)));
            match trial {
                Some((m_new, r_new)) if r_new.norm_squared() <= cost => {
                    x = x_new;
                    model = m_new;
                    cost = r_new.norm_squared();
                    r = r_new;
                    damping = (damping / 10.0).max(1e-12);
                    if tiny {
                        small_step = true;
                        break 'outer;
                    }
                    break;
                }
                _ => {
                    if tiny {
                        // no descent left at rounding level
                        small_step = true;
                        break 'outer;
                    }
                    damping *= 10.0;
                    if damping > MAX_DAMPING {
                        break 'outer;
                    }
                }
            }
        }
    }

    let jac = problem.jacobian(&model);
    let gradient_norm = scaled_gradient(&jac, &r, data_norm);
    let n = curve.len();
    let k = problem.free.len();
    let variance_scale = if curve.has_sigma() {
        1.0
    } else {
        cost / (n - k).max(1) as f64
    };
    let mut std_errors = StdErrors::default();
    if let Some(cov) = (jac.transpose() * &jac).try_inverse() {
        for (idx, &param) in problem.free.iter().enumerate() {
            let var = cov[(idx, idx)] * variance_scale;
            let se = (var >= 0.0 && var.is_finite()).then(|| libm::sqrt(var));
            let se = match param {
                FitParam::P => se.map(|s| s * model.impurity_fraction * (1.0 - model.impurity_fraction)),
                _ => se,
            };
            std_errors.set(param, se);
        }
    }

    Ok(FitResult {
        model,
        free: problem.free,
        std_errors,
        rss: cost,
        points: n,
        iterations,
        converged: small_step && gradient_norm <= config.gradient_tol,
        gradient_norm,
    })
}
