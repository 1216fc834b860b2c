//! Principal branch of the Lambert W function, `W·e^W = x`.

use core::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH_POINT: f64 = -1.0 / E;
const TOL: f64 = 1e-14;
const MAX_ITER: usize = 50;

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // expansion about the branch point in p = √(2(ex + 1))
        let p = libm::sqrt((2.0 * (E * x + 1.0)).max(0.0));
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        libm::log1p(x)
    }
}

/// Principal-branch Lambert W for `x ≥ -1/e`, by Halley iteration.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT {
        return Err(Error::Domain {
            what: "Lambert W argument",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_ITER {
        let ew = libm::exp(w);
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < f64::EPSILON {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= TOL * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}
