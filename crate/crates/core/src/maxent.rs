// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form maximum-entropy state under a single `<lambda_3> = m` constraint.
//!
//! The maximiser is `exp(-mu lambda_3) / tr exp(-mu lambda_3)`. With
//! `t = exp(mu)` the state is `diag(1, t, t^2) / (1 + t + t^2)`, which stays
//! finite as `|mu|` grows; `t(-m) = 1/t(m)` so only `m >= 0` is evaluated
//! directly.

use crate::error::{Error, Result};
use crate::qutrit::{density_to_bloch, Density, X8};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxEntResult<T> {
    pub rho: Density<T>,
    /// Lagrange multiplier; infinite at the endpoints.
    pub mu: T,
    pub x8: T,
}

fn check_open_interval<T: Real>(mbar: T) -> Result<()> {
    if !mbar.is_finite() || mbar.abs() > T::one() {
        return Err(Error::InvalidArgument(format!(
            "average value {mbar} outside [-1, 1]"
        )));
    }
    if mbar.abs() == T::one() {
        return Err(Error::Endpoint(mbar.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `exp(mu(m))` for `0 <= m < 1`; lies in `(0, 1]`.
fn multiplier_exp<T: Real>(m: T) -> T {
    let root = (T::lit(4.0) - T::lit(3.0) * m * m).sqrt();
    // (-m + root) / (2(m + 1)), rewritten to avoid cancellation near m = 1:
    // (root - m)(root + m) = 4(1 - m^2)
    T::lit(2.0) * (T::one() - m) / (root + m)
}

/// `mu(m) = ln[(-m + sqrt(4 - 3 m^2)) / (2 (m + 1))]` for `-1 < m < 1`.
pub fn maxent_mu<T: Real>(mbar: T) -> Result<T> {
    check_open_interval(mbar)?;
    let t = multiplier_exp(mbar.abs());
    let mu = t.ln();
    Ok(if mbar < T::zero() { -mu } else { mu })
}

/// The maximum-entropy state for `<lambda_3> = mbar`, `|mbar| <= 1`.
pub fn maxent_state<T: Real>(mbar: T) -> Result<MaxEntResult<T>> {
    if !mbar.is_finite() || mbar.abs() > T::one() {
        return Err(Error::InvalidArgument(format!(
            "average value {mbar} outside [-1, 1]"
        )));
    }
    let (diag, mu) = if mbar.abs() == T::one() {
        let (o, z) = (T::one(), T::zero());
        if mbar > T::zero() {
            ([o, z, z], T::neg_infinity())
        } else {
            ([z, z, o], T::infinity())
        }
    } else {
        let t = multiplier_exp(mbar.abs());
        let norm = T::one() + t + t * t;
        let (hi, mid, lo) = (T::one() / norm, t / norm, t * t / norm);
        if mbar < T::zero() {
            ([lo, mid, hi], -t.ln())
        } else {
            ([hi, mid, lo], t.ln())
        }
    };
    let rho = Density::diagonal(diag)?;
    let x8 = density_to_bloch(&rho)[X8];
    Ok(MaxEntResult { rho, mu, x8 })
}
