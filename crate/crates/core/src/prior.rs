// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Unnormalised prior densities over Bloch coordinates.
//!
//! Normalisation constants are never computed: the assigned state is a ratio
//! of two integrals against the same prior, so they cancel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qutrit::{det_from_bloch, symmetry_map, Bloch};
use crate::scalar::Real;

/// Exponent `2d + 1` of the Slater prior for a three-level system.
pub const DEFAULT_SLATER_EXPONENT: u32 = 7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSpec<T> {
    /// Flat in Bloch coordinates.
    Constant,
    /// `exp(-tr[(rho - rho_hat)^2] / s^2)` centred on `center`.
    GaussianLike { center: Bloch<T>, breadth: T },
    /// `(det rho)^exponent`, clamped to zero where the determinant is negative.
    Slater { exponent: u32 },
}

impl<T: Real> PriorSpec<T> {
    pub fn constant() -> Self {
        PriorSpec::Constant
    }

    pub fn gaussian(center: Bloch<T>, breadth: T) -> Result<Self> {
        center.check_box()?;
        if !breadth.is_finite() || breadth <= T::zero() {
            return Err(Error::InvalidArgument(format!(
                "Gaussian breadth must be positive, got {breadth}"
            )));
        }
        Ok(PriorSpec::GaussianLike { center, breadth })
    }

    pub fn slater(exponent: u32) -> Self {
        PriorSpec::Slater { exponent }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PriorSpec::Constant => "constant",
            PriorSpec::GaussianLike { .. } => "gaussian",
            PriorSpec::Slater { .. } => "slater",
        }
    }

    /// Evaluates the density at a point already known to lie in the box.
    #[inline]
    pub fn eval_unchecked(&self, x: &[T; 8]) -> T {
        match self {
            PriorSpec::Constant => T::one(),
            PriorSpec::GaussianLike { center, breadth } => {
                // tr[(rho - rho_hat)^2] = |x - x_hat|^2 / 2
                let d2 = x
                    .iter()
                    .zip(center.0.iter())
                    .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
                (-d2 / (T::lit(2.0) * *breadth * *breadth)).exp()
            }
            PriorSpec::Slater { exponent } => {
                let det = det_from_bloch(x).max(T::zero());
                det.powi(*exponent as i32)
            }
        }
    }

    /// The prior `g'` with `g'(x) = g(symmetry_map(x))`.
    pub fn mirrored(&self) -> Self {
        match self {
            PriorSpec::GaussianLike { center, breadth } => PriorSpec::GaussianLike {
                center: symmetry_map(center),
                breadth: *breadth,
            },
            other => other.clone(),
        }
    }

    /// Whether the prior is unchanged by [`PriorSpec::mirrored`].
    pub fn is_mirror_invariant(&self) -> bool {
        *self == self.mirrored()
    }
}

/// Evaluates `g(x)` with a domain check on `x`.
pub fn eval_prior<T: Real>(spec: &PriorSpec<T>, x: &Bloch<T>) -> Result<T> {
    x.check_box()?;
    let v = spec.eval_unchecked(&x.0);
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("{} prior at {:?}", spec.name(), x.0)));
    }
    Ok(v)
}
