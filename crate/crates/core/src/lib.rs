// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Bayesian posterior-mean state assignment for a three-level system
//! (qutrit) measured with a single von Neumann measurement, from
//! average-value data and a prior over the Bloch body, plus the closed-form
//! maximum-entropy state for comparison.
//!
//! The geometry, prior and maximum-entropy modules are generic over the
//! [`Real`] scalar (`f32` or `f64`); the Monte Carlo machinery runs in `f64`.
//! The aliases below name the `f64` instantiations.

#![allow(clippy::needless_range_loop)]

pub mod assignment;
pub mod cli;
pub mod error;
pub mod integrator;
pub mod maxent;
pub mod prior;
pub mod qutrit;
pub mod scalar;
pub mod sobol;

pub use assignment::{
    assign_finite_n, assign_large_n, assign_large_n_direct, assign_large_n_region, enumerate_phi,
    AssignmentResult, AverageRegion, FrequencyVector, Method,
};
pub use error::{Error, Result};
pub use integrator::{
    integrate_slice, integrate_slice_with_indicator, IntegratorConfig, Sequence,
    SliceIntegralEstimate,
};
pub use maxent::{maxent_mu, maxent_state};
pub use qutrit::{
    bloch_to_density, density_to_bloch, expectation_lambda3, is_physical, symmetry_map, Bloch,
    Density, GellMannBasis,
};
pub use scalar::Real;

pub type BlochVector = qutrit::Bloch<f64>;
pub type DensityMatrix = qutrit::Density<f64>;
pub type Prior = prior::PriorSpec<f64>;
pub type MaxEntResult = maxent::MaxEntResult<f64>;

pub type BlochVectorF32 = qutrit::Bloch<f32>;
pub type DensityMatrixF32 = qutrit::Density<f32>;
