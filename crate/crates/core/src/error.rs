// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate x{index} = {value} lies outside the bounding box")]
    OutOfBox { index: usize, value: f64 },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix trace is {0}, expected 1")]
    WrongTrace(f64),

    #[error("operator is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPhysical(f64),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("average value {0} is an endpoint; use the pure-state limit")]
    Endpoint(f64),

    #[error("no physical sample with non-zero weight after {0} samples (degenerate slice)")]
    DegenerateSlice(u64),

    #[error("component x{index} estimate {value:e} is {sigmas:.2} standard errors from zero")]
    SymmetryViolation { index: usize, value: f64, sigmas: f64 },

    #[error("no frequency vector is compatible with the data region")]
    IncompatibleData,

    #[error("posterior weights underflowed for N = {0}; use the large-N path")]
    Underflow(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
