// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction shared by the exact linear-algebra modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Equality tolerance for exact-algebra assertions (about 1e-12 for `f64`).
    #[inline]
    fn tolerance() -> Self {
        Self::epsilon() * Self::lit(4096.0)
    }

    /// Roundoff slack used by the positive-semidefiniteness test.
    #[inline]
    fn psd_slack() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}
