// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Posterior-mean state assignment from average-value data.
//!
//! Three data models are supported:
//!
//! * [`assign_large_n`]: the average is known exactly (`N -> infinity`); the
//!   posterior lives on the slice `x3 = mbar`.
//! * [`assign_large_n_region`]: the average is known to lie in a region; the
//!   posterior is the prior restricted to `x3` in that region.
//! * [`assign_finite_n`]: `N` repetitions whose average lies in a region; the
//!   likelihood sums multinomial probabilities over every compatible
//!   frequency vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{
    integrate_full, integrate_slice, integrate_slice_with_indicator, DataWeight,
    IntegratorConfig, SliceIntegralEstimate,
};
use crate::prior::PriorSpec;
use crate::qutrit::{
    bloch_to_density, diagonal_from_bloch, is_physical_unchecked, symmetry_map, x8_max, Bloch,
    Density, OFF_DIAGONAL, X3, X8,
};

/// Outcome values attached to the projectors onto `|1>, |0>, |-1>`.
pub const OUTCOME_VALUES: [f64; 3] = [1.0, 0.0, -1.0];

/// Components whose estimate is further than this many standard errors from
/// zero are treated as a broken symmetry rather than noise.
pub const SUPPRESSION_SIGMAS: f64 = 4.0;

/// Finite union of closed intervals inside `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageRegion {
    intervals: Vec<(f64, f64)>,
}

impl AverageRegion {
    /// Sorts and merges the intervals. Each must satisfy
    /// `-1 <= lo <= hi <= 1`.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidArgument("data region is empty".into()));
        }
        for &(lo, hi) in &intervals {
            if !lo.is_finite() || !hi.is_finite() || lo > hi || lo < -1.0 || hi > 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "interval [{lo}, {hi}] is not a closed sub-interval of [-1, 1]"
                )));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(AverageRegion { intervals: merged })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn point(v: f64) -> Result<Self> {
        Self::new(vec![(v, v)])
    }

    pub fn full() -> Self {
        AverageRegion {
            intervals: vec![(-1.0, 1.0)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, v: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= v && v <= hi)
    }

    pub fn has_interior(&self) -> bool {
        self.intervals.iter().any(|&(lo, hi)| hi > lo)
    }

    /// Smallest interval containing the region.
    pub fn hull(&self) -> (f64, f64) {
        (self.intervals[0].0, self.intervals[self.intervals.len() - 1].1)
    }

    /// The value, if the region is a single point.
    pub fn single_point(&self) -> Option<f64> {
        match self.intervals.as_slice() {
            [(lo, hi)] if lo == hi => Some(*lo),
            _ => None,
        }
    }
}

/// Absolute frequencies `(N1, N2, N3)` of the three outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FrequencyVector(pub [u32; 3]);

impl FrequencyVector {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `sum_i N_i m_i / N` for the given outcome values.
    pub fn average_with(&self, values: [f64; 3]) -> f64 {
        let s: f64 = self.0.iter().zip(values).map(|(&n, m)| n as f64 * m).sum();
        s / self.total() as f64
    }

    pub fn average(&self) -> f64 {
        self.average_with(OUTCOME_VALUES)
    }
}

/// Every frequency vector of `n` outcomes whose average lies in `region`,
/// in lexicographic order.
pub fn enumerate_phi_with_values(
    region: &AverageRegion,
    n: u32,
    values: [f64; 3],
) -> Vec<FrequencyVector> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for n1 in 0..=n {
        for n2 in 0..=n - n1 {
            let f = FrequencyVector([n1, n2, n - n1 - n2]);
            if region.contains(f.average_with(values)) {
                out.push(f);
            }
        }
    }
    out
}

/// [`enumerate_phi_with_values`] with outcome values `(1, 0, -1)`.
pub fn enumerate_phi(region: &AverageRegion, n: u32) -> Vec<FrequencyVector> {
    enumerate_phi_with_values(region, n, OUTCOME_VALUES)
}

fn ln_factorials(n: u32) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0f64;
    table.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// `sum over phi of prod_i rho_ii^N_i / N_i!`, scaled by a constant so that
/// no term exceeds one. Products skip outcomes with `N_i = 0`.
pub(crate) struct MultinomialWeight {
    terms: Vec<([u32; 3], f64)>,
}

impl MultinomialWeight {
    pub(crate) fn new(phi: &[FrequencyVector]) -> Self {
        let n = phi.first().map_or(0, |f| f.total());
        let lf = ln_factorials(n);
        // log of the largest value each term can take over rho
        let peak = |f: &FrequencyVector| -> f64 {
            f.0.iter()
                .filter(|&&k| k > 0)
                .map(|&k| k as f64 * (k as f64 / n as f64).ln() - lf[k as usize])
                .sum()
        };
        let shift = phi.iter().map(peak).fold(f64::NEG_INFINITY, f64::max);
        let terms = phi
            .iter()
            .map(|f| {
                let c: f64 = f.0.iter().map(|&k| lf[k as usize]).sum();
                (f.0, -c - shift)
            })
            .collect();
        MultinomialWeight { terms }
    }
}

impl DataWeight for MultinomialWeight {
    fn weight(&self, x: &[f64; 8]) -> f64 {
        let d = diagonal_from_bloch(x);
        let ln_d = d.map(|p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY });
        self.terms
            .iter()
            .map(|(counts, c)| {
                let mut log = *c;
                for k in 0..3 {
                    if counts[k] > 0 {
                        log += counts[k] as f64 * ln_d[k];
                    }
                }
                log.exp()
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LargeNDelta,
    LargeNRegion,
    FiniteN,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteNLedger {
    pub n: u32,
    pub phi: Vec<FrequencyVector>,
    pub estimate: SliceIntegralEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostics {
    /// Endpoint state fixed without integration.
    Analytic,
    Integral(SliceIntegralEstimate),
    FiniteN(FiniteNLedger),
}

impl Diagnostics {
    pub fn estimate(&self) -> Option<&SliceIntegralEstimate> {
        match self {
            Diagnostics::Analytic => None,
            Diagnostics::Integral(e) => Some(e),
            Diagnostics::FiniteN(l) => Some(&l.estimate),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentResult {
    pub rho: Density<f64>,
    pub x: Bloch<f64>,
    pub stderr: [f64; 8],
    /// Conditioning average; for region data, the posterior mean of `x3`.
    pub mbar: f64,
    pub prior: PriorSpec<f64>,
    pub method: Method,
    pub diagnostics: Diagnostics,
    /// Obtained from the `+|mbar|` result through [`symmetry_map`].
    pub mirrored: bool,
}

impl AssignmentResult {
    pub fn x8(&self) -> f64 {
        self.x[X8]
    }

    pub fn x8_stderr(&self) -> f64 {
        self.stderr[X8]
    }

    pub fn is_analytic(&self) -> bool {
        self.diagnostics == Diagnostics::Analytic
    }

    fn from_bloch(
        x: Bloch<f64>,
        stderr: [f64; 8],
        mbar: f64,
        prior: &PriorSpec<f64>,
        method: Method,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        if !is_physical_unchecked(&x.0) {
            return Err(Error::NotPhysical(f64::NAN));
        }
        Ok(AssignmentResult {
            rho: bloch_to_density(&x)?,
            x,
            stderr,
            mbar,
            prior: prior.clone(),
            method,
            diagnostics,
            mirrored: false,
        })
    }

    /// Maps a result for `+mbar` under prior `g(S x)` to the result for
    /// `-mbar` under `prior = g`, where `S` is [`symmetry_map`].
    pub fn into_mirror_image(self, prior: &PriorSpec<f64>) -> Self {
        let x = symmetry_map(&self.x);
        let s = &self.stderr;
        let stderr = [s[5], s[6], s[2], s[3], s[4], s[0], s[1], s[7]];
        AssignmentResult {
            rho: self.rho.swap_outer_levels(),
            x,
            stderr,
            mbar: -self.mbar,
            prior: prior.clone(),
            mirrored: true,
            ..self
        }
    }
}

fn check_average(mbar: f64) -> Result<()> {
    if !mbar.is_finite() || mbar.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "average value {mbar} outside [-1, 1]"
        )));
    }
    Ok(())
}

fn endpoint(mbar: f64, prior: &PriorSpec<f64>) -> Result<AssignmentResult> {
    let x = Bloch::diagonal(mbar, x8_max());
    let diag = if mbar > 0.0 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
    Ok(AssignmentResult {
        rho: Density::diagonal(diag)?,
        x,
        stderr: [0.0; 8],
        mbar,
        prior: prior.clone(),
        method: Method::LargeNDelta,
        diagnostics: Diagnostics::Analytic,
        mirrored: false,
    })
}

/// Fails if any off-diagonal estimate is significantly non-zero.
pub fn check_suppressed(est: &SliceIntegralEstimate) -> Result<()> {
    for i in OFF_DIAGONAL {
        let v = est.ratio(i);
        let se = est.stderr_ratio[i];
        let sigmas = if se > 0.0 {
            v.abs() / se
        } else if v == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if sigmas > SUPPRESSION_SIGMAS {
            return Err(Error::SymmetryViolation {
                index: i + 1,
                value: v,
                sigmas,
            });
        }
    }
    Ok(())
}

/// Exact-average assignment computed by integration at `mbar` itself,
/// without using the sign-flip symmetry.
pub fn assign_large_n_direct(
    mbar: f64,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<AssignmentResult> {
    check_average(mbar)?;
    if mbar.abs() == 1.0 {
        return endpoint(mbar, prior);
    }
    let est = integrate_slice(mbar, prior, cfg)?;
    check_suppressed(&est)?;
    let x = Bloch::diagonal(mbar, est.ratio(X8));
    let mut stderr = [0.0; 8];
    stderr[X8] = est.stderr_ratio[X8];
    AssignmentResult::from_bloch(
        x,
        stderr,
        mbar,
        prior,
        Method::LargeNDelta,
        Diagnostics::Integral(est),
    )
}

/// Posterior-mean state given that the average outcome value is exactly
/// `mbar`, in the large-`N` limit.
///
/// The result has the form `(0, 0, mbar, 0, 0, 0, 0, x8)`: off-diagonal
/// components vanish by symmetry and are zeroed after checking they are
/// statistically zero. `|mbar| = 1` returns the pure state without
/// integration, and negative `mbar` is obtained from `-mbar` through
/// [`symmetry_map`].
pub fn assign_large_n(
    mbar: f64,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<AssignmentResult> {
    check_average(mbar)?;
    if mbar < 0.0 && mbar > -1.0 {
        let r = assign_large_n_direct(-mbar, &prior.mirrored(), cfg)?;
        return Ok(r.into_mirror_image(prior));
    }
    assign_large_n_direct(mbar, prior, cfg)
}

/// Posterior-mean state given that the average lies in `region`, large-`N`.
/// A single-point region falls back to [`assign_large_n`].
pub fn assign_large_n_region(
    region: &AverageRegion,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<AssignmentResult> {
    if let Some(m) = region.single_point() {
        return assign_large_n(m, prior, cfg);
    }
    let est = integrate_slice_with_indicator(region, prior, cfg)?;
    AssignmentResult::from_bloch(
        est.mean(),
        est.stderr_ratio,
        est.ratio(X3),
        prior,
        Method::LargeNRegion,
        Diagnostics::Integral(est),
    )
}

/// Posterior-mean state given that the average of `n` outcomes lies in
/// `region`.
pub fn assign_finite_n(
    region: &AverageRegion,
    n: u32,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<AssignmentResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let phi = enumerate_phi(region, n);
    if phi.is_empty() {
        return Err(Error::IncompatibleData);
    }
    let weight = MultinomialWeight::new(&phi);
    let est = match integrate_full(&weight, prior, cfg) {
        Err(Error::DegenerateSlice(_)) => return Err(Error::Underflow(n as u64)),
        other => other?,
    };
    AssignmentResult::from_bloch(
        est.mean(),
        est.stderr_ratio,
        est.ratio(X3),
        prior,
        Method::FiniteN,
        Diagnostics::FiniteN(FiniteNLedger {
            n,
            phi,
            estimate: est,
        }),
    )
}
