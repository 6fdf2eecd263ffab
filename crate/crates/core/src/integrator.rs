// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo estimation of the posterior moment integrals
//! `L_i = int x_i g(x) chi(x) dx` and `Z = int g(x) chi(x) dx` over the
//! coordinate box, where `chi` is the indicator of physical Bloch vectors.
//!
//! Points are drawn uniformly from the part of the coordinate box that can
//! hold physical states for the requested `x3` range (see
//! [`physical_bounds`]). The integrand vanishes outside it, so the integrals
//! are unchanged while far fewer draws are wasted near `|x3| = 1`.
//!
//! Work is split into fixed chunks. Chunk `c` draws its points from a stream
//! that depends only on `(seed, c)`, chunk results are collected in chunk
//! order and merged by pairwise summation, so the estimate is bit-identical
//! for any number of worker threads.
//!
//! With [`Sequence::PseudoRandom`] the ratio standard errors come from the
//! per-sample covariance of `(x_i w, w)` (first-order delta method). With
//! [`Sequence::LowDiscrepancy`] every chunk is an independently digitally
//! shifted Sobol net and the errors come from the spread of the per-chunk
//! totals, which requires at least two chunks.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::AverageRegion;
use crate::error::{Error, Result};
use crate::prior::PriorSpec;
use crate::qutrit::{box_bounds, is_physical_unchecked, Bloch, X3, X8};
use crate::sobol::{Sobol, MAX_DIMS};

/// Smallest accepted per-run sample count.
pub const MIN_SAMPLES: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sequence {
    PseudoRandom,
    LowDiscrepancy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub sequence: Sequence,
    /// When set, the sample count is doubled until every unpinned ratio
    /// standard error is at most this value, or `max_samples` is reached.
    pub target_stderr: Option<f64>,
    pub max_samples: u64,
    pub chunk_size: u64,
    /// Worker thread cap; `None` uses the ambient rayon pool. Has no effect
    /// on the result.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            n_samples: 1 << 20,
            seed: 0,
            sequence: Sequence::PseudoRandom,
            target_stderr: None,
            max_samples: 1 << 32,
            chunk_size: 1 << 14,
            threads: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_samples(n_samples: u64, seed: u64) -> Self {
        IntegratorConfig {
            n_samples,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n_samples < MIN_SAMPLES {
            return bad(format!("n_samples must be at least {MIN_SAMPLES}"));
        }
        if self.chunk_size == 0 {
            return bad("chunk_size must be positive".into());
        }
        if self.max_samples < self.n_samples {
            return bad("max_samples must be at least n_samples".into());
        }
        if let Some(t) = self.target_stderr {
            if !t.is_finite() || t <= 0.0 {
                return bad(format!("target_stderr must be positive, got {t}"));
            }
        }
        if self.sequence == Sequence::LowDiscrepancy && self.n_samples <= self.chunk_size {
            return bad("low-discrepancy mode needs n_samples above chunk_size".into());
        }
        if self.threads == Some(0) {
            return bad("thread count must be positive".into());
        }
        Ok(())
    }
}

/// Estimated moment integrals with their Monte Carlo error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceIntegralEstimate {
    pub l: [f64; 8],
    pub z: f64,
    /// Standard errors of `L_i / Z`.
    pub stderr_ratio: [f64; 8],
    pub n_samples: u64,
    pub n_physical: u64,
    pub seed: u64,
    /// Value of `x3` when integrating over the slice `x3 = mbar`.
    pub pinned_x3: Option<f64>,
}

impl SliceIntegralEstimate {
    /// `L_i / Z`; the pinned coordinate returns the pinned value itself.
    pub fn ratio(&self, i: usize) -> f64 {
        match self.pinned_x3 {
            Some(m) if i == X3 => m,
            _ => self.l[i] / self.z,
        }
    }

    pub fn ratios(&self) -> [f64; 8] {
        std::array::from_fn(|i| self.ratio(i))
    }

    /// Posterior-mean Bloch vector.
    pub fn mean(&self) -> Bloch<f64> {
        Bloch(self.ratios())
    }

    /// Largest standard error among the unpinned coordinates.
    pub fn max_stderr(&self) -> f64 {
        (0..8)
            .filter(|&i| !(self.pinned_x3.is_some() && i == X3))
            .map(|i| self.stderr_ratio[i])
            .fold(0.0, f64::max)
    }
}

/// Data factor multiplying the prior inside the integrals.
pub(crate) trait DataWeight: Sync {
    /// Cheap pre-check on the point, before the physicality test.
    fn admits(&self, _x: &[f64; 8]) -> bool {
        true
    }
    fn weight(&self, x: &[f64; 8]) -> f64;
}

struct Unit;

impl DataWeight for Unit {
    fn weight(&self, _x: &[f64; 8]) -> f64 {
        1.0
    }
}

impl DataWeight for AverageRegion {
    fn admits(&self, x: &[f64; 8]) -> bool {
        self.contains(x[X3])
    }
    fn weight(&self, _x: &[f64; 8]) -> f64 {
        1.0
    }
}

/// Region of the bounding box that is sampled uniformly.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Domain {
    /// Seven-dimensional slice with `x3` pinned.
    Slice { mbar: f64 },
    /// Full box with `x3` restricted to `[lo, hi]`.
    Full { x3_lo: f64, x3_hi: f64 },
}

impl Domain {
    fn full() -> Self {
        Domain::Full {
            x3_lo: -1.0,
            x3_hi: 1.0,
        }
    }

    /// `(lower bound, width)` of each sampled coordinate, plus the pinned
    /// value if any.
    fn layout(&self) -> (Vec<(usize, f64, f64)>, Option<f64>) {
        let (x3_lo, x3_hi) = match *self {
            Domain::Slice { mbar } => (mbar, mbar),
            Domain::Full { x3_lo, x3_hi } => (x3_lo, x3_hi),
        };
        let bounds = physical_bounds(x3_lo, x3_hi);
        let mut axes = Vec::with_capacity(8);
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if i == X3 && matches!(self, Domain::Slice { .. }) {
                continue;
            }
            axes.push((i, lo, hi - lo));
        }
        let pinned = match self {
            Domain::Slice { mbar } => Some(*mbar),
            Domain::Full { .. } => None,
        };
        (axes, pinned)
    }

    fn volume(&self) -> f64 {
        self.layout().0.iter().map(|&(_, _, w)| w).product()
    }
}

/// Largest value of `rho_ii * rho_jj` over diagonals `(a, b, c)` with
/// `a - c = m`, for the level pairs `(1,2)`, `(1,3)` and `(2,3)`.
fn diagonal_products_max(m: f64) -> [f64; 3] {
    let b_max = 1.0 - m.abs();
    let a = |b: f64| 0.5 * (1.0 - b + m);
    let c = |b: f64| 0.5 * (1.0 - b - m);
    let best = |f: &dyn Fn(f64) -> f64, vertex: f64| {
        [0.0, b_max, vertex.clamp(0.0, b_max)]
            .into_iter()
            .map(f)
            .fold(0.0, f64::max)
    };
    [
        best(&|b| a(b) * b, 0.5 * (1.0 + m)),
        best(&|b| a(b) * c(b), 0.0),
        best(&|b| b * c(b), 0.5 * (1.0 - m)),
    ]
}

/// Axis-aligned bounding box of the physical states with `x3` in
/// `[x3_lo, x3_hi]`, intersected with the full coordinate box.
///
/// The off-diagonal pair of levels `(i, j)` obeys `|rho_ij|^2 <= rho_ii
/// rho_jj`; on a slice the diagonal has one free parameter, so the bound has
/// a closed form. Over an interval the slice bounds are maximised on a grid
/// and padded by their Lipschitz constant times the grid step.
pub(crate) fn physical_bounds(x3_lo: f64, x3_hi: f64) -> [(f64, f64); 8] {
    const STEPS: usize = 512;
    const LIPSCHITZ: f64 = 1.5;
    let h = (x3_hi - x3_lo) / STEPS as f64;
    let mut prod = [0.0f64; 3];
    for k in 0..=STEPS {
        let m = if k == STEPS { x3_hi } else { x3_lo + h * k as f64 };
        let p = diagonal_products_max(m);
        for (acc, v) in prod.iter_mut().zip(p) {
            *acc = acc.max(v);
        }
    }
    let pad = LIPSCHITZ * h;
    let half = |p: f64| (2.0 * (p + pad).sqrt() * (1.0 + 1e-12)).min(1.0);
    let (r12, r13, r23) = (half(prod[0]), half(prod[1]), half(prod[2]));
    let abs_min = if x3_lo <= 0.0 && x3_hi >= 0.0 {
        0.0
    } else {
        x3_lo.abs().min(x3_hi.abs())
    };
    let x8_lo = ((3.0 * abs_min - 2.0) / 3f64.sqrt() - 1e-12).max(box_bounds::<f64>(X8).0);
    [
        (-r12, r12),
        (-r12, r12),
        (x3_lo, x3_hi),
        (-r13, r13),
        (-r13, r13),
        (-r23, r23),
        (-r23, r23),
        (x8_lo, box_bounds::<f64>(X8).1),
    ]
}

#[derive(Clone, Debug, Default)]
struct Moments {
    n: u64,
    n_physical: u64,
    sw: f64,
    sww: f64,
    sy: [f64; 8],
    syy: [f64; 8],
    syw: [f64; 8],
}

impl Moments {
    fn merge(&self, other: &Moments) -> Moments {
        let add = |a: &[f64; 8], b: &[f64; 8]| std::array::from_fn(|i| a[i] + b[i]);
        Moments {
            n: self.n + other.n,
            n_physical: self.n_physical + other.n_physical,
            sw: self.sw + other.sw,
            sww: self.sww + other.sww,
            sy: add(&self.sy, &other.sy),
            syy: add(&self.syy, &other.syy),
            syw: add(&self.syw, &other.syw),
        }
    }
}

fn pairwise(chunks: &[Moments]) -> Moments {
    match chunks.len() {
        0 => Moments::default(),
        1 => chunks[0].clone(),
        n => pairwise(&chunks[..n / 2]).merge(&pairwise(&chunks[n / 2..])),
    }
}

struct Integrand<'a, D> {
    prior: &'a PriorSpec<f64>,
    data: &'a D,
    axes: Vec<(usize, f64, f64)>,
    pinned: Option<f64>,
    sequence: Sequence,
    seed: u64,
}

impl<D: DataWeight> Integrand<'_, D> {
    fn chunk(&self, index: u64, len: u64) -> Result<Moments> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let dims = self.axes.len();
        let mut sobol = match self.sequence {
            Sequence::PseudoRandom => None,
            Sequence::LowDiscrepancy => {
                let mut shift = [0u32; MAX_DIMS];
                for s in shift.iter_mut() {
                    *s = rng.next_u32();
                }
                Some(Sobol::with_shift(dims, shift))
            }
        };
        let mut u = [0.0f64; MAX_DIMS];
        let mut x = [0.0f64; 8];
        if let Some(m) = self.pinned {
            x[X3] = m;
        }
        let mut acc = Moments {
            n: len,
            ..Default::default()
        };
        for _ in 0..len {
            match sobol.as_mut() {
                Some(s) => s.next_into(&mut u),
                None => {
                    for v in u.iter_mut().take(dims) {
                        *v = rng.random::<f64>();
                    }
                }
            }
            for (k, &(i, lo, width)) in self.axes.iter().enumerate() {
                x[i] = lo + width * u[k];
            }
            if !self.data.admits(&x) || !is_physical_unchecked(&x) {
                continue;
            }
            acc.n_physical += 1;
            let w = self.prior.eval_unchecked(&x) * self.data.weight(&x);
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NonFinite(format!("integrand weight {w} at {x:?}")));
            }
            if w == 0.0 {
                continue;
            }
            acc.sw += w;
            acc.sww += w * w;
            for i in 0..8 {
                let y = x[i] * w;
                acc.sy[i] += y;
                acc.syy[i] += y * y;
                acc.syw[i] += y * w;
            }
        }
        Ok(acc)
    }
}

fn run_chunks<D: DataWeight>(
    integrand: &Integrand<'_, D>,
    range: std::ops::Range<u64>,
    chunk_size: u64,
    n_total: u64,
) -> Result<Vec<Moments>> {
    range
        .into_par_iter()
        .map(|c| {
            let start = c * chunk_size;
            let len = chunk_size.min(n_total - start);
            integrand.chunk(c, len)
        })
        .collect()
}

fn summarise(
    chunks: &[Moments],
    volume: f64,
    pinned: Option<f64>,
    sequence: Sequence,
    seed: u64,
) -> SliceIntegralEstimate {
    let tot = pairwise(chunks);
    let n = tot.n as f64;
    let z = volume * tot.sw / n;
    let mut l: [f64; 8] = std::array::from_fn(|i| volume * tot.sy[i] / n);
    let mut stderr = [0.0f64; 8];
    if tot.sw > 0.0 {
        for i in 0..8 {
            let r = tot.sy[i] / tot.sw;
            let var = match sequence {
                Sequence::PseudoRandom => {
                    let s = tot.syy[i] - 2.0 * r * tot.syw[i] + r * r * tot.sww;
                    s.max(0.0) / (tot.sw * tot.sw) * n / (n - 1.0)
                }
                Sequence::LowDiscrepancy => {
                    let c = chunks.len() as f64;
                    let s = chunks
                        .iter()
                        .map(|m| {
                            let d = m.sy[i] - r * m.sw;
                            d * d
                        })
                        .sum::<f64>();
                    s / (tot.sw * tot.sw) * c / (c - 1.0)
                }
            };
            stderr[i] = var.sqrt();
        }
    }
    if let Some(m) = pinned {
        l[X3] = m * z;
        stderr[X3] = 0.0;
    }
    SliceIntegralEstimate {
        l,
        z,
        stderr_ratio: stderr,
        n_samples: tot.n,
        n_physical: tot.n_physical,
        seed,
        pinned_x3: pinned,
    }
}

fn integrate_inner<D: DataWeight>(
    domain: Domain,
    data: &D,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<SliceIntegralEstimate> {
    let (axes, pinned) = domain.layout();
    let volume = domain.volume();
    let integrand = Integrand {
        prior,
        data,
        axes,
        pinned,
        sequence: cfg.sequence,
        seed: cfg.seed,
    };
    let cs = cfg.chunk_size;
    let mut full: Vec<Moments> = Vec::new();
    let mut n = cfg.n_samples;
    loop {
        let n_full = n / cs;
        let fresh = run_chunks(&integrand, full.len() as u64..n_full, cs, n)?;
        full.extend(fresh);
        let mut chunks = full.clone();
        if !n.is_multiple_of(cs) {
            chunks.extend(run_chunks(&integrand, n_full..n_full + 1, cs, n)?);
        }
        let est = summarise(&chunks, volume, pinned, cfg.sequence, cfg.seed);
        let degenerate = est.z.is_nan() || est.z <= 0.0;
        let coarse = cfg.target_stderr.is_some_and(|t| est.max_stderr() > t);
        if (!degenerate && !coarse) || n >= cfg.max_samples {
            if degenerate {
                return Err(Error::DegenerateSlice(n));
            }
            return Ok(est);
        }
        n = n.saturating_mul(2).min(cfg.max_samples);
    }
}

fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub(crate) fn integrate<D: DataWeight>(
    domain: Domain,
    data: &D,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<SliceIntegralEstimate> {
    cfg.validate()?;
    with_pool(cfg.threads, || integrate_inner(domain, data, prior, cfg))?
}

/// Moment integrals over the slice `x3 = mbar` of the physical body.
///
/// The delta function constraining `x3` is resolved by sampling only the
/// other seven coordinates; its Jacobian is constant and cancels in every
/// ratio, so `ratio(2)` is exactly `mbar`.
pub fn integrate_slice(
    mbar: f64,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<SliceIntegralEstimate> {
    if !mbar.is_finite() || mbar.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "average value {mbar} outside [-1, 1]"
        )));
    }
    integrate(Domain::Slice { mbar }, &Unit, prior, cfg)
}

/// Moment integrals over the whole body restricted to `x3` in `region`.
pub fn integrate_slice_with_indicator(
    region: &AverageRegion,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<SliceIntegralEstimate> {
    if !region.has_interior() {
        return Err(Error::InvalidArgument(
            "data region has empty interior".into(),
        ));
    }
    let (lo, hi) = region.hull();
    integrate(
        Domain::Full {
            x3_lo: lo,
            x3_hi: hi,
        },
        region,
        prior,
        cfg,
    )
}

/// Moment integrals over the whole body with no data constraint.
pub(crate) fn integrate_full<D: DataWeight>(
    data: &D,
    prior: &PriorSpec<f64>,
    cfg: &IntegratorConfig,
) -> Result<SliceIntegralEstimate> {
    integrate(Domain::full(), data, prior, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u64, seed: u64) -> IntegratorConfig {
        IntegratorConfig::with_samples(n, seed)
    }

    #[test]
    fn config_validation() {
        assert!(cfg(100, 0).validate().is_err());
        let mut c = cfg(20_000, 0);
        c.target_stderr = Some(0.0);
        assert!(c.validate().is_err());
        c.target_stderr = None;
        c.max_samples = 10_000;
        assert!(c.validate().is_err());
        assert!(cfg(20_000, 0).validate().is_ok());
    }

    #[test]
    fn pinned_ratio_is_exact() {
        let est = integrate_slice(0.0, &PriorSpec::Constant, &cfg(50_000, 1)).unwrap();
        assert_eq!(est.ratio(X3), 0.0);
        let est = integrate_slice(0.37, &PriorSpec::Constant, &cfg(50_000, 1)).unwrap();
        assert_eq!(est.ratio(X3), 0.37);
        assert_eq!(est.stderr_ratio[X3], 0.0);
        assert!(est.n_physical <= est.n_samples && est.z > 0.0);
    }

    #[test]
    fn endpoint_slice_is_degenerate() {
        let mut c = cfg(20_000, 3);
        c.max_samples = 40_000;
        match integrate_slice(1.0, &PriorSpec::Constant, &c) {
            Err(Error::DegenerateSlice(n)) => assert_eq!(n, 40_000),
            other => panic!("expected degenerate slice, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(integrate_slice(1.2, &PriorSpec::Constant, &cfg(20_000, 0)).is_err());
        let point = AverageRegion::point(0.5).unwrap();
        assert!(integrate_slice_with_indicator(&point, &PriorSpec::Constant, &cfg(20_000, 0)).is_err());
    }

    #[test]
    fn chunk_partition_does_not_depend_on_threads() {
        let prior = PriorSpec::slater(7);
        let mut c = cfg(70_001, 9);
        c.chunk_size = 4096;
        c.threads = Some(1);
        let a = integrate_slice(0.3, &prior, &c).unwrap();
        c.threads = Some(3);
        let b = integrate_slice(0.3, &prior, &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn adaptive_budget_matches_direct_run() {
        let mut c = cfg(20_000, 5);
        c.target_stderr = Some(0.02);
        let adaptive = integrate_slice(0.5, &PriorSpec::Constant, &c).unwrap();
        assert!(adaptive.max_stderr() <= 0.02);
        let direct = integrate_slice(
            0.5,
            &PriorSpec::Constant,
            &cfg(adaptive.n_samples, 5),
        )
        .unwrap();
        assert_eq!(adaptive, direct);
    }

    #[test]
    fn physical_bounds_contain_every_physical_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let intervals = [(0.0, 0.0), (0.5, 0.5), (-0.9, -0.9), (0.45, 0.55), (-1.0, 1.0), (0.2, 0.7)];
        for (lo, hi) in intervals {
            let b = physical_bounds(lo, hi);
            let mut hits = 0;
            for draw in 0..200_000 {
                // alternate between the full box and a box twice as wide as the bounds
                let mut x: [f64; 8] = std::array::from_fn(|i| {
                    let (l, h) = box_bounds::<f64>(i);
                    let (l, h) = if draw % 2 == 0 {
                        (l, h)
                    } else {
                        let (c, r) = (0.5 * (b[i].0 + b[i].1), b[i].1 - b[i].0);
                        ((c - r).max(l), (c + r).min(h))
                    };
                    rng.random_range(l..=h)
                });
                x[X3] = rng.random_range(lo..=hi);
                if !is_physical_unchecked(&x) {
                    continue;
                }
                hits += 1;
                for i in 0..8 {
                    assert!(b[i].0 <= x[i] && x[i] <= b[i].1, "{lo}..{hi} axis {i}: {x:?}");
                }
            }
            assert!(hits > 0);
        }
        // the slice through a pure state collapses
        let b = physical_bounds(1.0, 1.0);
        assert!(b.iter().enumerate().all(|(i, &(l, h))| i == X3 || h - l < 1e-9));
        assert_eq!(physical_bounds(-1.0, 1.0)[0], (-1.0, 1.0));
    }

    #[test]
    fn slice_bounds_are_tight() {
        // diagonal (0.95, 0, 0.05) reaches the largest 1-3 coherence at m = 0.9
        let b = physical_bounds(0.9, 0.9);
        let r13 = 2.0 * (0.95f64 * 0.05).sqrt();
        assert!((b[3].1 - r13).abs() < 1e-9);
        assert!((b[X8].0 - 0.7 / 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn lowdisc_needs_two_chunks() {
        let mut c = cfg(10_000, 0);
        c.sequence = Sequence::LowDiscrepancy;
        assert!(c.validate().is_err());
        c.chunk_size = 2048;
        assert!(c.validate().is_ok());
    }
}
