// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use super::{CliError, Format, MethodArg, RunConfig, SCHEMA_VERSION};
use crate::assignment::{
    assign_finite_n, assign_large_n_direct, assign_large_n_region, AssignmentResult,
};
use crate::integrator::IntegratorConfig;
use crate::maxent::maxent_state;
use crate::qutrit::X3;

/// Fixed CSV column order.
pub const CSV_HEADER: [&str; 11] = [
    "mbar",
    "x8",
    "x8_stderr",
    "x3",
    "maxent_x8",
    "n_samples",
    "n_physical",
    "mirrored",
    "analytic",
    "seed",
    "elapsed_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub mbar: f64,
    pub x8: f64,
    pub x8_stderr: f64,
    pub x3: f64,
    pub maxent_x8: Option<f64>,
    pub n_samples: u64,
    pub n_physical: u64,
    pub mirrored: bool,
    pub analytic: bool,
    pub seed: u64,
    pub elapsed_ms: Option<u64>,
}

impl SweepRow {
    fn from_result(r: &AssignmentResult, seed: u64, elapsed_ms: Option<u64>) -> Self {
        let (n_samples, n_physical) = r
            .diagnostics
            .estimate()
            .map_or((0, 0), |e| (e.n_samples, e.n_physical));
        SweepRow {
            mbar: r.mbar,
            x8: r.x8(),
            x8_stderr: r.x8_stderr(),
            x3: r.x[X3],
            maxent_x8: None,
            n_samples,
            n_physical,
            mirrored: r.mirrored,
            analytic: r.is_analytic(),
            seed,
            elapsed_ms,
        }
    }
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    schema: &'static str,
    schema_version: u32,
    config: &'a RunConfig,
    rows: &'a [SweepRow],
}

fn point_config(cfg: &RunConfig, seed: u64) -> IntegratorConfig {
    IntegratorConfig {
        seed,
        ..cfg.integrator.clone()
    }
}

/// Average values to report: the grid, plus the mirror image of each
/// positive point when the grid is non-negative and mirroring is on.
fn reported_points(cfg: &RunConfig) -> Vec<f64> {
    let mut pts = cfg.mbar_grid.clone();
    if cfg.mirror && pts.iter().all(|&m| m >= 0.0) {
        pts.extend(cfg.mbar_grid.iter().filter(|&&m| m > 0.0).map(|&m| -m));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Every grid point integrated on its own slice, with seed `seed + index`.
fn direct_rows(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let points = reported_points(cfg);
    let mut rows = Vec::with_capacity(points.len());
    for (k, &m) in points.iter().enumerate() {
        let seed = cfg.integrator.seed.wrapping_add(k as u64);
        let start = Instant::now();
        let r = assign_large_n_direct(m, &cfg.prior, &point_config(cfg, seed))?;
        let ms = cfg.timings.then(|| start.elapsed().as_millis() as u64);
        rows.push(SweepRow::from_result(&r, seed, ms));
    }
    Ok(rows)
}

fn large_n_rows(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    if !cfg.mirror {
        return direct_rows(cfg);
    }
    let points = reported_points(cfg);
    // distinct magnitudes, each integrated once with its own derived seed
    let mut magnitudes: Vec<f64> = points.iter().map(|m| m.abs()).filter(|&m| m < 1.0).collect();
    magnitudes.sort_by(f64::total_cmp);
    magnitudes.dedup();
    let seed_of = |m: f64| -> u64 {
        let k = magnitudes.iter().position(|&v| v == m).unwrap_or(0);
        cfg.integrator.seed.wrapping_add(k as u64)
    };
    let mirrored_prior = cfg.prior.mirrored();
    let mut cache: BTreeMap<(u64, bool), (AssignmentResult, Option<u64>)> = BTreeMap::new();
    let mut rows = Vec::with_capacity(points.len());
    for &m in &points {
        let mag = m.abs();
        let seed = if mag < 1.0 { seed_of(mag) } else { cfg.integrator.seed };
        let negative = m < 0.0 && mag < 1.0;
        // g(S x) is the prior needed at +|m| to recover -|m|
        let use_mirror = negative && !cfg.prior.is_mirror_invariant();
        // the two endpoints are distinct analytic states, keyed by sign
        let key = if mag == 1.0 {
            (m.to_bits(), false)
        } else {
            (mag.to_bits(), use_mirror)
        };
        if let Entry::Vacant(slot) = cache.entry(key) {
            let prior = if use_mirror { &mirrored_prior } else { &cfg.prior };
            let at = if mag == 1.0 { m } else { mag };
            let start = Instant::now();
            let value = assign_large_n_direct(at, prior, &point_config(cfg, seed))?;
            let ms = cfg.timings.then(|| start.elapsed().as_millis() as u64);
            slot.insert((value, ms));
        }
        let (base, ms) = &cache[&key];
        let result = if negative {
            base.clone().into_mirror_image(&cfg.prior)
        } else {
            base.clone()
        };
        rows.push(SweepRow::from_result(&result, seed, *ms));
    }
    Ok(rows)
}

fn region_row(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let region = cfg.region.as_ref().expect("validated");
    let start = Instant::now();
    let r = match cfg.method {
        MethodArg::LargeNRegion => assign_large_n_region(region, &cfg.prior, &cfg.integrator)?,
        _ => assign_finite_n(
            region,
            cfg.n_outcomes.expect("validated"),
            &cfg.prior,
            &cfg.integrator,
        )?,
    };
    let ms = cfg.timings.then(|| start.elapsed().as_millis() as u64);
    Ok(vec![SweepRow::from_result(&r, cfg.integrator.seed, ms)])
}

/// Computes the sweep and renders it in the configured format.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let mut rows = match cfg.method {
        MethodArg::LargeN => large_n_rows(cfg)?,
        MethodArg::LargeNRegion | MethodArg::FiniteN => region_row(cfg)?,
    };
    if cfg.compare_maxent {
        for row in rows.iter_mut() {
            row.maxent_x8 = Some(maxent_state(row.mbar)?.x8);
        }
    }
    render(cfg, &rows)
}

fn render(cfg: &RunConfig, rows: &[SweepRow]) -> Result<Vec<u8>, CliError> {
    match cfg.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            w.write_record(CSV_HEADER)
                .map_err(|e| CliError::Io(e.into()))?;
            for row in rows {
                w.serialize(row).map_err(|e| CliError::Io(e.into()))?;
            }
            w.into_inner()
                .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
        }
        Format::Json => {
            let doc = JsonDoc {
                schema: "qutrit-assign/sweep",
                schema_version: SCHEMA_VERSION,
                config: cfg,
                rows,
            };
            let mut out = serde_json::to_vec_pretty(&doc)
                .map_err(|e| CliError::Io(e.into()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
