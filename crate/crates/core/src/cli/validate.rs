// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CliError, RunConfig};
use crate::assignment::{assign_large_n_direct, SUPPRESSION_SIGMAS};
use crate::integrator::{integrate_slice, IntegratorConfig};
use crate::maxent::maxent_state;
use crate::qutrit::{box_bounds, symmetry_map, Bloch, GellMannBasis, OFF_DIAGONAL, X3};

/// Average value used by the statistical checks.
const PROBE_MBAR: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {:<24} {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn random_box_point(rng: &mut ChaCha8Rng) -> Bloch<f64> {
    Bloch(std::array::from_fn(|i| {
        let (lo, hi) = box_bounds::<f64>(i);
        rng.random_range(lo..=hi)
    }))
}

fn combined_sigmas(a: f64, sa: f64, b: f64, sb: f64) -> f64 {
    (a - b).abs() / (sa * sa + sb * sb).sqrt()
}

fn seeded(cfg: &IntegratorConfig, seed: u64) -> IntegratorConfig {
    IntegratorConfig {
        seed,
        ..cfg.clone()
    }
}

/// Runs the property suite for the configured prior and budget.
pub fn run_validate(cfg: &RunConfig) -> Result<ValidationReport, CliError> {
    let mut report = ValidationReport::default();
    let mut basis = GellMannBasis::<f64>::standard();
    if cfg.corrupt_basis {
        basis = basis.with_flipped(7);
    }

    let defect = basis.orthonormality_defect();
    report.push(
        "basis-orthonormality",
        defect <= 1e-12,
        format!("max_defect={defect:.3e} tol=1e-12"),
    );

    // rho(S x) must equal P rho(x) P for the outer-level swap P
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.integrator.seed);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let x = random_box_point(&mut rng);
        let lhs = basis.to_density(&symmetry_map(&x))?;
        let rhs = basis.to_density(&x)?.swap_outer_levels();
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    report.push(
        "symmetry-conjugation",
        worst <= 1e-12,
        format!("max_dev={worst:.3e} tol=1e-12"),
    );

    let mut max_err = 0.0f64;
    for k in -100..=100 {
        let m = k as f64 / 100.5;
        let d = maxent_state(m)?.rho.diag();
        max_err = max_err.max((d[0] - d[2] - m).abs());
    }
    report.push(
        "maxent-constraint",
        max_err <= 1e-12,
        format!("max_err={max_err:.3e} tol=1e-12 points=201"),
    );

    let base = &cfg.integrator;
    let est = integrate_slice(PROBE_MBAR, &cfg.prior, base)?;
    report.push(
        "pinned-coordinate",
        est.ratio(X3) == PROBE_MBAR,
        format!("L3/Z={} mbar={PROBE_MBAR}", est.ratio(X3)),
    );

    let worst_sigma = OFF_DIAGONAL
        .iter()
        .map(|&i| est.ratio(i).abs() / est.stderr_ratio[i])
        .fold(0.0, f64::max);
    report.push(
        "suppressed-components",
        worst_sigma <= SUPPRESSION_SIGMAS,
        format!("max_sigma={worst_sigma:.2} limit={SUPPRESSION_SIGMAS}"),
    );

    let a = assign_large_n_direct(PROBE_MBAR, &cfg.prior, &seeded(base, base.seed))?;
    let b = assign_large_n_direct(PROBE_MBAR, &cfg.prior, &seeded(base, base.seed.wrapping_add(1)))?;
    let s = combined_sigmas(a.x8(), a.x8_stderr(), b.x8(), b.x8_stderr());
    report.push(
        "cross-seed-agreement",
        s <= 3.0,
        format!("x8={:.5}/{:.5} sigma={s:.2} limit=3", a.x8(), b.x8()),
    );

    let neg = assign_large_n_direct(-PROBE_MBAR, &cfg.prior, &seeded(base, base.seed.wrapping_add(2)))?;
    let s = combined_sigmas(a.x8(), a.x8_stderr(), neg.x8(), neg.x8_stderr());
    report.push(
        "sign-flip",
        s <= 3.0,
        format!("x8(+)={:.5} x8(-)={:.5} sigma={s:.2} limit=3", a.x8(), neg.x8()),
    );

    Ok(report)
}
