// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Assigned states for exact-average, region and finite-N data.

mod common;

use common::*;
use qutrit_assign::prior::PriorSpec;
use qutrit_assign::qutrit::{X3, X8};
use qutrit_assign::{
    assign_finite_n, assign_large_n, assign_large_n_direct, assign_large_n_region, enumerate_phi,
    is_physical, AverageRegion, Bloch, Error, Method,
};

fn priors() -> Vec<PriorSpec<f64>> {
    vec![
        PriorSpec::Constant,
        PriorSpec::slater(7),
        PriorSpec::gaussian(Bloch::pure_plus(), 0.25).unwrap(),
        PriorSpec::gaussian(Bloch::pure_zero(), 0.25).unwrap(),
    ]
}

#[test]
fn endpoints_are_pure_states() {
    for prior in priors() {
        let up = assign_large_n(1.0, &prior, &cfg(20_000, 0)).unwrap();
        assert_eq!(up.x.0, [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, X8_MAX]);
        assert_eq!(up.rho.diag(), [1.0, 0.0, 0.0]);
        assert!(up.is_analytic());
        let down = assign_large_n(-1.0, &prior, &cfg(20_000, 0)).unwrap();
        assert_eq!(down.x8(), X8_MAX);
        assert_eq!(down.rho.diag(), [0.0, 0.0, 1.0]);
    }
}

#[test]
fn assigned_state_has_diagonal_form() {
    for prior in priors() {
        let r = assign_large_n(0.35, &prior, &cfg(1 << 18, 3)).unwrap();
        assert_eq!(r.method, Method::LargeNDelta);
        assert_eq!(r.x[X3], 0.35);
        for i in [0, 1, 3, 4, 5, 6] {
            assert_eq!(r.x[i], 0.0);
        }
        assert!(is_physical(&r.x).unwrap());
        let d = r.rho.diag();
        assert!((d[0] - d[2] - 0.35).abs() < 1e-15);
    }
}

#[test]
fn first_level_population_grows_with_average() {
    let mut last = 0.0;
    for k in 0..10 {
        let m = k as f64 / 10.0;
        let r = assign_large_n(m, &PriorSpec::Constant, &adaptive(0.01, 60 + k)).unwrap();
        let p1 = r.rho.diag()[0];
        assert!(p1 >= last, "rho_11 fell from {last} to {p1} at mbar = {m}");
        last = p1;
    }
}

#[test]
fn mirror_shortcut_agrees_with_direct_integration() {
    for (k, prior) in priors().into_iter().enumerate() {
        let seed = 40 + k as u64;
        let via_mirror = assign_large_n(-0.4, &prior, &cfg(1 << 19, seed)).unwrap();
        let direct = assign_large_n_direct(-0.4, &prior, &cfg(1 << 19, seed + 10)).unwrap();
        assert!(via_mirror.mirrored && !direct.mirrored);
        assert_eq!(via_mirror.x[X3], -0.4);
        assert!(x8_sigmas(&via_mirror, &direct) < 3.0, "{}", prior.name());
    }
}

#[test]
fn single_point_region_uses_exact_average() {
    let region = AverageRegion::point(0.25).unwrap();
    let r = assign_large_n_region(&region, &PriorSpec::Constant, &cfg(1 << 18, 1)).unwrap();
    assert_eq!(r.method, Method::LargeNDelta);
    assert_eq!(r.x[X3], 0.25);
}

#[test]
fn finite_n_matches_dirichlet_mixture() {
    let cases = [(1, 1.0, 1.0), (4, 0.2, 0.6), (7, -1.0, -0.5), (30, 0.1, 0.3)];
    for (seed, (n, lo, hi)) in cases.into_iter().enumerate() {
        let region = AverageRegion::interval(lo, hi).unwrap();
        let r = assign_finite_n(&region, n, &PriorSpec::Constant, &adaptive(0.004, seed as u64)).unwrap();
        let (x3, x8) = finite_n_exact(n, lo, hi);
        assert!((r.x[X3] - x3).abs() <= 3.5 * r.stderr[X3], "N = {n}: x3 {} vs {x3}", r.x[X3]);
        assert!((r.x8() - x8).abs() <= 3.5 * r.stderr[X8], "N = {n}: x8 {} vs {x8}", r.x8());
    }
}

#[test]
fn finite_n_flat_data_returns_prior_mean() {
    let r = assign_finite_n(&AverageRegion::full(), 6, &PriorSpec::Constant, &cfg(1 << 20, 2)).unwrap();
    for i in 0..8 {
        assert!(r.x[i].abs() <= 3.5 * r.stderr[i], "x{} = {}", i + 1, r.x[i]);
    }
}

#[test]
fn finite_n_approaches_large_n() {
    let region = AverageRegion::interval(0.48, 0.52).unwrap();
    let finite = assign_finite_n(&region, 200, &PriorSpec::Constant, &adaptive(0.005, 3)).unwrap();
    let exact = finite_n_exact(200, 0.48, 0.52);
    assert!((finite.x8() - exact.1).abs() <= 3.5 * finite.x8_stderr());
    let large = assign_large_n(0.5, &PriorSpec::Constant, &adaptive(0.005, 4)).unwrap();
    assert!((finite.x8() - large.x8()).abs() <= 0.03 + 3.0 * (finite.x8_stderr().hypot(large.x8_stderr())));
}

#[test]
fn incompatible_data_is_reported() {
    // two outcomes can only average to 0, +-1/2 or +-1
    let region = AverageRegion::interval(0.1, 0.2).unwrap();
    assert!(enumerate_phi(&region, 2).is_empty());
    assert!(matches!(
        assign_finite_n(&region, 2, &PriorSpec::Constant, &cfg(20_000, 0)),
        Err(Error::IncompatibleData)
    ));
    assert!(assign_finite_n(&AverageRegion::full(), 0, &PriorSpec::Constant, &cfg(20_000, 0)).is_err());
}

#[test]
fn frequency_enumeration_counts() {
    for n in [1, 5, 40] {
        let all = enumerate_phi(&AverageRegion::full(), n);
        assert_eq!(all.len() as u32, (n + 1) * (n + 2) / 2);
        assert!(all.iter().all(|f| f.total() == n));
        assert!(all.windows(2).all(|w| w[0].0 < w[1].0));
    }
    let top = enumerate_phi(&AverageRegion::point(1.0).unwrap(), 9);
    assert_eq!(top.len(), 1);
    assert_eq!(top[0].0, [9, 0, 0]);
}

#[test]
fn invalid_averages_are_rejected() {
    assert!(assign_large_n(1.5, &PriorSpec::Constant, &cfg(20_000, 0)).is_err());
    assert!(assign_large_n(f64::NAN, &PriorSpec::Constant, &cfg(20_000, 0)).is_err());
}
