// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Qutrit Bloch-vector geometry.
//!
//! Density matrices are written in the measurement eigenbasis ordered
//! `(|1>, |0>, |-1>)`, so that `lambda_3 = diag(1, 0, -1)` is the measured
//! observable and `lambda_8 = diag(1, -2, 1)/sqrt(3)`. The off-diagonal
//! generators pair up as `(lambda_1, lambda_2)` on levels 1-2,
//! `(lambda_4, lambda_5)` on levels 1-3 and `(lambda_6, lambda_7)` on levels
//! 2-3. The sign of `lambda_7` is chosen so that swapping `|1>` and `|-1>`
//! acts on coordinates as the plain permutation [`symmetry_map`].
//!
//! Coordinates are stored zero-based: `x[2]` is the third Bloch coordinate
//! (the `lambda_3` expectation) and `x[7]` the eighth.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense 3x3 complex matrix, row-major.
pub type Mat3<T> = [[Complex<T>; 3]; 3];

/// Zero-based index of the `lambda_3` coordinate.
pub const X3: usize = 2;
/// Zero-based index of the `lambda_8` coordinate.
pub const X8: usize = 7;
/// Zero-based indices of the six off-diagonal coordinates.
pub const OFF_DIAGONAL: [usize; 6] = [0, 1, 3, 4, 5, 6];

fn zero3<T: Real>() -> Mat3<T> {
    [[Complex::new(T::zero(), T::zero()); 3]; 3]
}

fn re<T: Real>(v: T) -> Complex<T> {
    Complex::new(v, T::zero())
}

fn im<T: Real>(v: T) -> Complex<T> {
    Complex::new(T::zero(), v)
}

fn mat_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = zero3();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + a[i][k] * b[k][j]
            });
        }
    }
    out
}

fn trace<T: Real>(a: &Mat3<T>) -> Complex<T> {
    a[0][0] + a[1][1] + a[2][2]
}

fn det_complex<T: Real>(a: &Mat3<T>) -> Complex<T> {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Lower bound of the eighth coordinate, `-2/sqrt(3)`.
pub fn x8_min<T: Real>() -> T {
    -T::lit(2.0) / T::lit(3.0).sqrt()
}

/// Upper bound of the eighth coordinate, `1/sqrt(3)`.
pub fn x8_max<T: Real>() -> T {
    T::one() / T::lit(3.0).sqrt()
}

/// Closed interval of coordinate `index` in the bounding box.
pub fn box_bounds<T: Real>(index: usize) -> (T, T) {
    if index == X8 {
        (x8_min(), x8_max())
    } else {
        (-T::one(), T::one())
    }
}

/// Eight real Bloch coordinates of a trace-one Hermitian operator.
///
/// Any eight reals can be stored; operations that need the point to lie in
/// the bounding box check it themselves.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Bloch<T>(pub [T; 8]);

impl<T: Real> Bloch<T> {
    pub fn new(coords: [T; 8]) -> Self {
        Bloch(coords)
    }

    pub fn zero() -> Self {
        Bloch([T::zero(); 8])
    }

    /// Point on the `(x3, x8)` plane with all off-diagonal coordinates zero.
    pub fn diagonal(x3: T, x8: T) -> Self {
        let mut c = [T::zero(); 8];
        c[X3] = x3;
        c[X8] = x8;
        Bloch(c)
    }

    /// Bloch vector of `|1><1|`.
    pub fn pure_plus() -> Self {
        Self::diagonal(T::one(), x8_max())
    }

    /// Bloch vector of `|0><0|`.
    pub fn pure_zero() -> Self {
        Self::diagonal(T::zero(), x8_min())
    }

    /// Bloch vector of `|-1><-1|`.
    pub fn pure_minus() -> Self {
        Self::diagonal(-T::one(), x8_max())
    }

    pub fn coords(&self) -> &[T; 8] {
        &self.0
    }

    pub fn norm_sqr(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &v| acc + v * v)
    }

    pub fn distance_sqr(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
    }

    /// Checks membership of the bounding box, allowing roundoff-level slack.
    pub fn check_box(&self) -> Result<()> {
        let slack = T::tolerance();
        for (i, &v) in self.0.iter().enumerate() {
            let (lo, hi) = box_bounds::<T>(i);
            if !v.is_finite() || v < lo - slack || v > hi + slack {
                return Err(Error::OutOfBox {
                    index: i + 1,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    pub fn in_box(&self) -> bool {
        self.check_box().is_ok()
    }

    pub fn cast<U: Real>(&self) -> Bloch<U> {
        Bloch(self.0.map(|v| U::from(v).expect("representable")))
    }
}

impl<T> Index<usize> for Bloch<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Bloch<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

/// 3x3 Hermitian trace-one matrix. Not necessarily positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Density<T> {
    m: Mat3<T>,
}

impl<T: Real> Density<T> {
    /// Validates Hermiticity and unit trace to within [`Real::tolerance`].
    pub fn try_new(m: Mat3<T>) -> Result<Self> {
        let tol = T::tolerance();
        let mut dev = T::zero();
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite(format!("entry ({i}, {j})")));
                }
                dev = dev.max((*v - m[j][i].conj()).norm());
            }
        }
        if dev > tol {
            return Err(Error::NotHermitian(dev.to_f64().unwrap_or(f64::NAN)));
        }
        let tr = trace(&m).re;
        if (tr - T::one()).abs() > tol {
            return Err(Error::WrongTrace(tr.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Density { m })
    }

    /// Diagonal matrix; the entries must sum to one.
    pub fn diagonal(d: [T; 3]) -> Result<Self> {
        let mut m = zero3();
        for (i, &v) in d.iter().enumerate() {
            m[i][i] = re(v);
        }
        Self::try_new(m)
    }

    pub fn maximally_mixed() -> Self {
        let third = T::one() / T::lit(3.0);
        let mut m = zero3();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = re(third);
        }
        Density { m }
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.m[i][j]
    }

    /// Real diagonal `(rho_11, rho_22, rho_33)`: the outcome probabilities.
    pub fn diag(&self) -> [T; 3] {
        [self.m[0][0].re, self.m[1][1].re, self.m[2][2].re]
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> T {
        self.m
            .iter()
            .flat_map(|row| row.iter())
            .fold(T::zero(), |acc, v| acc + v.norm_sqr())
    }

    /// Determinant by cofactor expansion; real for Hermitian input.
    pub fn det(&self) -> T {
        det_complex(&self.m).re
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [T; 3] {
        hermitian_eigenvalues(&self.m)
    }

    pub fn is_psd(&self) -> bool {
        let slack = T::psd_slack();
        self.purity() <= T::one() + slack && self.det() >= -slack
    }

    /// `-tr(rho ln rho)` with `0 ln 0 = 0`.
    pub fn von_neumann_entropy(&self) -> Result<T> {
        let eig = self.eigenvalues();
        let floor = -T::lit(1e3) * T::psd_slack();
        if eig[2] < floor {
            return Err(Error::NotPhysical(eig[2].to_f64().unwrap_or(f64::NAN)));
        }
        Ok(eig.iter().fold(T::zero(), |acc, &p| {
            if p > T::zero() {
                acc - p * p.ln()
            } else {
                acc
            }
        }))
    }

    /// Conjugation by the permutation swapping `|1>` and `|-1>`.
    pub fn swap_outer_levels(&self) -> Self {
        let p = [2usize, 1, 0];
        let mut m = zero3();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.m[p[i]][p[j]];
            }
        }
        Density { m }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        d
    }
}

/// Eigenvalues of a 3x3 Hermitian matrix in descending order, by cyclic
/// complex Jacobi rotations.
pub fn hermitian_eigenvalues<T: Real>(a: &Mat3<T>) -> [T; 3] {
    let mut m = *a;
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .fold(T::zero(), |acc, v| acc.max(v.norm()));
    let floor = T::epsilon() * T::epsilon() * scale * scale;
    for _ in 0..64 {
        let off = m[0][1].norm_sqr() + m[0][2].norm_sqr() + m[1][2].norm_sqr();
        if off <= floor {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let g = m[p][q].norm();
            if g == T::zero() {
                continue;
            }
            // rotate the phase of level q so that m[p][q] becomes real
            let phase = m[p][q] / g;
            for r in 0..3 {
                m[r][q] = m[r][q] * phase.conj();
                m[q][r] = m[q][r] * phase;
            }
            let (app, aqq) = (m[p][p].re, m[q][q].re);
            let theta = (aqq - app) / (T::lit(2.0) * g);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for r in 0..3 {
                if r == p || r == q {
                    continue;
                }
                let (rp, rq) = (m[r][p], m[r][q]);
                m[r][p] = rp * c - rq * s;
                m[r][q] = rp * s + rq * c;
                m[p][r] = m[r][p].conj();
                m[q][r] = m[r][q].conj();
            }
            m[p][p] = re(app - t * g);
            m[q][q] = re(aqq + t * g);
            m[p][q] = re(T::zero());
            m[q][p] = re(T::zero());
        }
    }
    let mut e = [m[0][0].re, m[1][1].re, m[2][2].re];
    e.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    e
}

/// The eight Gell-Mann generators in the measurement eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct GellMannBasis<T> {
    lambda: [Mat3<T>; 8],
}

impl<T: Real> GellMannBasis<T> {
    pub fn standard() -> Self {
        let one = T::one();
        let s3 = T::lit(3.0).sqrt();
        let mut l = [zero3::<T>(); 8];
        // levels 1-2
        l[0][0][1] = re(one);
        l[0][1][0] = re(one);
        l[1][0][1] = im(-one);
        l[1][1][0] = im(one);
        // diagonal
        l[2][0][0] = re(one);
        l[2][2][2] = re(-one);
        // levels 1-3
        l[3][0][2] = re(one);
        l[3][2][0] = re(one);
        l[4][0][2] = im(-one);
        l[4][2][0] = im(one);
        // levels 2-3; lambda_7 mirrors lambda_2 under the outer-level swap
        l[5][1][2] = re(one);
        l[5][2][1] = re(one);
        l[6][1][2] = im(one);
        l[6][2][1] = im(-one);
        l[7][0][0] = re(one / s3);
        l[7][1][1] = re(-T::lit(2.0) / s3);
        l[7][2][2] = re(one / s3);
        GellMannBasis { lambda: l }
    }

    /// Copy of `self` with generator `index` (1-based) negated. Used as a
    /// negative control for the symmetry checks.
    pub fn with_flipped(mut self, index: usize) -> Self {
        assert!((1..=8).contains(&index), "generator index is 1-based");
        for row in self.lambda[index - 1].iter_mut() {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        self
    }

    /// Generator `lambda_{index}` (1-based).
    pub fn lambda(&self, index: usize) -> &Mat3<T> {
        &self.lambda[index - 1]
    }

    /// `rho = I/3 + (1/2) sum_j x_j lambda_j`.
    pub fn to_density(&self, x: &Bloch<T>) -> Result<Density<T>> {
        x.check_box()?;
        let half = T::lit(0.5);
        let mut m = zero3::<T>();
        let third = T::one() / T::lit(3.0);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = re(third);
        }
        for (j, l) in self.lambda.iter().enumerate() {
            let c = half * x[j];
            for r in 0..3 {
                for k in 0..3 {
                    m[r][k] = m[r][k] + l[r][k] * c;
                }
            }
        }
        Ok(Density { m })
    }

    /// `x_i = tr(lambda_i rho)`.
    pub fn to_bloch(&self, rho: &Density<T>) -> Bloch<T> {
        let mut x = [T::zero(); 8];
        for (i, l) in self.lambda.iter().enumerate() {
            x[i] = trace(&mat_mul(l, &rho.m)).re;
        }
        Bloch(x)
    }

    /// Hilbert-Schmidt Gram matrix `tr(lambda_i lambda_j)`.
    pub fn gram(&self) -> [[Complex<T>; 8]; 8] {
        let mut g = [[Complex::new(T::zero(), T::zero()); 8]; 8];
        for i in 0..8 {
            for j in 0..8 {
                g[i][j] = trace(&mat_mul(&self.lambda[i], &self.lambda[j]));
            }
        }
        g
    }

    /// Largest deviation of the generators from tracelessness, Hermiticity
    /// and `tr(lambda_i lambda_j) = 2 delta_ij`.
    pub fn orthonormality_defect(&self) -> T {
        let mut d = T::zero();
        for l in &self.lambda {
            d = d.max(trace(l).norm());
            for i in 0..3 {
                for j in 0..3 {
                    d = d.max((l[i][j] - l[j][i].conj()).norm());
                }
            }
        }
        let g = self.gram();
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { T::lit(2.0) } else { T::zero() };
                d = d.max((*v - re(want)).norm());
            }
        }
        d
    }
}

/// [`GellMannBasis::to_density`] in the standard basis.
pub fn bloch_to_density<T: Real>(x: &Bloch<T>) -> Result<Density<T>> {
    GellMannBasis::standard().to_density(x)
}

/// [`GellMannBasis::to_bloch`] in the standard basis.
pub fn density_to_bloch<T: Real>(rho: &Density<T>) -> Bloch<T> {
    GellMannBasis::standard().to_bloch(rho)
}

/// Diagonal entries `(rho_11, rho_22, rho_33)` of `rho(x)`.
#[inline]
pub fn diagonal_from_bloch<T: Real>(x: &[T; 8]) -> [T; 3] {
    let half = T::lit(0.5);
    let third = T::one() / T::lit(3.0);
    let s3 = T::lit(3.0).sqrt();
    let d8 = x[X8] / (T::lit(2.0) * s3);
    [
        third + half * x[X3] + d8,
        third - x[X8] / s3,
        third - half * x[X3] + d8,
    ]
}

/// `tr(rho(x)^2) = 1/3 + |x|^2 / 2`.
#[inline]
pub fn purity_from_bloch<T: Real>(x: &[T; 8]) -> T {
    T::one() / T::lit(3.0) + T::lit(0.5) * x.iter().fold(T::zero(), |acc, &v| acc + v * v)
}

/// `det rho(x)` in closed form, without building the matrix.
#[inline]
pub fn det_from_bloch<T: Real>(x: &[T; 8]) -> T {
    let half = T::lit(0.5);
    let [a, b, c] = diagonal_from_bloch(x);
    // rho_12, rho_13, rho_23 as (re, im)
    let (p_re, p_im) = (half * x[0], -half * x[1]);
    let (q_re, q_im) = (half * x[3], -half * x[4]);
    let (r_re, r_im) = (half * x[5], half * x[6]);
    let p2 = p_re * p_re + p_im * p_im;
    let q2 = q_re * q_re + q_im * q_im;
    let r2 = r_re * r_re + r_im * r_im;
    // Re(rho_12 rho_23 conj(rho_13))
    let pr_re = p_re * r_re - p_im * r_im;
    let pr_im = p_re * r_im + p_im * r_re;
    let cyc = pr_re * q_re + pr_im * q_im;
    a * b * c + T::lit(2.0) * cyc - a * r2 - b * q2 - c * p2
}

/// Positive semidefiniteness of `rho(x)` via `tr rho^2 <= 1` and
/// `det rho >= 0`, with roundoff-level slack so that boundary states count.
#[inline]
pub fn is_physical_unchecked<T: Real>(x: &[T; 8]) -> bool {
    let slack = T::psd_slack();
    purity_from_bloch(x) <= T::one() + slack && det_from_bloch(x) >= -slack
}

/// Whether `x` is a Bloch vector of a physical state.
pub fn is_physical<T: Real>(x: &Bloch<T>) -> Result<bool> {
    x.check_box()?;
    Ok(is_physical_unchecked(&x.0))
}

/// `(x1..x8) -> (x6, x7, -x3, x4, -x5, x1, x2, x8)`: the action of swapping
/// `|1>` and `|-1>`. An involution.
pub fn symmetry_map<T: Real>(x: &Bloch<T>) -> Bloch<T> {
    let c = &x.0;
    Bloch([c[5], c[6], -c[2], c[3], -c[4], c[0], c[1], c[7]])
}

/// `<lambda_3>` in state `rho(x)`, which is `x3`.
pub fn expectation_lambda3<T: Real>(x: &Bloch<T>) -> T {
    x[X3]
}

pub fn purity<T: Real>(rho: &Density<T>) -> T {
    rho.purity()
}

pub fn det3<T: Real>(rho: &Density<T>) -> T {
    rho.det()
}

pub fn von_neumann_entropy<T: Real>(rho: &Density<T>) -> Result<T> {
    rho.von_neumann_entropy()
}
