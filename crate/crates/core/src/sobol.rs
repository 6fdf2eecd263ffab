// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Base-2 Sobol sequence in up to eight dimensions, 32-bit resolution.
//!
//! Direction numbers are the first rows of the Joe-Kuo `new-joe-kuo-6.21201`
//! table; dimension one is the van der Corput sequence. Points are produced
//! in Gray-code order, so every aligned block of `2^m` consecutive points is
//! a digital net.

pub const MAX_DIMS: usize = 8;
const BITS: usize = 32;

/// `(degree s, coefficients a, initial m_1..m_s)` for dimensions 2..=8.
const JOE_KUO: [(u32, u32, &[u32]); MAX_DIMS - 1] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
];

fn direction_numbers(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = 1u32 << (BITS - 1 - k);
        }
        return v;
    }
    let (s, a, m) = JOE_KUO[dim - 1];
    let s = s as usize;
    for k in 0..s {
        v[k] = m[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut next = v[k - s] ^ (v[k - s] >> s);
        for j in 1..s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                next ^= v[k - j];
            }
        }
        v[k] = next;
    }
    v
}

/// Sequential Sobol generator with an optional random digital shift.
#[derive(Clone, Debug)]
pub struct Sobol {
    dims: usize,
    directions: [[u32; BITS]; MAX_DIMS],
    state: [u32; MAX_DIMS],
    shift: [u32; MAX_DIMS],
    index: u64,
}

impl Sobol {
    pub fn new(dims: usize) -> Self {
        Self::with_shift(dims, [0; MAX_DIMS])
    }

    /// Each output coordinate is XOR-ed with `shift[d]` before scaling, which
    /// randomises the net while keeping its stratification.
    pub fn with_shift(dims: usize, shift: [u32; MAX_DIMS]) -> Self {
        assert!(
            (1..=MAX_DIMS).contains(&dims),
            "Sobol dimension must be in 1..={MAX_DIMS}"
        );
        let mut directions = [[0u32; BITS]; MAX_DIMS];
        for (d, dir) in directions.iter_mut().enumerate().take(dims) {
            *dir = direction_numbers(d);
        }
        Sobol {
            dims,
            directions,
            state: [0; MAX_DIMS],
            shift,
            index: 0,
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Writes the next point into `out[..dims]`, each coordinate in `(0, 1)`.
    pub fn next_into(&mut self, out: &mut [f64]) {
        const SCALE: f64 = 1.0 / (1u64 << BITS) as f64;
        for d in 0..self.dims {
            out[d] = ((self.state[d] ^ self.shift[d]) as f64 + 0.5) * SCALE;
        }
        // Gray-code update: flip the direction of the lowest zero bit.
        let c = (!self.index).trailing_zeros() as usize;
        assert!(c < BITS, "Sobol sequence exhausted");
        for d in 0..self.dims {
            self.state[d] ^= self.directions[d][c];
        }
        self.index += 1;
    }

    /// Unshifted integer state of the next point.
    #[cfg(test)]
    fn peek_raw(&self) -> [u32; MAX_DIMS] {
        self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_points_match_reference() {
        // unscrambled Joe-Kuo Sobol, first four points, dimensions 1..=8
        let expected: [[f64; 8]; 4] = [
            [0.0; 8],
            [0.5; 8],
            [0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75],
            [0.25, 0.75, 0.75, 0.75, 0.25, 0.25, 0.75, 0.25],
        ];
        let mut s = Sobol::new(8);
        let mut p = [0.0; 8];
        for row in expected.iter() {
            let raw = s.peek_raw();
            for d in 0..8 {
                assert_eq!(raw[d] as f64 / 4294967296.0, row[d], "dim {d}");
            }
            s.next_into(&mut p);
        }
    }

    #[test]
    fn deeper_points_match_reference() {
        let expected: [(usize, [u32; 8]); 3] = [
            (5, [3758096384, 3758096384, 536870912, 1610612736, 3758096384, 2684354560, 3758096384, 1610612736]),
            (100, [1778384896, 1107296256, 3321888768, 3120562176, 3791650816, 3187671040, 100663296, 2046820352]),
            (1023, [4194304, 3233808384, 2629828608, 624951296, 801112064, 1883242496, 599785472, 2654994432]),
        ];
        let mut s = Sobol::new(8);
        let mut p = [0.0; 8];
        let mut k = 0;
        for (index, raw) in expected {
            while k < index {
                s.next_into(&mut p);
                k += 1;
            }
            assert_eq!(s.peek_raw(), raw, "point {index}");
        }
    }

    #[test]
    fn blocks_stratify_each_axis() {
        for shift in [[0u32; MAX_DIMS], [0xdead_beef, 7, 99, 1 << 31, 5, 0x1234_5678, 42, 3]] {
            let mut s = Sobol::with_shift(8, shift);
            let mut p = [0.0; 8];
            let n = 1 << 10;
            let mut counts = vec![[0u32; 8]; n];
            for _ in 0..n {
                s.next_into(&mut p);
                for d in 0..8 {
                    assert!(p[d] > 0.0 && p[d] < 1.0);
                    counts[(p[d] * n as f64) as usize][d] += 1;
                }
            }
            assert!(counts.iter().all(|c| c.iter().all(|&k| k == 1)));
        }
    }

    #[test]
    fn integrates_smooth_function() {
        let mut s = Sobol::new(8);
        let mut p = [0.0; 8];
        let n = 1 << 14;
        let mut acc = 0.0;
        for _ in 0..n {
            s.next_into(&mut p);
            acc += p.iter().map(|v| v * v).sum::<f64>();
        }
        // plain Monte Carlo would be off by about 5e-3 here
        assert!((acc / n as f64 - 8.0 / 3.0).abs() < 1e-3);
    }
}
