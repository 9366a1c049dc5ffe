//! In-place fast Walsh–Hadamard transforms (unnormalized).
//!
//! `out[y] = Σ_x in[x] · (-1)^{popcount(x & y)}`.

use std::ops::{Add, Sub};

fn butterfly<T: Copy + Add<Output = T> + Sub<Output = T>>(data: &mut [T]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "transform length {len} is not a power of two");
    let mut half = 1;
    while half < len {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        half *= 2;
    }
}

/// Exact integer transform.
pub fn fwht_i64(data: &mut [i64]) {
    butterfly(data);
}

pub fn fwht_f64(data: &mut [f64]) {
    butterfly(data);
}

pub fn fwht_c64(data: &mut [num_complex::Complex64]) {
    butterfly(data);
}
