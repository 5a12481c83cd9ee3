//! Integer rounding of the real-valued set sizes (δn, 2δn, n/4, ...).
//!
//! Products such as `0.1 * 60.0` are not exact in binary floating point, so
//! every rounding absorbs a small slack before taking the floor or ceiling.

const SLACK: f64 = 1e-9;

pub fn ceil(x: f64) -> usize {
    (x - SLACK).ceil().max(0.0) as usize
}

pub fn floor(x: f64) -> usize {
    (x + SLACK).floor().max(0.0) as usize
}

/// `⌈δn⌉`: the set size used for "a set of size δn".
pub fn delta_set(delta: f64, n: usize) -> usize {
    ceil(delta * n as f64)
}

/// `⌊2δn⌋`: largest set size covered by the small-set expansion clause.
pub fn small_set_limit(delta: f64, n: usize) -> usize {
    floor(2.0 * delta * n as f64)
}

/// `⌈n/4⌉`.
pub fn quarter(n: usize) -> usize {
    n.div_ceil(4)
}

/// `⌊(1/4 + δ/2)n⌋`: size of each half of a robust-majority partition candidate.
pub fn partition_half(delta: f64, n: usize) -> usize {
    floor((0.25 + delta / 2.0) * n as f64)
}

/// `⌊n/10⌋`: tolerance of the lower-bound success predicate.
pub fn tenth(n: usize) -> usize {
    n / 10
}

/// `⌈6δn⌉`: tolerance of the robust-majority guarantee.
pub fn six_delta(delta: f64, n: usize) -> usize {
    ceil(6.0 * delta * n as f64)
}

/// `C(n, k)` saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}
