//! Exact integer roots and threshold comparisons.

use num_bigint::BigUint;

/// Largest `r` with `r^k <= n`.
pub fn iroot_floor(n: u128, k: u32) -> u128 {
    assert!(k >= 1, "root index must be positive");
    if n < 2 || k == 1 {
        return n;
    }
    // Float seed, then correct with exact checks.
    let mut r = (n as f64).powf(1.0 / k as f64) as u128;
    while r > 0 && !pow_le(r, k, n) {
        r -= 1;
    }
    while pow_le(r + 1, k, n) {
        r += 1;
    }
    r
}

/// Smallest `r` with `r^k >= n`.
pub fn iroot_ceil(n: u128, k: u32) -> u128 {
    let r = iroot_floor(n, k);
    if checked_pow(r, k) == Some(n) {
        r
    } else {
        r + 1
    }
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

fn pow_le(base: u128, exp: u32, bound: u128) -> bool {
    matches!(checked_pow(base, exp), Some(v) if v <= bound)
}

/// `2^(d-1)`, the exponent that clears the root in `ell^(2^(1-d))`.
pub fn root_index(d: u32) -> u32 {
    assert!((1..=31).contains(&d), "dimension out of range");
    1u32 << (d - 1)
}

/// Decides `x >= 4^(1 - 2^(1-d)) * ell^(2^(1-d))` for a nonnegative integer `x`.
///
/// Both sides are raised to the power `N = 2^(d-1)`, giving `x^N >= 4^(N-1) * ell`.
pub fn at_least_scaled_root(x: u128, ell: u128, d: u32) -> bool {
    let n = root_index(d);
    let lhs = BigUint::from(x).pow(n);
    let rhs = (BigUint::from(4u32).pow(n - 1)) * BigUint::from(ell);
    lhs >= rhs
}

/// Decides `x <= 4^(1 - 2^(1-d)) * ell^(2^(1-d))` for an integer `x`.
pub fn at_most_scaled_root(x: i128, ell: u128, d: u32) -> bool {
    if x <= 0 {
        return true;
    }
    let n = root_index(d);
    let lhs = BigUint::from(x as u128).pow(n);
    let rhs = (BigUint::from(4u32).pow(n - 1)) * BigUint::from(ell);
    lhs <= rhs
}

/// Smallest integer `x` with `x >= 4^(1 - 2^(1-d)) * ell^(2^(1-d))`.
pub fn ceil_scaled_root(ell: u128, d: u32) -> u128 {
    // 4^c * h <= 4 * ell, so the answer lies in [0, 4 * ell].
    let (mut lo, mut hi) = (0u128, 4 * ell.max(1));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if at_least_scaled_root(mid, ell, d) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}
