//! The scaling parameter `h = ell^(2^(1-d))`, the slab families that are (or
//! are not) minimizers, and the exponent of the fluctuation law.
//!
//! Thresholds of the form `x >= 4^(1 - 2^(1-d)) h` are decided exactly by
//! raising both sides to the power `2^(d-1)`.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{at_least_scaled_root, ceil_scaled_root, iroot_floor, root_index};
use crate::daisy::eip_value;
use crate::error::{Error, Result};
use crate::lattice::{Cuboid, LatticeShape};

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingParams {
    pub ell: u64,
    pub d: usize,
    /// `floor(h)`, exact.
    pub h_floor: u64,
    /// `h` as a float, for display only.
    pub h: f64,
    /// `c = 1 - 2^(1-d)`.
    pub c: Ratio<u64>,
}

impl ScalingParams {
    pub fn new(ell: u64, d: usize) -> Result<Self> {
        check(ell, d)?;
        let n = root_index(d as u32);
        Ok(ScalingParams {
            ell,
            d,
            h_floor: scaling_floor(ell, d),
            h: (ell as f64).powf(1.0 / n as f64),
            c: scaling_constant(d),
        })
    }
}

fn check(ell: u64, d: usize) -> Result<()> {
    if ell == 0 || d == 0 || d > 31 {
        return Err(Error::arg(format!("need ell >= 1 and 1 <= d <= 31, got ell = {ell}, d = {d}")));
    }
    Ok(())
}

/// `floor(ell^(2^(1-d)))`.
pub fn scaling_floor(ell: u64, d: usize) -> u64 {
    iroot_floor(ell as u128, root_index(d as u32)) as u64
}

/// `1 - 2^(1-d)`.
pub fn scaling_constant(d: usize) -> Ratio<u64> {
    let n = 1u64 << (d - 1);
    Ratio::new(n - 1, n)
}

/// `(d - 1 + 2^(1-d)) / d`, reduced.
pub fn scaling_exponent(d: usize) -> Result<Ratio<u64>> {
    if !(2..=31).contains(&d) {
        return Err(Error::arg(format!("the exponent is defined for 2 <= d <= 31, got {d}")));
    }
    let n = 1u64 << (d - 1);
    Ok(Ratio::new((d as u64 - 1) * n + 1, d as u64 * n))
}

/// `{1..ell-p} x {1..ell}^(d-1)`.
pub fn slab(ell: u64, d: usize, p: u64) -> Result<Cuboid> {
    check(ell, d)?;
    if p >= ell {
        return Err(Error::arg(format!("slab depth p = {p} must be below ell = {ell}")));
    }
    let mut ext = vec![ell; d];
    ext[0] = ell - p;
    Cuboid::at_origin(ext)
}

/// `{1..ell-2p} x {1..ell+1}^j x {1..ell}^(d-1-j)`.
pub fn padded_slab(ell: u64, j: usize, d: usize, two_p: u64) -> Result<Cuboid> {
    check(ell, d)?;
    if j >= d {
        return Err(Error::arg(format!("j = {j} must be below d = {d}")));
    }
    if two_p >= ell {
        return Err(Error::arg(format!("2p = {two_p} must be below ell = {ell}")));
    }
    let mut ext = vec![ell; d];
    ext[0] = ell - two_p;
    for e in &mut ext[1..=j] {
        *e = ell + 1;
    }
    Cuboid::at_origin(ext)
}

/// Whether `two_p >= 4^c h`, the padding that rules out minimality.
pub fn padding_threshold_met(two_p: u64, ell: u64, d: usize) -> bool {
    at_least_scaled_root(two_p as u128, ell as u128, d as u32)
}

/// The smallest integer meeting [`padding_threshold_met`].
pub fn padding_threshold(ell: u64, d: usize) -> u64 {
    ceil_scaled_root(ell as u128, d as u32) as u64
}

/// One member of a slab family compared with the optimum of its size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub ell: u64,
    /// Number of padded sides; 0 for plain slabs.
    pub j: usize,
    /// Depth removed from the first side.
    pub p: u64,
    pub theta_family: u128,
    pub theta_daisy: u128,
    pub is_minimizer: bool,
}

fn row(d: usize, ell: u64, j: usize, p: u64, b: &Cuboid) -> Result<SweepRow> {
    let theta_family = b.edge_perimeter();
    let theta_daisy = eip_value(b.cardinality(), d)?;
    Ok(SweepRow { d, ell, j, p, theta_family, theta_daisy, is_minimizer: theta_family == theta_daisy })
}

/// Slabs `slab(ell, d, p)` for every `p <= floor(h)`; all should be minimizers.
pub fn lower_bound_sweep(d: usize, ells: &[u64]) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(u64, u64)> =
        ells.iter().flat_map(|&ell| (0..=scaling_floor(ell, d).min(ell - 1)).map(move |p| (ell, p))).collect();
    jobs.par_iter().map(|&(ell, p)| row(d, ell, 0, p, &slab(ell, d, p)?)).collect()
}

/// Padded slabs for every `j` and every even `2p` from the threshold up to
/// `ell - 1`; none should be minimizers.
pub fn converse_sweep(d: usize, ells: &[u64]) -> Result<Vec<SweepRow>> {
    let mut jobs = Vec::new();
    for &ell in ells {
        check(ell, d)?;
        let lo = padding_threshold(ell, d);
        for j in 0..d {
            for two_p in (lo..ell).filter(|t| t % 2 == 0) {
                jobs.push((ell, j, two_p));
            }
        }
    }
    jobs.par_iter().map(|&(ell, j, t)| row(d, ell, j, t, &padded_slab(ell, j, d, t)?)).collect()
}
