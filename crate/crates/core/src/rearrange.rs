//! Decreasing rearrangement along an axis and section-wise minimality.

use rayon::prelude::*;

use crate::daisy::{daisy_of_cardinality, is_minimizer};
use crate::error::{Error, Result};
use crate::lattice::{sections, Config};

/// Replaces the sections orthogonal to `axis` by canonical daisies of the same
/// sizes, stacked at levels `1, 2, ...` in nonincreasing order of size.
pub fn decreasing_rearrangement(c: &Config, axis: usize) -> Result<Config> {
    if c.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    let d = c.dim();
    let mut sizes: Vec<usize> = sections(c, axis)?.values().map(Config::len).collect();
    sizes.sort_by(|a, b| b.cmp(a));
    let levels = sizes
        .par_iter()
        .map(|&n| daisy_of_cardinality(n as u128, d - 1)?.materialize())
        .collect::<Result<Vec<_>>>()?;
    let mut flat = Vec::with_capacity(c.len() * d);
    for (k, level) in levels.iter().enumerate() {
        let k = i32::try_from(k + 1).map_err(|_| Error::CoordinateOverflow)?;
        for p in level.iter() {
            flat.extend_from_slice(&p[..axis]);
            flat.push(k);
            flat.extend_from_slice(&p[axis..]);
        }
    }
    Config::from_flat(d, flat)
}

/// Whether every section, along every axis, is itself a minimizer.
pub fn sections_are_minimizers(c: &Config) -> Result<bool> {
    for axis in 0..c.dim() {
        for s in sections(c, axis)?.values() {
            if !is_minimizer(s)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
