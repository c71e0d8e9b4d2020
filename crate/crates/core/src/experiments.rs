//! Desk-scale reproduction of the fluctuation law: how far members of the
//! extremal slab family (or near-cubic daisies) sit from the Wulff cube, and
//! a log-log fit of that distance against `n`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bounds::{scaling_exponent, scaling_floor, slab};
use crate::daisy::daisy_of_cardinality;
use crate::error::{Error, Result};
use crate::lattice::{min_translate_symdiff_boxes, wulff_box, Cuboid, LatticeShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `slab(ell, d, floor(h))`.
    SlabExtremal,
    /// The daisy with `ell^d - 1` points.
    Daisy,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slab-extremal" => Ok(Family::SlabExtremal),
            "daisy" => Ok(Family::Daisy),
            _ => Err(Error::arg(format!("unknown family `{s}` (expected slab-extremal or daisy)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::SlabExtremal => "slab-extremal",
            Family::Daisy => "daisy",
        })
    }
}

fn ratio_text<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FluctuationRow {
    pub d: usize,
    pub ell: u64,
    /// Slab depth; 0 for daisies.
    pub p: u64,
    pub n: u128,
    /// Minimal symmetric difference with the Wulff cube over translations.
    pub symdiff: u128,
    #[serde(serialize_with = "ratio_text")]
    pub exponent_pred: Ratio<u64>,
}

/// Disjoint boxes making up the family member for `ell`.
pub fn family_boxes(family: Family, d: usize, ell: u64) -> Result<(u64, Vec<Cuboid>)> {
    match family {
        Family::SlabExtremal => {
            let p = scaling_floor(ell, d);
            Ok((p, vec![slab(ell, d, p)?]))
        }
        Family::Daisy => {
            let n = (ell as u128)
                .checked_pow(d as u32)
                .and_then(|v| v.checked_sub(1))
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::arg(format!("no daisy of size ell^d - 1 for ell = {ell}, d = {d}")))?;
            Ok((0, daisy_of_cardinality(n, d)?.layer_boxes()))
        }
    }
}

/// One row per `ell`, in the given order.
pub fn fluctuation_scan(d: usize, ells: &[u64], family: Family) -> Result<Vec<FluctuationRow>> {
    let exponent_pred = scaling_exponent(d)?;
    ells.par_iter()
        .map(|&ell| {
            let (p, boxes) = family_boxes(family, d, ell)?;
            let n: u128 = boxes.iter().map(LatticeShape::cardinality).sum();
            let w = wulff_box(n, d)?;
            let symdiff = min_translate_symdiff_boxes(&boxes, &[w])?.count;
            Ok(FluctuationRow { d, ell, p, n, symdiff, exponent_pred })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    /// `exp(intercept)`, the empirical constant in `symdiff ~ K n^slope`.
    pub constant: f64,
    /// Largest absolute residual in log space.
    pub residual: f64,
    pub rows_used: usize,
}

/// Least squares on `(ln n, ln symdiff)` over rows with `symdiff > 0`.
pub fn fit_exponent(rows: &[FluctuationRow]) -> Result<Fit> {
    let pairs: Vec<(u128, u128)> = rows.iter().map(|r| (r.n, r.symdiff)).collect();
    fit_pairs(&pairs)
}

/// As [`fit_exponent`] on bare `(n, symdiff)` pairs.
pub fn fit_pairs(pairs: &[(u128, u128)]) -> Result<Fit> {
    let pts: Vec<(f64, f64)> =
        pairs.iter().filter(|p| p.1 > 0 && p.0 > 0).map(|&(n, s)| ((n as f64).ln(), (s as f64).ln())).collect();
    if pts.len() < 5 {
        return Err(Error::arg(format!("fitting needs at least 5 rows with positive symdiff, got {}", pts.len())));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::arg("fitting needs at least two distinct n"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    Ok(Fit { slope, constant: intercept.exp(), residual, rows_used: pts.len() })
}
