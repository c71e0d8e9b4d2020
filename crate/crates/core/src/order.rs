//! The recursive total order on `N^d` and its initial segments.
//!
//! `x < y` when `max x < max y`; on ties, when `x~ < y~` right-to-left
//! lexicographically, where `x~` keeps the maximal entries of `x` and sets the
//! others to 1; if also `x~ = y~` (and the common maximum exceeds 2), the
//! comparison recurses on the tuples with the maximal entries removed.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::arith::iroot_ceil;
use crate::error::{Error, Result};
use crate::lattice::{Config, MATERIALIZE_LIMIT};

/// A point of `N^d` (all coordinates at least 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderKey(Vec<u64>);

impl OrderKey {
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::arg("order keys need at least one coordinate"));
        }
        if coords.contains(&0) {
            return Err(Error::arg(format!("order keys live in N^d, got {coords:?}")));
        }
        Ok(OrderKey(coords))
    }

    pub fn from_point(p: &[i32]) -> Result<Self> {
        Self::new(
            p.iter()
                .map(|&v| u64::try_from(v).map_err(|_| Error::arg(format!("negative coordinate in {p:?}"))))
                .collect::<Result<_>>()?,
        )
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.0
    }
}

/// Reusable buffers for [`compare_with`].
#[derive(Default)]
pub struct OrderScratch {
    cur: Vec<u64>,
    next: Vec<u64>,
}

pub fn compare(x: &OrderKey, y: &OrderKey) -> Result<Ordering> {
    compare_with(x.coords(), y.coords(), &mut OrderScratch::default())
}

/// Compares two raw tuples, reusing `scratch` for the reduced tuples.
pub fn compare_with(x: &[u64], y: &[u64], scratch: &mut OrderScratch) -> Result<Ordering> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.is_empty() {
        return Err(Error::arg("cannot compare empty tuples"));
    }
    let OrderScratch { cur, next } = scratch;
    cur.clear();
    cur.extend_from_slice(x);
    cur.extend_from_slice(y);
    let mut d = x.len();
    loop {
        let (xs, ys) = cur.split_at(d);
        if d == 1 {
            return Ok(xs[0].cmp(&ys[0]));
        }
        let mx = *xs.iter().max().expect("nonempty");
        let my = *ys.iter().max().expect("nonempty");
        if mx != my {
            return Ok(mx.cmp(&my));
        }
        let tilde = |v: u64| if v == mx { v } else { 1 };
        for i in (0..d).rev() {
            match tilde(xs[i]).cmp(&tilde(ys[i])) {
                Ordering::Equal => {}
                o => return Ok(o),
            }
        }
        if xs == ys {
            return Ok(Ordering::Equal);
        }
        if mx <= 2 {
            return Err(Error::invariant(format!(
                "order: distinct tuples {xs:?} and {ys:?} agree after reduction with maximum {mx}"
            )));
        }
        next.clear();
        next.extend(xs.iter().copied().filter(|&v| v != mx));
        let nd = next.len();
        next.extend(ys.iter().copied().filter(|&v| v != mx));
        std::mem::swap(cur, next);
        d = nd;
    }
}

/// The `n` smallest points of `N^d`.
pub fn initial_segment(n: u128, d: usize) -> Result<Config> {
    if n == 0 || d == 0 {
        return Err(Error::arg("initial segments need n >= 1 and d >= 1"));
    }
    let m = iroot_ceil(n, d as u32);
    let cells = m.checked_pow(d as u32).filter(|&c| c <= MATERIALIZE_LIMIT).ok_or_else(|| {
        Error::BudgetExceeded(format!("initial segment of {n} points in dimension {d} needs a {m}^{d} candidate cube"))
    })?;
    let mut keys: Vec<Vec<u64>> = Vec::with_capacity(cells as usize);
    let mut cur = vec![1u64; d];
    'outer: loop {
        keys.push(cur.clone());
        for a in (0..d).rev() {
            if (cur[a] as u128) < m {
                cur[a] += 1;
                continue 'outer;
            }
            cur[a] = 1;
        }
        break;
    }
    let mut scratch = OrderScratch::default();
    let mut failure = None;
    keys.sort_by(|a, b| match compare_with(a, b, &mut scratch) {
        Ok(o) => o,
        Err(e) => {
            failure.get_or_insert(e);
            Ordering::Equal
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    keys.truncate(n as usize);
    let mut flat = Vec::with_capacity(n as usize * d);
    for k in &keys {
        flat.extend(k.iter().map(|&v| v as i32));
    }
    Config::from_flat(d, flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmp(x: &[u64], y: &[u64]) -> Ordering {
        compare(&OrderKey::new(x.to_vec()).unwrap(), &OrderKey::new(y.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn documented_comparisons() {
        assert_eq!(cmp(&[1, 1], &[2, 1]), Ordering::Less);
        assert_eq!(cmp(&[2, 1], &[1, 2]), Ordering::Less);
        assert_eq!(cmp(&[1, 3, 3], &[2, 3, 3]), Ordering::Less);
        assert_eq!(cmp(&[2, 3, 3], &[1, 3, 3]), Ordering::Greater);
        assert_eq!(cmp(&[4], &[7]), Ordering::Less);
        assert_eq!(cmp(&[2, 2], &[2, 2]), Ordering::Equal);
    }

    #[test]
    fn rejects_bad_keys() {
        assert!(OrderKey::new(vec![0, 1]).is_err());
        assert!(OrderKey::new(vec![]).is_err());
        let a = OrderKey::new(vec![1, 2]).unwrap();
        let b = OrderKey::new(vec![1, 2, 3]).unwrap();
        assert!(matches!(compare(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn small_initial_segments() {
        let two = initial_segment(2, 2).unwrap();
        assert_eq!(two.to_points(), vec![vec![1, 1], vec![2, 1]]);
        let four = initial_segment(4, 2).unwrap();
        assert_eq!(four.to_points(), vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(initial_segment(1, 5).unwrap().to_points(), vec![vec![1; 5]]);
        assert!(initial_segment(0, 2).is_err());
    }
}
