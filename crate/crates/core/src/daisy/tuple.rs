use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::iroot_floor;
use crate::error::{Error, Result};

/// A nonincreasing tuple of positive integers whose first and last entries
/// differ by at most one, i.e. `(t+1)^j t^(k-j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Do1Tuple(Vec<u64>);

impl TryFrom<Vec<u64>> for Do1Tuple {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Do1Tuple::new(v)
    }
}

impl From<Do1Tuple> for Vec<u64> {
    fn from(t: Do1Tuple) -> Self {
        t.0
    }
}

impl fmt::Display for Do1Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Whether `v` is nonempty, positive, nonincreasing and of oscillation at most 1.
pub fn is_do1(v: &[u64]) -> bool {
    do1_violation(v).is_none()
}

fn do1_violation(v: &[u64]) -> Option<&'static str> {
    if v.is_empty() {
        return Some("empty");
    }
    if v.contains(&0) {
        return Some("entries must be positive");
    }
    if v.windows(2).any(|w| w[0] < w[1]) {
        return Some("not nonincreasing");
    }
    if v[0] - v[v.len() - 1] > 1 {
        return Some("oscillation exceeds 1");
    }
    None
}

impl Do1Tuple {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        match do1_violation(&values) {
            Some(reason) => Err(Error::InvalidTuple { values, reason }),
            None => Ok(Do1Tuple(values)),
        }
    }

    /// `(t+1)^j t^(len-j)`.
    pub fn from_parts(t: u64, j: usize, len: usize) -> Result<Self> {
        if j > len {
            return Err(Error::arg(format!("split {j} exceeds length {len}")));
        }
        let mut v = vec![t + 1; j];
        v.resize(len, t);
        Self::new(v)
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> u64 {
        self.0[0]
    }

    pub fn last(&self) -> u64 {
        self.0[self.0.len() - 1]
    }

    pub fn product(&self) -> u128 {
        self.0.iter().map(|&v| v as u128).product()
    }

    /// 0-based index of the first strict drop, or 0 for a constant tuple.
    ///
    /// The drop branch applies when the oscillation `first - last` equals 1.
    pub fn value_change_position(&self) -> usize {
        if self.first() == self.last() {
            return 0;
        }
        (1..self.0.len()).find(|&j| self.0[j] < self.0[j - 1]).expect("oscillation 1 means a drop exists")
    }

    /// The entries with index `skip` removed.
    pub fn without(&self, skip: usize) -> Vec<u64> {
        self.0.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()
    }

    /// Whether `smaller` sits below `self` in the daisy chain: entrywise at most
    /// `self` with the value-change entry skipped, and strictly below somewhere.
    pub fn is_larger_than(&self, smaller: &Do1Tuple) -> bool {
        if smaller.len() + 1 != self.len() {
            return false;
        }
        let rest = self.without(self.value_change_position());
        smaller.0.iter().zip(&rest).all(|(a, b)| a <= b) && smaller.0.iter().zip(&rest).any(|(a, b)| a < b)
    }

    /// Entrywise `<=`.
    pub fn fits_in(&self, other: &Do1Tuple) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// The largest tuple of length `len` (in the lattice order, equivalently by
    /// product) whose product is at most `m`; `None` for `m = 0`.
    pub fn largest_with_product_at_most(len: usize, m: u128) -> Option<Do1Tuple> {
        if m == 0 || len == 0 {
            return None;
        }
        let t = iroot_floor(m, len as u32);
        let mut j = 0;
        let mut prod = t.pow(len as u32);
        // Raise entries from t to t + 1 left to right while the product fits.
        while j + 1 < len {
            let next = prod / t * (t + 1);
            if next > m {
                break;
            }
            prod = next;
            j += 1;
        }
        Some(Do1Tuple::from_parts(t as u64, j, len).expect("valid by construction"))
    }
}
