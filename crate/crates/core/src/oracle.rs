//! Brute-force ground truth for tiny instances.
//!
//! Connected fixed shapes are grown from their lexicographically smallest
//! cell (Redelmeier's method), so every shape appears once up to translation.
//! Disconnected candidates are ruled out by comparing the best connected bond
//! count with every split into two non-touching parts, and at the smallest
//! sizes by scanning every subset of a box.

use rayon::prelude::*;
use serde::Serialize;

use crate::daisy::{daisy_of_cardinality, eip_value};
use crate::error::{Error, Result};
use crate::lattice::{edge_perimeter, Config};

/// Largest `n` enumerated for each dimension (index `d`).
pub const SIZE_LIMITS: [usize; 4] = [0, 12, 12, 7];

/// Largest `n` for which every subset of the `n^d` box is scanned.
pub const SUBSET_LIMITS: [usize; 4] = [0, 6, 6, 5];

/// How disconnected configurations were excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisconnectedCheck {
    /// Every subset of the `n^d` box was scanned as well.
    Exhaustive,
    /// Splits into two parts lose at least one bond.
    ComponentBound,
    /// Some split ties the connected optimum; the list may be incomplete.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub d: usize,
    pub eip: u128,
    /// Minimizers translated to start at 1 on every axis, sorted.
    pub minimizers: Vec<Config>,
    pub count: usize,
    /// Number of connected fixed shapes of size `n`.
    pub shapes: u64,
    pub disconnected: DisconnectedCheck,
}

struct Grid {
    d: usize,
    n: usize,
    lo: Vec<i32>,
    strides: Vec<usize>,
    allowed: Vec<bool>,
    offsets: Vec<isize>,
    origin: usize,
}

impl Grid {
    /// Cells reachable from the origin by `n - 1` steps that are not below it
    /// lexicographically, padded by one so neighbour lookups never leave it.
    fn new(n: usize, d: usize) -> Grid {
        let r = n as i32;
        let lo: Vec<i32> = (0..d).map(|a| if a == 0 { -1 } else { -r }).collect();
        let sizes: Vec<usize> = (0..d).map(|a| if a == 0 { n + 2 } else { 2 * n + 1 }).collect();
        let mut strides = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * sizes[a + 1];
        }
        let total = strides[0] * sizes[0];
        let mut allowed = vec![false; total];
        let mut p = vec![0i32; d];
        for (idx, slot) in allowed.iter_mut().enumerate() {
            let mut rem = idx;
            for a in 0..d {
                p[a] = (rem / strides[a]) as i32 + lo[a];
                rem %= strides[a];
            }
            let inside = p.iter().enumerate().all(|(a, &x)| x > lo[a] && x < lo[a] + sizes[a] as i32 - 1);
            let first = p.iter().find(|&&x| x != 0);
            *slot = inside && first.map_or(true, |&x| x > 0);
        }
        let origin = (0..d).map(|a| (-lo[a]) as usize * strides[a]).sum();
        let offsets = strides.iter().flat_map(|&s| [-(s as isize), s as isize]).collect();
        Grid { d, n, lo, strides, allowed, offsets, origin }
    }

    fn point(&self, mut idx: usize) -> Vec<i32> {
        let mut p = vec![0; self.d];
        for a in 0..self.d {
            p[a] = (idx / self.strides[a]) as i32 + self.lo[a];
            idx %= self.strides[a];
        }
        p
    }
}

/// Per-branch state of the growth.
struct Walk<'g> {
    g: &'g Grid,
    reached: Vec<bool>,
    in_shape: Vec<bool>,
    shape: Vec<usize>,
    bonds: u32,
    /// Best bond count seen at each size, `-1` if none.
    best: Vec<i64>,
    shapes: u64,
    hits: Vec<Vec<usize>>,
}

impl<'g> Walk<'g> {
    fn new(g: &'g Grid) -> Self {
        let size = g.allowed.len();
        Walk {
            g,
            reached: vec![false; size],
            in_shape: vec![false; size],
            shape: Vec::with_capacity(g.n),
            bonds: 0,
            best: vec![-1; g.n + 1],
            shapes: 0,
            hits: Vec::new(),
        }
    }

    fn add(&mut self, c: usize, untried: &[usize]) {
        let g = self.g;
        let nb = g.offsets.iter().filter(|&&o| self.in_shape[(c as isize + o) as usize]).count() as u32;
        self.in_shape[c] = true;
        self.shape.push(c);
        self.bonds += nb;
        let k = self.shape.len();
        let b = self.bonds as i64;
        if b > self.best[k] {
            self.best[k] = b;
            if k == g.n {
                self.hits.clear();
            }
        }
        if k == g.n {
            self.shapes += 1;
            if b == self.best[k] {
                self.hits.push(self.shape.clone());
            }
        } else {
            let mut next = untried.to_vec();
            let mark = next.len();
            for &o in &g.offsets {
                let x = (c as isize + o) as usize;
                if g.allowed[x] && !self.reached[x] {
                    self.reached[x] = true;
                    next.push(x);
                }
            }
            let fresh = next[mark..].to_vec();
            while let Some(x) = next.pop() {
                self.add(x, &next);
            }
            for x in fresh {
                self.reached[x] = false;
            }
        }
        self.shape.pop();
        self.in_shape[c] = false;
        self.bonds -= nb;
    }
}

struct Growth {
    /// Best bond count of a connected shape of each size.
    best: Vec<i64>,
    shapes: u64,
    hits: Vec<Vec<Vec<i32>>>,
}

/// Grows every connected shape of size at most `n`, in parallel over the
/// second cell.
fn grow(n: usize, d: usize) -> Growth {
    let g = Grid::new(n, d);
    let first: Vec<usize> = g.offsets.iter().map(|&o| (g.origin as isize + o) as usize).filter(|&x| g.allowed[x]).collect();
    let mut best = vec![-1i64; n + 1];
    best[1] = 0;
    if n == 1 {
        return Growth { best, shapes: 1, hits: vec![vec![vec![0; d]]] };
    }
    let walks: Vec<Walk> = (0..first.len())
        .into_par_iter()
        .map(|b| {
            let mut w = Walk::new(&g);
            w.reached[g.origin] = true;
            for &x in &first {
                w.reached[x] = true;
            }
            w.in_shape[g.origin] = true;
            w.shape.push(g.origin);
            w.add(first[b], &first[..b]);
            w
        })
        .collect();
    let mut shapes = 0;
    for w in &walks {
        shapes += w.shapes;
        for k in 2..=n {
            best[k] = best[k].max(w.best[k]);
        }
    }
    let hits = walks
        .iter()
        .filter(|w| w.best[n] == best[n])
        .flat_map(|w| w.hits.iter().map(|h| h.iter().map(|&i| g.point(i)).collect::<Vec<_>>()))
        .collect();
    Growth { best, shapes, hits }
}

/// Best bond count over all configurations of each size, allowing any
/// number of non-touching parts.
fn best_any(best_conn: &[i64]) -> Vec<i64> {
    let mut any = best_conn.to_vec();
    for k in 2..any.len() {
        for a in 1..k {
            any[k] = any[k].max(any[a] + any[k - a]);
        }
    }
    any
}

/// Scans every `n`-subset of `{1..n}^d` and returns the largest bond count and
/// how many subsets reach `target` while being disconnected.
fn subset_scan(n: usize, d: usize, target: u32) -> (u32, u64) {
    let m = n;
    let cells = m.pow(d as u32);
    let mut strides = vec![1usize; d];
    for a in (0..d - 1).rev() {
        strides[a] = strides[a + 1] * m;
    }
    // Neighbours with a smaller index, i.e. one step down along some axis.
    let lower: Vec<Vec<usize>> = (0..cells)
        .map(|i| (0..d).filter(|&a| (i / strides[a]) % m > 0).map(|a| i - strides[a]).collect())
        .collect();
    struct Scan<'a> {
        n: usize,
        m: usize,
        d: usize,
        target: u32,
        lower: &'a [Vec<usize>],
        strides: &'a [usize],
        chosen: Vec<usize>,
        member: Vec<bool>,
        best: u32,
        loose: u64,
    }
    impl Scan<'_> {
        fn rec(&mut self, start: usize, bonds: u32) {
            let k = self.chosen.len();
            if k == self.n {
                self.best = self.best.max(bonds);
                if bonds >= self.target && !self.connected() {
                    self.loose += 1;
                }
                return;
            }
            let room = (self.n - k) as u32 * self.d as u32;
            if bonds + room < self.target {
                return;
            }
            let cells = self.member.len();
            for c in start..=cells - (self.n - k) {
                let add = self.lower[c].iter().filter(|&&x| self.member[x]).count() as u32;
                self.member[c] = true;
                self.chosen.push(c);
                self.rec(c + 1, bonds + add);
                self.chosen.pop();
                self.member[c] = false;
            }
        }

        fn connected(&self) -> bool {
            let m = self.m;
            let mut seen = vec![false; self.member.len()];
            let mut stack = vec![self.chosen[0]];
            seen[self.chosen[0]] = true;
            let mut count = 0;
            while let Some(c) = stack.pop() {
                count += 1;
                for &s in self.strides {
                    let coord = (c / s) % m;
                    for (ok, x) in [(coord > 0, c.wrapping_sub(s)), (coord + 1 < m, c + s)] {
                        if ok && self.member[x] && !seen[x] {
                            seen[x] = true;
                            stack.push(x);
                        }
                    }
                }
            }
            count == self.n
        }
    }
    let results: Vec<(u32, u64)> = (0..=cells - n)
        .into_par_iter()
        .map(|c0| {
            let mut s = Scan {
                n,
                m,
                d,
                target,
                lower: &lower,
                strides: &strides,
                chosen: vec![c0],
                member: vec![false; cells],
                best: 0,
                loose: 0,
            };
            s.member[c0] = true;
            s.rec(c0 + 1, 0);
            (s.best, s.loose)
        })
        .collect();
    results.into_iter().fold((0, 0), |(b, l), (b2, l2)| (b.max(b2), l + l2))
}

/// Exact EIP value and every minimizer up to translation.
pub fn eip_bruteforce(n: usize, d: usize) -> Result<OracleReport> {
    if n == 0 || d == 0 {
        return Err(Error::arg("the oracle needs n >= 1 and d >= 1"));
    }
    let limit = SIZE_LIMITS.get(d).copied().ok_or_else(|| {
        Error::BudgetExceeded(format!("the oracle covers d <= {}, got d = {d}", SIZE_LIMITS.len() - 1))
    })?;
    if n > limit {
        return Err(Error::BudgetExceeded(format!("the oracle covers n <= {limit} in d = {d}, got n = {n}")));
    }
    let growth = grow(n, d);
    let best = growth.best[n];
    let any = best_any(&growth.best);
    let split = (1..n).map(|a| any[a] + any[n - a]).max().unwrap_or(-1);
    let mut disconnected = if best > split { DisconnectedCheck::ComponentBound } else { DisconnectedCheck::Inconclusive };
    if n <= SUBSET_LIMITS[d] && n > 1 {
        let (max, loose) = subset_scan(n, d, best as u32);
        if max as i64 > best {
            return Err(Error::invariant(format!("a subset has {max} bonds, more than any connected shape ({best})")));
        }
        disconnected = if loose == 0 { DisconnectedCheck::Exhaustive } else { DisconnectedCheck::Inconclusive };
    }
    let mut minimizers = growth
        .hits
        .iter()
        .map(|h| Config::new(d, h)?.normalized())
        .collect::<Result<Vec<_>>>()?;
    minimizers.sort();
    let eip = 2 * d as u128 * n as u128 - 2 * best as u128;
    Ok(OracleReport { n, d, eip, count: minimizers.len(), minimizers, shapes: growth.shapes, disconnected })
}

/// One `(d, n)` comparison of the oracle against a claimed EIP function.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationRow {
    pub d: usize,
    pub n: usize,
    pub oracle_eip: u128,
    pub claimed_eip: u128,
    pub daisy_listed: bool,
    pub pass: bool,
    /// On failure, a configuration exposing the mismatch.
    pub witness: Option<Config>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossValidation {
    pub rows: Vec<ValidationRow>,
    pub passed: bool,
}

/// Compares the oracle with the daisy construction for `n <= n_max_2d` in
/// two dimensions and `n <= n_max_3d` in three.
pub fn cross_validate(n_max_2d: usize, n_max_3d: usize) -> Result<CrossValidation> {
    cross_validate_with(n_max_2d, n_max_3d, |n, d| eip_value(n as u128, d))
}

/// As [`cross_validate`] with the claimed EIP value supplied by `claimed`.
pub fn cross_validate_with(
    n_max_2d: usize,
    n_max_3d: usize,
    claimed: impl Fn(usize, usize) -> Result<u128>,
) -> Result<CrossValidation> {
    let mut rows = Vec::new();
    for (d, n_max) in [(2, n_max_2d), (3, n_max_3d)] {
        for n in 1..=n_max {
            let report = eip_bruteforce(n, d)?;
            let claim = claimed(n, d)?;
            let daisy = daisy_of_cardinality(n as u128, d)?.materialize()?;
            let listed = report.minimizers.binary_search(&daisy).is_ok();
            let pass = claim == report.eip && listed && edge_perimeter(&daisy) == claim;
            let witness = if pass {
                None
            } else if claim != report.eip {
                report.minimizers.first().cloned()
            } else {
                Some(daisy)
            };
            rows.push(ValidationRow { d, n, oracle_eip: report.eip, claimed_eip: claim, daisy_listed: listed, pass, witness });
        }
    }
    let passed = rows.iter().all(|r| r.pass);
    Ok(CrossValidation { rows, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_counts_match_known_values() {
        // Fixed polyominoes and polycubes.
        let counts2 = [1, 2, 6, 19, 63, 216, 760, 2725];
        for (i, &c) in counts2.iter().enumerate() {
            assert_eq!(eip_bruteforce(i + 1, 2).unwrap().shapes, c, "n = {}", i + 1);
        }
        let counts3 = [1, 3, 15, 86, 534];
        for (i, &c) in counts3.iter().enumerate() {
            assert_eq!(eip_bruteforce(i + 1, 3).unwrap().shapes, c, "n = {}", i + 1);
        }
    }

    #[test]
    fn small_reports() {
        let r = eip_bruteforce(4, 2).unwrap();
        assert_eq!(r.eip, 8);
        assert_eq!(r.minimizers, vec![Config::new(2, [[1, 1], [1, 2], [2, 1], [2, 2]]).unwrap()]);
        assert_eq!(r.disconnected, DisconnectedCheck::Exhaustive);
        let r = eip_bruteforce(3, 2).unwrap();
        assert_eq!(r.eip, 8);
        assert_eq!(r.count, 6);
        let one = eip_bruteforce(1, 3).unwrap();
        assert_eq!((one.eip, one.count), (6, 1));
    }

    #[test]
    fn budgets() {
        assert!(matches!(eip_bruteforce(8, 3), Err(Error::BudgetExceeded(_))));
        assert!(matches!(eip_bruteforce(13, 2), Err(Error::BudgetExceeded(_))));
        assert!(matches!(eip_bruteforce(2, 4), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn injected_fault_is_caught() {
        let ok = cross_validate(5, 3).unwrap();
        assert!(ok.passed);
        let bad = cross_validate_with(5, 3, |n, d| Ok(eip_value(n as u128, d)? + 2)).unwrap();
        assert!(!bad.passed);
        assert!(bad.rows.iter().all(|r| !r.pass && r.witness.is_some()));
    }
}
