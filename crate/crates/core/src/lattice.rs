//! Finite point sets in `Z^d`: bonds, edge perimeter, sections, envelopes and
//! translation overlap.
//!
//! Axes are 0-based throughout the library.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::iroot_floor;
use crate::error::{Error, Result};

/// Bounding boxes up to this many cells get a dense bitset.
pub const DENSE_CELL_LIMIT: u128 = 1 << 26;

/// Point sets above this size are never materialized from a closed form.
pub const MATERIALIZE_LIMIT: u128 = 10_000_000;

/// Anything with a cardinality and an edge perimeter.
pub trait LatticeShape {
    fn dim(&self) -> usize;
    fn cardinality(&self) -> u128;
    fn edge_perimeter(&self) -> u128;
}

/// A lattice point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<i32>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }
}

impl From<Vec<i32>> for Point {
    fn from(v: Vec<i32>) -> Self {
        Point(v)
    }
}

#[derive(Clone, Debug)]
struct DenseGrid {
    lo: Vec<i32>,
    ext: Vec<usize>,
    strides: Vec<usize>,
    bits: Vec<u64>,
}

impl DenseGrid {
    fn index(&self, p: &[i32]) -> Option<usize> {
        let mut idx = 0usize;
        for a in 0..p.len() {
            let off = p[a] as i64 - self.lo[a] as i64;
            if off < 0 || off >= self.ext[a] as i64 {
                return None;
            }
            idx += off as usize * self.strides[a];
        }
        Some(idx)
    }

    fn get(&self, idx: usize) -> bool {
        self.bits[idx >> 6] >> (idx & 63) & 1 == 1
    }
}

/// A finite set of points in `Z^d`, stored as sorted, deduplicated rows.
#[derive(Clone)]
pub struct Config {
    dim: usize,
    coords: Vec<i32>,
    grid: OnceLock<Option<DenseGrid>>,
}

impl PartialEq for Config {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.coords == other.coords
    }
}

impl Eq for Config {}

impl std::hash::Hash for Config {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.coords.hash(state);
    }
}

impl PartialOrd for Config {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Config {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dim.cmp(&other.dim).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Config(d={}, ", self.dim)?;
        f.debug_set().entries(self.iter()).finish()?;
        f.write_str(")")
    }
}

impl Config {
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        Ok(Self::from_sorted(dim, Vec::new()))
    }

    pub fn new<I, P>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[i32]>,
    {
        if dim == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        let mut flat = Vec::new();
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            flat.extend_from_slice(p);
        }
        Self::from_flat(dim, flat)
    }

    /// Builds a configuration from concatenated coordinates in any order.
    pub fn from_flat(dim: usize, flat: Vec<i32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        if flat.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, found: flat.len() % dim });
        }
        let n = flat.len() / dim;
        let row = |i: usize| &flat[i * dim..(i + 1) * dim];
        if (1..n).all(|i| row(i - 1) < row(i)) {
            return Ok(Self::from_sorted(dim, flat));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(|&a, &b| row(a).cmp(row(b)));
        let mut out = Vec::with_capacity(flat.len());
        let mut prev: Option<usize> = None;
        for i in order {
            if prev.map_or(true, |p| row(p) != row(i)) {
                out.extend_from_slice(row(i));
                prev = Some(i);
            }
        }
        Ok(Self::from_sorted(dim, out))
    }

    pub(crate) fn from_sorted(dim: usize, coords: Vec<i32>) -> Self {
        debug_assert!(dim > 0 && coords.len() % dim == 0);
        Config { dim, coords, grid: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Rows in lexicographic order.
    pub fn iter(&self) -> std::slice::ChunksExact<'_, i32> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn row(&self, i: usize) -> &[i32] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_points(&self) -> Vec<Vec<i32>> {
        self.iter().map(<[i32]>::to_vec).collect()
    }

    pub fn contains(&self, p: &[i32]) -> bool {
        if p.len() != self.dim || self.is_empty() {
            return false;
        }
        if let Some(g) = self.dense() {
            return g.index(p).is_some_and(|i| g.get(i));
        }
        self.position(p).is_some()
    }

    fn position(&self, p: &[i32]) -> Option<usize> {
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.row(mid).cmp(p) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    fn dense(&self) -> Option<&DenseGrid> {
        self.grid
            .get_or_init(|| {
                let (lo, hi) = self.bounds()?;
                let mut ext = Vec::with_capacity(self.dim);
                let mut cells: u128 = 1;
                for a in 0..self.dim {
                    let e = (hi[a] as i64 - lo[a] as i64 + 1) as u128;
                    cells = cells.saturating_mul(e);
                    ext.push(e as usize);
                }
                // Sparse sets spread over a huge box are cheaper to binary search.
                if cells > DENSE_CELL_LIMIT || cells > 64 * self.len() as u128 + 4096 {
                    return None;
                }
                let mut strides = vec![1usize; self.dim];
                for a in (0..self.dim - 1).rev() {
                    strides[a] = strides[a + 1] * ext[a + 1];
                }
                let mut g = DenseGrid { lo, ext, strides, bits: vec![0u64; (cells as usize).div_ceil(64)] };
                for p in self.iter() {
                    let i = g.index(p).expect("point inside its own envelope");
                    g.bits[i >> 6] |= 1 << (i & 63);
                }
                Some(g)
            })
            .as_ref()
    }

    /// Per-axis minimum and maximum, or `None` when empty.
    pub fn bounds(&self) -> Option<(Vec<i32>, Vec<i32>)> {
        let mut it = self.iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.to_vec(), first.to_vec());
        for p in it {
            for a in 0..self.dim {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Some((lo, hi))
    }

    /// Translates by `+shift`, failing instead of wrapping.
    pub fn translate(&self, shift: &[i64]) -> Result<Config> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: shift.len() });
        }
        let mut out = Vec::with_capacity(self.coords.len());
        for p in self.iter() {
            for a in 0..self.dim {
                let v = p[a] as i64 + shift[a];
                out.push(i32::try_from(v).map_err(|_| Error::CoordinateOverflow)?);
            }
        }
        Ok(Self::from_sorted(self.dim, out))
    }

    /// Translates so that every coordinate minimum equals 1.
    pub fn normalized(&self) -> Result<Config> {
        match self.bounds() {
            None => Ok(self.clone()),
            Some((lo, _)) => {
                let shift: Vec<i64> = lo.iter().map(|&v| 1 - v as i64).collect();
                self.translate(&shift)
            }
        }
    }

    /// New configuration whose axis `i` is the old axis `perm[i]`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Config> {
        let mut seen = vec![false; self.dim];
        if perm.len() != self.dim || perm.iter().any(|&a| a >= self.dim || std::mem::replace(&mut seen[a], true)) {
            return Err(Error::arg(format!("{perm:?} is not a permutation of 0..{}", self.dim)));
        }
        let mut flat = Vec::with_capacity(self.coords.len());
        for p in self.iter() {
            flat.extend(perm.iter().map(|&a| p[a]));
        }
        Self::from_flat(self.dim, flat)
    }

    /// Reflects axis `axis` through the origin.
    pub fn reflect(&self, axis: usize) -> Result<Config> {
        if axis >= self.dim {
            return Err(Error::arg(format!("axis {axis} out of range")));
        }
        let mut flat = self.coords.clone();
        for p in flat.chunks_exact_mut(self.dim) {
            p[axis] = p[axis].checked_neg().ok_or(Error::CoordinateOverflow)?;
        }
        Self::from_flat(self.dim, flat)
    }

    pub fn union(&self, other: &Config) -> Result<Config> {
        self.check_dim(other)?;
        let mut flat = self.coords.clone();
        flat.extend_from_slice(&other.coords);
        Self::from_flat(self.dim, flat)
    }

    pub fn difference(&self, other: &Config) -> Result<Config> {
        self.check_dim(other)?;
        let mut out = Vec::with_capacity(self.coords.len());
        for p in self.iter().filter(|p| !other.contains(p)) {
            out.extend_from_slice(p);
        }
        Ok(Self::from_sorted(self.dim, out))
    }

    pub fn intersection_count(&self, other: &Config) -> usize {
        if self.dim != other.dim {
            return 0;
        }
        self.iter().filter(|p| other.contains(p)).count()
    }

    pub fn is_subset(&self, other: &Config) -> bool {
        self.dim == other.dim && self.iter().all(|p| other.contains(p))
    }

    /// Keeps the points satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&[i32]) -> bool) -> Config {
        let mut out = Vec::new();
        for p in self.iter().filter(|p| keep(p)) {
            out.extend_from_slice(p);
        }
        Self::from_sorted(self.dim, out)
    }

    fn check_dim(&self, other: &Config) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// Whether the points form one nearest-neighbour component.
    pub fn is_connected(&self) -> bool {
        let n = self.len();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        let mut q = vec![0i32; self.dim];
        while let Some(i) = stack.pop() {
            q.copy_from_slice(self.row(i));
            for a in 0..self.dim {
                for delta in [-1, 1] {
                    let orig = q[a];
                    let Some(v) = orig.checked_add(delta) else { continue };
                    q[a] = v;
                    if let Some(j) = self.position(&q) {
                        if !seen[j] {
                            seen[j] = true;
                            reached += 1;
                            stack.push(j);
                        }
                    }
                    q[a] = orig;
                }
            }
        }
        reached == n
    }
}

impl LatticeShape for Config {
    fn dim(&self) -> usize {
        self.dim
    }

    fn cardinality(&self) -> u128 {
        self.len() as u128
    }

    fn edge_perimeter(&self) -> u128 {
        edge_perimeter(self)
    }
}

/// Number of unordered nearest-neighbour pairs.
pub fn bond_count(c: &Config) -> u64 {
    let d = c.dim;
    let mut bonds = 0u64;
    if let Some(g) = c.dense() {
        for p in c.iter() {
            let idx = g.index(p).expect("point inside its own envelope");
            for a in 0..d {
                let off = (p[a] as i64 - g.lo[a] as i64) as usize;
                if off + 1 < g.ext[a] && g.get(idx + g.strides[a]) {
                    bonds += 1;
                }
            }
        }
        return bonds;
    }
    let mut q = vec![0i32; d];
    for p in c.iter() {
        q.copy_from_slice(p);
        for a in 0..d {
            let Some(v) = p[a].checked_add(1) else { continue };
            q[a] = v;
            if c.position(&q).is_some() {
                bonds += 1;
            }
            q[a] = p[a];
        }
    }
    bonds
}

/// Number of lattice edges with exactly one endpoint in `c`.
pub fn edge_perimeter(c: &Config) -> u128 {
    2 * c.dim as u128 * c.len() as u128 - 2 * bond_count(c) as u128
}

/// The slice `{x in c : x[axis] = level}` with coordinate `axis` dropped.
pub fn section(c: &Config, axis: usize, level: i32) -> Result<Config> {
    if c.dim < 2 {
        return Err(Error::arg("sections need dimension at least 2"));
    }
    if axis >= c.dim {
        return Err(Error::arg(format!("axis {axis} out of range for dimension {}", c.dim)));
    }
    let mut out = Vec::new();
    for p in c.iter().filter(|p| p[axis] == level) {
        out.extend_from_slice(&p[..axis]);
        out.extend_from_slice(&p[axis + 1..]);
    }
    // Rows sharing the dropped coordinate keep their relative order.
    Ok(Config::from_sorted(c.dim - 1, out))
}

/// All nonempty sections along `axis`, keyed by level.
pub fn sections(c: &Config, axis: usize) -> Result<BTreeMap<i32, Config>> {
    if c.dim < 2 {
        return Err(Error::arg("sections need dimension at least 2"));
    }
    if axis >= c.dim {
        return Err(Error::arg(format!("axis {axis} out of range for dimension {}", c.dim)));
    }
    let mut groups: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    for p in c.iter() {
        let e = groups.entry(p[axis]).or_default();
        e.extend_from_slice(&p[..axis]);
        e.extend_from_slice(&p[axis + 1..]);
    }
    Ok(groups.into_iter().map(|(k, v)| (k, Config::from_sorted(c.dim - 1, v))).collect())
}

/// The box `origin + {1..a_1} x ... x {1..a_d}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cuboid {
    origin: Vec<i32>,
    extents: Vec<u64>,
}

impl Cuboid {
    pub fn new(origin: Vec<i32>, extents: Vec<u64>) -> Result<Self> {
        if extents.is_empty() {
            return Err(Error::arg("a box needs at least one axis"));
        }
        if origin.len() != extents.len() {
            return Err(Error::DimensionMismatch { expected: extents.len(), found: origin.len() });
        }
        if extents.iter().any(|&a| a == 0) {
            return Err(Error::arg(format!("box extents must be positive, got {extents:?}")));
        }
        for (o, a) in origin.iter().zip(&extents) {
            if *o as i128 + *a as i128 > i32::MAX as i128 {
                return Err(Error::CoordinateOverflow);
            }
        }
        Ok(Cuboid { origin, extents })
    }

    /// `{1..a_1} x ... x {1..a_d}`.
    pub fn at_origin(extents: Vec<u64>) -> Result<Self> {
        Self::new(vec![0; extents.len()], extents)
    }

    pub fn cube(side: u64, d: usize) -> Result<Self> {
        Self::at_origin(vec![side; d])
    }

    pub fn origin(&self) -> &[i32] {
        &self.origin
    }

    pub fn extents(&self) -> &[u64] {
        &self.extents
    }

    /// Smallest coordinate on `axis`.
    pub fn lo(&self, axis: usize) -> i64 {
        self.origin[axis] as i64 + 1
    }

    /// Largest coordinate on `axis`.
    pub fn hi(&self, axis: usize) -> i64 {
        self.origin[axis] as i64 + self.extents[axis] as i64
    }

    pub fn contains(&self, p: &[i32]) -> bool {
        p.len() == self.extents.len() && (0..p.len()).all(|a| (self.lo(a)..=self.hi(a)).contains(&(p[a] as i64)))
    }

    pub fn bond_count(&self) -> u128 {
        let d = self.extents.len();
        (0..d)
            .map(|i| {
                let others: u128 = (0..d).filter(|&j| j != i).map(|j| self.extents[j] as u128).product();
                (self.extents[i] as u128 - 1) * others
            })
            .sum()
    }

    pub fn translate(&self, shift: &[i64]) -> Result<Self> {
        if shift.len() != self.extents.len() {
            return Err(Error::DimensionMismatch { expected: self.extents.len(), found: shift.len() });
        }
        let origin = self
            .origin
            .iter()
            .zip(shift)
            .map(|(&o, &s)| i32::try_from(o as i64 + s).map_err(|_| Error::CoordinateOverflow))
            .collect::<Result<Vec<_>>>()?;
        Self::new(origin, self.extents.clone())
    }

    /// Enumerates the cells; refuses boxes above [`MATERIALIZE_LIMIT`].
    pub fn to_config(&self) -> Result<Config> {
        let n = self.cardinality();
        if n > MATERIALIZE_LIMIT {
            return Err(Error::BudgetExceeded(format!(
                "box with {n} cells exceeds the materialization limit of {MATERIALIZE_LIMIT}"
            )));
        }
        let d = self.extents.len();
        let mut out = Vec::with_capacity(n as usize * d);
        let mut cur: Vec<i32> = (0..d).map(|a| self.lo(a) as i32).collect();
        loop {
            out.extend_from_slice(&cur);
            let mut a = d;
            loop {
                if a == 0 {
                    return Ok(Config::from_sorted(d, out));
                }
                a -= 1;
                if (cur[a] as i64) < self.hi(a) {
                    cur[a] += 1;
                    break;
                }
                cur[a] = self.lo(a) as i32;
            }
        }
    }
}

impl LatticeShape for Cuboid {
    fn dim(&self) -> usize {
        self.extents.len()
    }

    fn cardinality(&self) -> u128 {
        self.extents.iter().map(|&a| a as u128).product()
    }

    fn edge_perimeter(&self) -> u128 {
        let d = self.extents.len();
        2 * (0..d)
            .map(|i| (0..d).filter(|&j| j != i).map(|j| self.extents[j] as u128).product::<u128>())
            .sum::<u128>()
    }
}

/// The per-axis envelope of `c`.
pub fn minimal_rectangle(c: &Config) -> Result<Cuboid> {
    let (lo, hi) = c.bounds().ok_or(Error::EmptyConfiguration)?;
    let origin = lo.iter().map(|&v| v.checked_sub(1).ok_or(Error::CoordinateOverflow)).collect::<Result<Vec<_>>>()?;
    let extents = lo.iter().zip(&hi).map(|(&l, &h)| (h as i64 - l as i64 + 1) as u64).collect();
    Cuboid::new(origin, extents)
}

/// Side length `floor(n^(1/d))` of the cubic Wulff shape.
pub fn wulff_side(n: u128, d: usize) -> u128 {
    iroot_floor(n, d as u32)
}

pub fn wulff_box(n: u128, d: usize) -> Result<Cuboid> {
    if n == 0 || d == 0 {
        return Err(Error::arg("Wulff shape needs n >= 1 and d >= 1"));
    }
    Cuboid::cube(wulff_side(n, d) as u64, d)
}

/// The cube `{1..floor(n^(1/d))}^d`.
pub fn wulff(n: u128, d: usize) -> Result<Config> {
    wulff_box(n, d)?.to_config()
}

/// Minimum over translations `a` of `#((C - a) symdiff D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymDiff {
    pub count: u128,
    pub shift: Vec<i32>,
}

fn shift_point(v: &[i64]) -> Result<Vec<i32>> {
    v.iter().map(|&x| i32::try_from(x).map_err(|_| Error::CoordinateOverflow)).collect()
}

/// Exact minimum symmetric difference over all integer translations.
///
/// Counts the overlap for every difference vector `x - y` with `x` in `c` and
/// `y` in `d`; ties go to the lexicographically smallest shift.
pub fn min_translate_symdiff(c: &Config, d: &Config) -> Result<SymDiff> {
    if c.dim != d.dim {
        return Err(Error::DimensionMismatch { expected: c.dim, found: d.dim });
    }
    let ((clo, chi), (dlo, dhi)) = match (c.bounds(), d.bounds()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptyConfiguration),
    };
    let dim = c.dim;
    let lo: Vec<i64> = (0..dim).map(|a| clo[a] as i64 - dhi[a] as i64).collect();
    let ext: Vec<u128> = (0..dim).map(|a| (chi[a] as i64 - dlo[a] as i64 - lo[a] + 1) as u128).collect();
    let cells = ext.iter().try_fold(1u128, |acc, &e| acc.checked_mul(e)).unwrap_or(u128::MAX);
    let total = (c.len() + d.len()) as u128;

    let (best, shift) = if cells <= DENSE_CELL_LIMIT {
        let cells = cells as usize;
        let mut strides = vec![1usize; dim];
        for a in (0..dim - 1).rev() {
            strides[a] = strides[a + 1] * ext[a + 1] as usize;
        }
        let index = |x: &[i32], y: &[i32]| -> usize {
            (0..dim).map(|a| (x[a] as i64 - y[a] as i64 - lo[a]) as usize * strides[a]).sum()
        };
        let counts = if cells <= 1 << 20 && c.len() * d.len() >= 1 << 16 {
            let rows: Vec<&[i32]> = c.iter().collect();
            rows.par_chunks(64)
                .map(|chunk| {
                    let mut local = vec![0u32; cells];
                    for x in chunk {
                        for y in d.iter() {
                            local[index(x, y)] += 1;
                        }
                    }
                    local
                })
                .reduce(
                    || vec![0u32; cells],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(u, v)| *u += v);
                        a
                    },
                )
        } else {
            let mut counts = vec![0u32; cells];
            for x in c.iter() {
                for y in d.iter() {
                    counts[index(x, y)] += 1;
                }
            }
            counts
        };
        // Index order is lexicographic order of the shift.
        let (mut best, mut best_idx) = (0u32, 0usize);
        for (i, &v) in counts.iter().enumerate() {
            if v > best {
                best = v;
                best_idx = i;
            }
        }
        let shift: Vec<i64> = (0..dim).map(|a| lo[a] + ((best_idx / strides[a]) % ext[a] as usize) as i64).collect();
        (best as u128, shift)
    } else {
        let mut counts: HashMap<Vec<i64>, u32> = HashMap::new();
        for x in c.iter() {
            for y in d.iter() {
                let key: Vec<i64> = (0..dim).map(|a| x[a] as i64 - y[a] as i64).collect();
                *counts.entry(key).or_default() += 1;
            }
        }
        let (key, v) = counts
            .into_iter()
            .max_by(|(ka, va), (kb, vb)| va.cmp(vb).then_with(|| kb.cmp(ka)))
            .expect("both sets are nonempty");
        (v as u128, key)
    };
    Ok(SymDiff { count: total - 2 * best, shift: shift_point(&shift)? })
}

/// Same as [`min_translate_symdiff`] for disjoint unions of boxes, without
/// enumerating points.
///
/// Along each axis the overlap of two translated intervals is piecewise linear
/// in the shift, so the total overlap is multilinear on every cell of the grid
/// of breakpoints and its lexicographically least maximizer is a grid vertex.
pub fn min_translate_symdiff_boxes(c: &[Cuboid], d: &[Cuboid]) -> Result<SymDiff> {
    if c.is_empty() || d.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    let dim = c[0].dim();
    for b in c.iter().chain(d) {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: b.dim() });
        }
    }
    for list in [c, d] {
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                if (0..dim).all(|k| a.lo(k) <= b.hi(k) && b.lo(k) <= a.hi(k)) {
                    return Err(Error::arg("boxes in a union must be disjoint"));
                }
            }
        }
    }
    let mut cands: Vec<Vec<i64>> = vec![Vec::new(); dim];
    for a in c {
        for b in d {
            for (k, cand) in cands.iter_mut().enumerate() {
                cand.extend([
                    a.lo(k) - b.hi(k) - 1,
                    a.lo(k) - b.lo(k),
                    a.hi(k) - b.hi(k),
                    a.hi(k) - b.lo(k) + 1,
                ]);
            }
        }
    }
    for cand in &mut cands {
        cand.sort_unstable();
        cand.dedup();
    }
    let overlap = |s: &[i64]| -> u128 {
        let mut sum = 0u128;
        for a in c {
            for b in d {
                let mut prod = 1u128;
                for k in 0..dim {
                    let len = (a.hi(k) - s[k]).min(b.hi(k)) - (a.lo(k) - s[k]).max(b.lo(k)) + 1;
                    if len <= 0 {
                        prod = 0;
                        break;
                    }
                    prod *= len as u128;
                }
                sum += prod;
            }
        }
        sum
    };
    let mut idx = vec![0usize; dim];
    let mut s: Vec<i64> = cands.iter().map(|v| v[0]).collect();
    let (mut best, mut best_s) = (0u128, s.clone());
    loop {
        let v = overlap(&s);
        if v > best {
            best = v;
            best_s.clone_from(&s);
        }
        let mut k = dim;
        loop {
            if k == 0 {
                let total: u128 = c.iter().chain(d).map(|b| b.cardinality()).sum();
                return Ok(SymDiff { count: total - 2 * best, shift: shift_point(&best_s)? });
            }
            k -= 1;
            if idx[k] + 1 < cands[k].len() {
                idx[k] += 1;
                s[k] = cands[k][idx[k]];
                break;
            }
            idx[k] = 0;
            s[k] = cands[k][0];
        }
    }
}
