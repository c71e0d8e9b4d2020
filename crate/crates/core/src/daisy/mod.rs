//! Daisies: the canonical initial segments of the lattice order, described
//! as a chain of perfect boxes of decreasing dimension.
//!
//! Layer `t` (0-based) has dimension `d - t`. After each layer the column at
//! its value-change position is frozen one past that layer's extent; the next
//! layer spans the remaining columns.

mod matrix;
mod tuple;

use serde::{Deserialize, Serialize};

pub use matrix::{phi, psi, Cell, DaisyMatrix};
pub use tuple::{is_do1, Do1Tuple};

use crate::error::{Error, MatrixRule, Result};
use crate::lattice::{Config, Cuboid, LatticeShape, MATERIALIZE_LIMIT};

/// The affine subspace a layer lives in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerFrame {
    /// Spanning columns in increasing order.
    pub free: Vec<usize>,
    /// Frozen columns and their values, in increasing column order.
    pub fixed: Vec<(usize, i32)>,
}

/// The coefficient chain of a daisy.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DaisySpec {
    dim: usize,
    layers: Vec<Do1Tuple>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    dim: usize,
    layers: Vec<Do1Tuple>,
}

impl TryFrom<RawSpec> for DaisySpec {
    type Error = Error;

    fn try_from(r: RawSpec) -> Result<Self> {
        DaisySpec::new(r.dim, r.layers)
    }
}

impl From<DaisySpec> for RawSpec {
    fn from(s: DaisySpec) -> Self {
        RawSpec { dim: s.dim, layers: s.layers }
    }
}

impl DaisySpec {
    /// Checks lengths `d, d-1, ...` and the larger relation between neighbours.
    pub fn new(dim: usize, layers: Vec<Do1Tuple>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("daisies need dimension at least 1"));
        }
        if layers.is_empty() {
            return Err(Error::InvalidMatrix { rule: MatrixRule::Shape, row: 1, detail: "no layers".into() });
        }
        if layers.len() > dim {
            return Err(Error::InvalidMatrix {
                rule: MatrixRule::Shape,
                row: dim + 1,
                detail: format!("{} layers exceed dimension {dim}", layers.len()),
            });
        }
        for (t, layer) in layers.iter().enumerate() {
            if layer.len() != dim - t {
                return Err(Error::InvalidMatrix {
                    rule: MatrixRule::Shape,
                    row: t + 1,
                    detail: format!("layer {layer} should have length {}", dim - t),
                });
            }
            if t > 0 && !layers[t - 1].is_larger_than(layer) {
                return Err(Error::InvalidMatrix {
                    rule: MatrixRule::Larger,
                    row: t + 1,
                    detail: format!("{layer} is not dominated by {} off its value-change position", layers[t - 1]),
                });
            }
        }
        Ok(DaisySpec { dim, layers })
    }

    /// A single perfect box.
    pub fn perfect(top: Do1Tuple) -> Self {
        DaisySpec { dim: top.len(), layers: vec![top] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layers(&self) -> &[Do1Tuple] {
        &self.layers
    }

    pub fn top(&self) -> &Do1Tuple {
        &self.layers[0]
    }

    pub fn is_perfect(&self) -> bool {
        self.layers.len() == 1
    }

    /// The layer spanning `m` columns, if present.
    pub fn layer_of_dim(&self, m: usize) -> Option<&Do1Tuple> {
        if m == 0 || m > self.dim {
            return None;
        }
        self.layers.get(self.dim - m)
    }

    /// Dimension of the last layer.
    pub fn lowest_dim(&self) -> usize {
        self.dim + 1 - self.layers.len()
    }

    /// The residual daisy of one dimension less (layers after the first).
    pub fn residual(&self) -> Option<DaisySpec> {
        (self.layers.len() > 1).then(|| DaisySpec { dim: self.dim - 1, layers: self.layers[1..].to_vec() })
    }

    /// Layers with dimension at most `m`, as an `m`-dimensional daisy.
    pub fn lower_part(&self, m: usize) -> Option<DaisySpec> {
        if m == 0 || m > self.dim {
            return None;
        }
        let start = self.dim - m;
        (start < self.layers.len()).then(|| DaisySpec { dim: m, layers: self.layers[start..].to_vec() })
    }

    /// Ambient columns frozen after each layer, i.e. the value-change
    /// positions mapped through the free columns (0-based).
    pub fn value_change_columns(&self) -> Vec<usize> {
        let mut free: Vec<usize> = (0..self.dim).collect();
        let mut out = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let col = free.remove(layer.value_change_position());
            out.push(col);
        }
        out
    }

    /// Frames of layers `0..=layers.len()`; the last one is where a further
    /// layer would go (it may have no free columns).
    pub fn frames(&self) -> Vec<LayerFrame> {
        let mut free: Vec<usize> = (0..self.dim).collect();
        let mut fixed: Vec<(usize, i32)> = Vec::new();
        let mut out = Vec::with_capacity(self.layers.len() + 1);
        for layer in &self.layers {
            out.push(LayerFrame { free: free.clone(), fixed: fixed.clone() });
            let pos = layer.value_change_position();
            let col = free.remove(pos);
            fixed.push((col, layer.values()[pos] as i32 + 1));
            fixed.sort_unstable();
        }
        out.push(LayerFrame { free, fixed });
        out
    }

    /// The box occupied by layer `t`.
    pub fn layer_box(&self, t: usize) -> Cuboid {
        let frame = &self.frames()[t];
        Self::box_in_frame(self.dim, frame, self.layers[t].values())
    }

    pub(crate) fn box_in_frame(dim: usize, frame: &LayerFrame, extents: &[u64]) -> Cuboid {
        let mut origin = vec![0i32; dim];
        let mut ext = vec![1u64; dim];
        for (&c, &e) in frame.free.iter().zip(extents) {
            ext[c] = e;
        }
        for &(c, v) in &frame.fixed {
            origin[c] = v - 1;
        }
        Cuboid::new(origin, ext).expect("daisy layers have positive extents")
    }

    pub fn layer_boxes(&self) -> Vec<Cuboid> {
        let frames = self.frames();
        self.layers.iter().enumerate().map(|(t, l)| Self::box_in_frame(self.dim, &frames[t], l.values())).collect()
    }

    pub fn cardinality(&self) -> u128 {
        self.layers.iter().map(Do1Tuple::product).sum()
    }

    /// The largest point of the daisy in the lattice order.
    pub fn max_point(&self) -> Vec<u64> {
        let b = self.layer_boxes().pop().expect("at least one layer");
        (0..self.dim).map(|a| b.hi(a) as u64).collect()
    }

    pub fn to_matrix(&self) -> DaisyMatrix {
        DaisyMatrix::from_spec(self)
    }

    pub fn from_matrix(m: &DaisyMatrix) -> Result<Self> {
        m.to_spec()
    }

    /// The explicit point set.
    pub fn materialize(&self) -> Result<Config> {
        let n = self.cardinality();
        if n > MATERIALIZE_LIMIT {
            return Err(Error::BudgetExceeded(format!(
                "daisy with {n} points exceeds the materialization limit of {MATERIALIZE_LIMIT}"
            )));
        }
        let mut flat = Vec::with_capacity(n as usize * self.dim);
        for b in self.layer_boxes() {
            flat.extend(b.to_config()?.iter().flatten());
        }
        Config::from_flat(self.dim, flat)
    }

    /// Bond count from the coefficients alone.
    pub fn bond_count(&self) -> u128 {
        // Each point of the residual daisy bonds exactly once to the top box.
        let mut bonds = 0u128;
        for (t, layer) in self.layers.iter().enumerate() {
            bonds += perfect_bonds(layer.values());
            let rest: u128 = self.layers[t + 1..].iter().map(Do1Tuple::product).sum();
            bonds += rest;
        }
        bonds
    }
}

impl LatticeShape for DaisySpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn cardinality(&self) -> u128 {
        DaisySpec::cardinality(self)
    }

    fn edge_perimeter(&self) -> u128 {
        daisy_perimeter(self)
    }
}

fn perfect_bonds(p: &[u64]) -> u128 {
    (0..p.len())
        .map(|i| (p[i] as u128 - 1) * (0..p.len()).filter(|&j| j != i).map(|j| p[j] as u128).product::<u128>())
        .sum()
}

/// The unique daisy with `n` points, built greedily layer by layer.
pub fn daisy_of_cardinality(n: u128, d: usize) -> Result<DaisySpec> {
    if n == 0 || d == 0 {
        return Err(Error::arg("daisies need n >= 1 and d >= 1"));
    }
    let mut rem = n;
    let mut layers = Vec::new();
    for len in (1..=d).rev() {
        let Some(layer) = Do1Tuple::largest_with_product_at_most(len, rem) else { break };
        rem -= layer.product();
        layers.push(layer);
    }
    if rem != 0 {
        return Err(Error::invariant(format!("greedy daisy for n = {n}, d = {d} left {rem} points")));
    }
    DaisySpec::new(d, layers).map_err(|e| Error::invariant(format!("greedy daisy is malformed: {e}")))
}

/// Edge perimeter `2d n - 2 b` without materializing points.
pub fn daisy_perimeter(spec: &DaisySpec) -> u128 {
    2 * spec.dim as u128 * spec.cardinality() - 2 * spec.bond_count()
}

/// Minimal edge perimeter of an `n`-point subset of `Z^d`.
pub fn eip_value(n: u128, d: usize) -> Result<u128> {
    if n == 0 {
        return Ok(0);
    }
    Ok(daisy_perimeter(&daisy_of_cardinality(n, d)?))
}

/// Whether the shape attains the minimal perimeter for its size.
pub fn is_minimizer<S: LatticeShape + ?Sized>(shape: &S) -> Result<bool> {
    Ok(shape.edge_perimeter() == eip_value(shape.cardinality(), shape.dim())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{edge_perimeter, Cuboid};

    fn tup(v: &[u64]) -> Do1Tuple {
        Do1Tuple::new(v.to_vec()).unwrap()
    }

    fn spec(d: usize, layers: &[&[u64]]) -> DaisySpec {
        DaisySpec::new(d, layers.iter().map(|l| tup(l)).collect()).unwrap()
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(daisy_of_cardinality(4, 2).unwrap(), spec(2, &[&[2, 2]]));
        assert_eq!(daisy_of_cardinality(8, 2).unwrap(), spec(2, &[&[3, 2], &[2]]));
        let big = daisy_of_cardinality(1731, 5).unwrap();
        assert_eq!(big, spec(5, &[&[5, 5, 4, 4, 4], &[4, 3, 3, 3], &[3, 3, 2], &[2, 2], &[1]]));
        assert_eq!(big.layers().iter().map(Do1Tuple::product).collect::<Vec<_>>(), vec![1600, 108, 18, 4, 1]);
    }

    #[test]
    fn placement_of_the_five_dimensional_example() {
        let s = spec(5, &[&[5, 5, 4, 4, 4], &[4, 3, 3, 3], &[3, 3, 2], &[2, 2], &[1]]);
        assert_eq!(s.value_change_columns(), vec![2, 1, 4, 0, 3]);
        let boxes = s.layer_boxes();
        assert_eq!(boxes[1].origin(), &[0, 0, 4, 0, 0]);
        assert_eq!(boxes[1].extents(), &[4, 3, 1, 3, 3]);
        assert_eq!(boxes[4].origin(), &[2, 3, 4, 0, 2]);
        assert_eq!(s.max_point(), vec![3, 4, 5, 1, 3]);
    }

    #[test]
    fn materialize_examples() {
        let sq = spec(2, &[&[2, 2]]).materialize().unwrap();
        assert_eq!(sq, Cuboid::at_origin(vec![2, 2]).unwrap().to_config().unwrap());
        let d322 = spec(2, &[&[3, 2], &[2]]).materialize().unwrap();
        let expect = Config::new(2, [[1, 1], [2, 1], [3, 1], [1, 2], [2, 2], [3, 2], [1, 3], [2, 3]]).unwrap();
        assert_eq!(d322, expect);
        let small = spec(2, &[&[2, 1], &[1]]).materialize().unwrap();
        assert_eq!(small, Config::new(2, [[1, 1], [2, 1], [1, 2]]).unwrap());
    }

    #[test]
    fn perimeter_examples() {
        assert_eq!(daisy_perimeter(&spec(2, &[&[2, 2]])), 8);
        assert_eq!(daisy_perimeter(&spec(2, &[&[3, 2], &[2]])), 12);
        for d in 1..=5usize {
            for l in 1..=6u64 {
                let cube = DaisySpec::perfect(Do1Tuple::new(vec![l; d]).unwrap());
                assert_eq!(daisy_perimeter(&cube), 2 * d as u128 * (l as u128).pow(d as u32 - 1));
            }
        }
    }

    #[test]
    fn eip_examples() {
        assert_eq!(eip_value(0, 3).unwrap(), 0);
        assert_eq!(eip_value(1, 2).unwrap(), 4);
        assert_eq!(eip_value(8, 2).unwrap(), 12);
        assert_eq!(eip_value(9, 2).unwrap(), 12);
        assert_eq!(eip_value(27, 2).unwrap(), 22);
    }

    #[test]
    fn minimizer_checks() {
        let sq = Cuboid::at_origin(vec![2, 2]).unwrap().to_config().unwrap();
        assert!(is_minimizer(&sq).unwrap());
        let line = Cuboid::at_origin(vec![1, 4]).unwrap();
        assert_eq!(line.edge_perimeter(), 10);
        assert!(!is_minimizer(&line).unwrap());
        assert!(is_minimizer(&Cuboid::at_origin(vec![2, 4]).unwrap()).unwrap());
        assert!(is_minimizer(&Config::empty(3).unwrap()).unwrap());
    }

    #[test]
    fn closed_form_matches_points_for_small_daisies() {
        for d in 1..=4 {
            for n in 1..=200u128 {
                let s = daisy_of_cardinality(n, d).unwrap();
                let c = s.materialize().unwrap();
                assert_eq!(c.len() as u128, n);
                assert_eq!(daisy_perimeter(&s), edge_perimeter(&c), "n {n} d {d}");
            }
        }
    }

    #[test]
    fn spec_validation_names_the_rule() {
        let e = DaisySpec::new(2, vec![tup(&[3, 3]), tup(&[3])]).unwrap_err();
        assert!(matches!(e, Error::InvalidMatrix { rule: MatrixRule::Larger, row: 2, .. }));
        let e = DaisySpec::new(2, vec![tup(&[3, 3]), tup(&[2, 2])]).unwrap_err();
        assert!(matches!(e, Error::InvalidMatrix { rule: MatrixRule::Shape, .. }));
    }

    #[test]
    fn lower_parts() {
        let s = spec(5, &[&[5, 5, 4, 4, 4], &[4, 3, 3, 3], &[3, 3, 2], &[2, 2], &[1]]);
        assert_eq!(s.layer_of_dim(3), Some(&tup(&[3, 3, 2])));
        assert_eq!(s.lower_part(2).unwrap(), spec(2, &[&[2, 2], &[1]]));
        assert_eq!(s.lowest_dim(), 1);
        let p = spec(3, &[&[2, 2, 2]]);
        assert_eq!(p.lower_part(2), None);
        assert_eq!(p.layer_of_dim(2), None);
    }
}
