//! Defects of daisies and their filling, plus the normal form of minimizers.
//!
//! A defect is the set of cells at lattice distance one from a down-closed
//! host inside a larger reference box, on the first empty level along one
//! axis. For a daisy the host is either the whole daisy (reference: a perfect
//! box) or the union of its layers of dimension below `m` (reference: the
//! layer of dimension `m` with its value-change entry removed).

mod normalize;

use serde::{Deserialize, Serialize};

pub use normalize::{
    height_bound_holds, normalize_minimizer, normalize_with_trace, Move, MoveKind, NormalForm, Normalization,
};

use crate::daisy::{DaisySpec, Do1Tuple, LayerFrame};
use crate::error::{Error, Result};
use crate::lattice::{Config, Cuboid};

/// What a daisy's defect is measured against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefectReference {
    /// A perfect box of the daisy's own dimension.
    Perfect(Do1Tuple),
    /// The layer of dimension `m`, hosting the layers of dimension `< m`.
    Layer(usize),
}

/// Cells adjacent to a host on its first empty level along `host_axis`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defect {
    pub host_axis: usize,
    pub host_level: i32,
    /// The cells, in ambient coordinates.
    pub cells: Config,
    /// The affine subspace spanned by the host.
    pub frame: LayerFrame,
    /// `Some(m)` when measured against the layer of dimension `m`.
    pub layer: Option<usize>,
}

impl Defect {
    /// Axes along which the cells spread.
    pub fn free_axes(&self) -> Vec<usize> {
        self.frame.free.iter().copied().filter(|&a| a != self.host_axis).collect()
    }

    /// Dimension of the defect.
    pub fn dim(&self) -> usize {
        self.frame.free.len() - 1
    }

    /// The cells with the host axis dropped.
    pub fn projected_cells(&self) -> Result<Config> {
        crate::lattice::section(&self.cells, self.host_axis, self.host_level)
    }

    /// Embeds the defect one dimension up, with the new last coordinate `value`.
    pub fn lift(&self, value: i32) -> Result<Defect> {
        let d = self.cells.dim();
        let mut flat = Vec::with_capacity(self.cells.len() * (d + 1));
        for p in self.cells.iter() {
            flat.extend_from_slice(p);
            flat.push(value);
        }
        let mut fixed = self.frame.fixed.clone();
        fixed.push((d, value));
        Ok(Defect {
            host_axis: self.host_axis,
            host_level: self.host_level,
            cells: Config::from_flat(d + 1, flat)?,
            frame: LayerFrame { free: self.frame.free.clone(), fixed },
            layer: self.layer,
        })
    }
}

struct Host {
    points: Config,
    frame: LayerFrame,
    reference: Vec<u64>,
    layer: Option<usize>,
}

fn host_of(spec: &DaisySpec, reference: &DefectReference) -> Result<Option<Host>> {
    match reference {
        DefectReference::Perfect(r) => {
            if r.len() != spec.dim() {
                return Err(Error::DimensionMismatch { expected: spec.dim(), found: r.len() });
            }
            Ok(Some(Host {
                points: spec.materialize()?,
                frame: LayerFrame { free: (0..spec.dim()).collect(), fixed: Vec::new() },
                reference: r.values().to_vec(),
                layer: None,
            }))
        }
        &DefectReference::Layer(m) => {
            if m < 2 || m > spec.dim() {
                return Err(Error::arg(format!("layer reference {m} outside 2..={}", spec.dim())));
            }
            let top = spec
                .layer_of_dim(m)
                .ok_or_else(|| Error::arg(format!("daisy has no layer of dimension {m}")))?;
            let t = spec.dim() - m;
            if t + 1 >= spec.layers().len() {
                return Ok(None);
            }
            let frames = spec.frames();
            let boxes = spec.layer_boxes();
            let mut flat = Vec::new();
            for b in &boxes[t + 1..] {
                flat.extend(b.to_config()?.iter().flatten());
            }
            Ok(Some(Host {
                points: Config::from_flat(spec.dim(), flat)?,
                frame: frames[t + 1].clone(),
                reference: top.without(top.value_change_position()),
                layer: Some(m),
            }))
        }
    }
}

/// Every defect of the daisy with respect to `reference`, by increasing axis.
pub fn find_defects(spec: &DaisySpec, reference: &DefectReference) -> Result<Vec<Defect>> {
    let Some(host) = host_of(spec, reference)? else { return Ok(Vec::new()) };
    let (_, hi) = host.points.bounds().ok_or(Error::EmptyConfiguration)?;
    let mut out = Vec::new();
    for (&axis, &r) in host.frame.free.iter().zip(&host.reference) {
        let e = hi[axis];
        if e as i64 > r as i64 {
            return Err(match host.layer {
                None => Error::arg(format!("reference {:?} is strictly smaller than the daisy", host.reference)),
                Some(m) => Error::invariant(format!("layers below dimension {m} overflow their reference")),
            });
        }
        if (e as i64) < r as i64 {
            let mut flat = Vec::new();
            for p in host.points.iter().filter(|p| p[axis] == e) {
                let start = flat.len();
                flat.extend_from_slice(p);
                flat[start + axis] += 1;
            }
            out.push(Defect {
                host_axis: axis,
                host_level: e + 1,
                cells: Config::from_flat(spec.dim(), flat)?,
                frame: host.frame.clone(),
                layer: host.layer,
            });
        }
    }
    Ok(out)
}

/// The first defect (smallest axis), if any.
pub fn find_defect(spec: &DaisySpec, reference: &DefectReference) -> Result<Option<Defect>> {
    Ok(find_defects(spec, reference)?.into_iter().next())
}

/// A donor in its own coordinates: spanning axes and points with minimum 1.
pub(crate) struct Canon {
    pub axes: Vec<usize>,
    pub pts: Vec<Vec<i32>>,
}

pub(crate) fn canonicalize(donor: &Config) -> Result<Canon> {
    let (lo, hi) = donor.bounds().ok_or(Error::EmptyConfiguration)?;
    let axes: Vec<usize> = (0..donor.dim()).filter(|&a| lo[a] != hi[a]).collect();
    let pts = donor.iter().map(|p| axes.iter().map(|&a| p[a] - lo[a] + 1).collect()).collect();
    Ok(Canon { axes, pts })
}

/// Injections of `k` donor axes into `targets`; order-preserving ones first.
pub(crate) fn injections(k: usize, targets: &[usize]) -> Vec<Vec<usize>> {
    fn rec(k: usize, targets: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for &t in targets {
            if !cur.contains(&t) {
                cur.push(t);
                rec(k, targets, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if k <= targets.len() {
        rec(k, targets, &mut Vec::new(), &mut out);
    }
    out.sort_by_key(|inj| !inj.windows(2).all(|w| w[0] < w[1]));
    out
}

/// The donor placed so that its minimum corner lands on `anchor`.
pub(crate) fn place(canon: &Canon, injection: &[usize], anchor: &[i32]) -> Vec<Vec<i32>> {
    canon
        .pts
        .iter()
        .map(|p| {
            let mut q = anchor.to_vec();
            for (&a, &v) in injection.iter().zip(p) {
                q[a] += v - 1;
            }
            q
        })
        .collect()
}

/// Locates a copy of the smallest face of the host's top layer (the layer
/// with its largest side frozen) inside the defect, every point of which is
/// adjacent to that layer.
pub fn defect_contains_face(spec: &DaisySpec, defect: &Defect) -> Result<Option<Config>> {
    let (top, frame) = match defect.layer {
        None => (spec.top().clone(), spec.frames()[0].clone()),
        Some(m) => {
            let t = spec.dim() + 1 - m;
            let layer = spec.layers().get(t).ok_or_else(|| Error::arg("defect does not belong to this daisy"))?;
            (layer.clone(), spec.frames()[t].clone())
        }
    };
    let layer_box = DaisySpec::box_in_frame(spec.dim(), &frame, top.values());
    let face: Vec<u64> = top.values()[1..].to_vec();
    let free = defect.free_axes();
    let face_pts = face_points(&face);
    let canon = Canon { axes: Vec::new(), pts: face_pts };
    for inj in injections(face.len(), &free) {
        for anchor in defect.cells.iter() {
            let placed = place(&canon, &inj, anchor);
            if placed.iter().all(|q| defect.cells.contains(q) && adjacent_to_box(q, &layer_box)) {
                return Ok(Some(Config::new(spec.dim(), &placed)?));
            }
        }
    }
    Ok(None)
}

/// Points of `{1..e_1} x ... x {1..e_k}` in lexicographic order.
pub(crate) fn face_points(ext: &[u64]) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for &e in ext {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i32>| {
                (1..=e as i32).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn adjacent_to_box(q: &[i32], b: &Cuboid) -> bool {
    let mut r = q.to_vec();
    (0..q.len()).any(|a| {
        [-1, 1].into_iter().any(|delta| {
            r[a] = q[a] + delta;
            let hit = b.contains(&r);
            r[a] = q[a];
            hit
        })
    })
}

/// Adds a rigid copy of `donor` to `c` inside the defect cells. Each added
/// point must have exactly one bond with the points of `c` in the host frame.
pub fn fill_defect(c: &Config, defect: &Defect, donor: &Config) -> Result<Config> {
    fill_defect_with(c, defect, donor, |_| true)
}

/// As [`fill_defect`], taking the first placement that `accept` approves.
pub fn fill_defect_with(
    c: &Config,
    defect: &Defect,
    donor: &Config,
    mut accept: impl FnMut(&Config) -> bool,
) -> Result<Config> {
    if donor.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: donor.dim() });
    }
    if defect.cells.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: defect.cells.dim() });
    }
    let canon = canonicalize(donor)?;
    if donor.len() > defect.cells.len() {
        return Err(Error::DonorDoesNotFit);
    }
    let in_frame = |p: &[i32]| defect.frame.fixed.iter().all(|&(a, v)| p[a] == v);
    let host = c.filter(in_frame);
    for inj in injections(canon.axes.len(), &defect.free_axes()) {
        for anchor in defect.cells.iter() {
            let placed = place(&canon, &inj, anchor);
            if !placed.iter().all(|q| defect.cells.contains(q) && !c.contains(q)) {
                continue;
            }
            if !placed.iter().all(|q| neighbours_in(q, &host) == 1) {
                continue;
            }
            let out = c.union(&Config::new(c.dim(), &placed)?)?;
            if accept(&out) {
                return Ok(out);
            }
        }
    }
    Err(Error::DonorDoesNotFit)
}

pub(crate) fn neighbours_in(q: &[i32], c: &Config) -> usize {
    let mut r = q.to_vec();
    let mut n = 0;
    for a in 0..q.len() {
        for delta in [-1, 1] {
            r[a] = q[a] + delta;
            if c.contains(&r) {
                n += 1;
            }
        }
        r[a] = q[a];
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::daisy::daisy_of_cardinality;

    fn tup(v: &[u64]) -> Do1Tuple {
        Do1Tuple::new(v.to_vec()).unwrap()
    }

    fn cells(d: &[Defect]) -> Vec<Vec<i32>> {
        let mut all: Vec<Vec<i32>> = d.iter().flat_map(|x| x.cells.to_points()).collect();
        all.sort();
        all
    }

    #[test]
    fn no_defect_against_itself() {
        let sq = DaisySpec::perfect(tup(&[2, 2]));
        assert!(find_defect(&sq, &DefectReference::Perfect(tup(&[2, 2]))).unwrap().is_none());
    }

    #[test]
    fn single_point_in_a_square() {
        let pt = DaisySpec::perfect(tup(&[1, 1]));
        let d = find_defects(&pt, &DefectReference::Perfect(tup(&[2, 2]))).unwrap();
        assert_eq!(cells(&d), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(d[0].cells.to_points(), vec![vec![2, 1]]);
        assert_eq!(d[0].dim(), 1);
    }

    #[test]
    fn two_dimensional_daisy_with_a_row_on_top() {
        let s = daisy_of_cardinality(8, 2).unwrap();
        // The bounding box already is (3,3): nothing against the perfect box.
        assert!(find_defects(&s, &DefectReference::Perfect(tup(&[3, 3]))).unwrap().is_empty());
        let d = find_defects(&s, &DefectReference::Layer(2)).unwrap();
        assert_eq!(cells(&d), vec![vec![3, 3]]);
        let face = defect_contains_face(&s, &d[0]).unwrap().unwrap();
        assert_eq!(face.to_points(), vec![vec![3, 3]]);
        assert!(find_defects(&s, &DefectReference::Perfect(tup(&[2, 2]))).is_err());
    }

    #[test]
    fn face_of_a_lone_layer() {
        // The second layer sits at x_2 = 3 and leaves room along x_1.
        let s = DaisySpec::new(3, vec![tup(&[3, 2, 2]), tup(&[2, 2])]).unwrap();
        let d = find_defects(&s, &DefectReference::Layer(3)).unwrap();
        assert_eq!(d.len(), 1);
        let face = defect_contains_face(&s, &d[0]).unwrap().unwrap();
        assert_eq!(face.len(), 2);
    }

    #[test]
    fn filling() {
        let pt = Config::new(2, [[1, 1]]).unwrap();
        let spec = DaisySpec::perfect(tup(&[1, 1]));
        let d = find_defect(&spec, &DefectReference::Perfect(tup(&[2, 2]))).unwrap().unwrap();
        let donor = Config::new(2, [[2, 1]]).unwrap();
        assert_eq!(fill_defect(&pt, &d, &donor).unwrap(), Config::new(2, [[1, 1], [2, 1]]).unwrap());
        let big = Config::new(2, [[5, 5], [6, 5]]).unwrap();
        assert_eq!(fill_defect(&pt, &d, &big), Err(Error::DonorDoesNotFit));
    }

    #[test]
    fn injection_order() {
        let inj = injections(2, &[0, 2, 3]);
        assert_eq!(inj[..3], [vec![0, 2], vec![0, 3], vec![2, 3]]);
        assert_eq!(inj.len(), 6);
        assert_eq!(injections(0, &[1]), vec![Vec::<usize>::new()]);
        assert!(injections(2, &[1]).is_empty());
    }
}
