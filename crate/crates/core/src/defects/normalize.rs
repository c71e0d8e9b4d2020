use serde::Serialize;

use super::{fill_defect_with, find_defects, injections, place, Canon, Defect, DefectReference};
use crate::arith::at_most_scaled_root;
use crate::daisy::{daisy_of_cardinality, is_minimizer, DaisySpec, Do1Tuple};
use crate::error::{Error, Result};
use crate::lattice::{bond_count, minimal_rectangle, sections, Config, Cuboid};
use crate::rearrange::decreasing_rearrangement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    /// Decreasing rearrangement along the last axis.
    Rearrange,
    /// Lower layers of a level swapped with those of the top level.
    LayerExchange,
    /// The largest point of the top level moved into a point defect.
    CornerPoint,
    /// Lower layers of the top level moved into a defect.
    LowerLayers,
    /// The smallest face of a top-level layer moved into a defect.
    SmallestFace,
    /// A face of the top level moved into a defect of the lowest layer.
    FaceFill,
    /// Lower layers of a level exchanged with a face of the top level.
    FaceExchange,
}

/// One step of the normalization. Rearrangements carry no levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub kind: MoveKind,
    /// The level being filled and the top level (1-based).
    pub levels: Option<(usize, usize)>,
    pub removed: Vec<Vec<i32>>,
    pub added: Vec<Vec<i32>>,
    pub bond_delta: i64,
}

/// A minimizer rewritten as `B x {1..a-1}`, a daisy on level `a`, and a
/// residue on one lateral face of the block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub dim: usize,
    /// Output axis `i` is input axis `axis_order[i]`.
    pub axis_order: Vec<usize>,
    pub block_extents: Do1Tuple,
    pub height: u64,
    pub top_daisy: DaisySpec,
    /// Points outside the block on levels `1..a-1`.
    pub lateral_residue: Config,
    /// The axis whose hyperplane just beyond the block holds the residue.
    pub lateral_axis: Option<usize>,
}

impl NormalForm {
    /// Largest side of the block base.
    pub fn ell(&self) -> u64 {
        self.block_extents.first()
    }

    /// Number of levels.
    pub fn levels(&self) -> u64 {
        self.height + 1
    }

    pub fn cardinality(&self) -> u128 {
        self.block_extents.product() * self.height as u128
            + self.top_daisy.cardinality()
            + self.lateral_residue.len() as u128
    }

    pub fn to_config(&self) -> Result<Config> {
        let mut flat = Vec::new();
        if self.height > 0 {
            let mut ext = self.block_extents.values().to_vec();
            ext.push(self.height);
            flat.extend(Cuboid::at_origin(ext)?.to_config()?.iter().flatten());
        }
        let top = i32::try_from(self.levels()).map_err(|_| Error::CoordinateOverflow)?;
        for p in self.top_daisy.materialize()?.iter() {
            flat.extend_from_slice(p);
            flat.push(top);
        }
        flat.extend(self.lateral_residue.iter().flatten());
        let c = Config::from_flat(self.dim, flat)?;
        if c.len() as u128 != self.cardinality() {
            return Err(Error::invariant("normal form pieces overlap"));
        }
        Ok(c)
    }
}

/// Whether `a - ell - 6 <= 4^(1 - 2^(1-d)) ell^(2^(1-d))` for the normal form.
pub fn height_bound_holds(nf: &NormalForm) -> bool {
    let excess = nf.levels() as i128 - nf.ell() as i128 - 6;
    at_most_scaled_root(excess, nf.ell() as u128, nf.dim as u32)
}

/// The normal form together with every move that produced it.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub form: NormalForm,
    pub trace: Vec<Move>,
}

pub fn normalize_minimizer(c: &Config) -> Result<NormalForm> {
    Ok(normalize_with_trace(c)?.form)
}

/// Brings a minimizer into normal form by bond-preserving moves.
///
/// Every move is checked against the global bond count; a mismatch is
/// reported as an invariant violation rather than silently repaired.
pub fn normalize_with_trace(c: &Config) -> Result<Normalization> {
    let d = c.dim();
    if d < 2 {
        return Err(Error::arg("normalization needs dimension at least 2"));
    }
    if c.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    if !is_minimizer(c)? {
        let optimum = crate::daisy::eip_value(c.len() as u128, d)?;
        return Err(Error::NotMinimizer {
            n: c.len() as u128,
            perimeter: crate::lattice::edge_perimeter(c),
            optimum,
        });
    }
    let ext = minimal_rectangle(c)?.extents().to_vec();
    let longest = *ext.iter().max().expect("nonempty");
    // Ties go to the smallest axis index.
    let mut axis_order: Vec<usize> = (0..d).collect();
    axis_order.swap(ext.iter().position(|&e| e == longest).expect("maximum exists"), d - 1);
    let oriented = c.permute_axes(&axis_order)?.normalized()?;
    let mut w = Work { d, bonds: bond_count(&oriented), cur: oriented, levels: Vec::new(), trace: Vec::new() };
    w.rearrange()?;

    let p1 = w.level_spec(1)?;
    let base = p1.top().clone();
    let base_card = base.product();
    let mut start = 1;
    if !p1.is_perfect() {
        let k = w.levels.iter().rposition(|&n| n > base_card).expect("level 1 exceeds its top layer") + 1;
        if k + 1 >= w.levels.len() {
            return w.finish(axis_order, base);
        }
        start = k;
    }
    let guard = 4 * c.len() + 16;
    let mut steps = 0;
    while let Some(j) = (start + 1..w.levels.len()).find(|&j| w.levels[j - 1] < base_card) {
        steps += 1;
        if steps > guard {
            return Err(Error::invariant(format!("normalization did not settle after {guard} moves")));
        }
        w.step(j, &base)?;
    }
    w.finish(axis_order, base)
}

struct Work {
    d: usize,
    cur: Config,
    bonds: u64,
    /// Cardinalities of levels `1..=a`.
    levels: Vec<u128>,
    trace: Vec<Move>,
}

fn lift(pts: &Config, level: usize) -> Result<Config> {
    let level = i32::try_from(level).map_err(|_| Error::CoordinateOverflow)?;
    let mut flat = Vec::with_capacity(pts.len() * (pts.dim() + 1));
    for p in pts.iter() {
        flat.extend_from_slice(p);
        flat.push(level);
    }
    Config::from_flat(pts.dim() + 1, flat)
}

fn boxes_config(dim: usize, boxes: &[Cuboid]) -> Result<Config> {
    let mut flat = Vec::new();
    for b in boxes {
        flat.extend(b.to_config()?.iter().flatten());
    }
    Config::from_flat(dim, flat)
}

/// Largest `m` at which the top daisy has a layer that the level's daisy
/// lacks or undercuts somewhere.
fn case_one_index(q: &DaisySpec, qh: &DaisySpec) -> Option<usize> {
    (1..=q.dim()).rev().find(|&m| match (qh.layer_of_dim(m), q.layer_of_dim(m)) {
        (Some(_), None) => true,
        (Some(hat), Some(p)) => p.values().iter().zip(hat.values()).any(|(a, b)| a < b),
        _ => false,
    })
}

impl Work {
    fn level_spec(&self, j: usize) -> Result<DaisySpec> {
        daisy_of_cardinality(self.levels[j - 1], self.d - 1)
    }

    fn top(&self) -> usize {
        self.levels.len()
    }

    fn rearrange(&mut self) -> Result<()> {
        let next = decreasing_rearrangement(&self.cur, self.d - 1)?;
        if next != self.cur {
            self.commit(MoveKind::Rearrange, None, next)?;
        }
        self.levels = sections(&self.cur, self.d - 1)?.values().map(|s| s.len() as u128).collect();
        Ok(())
    }

    fn commit(&mut self, kind: MoveKind, levels: Option<(usize, usize)>, next: Config) -> Result<()> {
        let bonds = bond_count(&next);
        let bond_delta = bonds as i64 - self.bonds as i64;
        if bond_delta != 0 || next.len() != self.cur.len() {
            return Err(Error::invariant(format!(
                "{kind:?} move changed the bond count by {bond_delta} (size {} -> {})",
                self.cur.len(),
                next.len()
            )));
        }
        self.trace.push(Move {
            kind,
            levels,
            removed: self.cur.difference(&next)?.to_points(),
            added: next.difference(&self.cur)?.to_points(),
            bond_delta,
        });
        self.cur = next;
        Ok(())
    }

    fn apply(&mut self, kind: MoveKind, j: usize, next: Config) -> Result<()> {
        let top = self.top();
        self.commit(kind, Some((j, top)), next)?;
        self.rearrange()
    }

    /// Moves `donor` rigidly into the first defect that admits a
    /// bond-preserving placement.
    fn relocate(&mut self, kind: MoveKind, j: usize, donor: &Config, defects: &[Defect]) -> Result<bool> {
        let rest = self.cur.difference(donor)?;
        let bonds = self.bonds;
        for df in defects {
            match fill_defect_with(&rest, df, donor, |cand| bond_count(cand) == bonds) {
                Ok(next) => {
                    self.apply(kind, j, next)?;
                    return Ok(true);
                }
                Err(Error::DonorDoesNotFit) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(false)
    }

    fn step(&mut self, j: usize, base: &Do1Tuple) -> Result<()> {
        let dd = self.d - 1;
        let a = self.top();
        let q = self.level_spec(j)?;
        let qh = self.level_spec(a)?;
        if let Some(mbar) = case_one_index(&q, &qh) {
            return self.exchange_layers(j, &q, &qh, mbar);
        }
        let mut k = dd;
        loop {
            let reference = if k == dd { DefectReference::Perfect(base.clone()) } else { DefectReference::Layer(k + 1) };
            let defects = find_defects(&q, &reference)?
                .into_iter()
                .map(|df| df.lift(j as i32))
                .collect::<Result<Vec<_>>>()?;
            let hat_lower = k >= 2 && qh.layer_of_dim(k - 1).is_some();
            match (defects.is_empty(), hat_lower) {
                (true, true) if k > 2 => k -= 1,
                (true, true) => return self.corner_point(j, &q, &qh),
                (false, true) => {
                    let boxes = qh.layer_boxes();
                    let donor = lift(&boxes_config(dd, &boxes[dd - (k - 1)..])?, a)?;
                    return self.relocate_or_fail(MoveKind::LowerLayers, j, &donor, &defects);
                }
                (false, false) => {
                    let donor = lift(&face_of(&qh, k, 1)?, a)?;
                    return self.relocate_or_fail(MoveKind::SmallestFace, j, &donor, &defects);
                }
                (true, false) => return self.lowest_layer_move(j, &q, &qh, k),
            }
        }
    }

    fn relocate_or_fail(&mut self, kind: MoveKind, j: usize, donor: &Config, defects: &[Defect]) -> Result<()> {
        if self.relocate(kind, j, donor, defects)? {
            Ok(())
        } else {
            Err(Error::invariant(format!("{kind:?}: no bond-preserving placement on level {j}")))
        }
    }

    fn exchange_layers(&mut self, j: usize, q: &DaisySpec, qh: &DaisySpec, mbar: usize) -> Result<()> {
        let dd = self.d - 1;
        if mbar == dd {
            return Err(Error::invariant(format!("level {j} is undercut by the top level in every layer")));
        }
        let cut = dd - mbar;
        let tail = |s: &DaisySpec| s.layers().get(cut..).unwrap_or(&[]).to_vec();
        let mut new_q = q.layers()[..cut].to_vec();
        new_q.extend(tail(qh));
        let mut new_top = qh.layers()[..cut].to_vec();
        new_top.extend(tail(q));
        let spec = |layers| {
            DaisySpec::new(dd, layers).map_err(|e| Error::invariant(format!("layer exchange broke a daisy: {e}")))
        };
        let (new_q, new_top) = (spec(new_q)?, spec(new_top)?);
        let a = self.top();
        let old = lift(&q.materialize()?, j)?.union(&lift(&qh.materialize()?, a)?)?;
        let new = lift(&new_q.materialize()?, j)?.union(&lift(&new_top.materialize()?, a)?)?;
        let next = self.cur.difference(&old)?.union(&new)?;
        self.apply(MoveKind::LayerExchange, j, next)
    }

    fn corner_point(&mut self, j: usize, q: &DaisySpec, qh: &DaisySpec) -> Result<()> {
        let a = self.top();
        let defects = find_defects(q, &DefectReference::Layer(2))?
            .into_iter()
            .map(|df| df.lift(j as i32))
            .collect::<Result<Vec<_>>>()?;
        let max: Vec<i32> = qh.max_point().iter().map(|&v| v as i32).collect();
        let mut candidates = vec![max.clone()];
        // Fall back to the other top points, largest first.
        let mut others = qh.materialize()?.to_points();
        others.retain(|p| *p != max);
        others.reverse();
        candidates.extend(others);
        for p in candidates {
            let donor = lift(&Config::new(self.d - 1, [&p])?, a)?;
            if self.relocate(MoveKind::CornerPoint, j, &donor, &defects)? {
                return Ok(());
            }
        }
        Err(Error::invariant(format!("no top point can fill the point defect on level {j}")))
    }

    fn lowest_layer_move(&mut self, j: usize, q: &DaisySpec, qh: &DaisySpec, k: usize) -> Result<()> {
        let dd = self.d - 1;
        let a = self.top();
        let h = q.lowest_dim();
        if h >= k {
            return Err(Error::invariant(format!("level {j} has no layer below dimension {k}")));
        }
        let hat_k = qh.layer_of_dim(k).expect("top level reaches dimension k");
        let face_tuple = |i: usize| hat_k.values()[k - i..].to_vec();
        let fits = |i: usize| {
            let p = q.layer_of_dim(i).expect("layers down to h exist");
            face_tuple(i).iter().zip(p.values()).all(|(s, p)| s <= p)
        };
        if fits(h) {
            let defects = find_defects(q, &DefectReference::Layer(h + 1))?
                .into_iter()
                .map(|df| df.lift(j as i32))
                .collect::<Result<Vec<_>>>()?;
            let donor = lift(&face_of(qh, k, k + 1 - h)?, a)?;
            return self.relocate_or_fail(MoveKind::FaceFill, j, &donor, &defects);
        }
        let i = (h..k).rev().find(|&i| !fits(i)).expect("h itself fails");
        // X: the layers of dimension <= i on level j; Y: the i-face of the
        // top layer of dimension k. Each moves to the other's corner.
        let q_frame = q.frames()[dd - i].clone();
        let x = boxes_config(dd, &q.layer_boxes()[dd - i..])?;
        let x_canon = Canon {
            axes: q_frame.free.clone(),
            pts: x.iter().map(|p| q_frame.free.iter().map(|&c| p[c]).collect()).collect(),
        };
        let hat_frame = qh.frames()[dd - k].clone();
        let y_axes = hat_frame.free[k - i..].to_vec();
        let y = face_of(qh, k, k - i)?;
        let y_canon = Canon { axes: y_axes.clone(), pts: y.iter().map(|p| y_axes.iter().map(|&c| p[c]).collect()).collect() };

        let mut x_anchor = vec![1i32; dd];
        for &(c, v) in &q_frame.fixed {
            x_anchor[c] = v;
        }
        let hat_box = qh.layer_boxes()[dd - k].clone();
        let mut y_anchor = vec![1i32; dd];
        for &(c, v) in &hat_frame.fixed {
            y_anchor[c] = v;
        }
        for &c in &hat_frame.free[..k - i] {
            y_anchor[c] = hat_box.hi(c) as i32;
        }

        let rest = self.cur.difference(&lift(&x, j)?)?.difference(&lift(&y, a)?)?;
        for inj_y in injections(i, &q_frame.free) {
            let y_new = lift(&Config::new(dd, place(&y_canon, &inj_y, &x_anchor))?, j)?;
            for inj_x in injections(i, &y_axes) {
                let x_new = lift(&Config::new(dd, place(&x_canon, &inj_x, &y_anchor))?, a)?;
                let next = rest.union(&y_new)?.union(&x_new)?;
                if next.len() == self.cur.len() && bond_count(&next) == self.bonds {
                    return self.apply(MoveKind::FaceExchange, j, next);
                }
            }
        }
        Err(Error::invariant(format!("no bond-preserving face exchange on level {j}")))
    }

    fn finish(self, axis_order: Vec<usize>, base: Do1Tuple) -> Result<Normalization> {
        let dd = self.d - 1;
        let a = self.top();
        let top_daisy = self.level_spec(a)?;
        let block = Cuboid::at_origin(base.values().to_vec())?;
        let below = self.cur.filter(|p| (p[dd] as usize) < a);
        let lateral_residue = below.filter(|p| !block.contains(&p[..dd]));
        if below.len() - lateral_residue.len() != base.product() as usize * (a - 1) {
            return Err(Error::invariant("levels below the top do not cover the block"));
        }
        let lateral_axis = if lateral_residue.is_empty() {
            None
        } else {
            let axis = (0..dd).find(|&ax| lateral_residue.iter().all(|p| p[ax] as i64 == block.hi(ax) + 1));
            Some(axis.ok_or_else(|| Error::invariant("lateral residue is not on a single face of the block"))?)
        };
        let form = NormalForm {
            dim: self.d,
            axis_order,
            block_extents: base,
            height: a as u64 - 1,
            top_daisy,
            lateral_residue,
            lateral_axis,
        };
        Ok(Normalization { form, trace: self.trace })
    }
}

/// Points of the top daisy's layer of dimension `k` whose first `frozen` free
/// coordinates sit at their maximum.
fn face_of(qh: &DaisySpec, k: usize, frozen: usize) -> Result<Config> {
    let dd = qh.dim();
    let t = dd - k;
    let frame = &qh.frames()[t];
    let b = qh.layer_boxes()[t].clone();
    let cols = &frame.free[..frozen.min(frame.free.len())];
    Ok(b.to_config()?.filter(|p| cols.iter().all(|&c| p[c] as i64 == b.hi(c))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::edge_perimeter;

    fn check(c: &Config) -> Normalization {
        let out = normalize_with_trace(c).unwrap();
        assert!(out.trace.iter().all(|m| m.bond_delta == 0));
        let back = out.form.to_config().unwrap();
        assert_eq!(back.len(), c.len());
        assert_eq!(edge_perimeter(&back), edge_perimeter(c));
        out
    }

    #[test]
    fn cube_is_already_normal() {
        let cube = Cuboid::cube(3, 3).unwrap().to_config().unwrap();
        let out = check(&cube);
        assert!(out.trace.is_empty());
        assert_eq!(out.form.height, 2);
        assert_eq!(out.form.top_daisy, DaisySpec::perfect(Do1Tuple::new(vec![3, 3]).unwrap()));
        assert!(out.form.lateral_residue.is_empty());
        assert_eq!(out.form.to_config().unwrap(), cube);
        assert!(height_bound_holds(&out.form));
    }

    #[test]
    fn two_by_four_rectangle() {
        let c = Cuboid::at_origin(vec![2, 4]).unwrap().to_config().unwrap();
        let nf = check(&c).form;
        assert_eq!(nf.block_extents.values(), &[2]);
        assert_eq!(nf.height, 3);
        assert_eq!(nf.top_daisy.cardinality(), 2);
    }

    #[test]
    fn rejects_non_minimizers_and_flat_inputs() {
        let line = Config::new(2, [[1, 1], [1, 2], [1, 3], [1, 4]]).unwrap();
        assert!(matches!(normalize_minimizer(&line), Err(Error::NotMinimizer { n: 4, perimeter: 10, optimum: 8 })));
        assert!(matches!(normalize_minimizer(&Config::new(1, [[1]]).unwrap()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn daisies_normalize() {
        for d in 2..=3 {
            for n in 1..=60u128 {
                let c = daisy_of_cardinality(n, d).unwrap().materialize().unwrap();
                check(&c);
            }
        }
    }

    #[test]
    fn synthetic_tall_form_breaks_the_height_bound() {
        let nf = NormalForm {
            dim: 2,
            axis_order: vec![0, 1],
            block_extents: Do1Tuple::new(vec![100]).unwrap(),
            height: 199,
            top_daisy: DaisySpec::perfect(Do1Tuple::new(vec![100]).unwrap()),
            lateral_residue: Config::empty(2).unwrap(),
            lateral_axis: None,
        };
        assert!(!height_bound_holds(&nf));
        let short = NormalForm { height: 110, ..nf };
        assert!(height_bound_holds(&short));
    }
}
