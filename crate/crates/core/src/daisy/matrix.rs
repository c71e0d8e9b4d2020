use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tuple::{is_do1, Do1Tuple};
use super::DaisySpec;
use crate::error::{Error, MatrixRule, Result};
use crate::order::OrderKey;

/// A matrix entry: a number, or a dot (`None`).
pub type Cell = Option<u64>;

/// Rows of numbers and dots; row `i` carries dots at the columns frozen by
/// the rows above it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DaisyMatrix {
    rows: Vec<Vec<Cell>>,
}

impl DaisyMatrix {
    /// Wraps rows without validation; see [`DaisyMatrix::to_spec`].
    pub fn from_rows(rows: Vec<Vec<Cell>>) -> Self {
        DaisyMatrix { rows }
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub(super) fn from_spec(spec: &DaisySpec) -> Self {
        let frames = spec.frames();
        let rows = spec
            .layers()
            .iter()
            .zip(&frames)
            .map(|(layer, frame)| {
                let mut row = vec![None; spec.dim()];
                for (&c, &v) in frame.free.iter().zip(layer.values()) {
                    row[c] = Some(v);
                }
                row
            })
            .collect();
        DaisyMatrix { rows }
    }

    /// Validates the matrix and reads off its coefficient chain.
    pub fn to_spec(&self) -> Result<DaisySpec> {
        let shape = |row: usize, detail: String| Error::InvalidMatrix { rule: MatrixRule::Shape, row, detail };
        let Some(first) = self.rows.first() else {
            return Err(shape(1, "matrix has no rows".into()));
        };
        let d = first.len();
        if d == 0 {
            return Err(shape(1, "rows must not be empty".into()));
        }
        if self.rows.len() > d {
            return Err(shape(d + 1, format!("{} rows exceed {d} columns", self.rows.len())));
        }
        let mut dotted = vec![false; d];
        let mut layers: Vec<Do1Tuple> = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let r = i + 1;
            if row.len() != d {
                return Err(shape(r, format!("row has {} entries, expected {d}", row.len())));
            }
            for (c, cell) in row.iter().enumerate() {
                if cell.is_none() != dotted[c] {
                    let detail = if dotted[c] {
                        format!("column {} must be a dot", c + 1)
                    } else {
                        format!("unexpected dot in column {}", c + 1)
                    };
                    return Err(Error::InvalidMatrix { rule: MatrixRule::DotPlacement, row: r, detail });
                }
            }
            let numbers: Vec<u64> = row.iter().flatten().copied().collect();
            if !is_do1(&numbers) {
                return Err(Error::InvalidMatrix {
                    rule: MatrixRule::Do1,
                    row: r,
                    detail: format!("numbers {numbers:?} are not a DO1 tuple"),
                });
            }
            let layer = Do1Tuple::new(numbers).expect("checked above");
            if let Some(prev) = layers.last() {
                if !prev.is_larger_than(&layer) {
                    return Err(Error::InvalidMatrix {
                        rule: MatrixRule::Larger,
                        row: r,
                        detail: format!("{layer} is not dominated by {prev} off its value-change position"),
                    });
                }
            }
            let free: Vec<usize> = (0..d).filter(|&c| !dotted[c]).collect();
            dotted[free[layer.value_change_position()]] = true;
            layers.push(layer);
        }
        DaisySpec::new(d, layers)
    }
}

impl fmt::Display for DaisyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let tokens: Vec<String> = row.iter().map(|c| c.map_or(".".to_string(), |v| v.to_string())).collect();
            writeln!(f, "{}", tokens.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for DaisyMatrix {
    type Err = Error;

    /// Whitespace-separated tokens, one row per line; `.` or `·` for dots.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let r = rows.len() + 1;
            let row = line
                .split_whitespace()
                .map(|tok| match tok {
                    "." | "·" | "⋅" => Ok(None),
                    _ => match tok.parse::<u64>() {
                        Ok(v) if v > 0 => Ok(Some(v)),
                        _ => Err(Error::InvalidMatrix {
                            rule: MatrixRule::Shape,
                            row: r,
                            detail: format!("bad token `{tok}`"),
                        }),
                    },
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(DaisyMatrix { rows })
    }
}

/// The largest point of the daisy encoded by `m`: the last row with every dot
/// replaced by one more than the first number above it.
pub fn phi(m: &DaisyMatrix) -> Result<OrderKey> {
    let spec = m.to_spec()?;
    OrderKey::new(spec.max_point())
}

/// Inverse of [`phi`]: repeatedly peel off the largest DO1 row dominated by
/// the remaining tuple, anchored at its rightmost maximum.
pub fn psi(x: &OrderKey) -> DaisyMatrix {
    let d = x.dim();
    let mut active: Vec<usize> = (0..d).collect();
    let mut rows = Vec::new();
    loop {
        let vals: Vec<u64> = active.iter().map(|&c| x.coords()[c]).collect();
        let mut row = vec![None; d];
        if is_do1(&vals) {
            for (&c, &v) in active.iter().zip(&vals) {
                row[c] = Some(v);
            }
            rows.push(row);
            return DaisyMatrix { rows };
        }
        let mx = *vals.iter().max().expect("nonempty");
        let j = vals.iter().rposition(|&v| v == mx).expect("maximum exists");
        for (k, &c) in active.iter().enumerate() {
            row[c] = Some(if k < j { mx } else { mx - 1 });
        }
        rows.push(row);
        active.remove(j);
    }
}
