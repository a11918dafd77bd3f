//! Frieze patterns over the polygon.
//!
//! A [`Frieze`] stores one value per side and diagonal of the `m`-gon. The
//! staggered grid is a view of it: row `r`, column `j` shows the chord from
//! vertex `i = j - floor(r/2)` to vertex `i + r + 1` (0-based, mod `m`), and
//! odd rows sit half a step to the right. In that layout the diamond around
//! `a = g[r][j]` is
//!
//! ```text
//!          c = g[r-1][j + r%2]
//! a = g[r][j]           d = g[r][j+1]
//!          b = g[r+1][j + r%2]
//! ```
//!
//! with `a·d − b·c = 1`, which is the Ptolemy relation on the quadrilateral
//! `i, i+1, i+r+1, i+r+2` whose sides are 1.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::hyperbolic::realize_polygon;
use crate::polygon::{
    enumerate_triangulations, ptolemy_propagate, Chord, EdgeValues, GeometryError, Triangulation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FriezeError {
    #[error("malformed frieze: {0}")]
    Format(String),
    #[error("entry {0} is not an integer")]
    NotInteger(Chord),
    #[error("grid does not determine a frieze: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Values on every side and diagonal of the `m`-gon, 1 on the sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frieze {
    m: usize,
    values: EdgeValues,
}

impl Frieze {
    pub fn new(m: usize, values: EdgeValues) -> Result<Self, FriezeError> {
        if m < 3 {
            return Err(GeometryError::PolygonTooSmall { m }.into());
        }
        let mut kept = EdgeValues::new();
        for i in 1..=m {
            for j in i + 1..=m {
                let c = Chord::new(i, j);
                let v = values.get(c).ok_or(GeometryError::MissingValue { chord: c })?;
                if c.is_side(m) && !v.is_one() {
                    return Err(GeometryError::BadValue { chord: c, requirement: "1 on a side" }.into());
                }
                kept.insert(c, v.clone());
            }
        }
        if kept.len() != values.len() {
            return Err(FriezeError::Format(format!("values outside the {m}-gon")));
        }
        Ok(Frieze { m, values: kept })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Key-value view in the edge-values format.
    pub fn values(&self) -> &EdgeValues {
        &self.values
    }

    /// Entry on the chord between labels `i` and `j`, read mod `m`.
    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        let a = (i + self.m - 1) % self.m + 1;
        let b = (j + self.m - 1) % self.m + 1;
        self.values.get(Chord::new(a, b)).expect("frieze covers every chord")
    }

    fn entry0(&self, i: usize, j: usize) -> &BigRational {
        self.entry(i % self.m + 1, j % self.m + 1)
    }

    pub fn is_positive(&self) -> bool {
        self.values.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.values.iter().all(|(_, v)| v.is_integer())
    }

    /// `entry(l-1, l+1)` for each label `l = 1..=m`.
    pub fn quiddity(&self) -> Result<Vec<BigInt>, FriezeError> {
        (1..=self.m)
            .map(|l| {
                let v = self.entry(l + self.m - 1, l + 1);
                if v.is_integer() {
                    Ok(v.to_integer())
                } else {
                    Err(FriezeError::NotInteger(Chord::new((l + self.m - 2) % self.m + 1, l % self.m + 1)))
                }
            })
            .collect()
    }

    /// One period of the staggered grid: `m - 1` rows of `m` entries.
    pub fn grid(&self) -> FriezeGrid {
        let m = self.m;
        let rows = (0..m - 1)
            .map(|r| (0..m).map(|j| self.entry0(j + m - r / 2, j + m - r / 2 + r + 1).clone()).collect())
            .collect();
        FriezeGrid { m, rows }
    }

    /// Reads a frieze off a grid window in the staggered layout. Windows
    /// narrower than `m` are first extended with the diamond rule.
    pub fn from_grid(grid: &FriezeGrid) -> Result<Frieze, FriezeError> {
        let m = grid.m;
        let rows = if grid.width() >= m {
            grid.rows.clone()
        } else {
            extend_right(&grid.rows, m - grid.width())
                .ok_or_else(|| FriezeError::Inconsistent("cannot extend a non-positive window".into()))?
        };
        let mut values = EdgeValues::new();
        for (r, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let i = (j + m * (r + 1) - r / 2) % m;
                let c = Chord::new(i + 1, (i + r + 1) % m + 1);
                match values.get(c) {
                    Some(prev) if prev != v => {
                        return Err(FriezeError::Inconsistent(format!("chord {c} reads both {prev} and {v}")))
                    }
                    _ => values.insert(c, v.clone()),
                }
            }
        }
        Frieze::new(m, values)
    }
}

/// The frieze with 1 on every side and every diagonal of `t`.
pub fn frieze_from_triangulation(t: &Triangulation) -> Frieze {
    frieze_from_values(t, &EdgeValues::ones(t)).expect("positive seed values propagate")
}

/// The frieze with the given values on the diagonals of `t`; sides are 1
/// whether or not `vals` lists them.
pub fn frieze_from_values(t: &Triangulation, vals: &EdgeValues) -> Result<Frieze, FriezeError> {
    let mut seed = EdgeValues::ones(t);
    for &d in t.diagonals() {
        let v = vals.get(d).ok_or(GeometryError::MissingValue { chord: d })?;
        if !v.is_positive() {
            return Err(GeometryError::BadValue { chord: d, requirement: "positive" }.into());
        }
        seed.insert(d, v.clone());
    }
    Frieze::new(t.m(), ptolemy_propagate(t, &seed)?)
}

/// The first triangulation, in enumeration order, carrying 1 on every diagonal.
pub fn is_unitary(f: &Frieze) -> Option<Triangulation> {
    enumerate_triangulations(f.m)
        .expect("m >= 3")
        .into_iter()
        .find(|t| t.diagonals().iter().all(|d| f.values.get(*d).is_some_and(One::is_one)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaComparison {
    pub compared: usize,
    pub max_deviation: f64,
}

/// Realizes `f`'s values on `t` as lambda lengths and compares every chord of
/// the resulting polygon against `f`.
pub fn frieze_entries_as_lambda(f: &Frieze, t: &Triangulation) -> Result<LambdaComparison, FriezeError> {
    let polygon = realize_polygon(t, &f.values)?;
    let mut max_deviation: f64 = 0.0;
    let mut compared = 0;
    for (c, lambda) in polygon.lambda_table() {
        let want = f.values.get(c).and_then(ToPrimitive::to_f64).expect("frieze covers every chord");
        max_deviation = max_deviation.max((lambda - want).abs());
        compared += 1;
    }
    Ok(LambdaComparison { compared, max_deviation })
}

/// Rows of the staggered grid. Row 0 and row `m - 2` are the boundary rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FriezeGrid {
    m: usize,
    rows: Vec<Vec<BigRational>>,
}

impl FriezeGrid {
    pub fn new(m: usize, rows: Vec<Vec<BigRational>>) -> Result<Self, FriezeError> {
        if m < 3 {
            return Err(GeometryError::PolygonTooSmall { m }.into());
        }
        if rows.len() != m - 1 {
            return Err(FriezeError::Format(format!("the {m}-gon needs {} rows, got {}", m - 1, rows.len())));
        }
        let width = rows[0].len();
        if width == 0 {
            return Err(FriezeError::Format("empty rows".into()));
        }
        if let Some(r) = rows.iter().position(|row| row.len() != width) {
            return Err(FriezeError::Format(format!("ragged grid: row {r} has {} entries, row 0 has {width}", rows[r].len())));
        }
        Ok(FriezeGrid { m, rows })
    }

    pub fn from_integers(m: usize, rows: &[Vec<i64>]) -> Result<Self, FriezeError> {
        let rows = rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
        FriezeGrid::new(m, rows)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    /// `m` on the first line, then one row per line; odd rows start with a
    /// blank to mark the half-step stagger.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.m);
        for (r, row) in self.rows.iter().enumerate() {
            if r % 2 == 1 {
                s.push(' ');
            }
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, FriezeError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| FriezeError::Format("empty input".into()))?;
        let m: usize = header.trim().parse().map_err(|_| FriezeError::Format(format!("bad size line {header:?}")))?;
        let rows = lines
            .map(|line| {
                line.split_whitespace()
                    .map(|t| t.parse::<BigRational>().map_err(|_| FriezeError::Format(format!("bad entry {t:?}"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        FriezeGrid::new(m, rows)
    }
}

impl fmt::Display for FriezeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Treat the grid as exactly one period, so diamonds wrap around.
    pub cyclic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FriezeReport {
    pub boundary_ok: bool,
    pub diamond_ok: bool,
    /// `(row, column)` of the left corner `a` of each failing diamond.
    pub violations: Vec<(usize, usize)>,
    pub positive: bool,
    pub integer: bool,
    /// Smallest horizontal period, at most `m`. Only computed for valid
    /// positive grids.
    pub min_period: Option<usize>,
    /// Whether shifting by `m` columns maps the grid to itself. Only
    /// computed for valid positive grids.
    pub shift_invariant: Option<bool>,
}

impl FriezeReport {
    pub fn ok(&self) -> bool {
        self.boundary_ok && self.diamond_ok && self.positive && self.shift_invariant == Some(true)
    }
}

pub fn check_frieze(grid: &FriezeGrid, options: CheckOptions) -> FriezeReport {
    let rows = &grid.rows;
    let height = rows.len();
    let width = grid.width();
    let boundary_ok = rows[0].iter().chain(&rows[height - 1]).all(One::is_one);
    let mut violations = Vec::new();
    for r in 1..height.saturating_sub(1) {
        for j in 0..width {
            let (jd, jbc) = (j + 1, j + r % 2);
            let (jd, jbc) = if options.cyclic {
                (jd % width, jbc % width)
            } else if jd >= width || jbc >= width {
                continue;
            } else {
                (jd, jbc)
            };
            let (a, d) = (&rows[r][j], &rows[r][jd]);
            let (b, c) = (&rows[r + 1][jbc], &rows[r - 1][jbc]);
            if a * d - b * c != BigRational::one() {
                violations.push((r, j));
            }
        }
    }
    let positive = rows.iter().flatten().all(Signed::is_positive);
    let integer = rows.iter().flatten().all(BigRational::is_integer);
    let diamond_ok = violations.is_empty();

    let (mut min_period, mut shift_invariant) = (None, None);
    if boundary_ok && diamond_ok && positive {
        let m = grid.m;
        let ext = extend_right(rows, m).expect("positive grid");
        let periodic = |p: usize| ext.iter().all(|row| (0..width).all(|j| row[j] == row[j + p]));
        shift_invariant = Some(periodic(m));
        min_period = (1..=m).find(|&p| periodic(p));
    }
    FriezeReport { boundary_ok, diamond_ok, violations, positive, integer, min_period, shift_invariant }
}

/// Appends `extra` columns using `d = (1 + b·c)/a`. Even rows go first since
/// odd rows need the new even-row entries. `None` if some `a` is zero.
fn extend_right(rows: &[Vec<BigRational>], extra: usize) -> Option<Vec<Vec<BigRational>>> {
    let mut ext = rows.to_vec();
    let height = ext.len();
    let one = BigRational::one();
    for _ in 0..extra {
        let last = ext[0].len() - 1;
        ext[0].push(one.clone());
        ext[height - 1].push(one.clone());
        for parity in [0, 1] {
            for r in (1..height - 1).filter(|r| r % 2 == parity) {
                let jbc = last + r % 2;
                let a = &ext[r][last];
                if a.is_zero() {
                    return None;
                }
                let d = (&one + &ext[r + 1][jbc] * &ext[r - 1][jbc]) / a;
                ext[r].push(d);
            }
        }
    }
    Some(ext)
}
