//! Triangulations of a labeled convex polygon, flips, the quiver of a
//! triangulation, and exact Ptolemy propagation of edge values.
//!
//! Polygon vertices are labeled `1..=m` clockwise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quiver::Quiver;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("a polygon needs at least 3 vertices, got {m}")]
    PolygonTooSmall { m: usize },
    #[error("{chord} is not a diagonal of the {m}-gon")]
    InvalidDiagonal { chord: Chord, m: usize },
    #[error("diagonals {a} and {b} cross")]
    Crossing { a: Chord, b: Chord },
    #[error("a triangulation of the {m}-gon has {expected} diagonals, got {got}")]
    DiagonalCount { m: usize, expected: usize, got: usize },
    #[error("{chord} is not a diagonal of the triangulation")]
    NotInTriangulation { chord: Chord },
    #[error("no value given for {chord}")]
    MissingValue { chord: Chord },
    #[error("value on {chord} must be {requirement}")]
    BadValue { chord: Chord, requirement: &'static str },
    #[error("matrix rows must have equal length n >= 2")]
    MatrixShape,
    #[error("matrix has rank < 2 (all Plücker coordinates vanish)")]
    DegenerateSubspace,
    #[error("points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("boundary points {0} and {1} coincide")]
    IdenticalPoints(usize, usize),
    #[error("horocycle parameters must be positive and finite")]
    BadHoro,
    #[error("ideal polygon is not embedded: {0}")]
    NotEmbedded(&'static str),
    #[error("cannot parse {what}: {msg}")]
    Parse { what: &'static str, msg: String },
}

/// An unordered pair `{i, j}` of polygon vertices, stored with `i < j`.
/// Covers both boundary sides and diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chord(usize, usize);

impl Chord {
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "a chord needs two distinct endpoints");
        if a < b {
            Chord(a, b)
        } else {
            Chord(b, a)
        }
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    pub fn has_endpoint(self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// True when `self` is a side of the `m`-gon.
    pub fn is_side(self, m: usize) -> bool {
        self.1 == self.0 + 1 || (self.0 == 1 && self.1 == m)
    }

    /// Strict interior intersection.
    pub fn crosses(self, other: Chord) -> bool {
        let (a, b) = (self.0, self.1);
        let (c, d) = (other.0, other.1);
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl FromStr for Chord {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GeometryError::Parse { what: "chord", msg: format!("expected \"i-j\", got {s:?}") };
        let (a, b) = s.trim().split_once('-').ok_or_else(err)?;
        let a: usize = a.trim().parse().map_err(|_| err())?;
        let b: usize = b.trim().parse().map_err(|_| err())?;
        if a == b || a == 0 || b == 0 {
            return Err(err());
        }
        Ok(Chord::new(a, b))
    }
}

/// The boundary sides of the `m`-gon: `1-2, 2-3, ..., (m-1)-m, 1-m`.
pub fn polygon_sides(m: usize) -> Vec<Chord> {
    let mut sides: Vec<_> = (1..m).map(|i| Chord::new(i, i + 1)).collect();
    if m >= 3 {
        sides.push(Chord::new(1, m));
    }
    sides
}

/// All diagonals of the `m`-gon in sorted order.
pub fn all_diagonals(m: usize) -> Vec<Chord> {
    let mut out = Vec::new();
    for i in 1..=m {
        for j in (i + 2)..=m {
            let c = Chord::new(i, j);
            if !c.is_side(m) {
                out.push(c);
            }
        }
    }
    out
}

/// A maximal set of pairwise noncrossing diagonals of the `m`-gon.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TriangulationWire", into = "TriangulationWire")]
pub struct Triangulation {
    m: usize,
    diagonals: BTreeSet<Chord>,
}

/// JSON form `{ "m": 8, "diagonals": [[1,3], ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangulationWire {
    pub m: usize,
    pub diagonals: Vec<(usize, usize)>,
}

impl TryFrom<TriangulationWire> for Triangulation {
    type Error = GeometryError;

    fn try_from(w: TriangulationWire) -> Result<Self, GeometryError> {
        let mut chords = Vec::with_capacity(w.diagonals.len());
        for (a, b) in w.diagonals {
            if a == b {
                return Err(GeometryError::Parse { what: "triangulation", msg: format!("degenerate pair {a}-{b}") });
            }
            chords.push(Chord::new(a, b));
        }
        Triangulation::new(w.m, chords)
    }
}

impl From<Triangulation> for TriangulationWire {
    fn from(t: Triangulation) -> Self {
        TriangulationWire { m: t.m, diagonals: t.diagonals.iter().map(|c| (c.0, c.1)).collect() }
    }
}

impl Triangulation {
    pub fn new(m: usize, diagonals: impl IntoIterator<Item = Chord>) -> Result<Self, GeometryError> {
        if m < 3 {
            return Err(GeometryError::PolygonTooSmall { m });
        }
        let diagonals: BTreeSet<Chord> = diagonals.into_iter().collect();
        for &d in &diagonals {
            if d.1 > m || d.0 == 0 || d.is_side(m) {
                return Err(GeometryError::InvalidDiagonal { chord: d, m });
            }
        }
        if diagonals.len() != m - 3 {
            return Err(GeometryError::DiagonalCount { m, expected: m - 3, got: diagonals.len() });
        }
        let list: Vec<_> = diagonals.iter().copied().collect();
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                if a.crosses(b) {
                    return Err(GeometryError::Crossing { a, b });
                }
            }
        }
        Ok(Triangulation { m, diagonals })
    }

    /// All diagonals from `apex`.
    pub fn fan(m: usize, apex: usize) -> Result<Self, GeometryError> {
        if m < 3 {
            return Err(GeometryError::PolygonTooSmall { m });
        }
        let diagonals = (1..=m).filter(|&v| v != apex).map(|v| Chord::new(apex, v)).filter(|c| !c.is_side(m));
        Triangulation::new(m, diagonals)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn diagonals(&self) -> &BTreeSet<Chord> {
        &self.diagonals
    }

    pub fn contains(&self, c: Chord) -> bool {
        self.diagonals.contains(&c)
    }

    /// Sides followed by diagonals.
    pub fn arcs(&self) -> impl Iterator<Item = Chord> + '_ {
        polygon_sides(self.m).into_iter().chain(self.diagonals.iter().copied())
    }

    pub fn has_arc(&self, c: Chord) -> bool {
        c.is_side(self.m) || self.diagonals.contains(&c)
    }

    /// Neighbors of `v` along arcs, in increasing label order.
    fn neighbors(&self, v: usize) -> Vec<usize> {
        (1..=self.m).filter(|&u| u != v && self.has_arc(Chord::new(u, v))).collect()
    }

    /// The `m - 2` triangles, each with labels ascending (clockwise order).
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(self.m - 2);
        for a in 1..=self.m {
            let nbrs = self.neighbors(a);
            for (i, &b) in nbrs.iter().enumerate() {
                if b < a {
                    continue;
                }
                for &c in &nbrs[i + 1..] {
                    if self.has_arc(Chord::new(b, c)) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    /// The apexes of the two triangles on either side of diagonal `d`.
    fn quadrilateral(&self, d: Chord) -> Result<(usize, usize), GeometryError> {
        if !self.diagonals.contains(&d) {
            return Err(GeometryError::NotInTriangulation { chord: d });
        }
        let apex = |inside: bool| {
            (1..=self.m)
                .filter(|&v| (d.0 < v && v < d.1) == inside && !d.has_endpoint(v))
                .find(|&v| self.has_arc(Chord::new(d.0, v)) && self.has_arc(Chord::new(d.1, v)))
                .expect("every diagonal borders two triangles")
        };
        Ok((apex(true), apex(false)))
    }

    /// The other diagonal of the quadrilateral around `d`.
    pub fn flip_partner(&self, d: Chord) -> Result<Chord, GeometryError> {
        let (x, y) = self.quadrilateral(d)?;
        Ok(Chord::new(x, y))
    }

    /// Replaces `d` by the other diagonal of its quadrilateral.
    pub fn flip(&self, d: Chord) -> Result<Triangulation, GeometryError> {
        let partner = self.flip_partner(d)?;
        let mut diagonals = self.diagonals.clone();
        diagonals.remove(&d);
        diagonals.insert(partner);
        Ok(Triangulation { m: self.m, diagonals })
    }

    /// Number of triangles incident to each vertex, indexed by label - 1.
    pub fn triangle_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.m];
        for t in self.triangles() {
            for v in t {
                counts[v - 1] += 1;
            }
        }
        counts
    }

    /// Text form: `m` on the first line, then one `i j` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.m);
        for d in &self.diagonals {
            s.push_str(&format!("{} {}\n", d.0, d.1));
        }
        s
    }

    /// Parses the text form, or the JSON form when the input starts with `{`.
    /// Pairs may be written `i j` or `i-j`, separated by newlines or commas.
    pub fn parse(text: &str) -> Result<Triangulation, GeometryError> {
        let perr = |msg: String| GeometryError::Parse { what: "triangulation", msg };
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            return serde_json::from_str(trimmed).map_err(|e| perr(e.to_string()));
        }
        let tokens: Vec<usize> = text
            .split(|c: char| c.is_whitespace() || c == '-' || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| perr(format!("bad token {t:?}"))))
            .collect::<Result<_, _>>()?;
        let (&m, rest) = tokens.split_first().ok_or_else(|| perr("empty input".into()))?;
        if rest.len() % 2 != 0 {
            return Err(perr("odd number of endpoints".into()));
        }
        let mut chords = Vec::with_capacity(rest.len() / 2);
        for pair in rest.chunks(2) {
            if pair[0] == pair[1] {
                return Err(perr(format!("degenerate pair {}-{}", pair[0], pair[1])));
            }
            chords.push(Chord::new(pair[0], pair[1]));
        }
        Triangulation::new(m, chords)
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds: Vec<_> = self.diagonals.iter().map(ToString::to_string).collect();
        write!(f, "{}-gon {{{}}}", self.m, ds.join(", "))
    }
}

/// Every triangulation of the `m`-gon, without duplicates, in a fixed order
/// (recursing on the apex of the triangle on side `1-m`).
pub fn enumerate_triangulations(m: usize) -> Result<Vec<Triangulation>, GeometryError> {
    if m < 3 {
        return Err(GeometryError::PolygonTooSmall { m });
    }
    let verts: Vec<usize> = (1..=m).collect();
    Ok(triangulate_range(&verts)
        .into_iter()
        .map(|diagonals| Triangulation { m, diagonals: diagonals.into_iter().collect() })
        .collect())
}

fn triangulate_range(verts: &[usize]) -> Vec<Vec<Chord>> {
    let len = verts.len();
    if len < 4 {
        return vec![Vec::new()];
    }
    let (first, last) = (verts[0], verts[len - 1]);
    let mut out = Vec::new();
    for k in 1..len - 1 {
        let left = triangulate_range(&verts[..=k]);
        let right = triangulate_range(&verts[k..]);
        for l in &left {
            for r in &right {
                let mut ds = Vec::with_capacity(len - 3);
                if k > 1 {
                    ds.push(Chord::new(first, verts[k]));
                }
                if k < len - 2 {
                    ds.push(Chord::new(verts[k], last));
                }
                ds.extend_from_slice(l);
                ds.extend_from_slice(r);
                out.push(ds);
            }
        }
    }
    out
}

/// A quiver built from a triangulation, with the arc carried by each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulationQuiver {
    pub quiver: Quiver,
    pub arcs: Vec<Chord>,
}

impl TriangulationQuiver {
    pub fn vertex_of(&self, c: Chord) -> Option<usize> {
        self.arcs.iter().position(|&a| a == c)
    }
}

/// Quiver of `t`: vertices are its diagonals in sorted order, followed by
/// the sides as frozen vertices when `include_boundary` is set.
///
/// Inside each triangle `p < q < r` the arcs are linked clockwise,
/// `pq -> qr -> rp -> pq`; arrows between two frozen vertices are dropped.
pub fn quiver_from_triangulation(t: &Triangulation, include_boundary: bool) -> TriangulationQuiver {
    let mut arcs: Vec<Chord> = t.diagonals.iter().copied().collect();
    if include_boundary {
        arcs.extend(polygon_sides(t.m));
    }
    let quiver = quiver_for_arcs(t, &arcs).expect("arcs come from the triangulation");
    TriangulationQuiver { quiver, arcs }
}

/// Quiver of `t` with vertex `i` carrying `arcs[i]`. `arcs` must list every
/// diagonal of `t` once, plus optionally some sides (frozen).
pub fn quiver_for_arcs(t: &Triangulation, arcs: &[Chord]) -> Result<Quiver, GeometryError> {
    let index: BTreeMap<Chord, usize> = arcs.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    for &c in arcs {
        if !t.has_arc(c) {
            return Err(GeometryError::NotInTriangulation { chord: c });
        }
    }
    for &d in &t.diagonals {
        if !index.contains_key(&d) {
            return Err(GeometryError::MissingValue { chord: d });
        }
    }
    let frozen: Vec<usize> = arcs.iter().enumerate().filter(|(_, c)| c.is_side(t.m)).map(|(i, _)| i).collect();
    let mut arrows = Vec::new();
    for [p, q, r] in t.triangles() {
        let cycle = [Chord::new(p, q), Chord::new(q, r), Chord::new(p, r)];
        for i in 0..3 {
            let (a, b) = (cycle[i], cycle[(i + 1) % 3]);
            if let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) {
                if !(a.is_side(t.m) && b.is_side(t.m)) {
                    arrows.push((ia, ib, 1));
                }
            }
        }
    }
    let q = Quiver::from_arrows(arcs.len(), &arrows).expect("indices in range");
    Ok(q.with_frozen(&frozen).expect("indices in range"))
}

/// Exact values on chords of the polygon, keyed `"i-j"` with rational
/// strings `"p/q"` in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeValues(BTreeMap<Chord, BigRational>);

impl EdgeValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, c: Chord) -> Option<&BigRational> {
        self.0.get(&c)
    }

    pub fn insert(&mut self, c: Chord, v: BigRational) {
        self.0.insert(c, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Chord, &BigRational)> {
        self.0.iter().map(|(c, v)| (*c, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.0.values().all(|v| v.is_positive())
    }

    pub fn restrict(&self, chords: impl IntoIterator<Item = Chord>) -> EdgeValues {
        EdgeValues(chords.into_iter().filter_map(|c| self.0.get(&c).map(|v| (c, v.clone()))).collect())
    }

    /// The value `1` on every side and diagonal of `t`.
    pub fn ones(t: &Triangulation) -> EdgeValues {
        EdgeValues(t.arcs().map(|c| (c, BigRational::from_integer(1.into()))).collect())
    }

    /// One `i-j value` line per chord.
    pub fn to_text(&self) -> String {
        self.0.iter().map(|(c, v)| format!("{c} {v}\n")).collect()
    }

    /// Parses [`EdgeValues::to_text`] output or the JSON map.
    pub fn parse(text: &str) -> Result<EdgeValues, GeometryError> {
        let perr = |msg: String| GeometryError::Parse { what: "edge values", msg };
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| perr(e.to_string()));
        }
        let mut out = BTreeMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [chord, value] = toks[..] else {
                return Err(perr(format!("expected `i-j value`, got {line:?}")));
            };
            let chord: Chord = chord.parse()?;
            let value: BigRational = value.parse().map_err(|_| perr(format!("bad rational {value:?}")))?;
            out.insert(chord, value);
        }
        Ok(EdgeValues(out))
    }

    fn require(&self, c: Chord) -> Result<&BigRational, GeometryError> {
        self.0.get(&c).ok_or(GeometryError::MissingValue { chord: c })
    }
}

impl FromIterator<(Chord, BigRational)> for EdgeValues {
    fn from_iter<I: IntoIterator<Item = (Chord, BigRational)>>(iter: I) -> Self {
        EdgeValues(iter.into_iter().collect())
    }
}

impl Serialize for EdgeValues {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(c, v)| (c.to_string(), v.to_string())))
    }
}

impl<'de> Deserialize<'de> for EdgeValues {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw: BTreeMap<String, serde_json::Value> = BTreeMap::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, v) in raw {
            let chord: Chord = k.parse().map_err(D::Error::custom)?;
            let text = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                other => return Err(D::Error::custom(format!("value for {k} must be a rational string, got {other}"))),
            };
            let value: BigRational =
                text.trim().parse().map_err(|_| D::Error::custom(format!("bad rational {text:?} for {k}")))?;
            out.insert(chord, value);
        }
        Ok(EdgeValues(out))
    }
}

/// Extends values on the sides and diagonals of `t` to every chord of the
/// polygon with the Ptolemy relation, walking flips from `t` toward each
/// missing diagonal in sorted order.
pub fn ptolemy_propagate(t: &Triangulation, seed: &EdgeValues) -> Result<EdgeValues, GeometryError> {
    let targets: Vec<Chord> = all_diagonals(t.m).into_iter().filter(|d| !t.contains(*d)).collect();
    ptolemy_propagate_in_order(t, seed, &targets)
}

/// As [`ptolemy_propagate`], reaching the missing diagonals in the given
/// order. Every order produces the same values.
///
/// Values must be nonzero wherever they are divided by; positive inputs
/// always qualify. Signed inputs (Plücker coordinates) work as long as no
/// flipped diagonal carries zero.
pub fn ptolemy_propagate_in_order(
    t: &Triangulation,
    seed: &EdgeValues,
    targets: &[Chord],
) -> Result<EdgeValues, GeometryError> {
    let mut vals = EdgeValues::new();
    for c in t.arcs() {
        vals.insert(c, seed.require(c)?.clone());
    }
    let mut cur = t.clone();
    for &target in targets {
        if target.1 > t.m || target.is_side(t.m) {
            return Err(GeometryError::InvalidDiagonal { chord: target, m: t.m });
        }
        while !cur.contains(target) {
            let a = target.0;
            // The triangle at `a` whose far side crosses the target; flipping
            // that side yields a diagonal from `a` with one fewer crossing.
            let nbrs = cur.neighbors(a);
            let crossing = nbrs
                .windows(2)
                .map(|w| Chord::new(w[0], w[1]))
                .chain(std::iter::once(Chord::new(nbrs[nbrs.len() - 1], nbrs[0])))
                .find(|c| cur.contains(*c) && c.crosses(target))
                .expect("a diagonal at the target's endpoint crosses it");
            let partner = cur.flip_partner(crossing)?;
            let value = ptolemy_exchange(&vals, crossing, partner)?;
            vals.insert(partner, value);
            cur = cur.flip(crossing)?;
        }
    }
    Ok(vals)
}

/// Value of `new` from the quadrilateral it shares with `old`:
/// for `p < q < r < s`, `pr * qs = pq * rs + qr * ps`.
fn ptolemy_exchange(vals: &EdgeValues, old: Chord, new: Chord) -> Result<BigRational, GeometryError> {
    let mut v = [old.0, old.1, new.0, new.1];
    v.sort_unstable();
    let [p, q, r, s] = v;
    let val = |a, b| vals.require(Chord::new(a, b));
    let numerator = val(p, q)? * val(r, s)? + val(q, r)? * val(p, s)?;
    let divisor = vals.require(old)?;
    if divisor.is_zero() {
        return Err(GeometryError::BadValue { chord: old, requirement: "nonzero" });
    }
    Ok(numerator / divisor)
}
