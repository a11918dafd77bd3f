//! Decorated ideal points in the upper half-plane, lambda lengths, and
//! realization of a decorated ideal polygon from values on a triangulation.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::polygon::{Chord, EdgeValues, GeometryError, Triangulation};

/// A point of the boundary line, or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

/// A boundary point with a horocycle. `horo` is the Euclidean diameter of
/// the horocycle at a finite point, or the height of the horizontal line at
/// infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoratedIdealPoint {
    pub position: BoundaryPoint,
    pub horo: f64,
}

impl DecoratedIdealPoint {
    pub fn finite(x: f64, diameter: f64) -> Self {
        DecoratedIdealPoint { position: BoundaryPoint::Finite(x), horo: diameter }
    }

    pub fn infinity(height: f64) -> Self {
        DecoratedIdealPoint { position: BoundaryPoint::Infinity, horo: height }
    }

    /// The point `p/q` with the Farey horocycle of diameter `1/q²`;
    /// `q = 0` gives infinity at height 1.
    pub fn farey(p: i64, q: i64) -> Self {
        if q == 0 {
            Self::infinity(1.0)
        } else {
            let qf = q as f64;
            Self::finite(p as f64 / qf, 1.0 / (qf * qf))
        }
    }

    fn check(&self) -> Result<(), GeometryError> {
        let finite_pos = match self.position {
            BoundaryPoint::Finite(x) => x.is_finite(),
            BoundaryPoint::Infinity => true,
        };
        if finite_pos && self.horo.is_finite() && self.horo > 0.0 {
            Ok(())
        } else {
            Err(GeometryError::BadHoro)
        }
    }
}

fn lambda_indexed(a: &DecoratedIdealPoint, b: &DecoratedIdealPoint, ia: usize, ib: usize) -> Result<f64, GeometryError> {
    a.check()?;
    b.check()?;
    match (a.position, b.position) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => Err(GeometryError::IdenticalPoints(ia, ib)),
        (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => {
            if x == y {
                return Err(GeometryError::IdenticalPoints(ia, ib));
            }
            Ok((x - y).abs() / (a.horo * b.horo).sqrt())
        }
        (BoundaryPoint::Infinity, BoundaryPoint::Finite(_)) => Ok((a.horo / b.horo).sqrt()),
        (BoundaryPoint::Finite(_), BoundaryPoint::Infinity) => Ok((b.horo / a.horo).sqrt()),
    }
}

/// `e^{l/2}` where `l` is the signed distance between the two horocycles
/// along the geodesic joining their centers.
pub fn lambda_length(a: &DecoratedIdealPoint, b: &DecoratedIdealPoint) -> Result<f64, GeometryError> {
    lambda_indexed(a, b, 1, 2)
}

/// `λ_AB·λ_CD + λ_BC·λ_DA − λ_AC·λ_BD` for four points in cyclic order.
pub fn verify_ptolemy_hyperbolic(quad: &[DecoratedIdealPoint; 4]) -> Result<f64, GeometryError> {
    let l = |i: usize, j: usize| lambda_indexed(&quad[i], &quad[j], i + 1, j + 1);
    for i in 0..4 {
        for j in i + 1..4 {
            l(i, j)?;
        }
    }
    Ok(l(0, 1)? * l(2, 3)? + l(1, 2)? * l(3, 0)? - l(0, 2)? * l(1, 3)?)
}

/// Cyclically ordered decorated ideal points; vertex `i` has label `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoratedIdealPolygon {
    points: Vec<DecoratedIdealPoint>,
}

impl DecoratedIdealPolygon {
    /// At most one point at infinity; reading cyclically from just after it
    /// (or from the smallest position), finite positions strictly increase.
    pub fn new(points: Vec<DecoratedIdealPoint>) -> Result<Self, GeometryError> {
        if points.len() < 3 {
            return Err(GeometryError::PolygonTooSmall { m: points.len() });
        }
        for p in &points {
            p.check()?;
        }
        let xs: Vec<Option<f64>> = points
            .iter()
            .map(|p| match p.position {
                BoundaryPoint::Finite(x) => Some(x),
                BoundaryPoint::Infinity => None,
            })
            .collect();
        let infinities = xs.iter().filter(|x| x.is_none()).count();
        if infinities > 1 {
            return Err(GeometryError::NotEmbedded("more than one point at infinity"));
        }
        let n = xs.len();
        let mut descents = 0;
        for i in 0..n {
            match (xs[i], xs[(i + 1) % n]) {
                (Some(a), Some(b)) if a == b => return Err(GeometryError::IdenticalPoints(i + 1, (i + 1) % n + 1)),
                (Some(a), Some(b)) if a > b => descents += 1,
                _ => {}
            }
        }
        let allowed = if infinities == 1 { 0 } else { 1 };
        if descents != allowed {
            return Err(GeometryError::NotEmbedded("positions are not in cyclic order"));
        }
        Ok(DecoratedIdealPolygon { points })
    }

    pub fn points(&self) -> &[DecoratedIdealPoint] {
        &self.points
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Lambda length between labels `i` and `j`.
    pub fn lambda(&self, i: usize, j: usize) -> f64 {
        lambda_indexed(&self.points[i - 1], &self.points[j - 1], i, j).expect("validated polygon")
    }

    /// Lambda lengths of every side and diagonal.
    pub fn lambda_table(&self) -> BTreeMap<Chord, f64> {
        let m = self.m();
        let mut out = BTreeMap::new();
        for i in 1..=m {
            for j in i + 1..=m {
                out.insert(Chord::new(i, j), self.lambda(i, j));
            }
        }
        out
    }

    /// One `position horo` line per vertex, `inf` for the point at infinity,
    /// 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let pos = match p.position {
                BoundaryPoint::Finite(x) => sig12(x),
                BoundaryPoint::Infinity => "inf".to_string(),
            };
            s.push_str(&format!("{pos} {}\n", sig12(p.horo)));
        }
        s
    }

    /// Parses [`DecoratedIdealPolygon::to_text`] output or the JSON export.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let perr = |msg: String| GeometryError::Parse { what: "decorated polygon", msg };
        if text.trim_start().starts_with('[') {
            let export: Vec<PointExport> = serde_json::from_str(text).map_err(|e| perr(e.to_string()))?;
            return Self::from_export(&export);
        }
        let mut points = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [pos, horo] = toks[..] else {
                return Err(perr(format!("expected `position horo`, got {line:?}")));
            };
            let horo: f64 = horo.parse().map_err(|_| perr(format!("bad horo {horo:?}")))?;
            let position = if pos == "inf" {
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::Finite(pos.parse().map_err(|_| perr(format!("bad position {pos:?}")))?)
            };
            points.push(DecoratedIdealPoint { position, horo });
        }
        DecoratedIdealPolygon::new(points)
    }

    pub fn from_export(points: &[PointExport]) -> Result<Self, GeometryError> {
        let points = points
            .iter()
            .map(|PointExport(pos, horo)| DecoratedIdealPoint {
                position: match pos {
                    PositionExport::Finite(x) => BoundaryPoint::Finite(*x),
                    PositionExport::Infinity(_) => BoundaryPoint::Infinity,
                },
                horo: *horo,
            })
            .collect();
        DecoratedIdealPolygon::new(points)
    }

    pub fn to_export(&self) -> Vec<PointExport> {
        self.points
            .iter()
            .map(|p| {
                let position = match p.position {
                    BoundaryPoint::Finite(x) => PositionExport::Finite(sig12(x).parse().expect("formatted float")),
                    BoundaryPoint::Infinity => PositionExport::Infinity(Inf),
                };
                PointExport(position, sig12(p.horo).parse().expect("formatted float"))
            })
            .collect()
    }
}

impl fmt::Display for DecoratedIdealPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// JSON export of one vertex: `["inf", 1.0]` or `[0.5, 0.25]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointExport(pub PositionExport, pub f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PositionExport {
    Finite(f64),
    Infinity(Inf),
}

/// The literal string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inf;

impl Serialize for Inf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("inf")
    }
}

impl<'de> Deserialize<'de> for Inf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            Ok(Inf)
        } else {
            Err(serde::de::Error::custom(format!("expected \"inf\", got {s:?}")))
        }
    }
}

/// Plain decimal with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.11}", x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.starts_with("-0.") && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Builds a decorated ideal polygon whose lambda lengths on the sides and
/// diagonals of `t` are `vals`.
///
/// Vertex 1 goes to infinity with height 1 and vertex 2 to 0. The remaining
/// vertices are placed one triangle at a time across the dual tree of `t`.
pub fn realize_polygon(t: &Triangulation, vals: &EdgeValues) -> Result<DecoratedIdealPolygon, GeometryError> {
    let m = t.m();
    let mut lam = BTreeMap::new();
    for c in t.arcs() {
        let v = vals.get(c).ok_or(GeometryError::MissingValue { chord: c })?;
        let f = v.to_f64().filter(|f| f.is_finite() && *f > 0.0);
        lam.insert(c, f.ok_or(GeometryError::BadValue { chord: c, requirement: "positive" })?);
    }
    let l = |a: usize, b: usize| lam[&Chord::new(a, b)];

    let mut placed: Vec<Option<(BoundaryPoint, f64)>> = vec![None; m + 1];
    placed[1] = Some((BoundaryPoint::Infinity, 1.0));
    let l12 = l(1, 2);
    placed[2] = Some((BoundaryPoint::Finite(0.0), 1.0 / (l12 * l12)));

    let triangles = t.triangles();
    let mut by_edge: BTreeMap<Chord, Vec<usize>> = BTreeMap::new();
    for (idx, tri) in triangles.iter().enumerate() {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
            by_edge.entry(Chord::new(a, b)).or_default().push(idx);
        }
    }
    let root = by_edge[&Chord::new(1, 2)][0];
    let mut visited = vec![false; triangles.len()];
    let mut queue = VecDeque::from([(root, Chord::new(1, 2))]);
    visited[root] = true;
    while let Some((idx, via)) = queue.pop_front() {
        let tri = triangles[idx];
        let w = *tri.iter().find(|&&x| !via.has_endpoint(x)).expect("triangle has a third vertex");
        if placed[w].is_none() {
            placed[w] = Some(place_vertex(&placed, via.lo(), via.hi(), w, &l));
        }
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
            let edge = Chord::new(a, b);
            for &next in &by_edge[&edge] {
                if !visited[next] {
                    visited[next] = true;
                    queue.push_back((next, edge));
                }
            }
        }
    }
    let points = placed[1..]
        .iter()
        .map(|p| {
            let (position, horo) = p.expect("dual tree reaches every vertex");
            DecoratedIdealPoint { position, horo }
        })
        .collect();
    DecoratedIdealPolygon::new(points)
}

/// Places `w` from its lambda lengths to the placed vertices `u < v`.
/// Moving away from vertex 1, `w` lies between `u` and `v` in label order.
fn place_vertex(
    placed: &[Option<(BoundaryPoint, f64)>],
    u: usize,
    v: usize,
    w: usize,
    l: &impl Fn(usize, usize) -> f64,
) -> (BoundaryPoint, f64) {
    let get = |i: usize| match placed[i].expect("placed") {
        (BoundaryPoint::Finite(x), d) => (x, d),
        (BoundaryPoint::Infinity, _) => unreachable!("only vertex 1 is at infinity"),
    };
    if u == 1 {
        let (xv, dv) = get(v);
        let l1w = l(1, w);
        let dw = 1.0 / (l1w * l1w);
        let sign = if w > v { 1.0 } else { -1.0 };
        (BoundaryPoint::Finite(xv + sign * l(v, w) * (dv * dw).sqrt()), dw)
    } else {
        let (xu, du) = get(u);
        let (xv, dv) = get(v);
        let a = l(u, w) * du.sqrt();
        let b = l(v, w) * dv.sqrt();
        let s = (xv - xu) / (a + b);
        (BoundaryPoint::Finite(xu + a * s), s * s)
    }
}
