//! Ptolemy's theorem and inequality for four points in the plane.

use serde::Serialize;

use crate::polygon::GeometryError;

/// Residual below which four points count as concyclic.
pub const CYCLIC_TOLERANCE: f64 = 1e-9;

pub type Point = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EuclideanReport {
    /// `AB·CD + BC·AD − AC·BD`; never negative beyond rounding.
    pub residual: f64,
    pub cyclic: bool,
}

fn dist(p: Point, q: Point) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

/// Points `A, B, C, D` in convex position order.
pub fn verify_ptolemy_euclidean(pts: [Point; 4]) -> Result<EuclideanReport, GeometryError> {
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Err(GeometryError::CoincidentPoints(i + 1, j + 1));
            }
        }
    }
    let [a, b, c, d] = pts;
    let residual = dist(a, b) * dist(c, d) + dist(b, c) * dist(a, d) - dist(a, c) * dist(b, d);
    Ok(EuclideanReport { residual, cyclic: residual.abs() <= CYCLIC_TOLERANCE })
}
