//! Plücker coordinates of 2×n matrices and the three-term Plücker relation.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::polygon::{Chord, EdgeValues, GeometryError};

/// All 2×2 minors `p_ij = a_1i·a_2j − a_1j·a_2i`, `1 <= i < j <= n`.
pub fn pluecker_from_matrix(rows: &[Vec<BigRational>]) -> Result<EdgeValues, GeometryError> {
    let [top, bottom] = rows else {
        return Err(GeometryError::MatrixShape);
    };
    let n = top.len();
    if n < 2 || bottom.len() != n {
        return Err(GeometryError::MatrixShape);
    }
    let mut out = EdgeValues::new();
    let mut all_zero = true;
    for i in 0..n {
        for j in i + 1..n {
            let p = &top[i] * &bottom[j] - &top[j] * &bottom[i];
            all_zero &= p.is_zero();
            out.insert(Chord::new(i + 1, j + 1), p);
        }
    }
    if all_zero {
        return Err(GeometryError::DegenerateSubspace);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlueckerReport {
    pub n: usize,
    pub checked: usize,
    /// Quadruples `[i, j, k, l]`, `i < j < k < l`, where the relation fails.
    pub violations: Vec<[usize; 4]>,
}

impl PlueckerReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `p_ik·p_jl = p_ij·p_kl + p_il·p_jk` for every `i < j < k < l`.
/// `n` is the largest label present; every pair below it must have a value.
pub fn verify_pluecker(p: &EdgeValues) -> Result<PlueckerReport, GeometryError> {
    let n = p.iter().map(|(c, _)| c.hi()).max().unwrap_or(0);
    let get = |a: usize, b: usize| p.get(Chord::new(a, b)).ok_or(GeometryError::MissingValue { chord: Chord::new(a, b) });
    for i in 1..=n {
        for j in i + 1..=n {
            get(i, j)?;
        }
    }
    let mut checked = 0;
    let mut violations = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    checked += 1;
                    let lhs = get(i, k)? * get(j, l)?;
                    let rhs = get(i, j)? * get(k, l)? + get(i, l)? * get(j, k)?;
                    if lhs != rhs {
                        violations.push([i, j, k, l]);
                    }
                }
            }
        }
    }
    Ok(PlueckerReport { n, checked, violations })
}

/// Parses a matrix written as whitespace-separated rationals, one row per line.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<BigRational>>, GeometryError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split_whitespace()
                .map(|t| {
                    t.parse::<BigRational>()
                        .map_err(|_| GeometryError::Parse { what: "matrix", msg: format!("bad entry {t:?}") })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn row(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn small_minors() {
        let p = pluecker_from_matrix(&[row(&[1, 1, 1]), row(&[0, 1, 2])]).unwrap();
        assert_eq!(p.get(Chord::new(1, 2)), Some(&q(1)));
        assert_eq!(p.get(Chord::new(1, 3)), Some(&q(2)));
        assert_eq!(p.get(Chord::new(2, 3)), Some(&q(1)));

        let e = pluecker_from_matrix(&[row(&[1, 0, 0, 0]), row(&[0, 1, 0, 0])]).unwrap();
        assert_eq!(e.iter().filter(|(_, v)| !v.is_zero()).count(), 1);
        assert_eq!(e.get(Chord::new(1, 2)), Some(&q(1)));
    }

    #[test]
    fn scaling_a_row_scales_every_minor() {
        let a = pluecker_from_matrix(&[row(&[2, -1, 3, 5]), row(&[1, 4, -2, 7])]).unwrap();
        let b = pluecker_from_matrix(&[row(&[2, -1, 3, 5]), row(&[3, 12, -6, 21])]).unwrap();
        for (c, v) in a.iter() {
            assert_eq!(b.get(c).unwrap(), &(v * q(3)));
        }
    }

    #[test]
    fn degenerate_and_malformed() {
        assert!(matches!(pluecker_from_matrix(&[row(&[1, 2, 3]), row(&[2, 4, 6])]), Err(GeometryError::DegenerateSubspace)));
        assert!(matches!(pluecker_from_matrix(&[row(&[1, 2])]), Err(GeometryError::MatrixShape)));
        assert!(matches!(pluecker_from_matrix(&[row(&[1, 2]), row(&[1])]), Err(GeometryError::MatrixShape)));
    }

    #[test]
    fn verification() {
        let p = pluecker_from_matrix(&[row(&[3, -1, 4, 1, -5, 9]), row(&[2, 6, -5, 3, 5, 8])]).unwrap();
        let report = verify_pluecker(&p).unwrap();
        assert_eq!(report.checked, 15);
        assert!(report.ok());

        let ones: EdgeValues = (1..=5).flat_map(|i| (i + 1..=5).map(move |j| (Chord::new(i, j), q(1)))).collect();
        assert_eq!(verify_pluecker(&ones).unwrap().violations.len(), 5);

        let mut quad = ones.restrict((1..=4).flat_map(|i| (i + 1..=4).map(move |j| Chord::new(i, j))));
        quad.insert(Chord::new(1, 3), q(2));
        assert!(verify_pluecker(&quad).unwrap().ok());

        let mut missing = EdgeValues::new();
        missing.insert(Chord::new(1, 3), q(1));
        assert!(matches!(verify_pluecker(&missing), Err(GeometryError::MissingValue { .. })));
    }

    #[test]
    fn matrix_text() {
        let m = parse_matrix("1 1/2 -3\n0 1 2\n").unwrap();
        assert_eq!(m[0][1], BigRational::new(1.into(), 2.into()));
        assert!(parse_matrix("1 x").is_err());
    }
}
