//! Quivers without loops or 2-cycles, stored as skew-symmetric exchange
//! matrices, and the mutation `mu_k`.
//!
//! Vertices are 0-based in this API. Text formats (JSON wire format, DOT,
//! CLI flags) use the 1-based labels `1..=n`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("vertex {vertex} is out of range for a quiver on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("vertex {vertex} is frozen")]
    FrozenVertex { vertex: usize },
    #[error("exchange matrix must be {n}x{n}")]
    Shape { n: usize },
    #[error("b[{i}][{i}] must be zero (no loops)")]
    Loop { i: usize },
    #[error("b[{i}][{j}] != -b[{j}][{i}] (matrix must be skew-symmetric)")]
    NotSkewSymmetric { i: usize, j: usize },
    #[error("arrow multiplicity overflow while mutating at vertex {vertex}")]
    Overflow { vertex: usize },
}

/// A quiver on `n` vertices: `b[i][j]` arrows `i -> j`, negative meaning
/// arrows `j -> i`. Frozen vertices are never mutated.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QuiverWire", into = "QuiverWire")]
pub struct Quiver {
    n: usize,
    b: Vec<i64>,
    frozen: Vec<bool>,
}

/// JSON wire form: `{ "n": int, "frozen": [ints], "b": [[ints]] }` with
/// 1-based frozen labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuiverWire {
    pub n: usize,
    #[serde(default)]
    pub frozen: Vec<usize>,
    pub b: Vec<Vec<i64>>,
}

impl TryFrom<QuiverWire> for Quiver {
    type Error = QuiverError;

    fn try_from(w: QuiverWire) -> Result<Self, Self::Error> {
        if w.b.len() != w.n {
            return Err(QuiverError::Shape { n: w.n });
        }
        let mut frozen = Vec::with_capacity(w.frozen.len());
        for &label in &w.frozen {
            if label == 0 || label > w.n {
                return Err(QuiverError::InvalidVertex { vertex: label, n: w.n });
            }
            frozen.push(label - 1);
        }
        Quiver::from_matrix(&w.b, &frozen)
    }
}

impl From<Quiver> for QuiverWire {
    fn from(q: Quiver) -> Self {
        QuiverWire { n: q.n, frozen: q.frozen_vertices().map(|v| v + 1).collect(), b: q.matrix() }
    }
}

impl Quiver {
    /// A quiver with no arrows.
    pub fn empty(n: usize) -> Self {
        Quiver { n, b: vec![0; n * n], frozen: vec![false; n] }
    }

    /// Validates and wraps a square skew-symmetric matrix.
    pub fn from_matrix(rows: &[Vec<i64>], frozen: &[usize]) -> Result<Self, QuiverError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(QuiverError::Shape { n });
        }
        for i in 0..n {
            if rows[i][i] != 0 {
                return Err(QuiverError::Loop { i: i + 1 });
            }
            for j in (i + 1)..n {
                if rows[i][j] != -rows[j][i] {
                    return Err(QuiverError::NotSkewSymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        let mut q = Quiver { n, b: rows.concat(), frozen: vec![false; n] };
        for &v in frozen {
            if v >= n {
                return Err(QuiverError::InvalidVertex { vertex: v + 1, n });
            }
            q.frozen[v] = true;
        }
        Ok(q)
    }

    /// Builds a quiver from `(from, to, multiplicity)` arrows; opposite
    /// arrows cancel.
    pub fn from_arrows(n: usize, arrows: &[(usize, usize, i64)]) -> Result<Self, QuiverError> {
        let mut q = Self::empty(n);
        for &(i, j, w) in arrows {
            for v in [i, j] {
                if v >= n {
                    return Err(QuiverError::InvalidVertex { vertex: v + 1, n });
                }
            }
            if i == j {
                return Err(QuiverError::Loop { i: i + 1 });
            }
            q.b[i * n + j] += w;
            q.b[j * n + i] -= w;
        }
        Ok(q)
    }

    /// Linearly oriented type A path `1 -> 2 -> ... -> n`.
    pub fn path(n: usize) -> Self {
        let arrows: Vec<_> = (1..n).map(|i| (i - 1, i, 1)).collect();
        Self::from_arrows(n, &arrows).expect("path arrows are in range")
    }

    pub fn with_frozen(mut self, frozen: &[usize]) -> Result<Self, QuiverError> {
        for &v in frozen {
            if v >= self.n {
                return Err(QuiverError::InvalidVertex { vertex: v + 1, n: self.n });
            }
            self.frozen[v] = true;
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn b(&self, i: usize, j: usize) -> i64 {
        self.b[i * self.n + j]
    }

    pub fn matrix(&self) -> Vec<Vec<i64>> {
        self.b.chunks(self.n.max(1)).take(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn is_frozen(&self, v: usize) -> bool {
        self.frozen.get(v).copied().unwrap_or(false)
    }

    pub fn frozen_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| self.frozen[v])
    }

    pub fn mutable_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| !self.frozen[v])
    }

    pub fn num_mutable(&self) -> usize {
        self.frozen.iter().filter(|f| !**f).count()
    }

    pub fn check_mutable(&self, k: usize) -> Result<(), QuiverError> {
        if k >= self.n {
            return Err(QuiverError::InvalidVertex { vertex: k + 1, n: self.n });
        }
        if self.frozen[k] {
            return Err(QuiverError::FrozenVertex { vertex: k + 1 });
        }
        Ok(())
    }

    /// Mutation at `k`: arrows at `k` reverse, and every path `i -> k -> j`
    /// adds `b_ik * b_kj` arrows `i -> j`.
    pub fn mutate(&self, k: usize) -> Result<Quiver, QuiverError> {
        self.check_mutable(k)?;
        let n = self.n;
        let overflow = || QuiverError::Overflow { vertex: k + 1 };
        let mut b = self.b.clone();
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                if i == k || j == k {
                    b[idx] = -self.b[idx];
                    continue;
                }
                let bik = self.b(i, k);
                let bkj = self.b(k, j);
                // (|b_ik| b_kj + b_ik |b_kj|) / 2 is b_ik*b_kj when both are
                // positive, -b_ik*b_kj when both are negative, 0 otherwise.
                let delta = if bik > 0 && bkj > 0 {
                    bik.checked_mul(bkj).ok_or_else(overflow)?
                } else if bik < 0 && bkj < 0 {
                    bik.checked_mul(bkj).and_then(i64::checked_neg).ok_or_else(overflow)?
                } else {
                    0
                };
                b[idx] = b[idx].checked_add(delta).ok_or_else(overflow)?;
            }
        }
        Ok(Quiver { n, b, frozen: self.frozen.clone() })
    }

    /// Quiver with vertices relabeled: new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Quiver {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        let mut b = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                b[i * n + j] = self.b(perm[i], perm[j]);
            }
        }
        let frozen = perm.iter().map(|&p| self.frozen[p]).collect();
        Quiver { n, b, frozen }
    }

    /// Copy with every arrow between two frozen vertices removed.
    pub fn without_frozen_arrows(&self) -> Quiver {
        let mut q = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.frozen[i] && self.frozen[j] {
                    q.b[i * self.n + j] = 0;
                }
            }
        }
        q
    }

    /// Lexicographically least `sigma` with `self.b[i][j] == other.b[sigma[i]][sigma[j]]`
    /// and frozen vertices mapped to frozen vertices.
    pub fn equal_up_to_permutation(&self, other: &Quiver) -> Option<Vec<usize>> {
        let mut found = None;
        self.isomorphisms(other, &mut |sigma| {
            found = Some(sigma.to_vec());
            false
        });
        found
    }

    /// Visits isomorphisms `self -> other` in lexicographic order until the
    /// callback returns `false`.
    pub fn isomorphisms(&self, other: &Quiver, visit: &mut dyn FnMut(&[usize]) -> bool) {
        if self.n != other.n
            || self.frozen.iter().filter(|f| **f).count() != other.frozen.iter().filter(|f| **f).count()
        {
            return;
        }
        let mut sigma = Vec::with_capacity(self.n);
        let mut used = vec![false; self.n];
        self.iso_search(other, &mut sigma, &mut used, visit);
    }

    fn iso_search(
        &self,
        other: &Quiver,
        sigma: &mut Vec<usize>,
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let i = sigma.len();
        if i == self.n {
            return visit(sigma);
        }
        for cand in 0..self.n {
            if used[cand] || self.frozen[i] != other.frozen[cand] {
                continue;
            }
            let consistent = sigma.iter().enumerate().all(|(p, &sp)| self.b(p, i) == other.b(sp, cand));
            if !consistent {
                continue;
            }
            used[cand] = true;
            sigma.push(cand);
            let go_on = self.iso_search(other, sigma, used, visit);
            sigma.pop();
            used[cand] = false;
            if !go_on {
                return false;
            }
        }
        true
    }

    /// Canonical representative under relabelings of the mutable vertices
    /// (frozen vertices keep their index), with one achieving permutation
    /// (`canonical = self.permuted(perm)`).
    ///
    /// The representative minimizes the upper triangle read column by
    /// column: `b[0][1], b[0][2], b[1][2], b[0][3], ...`. Skew-symmetry makes
    /// that sequence determine the matrix.
    pub fn canonical_form(&self) -> (Quiver, Vec<usize>) {
        let labeling = self.canonical_labelings();
        let perm = labeling.perms[0].clone();
        (self.permuted(&perm), perm)
    }

    /// All permutations achieving the canonical matrix, in lexicographic
    /// order. They form a coset of the quiver's automorphism group.
    pub fn canonical_labelings(&self) -> CanonicalLabelings {
        let n = self.n;
        let mut search = CanonSearch {
            q: self,
            best: None,
            perms: Vec::new(),
            key: Vec::with_capacity(n * n.saturating_sub(1) / 2),
            perm: Vec::with_capacity(n),
            used: vec![false; n],
        };
        search.run();
        CanonicalLabelings { key: search.best.unwrap_or_default(), perms: search.perms }
    }

    /// Graphviz rendering; frozen vertices are drawn as boxes and weights
    /// above one are shown as edge labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph quiver {\n");
        for v in 0..self.n {
            if self.frozen[v] {
                let _ = writeln!(out, "  {} [shape=box, style=dashed];", v + 1);
            } else {
                let _ = writeln!(out, "  {};", v + 1);
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let w = self.b(i, j);
                if w == 1 {
                    let _ = writeln!(out, "  {} -> {};", i + 1, j + 1);
                } else if w > 1 {
                    let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", i + 1, j + 1, w);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("quiver serializes")
    }
}

impl std::fmt::Debug for Quiver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Quiver")
            .field("n", &self.n)
            .field("frozen", &self.frozen_vertices().collect::<Vec<_>>())
            .field("b", &self.matrix())
            .finish()
    }
}

/// Result of canonical labeling: the minimal key and every permutation
/// reaching it.
#[derive(Debug, Clone)]
pub struct CanonicalLabelings {
    pub key: Vec<i64>,
    pub perms: Vec<Vec<usize>>,
}

struct CanonSearch<'a> {
    q: &'a Quiver,
    best: Option<Vec<i64>>,
    perms: Vec<Vec<usize>>,
    key: Vec<i64>,
    perm: Vec<usize>,
    used: Vec<bool>,
}

impl CanonSearch<'_> {
    fn run(&mut self) {
        let j = self.perm.len();
        let n = self.q.n;
        if j == n {
            match self.best.as_ref().map(|b| self.key.cmp(b)) {
                None | Some(Ordering::Less) => {
                    self.best = Some(self.key.clone());
                    self.perms.clear();
                    self.perms.push(self.perm.clone());
                }
                Some(Ordering::Equal) => self.perms.push(self.perm.clone()),
                Some(Ordering::Greater) => {}
            }
            return;
        }
        let candidates: Vec<usize> = if self.q.frozen[j] {
            vec![j]
        } else {
            (0..n).filter(|&v| !self.used[v] && !self.q.frozen[v]).collect()
        };
        for v in candidates {
            let start = self.key.len();
            for i in 0..j {
                self.key.push(self.q.b(self.perm[i], v));
            }
            let prune = self
                .best
                .as_ref()
                .is_some_and(|b| self.key[..] > b[..self.key.len()]);
            if !prune {
                self.used[v] = true;
                self.perm.push(v);
                self.run();
                self.perm.pop();
                self.used[v] = false;
            }
            self.key.truncate(start);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> Quiver {
        Quiver::from_arrows(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap()
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn mutate_three_cycle_at_two() {
        let m = three_cycle().mutate(1).unwrap();
        // 2 -> 1, 3 -> 2, nothing between 1 and 3.
        assert_eq!(m.b(1, 0), 1);
        assert_eq!(m.b(2, 1), 1);
        assert_eq!(m.b(0, 2), 0);
        assert_eq!(m.matrix(), vec![vec![0, -1, 0], vec![1, 0, -1], vec![0, 1, 0]]);
    }

    #[test]
    fn path_composition_rule() {
        // i -> k with p arrows, k -> j with q arrows, r arrows j -> i.
        for p in 1..4 {
            for q in 1..4 {
                for r in 0..5 {
                    let quiver = Quiver::from_arrows(3, &[(0, 1, p), (1, 2, q), (2, 0, r)]).unwrap();
                    let m = quiver.mutate(1).unwrap();
                    // r' counts arrows i -> j after mutation; r + r' = pq.
                    let r_new = m.b(0, 2);
                    assert_eq!(r + r_new, p * q);
                }
            }
        }
    }

    #[test]
    fn single_arrow_flips() {
        let q = Quiver::from_arrows(2, &[(0, 1, 1)]).unwrap();
        assert_eq!(q.mutate(0).unwrap().b(1, 0), 1);
    }

    #[test]
    fn mutate_rejects_frozen_and_out_of_range() {
        let q = Quiver::path(3).with_frozen(&[2]).unwrap();
        assert_eq!(q.mutate(2), Err(QuiverError::FrozenVertex { vertex: 3 }));
        assert_eq!(q.mutate(5), Err(QuiverError::InvalidVertex { vertex: 6, n: 3 }));
        let m = q.mutate(1).unwrap();
        assert!(m.is_frozen(2));
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX / 2;
        let q = Quiver::from_arrows(3, &[(0, 1, big), (1, 2, big)]).unwrap();
        assert_eq!(q.mutate(1), Err(QuiverError::Overflow { vertex: 2 }));
    }

    #[test]
    fn validation() {
        assert!(matches!(Quiver::from_matrix(&[vec![1]], &[]), Err(QuiverError::Loop { .. })));
        assert!(matches!(
            Quiver::from_matrix(&[vec![0, 1], vec![1, 0]], &[]),
            Err(QuiverError::NotSkewSymmetric { .. })
        ));
        assert!(matches!(Quiver::from_matrix(&[vec![0, 1]], &[]), Err(QuiverError::Shape { .. })));
    }

    #[test]
    fn permutation_equivalence() {
        let a = Quiver::from_arrows(2, &[(0, 1, 1)]).unwrap();
        let b = Quiver::from_arrows(2, &[(1, 0, 1)]).unwrap();
        assert_eq!(a.equal_up_to_permutation(&b), Some(vec![1, 0]));
        assert_eq!(a.equal_up_to_permutation(&a), Some(vec![0, 1]));
        assert_eq!(three_cycle().equal_up_to_permutation(&Quiver::path(3)), None);
        assert_eq!(a.equal_up_to_permutation(&Quiver::path(3)), None);
    }

    #[test]
    fn permutation_equivalence_is_lexicographically_least() {
        // The 3-cycle has the three rotations as automorphisms.
        let c = three_cycle();
        assert_eq!(c.equal_up_to_permutation(&c), Some(vec![0, 1, 2]));
        let mut all = Vec::new();
        c.isomorphisms(&c, &mut |s| {
            all.push(s.to_vec());
            true
        });
        assert_eq!(all, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
    }

    #[test]
    fn frozen_must_map_to_frozen() {
        let a = Quiver::from_arrows(2, &[(0, 1, 1)]).unwrap().with_frozen(&[0]).unwrap();
        let b = Quiver::from_arrows(2, &[(1, 0, 1)]).unwrap().with_frozen(&[0]).unwrap();
        assert_eq!(a.equal_up_to_permutation(&b), None);
        let c = Quiver::from_arrows(2, &[(1, 0, 1)]).unwrap().with_frozen(&[1]).unwrap();
        assert_eq!(a.equal_up_to_permutation(&c), Some(vec![1, 0]));
    }

    #[test]
    fn canonical_two_vertex() {
        let a = Quiver::from_arrows(2, &[(0, 1, 1)]).unwrap();
        let b = Quiver::from_arrows(2, &[(1, 0, 1)]).unwrap();
        assert_eq!(a.canonical_form().0, b.canonical_form().0);
    }

    #[test]
    fn canonical_three_cycle_over_all_relabelings() {
        let c = three_cycle();
        // Brute-force oracle: least key over all 6 relabelings.
        let key = |q: &Quiver| vec![q.b(0, 1), q.b(0, 2), q.b(1, 2)];
        let oracle = all_perms(3).iter().map(|p| key(&c.permuted(p))).min().unwrap();
        for p in all_perms(3) {
            let (canon, perm) = c.permuted(&p).canonical_form();
            assert_eq!(key(&canon), oracle);
            assert_eq!(canon, c.permuted(&p).permuted(&perm));
        }
    }

    #[test]
    fn canonical_all_frozen_unchanged() {
        let q = Quiver::from_arrows(3, &[(2, 0, 2), (1, 2, 1)]).unwrap().with_frozen(&[0, 1, 2]).unwrap();
        let (canon, perm) = q.canonical_form();
        assert_eq!(canon, q);
        assert_eq!(perm, vec![0, 1, 2]);
    }

    #[test]
    fn wire_format_uses_one_based_frozen_labels() {
        let q = Quiver::path(3).with_frozen(&[2]).unwrap();
        let json = q.to_json();
        assert_eq!(json, r#"{"n":3,"frozen":[3],"b":[[0,1,0],[-1,0,1],[0,-1,0]]}"#);
        let back: Quiver = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<Quiver>(r#"{"n":2,"frozen":[0],"b":[[0,1],[-1,0]]}"#).is_err());
    }

    #[test]
    fn dot_export() {
        let q = Quiver::from_arrows(3, &[(0, 1, 1), (2, 1, 2)]).unwrap().with_frozen(&[2]).unwrap();
        let dot = q.to_dot();
        assert!(dot.contains("  1 -> 2;\n"));
        assert!(dot.contains("  3 -> 2 [label=\"2\"];\n"));
        assert!(dot.contains("  3 [shape=box, style=dashed];\n"));
        assert!(!dot.contains("2 -> 1"));
    }
}
