//! Seeds, the exchange relation, and exchange-graph exploration.
//!
//! Cluster variables are stored as Laurent polynomials in the initial
//! generators `x1..xn`. Every exchange relation divides by the old variable
//! with [`LaurentPoly::div_exact`]; a failed division surfaces as
//! [`SeedError::LaurentViolation`] and means the arithmetic is broken.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly};
use crate::quiver::{Quiver, QuiverError};

pub const DEFAULT_MAX_NODES: usize = 10_000;
pub const DEFAULT_MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("exchange relation at vertex {vertex} is not Laurent")]
    LaurentViolation { vertex: usize },
    #[error("seed has {vars} variables for a quiver on {n} vertices")]
    Shape { n: usize, vars: usize },
    #[error("variable at vertex {vertex}: {source}")]
    Variable { vertex: usize, source: LaurentError },
    #[error("cannot parse seed: {0}")]
    Parse(String),
}

/// A quiver with a cluster variable attached to each vertex.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeedWire", into = "SeedWire")]
pub struct Seed {
    quiver: Quiver,
    vars: Vec<LaurentPoly>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedWire {
    pub quiver: Quiver,
    pub vars: Vec<String>,
}

impl TryFrom<SeedWire> for Seed {
    type Error = SeedError;

    fn try_from(w: SeedWire) -> Result<Self, SeedError> {
        let n = w.quiver.n();
        let vars = w
            .vars
            .iter()
            .enumerate()
            .map(|(i, s)| {
                LaurentPoly::parse(s, n).map_err(|source| SeedError::Variable { vertex: i + 1, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Seed::new(w.quiver, vars)
    }
}

impl From<Seed> for SeedWire {
    fn from(s: Seed) -> Self {
        SeedWire { vars: s.vars.iter().map(ToString::to_string).collect(), quiver: s.quiver }
    }
}

/// The two monomials of an exchange relation at `k`, as vertex exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeRelation {
    pub vertex: usize,
    pub incoming: Vec<(usize, u32)>,
    pub outgoing: Vec<(usize, u32)>,
}

impl fmt::Display for ExchangeRelation {
    /// `x5' = (x1*x3 + x2*x4)/x5`, naming the current variable at vertex
    /// `i` as `xi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn product(factors: &[(usize, u32)]) -> String {
            if factors.is_empty() {
                return "1".into();
            }
            factors
                .iter()
                .map(|&(v, e)| if e == 1 { format!("x{}", v + 1) } else { format!("x{}^{}", v + 1, e) })
                .collect::<Vec<_>>()
                .join("*")
        }
        let k = self.vertex + 1;
        write!(f, "x{k}' = ({} + {})/x{k}", product(&self.incoming), product(&self.outgoing))
    }
}

impl Seed {
    pub fn new(quiver: Quiver, vars: Vec<LaurentPoly>) -> Result<Self, SeedError> {
        let n = quiver.n();
        if vars.len() != n {
            return Err(SeedError::Shape { n, vars: vars.len() });
        }
        for (i, v) in vars.iter().enumerate() {
            if v.nvars() != n {
                return Err(SeedError::Variable {
                    vertex: i + 1,
                    source: LaurentError::DimensionMismatch { left: n, right: v.nvars() },
                });
            }
        }
        Ok(Seed { quiver, vars })
    }

    /// The initial seed: `vars[i] = x_{i+1}`.
    pub fn initial(quiver: Quiver) -> Self {
        let n = quiver.n();
        let vars = (0..n).map(|i| LaurentPoly::generator(n, i)).collect();
        Seed { quiver, vars }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn vars(&self) -> &[LaurentPoly] {
        &self.vars
    }

    pub fn var(&self, v: usize) -> &LaurentPoly {
        &self.vars[v]
    }

    pub fn exchange_relation(&self, k: usize) -> Result<ExchangeRelation, SeedError> {
        self.quiver.check_mutable(k)?;
        let q = &self.quiver;
        let exp = |w: i64| u32::try_from(w).map_err(|_| QuiverError::Overflow { vertex: k + 1 });
        let mut incoming = Vec::new();
        let mut outgoing = Vec::new();
        for i in 0..q.n() {
            if q.b(i, k) > 0 {
                incoming.push((i, exp(q.b(i, k))?));
            }
            if q.b(k, i) > 0 {
                outgoing.push((i, exp(q.b(k, i))?));
            }
        }
        Ok(ExchangeRelation { vertex: k, incoming, outgoing })
    }

    /// Seed mutation at `k`: the quiver mutates and
    /// `u_k' = (prod_{b_ik>0} u_i^b_ik + prod_{b_kj>0} u_j^b_kj) / u_k`.
    pub fn mutate(&self, k: usize) -> Result<Seed, SeedError> {
        let rel = self.exchange_relation(k)?;
        let quiver = self.quiver.mutate(k)?;
        let n = self.quiver.n();
        let product = |factors: &[(usize, u32)]| {
            factors
                .iter()
                .fold(LaurentPoly::one(n), |acc, &(v, e)| &acc * &self.vars[v].pow(e))
        };
        let numerator = &product(&rel.incoming) + &product(&rel.outgoing);
        let new_var = numerator.div_exact(&self.vars[k]).map_err(|e| match e {
            LaurentError::NotDivisible => SeedError::LaurentViolation { vertex: k + 1 },
            source => SeedError::Variable { vertex: k + 1, source },
        })?;
        let mut vars = self.vars.clone();
        vars[k] = new_var;
        Ok(Seed { quiver, vars })
    }

    /// Applies mutations left to right.
    pub fn mutate_sequence(&self, ks: &[usize]) -> Result<Seed, SeedError> {
        let mut s = self.clone();
        for &k in ks {
            s = s.mutate(k)?;
        }
        Ok(s)
    }

    /// Relabels vertices: new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Seed {
        Seed {
            quiver: self.quiver.permuted(perm),
            vars: perm.iter().map(|&p| self.vars[p].clone()).collect(),
        }
    }

    /// Lexicographically least `sigma` with quivers matching under `sigma`
    /// and `self.vars[i] == other.vars[sigma[i]]`.
    pub fn equal_up_to_permutation(&self, other: &Seed) -> Option<Vec<usize>> {
        let mut found = None;
        self.quiver.isomorphisms(&other.quiver, &mut |sigma| {
            if sigma.iter().enumerate().all(|(i, &s)| self.vars[i] == other.vars[s]) {
                found = Some(sigma.to_vec());
                false
            } else {
                true
            }
        });
        found
    }

    /// Canonical representative up to simultaneous relabeling of quiver and
    /// variables: the canonical quiver, then the least variable tuple among
    /// the permutations realizing it. Returns the achieving permutation.
    pub fn canonical(&self) -> (Seed, Vec<usize>) {
        let labelings = self.quiver.canonical_labelings();
        let perm = labelings
            .perms
            .iter()
            .min_by(|a, b| {
                let va = a.iter().map(|&p| &self.vars[p]);
                let vb = b.iter().map(|&p| &self.vars[p]);
                va.cmp(vb)
            })
            .expect("at least one canonical labeling")
            .clone();
        (self.permuted(&perm), perm)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("seed serializes")
    }

    /// The quiver's JSON on the first line, then one variable per line.
    pub fn to_text(&self) -> String {
        let mut out = self.quiver.to_json();
        out.push('\n');
        for v in &self.vars {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    /// Reads [`Seed::to_text`] output, the JSON seed `{"quiver", "vars"}`,
    /// or a bare quiver (giving its initial seed).
    pub fn parse(text: &str) -> Result<Seed, SeedError> {
        let perr = |e: serde_json::Error| SeedError::Parse(e.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines.next().ok_or_else(|| SeedError::Parse("empty input".into()))?;
        let rest: Vec<&str> = lines.collect();
        if !rest.is_empty() && first.trim_start().starts_with('{') && !first.contains("\"vars\"") {
            if let Ok(quiver) = serde_json::from_str::<Quiver>(first) {
                let n = quiver.n();
                let vars = rest
                    .iter()
                    .enumerate()
                    .map(|(i, l)| LaurentPoly::parse(l, n).map_err(|source| SeedError::Variable { vertex: i + 1, source }))
                    .collect::<Result<Vec<_>, _>>()?;
                return Seed::new(quiver, vars);
            }
        }
        let value: serde_json::Value = serde_json::from_str(text).map_err(perr)?;
        if value.get("quiver").is_some() {
            let wire: SeedWire = serde_json::from_value(value).map_err(perr)?;
            Seed::try_from(wire)
        } else {
            Ok(Seed::initial(serde_json::from_value(value).map_err(perr)?))
        }
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Seed")
            .field("quiver", &self.quiver)
            .field("vars", &self.vars.iter().map(ToString::to_string).collect::<Vec<_>>())
            .finish()
    }
}

/// Search limits for [`explore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreLimits {
    pub max_nodes: usize,
    pub max_depth: usize,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits { max_nodes: DEFAULT_MAX_NODES, max_depth: DEFAULT_MAX_DEPTH }
    }
}

/// Seeds up to relabeling, joined by single mutations.
#[derive(Debug, Clone)]
pub struct ExchangeGraph {
    nodes: Vec<Seed>,
    depths: Vec<usize>,
    /// `(from, k, to)` for every mutation of every node that lands on a
    /// discovered node; `k` is in `from`'s labeling.
    arcs: Vec<(usize, usize, usize)>,
    variables: BTreeSet<LaurentPoly>,
    complete: bool,
}

impl ExchangeGraph {
    pub fn nodes(&self) -> &[Seed] {
        &self.nodes
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depths[node]
    }

    pub fn arcs(&self) -> &[(usize, usize, usize)] {
        &self.arcs
    }

    /// Undirected edges, one `(u, k, v)` with `u <= v` per mutation pair.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.arcs.iter().copied().filter(|&(u, _, v)| u <= v)
    }

    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    /// Distinct cluster variables on mutable vertices, in canonical order.
    pub fn variables(&self) -> &BTreeSet<LaurentPoly> {
        &self.variables
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Undirected degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for (u, _, v) in self.edges() {
            deg[u] += 1;
            if u != v {
                deg[v] += 1;
            }
        }
        deg
    }

    /// `nodes=.. edges=.. variables=.. complete=..`
    pub fn summary(&self) -> String {
        format!(
            "nodes={} edges={} variables={} complete={}",
            self.nodes.len(),
            self.num_edges(),
            self.variables.len(),
            self.complete
        )
    }

    pub fn to_export(&self) -> ExchangeGraphExport {
        ExchangeGraphExport {
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, s)| NodeExport { id, depth: self.depths[id], seed: SeedWire::from(s.clone()) })
                .collect(),
            edges: self.edges().map(|(u, k, v)| (u, k + 1, v)).collect(),
            variables: self.variables.iter().map(ToString::to_string).collect(),
            complete: self.complete,
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph exchange {\n");
        for (id, s) in self.nodes.iter().enumerate() {
            let label = s
                .quiver()
                .mutable_vertices()
                .map(|v| s.var(v).to_string())
                .collect::<Vec<_>>()
                .join("\\n");
            let _ = writeln!(out, "  {id} [label=\"{label}\"];");
        }
        for (u, k, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v} [label=\"{}\"];", k + 1);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeExport {
    pub id: usize,
    pub depth: usize,
    pub seed: SeedWire,
}

/// Serialized exchange graph; edges carry 1-based vertex labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExchangeGraphExport {
    pub nodes: Vec<NodeExport>,
    pub edges: Vec<(usize, usize, usize)>,
    pub variables: Vec<String>,
    pub complete: bool,
}

/// Breadth-first closure of seed mutation from `start`, deduplicating seeds
/// up to simultaneous relabeling.
///
/// Each level's mutations run in parallel; discoveries are merged in
/// `(node id, vertex)` order so the result does not depend on scheduling.
/// Hitting either limit leaves `complete == false`.
pub fn explore(start: &Seed, limits: ExploreLimits) -> Result<ExchangeGraph, SeedError> {
    let (root, _) = start.canonical();
    let mut index: HashMap<Seed, usize> = HashMap::new();
    index.insert(root.clone(), 0);
    let mut graph = ExchangeGraph {
        nodes: vec![root],
        depths: vec![0],
        arcs: Vec::new(),
        variables: BTreeSet::new(),
        complete: true,
    };
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let expansions: Vec<Vec<(usize, Seed)>> = frontier
            .par_iter()
            .map(|&u| {
                let seed = &graph.nodes[u];
                seed.quiver()
                    .mutable_vertices()
                    .map(|k| Ok((k, seed.mutate(k)?.canonical().0)))
                    .collect::<Result<Vec<_>, SeedError>>()
            })
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for (&u, found) in frontier.iter().zip(expansions) {
            for (k, seed) in found {
                if let Some(&v) = index.get(&seed) {
                    graph.arcs.push((u, k, v));
                } else if graph.depths[u] >= limits.max_depth || graph.nodes.len() >= limits.max_nodes {
                    graph.complete = false;
                } else {
                    let v = graph.nodes.len();
                    index.insert(seed.clone(), v);
                    graph.nodes.push(seed);
                    graph.depths.push(graph.depths[u] + 1);
                    graph.arcs.push((u, k, v));
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    for s in &graph.nodes {
        for v in s.quiver().mutable_vertices() {
            graph.variables.insert(s.var(v).clone());
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_round_trip() {
        let s = a2().mutate(0).unwrap();
        let text = s.to_text();
        assert_eq!(text, "{\"n\":2,\"frozen\":[],\"b\":[[0,-1],[1,0]]}\nx1^-1*x2 + x1^-1\nx2\n");
        assert_eq!(Seed::parse(&text).unwrap(), s);
        assert_eq!(Seed::parse(&s.to_json()).unwrap(), s);
        assert_eq!(Seed::parse(&Quiver::path(2).to_json()).unwrap(), a2());
        assert!(matches!(Seed::parse("{\"n\":2}"), Err(SeedError::Parse(_))));
        assert!(matches!(Seed::parse(""), Err(SeedError::Parse(_))));
        let bad = "{\"n\":2,\"frozen\":[],\"b\":[[0,1],[-1,0]]}\nx1\nx3\n";
        assert!(matches!(Seed::parse(bad), Err(SeedError::Variable { vertex: 2, .. })));
    }

    fn lp(s: &str, n: usize) -> LaurentPoly {
        LaurentPoly::parse(s, n).unwrap()
    }

    fn a2() -> Seed {
        Seed::initial(Quiver::path(2))
    }

    /// 1 -> 5 -> 2, 3 -> 5 -> 4, closing triangles 2 -> 1 and 4 -> 3.
    fn example_two() -> Seed {
        let q = Quiver::from_arrows(5, &[(0, 4, 1), (4, 1, 1), (1, 0, 1), (2, 4, 1), (4, 3, 1), (3, 2, 1)])
            .unwrap();
        Seed::initial(q)
    }

    #[test]
    fn example_two_exchange() {
        let s = example_two().mutate(4).unwrap();
        assert_eq!(s.var(4), &lp("x1*x3*x5^-1 + x2*x4*x5^-1", 5));
        assert_eq!(example_two().exchange_relation(4).unwrap().to_string(), "x5' = (x1*x3 + x2*x4)/x5");
    }

    #[test]
    fn a2_first_mutation() {
        let s = a2().mutate(0).unwrap();
        assert_eq!(s.var(0), &lp("x1^-1*x2 + x1^-1", 2));
        assert_eq!(s.var(1), &lp("x2", 2));
    }

    #[test]
    fn arrowless_mutation() {
        let s = Seed::initial(Quiver::empty(2)).mutate(0).unwrap();
        assert_eq!(s.var(0), &lp("2*x1^-1", 2));
        assert_eq!(s.var(1), &lp("x2", 2));
    }

    #[test]
    fn sequences() {
        assert_eq!(a2().mutate_sequence(&[0, 0]).unwrap(), a2());
        let s = a2().mutate_sequence(&[0, 1]).unwrap();
        assert_eq!(s.var(0), &lp("x1^-1*x2 + x1^-1", 2));
        assert_eq!(s.var(1), &lp("x1^-1*x2^-1 + x2^-1 + x1^-1", 2));
        let back = a2().mutate_sequence(&[0, 1, 0, 1, 0]).unwrap();
        assert_ne!(back, a2());
        assert_eq!(back.equal_up_to_permutation(&a2()), Some(vec![1, 0]));
    }

    #[test]
    fn pentagon_with_tracked_permutation() {
        // After [1,2,1,2,1] the seed is the initial one with 1 and 2 swapped;
        // replaying the sequence through that swap closes the loop exactly.
        let s = a2().mutate_sequence(&[0, 1, 0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
        assert_eq!(s, a2());
    }

    #[test]
    fn seed_permutation_equality() {
        assert_eq!(a2().equal_up_to_permutation(&a2()), Some(vec![0, 1]));
        assert_eq!(a2().equal_up_to_permutation(&a2().mutate(0).unwrap()), None);
    }

    #[test]
    fn frozen_vertex_rejected() {
        let s = Seed::initial(Quiver::path(2).with_frozen(&[1]).unwrap());
        assert_eq!(s.mutate(1), Err(SeedError::Quiver(QuiverError::FrozenVertex { vertex: 2 })));
        // The frozen generator still enters the exchange relation.
        assert_eq!(s.mutate(0).unwrap().var(0), &lp("x1^-1*x2 + x1^-1", 2));
    }

    #[test]
    fn explore_a2_pentagon() {
        let g = explore(&a2(), ExploreLimits::default()).unwrap();
        assert_eq!(g.summary(), "nodes=5 edges=5 variables=5 complete=true");
        assert!(g.degrees().iter().all(|&d| d == 2));
        let expected: BTreeSet<_> = ["x1", "x2", "x1^-1*x2 + x1^-1", "x2^-1*x1 + x2^-1", "x1^-1*x2^-1 + x2^-1 + x1^-1"]
            .iter()
            .map(|s| lp(s, 2))
            .collect();
        assert_eq!(g.variables(), &expected);
    }

    #[test]
    fn explore_arrowless_square() {
        let g = explore(&Seed::initial(Quiver::empty(2)), ExploreLimits::default()).unwrap();
        assert_eq!(g.summary(), "nodes=4 edges=4 variables=4 complete=true");
        let expected: BTreeSet<_> = ["x1", "x2", "2*x1^-1", "2*x2^-1"].iter().map(|s| lp(s, 2)).collect();
        assert_eq!(g.variables(), &expected);
        assert!(g.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn explore_a3() {
        let g = explore(&Seed::initial(Quiver::path(3)), ExploreLimits::default()).unwrap();
        assert_eq!(g.nodes().len(), 14);
        assert!(g.is_complete());
        assert_eq!(g.variables().len(), 9);
        assert!(g.degrees().iter().all(|&d| d == 3));
    }

    #[test]
    fn explore_markov_hits_limits() {
        let markov = Quiver::from_arrows(3, &[(0, 1, 2), (1, 2, 2), (2, 0, 2)]).unwrap();
        let g = explore(&Seed::initial(markov), ExploreLimits { max_nodes: 50, max_depth: 3 }).unwrap();
        assert!(!g.is_complete());
        assert!(g.nodes().len() <= 50);
        assert!(g.nodes().iter().enumerate().all(|(i, _)| g.depth(i) <= 3));
    }

    #[test]
    fn explore_is_relabeling_invariant() {
        let a = explore(&Seed::initial(Quiver::path(3)), ExploreLimits::default()).unwrap();
        let relabeled = Seed::initial(Quiver::path(3).permuted(&[2, 0, 1]));
        let b = explore(&relabeled, ExploreLimits::default()).unwrap();
        assert_eq!(a.summary(), b.summary());
    }

    #[test]
    fn seed_wire_round_trip() {
        let s = a2().mutate_sequence(&[0, 1]).unwrap();
        let json = s.to_json();
        assert_eq!(
            json,
            r#"{"quiver":{"n":2,"frozen":[],"b":[[0,1],[-1,0]]},"vars":["x1^-1*x2 + x1^-1","x2^-1 + x1^-1 + x1^-1*x2^-1"]}"#
        );
        let back: Seed = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Seed>(r#"{"quiver":{"n":1,"b":[[0]]},"vars":[]}"#).is_err());
    }

    #[test]
    fn export_and_dot() {
        let g = explore(&a2(), ExploreLimits::default()).unwrap();
        let export = g.to_export();
        assert_eq!(export.nodes.len(), 5);
        assert_eq!(export.edges.len(), 5);
        assert!(export.edges.iter().all(|&(_, k, _)| k == 1 || k == 2));
        let dot = g.to_dot();
        assert!(dot.starts_with("graph exchange {"));
        assert_eq!(dot.matches(" -- ").count(), 5);
    }
}
