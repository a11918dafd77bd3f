//! Session state and moves, independent of HTTP.

use ptolemy_core::frieze::frieze_from_triangulation;
use ptolemy_core::polygon::{quiver_for_arcs, quiver_from_triangulation, Chord, Triangulation};
use ptolemy_core::{Quiver, QuiverError, Seed, SeedError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

/// Printed cluster variables stop after this many terms.
pub const MAX_PRINTED_TERMS: usize = 200;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    InvalidMove(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<SeedError> for SessionError {
    fn from(e: SeedError) -> Self {
        match e {
            SeedError::Quiver(q @ (QuiverError::InvalidVertex { .. } | QuiverError::FrozenVertex { .. })) => {
                SessionError::InvalidMove(q.to_string())
            }
            other => SessionError::Internal(other.to_string()),
        }
    }
}

/// Body of `POST /sessions`: exactly one of `quiver` or `polygon`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub quiver: Option<Quiver>,
    pub polygon: Option<Triangulation>,
    /// Polygon mode: add the sides as frozen vertices. Defaults to true.
    pub include_boundary: Option<bool>,
}

/// A move: a 1-based vertex, or (polygon mode) a diagonal `[i, j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub vertex: Option<usize>,
    pub diagonal: Option<(usize, usize)>,
}

/// An applied move as recorded in the history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Move {
    pub vertex: usize,
    /// Polygon mode: the diagonal that was flipped away.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
struct Polygon {
    triangulation: Triangulation,
    /// `arcs[i]` is the diagonal or side carried by quiver vertex `i`.
    arcs: Vec<Chord>,
}

#[derive(Debug, Clone)]
pub struct Session {
    initial: Seed,
    seed: Seed,
    polygon: Option<Polygon>,
    history: Vec<Move>,
    last_exchange: Option<String>,
    undo_noop: bool,
}

impl Session {
    pub fn create(req: CreateRequest) -> Result<Session, SessionError> {
        let (seed, polygon) = match (req.quiver, req.polygon) {
            (Some(q), None) => {
                if req.include_boundary.is_some() {
                    return Err(SessionError::Malformed("include_boundary only applies to polygons".into()));
                }
                (Seed::initial(q), None)
            }
            (None, Some(t)) => {
                let tq = quiver_from_triangulation(&t, req.include_boundary.unwrap_or(true));
                (Seed::initial(tq.quiver), Some(Polygon { triangulation: t, arcs: tq.arcs }))
            }
            _ => return Err(SessionError::Malformed("give exactly one of `quiver` or `polygon`".into())),
        };
        Ok(Session { initial: seed.clone(), seed, polygon, history: Vec::new(), last_exchange: None, undo_noop: false })
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    pub fn triangulation(&self) -> Option<&Triangulation> {
        self.polygon.as_ref().map(|p| &p.triangulation)
    }

    fn resolve(&self, mv: MoveRequest) -> Result<usize, SessionError> {
        match (mv.vertex, mv.diagonal, &self.polygon) {
            (Some(v), None, _) => {
                if v == 0 || v > self.seed.quiver().n() {
                    return Err(SessionError::InvalidMove(format!(
                        "vertex {v} is out of range 1..={}",
                        self.seed.quiver().n()
                    )));
                }
                Ok(v - 1)
            }
            (None, Some((a, b)), Some(p)) => {
                if a == b {
                    return Err(SessionError::Malformed(format!("degenerate diagonal {a}-{b}")));
                }
                let d = Chord::new(a, b);
                if !p.triangulation.contains(d) {
                    return Err(SessionError::InvalidMove(format!("{d} is not a diagonal of the triangulation")));
                }
                Ok(p.arcs.iter().position(|&c| c == d).expect("every diagonal has a vertex"))
            }
            (None, Some(_), None) => Err(SessionError::InvalidMove("diagonal moves need a polygon session".into())),
            _ => Err(SessionError::Malformed("give exactly one of `vertex` or `diagonal`".into())),
        }
    }

    /// Mutates at `k`, flipping the matching diagonal in polygon mode.
    fn step(&mut self, k: usize) -> Result<Move, SessionError> {
        let relation = self.seed.exchange_relation(k)?;
        let mut next = self.seed.mutate(k)?;
        let mut diagonal = None;
        let mut polygon = self.polygon.clone();
        if let Some(p) = polygon.as_mut() {
            let d = p.arcs[k];
            let partner = p.triangulation.flip_partner(d).map_err(|e| SessionError::Internal(e.to_string()))?;
            p.triangulation = p.triangulation.flip(d).map_err(|e| SessionError::Internal(e.to_string()))?;
            p.arcs[k] = partner;
            // Arrows between two sides never reach a mutable vertex; the
            // quiver of a triangulation has none.
            next = Seed::new(next.quiver().without_frozen_arrows(), next.vars().to_vec())?;
            let expected = quiver_for_arcs(&p.triangulation, &p.arcs).map_err(|e| SessionError::Internal(e.to_string()))?;
            if &expected != next.quiver() {
                return Err(SessionError::Internal(format!("quiver disagrees with the triangulation after flipping {d}")));
            }
            diagonal = Some((d.lo(), d.hi()));
        }
        self.seed = next;
        self.polygon = polygon;
        self.last_exchange = Some(relation.to_string());
        Ok(Move { vertex: k + 1, diagonal })
    }

    pub fn apply(&mut self, mv: MoveRequest) -> Result<(), SessionError> {
        let k = self.resolve(mv)?;
        let applied = self.step(k)?;
        self.history.push(applied);
        self.undo_noop = false;
        Ok(())
    }

    /// Re-applies the last move, which undoes it since mutation is an involution.
    pub fn undo(&mut self) -> Result<(), SessionError> {
        match self.history.last().copied() {
            None => {
                self.undo_noop = true;
                self.last_exchange = None;
            }
            Some(last) => {
                self.step(last.vertex - 1)?;
                self.history.pop();
                self.undo_noop = false;
            }
        }
        Ok(())
    }

    pub fn returned_to_start(&self) -> bool {
        !self.history.is_empty() && self.seed.equal_up_to_permutation(&self.initial).is_some()
    }

    fn invariant_ok(&self) -> Option<bool> {
        self.polygon
            .as_ref()
            .map(|p| quiver_for_arcs(&p.triangulation, &p.arcs).is_ok_and(|q| &q == self.seed.quiver()))
    }

    pub fn view(&self, id: &str) -> Value {
        let vars: Vec<String> = self.seed.vars().iter().map(|v| v.to_string_truncated(MAX_PRINTED_TERMS)).collect();
        let truncated = self.seed.vars().iter().any(|v| v.num_terms() > MAX_PRINTED_TERMS);
        let (polygon, arcs, frieze) = match &self.polygon {
            Some(p) => {
                let grid = frieze_from_triangulation(&p.triangulation).grid();
                let rows: Vec<Vec<String>> =
                    grid.rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
                let arcs: Vec<String> = p.arcs.iter().map(ToString::to_string).collect();
                (json!(p.triangulation), json!(arcs), json!(rows))
            }
            None => (Value::Null, Value::Null, Value::Null),
        };
        json!({
            "id": id,
            "mode": if self.polygon.is_some() { "polygon" } else { "quiver" },
            "quiver": self.seed.quiver(),
            "vars": vars,
            "polygon": polygon,
            "arcs": arcs,
            "frieze": frieze,
            "history": self.history,
            "last_exchange": self.last_exchange,
            "flags": {
                "returned_to_start": self.returned_to_start(),
                "undo_noop": self.undo_noop,
                "truncated": truncated,
                "invariant_ok": self.invariant_ok(),
            },
        })
    }

    /// Full exact state.
    pub fn export(&self, id: &str) -> Value {
        let vars: Vec<String> = self.seed.vars().iter().map(ToString::to_string).collect();
        let (triangulation, frieze) = match &self.polygon {
            Some(p) => {
                let f = frieze_from_triangulation(&p.triangulation);
                (
                    json!({ "text": p.triangulation.to_text(), "m": p.triangulation.m(), "diagonals": p.triangulation }),
                    json!({ "grid": f.grid().to_text(), "values": f.values() }),
                )
            }
            None => (Value::Null, Value::Null),
        };
        json!({
            "id": id,
            "seed": { "quiver": self.seed.quiver(), "vars": vars },
            "triangulation": triangulation,
            "frieze": frieze,
            "history": self.history,
        })
    }
}
