//! Exact cluster-algebra mutation and its geometric models.
//!
//! - [`laurent`]: Laurent polynomials over the integers with exact division.
//! - [`quiver`]: skew-symmetric exchange matrices and mutation.
//! - [`seed`]: seeds, exchange relations and exchange graphs.
//! - [`polygon`]: triangulations, flips, quivers of triangulations and
//!   Ptolemy propagation.
//! - [`pluecker`]: Plücker coordinates of 2×n matrices.
//! - [`euclidean`]: Ptolemy's theorem and inequality in the plane.
//! - [`hyperbolic`]: decorated ideal points, lambda lengths and polygon
//!   realization.
//! - [`frieze`]: Conway-Coxeter frieze patterns.

pub mod euclidean;
pub mod frieze;
pub mod hyperbolic;
pub mod laurent;
pub mod pluecker;
pub mod polygon;
pub mod quiver;
pub mod seed;

pub use frieze::{Frieze, FriezeError, FriezeGrid};
pub use hyperbolic::{DecoratedIdealPoint, DecoratedIdealPolygon};
pub use laurent::{LaurentError, LaurentPoly, Monomial};
pub use polygon::{Chord, EdgeValues, GeometryError, Triangulation};
pub use quiver::{Quiver, QuiverError};
pub use seed::{explore, ExchangeGraph, ExploreLimits, Seed, SeedError};
