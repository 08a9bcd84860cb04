//! Polygon dissections, their quiddities, and the counting, series, surgery and
//! modular-group machinery built on them.
//!
//! A dissection of the convex N-gon (vertices `0..N` counterclockwise) is a set of
//! pairwise noncrossing diagonals. Its quiddity is the cyclic tuple counting cells at
//! each vertex.

pub mod bridges;
pub mod dissection;
pub mod enumerate;
pub mod error;
pub mod formulas;
pub mod series;
pub mod surgery;
pub mod verify;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

pub use bridges::{
    HJContinuedFraction, Mat2, Monodromy, MonodromyReport, RegularCF, StripTriangulation,
    TheoremReport,
};
pub use dissection::{parse_dissection, Cell, CellList, Chord, Dissection, DualEdge, Quiddity};
pub use enumerate::{CellFilter, ClassReport, QuiddityClassTable};
pub use error::{Error, Result};
pub use series::{BivariateSeries, EquationSpec, SeriesTerm, WPoly, YSeries};
pub use surgery::{BasedDissection, SurgeryMove};
