//! Fixtures shared by the criterion benches.

use quiddity_core::enumerate::{self, CellFilter};
use quiddity_core::Dissection;

/// Every 3-periodic dissection of the `n`-gon, in generation order.
pub fn three_periodic(n: usize) -> Vec<Dissection> {
    enumerate::enumerate_dissections(n, None, &CellFilter::EllPeriodic(3)).expect("small polygon")
}

/// Quiddities of all triangulations of the `n`-gon, as matrix-product inputs.
pub fn triangulation_quiddities(n: usize) -> Vec<Vec<u64>> {
    enumerate::enumerate_dissections(n, Some(n - 2), &CellFilter::All)
        .expect("small polygon")
        .iter()
        .map(|t| t.quiddity().0.into_iter().map(u64::from).collect())
        .collect()
}
