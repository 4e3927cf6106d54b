//! Discrete Steklov spectra of subgraphs of polynomial-growth Cayley graphs.
//!
//! The pipeline is: a [`group::GroupSpec`] gives exact group arithmetic,
//! [`cayley`] enumerates word-metric balls, [`subgraph`] builds the graph
//! with boundary `(Ω, B)` from an interior set, [`steklov`] reduces the
//! Laplacian to the Dirichlet-to-Neumann matrix and diagonalizes it, and
//! [`bounds`] sweeps shape families and checks eigenvalue upper bounds and
//! their decay.

pub mod bounds;
pub mod cayley;
pub mod cli;
pub mod error;
pub mod fit;
pub mod group;
pub mod report;
pub mod steklov;
pub mod subgraph;

pub use error::{Error, Result};
pub use group::{GroupElement, GroupKind, GroupSpec, GrowthOrder};
