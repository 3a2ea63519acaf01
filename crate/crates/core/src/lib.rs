//! Polynomial-time isomorphism machinery for unit square graphs (intersection
//! graphs of axis-parallel unit squares, equivalently point sets under the
//! L-infinity metric with threshold one).
//!
//! The decision pipeline never sees point coordinates: recognition of the
//! class is NP-hard, so all geometric information is recovered combinatorially
//! via clique-stable partitions, layered structure graphs with bounded cell
//! structure, and permutation-group computations. Exact rational realizations
//! exist only in [`geom`] for instance generation and test oracles.

pub mod bitset;
pub mod cliques;
pub mod error;
pub mod geom;
pub mod graph;
pub mod io;
pub mod layered;
pub mod neighborhood;
pub mod oracle;
pub mod perm;
pub mod pca;
pub mod pipeline;
pub mod refine;
pub mod selfcheck;

pub use bitset::VertexSet;
pub use error::{Diagnosis, Error, Result};
pub use graph::Graph;
pub use layered::{ColorKey, StructureGraph};
pub use perm::{Perm, PermGroup};
pub use refine::OrderedPartition;
