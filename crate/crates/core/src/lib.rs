//! Tree-decompositions of multigraphs without long paths: validation,
//! linkedness, diameter reduction, exhaustive oracles and well-quasi-order
//! embeddings.

pub mod decomp;
pub mod embed;
pub mod error;
pub mod families;
pub mod id;
pub mod io;
pub mod multigraph;
pub mod oracle;
pub mod set;
pub mod shorten;

pub use decomp::{TreeDecomposition, TreeEdge, Violation};
pub use embed::{Embedding, LabeledRootedGraph, Mode, QuasiOrder, Respect};
pub use error::{Error, Result};
pub use id::{Id, Label};
pub use multigraph::{Edge, Multigraph, PathWitness};
pub use set::VertexSet;
