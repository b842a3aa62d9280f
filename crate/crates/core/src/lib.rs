//! Constructions and exact verifiers for Steiner quadruple systems and the
//! objects they are assembled from: MOLS, MDS codes, 1-factorizations,
//! symmetric nilpotent Latin squares and bipartite balanced designs.

pub mod bbd;
pub mod census;
pub mod error;
pub mod gf;
pub mod io;
pub mod latin;
pub mod mds;
pub mod model;
pub mod planner;
pub mod search;
pub mod sqs;
pub mod verify;

pub use error::{Error, Result};
pub use model::{is_admissible, sqs_block_count, Design, Hole, Kind, TripleIndex};
