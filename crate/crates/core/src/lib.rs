pub mod catalog;
pub mod construction;
pub mod embedding;
pub mod engine;
pub mod error;
pub mod evader;
pub mod gen;
pub mod graph;
pub mod io;
pub mod lemma;
pub mod separator;
pub mod solver;
pub mod strategies;

pub use error::{Error, Result};
pub use graph::{Digraph, Direction, VertexId};
