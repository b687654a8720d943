//! Orthogonal inner product graphs over finite fields of odd characteristic.

pub mod autsearch;
pub mod cli;
pub mod error;
pub mod ff;
pub mod graph;
pub mod matfq;
pub mod ospace;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use ff::{Field, FieldElem};
pub use graph::OiGraph;
pub use matfq::MatFq;
pub use ospace::{Disc, Space, Subspace, SubspaceType};
