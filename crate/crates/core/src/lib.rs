pub mod arith;
pub mod beauville;
pub mod bigserde;
pub mod descent;
pub mod error;
pub mod expr;
pub mod identities;
pub mod lattice;
pub mod params;
pub mod quotients;
pub mod tree;
pub mod vectors;
pub mod word;

pub use error::{Error, Result};
pub use expr::WordExpr;
pub use params::Params;
pub use tree::{Portrait, Vertex};
pub use word::{Triviality, Word};
