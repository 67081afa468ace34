pub mod delaunay;
pub mod entropy;
pub mod epsnet;
pub mod error;
pub mod geom;
pub mod harness;
pub mod locate;
pub mod sorter;
pub mod sources;
pub mod wbst;

pub use error::{Error, Result};
