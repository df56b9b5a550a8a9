//! Well-centered simplices and tetrahedral meshes.

pub mod error;
pub mod geom;
mod linalg;
pub mod predicates;
pub mod complex;
pub mod link_analysis;
pub mod constructions;
pub mod cube;
pub mod io;
pub mod report;

pub use error::*;
pub use geom::{Point, Simplex, Tolerance};
pub use predicates::{Status, WcVerdict};
