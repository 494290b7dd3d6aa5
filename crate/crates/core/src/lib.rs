//! CR-singular points, CR-orbit foliations and slice-wise Levi-flat fillings
//! of real 2-codimensional submanifolds of `C^n` given by polynomial graph
//! charts, plus the combinatorial gluing algebra of elementary models.

pub mod error;
pub mod export;
pub mod filling;
pub mod fixtures;
pub mod glue;
pub mod grid;
pub mod linalg;
pub mod manifold;
pub mod orbit;
pub mod poly;
pub mod report;
pub mod singularity;
pub mod specfile;

pub use error::{Error, Result};
