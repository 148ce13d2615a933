pub mod error;
pub mod integer_linalg;
pub mod lattice_geometry;
pub mod monodromy_engine;
pub mod numeric_linalg;
pub mod ode_oracle;
pub mod spectral_algebra;

pub use error::{Error, Result};
