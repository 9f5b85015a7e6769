pub mod complete;
pub mod decide;
pub mod error;
pub mod graph;
pub mod model;
pub mod numeric;
pub mod optimize;
pub mod reduce;
pub mod semialg;
pub mod tensor;

pub use error::{Error, Result};
