pub mod cinf_ring;
pub mod count;
pub mod dman;
pub mod error;
pub mod fibre;
pub mod glue;
pub mod laws;
pub mod linalg;
pub mod poly;
pub mod vvect;
pub mod witness;

pub use error::{Error, Result};
