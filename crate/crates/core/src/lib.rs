//! Entanglement-family classification of tripartite pure states viewed as
//! order-3 complex tensors.

pub mod catalog;
pub mod classify;
pub mod error;
pub mod exterior;
pub mod formulas;
pub mod linalg;
pub mod slocc;
pub mod tensor;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64;
