//! Bounded-rank linear spaces of matrices over small prime fields.

pub mod campaign;
pub mod classify;
pub mod enumerate;
pub mod error;
pub mod field;
pub mod format;
pub mod gf2;
pub mod group;
pub mod matrix;
pub mod models;
pub mod par;
pub mod report;
pub mod space;
pub mod vecspace;

pub use error::{Error, Result};
pub use field::{FieldElem, FieldOrder};
pub use matrix::Mat;
pub use space::MatSpace;
pub use vecspace::VecSpace;
