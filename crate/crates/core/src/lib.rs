//! Construction and exact certification of cubic graphical regular
//! representations of PSU₃(q).

pub mod autcheck;
pub mod cayley;
pub mod certify;
pub mod construct;
pub mod error;
pub mod gf;
pub mod grouporder;
pub mod linalg;
pub mod mat3;
pub mod perm;

pub use error::{Error, Result};
pub use gf::{Field, FieldElem, FieldParams};
pub use mat3::{CharPoly, HermitianForm, Mat3};
