//! Block encodings of periodic finite-difference operators as quantum circuits,
//! with a dense simulator to verify them and a Clifford+T resource model.

pub mod analysis;
pub mod circuit;
pub mod encodings;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod resources;

pub use circuit::{Circuit, Control, Gate, GateKind, RegisterLayout};
pub use encodings::{BlockEncoding, Operator};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use operators::{FunctionFamily, GridSpec};
