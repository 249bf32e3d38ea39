//! Entanglement witnesses and their measurement-device-independent forms.
//!
//! Operators are dense complex matrices with row-major storage; bipartite
//! indices are composite `i * d_B + k` with subsystem A slow.

// Guards are written as `!(x > min)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod mdi;
pub mod states;
pub mod targets;
pub mod tolerance;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{BipartiteDims, CMatrix, C64};
pub use states::DensityMatrix;
