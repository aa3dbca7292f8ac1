pub mod conformal;
pub mod error;
pub mod galilean;
pub mod linalg;
pub mod orthogonal;
pub mod padic;
pub mod poincare;
pub mod quadspace;
pub mod sampling;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use padic::{hilbert_symbol, psi, square_class_ball, Padic, Phase, Qp, SquareClass};
pub use quadspace::{diagonalize, Invariants, QuadSpace};
