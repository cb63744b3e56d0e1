//! Exact arithmetic over Q and Q(i), dense linear algebra, and exact angles.

mod direction;
mod gaussian;
mod matrix;
mod rational;
mod sparse;

pub use direction::{compare_directions, leading_sign_at_point, ExactAngle, StokesDirection};
pub use gaussian::GaussianRational;
pub use matrix::{is_invertible, mat_rank, mat_solve, Matrix};
pub use rational::Rational;
pub use sparse::SparseMatrix;
