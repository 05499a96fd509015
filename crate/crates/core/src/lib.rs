//! Explicit R-operator for the vector evaluation representation of the
//! quantum loop superalgebra Uq(L(sl(M|N))).
//!
//! The crate builds every Cartan–Weyl root vector of the evaluation
//! representation by iterated q-supercommutators, assembles the R-operator
//! from its factors (the real-root q-exponentials, the imaginary-root
//! exponential and the Cartan part `K`), and compares the result against the
//! closed Perk–Schultz form. The [`verify`] module checks the graded
//! Yang–Baxter equation and the intertwining property numerically.
//!
//! Module map:
//!
//! * [`scalars`]: q-numbers, q-exponentials, truncated power series.
//! * [`root_data`]: roots of sl(M|N) and its affinization, normal order.
//! * [`graded_matrix`]: supermatrices, graded Kronecker products, q-supercommutators.
//! * [`representations`]: the vector representation, evaluation modules, coproduct.
//! * [`cartan_weyl`]: root-vector tables, closed forms, `T_n`, `a_γ`.
//! * [`qcartan_inverse`]: tridiagonal inverses and the inverse of `B_q`.
//! * [`r_factors`]: `K`, `R_{≺δ}`, `R_{∼δ}`, `R_{≻δ}`, normalization, full `R`.
//! * [`verify`]: Yang–Baxter, intertwining, and the verification suite.
//! * [`cli`] / [`export`]: command-line front end and matrix file formats.

pub mod cartan_weyl;
pub mod cli;
pub mod error;
pub mod export;
pub mod graded_matrix;
pub mod qcartan_inverse;
pub mod r_factors;
pub mod representations;
pub mod root_data;
pub mod scalars;
pub mod verify;

pub use error::{Error, Result};
pub use graded_matrix::{GradedSpace, RootGradedElement, SuperMatrix};
pub use representations::{EvaluationRep, GradingVector};
pub use root_data::{AffineRoot, Parity, RootSystem, SuperRank};
pub use scalars::{QContext, TruncatedSeries};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
