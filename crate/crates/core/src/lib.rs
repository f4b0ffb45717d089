//! Exact, asymptotic and Monte Carlo analysis of the k-box matchbox process.
//!
//! `k` boxes start with `n` matches each. At every step a big chooser (with
//! probability `p`) takes a match from a fullest box, otherwise a little
//! chooser takes one from an emptiest box. The crate computes the expected
//! residue `M_n` left when a box first empties, the expected order `R_n` of
//! the first return to a state with all boxes equal, the combinatorics behind
//! both, and their behaviour as `n` grows.
//!
//! Numerical routines are generic over [`numeric::Ring`] / [`numeric::Field`],
//! so the same code runs on `f32`, `f64`, exact [`BigRational`]s and
//! polynomials in `p`.

pub mod asymptotics;
pub mod combinatorics;
pub mod error;
pub mod expectations;
pub mod numeric;
pub mod poly;
pub mod series;
pub mod simulator;

use num_rational::BigRational;

pub use asymptotics::{Regime, RegimeReport};
pub use combinatorics::{ManilaConfig, PathWord, Step};
pub use error::{Error, Result};
pub use expectations::{ResidueMethod, ReturnDistribution};
pub use numeric::{Field, Probability, RealField, Ring, Scalar};
pub use poly::Polynomial;
pub use series::TruncatedSeries;
pub use simulator::{ProcessState, SimulationResult, SimulationTarget};

/// Exact rational scalar.
pub type Exact = BigRational;
pub type ExactSeries = TruncatedSeries<BigRational>;
pub type FloatSeries = TruncatedSeries<f64>;
pub type ExactPolynomial = Polynomial<BigRational>;
