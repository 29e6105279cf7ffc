//! Reconstruction of multivariate polynomials from samples carrying bounded
//! noise and a fraction of arbitrarily corrupted (Byzantine) values.
//!
//! - [`wb`], [`mvwb`]: exact Welch-Berlekamp decoders over `Q` and `GF(q)`,
//!   with enumeration over a finite noise alphabet.
//! - [`lpfit`]: Chebyshev-basis l-infinity fitting by linear programming,
//!   behind a square-neighbourhood filter for corrupted values.
//! - [`aggregate`]: synthetic data, partitioning, per-cell fits and their
//!   hierarchical merge.
//!
//! Everything numeric is generic over the scalar; the aliases below name the
//! common instantiations.

pub mod aggregate;
pub mod algebra;
pub mod lpfit;
pub mod mvwb;
pub mod report;
pub mod wb;

pub use algebra::{AlgebraError, AnyPoly, Field, FieldKind, Fp, Modulus, MultiPoly, Rational};
pub use report::{FitReport, Model, ModelJson};

pub type RationalPoly = MultiPoly<Rational>;
pub type GfPoly = MultiPoly<Fp>;
pub type FloatPoly = MultiPoly<f64>;
pub type ChebModel64 = lpfit::ChebModel<f64>;
pub type ChebModel32 = lpfit::ChebModel<f32>;
pub type RationalData = aggregate::DataSet<Rational>;
pub type GfData = aggregate::DataSet<Fp>;
pub type FloatData = aggregate::DataSet<f64>;
