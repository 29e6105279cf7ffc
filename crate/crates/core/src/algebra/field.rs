//! Scalar fields used by the decoders and the LP fitter.
//!
//! Exact kinds (`Rational`, `Fp`) back every Welch-Berlekamp solve and every
//! divisibility test. Floats (`f32`, `f64`) only appear on the LP path.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::Value;

use super::linalg::{self, LinearSolution};
use super::AlgebraError;

/// Runtime tag for the kind of a scalar, as written to JSON manifests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    PrimeField(u64),
    Float,
}

impl FieldKind {
    pub fn tag(&self) -> &'static str {
        match self {
            FieldKind::Rational => "rational",
            FieldKind::PrimeField(_) => "gf",
            FieldKind::Float => "float",
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            FieldKind::PrimeField(q) => Some(*q),
            _ => None,
        }
    }

    pub fn from_tag(tag: &str, modulus: Option<u64>) -> Result<Self, AlgebraError> {
        match (tag, modulus) {
            ("rational", _) => Ok(FieldKind::Rational),
            ("float", _) => Ok(FieldKind::Float),
            ("gf", Some(q)) => Ok(FieldKind::PrimeField(q)),
            ("gf", None) => Err(AlgebraError::Parse("field \"gf\" requires a modulus".into())),
            (other, _) => Err(AlgebraError::Parse(format!("unknown field kind {other:?}"))),
        }
    }
}

impl Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::PrimeField(q) => write!(f, "gf({q})"),
            other => f.write_str(other.tag()),
        }
    }
}

/// A field element together with everything the generic algorithms need.
///
/// Elements of `Fp` carry their modulus, so construction of constants goes
/// through a context value (`Ctx`) rather than `num_traits::Zero`.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Ctx: Clone + PartialEq + Debug + Send + Sync;

    /// Arithmetic is exact (no rounding).
    const EXACT: bool;

    fn kind(ctx: &Self::Ctx) -> FieldKind;
    fn context(&self) -> Self::Ctx;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_i64(v: i64, ctx: &Self::Ctx) -> Self;

    /// `num / den`, or `None` when `den` is not invertible.
    fn from_ratio(num: i64, den: i64, ctx: &Self::Ctx) -> Option<Self> {
        Self::from_i64(den, ctx)
            .inv()
            .map(|d| Self::from_i64(num, ctx) * d)
    }

    /// Exact conversion from a binary64 value where the field admits one.
    fn from_f64(v: f64, ctx: &Self::Ctx) -> Option<Self>;
    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;

    /// `|self| <= bound` for ordered fields; `None` when the field has no order.
    fn abs_le(&self, bound: &Self) -> Option<bool>;

    fn to_json(&self) -> Value;
    fn from_json(v: &Value, ctx: &Self::Ctx) -> Result<Self, AlgebraError>;
    fn parse(s: &str, ctx: &Self::Ctx) -> Result<Self, AlgebraError>;

    /// Solve `a x = b`; free variables are set to zero.
    fn solve_system(a: Vec<Vec<Self>>, b: Vec<Self>, ctx: &Self::Ctx) -> LinearSolution<Self> {
        linalg::gauss_jordan(a, b, ctx)
    }

    fn is_one(&self) -> bool {
        *self == Self::one(&self.context())
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.context());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

pub(crate) fn json_number_to_f64(v: &Value) -> Result<f64, AlgebraError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| AlgebraError::Parse(format!("not a float: {n}"))),
        Value::String(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|e| AlgebraError::Parse(format!("{s:?}: {e}"))),
        other => Err(AlgebraError::Parse(format!("expected number, got {other}"))),
    }
}

macro_rules! impl_float_field {
    ($t:ty) => {
        impl Field for $t {
            type Ctx = ();
            const EXACT: bool = false;

            fn kind(_: &()) -> FieldKind {
                FieldKind::Float
            }
            fn context(&self) {}
            fn zero(_: &()) -> Self {
                0.0
            }
            fn one(_: &()) -> Self {
                1.0
            }
            fn from_i64(v: i64, _: &()) -> Self {
                v as $t
            }
            fn from_f64(v: f64, _: &()) -> Option<Self> {
                Some(v as $t)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn is_zero(&self) -> bool {
                *self == 0.0
            }
            fn inv(&self) -> Option<Self> {
                if *self == 0.0 {
                    None
                } else {
                    Some(1.0 / *self)
                }
            }
            fn abs_le(&self, bound: &Self) -> Option<bool> {
                Some(self.abs() <= *bound)
            }
            fn to_json(&self) -> Value {
                serde_json::json!(*self as f64)
            }
            fn from_json(v: &Value, _: &()) -> Result<Self, AlgebraError> {
                json_number_to_f64(v).map(|x| x as $t)
            }
            fn parse(s: &str, _: &()) -> Result<Self, AlgebraError> {
                s.trim()
                    .parse::<$t>()
                    .map_err(|e| AlgebraError::Parse(format!("{s:?}: {e}")))
            }
            fn solve_system(a: Vec<Vec<Self>>, b: Vec<Self>, _: &()) -> LinearSolution<Self> {
                linalg::partial_pivot_solve(a, b)
            }
        }
    };
}

impl_float_field!(f64);
impl_float_field!(f32);
