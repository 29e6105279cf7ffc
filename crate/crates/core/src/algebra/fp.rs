//! Prime-field arithmetic with a runtime modulus `q < 2^64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::Value;

use super::field::{Field, FieldKind};
use super::AlgebraError;

/// A validated prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(q: u64) -> Result<Self, AlgebraError> {
        if is_prime(q) {
            Ok(Modulus(q))
        } else {
            Err(AlgebraError::NotPrime(q))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases suffice below 2^64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Element of GF(q), stored as a residue in `[0, q)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: Modulus,
}

impl Fp {
    pub fn new(value: u64, modulus: Modulus) -> Self {
        Fp {
            value: value % modulus.0,
            modulus,
        }
    }

    pub fn from_signed(v: i64, modulus: Modulus) -> Self {
        let q = modulus.0 as i128;
        let r = (v as i128).rem_euclid(q);
        Fp {
            value: r as u64,
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Representative in `(-q/2, q/2]`, handy for reading small noise offsets.
    pub fn centered(&self) -> i128 {
        let q = self.modulus.0 as i128;
        let v = self.value as i128;
        if v > q / 2 {
            v - q
        } else {
            v
        }
    }

    fn check(&self, other: &Fp) {
        assert_eq!(
            self.modulus, other.modulus,
            "arithmetic between GF({}) and GF({})",
            self.modulus.0, other.modulus.0
        );
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.check(&rhs);
        let q = self.modulus.0;
        let (s, carry) = self.value.overflowing_add(rhs.value);
        let v = if carry || s >= q { s.wrapping_sub(q) } else { s };
        Fp {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.check(&rhs);
        let q = self.modulus.0;
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            q - (rhs.value - self.value)
        };
        Fp {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.check(&rhs);
        Fp {
            value: mul_mod(self.value, rhs.value, self.modulus.0),
            modulus: self.modulus,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        let v = if self.value == 0 {
            0
        } else {
            self.modulus.0 - self.value
        };
        Fp {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl Field for Fp {
    type Ctx = Modulus;
    const EXACT: bool = true;

    fn kind(ctx: &Modulus) -> FieldKind {
        FieldKind::PrimeField(ctx.0)
    }
    fn context(&self) -> Modulus {
        self.modulus
    }
    fn zero(ctx: &Modulus) -> Self {
        Fp::new(0, *ctx)
    }
    fn one(ctx: &Modulus) -> Self {
        Fp::new(1, *ctx)
    }
    fn from_i64(v: i64, ctx: &Modulus) -> Self {
        Fp::from_signed(v, *ctx)
    }
    fn from_f64(v: f64, ctx: &Modulus) -> Option<Self> {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            Some(Fp::from_signed(v as i64, *ctx))
        } else {
            None
        }
    }
    fn to_f64(&self) -> f64 {
        self.value as f64
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        let q = self.modulus.0;
        Some(Fp {
            value: pow_mod(self.value, q - 2, q),
            modulus: self.modulus,
        })
    }
    fn abs_le(&self, _bound: &Self) -> Option<bool> {
        None
    }
    fn to_json(&self) -> Value {
        Value::from(self.value)
    }
    fn from_json(v: &Value, ctx: &Modulus) -> Result<Self, AlgebraError> {
        match v {
            Value::Number(n) => {
                if let Some(u) = n.as_u64() {
                    Ok(Fp::new(u, *ctx))
                } else if let Some(i) = n.as_i64() {
                    Ok(Fp::from_signed(i, *ctx))
                } else {
                    Err(AlgebraError::Parse(format!("not an integer residue: {n}")))
                }
            }
            Value::String(s) => Self::parse(s, ctx),
            other => Err(AlgebraError::Parse(format!("expected residue, got {other}"))),
        }
    }
    fn parse(s: &str, ctx: &Modulus) -> Result<Self, AlgebraError> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|e| AlgebraError::Parse(format!("{s:?}: {e}")))?;
            let d: i64 = d.trim().parse().map_err(|e| AlgebraError::Parse(format!("{s:?}: {e}")))?;
            return Self::from_ratio(n, d, ctx)
                .ok_or_else(|| AlgebraError::NotInvertible(format!("{d} mod {}", ctx.0)));
        }
        let v: i128 = s
            .parse()
            .map_err(|e| AlgebraError::Parse(format!("{s:?}: {e}")))?;
        let q = ctx.0 as i128;
        Ok(Fp::new(v.rem_euclid(q) as u64, *ctx))
    }
}
