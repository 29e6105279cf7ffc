//! Polynomial wire format.
//!
//! `{"vars":k, "field":"rational"|"gf"|"float", "modulus":q?,
//!   "basis":"monomial"|"chebyshev", "terms":[{"exp":[..], "coeff":..}, ..]}`
//!
//! Terms are written in descending graded-lex order.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::chebyshev::cheb_to_monomial;
use super::field::{Field, FieldKind};
use super::fp::{Fp, Modulus};
use super::poly::MultiPoly;
use super::rational::Rational;
use super::AlgebraError;
use crate::lpfit::ChebModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coeff: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: usize,
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default = "default_basis")]
    pub basis: String,
    pub terms: Vec<TermJson>,
}

fn default_basis() -> String {
    "monomial".into()
}

impl PolyJson {
    pub fn kind(&self) -> Result<FieldKind, AlgebraError> {
        FieldKind::from_tag(&self.field, self.modulus)
    }
}

impl<F: Field> MultiPoly<F> {
    pub fn to_json(&self) -> PolyJson {
        let kind = F::kind(self.ctx());
        PolyJson {
            vars: self.vars(),
            field: kind.tag().into(),
            modulus: kind.modulus(),
            basis: "monomial".into(),
            terms: self
                .terms()
                .rev()
                .map(|(m, c)| TermJson {
                    exp: m.exps().to_vec(),
                    coeff: c.to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson, ctx: &F::Ctx) -> Result<Self, AlgebraError> {
        if j.basis != "monomial" {
            return Err(AlgebraError::Parse(format!(
                "expected monomial basis, got {:?}",
                j.basis
            )));
        }
        if j.kind()? != F::kind(ctx) {
            return Err(AlgebraError::KindMismatch);
        }
        let terms = j
            .terms
            .iter()
            .map(|t| Ok((t.exp.clone(), F::from_json(&t.coeff, ctx)?)))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        MultiPoly::from_terms(j.vars, ctx, terms)
    }
}

/// A polynomial whose field is only known at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPoly {
    Rational(MultiPoly<Rational>),
    Gf(MultiPoly<Fp>),
    Float(MultiPoly<f64>),
}

impl AnyPoly {
    /// Chebyshev-basis input is expanded to a float monomial polynomial.
    pub fn from_json(j: &PolyJson) -> Result<Self, AlgebraError> {
        if j.basis == "chebyshev" {
            return Ok(AnyPoly::Float(chebyshev_terms_to_monomial(j)?));
        }
        Ok(match j.kind()? {
            FieldKind::Rational => AnyPoly::Rational(MultiPoly::from_json(j, &())?),
            FieldKind::PrimeField(q) => AnyPoly::Gf(MultiPoly::from_json(j, &Modulus::new(q)?)?),
            FieldKind::Float => AnyPoly::Float(MultiPoly::from_json(j, &())?),
        })
    }

    pub fn to_json(&self) -> PolyJson {
        match self {
            AnyPoly::Rational(p) => p.to_json(),
            AnyPoly::Gf(p) => p.to_json(),
            AnyPoly::Float(p) => p.to_json(),
        }
    }

    pub fn vars(&self) -> usize {
        match self {
            AnyPoly::Rational(p) => p.vars(),
            AnyPoly::Gf(p) => p.vars(),
            AnyPoly::Float(p) => p.vars(),
        }
    }

    /// Value at a float point; GF(q) residues are read as integers.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            AnyPoly::Rational(p) => p.eval_f64(x),
            AnyPoly::Gf(p) => p.eval_f64(x),
            AnyPoly::Float(p) => p.eval_f64(x),
        }
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            AnyPoly::Rational(_) => FieldKind::Rational,
            AnyPoly::Gf(p) => FieldKind::PrimeField(p.ctx().get()),
            AnyPoly::Float(_) => FieldKind::Float,
        }
    }
}

impl std::fmt::Display for AnyPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnyPoly::Rational(p) => p.fmt(f),
            AnyPoly::Gf(p) => p.fmt(f),
            AnyPoly::Float(p) => p.fmt(f),
        }
    }
}

fn chebyshev_terms_to_monomial(j: &PolyJson) -> Result<MultiPoly<f64>, AlgebraError> {
    let mut degrees = vec![0usize; j.vars];
    for t in &j.terms {
        if t.exp.len() != j.vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: j.vars,
                got: t.exp.len(),
            });
        }
        for (d, &e) in degrees.iter_mut().zip(&t.exp) {
            *d = (*d).max(e as usize);
        }
    }
    let mut model = ChebModel::<f64>::zeros(degrees);
    for t in &j.terms {
        let idx: Vec<usize> = t.exp.iter().map(|&e| e as usize).collect();
        let c = super::field::json_number_to_f64(&t.coeff)?;
        model.set(&idx, model.coeff(&idx) + c);
    }
    Ok(cheb_to_monomial(&model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::expr::parse_poly;

    #[test]
    fn rational_wire_form() {
        let p = parse_poly("x^2 + 7/4*x*y - 5/2", 2).unwrap();
        let j = p.to_json();
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(
            text,
            r#"{"vars":2,"field":"rational","basis":"monomial","terms":[{"exp":[2,0],"coeff":"1"},{"exp":[1,1],"coeff":"7/4"},{"exp":[0,0],"coeff":"-5/2"}]}"#
        );
        let back: PolyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(MultiPoly::<Rational>::from_json(&back, &()).unwrap(), p);
    }

    #[test]
    fn gf_and_kind_checks() {
        let q = Modulus::new(101).unwrap();
        let p = parse_poly("x^2 - 1", 1)
            .unwrap()
            .convert(&q, |c| Fp::from_ratio(c.numer().try_into().ok()?, c.denom().try_into().ok()?, &q))
            .unwrap();
        let j = p.to_json();
        assert_eq!(j.modulus, Some(101));
        assert_eq!(j.terms[1].coeff, serde_json::json!(100));
        assert_eq!(AnyPoly::from_json(&j).unwrap(), AnyPoly::Gf(p));
        assert_eq!(
            MultiPoly::<Rational>::from_json(&j, &()),
            Err(AlgebraError::KindMismatch)
        );
    }

    #[test]
    fn chebyshev_basis_input() {
        let j: PolyJson = serde_json::from_str(
            r#"{"vars":1,"field":"float","basis":"chebyshev","terms":[{"exp":[2],"coeff":1.0}]}"#,
        )
        .unwrap();
        let AnyPoly::Float(p) = AnyPoly::from_json(&j).unwrap() else {
            panic!()
        };
        assert_eq!(p.coeff(&[2]), 2.0);
        assert_eq!(p.coeff(&[0]), -1.0);
    }
}
