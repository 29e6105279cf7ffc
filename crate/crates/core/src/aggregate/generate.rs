//! Seeded synthetic samples with labelled noise and corruption.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Field, FieldKind, Fp, Modulus, MultiPoly, PolyJson, Rational, TermJson};
use crate::lpfit::ChebModel;

use super::{AnyDataSet, DataError, DataSet, Label};

#[derive(Clone, Debug, PartialEq)]
pub enum Truth {
    Poly(MultiPoly<Rational>),
    Cheb(ChebModel<f64>),
}

impl Truth {
    pub fn vars(&self) -> usize {
        match self {
            Truth::Poly(p) => p.vars(),
            Truth::Cheb(m) => m.vars(),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Truth::Poly(p) => p.eval_f64(x),
            Truth::Cheb(m) => m.eval(x),
        }
    }

    /// Monomial truth in the data's field; Chebyshev truth as a
    /// `"basis":"chebyshev"` record.
    pub fn to_json(&self, kind: FieldKind) -> Result<PolyJson, DataError> {
        match self {
            Truth::Poly(p) => Ok(match kind {
                FieldKind::PrimeField(q) => to_gf(p, Modulus::new(q)?)?.to_json(),
                _ => p.to_json(),
            }),
            Truth::Cheb(m) => Ok(PolyJson {
                vars: m.vars(),
                field: "float".into(),
                modulus: None,
                basis: "chebyshev".into(),
                terms: m
                    .indexed_coeffs()
                    .filter(|(_, c)| *c != 0.0)
                    .map(|(i, c)| TermJson {
                        exp: i.iter().map(|&e| e as u32).collect(),
                        coeff: serde_json::json!(c),
                    })
                    .collect(),
            }),
        }
    }
}

fn to_gf(p: &MultiPoly<Rational>, q: Modulus) -> Result<MultiPoly<Fp>, DataError> {
    Ok(p.convert(&q, |c| rational_to(c, &q))?)
}

/// `c` in a field with context `ctx`, via `numer / denom`.
pub(crate) fn rational_to<F: Field>(c: &Rational, ctx: &F::Ctx) -> Option<F> {
    let n: i64 = c.numer().try_into().ok()?;
    let d: i64 = c.denom().try_into().ok()?;
    F::from_ratio(n, d, ctx)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Noise {
    None,
    /// Uniform on `[-delta, delta]`; float data only.
    UniformBand(f64),
    /// One offset drawn uniformly from the list.
    DiscreteAlphabet(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Corruption {
    /// Uniform over the value range (all residues over GF(q)).
    UniformInBox,
    Constant(Rational),
    /// `f +- (offset + u)` with `u` uniform in `[0, offset)`, so
    /// `|z - f| >= offset`. The sign flips when the value would leave the
    /// value range.
    Adversarial(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub truth: Truth,
    pub field: FieldKind,
    pub noise: Noise,
    /// Fraction of rows corrupted; exactly `ceil(beta * n)` are.
    pub beta: f64,
    pub corruption: Corruption,
    pub seed: u64,
    /// Sampling box. Exact fields draw integer coordinates from it, with
    /// distinct first coordinates.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Range for `UniformInBox` values and for keeping adversarial values
    /// in range.
    pub value_range: (f64, f64),
}

impl Generator {
    pub fn new(truth: Truth, field: FieldKind, seed: u64) -> Self {
        let k = truth.vars();
        let (lo, hi) = match field {
            FieldKind::Float => (vec![-1.0; k], vec![1.0; k]),
            FieldKind::PrimeField(q) => (vec![0.0; k], vec![(q - 1) as f64; k]),
            FieldKind::Rational => (vec![-50.0; k], vec![50.0; k]),
        };
        Generator {
            truth,
            field,
            noise: Noise::None,
            beta: 0.0,
            corruption: Corruption::UniformInBox,
            seed,
            lo,
            hi,
            value_range: (-1.0, 1.0),
        }
    }

    pub fn corrupt_count(&self, n: usize) -> usize {
        ((self.beta * n as f64) - 1e-9).ceil().max(0.0) as usize
    }

    fn validate(&self) -> Result<(), DataError> {
        let bad = |m: String| Err(DataError::Invalid(m));
        if !(0.0..1.0).contains(&self.beta) {
            return bad(format!("beta = {} is not in [0, 1)", self.beta));
        }
        let k = self.truth.vars();
        if self.lo.len() != k || self.hi.len() != k {
            return bad(format!("sampling box must have {k} axes"));
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| !(l <= h)) {
            return bad("sampling box has lo > hi".into());
        }
        match (&self.noise, self.field) {
            (Noise::UniformBand(d), FieldKind::Float) if *d >= 0.0 => {}
            (Noise::UniformBand(_), FieldKind::Float) => return bad("noise width must be non-negative".into()),
            (Noise::UniformBand(_), _) => return bad("uniform noise needs float data; use an alphabet".into()),
            (Noise::DiscreteAlphabet(a), _) if a.is_empty() => return bad("empty noise alphabet".into()),
            _ => {}
        }
        if let Corruption::Adversarial(o) = self.corruption {
            if !(o > 0.0) {
                return bad("adversarial offset must be positive".into());
            }
        }
        if matches!(self.truth, Truth::Cheb(_)) && self.field != FieldKind::Float {
            return bad("a Chebyshev truth needs float data".into());
        }
        Ok(())
    }

    /// `n` rows, identical for identical generators.
    pub fn generate(&self, n: usize) -> Result<AnyDataSet, DataError> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let corrupt = {
            let mut flags = vec![false; n];
            for i in sample(&mut rng, n, self.corrupt_count(n).min(n)) {
                flags[i] = true;
            }
            flags
        };
        let out = match self.field {
            FieldKind::Float => AnyDataSet::Float(self.float_rows(n, &corrupt, &mut rng)?),
            FieldKind::Rational => AnyDataSet::Rational(self.exact_rows::<Rational>(n, &(), &corrupt, &mut rng)?),
            FieldKind::PrimeField(q) => {
                let m = Modulus::new(q)?;
                AnyDataSet::Gf(self.exact_rows::<Fp>(n, &m, &corrupt, &mut rng)?)
            }
        };
        Ok(out)
    }

    fn finish<F: Field>(&self, ds: DataSet<F>, labels: Vec<Label>) -> Result<DataSet<F>, DataError> {
        let mut ds = ds.with_labels(labels)?;
        ds.truth = Some(self.truth.to_json(self.field)?);
        ds.seed = Some(self.seed);
        Ok(ds)
    }

    fn float_rows(&self, n: usize, corrupt: &[bool], rng: &mut ChaCha8Rng) -> Result<DataSet<f64>, DataError> {
        let k = self.truth.vars();
        let (vlo, vhi) = self.value_range;
        let mut points = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for &bad in corrupt {
            let x: Vec<f64> = (0..k).map(|a| uniform(rng, self.lo[a], self.hi[a])).collect();
            let f = self.truth.eval_f64(&x);
            let (z, label) = if bad {
                let z = match &self.corruption {
                    Corruption::UniformInBox => uniform(rng, vlo, vhi),
                    Corruption::Constant(c) => Field::to_f64(c),
                    Corruption::Adversarial(o) => {
                        let mag = o + rng.gen::<f64>() * o;
                        let up = rng.gen::<bool>();
                        let z = if up { f + mag } else { f - mag };
                        if z > vhi || z < vlo {
                            if up {
                                f - mag
                            } else {
                                f + mag
                            }
                        } else {
                            z
                        }
                    }
                };
                (z, Label::Corrupt)
            } else {
                match &self.noise {
                    Noise::None => (f, Label::Clean),
                    Noise::UniformBand(d) => {
                        let e = if *d > 0.0 { uniform(rng, -d, *d) } else { 0.0 };
                        (f + e, if e == 0.0 { Label::Clean } else { Label::Noisy })
                    }
                    Noise::DiscreteAlphabet(a) => {
                        let e = Field::to_f64(&a[rng.gen_range(0..a.len())]);
                        (f + e, if e == 0.0 { Label::Clean } else { Label::Noisy })
                    }
                }
            };
            points.push(x);
            values.push(z);
            labels.push(label);
        }
        self.finish(DataSet::new((), k, points, values)?, labels)
    }

    fn exact_rows<F: Field>(
        &self,
        n: usize,
        ctx: &F::Ctx,
        corrupt: &[bool],
        rng: &mut ChaCha8Rng,
    ) -> Result<DataSet<F>, DataError> {
        let Truth::Poly(p) = &self.truth else {
            return Err(DataError::Invalid("a Chebyshev truth needs float data".into()));
        };
        let poly: MultiPoly<F> = p.convert(ctx, |c| rational_to(c, ctx))?;
        let k = p.vars();
        let conv = |c: &Rational| {
            rational_to::<F>(c, ctx).ok_or_else(|| DataError::Invalid(format!("{c} has no image in the field")))
        };
        let int_range = |a: usize| (self.lo[a].ceil() as i64, self.hi[a].floor() as i64);
        // First coordinates are distinct: sample them without replacement.
        let (lo0, hi0) = int_range(0);
        let span = (hi0 - lo0 + 1).max(0) as usize;
        if span < n {
            return Err(DataError::Invalid(format!(
                "only {span} distinct integer x1 values in [{}, {}] for {n} rows",
                self.lo[0], self.hi[0]
            )));
        }
        let firsts: Vec<i64> = sample(rng, span, n).into_iter().map(|i| lo0 + i as i64).collect();
        let kind = F::kind(ctx);
        let mut points = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for (i, &bad) in corrupt.iter().enumerate() {
            let mut x = vec![F::from_i64(firsts[i], ctx)];
            for a in 1..k {
                let (l, h) = int_range(a);
                x.push(F::from_i64(rng.gen_range(l..=h.max(l)), ctx));
            }
            let f = poly.eval(&x)?;
            let (z, label) = if bad {
                let z = match &self.corruption {
                    Corruption::UniformInBox => match kind {
                        FieldKind::PrimeField(q) => F::from_i64(rng.gen_range(0..q as i64), ctx),
                        _ => {
                            let (l, h) = self.value_range;
                            F::from_i64(rng.gen_range(l.ceil() as i64..=h.floor() as i64), ctx)
                        }
                    },
                    Corruption::Constant(c) => conv(c)?,
                    Corruption::Adversarial(o) => {
                        let base = o.ceil() as i64;
                        let mag = base + rng.gen_range(0..base.max(1));
                        let s = if rng.gen::<bool>() { mag } else { -mag };
                        f.clone() + F::from_i64(s, ctx)
                    }
                };
                (z, Label::Corrupt)
            } else {
                match &self.noise {
                    Noise::DiscreteAlphabet(a) => {
                        let e = &a[rng.gen_range(0..a.len())];
                        let label = if num_traits::Zero::is_zero(e) {
                            Label::Clean
                        } else {
                            Label::Noisy
                        };
                        (f + conv(e)?, label)
                    }
                    _ => (f, Label::Clean),
                }
            };
            points.push(x);
            values.push(z);
            labels.push(label);
        }
        self.finish(DataSet::new(ctx.clone(), k, points, values)?, labels)
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, rat};

    fn xy() -> Truth {
        Truth::Poly(parse_poly("x + y", 2).unwrap())
    }

    #[test]
    fn exact_rows_lie_on_truth() {
        let g = Generator::new(xy(), FieldKind::Rational, 3);
        let AnyDataSet::Rational(d) = g.generate(7).unwrap() else { panic!() };
        let Truth::Poly(p) = &g.truth else { panic!() };
        for (x, z) in d.iter() {
            assert_eq!(&p.eval(x).unwrap(), z);
        }
        let mut firsts: Vec<String> = d.points().iter().map(|p| p[0].to_string()).collect();
        firsts.sort();
        firsts.dedup();
        assert_eq!(firsts.len(), 7);
    }

    #[test]
    fn adversarial_labels() {
        let truth = Truth::Poly(parse_poly("1/2*x*y - 1/4*x^2", 2).unwrap());
        let mut g = Generator::new(truth.clone(), FieldKind::Float, 11);
        g.beta = 0.2;
        g.noise = Noise::UniformBand(0.05);
        g.corruption = Corruption::Adversarial(0.15);
        let AnyDataSet::Float(d) = g.generate(1000).unwrap() else { panic!() };
        let labels = d.labels().unwrap();
        assert_eq!(labels.iter().filter(|l| **l == Label::Corrupt).count(), 200);
        for (i, (x, z)) in d.iter().enumerate() {
            let gap = (z - truth.eval_f64(x)).abs();
            if labels[i] == Label::Corrupt {
                assert!(gap > 0.1);
                assert!((-1.0..=1.0).contains(z));
            } else {
                assert!(gap <= 0.05);
            }
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let mut g = Generator::new(xy(), FieldKind::Float, 1);
        g.beta = 0.2;
        g.noise = Noise::UniformBand(0.05);
        let a = g.generate(50).unwrap();
        let b = g.generate(50).unwrap();
        let AnyDataSet::Float(a) = a else { panic!() };
        let AnyDataSet::Float(b) = b else { panic!() };
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        assert_eq!(
            serde_json::to_string(&a.manifest()).unwrap(),
            serde_json::to_string(&b.manifest()).unwrap()
        );
    }

    #[test]
    fn rejects_bad_configs() {
        let mut g = Generator::new(xy(), FieldKind::Float, 1);
        g.beta = 1.0;
        assert!(g.generate(10).is_err());
        let mut g = Generator::new(xy(), FieldKind::Rational, 1);
        g.noise = Noise::UniformBand(0.1);
        assert!(g.generate(10).is_err());
        let g = Generator::new(xy(), FieldKind::PrimeField(7), 1);
        assert!(g.generate(8).is_err());
    }

    #[test]
    fn gf_alphabet_noise() {
        let mut g = Generator::new(Truth::Poly(parse_poly("2*x", 1).unwrap()), FieldKind::PrimeField(11), 4);
        g.noise = Noise::DiscreteAlphabet(vec![rat(-1, 1), rat(0, 1), rat(1, 1)]);
        g.beta = 0.1;
        let AnyDataSet::Gf(d) = g.generate(11).unwrap() else { panic!() };
        let m = Modulus::new(11).unwrap();
        for (i, (x, z)) in d.iter().enumerate() {
            let diff = (*z - Fp::new(2, m) * x[0]).centered();
            match d.label(i).unwrap() {
                Label::Clean => assert_eq!(diff, 0),
                Label::Noisy => assert_eq!(diff.abs(), 1),
                Label::Corrupt => {}
            }
        }
        assert_eq!(d.labels().unwrap().iter().filter(|l| **l == Label::Corrupt).count(), 2);
    }
}
