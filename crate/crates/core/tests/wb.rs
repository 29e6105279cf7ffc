use byzfit::aggregate::DataSet;
use byzfit::algebra::{rat, Fp, Modulus, MultiPoly, Rational};
use byzfit::wb::{
    degree_scan, degree_search, noise_enumerate_fit, wb_decode, EnumerationConfig, FitError, NoiseAlphabet,
    WbProblem,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Plain u64 arithmetic mod q, independent of the library's field type.

fn horner(coeffs: &[u64], x: u64, q: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % q)
}

/// Every coefficient vector of length `len` over Z/q, lowest degree first.
fn all_coeffs(q: u64, len: usize) -> impl Iterator<Item = Vec<u64>> {
    (0..q.pow(len as u32)).map(move |mut k| {
        (0..len)
            .map(|_| {
                let c = k % q;
                k /= q;
                c
            })
            .collect()
    })
}

fn gf_poly(coeffs: &[u64], m: Modulus) -> MultiPoly<Fp> {
    let c: Vec<Fp> = coeffs.iter().map(|&v| Fp::new(v, m)).collect();
    MultiPoly::univariate(0, 1, &m, &c)
}

fn gf_set(xs: &[u64], ys: &[u64], m: Modulus) -> DataSet<Fp> {
    let pts = xs.iter().map(|&x| vec![Fp::new(x, m)]).collect();
    let vals = ys.iter().map(|&y| Fp::new(y, m)).collect();
    DataSet::new(m, 1, pts, vals).unwrap()
}

fn gf_points(xs: &[u64], ys: &[u64], m: Modulus) -> Vec<(Fp, Fp)> {
    xs.iter().zip(ys).map(|(&x, &y)| (Fp::new(x, m), Fp::new(y, m))).collect()
}

#[test]
fn gf7_example_matches_brute_force() {
    let (xs, ys) = ([0, 1, 2, 3, 4], [1, 2, 5, 4, 5]);
    let within_one: Vec<Vec<u64>> = all_coeffs(7, 2)
        .filter(|c| xs.iter().zip(&ys).filter(|(&x, &y)| horner(c, x, 7) != y).count() <= 1)
        .collect();
    assert_eq!(within_one, vec![vec![1, 1]]);

    let m = Modulus::new(7).unwrap();
    let res = wb_decode(&WbProblem::new(gf_points(&xs, &ys, m), 1, 1).unwrap()).unwrap();
    assert_eq!(res.poly, gf_poly(&within_one[0], m));
    assert_eq!(res.flagged, vec![2]);
}

#[test]
fn constant_rational_no_errors() {
    let pts = (0..3).map(|x| (rat(x, 1), rat(3, 1))).collect();
    let res = wb_decode(&WbProblem::new(pts, 0, 0).unwrap()).unwrap();
    assert_eq!(res.poly, MultiPoly::constant(rat(3, 1), 1));
    assert!(res.flagged.is_empty());
}

#[test]
fn quadratic_gf101_two_errors() {
    let m = Modulus::new(101).unwrap();
    let truth = [100, 0, 1]; // x^2 - 1
    let xs: Vec<u64> = (0..7).collect();
    let mut ys: Vec<u64> = xs.iter().map(|&x| horner(&truth, x, 101)).collect();
    ys[1] = 57;
    ys[4] = 3;
    let res = wb_decode(&WbProblem::new(gf_points(&xs, &ys, m), 2, 2).unwrap()).unwrap();
    assert_eq!(res.poly, gf_poly(&truth, m));
    assert_eq!(res.flagged, vec![1, 4]);
}

#[test]
fn problem_validation() {
    let m = Modulus::new(7).unwrap();
    assert!(WbProblem::new(gf_points(&[0, 1, 2], &[1, 1, 1], m), 1, 1).is_err());
    assert!(WbProblem::new(gf_points(&[0, 1, 1, 2], &[1, 1, 1, 1], m), 1, 0).is_err());
    let floats = vec![(0.0, 1.0), (1.0, 2.0)];
    assert!(WbProblem::new(floats, 1, 0).is_err());
}

/// Accepts `p` if it is within the alphabet on all but
/// `floor((1 - rho) n)` rows.
fn predicate(c: &[u64], xs: &[u64], ys: &[u64], alphabet: &[u64], rho: f64, q: u64) -> bool {
    let allowed = ((1.0 - rho) * xs.len() as f64 + 1e-9).floor() as usize;
    let bad = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| !alphabet.contains(&((y + q - horner(c, x, q)) % q)))
        .count();
    bad <= allowed
}

/// `2x` over GF(11) at x = 0..11, noise in {-1,0,1}, one Byzantine row.
fn noisy_2x(seed: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<u64> = (0..11).collect();
    let mut ys: Vec<u64> = xs.iter().map(|&x| (2 * x + 11 + rng.gen_range(0..3) - 1) % 11).collect();
    let bad = rng.gen_range(0..11);
    // Off by 3..=8, so outside the band.
    ys[bad] = (2 * xs[bad] + rng.gen_range(3..=8)) % 11;
    (xs, ys)
}

#[test]
fn noise_enumeration_gf11_unique() {
    let q = 11;
    let m = Modulus::new(q).unwrap();
    let band = [10, 0, 1];
    let rho = 10.0 / 11.0;
    let alphabet = NoiseAlphabet::symmetric(1, &m).unwrap();
    for seed in 0..10 {
        let (xs, ys) = noisy_2x(seed);
        let passing: Vec<Vec<u64>> = all_coeffs(q, 2).filter(|c| predicate(c, &xs, &ys, &band, rho, q)).collect();
        if passing != vec![vec![0, 2]] {
            // The oracle found the instance ambiguous; equality would be meaningless.
            continue;
        }
        let fit = noise_enumerate_fit(&gf_set(&xs, &ys, m), rho, 1, &alphabet, &EnumerationConfig::default()).unwrap();
        assert_eq!(fit.poly, gf_poly(&[0, 2], m), "seed {seed}");
    }
}

#[test]
fn twelve_point_instance() {
    // GF(11) has only 11 distinct x, so the twelfth row repeats one.
    let q = 11;
    let m = Modulus::new(q).unwrap();
    let mut xs: Vec<u64> = (0..11).collect();
    xs.push(3);
    let mut ys: Vec<u64> = xs.iter().map(|&x| 2 * x % 11).collect();
    ys[2] = (ys[2] + 1) % 11;
    ys[7] = (ys[7] + 10) % 11;
    ys[9] = (ys[9] + 5) % 11; // Byzantine
    let rho = 11.0 / 12.0;
    let band = [10, 0, 1];
    let passing: Vec<Vec<u64>> = all_coeffs(q, 2).filter(|c| predicate(c, &xs, &ys, &band, rho, q)).collect();
    assert_eq!(passing, vec![vec![0, 2]]);
    let alphabet = NoiseAlphabet::symmetric(1, &m).unwrap();
    let fit = noise_enumerate_fit(&gf_set(&xs, &ys, m), rho, 1, &alphabet, &EnumerationConfig::default()).unwrap();
    assert_eq!(fit.poly, gf_poly(&[0, 2], m));
    assert_eq!(fit.flagged, vec![9]);
}

#[test]
fn zero_alphabet_reduces_to_decode() {
    let m = Modulus::new(101).unwrap();
    let xs: Vec<u64> = (0..9).collect();
    let ys: Vec<u64> = xs.iter().map(|&x| horner(&[4, 0, 7], x, 101)).collect();
    let zero = NoiseAlphabet::new(vec![Fp::new(0, m)], Fp::new(0, m)).unwrap();
    let fit = noise_enumerate_fit(&gf_set(&xs, &ys, m), 1.0, 2, &zero, &EnumerationConfig::default()).unwrap();
    assert_eq!(fit.poly, gf_poly(&[4, 0, 7], m));
    assert_eq!(fit.wb_calls, 1);
}

#[test]
fn all_corrupted_is_exhausted() {
    let m = Modulus::new(11).unwrap();
    // Values alternate far from any line: the oracle confirms no line passes.
    let xs: Vec<u64> = (0..8).collect();
    let ys = [0, 5, 0, 5, 0, 5, 0, 5];
    let rho = 1.0;
    let band = [10, 0, 1];
    assert!(all_coeffs(11, 2).all(|c| !predicate(&c, &xs, &ys, &band, rho, 11)));
    let alphabet = NoiseAlphabet::symmetric(1, &m).unwrap();
    let res = noise_enumerate_fit(&gf_set(&xs, &ys, m), rho, 1, &alphabet, &EnumerationConfig::default());
    assert!(matches!(res, Err(FitError::Exhausted { .. })), "{res:?}");
}

#[test]
fn budget_is_enforced() {
    let m = Modulus::new(11).unwrap();
    let xs: Vec<u64> = (0..8).collect();
    let ys = [0, 5, 0, 5, 0, 5, 0, 5];
    let alphabet = NoiseAlphabet::symmetric(1, &m).unwrap();
    let cfg = EnumerationConfig {
        budget: 3,
        ..Default::default()
    };
    let res = noise_enumerate_fit(&gf_set(&xs, &ys, m), 1.0, 1, &alphabet, &cfg);
    assert!(matches!(res, Err(FitError::BudgetExceeded { budget: 3, .. })), "{res:?}");
}

#[test]
fn degree_search_cubic_minimal() {
    let m = Modulus::new(101).unwrap();
    let truth = [5, 99, 0, 1]; // x^3 - 2x + 5
    let xs: Vec<u64> = (0..12).collect();
    let ys: Vec<u64> = xs.iter().map(|&x| horner(&truth, x, 101)).collect();
    let zero = NoiseAlphabet::new(vec![Fp::new(0, m)], Fp::new(0, m)).unwrap();
    let cfg = EnumerationConfig::default();
    let data = gf_set(&xs, &ys, m);
    let fit = degree_search(&data, 1.0, &zero, 8, &cfg).unwrap();
    assert_eq!(fit.degree, 3);
    assert_eq!(fit.fit.poly, gf_poly(&truth, m));
    assert!(noise_enumerate_fit(&data, 1.0, 2, &zero, &cfg).is_err());
}

#[test]
fn degree_search_constant() {
    let m = Modulus::new(13).unwrap();
    let zero = NoiseAlphabet::new(vec![Fp::new(0, m)], Fp::new(0, m)).unwrap();
    let data = gf_set(&[0, 1, 2, 3, 4], &[9; 5], m);
    assert_eq!(degree_search(&data, 1.0, &zero, 4, &EnumerationConfig::default()).unwrap().degree, 0);
}

#[test]
fn degree_search_random_data_fails() {
    let q = 5;
    let m = Modulus::new(q).unwrap();
    let xs: Vec<u64> = (0..5).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Resample until the exhaustive oracle confirms no polynomial of degree
    // <= 3 interpolates all five values.
    let ys = loop {
        let ys: Vec<u64> = xs.iter().map(|_| rng.gen_range(0..q)).collect();
        if all_coeffs(q, 4).all(|c| xs.iter().zip(&ys).any(|(&x, &y)| horner(&c, x, q) != y)) {
            break ys;
        }
    };
    let zero = NoiseAlphabet::new(vec![Fp::new(0, m)], Fp::new(0, m)).unwrap();
    let res = degree_search(&gf_set(&xs, &ys, m), 1.0, &zero, 3, &EnumerationConfig::default());
    assert_eq!(res.unwrap_err(), FitError::NoDegreeFits { d_max: 3 });
}

#[test]
fn recovery_1000_trials() {
    let q = 101;
    let m = Modulus::new(q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let d = rng.gen_range(0..=5usize);
        let t = rng.gen_range(0..=3usize);
        let n = 2 * t + d + 1;
        let coeffs: Vec<u64> = (0..=d).map(|_| rng.gen_range(0..q)).collect();
        let mut pool: Vec<u64> = (0..q).collect();
        pool.shuffle(&mut rng);
        let xs = &pool[..n];
        let mut ys: Vec<u64> = xs.iter().map(|&x| horner(&coeffs, x, q)).collect();
        let mut bad: Vec<usize> = rand::seq::index::sample(&mut rng, n, t).into_vec();
        bad.sort();
        for &i in &bad {
            ys[i] = (ys[i] + rng.gen_range(1..q)) % q;
        }
        let res = wb_decode(&WbProblem::new(gf_points(xs, &ys, m), d as u32, t).unwrap())
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert_eq!(res.poly, gf_poly(&coeffs, m), "trial {trial}");
        assert_eq!(res.flagged, bad, "trial {trial}");
    }
}

#[test]
fn rational_recovery() {
    // 3x^2/2 - x + 1/3 with two corruptions.
    let p = |x: i64| rat(3 * x * x, 2) - rat(x, 1) + rat(1, 3);
    let mut pts: Vec<(Rational, Rational)> = (-4..5).map(|x| (rat(x, 1), p(x))).collect();
    pts[0].1 = rat(1000, 7);
    pts[6].1 = rat(0, 1);
    let res = wb_decode(&WbProblem::new(pts, 2, 2).unwrap()).unwrap();
    for x in -10..10 {
        assert_eq!(res.poly.eval(&[rat(x, 1)]).unwrap(), p(x));
    }
    assert_eq!(res.flagged, vec![0, 6]);
}

#[test]
fn enumeration_is_deterministic() {
    let m = Modulus::new(11).unwrap();
    let (xs, ys) = noisy_2x(3);
    let alphabet = NoiseAlphabet::symmetric(1, &m).unwrap();
    let data = gf_set(&xs, &ys, m);
    let cfg = EnumerationConfig::default();
    let a = noise_enumerate_fit(&data, 10.0 / 11.0, 1, &alphabet, &cfg).unwrap();
    for _ in 0..5 {
        assert_eq!(noise_enumerate_fit(&data, 10.0 / 11.0, 1, &alphabet, &cfg).unwrap(), a);
    }
}

/// Sequential lexicographic enumeration built on the bare decoder; the
/// parallel search must pick the same vector.
#[test]
fn first_vector_matches_sequential_oracle() {
    let q = 11;
    let m = Modulus::new(q).unwrap();
    let offsets = [10u64, 0, 1]; // -1, 0, 1 in listed order
    let rho = 10.0 / 11.0;
    for seed in 0..5 {
        let (xs, ys) = noisy_2x(seed);
        let alphabet = NoiseAlphabet::symmetric(1, &m).unwrap();
        let fit = noise_enumerate_fit(&gf_set(&xs, &ys, m), rho, 1, &alphabet, &EnumerationConfig::default()).unwrap();
        let size = fit.subset.len();
        assert_eq!(fit.subset, (0..size).collect::<Vec<_>>());
        let t = ((1.0 - rho) * size as f64 - 1e-9).ceil() as usize;

        let mut expected = None;
        'outer: for k in 0..3u64.pow(size as u32) {
            let digits: Vec<usize> = (0..size).rev().map(|i| (k / 3u64.pow(i as u32) % 3) as usize).collect();
            let shifted: Vec<u64> = (0..size).map(|i| (ys[i] + offsets[digits[i]]) % q).collect();
            let prob = WbProblem::new(gf_points(&xs[..size], &shifted, m), 1, t).unwrap();
            if let Ok(r) = wb_decode(&prob) {
                let c: Vec<u64> = (0..2).map(|e| r.poly.coeff(&[e]).value()).collect();
                if predicate(&c, &xs, &ys, &offsets, rho, q) {
                    expected = Some((digits, r.poly));
                    break 'outer;
                }
            }
        }
        let (digits, poly) = expected.unwrap();
        assert_eq!(fit.poly, poly);
        let got: Vec<Fp> = digits.iter().map(|&i| Fp::new(offsets[i], m)).collect();
        assert_eq!(fit.noise_vector, got, "seed {seed}");
    }
}

fn flagged_oracle(poly: &MultiPoly<Fp>, xs: &[u64], ys: &[u64], m: Modulus) -> Vec<usize> {
    (0..xs.len())
        .filter(|&i| poly.eval(&[Fp::new(xs[i], m)]).unwrap() != Fp::new(ys[i], m))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flags_are_exactly_the_disagreements(
        coeffs in prop::collection::vec(0u64..101, 1..=4),
        t in 0usize..=3,
        seed in any::<u64>(),
    ) {
        let m = Modulus::new(101).unwrap();
        let d = coeffs.len() - 1;
        let n = 2 * t + d + 3;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<u64> = rand::seq::index::sample(&mut rng, 101, n).into_iter().map(|x| x as u64).collect();
        let mut ys: Vec<u64> = xs.iter().map(|&x| horner(&coeffs, x, 101)).collect();
        for i in rand::seq::index::sample(&mut rng, n, t) {
            ys[i] = rng.gen_range(0..101);
        }
        let res = wb_decode(&WbProblem::new(gf_points(&xs, &ys, m), d as u32, t).unwrap()).unwrap();
        prop_assert_eq!(&res.poly, &gf_poly(&coeffs, m));
        prop_assert_eq!(res.flagged.clone(), flagged_oracle(&res.poly, &xs, &ys, m));
        for &i in &res.flagged {
            prop_assert!(res.error_locator.eval(&[Fp::new(xs[i], m)]).unwrap() == Fp::new(0, m));
        }
    }

    #[test]
    fn binary_search_agrees_with_scan(
        coeffs in prop::collection::vec(0u64..13, 1..=4),
        bad in prop::collection::vec((0usize..12, 1u64..13), 0..=1),
    ) {
        let m = Modulus::new(13).unwrap();
        let xs: Vec<u64> = (0..12).collect();
        let mut ys: Vec<u64> = xs.iter().map(|&x| horner(&coeffs, x, 13)).collect();
        for (i, off) in bad {
            ys[i] = (ys[i] + off) % 13;
        }
        let zero = NoiseAlphabet::new(vec![Fp::new(0, m)], Fp::new(0, m)).unwrap();
        let data = gf_set(&xs, &ys, m);
        let cfg = EnumerationConfig::default();
        let a = degree_search(&data, 11.0 / 12.0, &zero, 5, &cfg).map(|f| (f.degree, f.fit.poly));
        let b = degree_scan(&data, 11.0 / 12.0, &zero, 5, &cfg).map(|f| (f.degree, f.fit.poly));
        prop_assert_eq!(a, b);
    }
}
