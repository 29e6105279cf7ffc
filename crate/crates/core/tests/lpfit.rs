use byzfit::aggregate::{DataSet, Label};
use byzfit::lpfit::calibration::{self, C_STAR, DELTA, DERIVATIVE_RATIO_MAX, K_BOUNDEDNESS};
use byzfit::lpfit::{
    boundedness_audit, build_lp, byzantine_filter, derivative_bound_audit, fit_robust, replay_filter, rescale,
    sample_size, solve_lp, sup_distance, AxisMap, CenterRule, ChebModel, FilterConfig, LpError, RowKind,
    AUDIT_GRID,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `T_i(x) = cos(i arccos x)`, independent of the library's recurrence.
fn cheb(i: usize, x: f64) -> f64 {
    (i as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

/// Tensor Chebyshev series from `(index, coefficient)` pairs.
fn series(terms: &[([usize; 2], f64)], x: &[f64]) -> f64 {
    terms.iter().map(|(ij, c)| c * cheb(ij[0], x[0]) * cheb(ij[1], x[1])).sum()
}

fn set(points: Vec<Vec<f64>>, values: Vec<f64>) -> DataSet<f64> {
    let k = points[0].len();
    DataSet::new((), k, points, values).unwrap()
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect()
}

#[test]
fn row_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pts = random_points(&mut rng, 100);
    let inst = build_lp(&set(pts, vec![0.0; 100]), &[3, 3], 16).unwrap();
    assert_eq!(inst.rows().len(), 2 * 100 + 2 * 16 + 2 * 256);
    assert_eq!(inst.num_vars(), 4 * 4 + 1);
    assert_eq!(inst.count(RowKind::SampleBand), 200);
    assert_eq!(inst.count(RowKind::CoeffBox), 32);
    assert_eq!(inst.count(RowKind::GridBound), 512);
}

#[test]
fn build_rejects_bad_input() {
    let d = set(vec![vec![0.0, 0.0]], vec![1.5]);
    assert!(matches!(build_lp(&d, &[1, 1], 4), Err(LpError::OutOfRange { .. })));
    let d = set(vec![vec![0.0, 0.0]], vec![0.5]);
    assert!(build_lp(&d, &[1, 1], 1).is_err());
    assert!(build_lp(&d, &[1], 4).is_err());
}

#[test]
fn single_sample_constant() {
    let inst = build_lp(&set(vec![vec![0.1, 0.9]], vec![-0.4]), &[0, 0], 2).unwrap();
    let m = solve_lp(&inst).unwrap().model;
    assert!((m.coeff(&[0, 0]) + 0.4).abs() < 1e-12);
    assert_eq!(m.delta_achieved, 0.0);
    let inst = build_lp(&set(vec![vec![0.1, 0.9]], vec![-0.4]), &[3, 3], 0).unwrap();
    assert_eq!(solve_lp(&inst).unwrap().model.delta_achieved, 0.0);
}

#[test]
fn exact_xy_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pts = random_points(&mut rng, 200);
    let vals = pts.iter().map(|p| p[0] * p[1]).collect();
    let m = solve_lp(&build_lp(&set(pts, vals), &[2, 2], 16).unwrap()).unwrap().model;
    assert!(m.delta_achieved <= 1e-7);
    for (idx, c) in m.indexed_coeffs() {
        let expected = if idx == [1, 1] { 1.0 } else { 0.0 };
        assert!((c - expected).abs() <= 1e-6, "{idx:?}: {c}");
    }
}

#[test]
fn noisy_xy_within_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = sample_size(2, 0.05, 1.0).unwrap();
    let pts = random_points(&mut rng, n);
    let vals = pts.iter().map(|p| p[0] * p[1] + rng.gen_range(-0.05..0.05)).collect();
    let m = solve_lp(&build_lp(&set(pts, vals), &[2, 2], 32).unwrap()).unwrap().model;
    assert!((0.0..=0.05 + 1e-6).contains(&m.delta_achieved), "{}", m.delta_achieved);
}

/// Constant fit by hand: centre of the value range, half its width.
#[test]
fn constant_fit_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts = random_points(&mut rng, 300);
    let vals: Vec<f64> = (0..300).map(|_| 0.3 + rng.gen_range(-0.01..0.01)).collect();
    let (lo, hi) = vals.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    let m = solve_lp(&build_lp(&set(pts, vals), &[0, 0], 2).unwrap()).unwrap().model;
    assert!((m.coeff(&[0, 0]) - (lo + hi) / 2.0).abs() < 1e-12);
    assert!((m.delta_achieved - (hi - lo) / 2.0).abs() < 1e-12);
}

/// Longest alternating-sign run among residuals at the extreme magnitude.
fn alternations(residuals: &[f64], delta: f64) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &r in residuals {
        if (r.abs() - delta).abs() <= 1e-9 && r.signum() != last {
            count += 1;
            last = r.signum();
        }
    }
    count
}

/// On a discrete set the best degree-n approximation is characterised by
/// n + 2 alternating extremal residuals.
#[test]
fn optimum_equioscillates() {
    let xs: Vec<f64> = (0..61).map(|i| -1.0 + i as f64 / 30.0).collect();
    let f = |x: f64| 0.5 * (3.0 * x).sin() + 0.2 * x.abs();
    for n in 1..=5 {
        let data = DataSet::new((), 1, xs.iter().map(|&x| vec![x]).collect(), xs.iter().map(|&x| f(x)).collect())
            .unwrap();
        let m = solve_lp(&build_lp(&data, &[n], 0).unwrap()).unwrap().model;
        let r: Vec<f64> = xs
            .iter()
            .map(|&x| f(x) - (0..=n).map(|i| m.coeff(&[i]) * cheb(i, x)).sum::<f64>())
            .collect();
        let max = r.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!((max - m.delta_achieved).abs() < 1e-9, "n={n}");
        assert!(alternations(&r, m.delta_achieved) >= n + 2, "n={n}");
    }
}

#[test]
fn f32_instantiation() {
    let pts: Vec<Vec<f32>> = (0..40).map(|i| vec![-1.0 + i as f32 / 20.0, 0.5 - i as f32 / 40.0]).collect();
    let vals: Vec<f32> = pts.iter().map(|p| p[0] * p[1]).collect();
    let data = DataSet::new((), 2, pts, vals).unwrap();
    let m: ChebModel<f32> = solve_lp(&build_lp(&data, &[1, 1], 4).unwrap()).unwrap().model;
    assert!(m.delta_achieved < 1e-4);
    assert!((m.coeff(&[1, 1]) - 1.0).abs() < 1e-3);
}

#[test]
fn solver_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts = random_points(&mut rng, 400);
    let vals = pts.iter().map(|p| 0.3 * p[0] - 0.2 * p[1] * p[1] + rng.gen_range(-0.05..0.05)).collect();
    let inst = build_lp(&set(pts, vals), &[3, 3], 16).unwrap();
    let a = solve_lp(&inst).unwrap();
    let b = solve_lp(&inst.clone()).unwrap();
    let bits = |m: &ChebModel<f64>| m.coeffs().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.model), bits(&b.model));
    assert_eq!(a.model.delta_achieved.to_bits(), b.model.delta_achieved.to_bits());
    assert_eq!(a.pivots, b.pivots);
}

#[test]
fn sample_size_examples() {
    // 320 ln 80 = 1402.2...
    assert_eq!(sample_size(4, 0.05, 1.0).unwrap(), (320.0 * 80f64.ln()).ceil() as usize);
    assert_eq!(sample_size(4, 0.05, 1.0).unwrap(), 1403);
    assert_eq!(sample_size(2, 0.95, 1.0).unwrap(), 9);
    assert!(sample_size(4, 0.05, 0.0).is_err());
}

#[test]
fn rescale_examples() {
    let d = set(vec![vec![0.0, 0.5], vec![10.0, -0.5], vec![5.0, 0.0]], vec![0.1, 0.2, 0.3]);
    let r = rescale(&d).unwrap();
    assert_eq!(r.axes[0], AxisMap::fit(0.0, 10.0));
    for x in [0.0, 2.5, 10.0] {
        assert!((r.axes[0].apply(x) - (x / 5.0 - 1.0)).abs() < 1e-15);
    }
    assert!(r.axes[1].is_identity() && r.value.is_identity());
    let flat = set(vec![vec![2.0, 0.0], vec![2.0, 1.0]], vec![0.0, 0.0]);
    let r = rescale(&flat).unwrap();
    assert!(r.axes[0].degenerate && !r.warnings.is_empty());
    assert_eq!(r.data.point(0)[0], 0.0);
}

#[test]
fn markov_extremal_and_simple_audits() {
    for d in 1..=8 {
        let mut m = ChebModel::<f64>::zeros(vec![d, 0]);
        m.set(&[d, 0], 1.0);
        // T_d'(1) = d^2 and sup |T_d| = 1.
        let a = derivative_bound_audit(&m, AUDIT_GRID);
        assert!((a.ratio - 1.0).abs() < 1e-6, "d={d}: {}", a.ratio);
    }
    let mut c = ChebModel::<f64>::zeros(vec![2, 2]);
    c.set(&[0, 0], 0.7);
    assert!(derivative_bound_audit(&c, AUDIT_GRID).sup_partials.iter().all(|&s| s == 0.0));
    let mut xy = ChebModel::<f64>::zeros(vec![1, 1]);
    xy.set(&[1, 1], 1.0);
    let a = derivative_bound_audit(&xy, AUDIT_GRID);
    assert!((a.sup_partials[0] - 1.0).abs() < 1e-12 && (a.sup_partials[1] - 1.0).abs() < 1e-12);
}

/// Noise-width regime: feasible with the generator's noise width, close to the
/// generator, bounded and with tame derivatives.
#[test]
fn reference_fit_properties() {
    let truth = calibration::reference_truth();
    for seed in 0..3 {
        let p = calibration::feasibility(seed);
        let data = p.generator.generate(p.n).unwrap().to_float();
        let m = solve_lp(&build_lp(&data, &p.degrees, p.grid_per_axis).unwrap()).unwrap().model;
        assert!(m.delta_achieved <= DELTA + 1e-6);
        let err = sup_distance(|x| m.eval(x), |x| truth.eval_f64(x), 2, AUDIT_GRID);
        assert!(err <= C_STAR * DELTA, "seed {seed}: {err}");
        assert!(boundedness_audit(&m, p.grid_per_axis, 10).passes(K_BOUNDEDNESS));
        assert!(derivative_bound_audit(&m, AUDIT_GRID).ratio <= DERIVATIVE_RATIO_MAX);
        assert!(m.max_abs_coeff() <= std::f64::consts::SQRT_2 + 1e-9);
    }
}

fn labelled(seed: u64, n: usize, beta: f64, offset: f64) -> DataSet<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_points(&mut rng, n);
    let mut vals = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for p in &pts {
        let f = 0.4 * (p[0] + p[1]);
        if rng.gen::<f64>() < beta {
            let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            vals.push((f + s * offset).clamp(-1.0, 1.0));
            labels.push(Label::Corrupt);
        } else {
            vals.push(f + rng.gen_range(-0.05..0.05));
            labels.push(Label::Noisy);
        }
    }
    set(pts, vals).with_labels(labels).unwrap()
}

fn filter_cfg() -> FilterConfig {
    FilterConfig {
        square_halfwidth: Some(0.02),
        target_count: Some(2000),
        min_square_count: 20,
        ..FilterConfig::new(4, 0.05, 0.8)
    }
}

#[test]
fn filter_removes_labelled_corruption() {
    let data = labelled(6, 60_000, 0.2, 0.6);
    let out = byzantine_filter(&data, &filter_cfg()).unwrap();
    let judged: Vec<usize> = out.judged().collect();
    assert!(!judged.is_empty());
    // Every corrupt row a square looked at was dropped.
    for s in &out.squares {
        assert!(s.kept.iter().all(|&i| data.label(i) != Some(Label::Corrupt)));
    }
    assert!((0..out.data.len()).all(|i| out.data.label(i) != Some(Label::Corrupt)));
    assert!(out.data.len() > 2000);
}

#[test]
fn filter_clean_data_keeps_nearly_all() {
    let data = labelled(7, 40_000, 0.0, 0.0);
    let out = byzantine_filter(&data, &filter_cfg()).unwrap();
    let judged = out.judged().count();
    // Only boundary effects drop clean rows.
    assert!(out.data.len() as f64 >= 0.97 * judged as f64, "{} of {judged}", out.data.len());
}

#[test]
fn filter_all_corrupted_fails() {
    let data = labelled(8, 20_000, 1.0, 0.6);
    // Alternating signs put the median in no man's land only if the square
    // is balanced; a constant shift is kept as "clean". Scatter instead.
    let vals: Vec<f64> = (0..data.len()).map(|i| if i % 2 == 0 { 0.9 } else { -0.9 }).collect();
    let data = data.with_values(vals).unwrap();
    let res = byzantine_filter(&data, &filter_cfg());
    assert!(matches!(res, Err(LpError::InsufficientCleanData { .. })), "{res:?}");
}

#[test]
fn huge_delta_keeps_everything() {
    let data = labelled(9, 5000, 0.2, 0.6);
    let cfg = FilterConfig {
        square_halfwidth: Some(0.05),
        target_count: Some(usize::MAX - 1),
        min_square_count: 1,
        ..FilterConfig::new(4, 2.0, 0.8)
    };
    let res = byzantine_filter(&data, &cfg);
    // The target is unreachable, but every judged row is kept.
    let Err(LpError::InsufficientCleanData { kept, .. }) = res else { panic!("{res:?}") };
    assert_eq!(kept, data.len());
}

#[test]
fn mean_centre_also_filters() {
    let data = labelled(10, 60_000, 0.1, 0.9);
    let cfg = FilterConfig {
        center_rule: CenterRule::Mean,
        ..filter_cfg()
    };
    let out = byzantine_filter(&data, &cfg).unwrap();
    let leaked = (0..out.data.len()).filter(|&i| out.data.label(i) == Some(Label::Corrupt)).count();
    let corrupt_judged = out.judged().filter(|&i| data.label(i) == Some(Label::Corrupt)).count();
    assert!(leaked * 20 <= corrupt_judged.max(1), "{leaked} of {corrupt_judged}");
}

#[test]
fn fit_robust_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts = random_points(&mut rng, 20_000);
    let vals: Vec<f64> = (0..pts.len()).map(|_| 0.3 + rng.gen_range(-0.01..0.01)).collect();
    let cfg = FilterConfig {
        square_halfwidth: Some(0.05),
        target_count: Some(1000),
        ..FilterConfig::new(1, 0.01, 1.0)
    };
    let fit = fit_robust(&set(pts, vals), &cfg, &[0, 0], 2).unwrap();
    assert!((fit.model.coeff(&[0, 0]) - 0.3).abs() < 0.01);
    assert!((fit.model.delta_achieved - 0.01).abs() < 0.002);
}

#[test]
fn fit_robust_huge_delta_is_plain_fit() {
    let data = labelled(12, 3000, 0.0, 0.0);
    let cfg = FilterConfig {
        square_halfwidth: Some(0.05),
        target_count: Some(2999),
        min_square_count: 1,
        ..FilterConfig::new(2, 3.0, 1.0)
    };
    let fit = fit_robust(&data, &cfg, &[2, 2], 8).unwrap();
    assert_eq!(fit.filtered.len(), data.len());
    let plain = solve_lp(&build_lp(&data, &[2, 2], 8).unwrap()).unwrap().model;
    assert_eq!(fit.model, plain);
}

#[test]
fn filter_replay_is_idempotent() {
    let data = labelled(13, 30_000, 0.2, 0.6);
    let cfg = filter_cfg();
    let out = byzantine_filter(&data, &cfg).unwrap();
    let again = replay_filter(&out.data, &cfg, &out.squares).unwrap();
    assert_eq!(again.indices(), out.data.indices());
    assert_eq!(again.values(), out.data.values());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The generator's own coefficients are feasible, so the optimum is no
    /// worse than the noise width.
    #[test]
    fn feasible_at_noise_width(
        coeffs in prop::collection::vec(-1.0f64..1.0, 9),
        delta in 0.01f64..0.2,
        seed in any::<u64>(),
    ) {
        let l1: f64 = coeffs.iter().map(|c| c.abs()).sum();
        let scale = (1.0 - delta) / l1.max(1.0);
        let terms: Vec<([usize; 2], f64)> = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| ([k / 3, k % 3], c * scale))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_points(&mut rng, 150);
        let vals = pts.iter().map(|p| series(&terms, p) + rng.gen_range(-delta..delta)).collect();
        let inst = build_lp(&set(pts, vals), &[2, 2], 8).unwrap();
        let m = solve_lp(&inst).unwrap().model;
        prop_assert!(m.delta_achieved <= delta + 1e-6, "{} > {delta}", m.delta_achieved);
        prop_assert!(inst.max_violation(m.coeffs(), m.delta_achieved) <= 1e-6);
    }

    #[test]
    fn filter_output_is_a_subset(seed in any::<u64>(), beta in 0.0f64..0.3) {
        let data = labelled(seed, 8000, beta, 0.6);
        let cfg = FilterConfig {
            square_halfwidth: Some(0.05),
            target_count: Some(500),
            min_square_count: 5,
            ..FilterConfig::new(4, 0.05, 0.8)
        };
        if let Ok(out) = byzantine_filter(&data, &cfg) {
            let idx = out.data.indices();
            prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
            for (pos, &i) in idx.iter().enumerate() {
                prop_assert_eq!(out.data.point(pos), data.point(i));
                prop_assert_eq!(out.data.value(pos), data.value(i));
            }
            let replay = replay_filter(&out.data, &cfg, &out.squares).unwrap();
            prop_assert_eq!(replay.indices(), idx);
        }
    }
}
