//! Measures the regression constants frozen in `lpfit::calibration`.

use std::time::Instant;

use byzfit::aggregate::Label;
use byzfit::lpfit::calibration::{self, Preset};
use byzfit::lpfit::{
    boundedness_audit, build_lp, derivative_bound_audit, fit_robust, solve_lp, sup_distance, AUDIT_GRID,
};

fn run(name: &str, preset: fn(u64) -> Preset) {
    let truth = calibration::reference_truth();
    let (mut c, mut k, mut r) = (0.0f64, 0.0f64, 0.0f64);
    for seed in calibration::SEEDS {
        let p = preset(seed);
        let data = p.generator.generate(p.n).unwrap().to_float();
        let t0 = Instant::now();
        let (model, leaked) = match &p.filter {
            None => (solve_lp(&build_lp(&data, &p.degrees, p.grid_per_axis).unwrap()).unwrap().model, 0),
            Some(cfg) => {
                let fit = fit_robust(&data, cfg, &p.degrees, p.grid_per_axis).unwrap();
                let leaked = (0..fit.filtered.len())
                    .filter(|&i| fit.filtered.label(i) == Some(Label::Corrupt))
                    .count();
                (fit.model, leaked)
            }
        };
        let secs = t0.elapsed().as_secs_f64();
        let err = sup_distance(|x| model.eval(x), |x| truth.eval_f64(x), 2, AUDIT_GRID);
        let b = boundedness_audit(&model, p.grid_per_axis, 10);
        let d = derivative_bound_audit(&model, AUDIT_GRID);
        println!(
            "{name} seed {seed}: delta {:.5} sup err {err:.5} (c = {:.3}) sup|p| {:.4} K {:.4} ratio {:.4} leaked {leaked} {secs:.2}s",
            model.delta_achieved,
            err / calibration::DELTA,
            b.sup_p,
            b.implied_k,
            d.ratio
        );
        c = c.max(err / calibration::DELTA);
        k = k.max(b.implied_k);
        r = r.max(d.ratio);
    }
    println!("{name}: max c {c:.4}, max K {k:.5}, max ratio {r:.4}");
}

fn main() {
    run("feasibility", calibration::feasibility);
    run("byzantine", calibration::byzantine);
}
