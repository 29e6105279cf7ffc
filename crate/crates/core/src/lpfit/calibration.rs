//! Reference configurations for the LP path and the regression constants
//! measured on them.
//!
//! The approximation constant and the boundedness constant have no stated
//! values; they were measured over seeds 0..20 of the presets below with
//! `cargo run --release -p byzfit-core --example calibrate` and frozen with
//! headroom. A change that moves the measurements past these values is a
//! regression.

use crate::aggregate::{Corruption, Generator, Noise, Truth};
use crate::algebra::{parse_poly, FieldKind, MultiPoly, Rational};

use super::filter::{CenterRule, FilterConfig};
use super::{default_grid, sample_size};

/// `sup |p - f| <= C_STAR * delta` for both presets at `d = 4`.
pub const C_STAR: f64 = 1.5;

/// `sup |p| <= 1 + K * (n^3 m + m^3 n) / |I|` on the 10x audit grid.
pub const K_BOUNDEDNESS: f64 = 0.01;

/// `sup |dp| / ((n+m)^2 sup |p|)` for every model the presets produce.
pub const DERIVATIVE_RATIO_MAX: f64 = 0.05;

pub const DELTA: f64 = 0.05;
pub const DEGREE: u32 = 4;
pub const SEEDS: std::ops::Range<u64> = 0..20;

/// Total degree 4, `|f| <= 0.95` on `[-1, 1]^2`.
pub const REFERENCE_TRUTH: &str = "3/10*x^4 + 1/5*x^2*y^2 - 1/4*x*y^3 + 1/10*x - 1/10*y";

pub fn reference_truth() -> MultiPoly<Rational> {
    parse_poly(REFERENCE_TRUTH, 2).expect("valid literal")
}

/// A generator, a row count and how to fit it.
#[derive(Clone, Debug)]
pub struct Preset {
    pub generator: Generator,
    pub n: usize,
    /// Per-axis Chebyshev degrees of the fitted model.
    pub degrees: Vec<usize>,
    pub grid_per_axis: usize,
    pub filter: Option<FilterConfig>,
}

/// Uniform noise of width `DELTA`, no corruption, `sample_size(4, DELTA)`
/// rows.
pub fn feasibility(seed: u64) -> Preset {
    let mut generator = Generator::new(Truth::Poly(reference_truth()), FieldKind::Float, seed);
    generator.noise = Noise::UniformBand(DELTA);
    Preset {
        generator,
        n: sample_size(DEGREE, DELTA, 1.0).expect("valid constants"),
        degrees: vec![DEGREE as usize; 2],
        grid_per_axis: default_grid(DEGREE, 2),
        filter: None,
    }
}

/// A fifth of the rows pushed `3 delta` or more off the truth. Squares of
/// half-width 0.0075 over 500k rows hold about 28 rows each, enough that
/// the median is a clean value; the filter stops after 3000 kept rows.
pub fn byzantine(seed: u64) -> Preset {
    let mut p = feasibility(seed);
    p.generator.beta = 0.2;
    p.generator.corruption = Corruption::Adversarial(3.0 * DELTA);
    p.n = 500_000;
    p.filter = Some(FilterConfig {
        degree: DEGREE,
        delta: DELTA,
        rho_clean: 0.8,
        square_halfwidth: Some(0.0075),
        target_count: Some(3000),
        center_rule: CenterRule::Median,
        min_square_count: 25,
    });
    p
}
