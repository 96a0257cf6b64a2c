//! Seeded synthetic benchmark with a known signal shared across two
//! correlated responses, used by the test and acceptance harnesses.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::float;
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Parameters of the synthetic benchmark.
///
/// Five iid uniform(0,1) features; `x1` drives both responses, `x2` only the
/// first, `x3` only the second, `x4` and `x5` are pure noise:
///
/// ```text
/// y1 = 2·x1 + sin(2π·x2) + e1
/// y2 = 2·x1 + x3²        + e2
/// ```
///
/// with `(e1, e2)` zero-mean bivariate normal, both variances 0.25 and
/// correlation `noise_corr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub seed: u64,
    pub noise_corr: f64,
}

/// Generates the benchmark dataset. Pure function of the spec: the same spec
/// always yields a bitwise-identical dataset.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n < 50 {
        return Err(Error::InvalidSpec(format!(
            "n must be at least 50, got {}",
            spec.n
        )));
    }
    if !(spec.noise_corr > -1.0 && spec.noise_corr < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "noise_corr must lie in (-1, 1), got {}",
            spec.noise_corr
        )));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let rho = spec.noise_corr;
    let noise_sd = 0.5; // variance 0.25
    let mix = float::sqrt(1.0 - rho * rho);

    let mut features = Matrix::zeros(spec.n, 5);
    let mut responses = Matrix::zeros(spec.n, 2);
    for r in 0..spec.n {
        let mut x = [0.0f64; 5];
        for v in &mut x {
            *v = rng.gen::<f64>();
        }
        for (c, v) in x.iter().enumerate() {
            features.set(r, c, *v);
        }
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let e1 = noise_sd * z1;
        let e2 = noise_sd * (rho * z1 + mix * z2);
        let two_pi = 2.0 * core::f64::consts::PI;
        responses.set(r, 0, 2.0 * x[0] + float::sin(two_pi * x[1]) + e1);
        responses.set(r, 1, 2.0 * x[0] + x[2] * x[2] + e2);
    }

    let feature_names: Vec<String> = (1..=5).map(|i| format!("x{i}")).collect();
    Dataset::new(
        features,
        responses,
        feature_names.clone(),
        (0..5).collect(),
        feature_names,
        alloc::vec!["y1".to_string(), "y2".to_string()],
    )
}
