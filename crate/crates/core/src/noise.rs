//! Coupling disorder and the analytic error bounds.
//!
//! Multiplicative Gaussian noise maps every coupling
//! `h -> h (1 + eps X)` with independent standard normals. Streams are
//! keyed by `(seed, trial, phase, level)` so a trial can be reproduced
//! in isolation and trials can run on any number of threads without
//! changing results.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::StepHamiltonian;
use crate::geometry::{Phase, SiteLayout};
use crate::{Error, Result};

/// Whether disorder is redrawn at every step or frozen per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RedrawPolicy {
    /// Couplings are reprogrammed (and their errors redrawn) each step.
    #[default]
    PerStep,
    /// One disorder draw per trial, replayed at every step.
    Static,
}

/// Noise model selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    UncorrelatedGaussian { epsilon: f64 },
    PhysicalLr { alpha: f64, beta: f64 },
}

/// Full noise description for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub redraw_policy: RedrawPolicy,
}

fn splitmix64(x: &mut u64) -> u64 {
    *x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic generator for one protocol step of one trial.
pub fn step_rng(seed: u64, trial: u64, phase: Phase, q: u32, policy: RedrawPolicy) -> ChaCha8Rng {
    let (p, lvl) = match policy {
        RedrawPolicy::PerStep => {
            let p = match phase {
                Phase::Expand => 1u64,
                Phase::Collapse => 2u64,
            };
            (p, q as u64)
        }
        RedrawPolicy::Static => (0, 0),
    };
    let mut s = seed;
    let mut key = splitmix64(&mut s);
    s ^= trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    key ^= splitmix64(&mut s);
    s ^= p.wrapping_add(lvl << 8);
    key ^= splitmix64(&mut s);
    ChaCha8Rng::seed_from_u64(key)
}

/// Multiplies every coupling by `(1 + epsilon X)`, `X ~ N(0, 1)`.
/// Draws are consumed in column-major entry order.
pub fn gaussian_perturb(
    ideal: &StepHamiltonian,
    epsilon: f64,
    rng: &mut impl Rng,
) -> StepHamiltonian {
    if epsilon == 0.0 {
        return ideal.clone();
    }
    let couplings = ideal.couplings.map(|h| {
        let x: f64 = rng.sample(StandardNormal);
        h * (1.0 + epsilon * x)
    });
    StepHamiltonian::dense(
        ideal.block_a.clone(),
        ideal.block_b.clone(),
        couplings,
        ideal.sign,
    )
}

/// Full symmetric power-law coupling table `h_jk = r_jk^{-alpha}`.
/// Intended for small layouts; per-step assembly never materializes it.
pub fn physical_couplings(layout: &SiteLayout, alpha: f64) -> Result<DMatrix<f64>> {
    let n = layout.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = layout.pair_distance(i, j)?;
            if r == 0 {
                return Err(Error::GeometryMismatch(format!("sites {i} and {j} coincide")));
            }
            let h = (r as f64).powf(-alpha);
            m[(i, j)] = h;
            m[(j, i)] = h;
        }
    }
    Ok(m)
}

/// Splits a physical coupling block into the uniform ideal part
/// `((3/4 + beta) 2^q)^{-alpha}` and the remainder.
pub fn ideal_error_split(
    h: &DMatrix<f64>,
    q: u32,
    alpha: f64,
    beta: f64,
) -> (f64, DMatrix<f64>) {
    let ideal = ((0.75 + beta) * (1u64 << q) as f64).powf(-alpha);
    (ideal, h.map(|x| x - ideal))
}

/// Largest per-entry deviation from the ideal coupling at level `q`:
/// `2^{-q alpha} (beta^{-alpha} - (3/4 + beta)^{-alpha})`.
pub fn h_q_max(q: u32, alpha: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument("h_q_max diverges at beta = 0".into()));
    }
    Ok((-(q as f64) * alpha).exp2() * (beta.powf(-alpha) - (0.75 + beta).powf(-alpha)))
}

/// Operator-norm bound on the level-`q` coupling error block,
/// `sqrt(2) 2^{q-2} h_q_max`, via `|A|_2 <= sqrt(|A|_1 |A|_inf)`.
pub fn herr_norm_bound(q: u32, alpha: f64, beta: f64) -> Result<f64> {
    Ok(std::f64::consts::SQRT_2 * ((q as f64) - 2.0).exp2() * h_q_max(q, alpha, beta)?)
}

/// Exact operator norm of the realized error block of expand step `q`
/// on a gapped chain, for comparison against [`herr_norm_bound`].
pub fn realized_herr_norm(
    layout: &SiteLayout,
    geom: &crate::geometry::BlockHierarchy,
    q: u32,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let (a, b) = geom.step_blocks(Phase::Expand, q)?;
    let h = DMatrix::from_fn(a.len(), b.len(), |i, j| {
        (layout.pair_distance(a[i], b[j]).unwrap() as f64).powf(-alpha)
    });
    let (_, err) = ideal_error_split(&h, q, alpha, beta);
    crate::linalg::operator_norm(&err)
}

/// Sum mode for the random-noise error bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Returns the squared total, summing per-step bounds in quadrature.
    Quadrature,
    /// Returns the plain total, summing per-step bounds linearly.
    Linear,
}

fn delta_rand_parts(gamma: f64, d: u32) -> (f64, f64) {
    let two_d = (d as f64).exp2();
    let phi = (two_d - 1.0).atan();
    let bracket = 1.0 + 1.0 / (two_d - 1.0).sqrt();
    (phi, gamma * phi * bracket)
}

/// Per-step propagator error bound at confidence `gamma`:
/// `gamma eps phi 2^{d/2} (1 + (2^d - 1)^{-1/2}) 2^{-q d/2}`.
pub fn delta_rand_step(epsilon: f64, gamma: f64, d: u32, q: u32) -> f64 {
    let (_, core) = delta_rand_parts(gamma, d);
    epsilon * core * ((d as f64) * (1.0 - q as f64) / 2.0).exp2()
}

/// Total random-noise error bound over a distance-`R` protocol.
pub fn delta_rand_bound(epsilon: f64, gamma: f64, d: u32, big_r: f64, mode: DeltaMode) -> f64 {
    let (_, core) = delta_rand_parts(gamma, d);
    let df = d as f64;
    match mode {
        DeltaMode::Quadrature => {
            2.0 * (epsilon * core).powi(2) * (1.0 - big_r.powf(-df)) / (1.0 - (-df).exp2())
        }
        DeltaMode::Linear => {
            2.0 * epsilon * core * (1.0 - big_r.powf(-df / 2.0)) / (1.0 - (-df / 2.0).exp2())
        }
    }
}

/// A bound value plus a flag marking it as vacuous (weaker than the
/// trivial bound).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub vacuous: bool,
}

/// Probability that any step violates its `gamma`-confidence norm bound:
/// `2^{-A(d+1)+2} (1 - R^{-Ad}) / (1 - 2^{-Ad})` with
/// `A = (gamma - 1)^2 (1 + 2^{1-d} sqrt(2^d - 1)) / 2`.
pub fn p_fail_bound(gamma: f64, d: u32, big_r: f64) -> Result<Bound> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument("p_fail_bound requires gamma > 1".into()));
    }
    let df = d as f64;
    let two_d = df.exp2();
    let a = (gamma - 1.0).powi(2) * (1.0 + (1.0 - df).exp2() * (two_d - 1.0).sqrt()) / 2.0;
    let value =
        (2.0 - a * (df + 1.0)).exp2() * (1.0 - big_r.powf(-a * df)) / (1.0 - (-a * df).exp2());
    Ok(Bound { value, vacuous: !(value < 1.0) })
}

/// Samples `trials` Gaussian `n1 x n2` matrices and returns the fraction
/// whose spectral norm exceeds `sigma (sqrt n1 + sqrt n2) + t`. The
/// concentration bound predicts a rate of at most `2 exp(-t^2 / 2 sigma^2)`.
pub fn bai_yin_check(n1: usize, n2: usize, sigma: f64, t: f64, trials: u32, seed: u64) -> Result<f64> {
    if n1 < n2 || n2 < 1 || trials < 1 {
        return Err(Error::InvalidArgument("bai_yin_check needs n1 >= n2 >= 1, trials >= 1".into()));
    }
    let threshold = sigma * ((n1 as f64).sqrt() + (n2 as f64).sqrt()) + t;
    let mut violations = 0u32;
    for trial in 0..trials {
        let mut rng = step_rng(seed, trial as u64, Phase::Expand, 0, RedrawPolicy::PerStep);
        let m = DMatrix::from_fn(n1, n2, |_, _| {
            let x: f64 = rng.sample(StandardNormal);
            sigma * x
        });
        if crate::linalg::operator_norm(&m)? > threshold {
            violations += 1;
        }
    }
    Ok(violations as f64 / trials as f64)
}

/// Form selector for the long-range error bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrMode {
    Exact,
    LargeBeta,
}

/// Per-step long-range error bound,
/// `(pi/4) ((1 + 3/(4 beta))^alpha - 1)`, independent of the level.
pub fn delta_lr_step(alpha: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument("delta_lr_step requires beta > 0".into()));
    }
    Ok(std::f64::consts::FRAC_PI_4 * ((1.0 + 0.75 / beta).powf(alpha) - 1.0))
}

/// Squared total long-range error bound over distance `R`; negative
/// log arguments are clamped to zero (documented clamp).
pub fn delta_lr_bound(big_r: f64, beta: f64, alpha: f64, mode: LrMode) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument("delta_lr_bound requires beta > 0".into()));
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let value = match mode {
        LrMode::Exact => {
            let per = (1.0 + 0.75 / beta).powf(alpha) - 1.0;
            pi2 / 8.0 * per * per * (big_r / (4.0 * beta + 3.0) + 1.0).log2()
        }
        LrMode::LargeBeta => {
            9.0 * pi2 / 128.0 * (alpha / beta).powi(2) * (big_r / (4.0 * beta + 3.0)).log2()
        }
    };
    Ok(value.max(0.0))
}

/// All analytic random-noise bounds for one configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    /// Per-step bounds for expand levels `q = 1..n`.
    pub per_step: Vec<f64>,
    /// Squared quadrature total.
    pub total_quadrature: f64,
    /// Linear total.
    pub total_linear: f64,
    pub p_fail: Bound,
    pub gamma: f64,
}

/// Evaluates every random-noise bound at distance `R = 2^n`.
pub fn bound_report(epsilon: f64, gamma: f64, d: u32, n: u32) -> Result<BoundReport> {
    let big_r = (n as f64).exp2();
    let per_step = (1..=n).map(|q| delta_rand_step(epsilon, gamma, d, q)).collect();
    let p_fail = if gamma > 1.0 {
        p_fail_bound(gamma, d, big_r)?
    } else {
        Bound { value: 1.0, vacuous: true }
    };
    Ok(BoundReport {
        per_step,
        total_quadrature: delta_rand_bound(epsilon, gamma, d, big_r, DeltaMode::Quadrature),
        total_linear: delta_rand_bound(epsilon, gamma, d, big_r, DeltaMode::Linear),
        p_fail,
        gamma,
    })
}
