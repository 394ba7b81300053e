//! Per-step coupling rules, durations, and closed-form runtimes.
//!
//! Durations are stored as exact closed-form reals, never re-derived
//! from simulation. The disjoint variants use the asymptotic center
//! coupling `h0 (2^q (3/4 + beta))^{-alpha}` for both the schedule and
//! the closed-form totals, so the two agree to machine precision at
//! every level; the exact bracket form is exposed separately as
//! [`lr_center_coupling`].

use serde::{Deserialize, Serialize};

use crate::config::{Convention, ProtocolConfig, Variant};
use crate::geometry::{BlockHierarchy, HierarchyKind, Phase};
use crate::{ortho, Error, Result};

/// How the coupling matrix of a step is built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRule {
    /// Uniform coupling `c` between every pair of sites in the two blocks.
    IdealUniform { c: f64 },
    /// Couplings `h0 * distance^{-alpha}` from the actual layout.
    PhysicalPowerLaw { alpha: f64, h0: f64 },
    /// Sign pattern of the depth-`w` orthogonal family, scaled by `c`.
    MultiParticle { c: f64, w: u32 },
}

/// One protocol step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepSpec {
    pub q: u32,
    pub phase: Phase,
    pub rule: CouplingRule,
    /// +1 on expand steps, -1 on collapse steps.
    pub sign: f64,
    /// Evolution time in units of 1/h0.
    pub duration: f64,
}

/// Ordered step list: expand `q = 1..n`, then collapse `q = n..1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<StepSpec>,
    pub total_runtime: f64,
}

/// Simulated-versus-analytic runtime comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuntimeSummary {
    pub total: f64,
    pub per_step: Vec<f64>,
    pub closed_form: f64,
    pub convention: Convention,
}

/// Uniform inter-shell coupling of the nested protocol,
/// `C_q = h0 * 2^{-q alpha}`.
pub fn ideal_coupling(q: u32, alpha: f64, h0: f64) -> f64 {
    h0 * (-(q as f64) * alpha).exp2()
}

/// Center coupling of the gapped layout, exact bracket form
/// `[ceil(2^{q-2}) + beta 2^q + 2^{q-1}]^{-alpha}`.
///
/// Agrees with the asymptotic form `(2^q (3/4 + beta))^{-alpha}` for
/// `q >= 2` but not at `q = 1`, where the bracket rounds `2^{-1}` up.
pub fn lr_center_coupling(q: u32, alpha: f64, beta: f64) -> f64 {
    let quarter = if q >= 2 { (1u64 << (q - 2)) as f64 } else { 1.0 };
    let center = quarter + beta * (1u64 << q) as f64 + (1u64 << (q - 1)) as f64;
    center.powf(-alpha)
}

/// Asymptotic center coupling used by schedules and closed forms.
pub fn lr_asymptotic_coupling(q: u32, alpha: f64, beta: f64) -> f64 {
    ((1u64 << q) as f64 * (0.75 + beta)).powf(-alpha)
}

/// Rotation angle of a nested expand step under the given convention.
pub fn rotation_angle(d: u32, convention: Convention) -> f64 {
    let shell_ratio = ((1u64 << d) - 1) as f64;
    match convention {
        Convention::Corrected => shell_ratio.sqrt().atan(),
        Convention::Paper => shell_ratio.atan(),
    }
}

/// Duration of nested step `q`:
/// `phi / (C_q sqrt(|B_{q-1}| |B~_q|))`.
pub fn step_duration_ideal(q: u32, cfg: &ProtocolConfig, convention: Convention) -> f64 {
    let phi = rotation_angle(cfg.d, convention);
    let c = ideal_coupling(q, cfg.alpha, cfg.h0);
    let prev = ((q - 1) * cfg.d) as f64;
    let shell_ratio = ((1u64 << cfg.d) - 1) as f64;
    phi / (c * prev.exp2() * shell_ratio.sqrt())
}

/// Duration of a full pi/2 rotation between uniformly coupled blocks of
/// the given sizes: `pi / (2 c sqrt(size_a * size_b))`.
pub fn step_duration_pi_half(c: f64, size_a: usize, size_b: usize) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("coupling must be positive, got {c}")));
    }
    Ok(std::f64::consts::FRAC_PI_2 / (c * ((size_a * size_b) as f64).sqrt()))
}

/// Reduced coupling prefactor of the multi-qubit protocol, `K = C / sqrt(W)`.
pub fn mp_coupling(c: f64, big_w: usize) -> Result<f64> {
    if !big_w.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("block size {big_w} is not a power of 2")));
    }
    Ok(c / (big_w as f64).sqrt())
}

/// Survival factor of an excitation with decay rate `gamma` over time `tau`.
pub fn emission_fidelity(tau: f64, gamma: f64) -> Result<f64> {
    if !(tau >= 0.0) || !(gamma >= 0.0) {
        return Err(Error::InvalidArgument("emission_fidelity needs tau, gamma >= 0".into()));
    }
    Ok((-gamma * tau).exp())
}

/// Geometric series `sum_{q=lo}^{hi} g^q` with the `g = 1` limit handled.
fn geometric_sum(g: f64, lo: u32, hi: u32) -> f64 {
    let k = (hi - lo + 1) as f64;
    if (g - 1.0).abs() < 1e-15 {
        k
    } else {
        g.powi(lo as i32) * (g.powi((hi - lo + 1) as i32) - 1.0) / (g - 1.0)
    }
}

/// Duration of disjoint step `q` (single mode): pi/2 rotation between
/// blocks of `2^{q-1}` and `2^q` sites at the asymptotic center coupling.
fn lr_step_duration(q: u32, cfg: &ProtocolConfig) -> f64 {
    let c = cfg.h0 * lr_asymptotic_coupling(q, cfg.alpha, cfg.beta);
    // sqrt(2^{q-1} * 2^q) = 2^{q-1} sqrt 2
    std::f64::consts::FRAC_PI_2 / (c * ((q as f64) - 0.5).exp2())
}

/// Evaluates the closed-form total runtime of the configured protocol
/// together with the per-step durations it must match.
pub fn runtime_closed_form(cfg: &ProtocolConfig) -> Result<RuntimeSummary> {
    cfg.validate()?;
    let (per_phase, closed_form): (Vec<f64>, f64) = match cfg.variant {
        Variant::NestedIdeal => {
            let phi = rotation_angle(cfg.d, cfg.convention);
            let shell_ratio = ((1u64 << cfg.d) - 1) as f64;
            let per: Vec<f64> =
                (1..=cfg.n).map(|q| step_duration_ideal(q, cfg, cfg.convention)).collect();
            // tau = 2^{d+1} phi / (h0 sqrt(2^d - 1)) * sum_q 2^{q(alpha-d)}
            let pref = (cfg.d as f64 + 1.0).exp2() * phi / (cfg.h0 * shell_ratio.sqrt());
            let g = (cfg.alpha - cfg.d as f64).exp2();
            let closed = pref * geometric_sum(g, 1, cfg.n);
            (per, closed)
        }
        Variant::DisjointIdeal | Variant::DisjointPhysical => {
            let w = if cfg.m > 1 {
                ortho::block_size(cfg.m, cfg.d)?.trailing_zeros()
            } else {
                0
            };
            if cfg.n <= w {
                return Err(Error::InvalidConfig(format!(
                    "n = {} too small for {} modes (needs n > {w})",
                    cfg.n, cfg.m
                )));
            }
            let stretch = ((w as f64) / 2.0).exp2();
            let per: Vec<f64> =
                (w + 1..=cfg.n).map(|q| stretch * lr_step_duration(q, cfg)).collect();
            // tau = sqrt(W) * sqrt(2) pi (3/4 + beta)^alpha / h0 * sum_q 2^{q(alpha-1)}
            let pref = std::f64::consts::PI * std::f64::consts::SQRT_2
                * (0.75 + cfg.beta).powf(cfg.alpha)
                / cfg.h0;
            let g = (cfg.alpha - 1.0).exp2();
            let closed = stretch * pref * geometric_sum(g, w + 1, cfg.n);
            (per, closed)
        }
    };
    let total: f64 = per_phase.iter().sum::<f64>() * 2.0;
    let mut per_step = per_phase.clone();
    per_step.extend(per_phase.iter().rev());
    Ok(RuntimeSummary { total, per_step, closed_form, convention: cfg.convention })
}

/// Builds the full step list for a config and its matching geometry.
pub fn build_schedule(cfg: &ProtocolConfig, geom: &BlockHierarchy) -> Result<Schedule> {
    cfg.validate()?;
    let (lo, hi) = match (cfg.variant, geom.kind) {
        (Variant::NestedIdeal, HierarchyKind::Nested { d, n }) => {
            if d != cfg.d || n != cfg.n {
                return Err(Error::GeometryMismatch(format!(
                    "nested geometry is (d={d}, n={n}), config wants (d={}, n={})",
                    cfg.d, cfg.n
                )));
            }
            (1, n)
        }
        (v, HierarchyKind::Chain { n, base }) if v.is_disjoint() => {
            let w = if cfg.m > 1 {
                ortho::block_size(cfg.m, cfg.d)?.trailing_zeros()
            } else {
                0
            };
            if n != cfg.n || base != w {
                return Err(Error::GeometryMismatch(format!(
                    "chain geometry is (n={n}, base={base}), config wants (n={}, base={w})",
                    cfg.n
                )));
            }
            (base + 1, n)
        }
        _ => {
            return Err(Error::GeometryMismatch(format!(
                "variant {:?} does not match geometry {:?}",
                cfg.variant, geom.kind
            )));
        }
    };

    let make = |q: u32, phase: Phase| -> Result<StepSpec> {
        let sign = match phase {
            Phase::Expand => 1.0,
            Phase::Collapse => -1.0,
        };
        let (rule, duration) = match cfg.variant {
            Variant::NestedIdeal => {
                let c = ideal_coupling(q, cfg.alpha, cfg.h0);
                (CouplingRule::IdealUniform { c }, step_duration_ideal(q, cfg, cfg.convention))
            }
            Variant::DisjointIdeal => {
                let c = cfg.h0 * lr_asymptotic_coupling(q, cfg.alpha, cfg.beta);
                if cfg.m > 1 {
                    let w = lo - 1;
                    let stretch = ((w as f64) / 2.0).exp2();
                    (CouplingRule::MultiParticle { c, w }, stretch * lr_step_duration(q, cfg))
                } else {
                    (CouplingRule::IdealUniform { c }, lr_step_duration(q, cfg))
                }
            }
            Variant::DisjointPhysical => (
                CouplingRule::PhysicalPowerLaw { alpha: cfg.alpha, h0: cfg.h0 },
                lr_step_duration(q, cfg),
            ),
        };
        Ok(StepSpec { q, phase, rule, sign, duration })
    };

    let mut steps = Vec::with_capacity(2 * (hi - lo + 1) as usize);
    for q in lo..=hi {
        steps.push(make(q, Phase::Expand)?);
    }
    for q in (lo..=hi).rev() {
        steps.push(make(q, Phase::Collapse)?);
    }
    let total_runtime = steps.iter().map(|s| s.duration).sum();
    Ok(Schedule { steps, total_runtime })
}
