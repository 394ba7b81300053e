//! Single-excitation dynamics: per-step Hamiltonians, exact orthogonal
//! propagators, and full protocol runs.
//!
//! Each step couples two disjoint site blocks A and B through a real
//! bipartite matrix h. In the single-excitation sector the generator is
//! real antisymmetric, so the propagator is real orthogonal and can be
//! written in closed form from the thin SVD `h = U diag(s) V^T`:
//! with `c = cos(t s)` and `sn = sin(t s)`,
//!
//! `psi_A' = psi_A + U((c-1) . U^T psi_A) - sign * U(sn . V^T psi_B)`
//! `psi_B' = psi_B + V((c-1) . V^T psi_B) + sign * V(sn . U^T psi_A)`
//!
//! Uniform and sign-pattern blocks have analytic SVDs, so ideal steps
//! never touch the numerical decomposition.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::config::{ProtocolConfig, Variant};
use crate::geometry::{self, BlockHierarchy, Phase, SiteLayout};
use crate::noise::{self, RedrawPolicy};
use crate::ortho;
use crate::schedule::{self, CouplingRule, StepSpec};
use crate::{Error, Result};

/// Spectral norm; re-exported here because error measurements live in
/// this module.
pub use crate::linalg::operator_norm;

/// The coupling block of one protocol step.
#[derive(Debug, Clone)]
pub struct StepHamiltonian {
    /// Site indices of the first block.
    pub block_a: Vec<usize>,
    /// Site indices of the second block.
    pub block_b: Vec<usize>,
    /// Bipartite couplings, `block_a.len() x block_b.len()`.
    pub couplings: DMatrix<f64>,
    /// +1 or -1; collapse steps flip the generator.
    pub sign: f64,
    /// Analytic structure of the block, when known.
    structure: Structure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Structure {
    /// All entries equal; rank-1 SVD is analytic.
    Uniform,
    /// `c` times the depth-`w` sign pattern; SVD is analytic.
    SignPattern { w: u32 },
    /// Anything else; SVD is computed numerically.
    Generic,
}

impl StepHamiltonian {
    /// Wraps an explicit coupling block with no assumed structure.
    pub fn dense(block_a: Vec<usize>, block_b: Vec<usize>, couplings: DMatrix<f64>, sign: f64) -> Self {
        StepHamiltonian { block_a, block_b, couplings, sign, structure: Structure::Generic }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.couplings.shape()
    }

    /// Difference of the coupling blocks, `self - other`.
    pub fn coupling_difference(&self, other: &StepHamiltonian) -> Result<DMatrix<f64>> {
        if self.couplings.shape() != other.couplings.shape() {
            return Err(Error::InvalidArgument("coupling blocks differ in shape".into()));
        }
        Ok(&self.couplings - &other.couplings)
    }
}

/// Builds the coupling block of one step from the schedule and geometry.
pub fn assemble_hamiltonian(
    step: &StepSpec,
    geom: &BlockHierarchy,
    layout: &SiteLayout,
) -> Result<StepHamiltonian> {
    let (a, b) = geom.step_blocks(step.phase, step.q)?;
    let (block_a, block_b) = (a.to_vec(), b.to_vec());
    let (couplings, structure) = match step.rule {
        CouplingRule::IdealUniform { c } => {
            (DMatrix::from_element(block_a.len(), block_b.len(), c), Structure::Uniform)
        }
        CouplingRule::PhysicalPowerLaw { alpha, h0 } => {
            let m = DMatrix::from_fn(block_a.len(), block_b.len(), |i, j| {
                let r = layout.pair_distance(block_a[i], block_b[j]).unwrap() as f64;
                h0 * r.powf(-alpha)
            });
            (m, Structure::Generic)
        }
        CouplingRule::MultiParticle { c, w } => {
            let t = ortho::tile_pattern(w, block_a.len(), block_b.len())?;
            (t * c, Structure::SignPattern { w })
        }
    };
    Ok(StepHamiltonian { block_a, block_b, couplings, sign: step.sign, structure })
}

/// SVD factors of a coupling block, reused across applications.
pub struct Propagator {
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    sigma: DVector<f64>,
}

impl Propagator {
    pub fn new(h: &StepHamiltonian) -> Result<Propagator> {
        let (na, nb) = h.couplings.shape();
        match h.structure {
            Structure::Uniform => {
                let c = h.couplings[(0, 0)];
                let u = DMatrix::from_element(na, 1, 1.0 / (na as f64).sqrt());
                let v = DMatrix::from_element(nb, 1, 1.0 / (nb as f64).sqrt());
                let sigma = DVector::from_element(1, c * ((na * nb) as f64).sqrt());
                Ok(Propagator { u, v, sigma })
            }
            Structure::SignPattern { w } => {
                let width = 1usize << w;
                let c = h.couplings[(0, 0)].abs();
                let s = ortho::recursive_family(w)?.vectors;
                // tile = sqrt(ab/W) (U_rep S / sqrt W) V_rep^T
                let u_rep = ortho::replicated_family(w, na)?;
                let u = u_rep * &s / (width as f64).sqrt();
                let v = ortho::replicated_family(w, nb)?;
                let sigma = DVector::from_element(
                    width,
                    c * ((na * nb) as f64 / width as f64).sqrt(),
                );
                Ok(Propagator { u, v, sigma })
            }
            Structure::Generic => {
                let (u, sigma, v) = crate::linalg::svd_thin(&h.couplings)?;
                Ok(Propagator { u, v, sigma })
            }
        }
    }

    /// Applies `exp(-i H t)` in place to a full state vector.
    pub fn apply(&self, h: &StepHamiltonian, state: &mut DVector<f64>, t: f64) {
        let mut cols = DMatrix::from_column_slice(state.len(), 1, state.as_slice());
        self.apply_columns(h, &mut cols, t);
        state.copy_from(&cols.column(0).into_owned());
    }

    /// Applies `exp(-i H t)` in place to every column of a mode matrix.
    pub fn apply_columns(&self, h: &StepHamiltonian, state: &mut DMatrix<f64>, t: f64) {
        let k = self.sigma.len();
        let cm1 = DVector::from_fn(k, |i, _| (t * self.sigma[i]).cos() - 1.0);
        let sn = DVector::from_fn(k, |i, _| (t * self.sigma[i]).sin());
        let ncols = state.ncols();
        let psi_a = DMatrix::from_fn(h.block_a.len(), ncols, |i, j| state[(h.block_a[i], j)]);
        let psi_b = DMatrix::from_fn(h.block_b.len(), ncols, |i, j| state[(h.block_b[i], j)]);
        let ua = self.u.transpose() * &psi_a;
        let vb = self.v.transpose() * &psi_b;
        let scale = |coef: &DVector<f64>, m: &DMatrix<f64>| {
            let mut out = m.clone();
            for j in 0..out.ncols() {
                for i in 0..out.nrows() {
                    out[(i, j)] *= coef[i];
                }
            }
            out
        };
        let new_a = psi_a + &self.u * (scale(&cm1, &ua) - h.sign * scale(&sn, &vb));
        let new_b = psi_b + &self.v * (scale(&cm1, &vb) + h.sign * scale(&sn, &ua));
        for j in 0..ncols {
            for (i, &site) in h.block_a.iter().enumerate() {
                state[(site, j)] = new_a[(i, j)];
            }
            for (i, &site) in h.block_b.iter().enumerate() {
                state[(site, j)] = new_b[(i, j)];
            }
        }
    }

    /// Dense orthogonal propagator on the step's `(a + b)`-site subspace,
    /// ordered block A then block B.
    pub fn matrix(&self, h: &StepHamiltonian, t: f64) -> DMatrix<f64> {
        let (na, nb) = h.couplings.shape();
        let n = na + nb;
        // relabel the step onto contiguous indices 0..n and push the
        // identity through it
        let local = StepHamiltonian {
            block_a: (0..na).collect(),
            block_b: (na..n).collect(),
            couplings: h.couplings.clone(),
            sign: h.sign,
            structure: h.structure,
        };
        let mut m = DMatrix::identity(n, n);
        self.apply_columns(&local, &mut m, t);
        m
    }
}

/// Convenience wrapper: one step applied to a state vector.
pub fn propagate(state: &mut DVector<f64>, h: &StepHamiltonian, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument("evolution time must be >= 0".into()));
    }
    Propagator::new(h)?.apply(h, state, t);
    Ok(())
}

/// Convenience wrapper: one step applied to a mode matrix.
pub fn propagate_modes(state: &mut DMatrix<f64>, h: &StepHamiltonian, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument("evolution time must be >= 0".into()));
    }
    Propagator::new(h)?.apply_columns(h, state, t);
    Ok(())
}

/// Outcome of one protocol run.
#[derive(Debug, Clone)]
pub struct TrialResult {
    /// Probability at the target site.
    pub p_final: f64,
    /// After each expand step, the worst deviation of the in-block
    /// amplitude magnitudes from uniform (single-mode variants only).
    pub per_step_uniformity: Vec<f64>,
    /// Total evolved time.
    pub runtime: f64,
}

/// Runs one trial of a single-qubit protocol. Noise is drawn from the
/// config's seed and the trial index when `epsilon > 0`.
pub fn run_single(cfg: &ProtocolConfig, trial: u64) -> Result<TrialResult> {
    run_single_policy(cfg, trial, RedrawPolicy::PerStep)
}

/// As [`run_single`] with an explicit noise redraw policy.
pub fn run_single_policy(
    cfg: &ProtocolConfig,
    trial: u64,
    policy: RedrawPolicy,
) -> Result<TrialResult> {
    cfg.validate()?;
    if cfg.m != 1 {
        return Err(Error::InvalidConfig("run_single requires m = 1".into()));
    }
    let (layout, geom) = build_geometry(cfg)?;
    let sched = schedule::build_schedule(cfg, &geom)?;

    let n_sites = layout.len();
    let mut state = DVector::zeros(n_sites);
    state[geom.source_site] = 1.0;

    let mut per_step_uniformity = Vec::new();
    for step in &sched.steps {
        let mut h = assemble_hamiltonian(step, &geom, &layout)?;
        if cfg.epsilon > 0.0 {
            let mut rng = noise::step_rng(cfg.seed, trial, step.phase, step.q, policy);
            h = noise::gaussian_perturb(&h, cfg.epsilon, &mut rng);
        }
        propagate(&mut state, &h, step.duration)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("norm drifted to {norm}")));
        }
        if step.phase == Phase::Expand && cfg.epsilon == 0.0 {
            per_step_uniformity.push(uniformity_deviation(&state, &geom, step.q, cfg));
        }
    }
    let p_final = state[geom.target_site] * state[geom.target_site];
    Ok(TrialResult { p_final, per_step_uniformity, runtime: sched.total_runtime })
}

/// Worst deviation from the ideal uniform magnitude over the level the
/// excitation should occupy after expand step `q`.
fn uniformity_deviation(
    state: &DVector<f64>,
    geom: &BlockHierarchy,
    q: u32,
    cfg: &ProtocolConfig,
) -> f64 {
    let members: &[usize] = match geom.kind {
        geometry::HierarchyKind::Nested { .. } => &geom.levels[q as usize],
        geometry::HierarchyKind::Chain { base, .. } => &geom.levels[(q - base) as usize],
    };
    let ideal = 1.0 / (members.len() as f64).sqrt();
    let _ = cfg;
    members.iter().map(|&i| (state[i].abs() - ideal).abs()).fold(0.0, f64::max)
}

/// Outcome of a multi-qubit run.
#[derive(Debug, Clone)]
pub struct MultiResult {
    /// `|<target_a| U |source_a>|^2` per transferred mode.
    pub per_qubit: Vec<f64>,
    /// `|det(T^T U S)|^2` over the m-mode subspace.
    pub aggregate: f64,
    pub runtime: f64,
}

/// Runs the m-qubit transfer protocol on the gapped chain.
pub fn run_multi(cfg: &ProtocolConfig) -> Result<MultiResult> {
    cfg.validate()?;
    let (layout, geom) = build_geometry(cfg)?;
    let sched = schedule::build_schedule(cfg, &geom)?;
    let big_w = ortho::block_size(cfg.m, cfg.d)?;

    let n_sites = layout.len();
    // Source modes: the site basis on the first block.
    let mut modes = DMatrix::zeros(n_sites, cfg.m);
    for a in 0..cfg.m {
        modes[(geom.levels[0][a], a)] = 1.0;
    }
    for step in &sched.steps {
        let mut h = assemble_hamiltonian(step, &geom, &layout)?;
        if cfg.epsilon > 0.0 {
            let mut rng =
                noise::step_rng(cfg.seed, 0, step.phase, step.q, RedrawPolicy::PerStep);
            h = noise::gaussian_perturb(&h, cfg.epsilon, &mut rng);
        }
        propagate_modes(&mut modes, &h, step.duration)?;
    }
    // Target modes: the site basis on the last block, same offsets.
    let last = geom.levels.last().unwrap();
    debug_assert_eq!(last.len(), big_w);
    let mut overlap = DMatrix::zeros(cfg.m, cfg.m);
    let mut per_qubit = Vec::with_capacity(cfg.m);
    for a in 0..cfg.m {
        let target = last[a];
        per_qubit.push(modes[(target, a)] * modes[(target, a)]);
        for b in 0..cfg.m {
            overlap[(a, b)] = modes[(last[a], b)];
        }
    }
    let aggregate = overlap.determinant().powi(2);
    Ok(MultiResult { per_qubit, aggregate, runtime: sched.total_runtime })
}

/// Builds the layout and hierarchy matching a config.
pub fn build_geometry(cfg: &ProtocolConfig) -> Result<(SiteLayout, BlockHierarchy)> {
    match cfg.variant {
        Variant::NestedIdeal => geometry::nested_hierarchy(cfg.d, cfg.n),
        Variant::DisjointIdeal | Variant::DisjointPhysical => {
            let w = if cfg.m > 1 {
                ortho::block_size(cfg.m, cfg.d)?.trailing_zeros()
            } else {
                0
            };
            geometry::disjoint_chain(cfg.n, cfg.beta, w)
        }
    }
}

/// Operator-norm distance of the two step propagators,
/// `|| exp(-i H t) - exp(-i H0 t) ||`.
pub fn step_error(h: &StepHamiltonian, h0: &StepHamiltonian, t: f64) -> Result<f64> {
    if h.couplings.shape() != h0.couplings.shape() {
        return Err(Error::InvalidArgument("step_error needs same-shape blocks".into()));
    }
    let pa = Propagator::new(h)?.matrix(h, t);
    let pb = Propagator::new(h0)?.matrix(h0, t);
    operator_norm(&(pa - pb))
}

/// Writes per-site occupation probabilities as CSV (`site,prob`).
pub fn dump_amplitudes(state: &DVector<f64>, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(f, "site,prob").map_err(|e| Error::io(path, e))?;
    for (i, x) in state.iter().enumerate() {
        writeln!(f, "{i},{:.16e}", x * x).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Convention;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn two_site(h: f64) -> StepHamiltonian {
        StepHamiltonian::dense(vec![0], vec![1], DMatrix::from_element(1, 1, h), 1.0)
    }

    #[test]
    fn two_level_pi_pulse() {
        let h = two_site(0.7);
        let mut psi = DVector::from_vec(vec![1.0, 0.0]);
        propagate(&mut psi, &h, PI / (2.0 * 0.7)).unwrap();
        assert_abs_diff_eq!(psi[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(psi[1].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let h = two_site(1.3);
        let mut psi = DVector::from_vec(vec![0.6, 0.8]);
        propagate(&mut psi, &h, 0.0).unwrap();
        assert_abs_diff_eq!(psi[0], 0.6, epsilon = 1e-14);
        assert_abs_diff_eq!(psi[1], 0.8, epsilon = 1e-14);
    }

    #[test]
    fn analytic_and_generic_propagators_agree() {
        // uniform block through both code paths
        let a = vec![0, 1, 2];
        let b = vec![3, 4];
        let c = DMatrix::from_element(3, 2, 0.4);
        let uni = StepHamiltonian {
            block_a: a.clone(), block_b: b.clone(), couplings: c.clone(), sign: -1.0,
            structure: Structure::Uniform,
        };
        let gen = StepHamiltonian::dense(a, b, c, -1.0);
        let mut s1 = DVector::from_fn(5, |i, _| (i as f64 + 1.0) / 55.0f64.sqrt());
        let mut s2 = s1.clone();
        propagate(&mut s1, &uni, 0.9).unwrap();
        propagate(&mut s2, &gen, 0.9).unwrap();
        assert_abs_diff_eq!((s1 - s2).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sign_pattern_propagator_matches_generic() {
        let a: Vec<usize> = (0..4).collect();
        let b: Vec<usize> = (4..12).collect();
        let c = ortho::tile_pattern(2, 4, 8).unwrap() * 0.3;
        let pat = StepHamiltonian {
            block_a: a.clone(), block_b: b.clone(), couplings: c.clone(), sign: 1.0,
            structure: Structure::SignPattern { w: 2 },
        };
        let gen = StepHamiltonian::dense(a, b, c, 1.0);
        let mut s1 = DVector::from_fn(12, |i, _| ((i * 7 + 3) % 11) as f64);
        s1 /= s1.norm();
        let mut s2 = s1.clone();
        propagate(&mut s1, &pat, 1.7).unwrap();
        propagate(&mut s2, &gen, 1.7).unwrap();
        assert_abs_diff_eq!((s1 - s2).norm(), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn ideal_nested_transfer_is_perfect() {
        for n in 1..=5 {
            let cfg = ProtocolConfig::new(1, 1.0, n, Variant::NestedIdeal);
            let r = run_single(&cfg, 0).unwrap();
            assert!((r.p_final - 1.0).abs() < 1e-9, "n={n}: p={}", r.p_final);
            for u in &r.per_step_uniformity {
                assert!(*u < 1e-8);
            }
        }
        let cfg = ProtocolConfig::new(2, 1.5, 3, Variant::NestedIdeal);
        let r = run_single(&cfg, 0).unwrap();
        assert!((r.p_final - 1.0).abs() < 1e-8, "d=2: p={}", r.p_final);
    }

    #[test]
    fn paper_convention_leaks_probability_above_1d() {
        let mut cfg = ProtocolConfig::new(2, 1.0, 2, Variant::NestedIdeal);
        cfg.convention = Convention::Paper;
        let r = run_single(&cfg, 0).unwrap();
        assert!(r.p_final < 0.999, "paper angle should miss for d=2, got {}", r.p_final);
    }

    #[test]
    fn disjoint_ideal_transfer_is_perfect() {
        for beta in [0.5, 1.0, 2.0] {
            let cfg = ProtocolConfig::new(1, 1.0, 4, Variant::DisjointIdeal).with_beta(beta);
            let r = run_single(&cfg, 0).unwrap();
            assert!((r.p_final - 1.0).abs() < 1e-9, "beta={beta}: p={}", r.p_final);
        }
    }

    #[test]
    fn physical_transfer_loses_probability() {
        let cfg = ProtocolConfig::new(1, 1.0, 3, Variant::DisjointPhysical).with_beta(1.0);
        let r = run_single(&cfg, 0).unwrap();
        assert!(r.p_final < 1.0);
        assert!(r.p_final > 0.5, "p={}", r.p_final);
    }

    #[test]
    fn noisy_runs_are_reproducible() {
        let cfg =
            ProtocolConfig::new(1, 1.0, 4, Variant::NestedIdeal).with_epsilon(0.3).with_seed(7);
        let a = run_single(&cfg, 3).unwrap();
        let b = run_single(&cfg, 3).unwrap();
        assert_eq!(a.p_final.to_bits(), b.p_final.to_bits());
        let c = run_single(&cfg, 4).unwrap();
        assert_ne!(a.p_final.to_bits(), c.p_final.to_bits());
    }

    #[test]
    fn multi_qubit_exact_and_consistent() {
        let base = ProtocolConfig::new(1, 1.0, 4, Variant::DisjointIdeal).with_beta(1.0);
        for m in [1usize, 2, 4] {
            let r = run_multi(&base.clone().with_m(m)).unwrap();
            for (a, f) in r.per_qubit.iter().enumerate() {
                assert!((f - 1.0).abs() < 1e-9, "m={m} qubit {a}: {f}");
            }
            assert!((r.aggregate - 1.0).abs() < 1e-8);
        }
        // m = 1 agrees with run_single
        let single = run_single(&base, 0).unwrap();
        let multi = run_multi(&base).unwrap();
        assert_abs_diff_eq!(single.p_final, multi.per_qubit[0], epsilon = 1e-12);
        assert_abs_diff_eq!(single.runtime, multi.runtime, epsilon = 1e-12);
    }

    #[test]
    fn step_error_bounds() {
        let a: Vec<usize> = (0..4).collect();
        let b: Vec<usize> = (4..8).collect();
        let h0 = StepHamiltonian::dense(
            a.clone(),
            b.clone(),
            DMatrix::from_element(4, 4, 0.25),
            1.0,
        );
        assert_abs_diff_eq!(step_error(&h0, &h0, 2.0).unwrap(), 0.0, epsilon = 1e-12);
        let mut x = 5u64;
        let pert = DMatrix::from_fn(4, 4, |_, _| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            0.25 + 0.05 * ((x as f64 / u64::MAX as f64) - 0.5)
        });
        let h = StepHamiltonian::dense(a, b, pert, 1.0);
        let t = 1.5;
        let delta = step_error(&h, &h0, t).unwrap();
        let v = h.coupling_difference(&h0).unwrap();
        // || V || of the full antisymmetric generator equals the block norm
        let bound = operator_norm(&v).unwrap() * t;
        assert!(delta <= bound + 1e-12, "{delta} > {bound}");
        assert!(delta <= 2.0 + 1e-12);
    }

    #[test]
    fn propagator_matrix_is_orthogonal() {
        let h = StepHamiltonian::dense(
            vec![0, 1],
            vec![2, 3, 4],
            DMatrix::from_row_slice(2, 3, &[0.1, 0.4, 0.2, 0.3, 0.9, 0.5]),
            -1.0,
        );
        let p = Propagator::new(&h).unwrap().matrix(&h, 0.8);
        let eye = DMatrix::<f64>::identity(5, 5);
        assert_abs_diff_eq!((p.transpose() * &p - eye).norm(), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn mode_evolution_is_columnwise() {
        let cfg = ProtocolConfig::new(1, 1.0, 3, Variant::DisjointIdeal).with_beta(1.0).with_m(2);
        let (layout, geom) = build_geometry(&cfg).unwrap();
        let sched = schedule::build_schedule(&cfg, &geom).unwrap();
        let n = layout.len();
        let mut joint = DMatrix::zeros(n, 2);
        joint[(geom.levels[0][0], 0)] = 1.0;
        joint[(geom.levels[0][1], 1)] = 1.0;
        let mut cols: Vec<DVector<f64>> =
            (0..2).map(|j| joint.column(j).into_owned()).collect();
        for step in &sched.steps {
            let h = assemble_hamiltonian(step, &geom, &layout).unwrap();
            propagate_modes(&mut joint, &h, step.duration).unwrap();
            for c in cols.iter_mut() {
                propagate(c, &h, step.duration).unwrap();
            }
        }
        for j in 0..2 {
            assert_abs_diff_eq!((joint.column(j) - &cols[j]).norm(), 0.0, epsilon = 1e-11);
        }
        // Gram matrix stays orthonormal
        let gram = joint.transpose() * &joint;
        let eye = DMatrix::<f64>::identity(2, 2);
        assert_abs_diff_eq!((gram - eye).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn physical_couplings_respect_cap() {
        let cfg = ProtocolConfig::new(1, 1.5, 3, Variant::DisjointPhysical).with_beta(1.0);
        let (layout, geom) = build_geometry(&cfg).unwrap();
        let sched = schedule::build_schedule(&cfg, &geom).unwrap();
        for step in &sched.steps {
            let h = assemble_hamiltonian(step, &geom, &layout).unwrap();
            for i in 0..h.block_a.len() {
                for j in 0..h.block_b.len() {
                    let r = layout.pair_distance(h.block_a[i], h.block_b[j]).unwrap() as f64;
                    assert!(h.couplings[(i, j)] <= cfg.h0 * r.powf(-cfg.alpha) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn amplitude_dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("amps.csv");
        let state = DVector::from_vec(vec![0.6, 0.8]);
        dump_amplitudes(&state, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "site,prob");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0");
        assert_abs_diff_eq!(first[1].parse::<f64>().unwrap(), 0.36, epsilon = 1e-15);
    }
}
