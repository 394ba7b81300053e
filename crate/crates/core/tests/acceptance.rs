//! End-to-end acceptance checks. Run with
//! `cargo test --test acceptance -- --nocapture` to see one line per
//! criterion.

use hierhop::config::{Convention, ProtocolConfig, Variant};
use hierhop::experiment::{self, EmitFormat, ExperimentPlan, SweepAxis};
use hierhop::geometry::Phase;
use hierhop::{dynamics, noise, schedule};

fn pass(id: u32, name: &str) {
    println!("acceptance {id} ({name}): PASS");
}

#[test]
fn criterion_1_perfect_ideal_transfer() {
    for n in 1..=10u32 {
        let cfg = ProtocolConfig::new(1, 1.0, n, Variant::NestedIdeal);
        let r = dynamics::run_single(&cfg, 0).unwrap();
        assert!(
            (r.p_final - 1.0).abs() < 1e-9,
            "d=1 n={n}: p_final = {} off by {:e}",
            r.p_final,
            (r.p_final - 1.0).abs()
        );
    }
    let mut paper_deficit = Vec::new();
    for n in 1..=4u32 {
        let mut cfg = ProtocolConfig::new(2, 1.0, n, Variant::NestedIdeal);
        let r = dynamics::run_single(&cfg, 0).unwrap();
        assert!(
            (r.p_final - 1.0).abs() < 1e-8,
            "d=2 n={n} corrected: p_final = {}",
            r.p_final
        );
        cfg.convention = Convention::Paper;
        let r = dynamics::run_single(&cfg, 0).unwrap();
        assert!(r.p_final < 1.0 - 1e-3, "d=2 n={n} paper angle should lose probability");
        paper_deficit.push(r.p_final);
    }
    println!("  d=2 paper-convention p_final for n=1..4: {paper_deficit:?}");
    pass(1, "perfect ideal transfer");
}

#[test]
fn criterion_2_runtime_formulas() {
    // tau = pi n at d = alpha = 1
    for n in [1u32, 4, 7, 10] {
        let cfg = ProtocolConfig::new(1, 1.0, n, Variant::NestedIdeal);
        let (_, geom) = dynamics::build_geometry(&cfg).unwrap();
        let total = schedule::build_schedule(&cfg, &geom).unwrap().total_runtime;
        let expect = std::f64::consts::PI * n as f64;
        assert!((total - expect).abs() <= 1e-12 * expect, "pi n failed at n={n}");
    }
    // geometric-series branch at alpha != d
    for alpha in [0.5, 2.0] {
        for n in [3u32, 6] {
            let cfg = ProtocolConfig::new(1, alpha, n, Variant::NestedIdeal);
            let (_, geom) = dynamics::build_geometry(&cfg).unwrap();
            let total = schedule::build_schedule(&cfg, &geom).unwrap().total_runtime;
            let closed = schedule::runtime_closed_form(&cfg).unwrap().closed_form;
            assert!(
                (total - closed).abs() <= 1e-12 * closed,
                "alpha={alpha} n={n}: {total} vs {closed}"
            );
        }
    }
    // gapped-chain runtime at alpha = 1 against the logarithmic form
    for beta in [0.5, 1.0, 4.0] {
        for n in [2u32, 5, 8] {
            let cfg = ProtocolConfig::new(1, 1.0, n, Variant::DisjointPhysical).with_beta(beta);
            let (layout, geom) = dynamics::build_geometry(&cfg).unwrap();
            let total = schedule::build_schedule(&cfg, &geom).unwrap().total_runtime;
            let big_r = layout.pair_distance(geom.source_site, geom.target_site).unwrap() as f64;
            let expect = std::f64::consts::PI
                * std::f64::consts::SQRT_2
                * (0.75 + beta)
                * (big_r / (4.0 * beta + 3.0) + 1.0).log2();
            assert!(
                (total - expect).abs() <= 1e-12 * expect,
                "beta={beta} n={n}: {total} vs {expect}"
            );
        }
    }
    pass(2, "runtime formulas");
}

#[test]
fn criterion_3_multi_qubit() {
    let base = ProtocolConfig::new(1, 1.0, 6, Variant::DisjointIdeal).with_beta(1.0);
    let single = dynamics::run_multi(&base).unwrap();
    assert!((single.per_qubit[0] - 1.0).abs() < 1e-9);
    let mut ratios = Vec::new();
    for m in [1usize, 2, 4, 8] {
        let r = dynamics::run_multi(&base.clone().with_m(m)).unwrap();
        for (a, f) in r.per_qubit.iter().enumerate() {
            assert!((f - 1.0).abs() < 1e-9, "m={m} qubit {a}: fidelity {f}");
        }
        let ratio = r.runtime / single.runtime;
        assert!(
            ratio <= (2.0 * m as f64).sqrt() * 1.05,
            "m={m}: runtime ratio {ratio} exceeds sqrt(2m)"
        );
        ratios.push(ratio);
    }
    println!("  runtime ratios for m=1,2,4,8: {ratios:?}");
    pass(3, "multi-qubit transfer");
}

#[test]
fn criterion_4_noise_plateau() {
    let ns: Vec<f64> = (4..=10).map(f64::from).collect();
    let sweep = |eps: f64| -> Vec<experiment::SweepRecord> {
        let plan = ExperimentPlan {
            base: ProtocolConfig::new(1, 1.0, 4, Variant::NestedIdeal)
                .with_epsilon(eps)
                .with_seed(2024),
            axis: SweepAxis::Levels,
            values: ns.clone(),
            trials: 100,
        };
        experiment::monte_carlo(&plan).unwrap()
    };
    let curves: Vec<Vec<experiment::SweepRecord>> =
        [0.3, 0.6, 0.9].iter().map(|&e| sweep(e)).collect();
    // ordering in epsilon at every R
    for k in 0..ns.len() {
        assert!(
            curves[0][k].mean_p_final > curves[1][k].mean_p_final
                && curves[1][k].mean_p_final > curves[2][k].mean_p_final,
            "epsilon ordering broken at R = {}",
            curves[0][k].value
        );
    }
    // successive-doubling differences shrink beyond statistical error
    for (ci, curve) in curves.iter().enumerate() {
        let means: Vec<f64> = curve.iter().map(|r| r.mean_p_final).collect();
        let ses: Vec<f64> = curve.iter().map(|r| r.stderr).collect();
        for k in 0..means.len() - 2 {
            let d0 = (means[k] - means[k + 1]).abs();
            let d1 = (means[k + 1] - means[k + 2]).abs();
            let tol = 3.0
                * (ses[k].powi(2) + 2.0 * ses[k + 1].powi(2) + ses[k + 2].powi(2)).sqrt();
            assert!(
                d1 <= d0 + tol,
                "curve {ci}: doubling difference grew at k={k}: {d1} > {d0} + {tol}"
            );
        }
    }
    // small-noise floor from the quadrature bound
    for r in sweep(0.1) {
        let floor = r.bound.unwrap();
        assert!(
            floor >= 0.901 - 1e-3,
            "bound column unexpectedly strong: {floor}"
        );
        assert!(
            r.mean_p_final >= floor,
            "R={}: mean {} below 1 - delta^2 = {floor}",
            r.value,
            r.mean_p_final
        );
    }
    pass(4, "noise plateau");
}

#[test]
fn criterion_5_per_step_error_bounds() {
    let epsilon = 0.1;
    let gamma = 1.5;
    let cfg = ProtocolConfig::new(1, 1.0, 8, Variant::NestedIdeal).with_epsilon(epsilon);
    let (layout, geom) = dynamics::build_geometry(&cfg).unwrap();
    let sched = schedule::build_schedule(&cfg, &geom).unwrap();
    let mut checked = 0u32;
    let mut within = 0u32;
    let mut predicted_sum = 0.0;
    for trial in 0..7u64 {
        for step in sched.steps.iter().filter(|s| s.phase == Phase::Expand) {
            if checked == 50 {
                break;
            }
            let ideal = dynamics::assemble_hamiltonian(step, &geom, &layout).unwrap();
            let mut rng = noise::step_rng(
                cfg.seed,
                trial,
                step.phase,
                step.q,
                noise::RedrawPolicy::PerStep,
            );
            let noisy = noise::gaussian_perturb(&ideal, epsilon, &mut rng);
            let v = noisy.coupling_difference(&ideal).unwrap();
            let v_norm = dynamics::operator_norm(&v).unwrap();
            let delta = dynamics::step_error(&noisy, &ideal, step.duration).unwrap();
            assert!(
                delta <= v_norm * step.duration + 1e-10,
                "duhamel violated: {delta} > {} at q={}",
                v_norm * step.duration,
                step.q
            );
            // concentration of the disorder norm at confidence gamma
            let (a, b) = v.shape();
            let sigma = epsilon * schedule::ideal_coupling(step.q, cfg.alpha, cfg.h0);
            let edge = sigma * ((a as f64).sqrt() + (b as f64).sqrt());
            if v_norm <= gamma * edge {
                within += 1;
            }
            let t = (gamma - 1.0) * edge;
            predicted_sum += 1.0 - 2.0 * (-t * t / (2.0 * sigma * sigma)).exp();
            checked += 1;
        }
    }
    assert_eq!(checked, 50);
    let predicted = predicted_sum / checked as f64;
    let se = (predicted.clamp(0.02, 0.98) * (1.0 - predicted.clamp(0.02, 0.98))
        / checked as f64)
        .sqrt();
    let rate = within as f64 / checked as f64;
    assert!(
        rate >= predicted - 3.0 * se,
        "norm concentration rate {rate} below predicted {predicted} - 3se"
    );
    println!("  duhamel held in 50/50 steps; within-bound rate {rate} (predicted {predicted:.3})");
    pass(5, "per-step error bounds");
}

#[test]
fn criterion_6_lr_error_bound() {
    for beta in [1.0, 2.0, 4.0] {
        let (layout, geom) = hierhop::geometry::disjoint_layout(1, 8, beta).unwrap();
        for q in 1..=8u32 {
            let real = noise::realized_herr_norm(&layout, &geom, q, 1.0, beta).unwrap();
            let bound = noise::herr_norm_bound(q, 1.0, beta).unwrap();
            assert!(real <= bound + 1e-12, "q={q} beta={beta}: {real} > {bound}");
        }
    }
    for beta in [4.0, 8.0, 16.0] {
        for big_r in [32.0, 256.0, 2048.0, 1.0e6] {
            let exact = noise::delta_lr_bound(big_r, beta, 1.0, noise::LrMode::Exact).unwrap();
            let large = noise::delta_lr_bound(big_r, beta, 1.0, noise::LrMode::LargeBeta).unwrap();
            assert!(exact >= large, "R={big_r} beta={beta}: {exact} < {large}");
        }
    }
    pass(6, "long-range error bound");
}

#[test]
fn criterion_7_power_law_decay() {
    let mut fitted = Vec::new();
    for beta in [1.0, 2.0, 4.0] {
        let plan = ExperimentPlan {
            base: ProtocolConfig::new(1, 1.0, 4, Variant::DisjointPhysical).with_beta(beta),
            axis: SweepAxis::Levels,
            values: (4..=11).map(f64::from).collect(),
            trials: 1,
        };
        let records = experiment::monte_carlo(&plan).unwrap();
        let fit = experiment::fit_power_law(&records).unwrap();
        assert!(
            fit.r_squared >= 0.98,
            "beta={beta}: R^2 = {} too low (a = {})",
            fit.r_squared,
            fit.a
        );
        fitted.push(fit.a);
    }
    assert!(
        fitted[0] > fitted[1] && fitted[1] > fitted[2],
        "decay exponents not decreasing in beta: {fitted:?}"
    );
    println!("  fitted decay exponents for beta=1,2,4: {fitted:?}");
    pass(7, "power-law decay");
}

#[test]
fn criterion_8_tradeoff() {
    let cfg = ProtocolConfig::new(1, 1.0, 7, Variant::DisjointPhysical);
    let betas: Vec<f64> = vec![0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0];
    let mut mins = Vec::new();
    let mut interior = Vec::new();
    for f in [0.5, 0.9, 0.99] {
        let curve = experiment::tradeoff(f, &betas, &cfg, 1).unwrap();
        let stars: Vec<f64> = curve.rows.iter().map(|r| r.tau_star).collect();
        let (min_idx, min_star) = stars
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &v)| (i, v))
            .unwrap();
        mins.push(min_star);
        interior.push(min_idx > 0 && min_idx < stars.len() - 1);
    }
    assert!(
        *interior.last().unwrap(),
        "largest target fidelity should have an interior tau* minimum"
    );
    assert!(
        mins[0] <= mins[1] + 1e-12 && mins[1] <= mins[2] + 1e-12,
        "min tau* not nondecreasing in F: {mins:?}"
    );
    println!("  min tau* for F=0.5,0.9,0.99: {mins:?} (interior: {interior:?})");
    pass(8, "fidelity-speed tradeoff");
}

#[test]
fn criterion_9_determinism() {
    let plan = ExperimentPlan {
        base: ProtocolConfig::new(1, 1.0, 4, Variant::NestedIdeal)
            .with_epsilon(0.5)
            .with_seed(99),
        axis: SweepAxis::Levels,
        values: vec![4.0, 5.0, 6.0],
        trials: 20,
    };
    let dir = tempfile::tempdir().unwrap();
    let mut outputs: Vec<Vec<u8>> = Vec::new();
    // twice in the ambient pool, then forced 1- and 2-thread pools
    for run in 0..2 {
        let path = dir.path().join(format!("ambient_{run}.csv"));
        experiment::emit(&experiment::monte_carlo(&plan).unwrap(), EmitFormat::Csv, &path).unwrap();
        outputs.push(std::fs::read(&path).unwrap());
    }
    for threads in [1usize, 2] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let path = dir.path().join(format!("pool_{threads}.csv"));
        let records = pool.install(|| experiment::monte_carlo(&plan).unwrap());
        experiment::emit(&records, EmitFormat::Csv, &path).unwrap();
        outputs.push(std::fs::read(&path).unwrap());
    }
    for (i, o) in outputs.iter().enumerate().skip(1) {
        assert_eq!(o, &outputs[0], "output {i} differs from the first run");
    }
    pass(9, "determinism");
}
