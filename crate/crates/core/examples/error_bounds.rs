//! Evaluates the analytic error bounds and compares them against
//! realized quantities: disorder-norm concentration, the Duhamel
//! per-step bound, and the long-range coupling-error bound.

use hierhop::config::{ProtocolConfig, Variant};
use hierhop::geometry::{disjoint_layout, Phase};
use hierhop::{dynamics, noise, schedule};

fn main() {
    let rep = noise::bound_report(0.3, 1.5, 1, 8).unwrap();
    println!("random-noise bounds (epsilon = 0.3, gamma = 1.5, R = 256):");
    println!("  quadrature delta^2 = {:.6}", rep.total_quadrature);
    println!("  linear delta       = {:.6}", rep.total_linear);
    println!("  p_fail             = {:.6} (vacuous: {})", rep.p_fail.value, rep.p_fail.vacuous);

    println!("spectral-norm concentration, 64x64 Gaussian, 200 draws:");
    let rate = noise::bai_yin_check(64, 64, 1.0, 2.0, 200, 7).unwrap();
    println!("  violation rate = {rate:.3}, bound 2 exp(-t^2/2) = {:.3}", 2.0 * (-2.0f64).exp());

    println!("duhamel check on noisy nested steps (epsilon = 0.1):");
    let cfg = ProtocolConfig::new(1, 1.0, 6, Variant::NestedIdeal).with_epsilon(0.1);
    let (layout, geom) = dynamics::build_geometry(&cfg).unwrap();
    let sched = schedule::build_schedule(&cfg, &geom).unwrap();
    for step in sched.steps.iter().filter(|s| s.phase == Phase::Expand) {
        let ideal = dynamics::assemble_hamiltonian(step, &geom, &layout).unwrap();
        let mut rng =
            noise::step_rng(1, 0, step.phase, step.q, noise::RedrawPolicy::PerStep);
        let noisy = noise::gaussian_perturb(&ideal, 0.1, &mut rng);
        let delta = dynamics::step_error(&noisy, &ideal, step.duration).unwrap();
        let v = noisy.coupling_difference(&ideal).unwrap();
        let bound = dynamics::operator_norm(&v).unwrap() * step.duration;
        println!("  q = {}: delta = {delta:.5} <= ||V|| t = {bound:.5}", step.q);
    }

    println!("long-range error-block norms (alpha = 1, beta = 2):");
    let (layout, geom) = disjoint_layout(1, 6, 2.0).unwrap();
    for q in 1..=6u32 {
        let real = noise::realized_herr_norm(&layout, &geom, q, 1.0, 2.0).unwrap();
        let bound = noise::herr_norm_bound(q, 1.0, 2.0).unwrap();
        println!("  q = {q}: realized = {real:.6} <= bound = {bound:.6}");
    }
    let exact = noise::delta_lr_bound(1024.0, 2.0, 1.0, noise::LrMode::Exact).unwrap();
    let large = noise::delta_lr_bound(1024.0, 2.0, 1.0, noise::LrMode::LargeBeta).unwrap();
    println!("  total delta^2 at R = 1024: exact = {exact:.5}, large-beta = {large:.5}");
}
