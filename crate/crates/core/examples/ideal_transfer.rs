//! Noise-free transfer through the nested-cube protocol, including the
//! two rotation-angle conventions above one dimension.

use hierhop::config::{Convention, ProtocolConfig, Variant};
use hierhop::dynamics;

fn main() {
    println!("nested chain, d = 1:");
    for n in [2u32, 5, 8, 10] {
        let cfg = ProtocolConfig::new(1, 1.0, n, Variant::NestedIdeal);
        let r = dynamics::run_single(&cfg, 0).unwrap();
        let worst = r.per_step_uniformity.iter().cloned().fold(0.0, f64::max);
        println!(
            "  n = {n:2}  sites = {:5}  p_final = {:.12}  worst uniformity dev = {:.2e}",
            1u64 << n,
            r.p_final,
            worst
        );
    }

    println!("nested square lattice, d = 2, both conventions:");
    for n in 1..=4u32 {
        let mut cfg = ProtocolConfig::new(2, 1.0, n, Variant::NestedIdeal);
        let corrected = dynamics::run_single(&cfg, 0).unwrap().p_final;
        cfg.convention = Convention::Paper;
        let paper = dynamics::run_single(&cfg, 0).unwrap().p_final;
        println!("  n = {n}  corrected p = {corrected:.12}  paper-angle p = {paper:.6}");
    }

    println!("gapped chain (programmable uniform couplings):");
    for beta in [0.5, 1.0, 2.0] {
        let cfg = ProtocolConfig::new(1, 1.0, 5, Variant::DisjointIdeal).with_beta(beta);
        let r = dynamics::run_single(&cfg, 0).unwrap();
        println!("  beta = {beta}  p_final = {:.12}  runtime = {:.4}", r.p_final, r.runtime);
    }
}
