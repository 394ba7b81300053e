//! Fidelity-speed tradeoff on the physical power-law chain: larger
//! gaps raise the single-shot probability but stretch the runtime, so
//! the effective runtime ratio tau* has an interior optimum.

use hierhop::config::{ProtocolConfig, Variant};
use hierhop::experiment::tradeoff;

fn main() {
    let cfg = ProtocolConfig::new(1, 1.0, 6, Variant::DisjointPhysical);
    let betas = [0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0];
    for f in [0.5, 0.9, 0.99] {
        let curve = tradeoff(f, &betas, &cfg, 1).unwrap();
        println!("target fidelity F = {f}:");
        println!("  {:>6} {:>10} {:>5} {:>10} {:>10}", "beta", "P_x", "ell", "tau_eff", "tau*");
        for row in &curve.rows {
            println!(
                "  {:>6} {:>10.6} {:>5} {:>10.3} {:>10.4}",
                row.beta, row.p_x, row.ell, row.tau_eff, row.tau_star
            );
        }
        println!("  best beta = {}", curve.argmin_beta);
    }
}
