//! Multi-qubit transfer on the gapped chain: per-mode fidelities and
//! the runtime stretch relative to the single-qubit protocol.

use hierhop::config::{ProtocolConfig, Variant};
use hierhop::dynamics;

fn main() {
    let base = ProtocolConfig::new(1, 1.0, 6, Variant::DisjointIdeal).with_beta(1.0);
    let single = dynamics::run_multi(&base).unwrap();
    println!("single-qubit runtime: {:.6}", single.runtime);
    for m in [1usize, 2, 4, 8] {
        let r = dynamics::run_multi(&base.clone().with_m(m)).unwrap();
        let worst = r.per_qubit.iter().cloned().fold(f64::INFINITY, f64::min);
        println!(
            "m = {m}: worst per-qubit fidelity = {:.12}, aggregate = {:.12}, \
             runtime ratio = {:.4} (bound sqrt(2m) = {:.4})",
            worst,
            r.aggregate,
            r.runtime / single.runtime,
            (2.0 * m as f64).sqrt()
        );
    }
}
