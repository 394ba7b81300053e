//! Compares simulated schedule totals against the closed-form runtime
//! expressions for every protocol variant.

use hierhop::config::{ProtocolConfig, Variant};
use hierhop::{dynamics, schedule};

fn show(label: &str, cfg: &ProtocolConfig) {
    let (_, geom) = dynamics::build_geometry(cfg).unwrap();
    let sched = schedule::build_schedule(cfg, &geom).unwrap();
    let summary = schedule::runtime_closed_form(cfg).unwrap();
    println!(
        "  {label:40} total = {:14.8}  closed form = {:14.8}  rel err = {:.1e}",
        sched.total_runtime,
        summary.closed_form,
        (sched.total_runtime - summary.closed_form).abs() / summary.closed_form
    );
}

fn main() {
    println!("nested protocol:");
    show("d=1 alpha=1 n=6 (pi n)", &ProtocolConfig::new(1, 1.0, 6, Variant::NestedIdeal));
    show("d=1 alpha=0.5 n=6", &ProtocolConfig::new(1, 0.5, 6, Variant::NestedIdeal));
    show("d=1 alpha=2 n=3 (14 pi)", &ProtocolConfig::new(1, 2.0, 3, Variant::NestedIdeal));
    show("d=2 alpha=2 n=4 (log branch)", &ProtocolConfig::new(2, 2.0, 4, Variant::NestedIdeal));

    println!("gapped chain:");
    for beta in [0.5, 1.0, 4.0] {
        let cfg = ProtocolConfig::new(1, 1.0, 6, Variant::DisjointPhysical).with_beta(beta);
        show(&format!("alpha=1 beta={beta} n=6"), &cfg);
    }
    show(
        "alpha=2 beta=1 n=5",
        &ProtocolConfig::new(1, 2.0, 5, Variant::DisjointPhysical).with_beta(1.0),
    );

    println!("per-step durations, nested d=1 alpha=2 (ratio 2 per level):");
    let cfg = ProtocolConfig::new(1, 2.0, 5, Variant::NestedIdeal);
    let summary = schedule::runtime_closed_form(&cfg).unwrap();
    for (i, t) in summary.per_step.iter().take(5).enumerate() {
        println!("  t_{} = {:.6}", i + 1, t);
    }
}
