//! Command-line driver. The `hierhop` binary is a thin wrapper around
//! [`main`]; every subcommand maps onto one library capability.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{Convention, ProtocolConfig, Variant};
use crate::experiment::{self, EmitFormat, ExperimentPlan, SweepAxis};
use crate::{dynamics, noise, schedule, Error, Result};

#[derive(Parser)]
#[command(
    name = "hierhop",
    version,
    about = "Simulate hierarchical long-range state-transfer protocols"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON config file mirroring the flags; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spatial dimension.
    #[arg(long)]
    d: Option<u32>,
    /// Power-law exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Base coupling strength.
    #[arg(long)]
    h0: Option<f64>,
    /// Hierarchy depth.
    #[arg(long)]
    n: Option<u32>,
    /// Protocol variant: nested | disjoint | physical.
    #[arg(long)]
    variant: Option<String>,
    /// Gap prefactor of the disjoint variants.
    #[arg(long)]
    beta: Option<f64>,
    /// Multiplicative Gaussian coupling-noise strength.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of qubits to transfer.
    #[arg(long)]
    m: Option<usize>,
    /// Reproducibility seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Rotation-angle convention: corrected | paper.
    #[arg(long)]
    convention: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ProtocolConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str(&text).map_err(|e| Error::Parse {
                    path: path.clone(),
                    message: e.to_string(),
                })?
            }
            None => ProtocolConfig::new(1, 1.0, 4, Variant::NestedIdeal),
        };
        if let Some(d) = self.d {
            cfg.d = d;
        }
        if let Some(alpha) = self.alpha {
            cfg.alpha = alpha;
        }
        if let Some(h0) = self.h0 {
            cfg.h0 = h0;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(v) = &self.variant {
            cfg.variant = v.parse::<Variant>()?;
        }
        if let Some(beta) = self.beta {
            cfg.beta = beta;
        }
        if let Some(epsilon) = self.epsilon {
            cfg.epsilon = epsilon;
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(c) = &self.convention {
            cfg.convention = c.parse::<Convention>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long, default_value = "csv")]
    format: String,
}

impl OutputArgs {
    fn format(&self) -> Result<EmitFormat> {
        match self.format.to_ascii_lowercase().as_str() {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the step schedule and runtime closed forms.
    Schedule {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a single protocol trial.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Trial index feeding the noise stream.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Write final per-site probabilities to this CSV.
        #[arg(long)]
        dump_amplitudes: Option<PathBuf>,
    },
    /// Monte Carlo sweep over one config axis.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Axis to vary: levels | epsilon | beta | modes.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Power-law fit over a sweep CSV.
    Fit {
        /// Sweep CSV produced by the sweep subcommand.
        #[arg(long)]
        input: PathBuf,
    },
    /// Fidelity-speed tradeoff over a beta grid.
    Tradeoff {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Target aggregate fidelity.
        #[arg(long, default_value_t = 0.9)]
        f_target: f64,
        /// Comma-separated beta grid.
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every analytic error bound for a config.
    Bounds {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Confidence parameter of the random-matrix bounds.
        #[arg(long, default_value_t = 1.5)]
        gamma: f64,
    },
}

fn write_or_print(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Schedule { cfg, out } => {
            let cfg = cfg.resolve()?;
            let (_, geom) = dynamics::build_geometry(&cfg)?;
            let sched = schedule::build_schedule(&cfg, &geom)?;
            let summary = schedule::runtime_closed_form(&cfg)?;
            let doc = json!({
                "config": cfg,
                "schedule": sched,
                "total_runtime": sched.total_runtime,
                "closed_form": summary.closed_form,
            });
            write_or_print(&serde_json::to_string_pretty(&doc).unwrap(), &out)
        }
        Cmd::Run { cfg, trial, dump_amplitudes } => {
            let cfg = cfg.resolve()?;
            if cfg.m > 1 {
                let r = dynamics::run_multi(&cfg)?;
                let doc = json!({
                    "per_qubit": r.per_qubit,
                    "aggregate": r.aggregate,
                    "runtime": r.runtime,
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                let r = dynamics::run_single(&cfg, trial)?;
                if let Some(path) = dump_amplitudes {
                    // re-run capturing the final state
                    let (layout, geom) = dynamics::build_geometry(&cfg)?;
                    let sched = schedule::build_schedule(&cfg, &geom)?;
                    let mut state = nalgebra::DVector::zeros(layout.len());
                    state[geom.source_site] = 1.0;
                    for step in &sched.steps {
                        let mut h = dynamics::assemble_hamiltonian(step, &geom, &layout)?;
                        if cfg.epsilon > 0.0 {
                            let mut rng = noise::step_rng(
                                cfg.seed,
                                trial,
                                step.phase,
                                step.q,
                                noise::RedrawPolicy::PerStep,
                            );
                            h = noise::gaussian_perturb(&h, cfg.epsilon, &mut rng);
                        }
                        dynamics::propagate(&mut state, &h, step.duration)?;
                    }
                    dynamics::dump_amplitudes(&state, &path)?;
                }
                let doc = json!({
                    "p_final": r.p_final,
                    "runtime": r.runtime,
                    "per_step_uniformity": r.per_step_uniformity,
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            }
            Ok(())
        }
        Cmd::Sweep { cfg, axis, values, trials, output } => {
            let base = cfg.resolve()?;
            let axis = match axis.to_ascii_lowercase().as_str() {
                "levels" | "n" => SweepAxis::Levels,
                "epsilon" => SweepAxis::Epsilon,
                "beta" => SweepAxis::Beta,
                "modes" | "m" => SweepAxis::Modes,
                other => return Err(Error::InvalidArgument(format!("unknown axis `{other}`"))),
            };
            let plan = ExperimentPlan { base, axis, values, trials };
            let records = experiment::monte_carlo(&plan)?;
            match (&output.out, output.format()?) {
                (Some(path), fmt) => experiment::emit(&records, fmt, path),
                (None, EmitFormat::Csv) => {
                    print!("{}", experiment::records_to_csv(&records));
                    Ok(())
                }
                (None, EmitFormat::Json) => {
                    println!("{}", serde_json::to_string_pretty(&records).unwrap());
                    Ok(())
                }
            }
        }
        Cmd::Fit { input } => {
            let records = experiment::read_records_csv(&input)?;
            let fit = experiment::fit_power_law(&records)?;
            println!("{}", serde_json::to_string_pretty(&fit).unwrap());
            Ok(())
        }
        Cmd::Tradeoff { cfg, f_target, betas, trials, out } => {
            let cfg = cfg.resolve()?;
            let curve = experiment::tradeoff(f_target, &betas, &cfg, trials)?;
            write_or_print(&serde_json::to_string_pretty(&curve).unwrap(), &out)
        }
        Cmd::Bounds { cfg, gamma } => {
            let cfg = cfg.resolve()?;
            let random = noise::bound_report(cfg.epsilon, gamma, cfg.d, cfg.n)?;
            let big_r = (cfg.n as f64).exp2();
            let lr = if cfg.variant.is_disjoint() && cfg.beta > 0.0 {
                Some(json!({
                    "per_step": noise::delta_lr_step(cfg.alpha, cfg.beta)?,
                    "exact": noise::delta_lr_bound(big_r, cfg.beta, cfg.alpha, noise::LrMode::Exact)?,
                    "large_beta": noise::delta_lr_bound(big_r, cfg.beta, cfg.alpha, noise::LrMode::LargeBeta)?,
                    "herr_per_level": (1..=cfg.n)
                        .map(|q| noise::herr_norm_bound(q, cfg.alpha, cfg.beta))
                        .collect::<Result<Vec<f64>>>()?,
                }))
            } else {
                None
            };
            let doc = json!({ "random": random, "long_range": lr });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(())
        }
    }
}

/// Parses `argv`-style arguments and runs them, returning the process
/// exit code (0 success, 2 usage error, 1 runtime error).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    if let Ok(threads) = std::env::var("HIERHOP_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
