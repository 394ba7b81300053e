//! Monte Carlo sweeps, power-law fits, and the fidelity-speed tradeoff.
//!
//! Trials run in parallel but are keyed by their trial index, and all
//! aggregation walks the trial vector in index order, so sweep outputs
//! are bit-identical for any thread count.

use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ProtocolConfig, Variant};
use crate::noise::{self, DeltaMode};
use crate::{dynamics, schedule, Error, Result};

/// Which config field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Hierarchy depth n; records report the achieved distance R.
    Levels,
    Epsilon,
    Beta,
    Modes,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Levels => "levels",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Beta => "beta",
            SweepAxis::Modes => "modes",
        }
    }
}

/// A full sweep description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub base: ProtocolConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub trials: u32,
}

/// One sweep point. For the `Levels` axis `value` is the achieved
/// source-target distance R, not the depth n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub axis: String,
    pub value: f64,
    pub mean_p_final: f64,
    pub stderr: f64,
    pub trials: u32,
    pub runtime_total: f64,
    pub bound: Option<f64>,
}

/// Ordinary-least-squares fit of `log p = -a log R + b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    /// Decay exponent, reported positive for `p ~ R^{-a}`.
    pub a: f64,
    pub b: f64,
    pub stderr_a: f64,
    pub points_used: usize,
    pub r_squared: f64,
}

/// One row of the tradeoff scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub beta: f64,
    pub p_x: f64,
    /// Repeats needed to beat the target fidelity.
    pub ell: u64,
    pub tau_lr: f64,
    pub tau_eff: f64,
    /// `tau_eff / tau_lr(beta = 0)`.
    pub tau_star: f64,
}

/// The tradeoff curve for one target fidelity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub f_target: f64,
    pub rows: Vec<TradeoffRow>,
    pub argmin_beta: f64,
}

fn apply_axis(base: &ProtocolConfig, axis: SweepAxis, value: f64) -> ProtocolConfig {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::Levels => cfg.n = value.round() as u32,
        SweepAxis::Epsilon => cfg.epsilon = value,
        SweepAxis::Beta => cfg.beta = value,
        SweepAxis::Modes => cfg.m = value.round() as usize,
    }
    cfg
}

/// Mean and unbiased standard error of the mean, accumulated in index
/// order.
fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs the sweep: `trials` independent protocols per axis value.
pub fn monte_carlo(plan: &ExperimentPlan) -> Result<Vec<SweepRecord>> {
    if plan.trials < 1 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    if plan.values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one axis value".into()));
    }
    let mut records = Vec::with_capacity(plan.values.len());
    for &value in &plan.values {
        let cfg = apply_axis(&plan.base, plan.axis, value);
        cfg.validate()?;
        let (ps, runtime): (Vec<f64>, f64) = if cfg.m > 1 {
            // multi-qubit runs are noise-free per trial index 0
            let r = dynamics::run_multi(&cfg)?;
            (vec![r.aggregate], r.runtime)
        } else {
            let results: Vec<Result<dynamics::TrialResult>> = (0..plan.trials as u64)
                .into_par_iter()
                .map(|trial| dynamics::run_single(&cfg, trial))
                .collect();
            let mut ps = Vec::with_capacity(results.len());
            let mut runtime = 0.0;
            for r in results {
                let r = r?;
                ps.push(r.p_final);
                runtime = r.runtime;
            }
            (ps, runtime)
        };
        let (mean, stderr) = mean_stderr(&ps);
        let reported_value = match plan.axis {
            SweepAxis::Levels => {
                let (layout, geom) = dynamics::build_geometry(&cfg)?;
                layout.pair_distance(geom.source_site, geom.target_site)? as f64
            }
            _ => value,
        };
        let bound = if cfg.epsilon > 0.0 {
            let big_r = match plan.axis {
                SweepAxis::Levels => reported_value,
                _ => (cfg.n as f64).exp2(),
            };
            let d2 = noise::delta_rand_bound(cfg.epsilon, 1.0, cfg.d, big_r, DeltaMode::Quadrature);
            Some((1.0 - d2).max(0.0))
        } else {
            None
        };
        records.push(SweepRecord {
            axis: plan.axis.name().to_string(),
            value: reported_value,
            mean_p_final: mean,
            stderr,
            trials: if cfg.m > 1 { 1 } else { plan.trials },
            runtime_total: runtime,
            bound,
        });
    }
    Ok(records)
}

/// Fits `log(mean_p_final)` against `log(value)` by ordinary least
/// squares; `a` is the positive decay exponent.
pub fn fit_power_law(records: &[SweepRecord]) -> Result<FitResult> {
    if records.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs at least 3 points, got {}",
            records.len()
        )));
    }
    let mut xs = Vec::with_capacity(records.len());
    let mut ys = Vec::with_capacity(records.len());
    for r in records {
        if !(r.mean_p_final > 0.0) || !(r.value > 0.0) {
            return Err(Error::InvalidArgument(
                "power-law fit needs positive probabilities and axis values".into(),
            ));
        }
        xs.push(r.value.ln());
        ys.push(r.mean_p_final.ln());
    }
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let sst: f64 = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    let dof = (xs.len() - 2).max(1) as f64;
    let stderr_a = (sse / dof / sxx).sqrt();
    let r_squared = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    Ok(FitResult { a: -slope, b: intercept, stderr_a, points_used: xs.len(), r_squared })
}

/// Smallest number of runs `s` with `1 - (1-p)^s > f_target`.
pub fn repeat_count(p: f64, f_target: f64) -> Result<u64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("single-run probability {p} out of (0, 1]")));
    }
    if !(0.0..1.0).contains(&f_target) {
        return Err(Error::InvalidArgument(format!("target fidelity {f_target} out of [0, 1)")));
    }
    let mut miss = 1.0;
    for s in 1..=10_000_000u64 {
        miss *= 1.0 - p;
        if 1.0 - miss > f_target {
            return Ok(s);
        }
    }
    Err(Error::InvalidArgument("target fidelity unreachable within 1e7 repeats".into()))
}

/// Scans `betas`, estimating the single-run probability at each and
/// converting it into the effective runtime ratio `tau*`.
pub fn tradeoff(
    f_target: f64,
    betas: &[f64],
    cfg: &ProtocolConfig,
    trials: u32,
) -> Result<TradeoffCurve> {
    if cfg.variant != Variant::DisjointPhysical {
        return Err(Error::InvalidConfig("tradeoff runs on the physical variant".into()));
    }
    if betas.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::InvalidArgument("tradeoff betas must be positive".into()));
    }
    let tau0 = schedule::runtime_closed_form(&cfg.clone().with_beta(0.0))?.closed_form;
    let mut rows = Vec::with_capacity(betas.len());
    let mut reachable = false;
    for &beta in betas {
        let point = cfg.clone().with_beta(beta);
        let p_x = if point.epsilon > 0.0 {
            let ps: Vec<f64> = (0..trials.max(1) as u64)
                .into_par_iter()
                .map(|t| dynamics::run_single(&point, t).map(|r| r.p_final))
                .collect::<Result<Vec<f64>>>()?;
            mean_stderr(&ps).0
        } else {
            dynamics::run_single(&point, 0)?.p_final
        };
        let tau_lr = schedule::runtime_closed_form(&point)?.closed_form;
        match repeat_count(p_x.max(f64::MIN_POSITIVE), f_target) {
            Ok(ell) => {
                reachable = true;
                let tau_eff = ell as f64 * tau_lr;
                rows.push(TradeoffRow { beta, p_x, ell, tau_lr, tau_eff, tau_star: tau_eff / tau0 });
            }
            Err(_) => continue,
        }
    }
    if !reachable {
        return Err(Error::InvalidArgument(format!(
            "target fidelity {f_target} unreachable at every beta"
        )));
    }
    let argmin_beta = rows
        .iter()
        .min_by(|a, b| a.tau_star.total_cmp(&b.tau_star))
        .map(|r| r.beta)
        .unwrap();
    Ok(TradeoffCurve { f_target, rows, argmin_beta })
}

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitFormat {
    Csv,
    Json,
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders sweep records as CSV text with a fixed column set.
pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from("axis,value,mean_p_final,stderr,trials,runtime_total,bound\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.axis,
            fmt_float(r.value),
            fmt_float(r.mean_p_final),
            fmt_float(r.stderr),
            r.trials,
            fmt_float(r.runtime_total),
            r.bound.map(fmt_float).unwrap_or_default(),
        ));
    }
    out
}

/// Writes records to `path` in the chosen format.
pub fn emit(records: &[SweepRecord], format: EmitFormat, path: &Path) -> Result<()> {
    let text = match format {
        EmitFormat::Csv => records_to_csv(records),
        EmitFormat::Json => {
            serde_json::to_string_pretty(records).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })? + "\n"
        }
    };
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads records back from a CSV produced by [`emit`].
pub fn read_records_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        message: "empty file".into(),
    })?;
    if header != "axis,value,mean_p_final,stderr,trials,runtime_total,bound" {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!("unexpected header `{header}`"),
        });
    }
    let parse_f = |s: &str, what: &str| -> Result<f64> {
        s.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            message: format!("bad {what}: `{s}`"),
        })
    };
    let mut records = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                message: format!("expected 7 columns, got {}", cols.len()),
            });
        }
        records.push(SweepRecord {
            axis: cols[0].to_string(),
            value: parse_f(cols[1], "value")?,
            mean_p_final: parse_f(cols[2], "mean_p_final")?,
            stderr: parse_f(cols[3], "stderr")?,
            trials: cols[4].parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                message: format!("bad trials: `{}`", cols[4]),
            })?,
            runtime_total: parse_f(cols[5], "runtime_total")?,
            bound: if cols[6].is_empty() { None } else { Some(parse_f(cols[6], "bound")?) },
        });
    }
    Ok(records)
}
