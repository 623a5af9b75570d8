//! `pump-sweep` and `pump-sim`: charge pump load sweeps and the regulated
//! closed-loop transient.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stimvco_core::power::{
    efficiency, high_side_bias, optimum_iout, simulate_feedback, steady_state_vout,
    ChargePumpStage, FeedbackLoop, HighSideBias, MultiStagePump,
};
use stimvco_core::sweep::Axis;
use stimvco_core::Error;

use crate::support::{
    csv_line, fmt_f, json_output, load_config, write_output, CliError, CliResult, Format,
};

fn one() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PumpSweepConfig {
    stage: ChargePumpStage,
    #[serde(default = "one")]
    n_stages: u32,
    i_out_axis: Axis,
    /// Parasitic capacitance variants; empty means the stage's own value.
    #[serde(default)]
    c_p_values_f: Vec<f64>,
}

#[derive(Serialize)]
struct PumpCurve {
    c_p_eq_f: f64,
    v_out_v: Vec<f64>,
    efficiency: Vec<f64>,
    i_opt_a: f64,
    efficiency_peak: f64,
    v_out_at_opt_v: f64,
}

#[derive(Serialize)]
struct PumpSweepOutput {
    n_stages: u32,
    i_out_a: Vec<f64>,
    curves: Vec<PumpCurve>,
}

fn eta_or_nan(stage: &ChargePumpStage, i: f64, n: u32) -> CliResult<f64> {
    match efficiency(stage, i, n) {
        Ok(v) => Ok(v),
        Err(Error::Domain(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

pub fn run_sweep(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: PumpSweepConfig = load_config(config)?;
    cfg.stage.validate()?;
    cfg.i_out_axis.validate()?;

    let i_out = cfg.i_out_axis.values();
    let cp_values = if cfg.c_p_values_f.is_empty() {
        vec![cfg.stage.c_p_eq_f]
    } else {
        cfg.c_p_values_f.clone()
    };

    let mut curves = Vec::with_capacity(cp_values.len());
    for &cp in &cp_values {
        let stage = ChargePumpStage {
            c_p_eq_f: cp,
            ..cfg.stage
        };
        stage.validate()?;
        let v_out_v: Vec<f64> = i_out
            .iter()
            .map(|&i| steady_state_vout(&stage, i, cfg.n_stages))
            .collect();
        let efficiency: Vec<f64> = i_out
            .iter()
            .map(|&i| eta_or_nan(&stage, i, cfg.n_stages))
            .collect::<CliResult<_>>()?;
        let i_opt = optimum_iout(&stage, cfg.n_stages)?;
        curves.push(PumpCurve {
            c_p_eq_f: cp,
            v_out_v,
            efficiency,
            i_opt_a: i_opt,
            efficiency_peak: eta_or_nan(&stage, i_opt, cfg.n_stages)?,
            v_out_at_opt_v: steady_state_vout(&stage, i_opt, cfg.n_stages),
        });
    }

    let content = match format {
        Format::Json => json_output(&PumpSweepOutput {
            n_stages: cfg.n_stages,
            i_out_a: i_out,
            curves,
        }),
        Format::Csv => {
            let mut header = vec![String::from("i_out_a")];
            for c in &curves {
                header.push(format!("v_out_cp_{:e}", c.c_p_eq_f));
                header.push(format!("eta_cp_{:e}", c.c_p_eq_f));
            }
            let mut text = csv_line(&header);
            for (k, &i) in i_out.iter().enumerate() {
                let mut fields = vec![fmt_f(i)];
                for c in &curves {
                    fields.push(fmt_f(c.v_out_v[k]));
                    fields.push(fmt_f(c.efficiency[k]));
                }
                text.push_str(&csv_line(&fields));
            }
            text
        }
    };
    write_output(out, &content)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PumpSimConfig {
    pump: MultiStagePump,
    feedback: FeedbackLoop,
    i_load_a: f64,
    duration_s: f64,
    /// Start of the settled window for the summary statistics; defaults to
    /// the second half of the run.
    #[serde(default)]
    tail_from_s: Option<f64>,
    #[serde(default)]
    high_side: Option<HighSideBias>,
}

#[derive(Serialize)]
struct PumpSimSummary {
    setpoint_v: f64,
    samples: usize,
    tail_from_s: f64,
    tail_mean_v: f64,
    tail_min_v: f64,
    tail_max_v: f64,
    tail_enabled_fraction: f64,
    final_v: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    high_side_bias_v: Option<f64>,
}

pub fn run_sim(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: PumpSimConfig = load_config(config)?;
    let trace = simulate_feedback(&cfg.pump, &cfg.feedback, cfg.i_load_a, cfg.duration_s)?;

    let tail_from = cfg.tail_from_s.unwrap_or(cfg.duration_s / 2.0);
    let (mean, min, max) = trace.tail_stats(tail_from).ok_or_else(|| {
        CliError::Config(format!(
            "tail_from_s {tail_from} leaves no samples in a {} s trace",
            cfg.duration_s
        ))
    })?;
    let tail_total = trace.time_s.iter().filter(|&&t| t >= tail_from).count();
    let tail_enabled = trace
        .time_s
        .iter()
        .zip(&trace.clock_enabled)
        .filter(|(&t, &e)| t >= tail_from && e)
        .count();

    let summary = PumpSimSummary {
        setpoint_v: cfg.feedback.setpoint_v(),
        samples: trace.time_s.len(),
        tail_from_s: tail_from,
        tail_mean_v: mean,
        tail_min_v: min,
        tail_max_v: max,
        tail_enabled_fraction: tail_enabled as f64 / tail_total as f64,
        final_v: *trace.v_out_v.last().expect("trace is non-empty"),
        high_side_bias_v: cfg.high_side.as_ref().map(high_side_bias).transpose()?,
    };

    let content = match format {
        Format::Json => json_output(&summary),
        Format::Csv => {
            let mut text = String::from("time_s,v_out_v,clock_enabled\n");
            for k in 0..trace.time_s.len() {
                text.push_str(&csv_line(&[
                    fmt_f(trace.time_s[k]),
                    fmt_f(trace.v_out_v[k]),
                    String::from(if trace.clock_enabled[k] { "1" } else { "0" }),
                ]));
            }
            text
        }
    };
    write_output(out, &content)
}
