//! `stim-sim`: renders a stimulation drive into a current/voltage trace and
//! reports its charge balance.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stimvco_core::stim::{
    inl_dnl, is_monotonic, net_charge, simulate_balance, synthesize, BiphasicPulse, DacModel,
    StimProgram,
};
use stimvco_core::tissue::{LoadState, TissueLoad};

use crate::support::{csv_line, fmt_f, json_output, load_config, write_output, CliResult, Format};

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Source {
    Program {
        program: StimProgram,
        #[serde(default)]
        dac: DacModel,
    },
    Pulse {
        pulse: BiphasicPulse,
        dt_s: f64,
        #[serde(default)]
        short_resistance_ohm: f64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StimSimConfig {
    source: Source,
    load: TissueLoad,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Summary {
    Program {
        samples: usize,
        duration_s: f64,
        net_charge_c: f64,
        peak_current_a: f64,
        dac_inl_max_lsb: f64,
        dac_dnl_max_lsb: f64,
        dac_monotonic: bool,
    },
    Pulse {
        samples: usize,
        duration_s: f64,
        net_charge_c: f64,
        residual_capacitor_voltage_v: f64,
        residual_after_balance_v: f64,
        balance_time_constant_s: f64,
    },
}

struct Trace {
    time_s: Vec<f64>,
    current_a: Vec<f64>,
    v_load_v: Vec<f64>,
    summary: Summary,
}

fn run_program(program: &StimProgram, dac: &DacModel, load: &TissueLoad) -> CliResult<Trace> {
    let points = synthesize(program, dac)?;
    let dt = 1.0 / program.sample_rate_hz();
    let (time_s, current_a): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    let v_load_v = load.step_voltage_response(&current_a, dt)?;
    let (inl, dnl) = inl_dnl(dac)?;
    let max_abs = |xs: &[f64]| xs.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let summary = Summary::Program {
        samples: current_a.len(),
        duration_s: current_a.len() as f64 * dt,
        net_charge_c: net_charge(&current_a, dt)?,
        peak_current_a: max_abs(&current_a),
        dac_inl_max_lsb: max_abs(&inl),
        dac_dnl_max_lsb: max_abs(&dnl),
        dac_monotonic: is_monotonic(dac)?,
    };
    Ok(Trace {
        time_s,
        current_a,
        v_load_v,
        summary,
    })
}

fn run_pulse(
    pulse: &BiphasicPulse,
    dt: f64,
    short_resistance_ohm: f64,
    load: &TissueLoad,
) -> CliResult<Trace> {
    let current_a = pulse.samples(dt)?;
    let mut state = LoadState::default();
    let v_load_v: Vec<f64> = current_a.iter().map(|&i| load.step(&mut state, i, dt)).collect();
    let residual = state.capacitor_voltage_v;
    let summary = Summary::Pulse {
        samples: current_a.len(),
        duration_s: current_a.len() as f64 * dt,
        net_charge_c: net_charge(&current_a, dt)?,
        residual_capacitor_voltage_v: residual,
        residual_after_balance_v: simulate_balance(
            load,
            residual,
            short_resistance_ohm,
            pulse.balance_duration_s,
        )?,
        balance_time_constant_s: load.balance_time_constant(short_resistance_ohm),
    };
    Ok(Trace {
        time_s: (0..current_a.len()).map(|k| k as f64 * dt).collect(),
        current_a,
        v_load_v,
        summary,
    })
}

pub fn run(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: StimSimConfig = load_config(config)?;
    cfg.load.validate()?;

    let trace = match &cfg.source {
        Source::Program { program, dac } => run_program(program, dac, &cfg.load)?,
        Source::Pulse {
            pulse,
            dt_s,
            short_resistance_ohm,
        } => run_pulse(pulse, *dt_s, *short_resistance_ohm, &cfg.load)?,
    };

    let content = match format {
        Format::Json => json_output(&trace.summary),
        Format::Csv => {
            let mut text = String::from("time_s,current_a,v_load_v\n");
            for k in 0..trace.time_s.len() {
                text.push_str(&csv_line(&[
                    fmt_f(trace.time_s[k]),
                    fmt_f(trace.current_a[k]),
                    fmt_f(trace.v_load_v[k]),
                ]));
            }
            text
        }
    };
    write_output(out, &content)
}
