//! `refclock-sweep`: bandgap reference current over temperature, optionally
//! driving the relaxation oscillator.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stimvco_core::refclock::{
    calibrate, i_ref, osc_frequency, osc_transient_oracle, BandgapModel, RelaxOsc,
};
use stimvco_core::sweep::Axis;

use crate::support::{csv_line, fmt_f, json_output, load_config, write_output, CliResult, Format};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Calibration {
    target_a: f64,
    temp_c: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RefclockConfig {
    #[serde(default)]
    bandgap: BandgapModel,
    #[serde(default)]
    calibration: Option<Calibration>,
    temperature_axis: Axis,
    /// When present, each row also reports this oscillator running from the
    /// reference current at that temperature.
    #[serde(default)]
    oscillator: Option<RelaxOsc>,
}

#[derive(Serialize)]
struct RefclockRow {
    temp_c: f64,
    i_ref_a: f64,
    deviation_ppm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    core_frequency_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    divided_frequency_hz: Option<f64>,
}

#[derive(Serialize)]
struct DeviationMinimum {
    temp_c: f64,
    i_ref_a: f64,
    deviation_ppm: f64,
}

#[derive(Serialize)]
struct OscSummary {
    core_frequency_hz: f64,
    divided_frequency_hz: f64,
    core_in_band: bool,
    divided_in_band: bool,
    transient_oracle_hz: f64,
}

#[derive(Serialize)]
struct RefclockOutput {
    mirror_ratio: f64,
    reference_temp_c: f64,
    reference_current_a: f64,
    min_deviation: DeviationMinimum,
    #[serde(skip_serializing_if = "Option::is_none")]
    oscillator_at_reference: Option<OscSummary>,
    rows: Vec<RefclockRow>,
}

pub fn run(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: RefclockConfig = load_config(config)?;
    cfg.temperature_axis.validate()?;

    let temps = cfg.temperature_axis.values();
    let (model, ref_temp) = match &cfg.calibration {
        Some(c) => (calibrate(&cfg.bandgap, c.target_a, c.temp_c)?, c.temp_c),
        None => (cfg.bandgap, temps[0]),
    };
    let i_reference = i_ref(&model, ref_temp)?;

    let mut rows = Vec::with_capacity(temps.len());
    for &t in &temps {
        let i = i_ref(&model, t)?;
        let report = cfg
            .oscillator
            .as_ref()
            .map(|osc| osc_frequency(&RelaxOsc { i_osc_a: i, ..*osc }))
            .transpose()?;
        rows.push(RefclockRow {
            temp_c: t,
            i_ref_a: i,
            deviation_ppm: (i - i_reference) / i_reference * 1e6,
            core_frequency_hz: report.as_ref().map(|r| r.core_frequency_hz),
            divided_frequency_hz: report.as_ref().map(|r| r.divided_frequency_hz),
        });
    }

    let content = match format {
        Format::Json => {
            let min_row = rows
                .iter()
                .min_by(|a, b| {
                    a.deviation_ppm
                        .abs()
                        .total_cmp(&b.deviation_ppm.abs())
                })
                .expect("axis has at least two points");
            let oscillator_at_reference = cfg
                .oscillator
                .as_ref()
                .map(|osc| -> CliResult<OscSummary> {
                    let at_ref = RelaxOsc {
                        i_osc_a: i_reference,
                        ..*osc
                    };
                    let report = osc_frequency(&at_ref)?;
                    Ok(OscSummary {
                        core_frequency_hz: report.core_frequency_hz,
                        divided_frequency_hz: report.divided_frequency_hz,
                        core_in_band: report.core_in_band,
                        divided_in_band: report.divided_in_band,
                        transient_oracle_hz: osc_transient_oracle(&at_ref, 16)?,
                    })
                })
                .transpose()?;
            json_output(&RefclockOutput {
                mirror_ratio: model.mirror_ratio,
                reference_temp_c: ref_temp,
                reference_current_a: i_reference,
                min_deviation: DeviationMinimum {
                    temp_c: min_row.temp_c,
                    i_ref_a: min_row.i_ref_a,
                    deviation_ppm: min_row.deviation_ppm,
                },
                oscillator_at_reference,
                rows,
            })
        }
        Format::Csv => {
            let with_osc = cfg.oscillator.is_some();
            let mut text = String::from(if with_osc {
                "temp_c,i_ref_a,deviation_ppm,core_frequency_hz,divided_frequency_hz\n"
            } else {
                "temp_c,i_ref_a,deviation_ppm\n"
            });
            for r in &rows {
                let mut fields = vec![
                    fmt_f(r.temp_c),
                    fmt_f(r.i_ref_a),
                    fmt_f(r.deviation_ppm),
                ];
                if with_osc {
                    fields.push(fmt_f(r.core_frequency_hz.unwrap()));
                    fields.push(fmt_f(r.divided_frequency_hz.unwrap()));
                }
                text.push_str(&csv_line(&fields));
            }
            text
        }
    };
    write_output(out, &content)
}
