//! `tline-opt`: feedback line length sweep and optimum, with an optional
//! second-harmonic power evaluation at the configured length.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use stimvco_core::harmonics::{harmonic_current, harmonic_power, HarmonicPowerCoefficients};
use stimvco_core::tline::{
    length_sweep, optimal_length, rv_from_tline, TlineFeedback, VoltageRatio,
};

use crate::support::{csv_line, fmt_f, json_output, load_config, write_output, CliResult, Format};

fn one() -> u32 {
    1
}

fn default_points() -> usize {
    512
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HarmonicPowerConfig {
    coefficients: HarmonicPowerCoefficients,
    v1_drain: Complex64,
    v2_drain: Complex64,
    r_v2: VoltageRatio,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TlineConfig {
    #[serde(default)]
    tline: TlineFeedback,
    #[serde(default = "one")]
    harmonic: u32,
    #[serde(default = "default_points")]
    sweep_points: usize,
    /// When present, the gate ratio from the configured line length drives
    /// the second-harmonic current and power evaluation.
    #[serde(default)]
    harmonic_power: Option<HarmonicPowerConfig>,
}

#[derive(Serialize)]
struct HarmonicPowerOutput {
    r_v1: VoltageRatio,
    current_a: Complex64,
    power_w: f64,
}

#[derive(Serialize)]
struct TlineOutput {
    harmonic: u32,
    wavelength_m: f64,
    optimal_length_m: f64,
    rv_at_optimum: VoltageRatio,
    rv_at_configured_length: VoltageRatio,
    #[serde(skip_serializing_if = "Option::is_none")]
    harmonic_power: Option<HarmonicPowerOutput>,
}

pub fn run(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: TlineConfig = load_config(config)?;
    cfg.tline.validate()?;

    let l_opt = optimal_length(&cfg.tline, cfg.harmonic)?;
    let at_optimum = TlineFeedback {
        length_m: l_opt,
        ..cfg.tline
    };
    let rv_at_optimum = rv_from_tline(&at_optimum, cfg.harmonic)?;
    let rv_at_configured = rv_from_tline(&cfg.tline, cfg.harmonic)?;

    let content = match format {
        Format::Json => {
            let harmonic_power = cfg
                .harmonic_power
                .as_ref()
                .map(|hp| -> CliResult<HarmonicPowerOutput> {
                    hp.r_v2.validate()?;
                    Ok(HarmonicPowerOutput {
                        r_v1: rv_at_configured,
                        current_a: harmonic_current(
                            &hp.coefficients,
                            hp.v1_drain,
                            hp.v2_drain,
                            &rv_at_configured,
                            &hp.r_v2,
                        )?,
                        power_w: harmonic_power(
                            &hp.coefficients,
                            hp.v1_drain,
                            hp.v2_drain,
                            &rv_at_configured,
                            &hp.r_v2,
                        )?,
                    })
                })
                .transpose()?;
            json_output(&TlineOutput {
                harmonic: cfg.harmonic,
                wavelength_m: cfg.tline.wavelength_m(cfg.harmonic),
                optimal_length_m: l_opt,
                rv_at_optimum,
                rv_at_configured_length: rv_at_configured,
                harmonic_power,
            })
        }
        Format::Csv => {
            let sweep = length_sweep(&cfg.tline, cfg.harmonic, cfg.sweep_points)?;
            let mut text = String::from("length_m,rv_magnitude\n");
            for (l, mag) in sweep {
                text.push_str(&csv_line(&[fmt_f(l), fmt_f(mag)]));
            }
            text
        }
    };
    write_output(out, &content)
}
