//! `isf-sweep`: impulse sensitivity maps over waveform shape, noise
//! modulation maps over the gate drive ratio, or a single-point profile.

use std::path::Path;

use serde::Deserialize;
use stimvco_core::isf::{
    profile, sweep_isf, HarmonicWaveform, DEFAULT_ISF_SAMPLES, DEFAULT_SPECTRUM_ORDER,
};
use stimvco_core::nmf::{sweep_rv1, DeviceModel, DriveSpec};
use stimvco_core::sweep::Axis;

use crate::support::{csv_line, fmt_f, json_output, load_config, matrix_csv, write_output, CliResult, Format};

fn default_samples() -> usize {
    DEFAULT_ISF_SAMPLES
}

fn default_order() -> usize {
    DEFAULT_SPECTRUM_ORDER
}

#[derive(Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum IsfConfig {
    /// Γ statistics over a second-harmonic (amplitude, phase) grid.
    Gamma {
        a2_axis: Axis,
        phi2_axis: Axis,
        #[serde(default = "default_samples")]
        n_samples: usize,
    },
    /// α_rms over a fundamental gate-ratio (magnitude, phase) grid.
    Nmf {
        waveform: HarmonicWaveform,
        #[serde(default)]
        device: DeviceModel,
        #[serde(default)]
        drive: DriveSpec,
        magnitude_axis: Axis,
        phase_axis: Axis,
        #[serde(default = "default_samples")]
        n_samples: usize,
    },
    /// Γ, α, and the analyzed Γ_eff at one operating point.
    GammaEff {
        waveform: HarmonicWaveform,
        #[serde(default)]
        device: DeviceModel,
        #[serde(default)]
        drive: DriveSpec,
        #[serde(default = "default_samples")]
        n_samples: usize,
        #[serde(default = "default_order")]
        order: usize,
    },
}

pub fn run(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: IsfConfig = load_config(config)?;
    let content = match cfg {
        IsfConfig::Gamma {
            a2_axis,
            phi2_axis,
            n_samples,
        } => {
            let sweep = sweep_isf(&a2_axis, &phi2_axis, n_samples)?;
            match format {
                Format::Json => json_output(&sweep),
                Format::Csv => matrix_csv(
                    "gamma_rms a2/phi2_rad",
                    &sweep.a2,
                    &sweep.phi2_rad,
                    &sweep.gamma_rms,
                ),
            }
        }
        IsfConfig::Nmf {
            waveform,
            device,
            drive,
            magnitude_axis,
            phase_axis,
            n_samples,
        } => {
            let sweep = sweep_rv1(
                &device,
                &waveform,
                &drive,
                &magnitude_axis,
                &phase_axis,
                n_samples,
            )?;
            match format {
                Format::Json => json_output(&sweep),
                Format::Csv => matrix_csv(
                    "alpha_rms rv1_magnitude/rv1_phase_rad",
                    &sweep.magnitude,
                    &sweep.phase_rad,
                    &sweep.alpha_rms,
                ),
            }
        }
        IsfConfig::GammaEff {
            waveform,
            device,
            drive,
            n_samples,
            order,
        } => {
            let point = profile(&waveform, &device, &drive, n_samples, order)?;
            match format {
                Format::Json => json_output(&point),
                Format::Csv => {
                    let mut text = String::from("theta_rad,gamma,alpha,gamma_eff\n");
                    for k in 0..point.theta.len() {
                        text.push_str(&csv_line(&[
                            fmt_f(point.theta[k]),
                            fmt_f(point.gamma[k]),
                            fmt_f(point.alpha[k]),
                            fmt_f(point.gamma_eff.samples[k]),
                        ]));
                    }
                    text
                }
            }
        }
    };
    write_output(out, &content)
}
