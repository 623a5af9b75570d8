//! `load-z`: electrode load impedance across a frequency axis.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stimvco_core::sweep::{map_values, Axis};
use stimvco_core::tissue::TissueLoad;

use crate::support::{csv_line, fmt_f, json_output, load_config, write_output, CliResult, Format};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadZConfig {
    load: TissueLoad,
    frequency_axis: Axis,
}

#[derive(Serialize)]
struct ImpedanceRow {
    frequency_hz: f64,
    re_ohm: f64,
    im_ohm: f64,
    magnitude_ohm: f64,
    phase_rad: f64,
}

pub fn run(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: LoadZConfig = load_config(config)?;
    cfg.load.validate()?;
    cfg.frequency_axis.validate()?;

    let freqs = cfg.frequency_axis.values();
    let load = cfg.load;
    let rows = map_values(&freqs, |f| load.impedance(f))
        .into_iter()
        .zip(&freqs)
        .map(|(z, &f)| {
            z.map(|z| ImpedanceRow {
                frequency_hz: f,
                re_ohm: z.re,
                im_ohm: z.im,
                magnitude_ohm: z.norm(),
                phase_rad: z.arg(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let content = match format {
        Format::Json => json_output(&rows),
        Format::Csv => {
            let mut text =
                String::from("frequency_hz,re_ohm,im_ohm,magnitude_ohm,phase_rad\n");
            for r in &rows {
                text.push_str(&csv_line(&[
                    fmt_f(r.frequency_hz),
                    fmt_f(r.re_ohm),
                    fmt_f(r.im_ohm),
                    fmt_f(r.magnitude_ohm),
                    fmt_f(r.phase_rad),
                ]));
            }
            text
        }
    };
    write_output(out, &content)
}
