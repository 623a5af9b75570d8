//! `radar-calc`: scalar oscillator, PLL, and FMCW link formulas. Each config
//! section is optional; present sections appear in the output under the
//! matching name.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stimvco_core::formulas;

use crate::support::{csv_line, fmt_f, json_output, load_config, write_output, CliError, CliResult, Format};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FomSpec {
    pn_dbchz: f64,
    f0_hz: f64,
    offset_hz: f64,
    p_dc_mw: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlickerSpec {
    k: f64,
    alpha_exp: f64,
    f_hz: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MosFlickerSpec {
    k_f: f64,
    width_m: f64,
    length_m: f64,
    c_ox_f_per_m2: f64,
    f_hz: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KvcoSpec {
    delta_f_hz: f64,
    delta_v: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PllSpec {
    k_pd: f64,
    k_vco: f64,
    k_f: f64,
    n: f64,
    l: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CaptureSpec {
    k_vco_hz_per_v: f64,
    v_c_max: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeResolutionSpec {
    bandwidth_hz: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaxRangeSpec {
    t_chirp_s: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RadarConfig {
    #[serde(default)]
    fom: Option<FomSpec>,
    #[serde(default)]
    flicker: Option<FlickerSpec>,
    #[serde(default)]
    mos_flicker: Option<MosFlickerSpec>,
    #[serde(default)]
    k_vco: Option<KvcoSpec>,
    #[serde(default)]
    pll_bandwidth: Option<PllSpec>,
    #[serde(default)]
    capture_range: Option<CaptureSpec>,
    #[serde(default)]
    range_resolution: Option<RangeResolutionSpec>,
    #[serde(default)]
    max_unambiguous_range: Option<MaxRangeSpec>,
}

#[derive(Default, Serialize)]
struct RadarOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    figure_of_merit_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flicker_psd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mos_flicker_psd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_vco_hz_per_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pll_bandwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    capture_range_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    range_resolution_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_unambiguous_range_m: Option<f64>,
}

pub fn run(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: RadarConfig = load_config(config)?;
    let mut result = RadarOutput::default();

    if let Some(s) = &cfg.fom {
        result.figure_of_merit_db = Some(formulas::fom(s.pn_dbchz, s.f0_hz, s.offset_hz, s.p_dc_mw)?);
    }
    if let Some(s) = &cfg.flicker {
        result.flicker_psd = Some(formulas::flicker_psd(s.k, s.alpha_exp, s.f_hz)?);
    }
    if let Some(s) = &cfg.mos_flicker {
        result.mos_flicker_psd = Some(formulas::mos_flicker_psd(
            s.k_f,
            s.width_m,
            s.length_m,
            s.c_ox_f_per_m2,
            s.f_hz,
        )?);
    }
    if let Some(s) = &cfg.k_vco {
        result.k_vco_hz_per_v = Some(formulas::k_vco(s.delta_f_hz, s.delta_v)?);
    }
    if let Some(s) = &cfg.pll_bandwidth {
        result.pll_bandwidth_hz = Some(formulas::pll_bandwidth(s.k_pd, s.k_vco, s.k_f, s.n, s.l)?);
    }
    if let Some(s) = &cfg.capture_range {
        result.capture_range_rad_per_s =
            Some(formulas::capture_range(s.k_vco_hz_per_v, s.v_c_max)?);
    }
    if let Some(s) = &cfg.range_resolution {
        result.range_resolution_m = Some(formulas::range_resolution(s.bandwidth_hz)?);
    }
    if let Some(s) = &cfg.max_unambiguous_range {
        result.max_unambiguous_range_m = Some(formulas::max_unambiguous_range(s.t_chirp_s)?);
    }

    let rows: Vec<(&str, f64)> = [
        ("figure_of_merit_db", result.figure_of_merit_db),
        ("flicker_psd", result.flicker_psd),
        ("mos_flicker_psd", result.mos_flicker_psd),
        ("k_vco_hz_per_v", result.k_vco_hz_per_v),
        ("pll_bandwidth_hz", result.pll_bandwidth_hz),
        ("capture_range_rad_per_s", result.capture_range_rad_per_s),
        ("range_resolution_m", result.range_resolution_m),
        ("max_unambiguous_range_m", result.max_unambiguous_range_m),
    ]
    .into_iter()
    .filter_map(|(name, v)| v.map(|v| (name, v)))
    .collect();

    if rows.is_empty() {
        return Err(CliError::Config(String::from(
            "config selects no calculation; add at least one section",
        )));
    }

    let content = match format {
        Format::Json => json_output(&result),
        Format::Csv => {
            let mut text = String::from("name,value\n");
            for (name, v) in rows {
                text.push_str(&csv_line(&[String::from(name), fmt_f(v)]));
            }
            text
        }
    };
    write_output(out, &content)
}
