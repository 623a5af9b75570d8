//! `codec-encode` and `codec-decode`: program JSON to telemetry stream and
//! back, at the bit level or through the DBPSK baseband.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stimvco_core::codec::{
    bits_to_bytes, bytes_to_bits, demodulate, deserialize, modulate, modulate_impaired, pack,
    serialize, unpack, BasebandParams, BasebandSignal, Deserializer, MemoryImage, STREAM_BITS,
};
use stimvco_core::stim::StimProgram;

use crate::support::{
    csv_line, fmt_f, json_output, load_config, write_output, CliError, CliResult, Format,
};

fn one() -> f64 {
    1.0
}

#[derive(Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum EncodeOutput {
    #[default]
    Bits,
    Baseband {
        #[serde(default)]
        params: BasebandParams,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase_rad: f64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EncodeConfig {
    program: StimProgram,
    #[serde(default)]
    output: EncodeOutput,
}

#[derive(Serialize)]
struct EncodedStream {
    bit_count: usize,
    stream_bits: String,
    stream_hex: String,
    image_hex: String,
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_bits(text: &str) -> CliResult<Vec<bool>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CliError::Config(format!(
                "bit strings use only 0 and 1, found {other:?}"
            ))),
        })
        .collect()
}

fn parse_hex(text: &str) -> CliResult<Vec<u8>> {
    if text.len() % 2 != 0 {
        return Err(CliError::Config(String::from(
            "hex strings need an even number of digits",
        )));
    }
    (0..text.len())
        .step_by(2)
        .map(|k| {
            u8::from_str_radix(&text[k..k + 2], 16)
                .map_err(|e| CliError::Config(format!("bad hex byte at offset {k}: {e}")))
        })
        .collect()
}

pub fn run_encode(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    let cfg: EncodeConfig = load_config(config)?;
    let image = pack(&cfg.program)?;
    let bits = serialize(&image);

    let content = match (&cfg.output, format) {
        (EncodeOutput::Bits, Format::Json) => json_output(&EncodedStream {
            bit_count: bits.len(),
            stream_bits: bits_string(&bits),
            stream_hex: hex_string(&bits_to_bytes(&bits)),
            image_hex: hex_string(&image.to_bytes()),
        }),
        (EncodeOutput::Bits, Format::Csv) => {
            let mut text = String::from("index,bit\n");
            for (k, &b) in bits.iter().enumerate() {
                text.push_str(&csv_line(&[
                    k.to_string(),
                    String::from(if b { "1" } else { "0" }),
                ]));
            }
            text
        }
        (
            EncodeOutput::Baseband {
                params,
                amplitude,
                phase_rad,
            },
            format,
        ) => {
            let signal = if *amplitude == 1.0 && *phase_rad == 0.0 {
                modulate(&bits, params)?
            } else {
                modulate_impaired(&bits, params, *amplitude, *phase_rad)?
            };
            match format {
                Format::Json => json_output(&signal),
                Format::Csv => {
                    let mut text = String::from("index,value\n");
                    for (k, &v) in signal.samples.iter().enumerate() {
                        text.push_str(&csv_line(&[k.to_string(), fmt_f(v)]));
                    }
                    text
                }
            }
        }
    };
    write_output(out, &content)
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DecodeInput {
    Bits {
        bits: String,
    },
    Hex {
        stream_hex: String,
    },
    Baseband {
        #[serde(default)]
        params: BasebandParams,
        samples: Vec<f64>,
    },
    /// Sample file as written by `codec-encode --format csv` in baseband
    /// mode: a header line, then `index,value` rows.
    BasebandCsv {
        #[serde(default)]
        params: BasebandParams,
        path: PathBuf,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecodeConfig {
    input: DecodeInput,
    /// Extra leading bits the framer may discard while hunting for sync;
    /// absent means the stream must start on the sync word.
    #[serde(default)]
    hunt_limit: Option<usize>,
}

fn read_sample_csv(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read samples {}: {e}", path.display())))?;
    text.lines()
        .skip(1)
        .enumerate()
        .map(|(k, line)| {
            let value = line.rsplit(',').next().unwrap_or(line);
            value.trim().parse::<f64>().map_err(|e| {
                CliError::Config(format!(
                    "samples {} line {}: {e}",
                    path.display(),
                    k + 2
                ))
            })
        })
        .collect()
}

fn input_bits(input: &DecodeInput) -> CliResult<Vec<bool>> {
    match input {
        DecodeInput::Bits { bits } => parse_bits(bits),
        DecodeInput::Hex { stream_hex } => Ok(bytes_to_bits(&parse_hex(stream_hex)?)),
        DecodeInput::Baseband { params, samples } => {
            let signal = BasebandSignal {
                params: *params,
                samples: samples.clone(),
            };
            Ok(demodulate(&signal)?)
        }
        DecodeInput::BasebandCsv { params, path } => {
            let signal = BasebandSignal {
                params: *params,
                samples: read_sample_csv(path)?,
            };
            Ok(demodulate(&signal)?)
        }
    }
}

fn recover_image(bits: &[bool], hunt_limit: Option<usize>) -> CliResult<MemoryImage> {
    match hunt_limit {
        None => Ok(deserialize(bits)?),
        Some(limit) => {
            let mut machine = Deserializer::with_hunt_limit(limit);
            match machine.feed(bits)? {
                Some(image) => Ok(image),
                None => Ok(machine.finish()?),
            }
        }
    }
}

pub fn run_decode(config: &Path, format: Format, out: Option<&Path>) -> CliResult<()> {
    if format == Format::Csv {
        return Err(CliError::Config(String::from(
            "codec-decode writes the recovered program as JSON; drop --format csv",
        )));
    }
    let cfg: DecodeConfig = load_config(config)?;
    let bits = input_bits(&cfg.input)?;
    if cfg.hunt_limit.is_none() && bits.len() != STREAM_BITS {
        return Err(CliError::Config(format!(
            "stream carries {} bits, expected {STREAM_BITS}; set hunt_limit to scan longer captures",
            bits.len()
        )));
    }
    let image = recover_image(&bits, cfg.hunt_limit)?;
    let program = unpack(&image)?;
    write_output(out, &json_output(&program))
}
