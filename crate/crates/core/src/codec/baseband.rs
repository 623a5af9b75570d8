//! Differential BPSK baseband model: bit 1 flips the carrier phase by 180°
//! at a symbol boundary, bit 0 keeps it; the demodulator correlates adjacent
//! symbols and reads the sign.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CARRIER_FREQUENCY_HZ: f64 = 13.56e6;
pub const DEFAULT_SAMPLES_PER_CYCLE: u32 = 8;
pub const DEFAULT_CYCLES_PER_BIT: u32 = 8;
pub const MIN_SAMPLES_PER_CYCLE: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasebandParams {
    pub carrier_frequency_hz: f64,
    pub samples_per_cycle: u32,
    pub cycles_per_bit: u32,
}

impl Default for BasebandParams {
    fn default() -> Self {
        BasebandParams {
            carrier_frequency_hz: DEFAULT_CARRIER_FREQUENCY_HZ,
            samples_per_cycle: DEFAULT_SAMPLES_PER_CYCLE,
            cycles_per_bit: DEFAULT_CYCLES_PER_BIT,
        }
    }
}

impl BasebandParams {
    pub fn validate(&self) -> Result<()> {
        if !self.carrier_frequency_hz.is_finite() || self.carrier_frequency_hz <= 0.0 {
            return Err(Error::validation(
                "carrier_frequency_hz",
                "must be finite and > 0",
            ));
        }
        if self.samples_per_cycle < MIN_SAMPLES_PER_CYCLE {
            return Err(Error::validation(
                "samples_per_cycle",
                format!("must be at least {MIN_SAMPLES_PER_CYCLE}"),
            ));
        }
        if self.cycles_per_bit < 1 {
            return Err(Error::validation("cycles_per_bit", "must be at least 1"));
        }
        Ok(())
    }

    pub fn samples_per_symbol(&self) -> usize {
        (self.samples_per_cycle * self.cycles_per_bit) as usize
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.carrier_frequency_hz * self.samples_per_cycle as f64
    }
}

/// Sampled carrier for one stream: a reference symbol followed by one
/// symbol per bit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasebandSignal {
    pub params: BasebandParams,
    pub samples: Vec<f64>,
}

impl BasebandSignal {
    /// Number of data bits this signal carries.
    pub fn bit_capacity(&self) -> usize {
        (self.samples.len() / self.params.samples_per_symbol()).saturating_sub(1)
    }
}

/// Encodes bits onto a unit-amplitude carrier with zero phase offset.
pub fn modulate(bits: &[bool], params: &BasebandParams) -> Result<BasebandSignal> {
    modulate_impaired(bits, params, 1.0, 0.0)
}

/// Encoding with a global amplitude scale and constant carrier phase offset,
/// modeling the channel conditions a receiver must be invariant to. One
/// carrier cycle is tabulated once so the waveform is exactly periodic.
pub fn modulate_impaired(
    bits: &[bool],
    params: &BasebandParams,
    amplitude: f64,
    phase_offset_rad: f64,
) -> Result<BasebandSignal> {
    params.validate()?;
    if !amplitude.is_finite() || amplitude <= 0.0 {
        return Err(Error::validation("amplitude", "must be finite and > 0"));
    }
    if !phase_offset_rad.is_finite() {
        return Err(Error::validation("phase_offset_rad", "must be finite"));
    }
    let spc = params.samples_per_cycle as usize;
    let cycle: Vec<f64> = (0..spc)
        .map(|j| amplitude * (std::f64::consts::TAU * j as f64 / spc as f64 + phase_offset_rad).cos())
        .collect();
    let per_symbol = params.samples_per_symbol();
    let mut samples = Vec::with_capacity((bits.len() + 1) * per_symbol);
    let mut sign = 1.0;
    for k in 0..per_symbol {
        samples.push(cycle[k % spc]);
    }
    for &bit in bits {
        if bit {
            sign = -sign;
        }
        for k in 0..per_symbol {
            samples.push(sign * cycle[k % spc]);
        }
    }
    Ok(BasebandSignal {
        params: *params,
        samples,
    })
}

/// Recovers bits by correlating each symbol with its predecessor: a phase
/// flip makes the correlation negative. The signal must hold the reference
/// symbol plus at least one data symbol, in whole symbols.
pub fn demodulate(signal: &BasebandSignal) -> Result<Vec<bool>> {
    signal.params.validate()?;
    let per_symbol = signal.params.samples_per_symbol();
    let len = signal.samples.len();
    if len < 2 * per_symbol || len % per_symbol != 0 {
        return Err(Error::Length {
            expected: (len / per_symbol).max(2) * per_symbol,
            actual: len,
        });
    }
    let symbols = len / per_symbol;
    let mut bits = Vec::with_capacity(symbols - 1);
    for s in 1..symbols {
        let prev = &signal.samples[(s - 1) * per_symbol..s * per_symbol];
        let cur = &signal.samples[s * per_symbol..(s + 1) * per_symbol];
        let corr: f64 = prev.iter().zip(cur).map(|(a, b)| a * b).sum();
        bits.push(corr < 0.0);
    }
    Ok(bits)
}
