//! Programmable stimulation waveform engine: 32-sample shape tables through
//! an 8-bit differential DAC with amplitude control, charge accounting, and
//! passive charge-balance simulation against a tissue load.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tissue::TissueLoad;

/// Samples per stimulation cycle; the DAC sample rate is 32 × stim frequency.
pub const SAMPLES_PER_CYCLE: usize = 32;

pub const MIN_STIM_FREQUENCY_HZ: f64 = 150.0;
pub const MAX_STIM_FREQUENCY_HZ: f64 = 20_000.0;
pub const MIN_CYCLES: u32 = 7;
pub const MAX_CYCLES: u32 = 2047;
pub const MAX_AMPLITUDE_CODE: u8 = 31;
pub const MIN_BALANCE_DURATION_S: f64 = 16e-3;
pub const MAX_BALANCE_DURATION_S: f64 = 1.28;
pub const DEFAULT_FULL_SCALE_A: f64 = 1.25e-3;

/// Waveform shape tag. Non-arbitrary shapes must carry their canonical table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Sine,
    Triangle,
    Square,
    Arbitrary,
}

/// Full description of one programmable stimulation burst.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StimProgram {
    pub shape: Shape,
    /// One cycle of DAC codes; code 128 is zero differential current.
    pub sample_table: [u8; SAMPLES_PER_CYCLE],
    /// Stimulation frequency (Hz), 150 to 20000.
    pub stim_frequency_hz: f64,
    /// Cycles per burst, 7 to 2047.
    pub cycles: u32,
    /// 5-bit amplitude control; output scales by amplitude_code/31.
    pub amplitude_code: u8,
    /// Full-scale output current (A).
    #[serde(default = "default_full_scale")]
    pub full_scale_current_a: f64,
    /// Electrode-shorting window after the burst (s), 16 ms to 1.28 s.
    pub balance_duration_s: f64,
}

fn default_full_scale() -> f64 {
    DEFAULT_FULL_SCALE_A
}

fn quantized_table(shape: impl Fn(f64) -> f64) -> [u8; SAMPLES_PER_CYCLE] {
    let mut table = [0u8; SAMPLES_PER_CYCLE];
    for (k, slot) in table.iter_mut().enumerate() {
        let u = (k as f64 + 0.5) / SAMPLES_PER_CYCLE as f64;
        *slot = (128.0 + (127.0 * shape(u)).round()) as u8;
    }
    table
}

/// Canonical sine table, negative phase first.
pub fn sine_table() -> [u8; SAMPLES_PER_CYCLE] {
    quantized_table(|u| -(std::f64::consts::TAU * u).sin())
}

/// Canonical triangle table, negative phase first.
pub fn triangle_table() -> [u8; SAMPLES_PER_CYCLE] {
    quantized_table(|u| {
        if u < 0.25 {
            -4.0 * u
        } else if u < 0.75 {
            4.0 * (u - 0.5)
        } else {
            4.0 * (1.0 - u)
        }
    })
}

/// Canonical square table, negative phase first.
pub fn square_table() -> [u8; SAMPLES_PER_CYCLE] {
    quantized_table(|u| if u < 0.5 { -1.0 } else { 1.0 })
}

/// Canonical table for a non-arbitrary shape.
pub fn canonical_table(shape: Shape) -> Option<[u8; SAMPLES_PER_CYCLE]> {
    match shape {
        Shape::Sine => Some(sine_table()),
        Shape::Triangle => Some(triangle_table()),
        Shape::Square => Some(square_table()),
        Shape::Arbitrary => None,
    }
}

impl StimProgram {
    fn with_shape(shape: Shape, table: [u8; SAMPLES_PER_CYCLE]) -> Self {
        StimProgram {
            shape,
            sample_table: table,
            stim_frequency_hz: MIN_STIM_FREQUENCY_HZ,
            cycles: MIN_CYCLES,
            amplitude_code: MAX_AMPLITUDE_CODE,
            full_scale_current_a: DEFAULT_FULL_SCALE_A,
            balance_duration_s: MIN_BALANCE_DURATION_S,
        }
    }

    pub fn sine(stim_frequency_hz: f64, cycles: u32, amplitude_code: u8) -> Self {
        StimProgram {
            stim_frequency_hz,
            cycles,
            amplitude_code,
            ..Self::with_shape(Shape::Sine, sine_table())
        }
    }

    pub fn triangle(stim_frequency_hz: f64, cycles: u32, amplitude_code: u8) -> Self {
        StimProgram {
            stim_frequency_hz,
            cycles,
            amplitude_code,
            ..Self::with_shape(Shape::Triangle, triangle_table())
        }
    }

    pub fn square(stim_frequency_hz: f64, cycles: u32, amplitude_code: u8) -> Self {
        StimProgram {
            stim_frequency_hz,
            cycles,
            amplitude_code,
            ..Self::with_shape(Shape::Square, square_table())
        }
    }

    pub fn arbitrary(
        table: [u8; SAMPLES_PER_CYCLE],
        stim_frequency_hz: f64,
        cycles: u32,
        amplitude_code: u8,
    ) -> Self {
        StimProgram {
            stim_frequency_hz,
            cycles,
            amplitude_code,
            ..Self::with_shape(Shape::Arbitrary, table)
        }
    }

    /// DAC sample rate (Hz): 32 samples per stimulation cycle.
    pub fn sample_rate_hz(&self) -> f64 {
        SAMPLES_PER_CYCLE as f64 * self.stim_frequency_hz
    }

    pub fn validate(&self) -> Result<()> {
        if !self.stim_frequency_hz.is_finite()
            || self.stim_frequency_hz < MIN_STIM_FREQUENCY_HZ
            || self.stim_frequency_hz > MAX_STIM_FREQUENCY_HZ
        {
            return Err(Error::validation(
                "stim_frequency_hz",
                format!(
                    "must be in [{MIN_STIM_FREQUENCY_HZ}, {MAX_STIM_FREQUENCY_HZ}], got {}",
                    self.stim_frequency_hz
                ),
            ));
        }
        if self.cycles < MIN_CYCLES || self.cycles > MAX_CYCLES {
            return Err(Error::validation(
                "cycles",
                format!("must be in [{MIN_CYCLES}, {MAX_CYCLES}], got {}", self.cycles),
            ));
        }
        if self.amplitude_code > MAX_AMPLITUDE_CODE {
            return Err(Error::validation(
                "amplitude_code",
                format!("must be at most {MAX_AMPLITUDE_CODE}, got {}", self.amplitude_code),
            ));
        }
        if !self.full_scale_current_a.is_finite() || self.full_scale_current_a <= 0.0 {
            return Err(Error::validation(
                "full_scale_current_a",
                "must be finite and > 0",
            ));
        }
        if !self.balance_duration_s.is_finite()
            || self.balance_duration_s < MIN_BALANCE_DURATION_S
            || self.balance_duration_s > MAX_BALANCE_DURATION_S
        {
            return Err(Error::validation(
                "balance_duration_s",
                format!(
                    "must be in [{MIN_BALANCE_DURATION_S}, {MAX_BALANCE_DURATION_S}], got {}",
                    self.balance_duration_s
                ),
            ));
        }
        if let Some(expected) = canonical_table(self.shape) {
            if self.sample_table != expected {
                return Err(Error::validation(
                    "sample_table",
                    format!("does not match the canonical {:?} table", self.shape),
                ));
            }
        } else {
            for named in [Shape::Sine, Shape::Triangle, Shape::Square] {
                if canonical_table(named) == Some(self.sample_table) {
                    return Err(Error::validation(
                        "shape",
                        format!("sample table is the canonical {named:?} table; declare that shape"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// 8-bit DAC with an optional per-code error injection table (LSB units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DacModel {
    /// Per-code transfer error in LSB; empty means ideal. Length 256 otherwise.
    #[serde(default)]
    pub inl_injection_lsb: Vec<f64>,
}

impl DacModel {
    pub const RESOLUTION_BITS: u32 = 8;
    pub const CODES: usize = 256;
    pub const MID_CODE: f64 = 128.0;

    pub fn ideal() -> Self {
        DacModel::default()
    }

    /// Ideal DAC with one injected code error (LSB).
    pub fn with_code_error(code: u8, error_lsb: f64) -> Self {
        let mut table = vec![0.0; Self::CODES];
        table[code as usize] = error_lsb;
        DacModel {
            inl_injection_lsb: table,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.inl_injection_lsb.is_empty() && self.inl_injection_lsb.len() != Self::CODES {
            return Err(Error::validation(
                "inl_injection_lsb",
                format!("must be empty or {} entries", Self::CODES),
            ));
        }
        if self.inl_injection_lsb.iter().any(|e| !e.is_finite()) {
            return Err(Error::validation("inl_injection_lsb", "entries must be finite"));
        }
        Ok(())
    }

    /// Transfer output in LSB units for a code.
    pub fn transfer(&self, code: u8) -> f64 {
        let err = self
            .inl_injection_lsb
            .get(code as usize)
            .copied()
            .unwrap_or(0.0);
        code as f64 + err
    }

    /// Differential output normalized to full scale: code 128 maps to 0,
    /// code 0 to −1.
    pub fn differential(&self, code: u8) -> f64 {
        (self.transfer(code) - Self::MID_CODE) / Self::MID_CODE
    }
}

/// Endpoint-fit INL per code and DNL per step, both in LSB.
pub fn inl_dnl(dac: &DacModel) -> Result<(Vec<f64>, Vec<f64>)> {
    dac.validate()?;
    let n = DacModel::CODES;
    let t0 = dac.transfer(0);
    let t_end = dac.transfer((n - 1) as u8);
    let slope = (t_end - t0) / (n - 1) as f64;
    let inl: Vec<f64> = (0..n)
        .map(|c| dac.transfer(c as u8) - (t0 + slope * c as f64))
        .collect();
    let dnl: Vec<f64> = (0..n - 1)
        .map(|c| dac.transfer((c + 1) as u8) - dac.transfer(c as u8) - 1.0)
        .collect();
    Ok((inl, dnl))
}

/// True when every step size stays above −1 LSB, i.e. the transfer is
/// monotonic.
pub fn is_monotonic(dac: &DacModel) -> Result<bool> {
    let (_, dnl) = inl_dnl(dac)?;
    Ok(dnl.iter().all(|&d| d > -1.0))
}

/// Renders a program through the DAC into (time, current) samples.
pub fn synthesize(program: &StimProgram, dac: &DacModel) -> Result<Vec<(f64, f64)>> {
    program.validate()?;
    dac.validate()?;
    let dt = 1.0 / program.sample_rate_hz();
    let gain = program.full_scale_current_a * program.amplitude_code as f64
        / MAX_AMPLITUDE_CODE as f64;
    let total = SAMPLES_PER_CYCLE * program.cycles as usize;
    Ok((0..total)
        .map(|k| {
            let code = program.sample_table[k % SAMPLES_PER_CYCLE];
            (k as f64 * dt, gain * dac.differential(code))
        })
        .collect())
}

/// Trapezoidal integral of a sampled current (A) over uniform steps dt (s).
pub fn net_charge(currents: &[f64], dt: f64) -> Result<f64> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::domain(format!("dt must be > 0, got {dt}")));
    }
    if currents.len() < 2 {
        return Ok(0.0);
    }
    let interior: f64 = currents[1..currents.len() - 1].iter().sum();
    Ok(dt * ((currents[0] + currents[currents.len() - 1]) / 2.0 + interior))
}

/// Biphasic current pulse, negative phase first. Amplitudes are magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiphasicPulse {
    pub amp_neg_a: f64,
    pub amp_pos_a: f64,
    pub dur_neg_s: f64,
    pub dur_pos_s: f64,
    #[serde(default)]
    pub interphase_gap_s: f64,
    pub balance_duration_s: f64,
}

impl BiphasicPulse {
    pub fn symmetric(amplitude_a: f64, phase_duration_s: f64, balance_duration_s: f64) -> Self {
        BiphasicPulse {
            amp_neg_a: amplitude_a,
            amp_pos_a: amplitude_a,
            dur_neg_s: phase_duration_s,
            dur_pos_s: phase_duration_s,
            interphase_gap_s: 0.0,
            balance_duration_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("amp_neg_a", self.amp_neg_a),
            ("amp_pos_a", self.amp_pos_a),
            ("dur_neg_s", self.dur_neg_s),
            ("dur_pos_s", self.dur_pos_s),
            ("interphase_gap_s", self.interphase_gap_s),
            ("balance_duration_s", self.balance_duration_s),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::validation(name, "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn total_duration_s(&self) -> f64 {
        self.dur_neg_s + self.interphase_gap_s + self.dur_pos_s
    }

    /// Pointwise current at time t, taking the right limit at boundaries.
    pub fn value(&self, t: f64) -> f64 {
        let b1 = self.dur_neg_s;
        let b2 = b1 + self.interphase_gap_s;
        let b3 = b2 + self.dur_pos_s;
        if t < 0.0 || t >= b3 {
            0.0
        } else if t < b1 {
            -self.amp_neg_a
        } else if t < b2 {
            0.0
        } else {
            self.amp_pos_a
        }
    }

    /// Uniform samples at t_k = k·dt, one step past the final edge. Samples
    /// landing on an interior discontinuity take the mean of the two one-sided
    /// limits, which keeps the trapezoidal charge integral exact for
    /// dt-aligned phase durations.
    pub fn samples(&self, dt: f64) -> Result<Vec<f64>> {
        self.validate()?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain(format!("dt must be > 0, got {dt}")));
        }
        let total = self.total_duration_s();
        let ratio = total / dt;
        let steps = if (ratio - ratio.round()).abs() <= 1e-9 {
            ratio.round() as usize
        } else {
            ratio.ceil() as usize
        };
        let eps = dt * 1e-9;
        let mut out = Vec::with_capacity(steps + 2);
        for k in 0..=(steps + 1) {
            let t = k as f64 * dt;
            let v = if k > 0 && self.is_breakpoint(t, eps) {
                (self.value(t - dt / 2.0) + self.value(t + dt / 2.0)) / 2.0
            } else {
                self.value(t)
            };
            out.push(v);
        }
        Ok(out)
    }

    fn is_breakpoint(&self, t: f64, eps: f64) -> bool {
        let b1 = self.dur_neg_s;
        let b2 = b1 + self.interphase_gap_s;
        let b3 = b2 + self.dur_pos_s;
        [b1, b2, b3].iter().any(|b| (t - b).abs() <= eps)
    }
}

/// Remaining residual capacitor voltage after shorting the electrodes
/// through `short_resistance` for `duration`.
pub fn simulate_balance(
    load: &TissueLoad,
    residual_capacitor_voltage: f64,
    short_resistance: f64,
    duration: f64,
) -> Result<f64> {
    load.validate()?;
    if !duration.is_finite() || duration < 0.0 {
        return Err(Error::domain(format!(
            "balance duration must be >= 0, got {duration}"
        )));
    }
    if !short_resistance.is_finite() || short_resistance < 0.0 {
        return Err(Error::domain(format!(
            "short resistance must be >= 0, got {short_resistance}"
        )));
    }
    let tau = load.balance_time_constant(short_resistance);
    Ok(residual_capacitor_voltage * (-duration / tau).exp())
}
