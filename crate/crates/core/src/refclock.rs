//! Bandgap current-reference temperature model and relaxation-oscillator
//! frequency model with output divider.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{BOLTZMANN, ELEMENTARY_CHARGE, KELVIN_AT_0C};

/// Emitter area ratio of the bandgap core pair; the PTAT term scales with
/// ln of this value.
pub const EMITTER_AREA_RATIO: f64 = 8.0;

/// Temperature range over which the reference model is considered valid.
pub const MIN_TEMP_C: f64 = -20.0;
pub const MAX_TEMP_C: f64 = 65.0;

/// Current reference built from a V_BE/R_2 branch summed with a PTAT
/// V_T·ln8/R_3 branch, scaled by an output mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandgapModel {
    pub v_be_at_t0_v: f64,
    pub dv_be_dt_v_per_c: f64,
    pub t0_c: f64,
    pub r_2_ohm: f64,
    pub r_3_ohm: f64,
    pub mirror_ratio: f64,
    /// Linear resistor temperature coefficient (1/°C), applied to both
    /// resistors around t0_c. Zero by default.
    #[serde(default)]
    pub r_tempco_per_c: f64,
}

impl Default for BandgapModel {
    fn default() -> Self {
        BandgapModel {
            v_be_at_t0_v: 0.65,
            dv_be_dt_v_per_c: -2e-3,
            t0_c: 36.0,
            r_2_ohm: 45.3e3,
            r_3_ohm: 6.13e3,
            mirror_ratio: 1.0,
            r_tempco_per_c: 0.0,
        }
    }
}

impl BandgapModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r_2_ohm", self.r_2_ohm), ("r_3_ohm", self.r_3_ohm)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        if !self.mirror_ratio.is_finite() || self.mirror_ratio < 0.0 {
            return Err(Error::validation("mirror_ratio", "must be finite and >= 0"));
        }
        for (name, v) in [
            ("v_be_at_t0_v", self.v_be_at_t0_v),
            ("dv_be_dt_v_per_c", self.dv_be_dt_v_per_c),
            ("t0_c", self.t0_c),
            ("r_tempco_per_c", self.r_tempco_per_c),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Base-emitter voltage at `temp_c`, linear around t0_c.
    pub fn v_be(&self, temp_c: f64) -> f64 {
        self.v_be_at_t0_v + self.dv_be_dt_v_per_c * (temp_c - self.t0_c)
    }
}

/// Thermal voltage kT/q at `temp_c`.
pub fn thermal_voltage(temp_c: f64) -> f64 {
    BOLTZMANN * (temp_c + KELVIN_AT_0C) / ELEMENTARY_CHARGE
}

/// Reference current mirror_ratio·(V_BE(T)/R_2 + V_T(T)·ln8/R_3).
pub fn i_ref(model: &BandgapModel, temp_c: f64) -> Result<f64> {
    model.validate()?;
    if !(MIN_TEMP_C..=MAX_TEMP_C).contains(&temp_c) {
        return Err(Error::domain(format!(
            "temperature {temp_c} °C outside model validity [{MIN_TEMP_C}, {MAX_TEMP_C}] °C"
        )));
    }
    let scale = 1.0 + model.r_tempco_per_c * (temp_c - model.t0_c);
    let r_2 = model.r_2_ohm * scale;
    let r_3 = model.r_3_ohm * scale;
    if r_2 <= 0.0 || r_3 <= 0.0 {
        return Err(Error::domain(
            "resistor temperature coefficient drives a resistance non-positive",
        ));
    }
    let inner = model.v_be(temp_c) / r_2
        + thermal_voltage(temp_c) * EMITTER_AREA_RATIO.ln() / r_3;
    Ok(model.mirror_ratio * inner)
}

/// Rescales the mirror ratio so that i_ref(t_cal_c) equals `target_a`.
pub fn calibrate(model: &BandgapModel, target_a: f64, t_cal_c: f64) -> Result<BandgapModel> {
    if !target_a.is_finite() || target_a <= 0.0 {
        return Err(Error::validation("target_a", "must be finite and > 0"));
    }
    let mut unit = *model;
    unit.mirror_ratio = 1.0;
    let inner = i_ref(&unit, t_cal_c)?;
    if inner <= 0.0 {
        return Err(Error::domain(
            "cannot calibrate: branch currents sum to zero at the calibration point",
        ));
    }
    let mut out = *model;
    out.mirror_ratio = target_a / inner;
    Ok(out)
}

/// Relaxation oscillator: a current alternately charges and discharges C_1
/// between two comparator thresholds, and the core clock feeds a divider.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxOsc {
    pub i_osc_a: f64,
    pub c_1_f: f64,
    pub v_high_v: f64,
    pub v_low_v: f64,
    pub divider: u32,
    /// Separate discharge current is not modeled; any value other than the
    /// charge current is rejected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discharge_current_a: Option<f64>,
}

impl RelaxOsc {
    pub fn new(i_osc_a: f64, c_1_f: f64, v_high_v: f64, v_low_v: f64, divider: u32) -> Self {
        RelaxOsc {
            i_osc_a,
            c_1_f,
            v_high_v,
            v_low_v,
            divider,
            discharge_current_a: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("i_osc_a", self.i_osc_a), ("c_1_f", self.c_1_f)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        if !self.v_high_v.is_finite()
            || !self.v_low_v.is_finite()
            || self.v_high_v <= self.v_low_v
        {
            return Err(Error::validation("v_high_v", "must exceed v_low_v"));
        }
        if self.divider < 1 {
            return Err(Error::validation("divider", "must be >= 1"));
        }
        Ok(())
    }
}

/// Operating band of the oscillator core clock.
pub const CORE_BAND_HZ: (f64, f64) = (65e3, 3e6);
/// Operating band of the divided sample clock.
pub const DIVIDED_BAND_HZ: (f64, f64) = (4.8e3, 640e3);

/// Closed-form oscillator frequencies plus in-band flags for both clocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscReport {
    pub core_frequency_hz: f64,
    pub divided_frequency_hz: f64,
    pub core_in_band: bool,
    pub divided_in_band: bool,
}

/// Core frequency i_osc/(2·C_1·(V_high − V_low)) and its divided output.
/// Out-of-band results are flagged, not rejected.
pub fn osc_frequency(o: &RelaxOsc) -> Result<OscReport> {
    o.validate()?;
    let core = o.i_osc_a / (2.0 * o.c_1_f * (o.v_high_v - o.v_low_v));
    let divided = core / o.divider as f64;
    Ok(OscReport {
        core_frequency_hz: core,
        divided_frequency_hz: divided,
        core_in_band: (CORE_BAND_HZ.0..=CORE_BAND_HZ.1).contains(&core),
        divided_in_band: (DIVIDED_BAND_HZ.0..=DIVIDED_BAND_HZ.1).contains(&divided),
    })
}

/// Event-driven simulation of the triangle ramp on C_1: from a discharged
/// start, the node charges to V_high, then bounces between the thresholds.
/// Returns the core frequency measured over `n_cycles` full cycles.
pub fn osc_transient_oracle(o: &RelaxOsc, n_cycles: u32) -> Result<f64> {
    o.validate()?;
    if n_cycles < 1 {
        return Err(Error::validation("n_cycles", "must be >= 1"));
    }
    if let Some(i_dis) = o.discharge_current_a {
        if i_dis != o.i_osc_a {
            return Err(Error::domain(
                "asymmetric charge/discharge currents are not supported",
            ));
        }
    }
    let slope = o.i_osc_a / o.c_1_f;
    let mut v = 0.0f64;
    let mut t = 0.0f64;
    // Startup ramp to the first V_high crossing.
    t += (o.v_high_v - v) / slope;
    v = o.v_high_v;
    let cycle_start = t;
    for _ in 0..n_cycles {
        t += (v - o.v_low_v) / slope;
        v = o.v_low_v;
        t += (o.v_high_v - v) / slope;
        v = o.v_high_v;
    }
    Ok(n_cycles as f64 / (t - cycle_start))
}
