//! Charge-pump DC-DC converter analytics (single and multi-stage), closed-form
//! efficiency optimum, bang-bang feedback transient simulation, and the
//! high-side bias generator formula.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One pump stage: switched transfer capacitor C_s driven by a clock of
/// amplitude V_CLK (defaults to V_dd), with switch resistance R_on and
/// parasitic bottom-plate capacitance C_p_eq.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargePumpStage {
    pub v_dd: f64,
    pub f_clk_hz: f64,
    pub r_on_ohm: f64,
    pub c_s_f: f64,
    pub c_p_eq_f: f64,
    /// Clock swing; None means full-rail (V_dd).
    #[serde(default)]
    pub v_clk: Option<f64>,
}

impl ChargePumpStage {
    pub fn new(v_dd: f64, f_clk_hz: f64, r_on_ohm: f64, c_s_f: f64, c_p_eq_f: f64) -> Self {
        ChargePumpStage {
            v_dd,
            f_clk_hz,
            r_on_ohm,
            c_s_f,
            c_p_eq_f,
            v_clk: None,
        }
    }

    pub fn v_clk(&self) -> f64 {
        self.v_clk.unwrap_or(self.v_dd)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("v_dd", self.v_dd),
            ("f_clk_hz", self.f_clk_hz),
            ("r_on_ohm", self.r_on_ohm),
            ("c_s_f", self.c_s_f),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        if !self.c_p_eq_f.is_finite() || self.c_p_eq_f < 0.0 {
            return Err(Error::validation("c_p_eq_f", "must be finite and >= 0"));
        }
        if self.v_clk() > self.v_dd || self.v_clk() <= 0.0 {
            return Err(Error::validation("v_clk", "must be in (0, v_dd]"));
        }
        Ok(())
    }

    /// Incomplete-settling factor α = exp(−1/(2 f_clk R_on C_s)).
    pub fn alpha(&self) -> f64 {
        (-1.0 / (2.0 * self.f_clk_hz * self.r_on_ohm * self.c_s_f)).exp()
    }

    /// Per-stage capacitor boost V_C = (1 − α)·V_dd.
    pub fn v_c(&self) -> f64 {
        (1.0 - self.alpha()) * self.v_dd
    }

    /// Per-stage output resistance term β = 1/(2 f_clk C_s) + R_on.
    pub fn beta(&self) -> f64 {
        1.0 / (2.0 * self.f_clk_hz * self.c_s_f) + self.r_on_ohm
    }
}

/// Cascade of identical stages driving a reservoir capacitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiStagePump {
    pub stage: ChargePumpStage,
    pub n_stages: u32,
    pub c_load_f: f64,
}

impl MultiStagePump {
    pub fn validate(&self) -> Result<()> {
        self.stage.validate()?;
        if self.n_stages < 1 {
            return Err(Error::validation("n_stages", "must be >= 1"));
        }
        if !self.c_load_f.is_finite() || self.c_load_f < 10.0 * self.stage.c_s_f {
            return Err(Error::validation(
                "c_load_f",
                "must be at least 10x the stage transfer capacitance",
            ));
        }
        Ok(())
    }
}

/// Resistive divider plus comparator closing the clock-gating loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackLoop {
    pub r_1_ohm: f64,
    pub r_2_ohm: f64,
    pub v_ref_v: f64,
    /// Comparator hysteresis width (V); 0 is an ideal comparator.
    #[serde(default)]
    pub hysteresis_v: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl FeedbackLoop {
    pub fn new(r_1_ohm: f64, r_2_ohm: f64, v_ref_v: f64) -> Self {
        FeedbackLoop {
            r_1_ohm,
            r_2_ohm,
            v_ref_v,
            hysteresis_v: 0.0,
            description: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r_1_ohm", self.r_1_ohm), ("r_2_ohm", self.r_2_ohm)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        if !self.v_ref_v.is_finite() || self.v_ref_v <= 0.0 {
            return Err(Error::validation("v_ref_v", "must be finite and > 0"));
        }
        if !self.hysteresis_v.is_finite() || self.hysteresis_v < 0.0 {
            return Err(Error::validation("hysteresis_v", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Divider ratio R_2/(R_1+R_2).
    pub fn divider_ratio(&self) -> f64 {
        self.r_2_ohm / (self.r_1_ohm + self.r_2_ohm)
    }

    /// Output voltage at which the divided voltage equals V_ref.
    pub fn setpoint_v(&self) -> f64 {
        self.v_ref_v / self.divider_ratio()
    }
}

/// High-side bias generator: v_out = supply − V_ref·(R_3/R_1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HighSideBias {
    pub supply_v: f64,
    pub v_ref_v: f64,
    pub resistor_ratio: f64,
}

impl Default for HighSideBias {
    fn default() -> Self {
        HighSideBias {
            supply_v: 20.0,
            v_ref_v: 1.25,
            resistor_ratio: 4.0,
        }
    }
}

pub fn high_side_bias(b: &HighSideBias) -> Result<f64> {
    if !b.resistor_ratio.is_finite() || b.resistor_ratio < 0.0 {
        return Err(Error::validation("resistor_ratio", "must be finite and >= 0"));
    }
    Ok(b.supply_v - b.v_ref_v * b.resistor_ratio)
}

/// Steady-state output voltage of an n-stage pump delivering `i_out`:
/// V_CLK + n·V_C − n·I/(2 f C_s) − n·R_on·I.
pub fn steady_state_vout(stage: &ChargePumpStage, i_out: f64, n_stages: u32) -> f64 {
    let n = n_stages as f64;
    stage.v_clk() + n * stage.v_c() - n * stage.beta() * i_out
}

/// Conversion efficiency V_out·I / (n·C_p·f·V_dd² + 2n·R_on·I² + (n+1)·V_dd·I).
/// Errors when the pump is overloaded (V_out at or below the supply rail).
pub fn efficiency(stage: &ChargePumpStage, i_out: f64, n_stages: u32) -> Result<f64> {
    stage.validate()?;
    if !i_out.is_finite() || i_out < 0.0 {
        return Err(Error::domain(format!("i_out must be >= 0, got {i_out}")));
    }
    let v_out = steady_state_vout(stage, i_out, n_stages);
    if v_out <= stage.v_dd {
        return Err(Error::domain(format!(
            "pump overloaded: V_out {v_out:.3} V is not above the {} V supply",
            stage.v_dd
        )));
    }
    let n = n_stages as f64;
    let denom = n * stage.c_p_eq_f * stage.f_clk_hz * stage.v_dd * stage.v_dd
        + 2.0 * n * stage.r_on_ohm * i_out * i_out
        + (n + 1.0) * stage.v_dd * i_out;
    if denom <= 0.0 {
        return Err(Error::domain("efficiency undefined: zero loss denominator"));
    }
    Ok(v_out * i_out / denom)
}

/// Load current that maximizes efficiency, from the positive root of the
/// derivative-zero quadratic (b·K + B·c)·I² + 2·B·a·I − K·a = 0 with
/// K = V_CLK + n·V_C, B = n·β, a = n·C_p·f·V_dd², b = 2n·R_on,
/// c = (n+1)·V_dd.
pub fn optimum_iout(stage: &ChargePumpStage, n_stages: u32) -> Result<f64> {
    stage.validate()?;
    let n = n_stages as f64;
    let k = stage.v_clk() + n * stage.v_c();
    let b_slope = n * stage.beta();
    let a = n * stage.c_p_eq_f * stage.f_clk_hz * stage.v_dd * stage.v_dd;
    let b = 2.0 * n * stage.r_on_ohm;
    let c = (n + 1.0) * stage.v_dd;
    let quad = b * k + b_slope * c;
    let disc = b_slope * b_slope * a * a + quad * k * a;
    if quad <= 0.0 || disc < 0.0 {
        return Err(Error::domain("no positive optimum: degenerate pump parameters"));
    }
    let root = (-b_slope * a + disc.sqrt()) / quad;
    if !(root > 0.0) {
        return Err(Error::domain("no positive optimum: degenerate pump parameters"));
    }
    Ok(root)
}

/// Transient record from the bang-bang feedback simulation; one entry per
/// clock cycle, sampled at the cycle end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackTrace {
    pub time_s: Vec<f64>,
    pub v_out_v: Vec<f64>,
    pub clock_enabled: Vec<bool>,
}

impl FeedbackTrace {
    /// Mean/min/max of V_out over samples at or after `t_from`.
    pub fn tail_stats(&self, t_from: f64) -> Option<(f64, f64, f64)> {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (t, v) in self.time_s.iter().zip(&self.v_out_v) {
            if *t >= t_from {
                count += 1;
                sum += v;
                min = min.min(*v);
                max = max.max(*v);
            }
        }
        if count == 0 {
            None
        } else {
            Some((sum / count as f64, min, max))
        }
    }
}

/// Per-clock-cycle behavioral simulation of the regulated pump. While the
/// clock runs, V_out relaxes toward the loaded steady state with time
/// constant C_load·n·β; while gated, the load discharges C_load linearly.
/// The comparator gates the clock once the divided output exceeds V_ref.
pub fn simulate_feedback(
    pump: &MultiStagePump,
    fb: &FeedbackLoop,
    i_load: f64,
    duration: f64,
) -> Result<FeedbackTrace> {
    pump.validate()?;
    fb.validate()?;
    if !i_load.is_finite() || i_load < 0.0 {
        return Err(Error::domain(format!("i_load must be >= 0, got {i_load}")));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::domain(format!("duration must be > 0, got {duration}")));
    }
    let period = 1.0 / pump.stage.f_clk_hz;
    let cycles = (duration / period).ceil() as usize;
    let tau = pump.c_load_f * pump.n_stages as f64 * pump.stage.beta();
    let settle = (-period / tau).exp();
    let v_target = steady_state_vout(&pump.stage, i_load, pump.n_stages);
    let ratio = fb.divider_ratio();
    let upper = fb.v_ref_v + fb.hysteresis_v / 2.0;
    let lower = fb.v_ref_v - fb.hysteresis_v / 2.0;

    let mut trace = FeedbackTrace {
        time_s: Vec::with_capacity(cycles),
        v_out_v: Vec::with_capacity(cycles),
        clock_enabled: Vec::with_capacity(cycles),
    };
    let mut v = 0.0f64;
    let mut enabled = true;
    for k in 0..cycles {
        let divided = v * ratio;
        if divided > upper {
            enabled = false;
        } else if divided <= lower {
            enabled = true;
        }
        if enabled {
            v = v_target + (v - v_target) * settle;
        } else {
            v -= i_load * period / pump.c_load_f;
        }
        trace.time_s.push((k + 1) as f64 * period);
        trace.v_out_v.push(v);
        trace.clock_enabled.push(enabled);
    }
    Ok(trace)
}
