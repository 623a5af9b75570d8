//! Electrode–tissue load models: series R-C and Randles R-C-R.
//!
//! Loads answer small-signal impedance queries and step-by-step transient
//! voltage responses used by the stimulation and charge-balance simulators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electrode–tissue model selected by the `kind` tag in JSON configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TissueLoad {
    /// Access resistance in series with the interface capacitance.
    SeriesRc {
        resistance_ohm: f64,
        capacitance_f: f64,
    },
    /// Spreading resistance in series with the interface capacitance, the
    /// capacitance shunted by a lumped Faradaic resistance.
    Randles {
        spreading_resistance_ohm: f64,
        faradaic_resistance_ohm: f64,
        interface_capacitance_f: f64,
    },
}

/// Capacitor state carried through a transient simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadState {
    pub capacitor_voltage_v: f64,
    pub time_s: f64,
}

impl Default for LoadState {
    fn default() -> Self {
        LoadState {
            capacitor_voltage_v: 0.0,
            time_s: 0.0,
        }
    }
}

impl TissueLoad {
    pub fn series_rc(resistance_ohm: f64, capacitance_f: f64) -> Self {
        TissueLoad::SeriesRc {
            resistance_ohm,
            capacitance_f,
        }
    }

    pub fn randles(r_s: f64, r_w: f64, c: f64) -> Self {
        TissueLoad::Randles {
            spreading_resistance_ohm: r_s,
            faradaic_resistance_ohm: r_w,
            interface_capacitance_f: c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields: &[(&str, f64)] = match self {
            TissueLoad::SeriesRc {
                resistance_ohm,
                capacitance_f,
            } => &[
                ("resistance_ohm", *resistance_ohm),
                ("capacitance_f", *capacitance_f),
            ][..],
            TissueLoad::Randles {
                spreading_resistance_ohm,
                faradaic_resistance_ohm,
                interface_capacitance_f,
            } => &[
                ("spreading_resistance_ohm", *spreading_resistance_ohm),
                ("faradaic_resistance_ohm", *faradaic_resistance_ohm),
                ("interface_capacitance_f", *interface_capacitance_f),
            ][..],
        };
        for (name, v) in fields {
            if !v.is_finite() || *v <= 0.0 {
                return Err(Error::validation(*name, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Series resistance seen by the stimulation terminals.
    pub fn series_resistance(&self) -> f64 {
        match self {
            TissueLoad::SeriesRc { resistance_ohm, .. } => *resistance_ohm,
            TissueLoad::Randles {
                spreading_resistance_ohm,
                ..
            } => *spreading_resistance_ohm,
        }
    }

    /// Interface capacitance holding residual charge.
    pub fn capacitance(&self) -> f64 {
        match self {
            TissueLoad::SeriesRc { capacitance_f, .. } => *capacitance_f,
            TissueLoad::Randles {
                interface_capacitance_f,
                ..
            } => *interface_capacitance_f,
        }
    }

    /// Small-signal terminal impedance at frequency `f` (Hz).
    pub fn impedance(&self, f: f64) -> Result<Complex64> {
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::domain(format!(
                "impedance requires f > 0, got {f}"
            )));
        }
        let w = std::f64::consts::TAU * f;
        match *self {
            TissueLoad::SeriesRc {
                resistance_ohm,
                capacitance_f,
            } => Ok(Complex64::new(resistance_ohm, 0.0)
                + Complex64::new(0.0, -1.0 / (w * capacitance_f))),
            TissueLoad::Randles {
                spreading_resistance_ohm,
                faradaic_resistance_ohm,
                interface_capacitance_f,
            } => {
                let rw = Complex64::new(faradaic_resistance_ohm, 0.0);
                let denom = Complex64::new(
                    1.0,
                    w * faradaic_resistance_ohm * interface_capacitance_f,
                );
                Ok(Complex64::new(spreading_resistance_ohm, 0.0) + rw / denom)
            }
        }
    }

    /// Advances the capacitor state by one step of driven current `i` (A)
    /// over `dt` (s) and returns the terminal voltage at the end of the step.
    pub fn step(&self, state: &mut LoadState, i: f64, dt: f64) -> f64 {
        match *self {
            TissueLoad::SeriesRc { resistance_ohm, capacitance_f } => {
                state.capacitor_voltage_v += i * dt / capacitance_f;
                state.time_s += dt;
                resistance_ohm * i + state.capacitor_voltage_v
            }
            TissueLoad::Randles {
                spreading_resistance_ohm,
                faradaic_resistance_ohm,
                interface_capacitance_f,
            } => {
                let leak = state.capacitor_voltage_v / faradaic_resistance_ohm;
                state.capacitor_voltage_v += (i - leak) * dt / interface_capacitance_f;
                state.time_s += dt;
                spreading_resistance_ohm * i + state.capacitor_voltage_v
            }
        }
    }

    /// Terminal voltage trace for a sampled current drive, by explicit
    /// first-order integration of the capacitor charge.
    pub fn step_voltage_response(&self, current_samples: &[f64], dt: f64) -> Result<Vec<f64>> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain(format!("dt must be > 0, got {dt}")));
        }
        if current_samples.iter().any(|i| !i.is_finite()) {
            return Err(Error::domain("current samples must be finite"));
        }
        let mut state = LoadState::default();
        Ok(current_samples
            .iter()
            .map(|&i| self.step(&mut state, i, dt))
            .collect())
    }

    /// Discharge time constant of the interface capacitance when the
    /// terminals are shorted through `short_resistance` (Ω).
    pub fn balance_time_constant(&self, short_resistance: f64) -> f64 {
        match *self {
            TissueLoad::SeriesRc { resistance_ohm, capacitance_f } => {
                (resistance_ohm + short_resistance) * capacitance_f
            }
            TissueLoad::Randles {
                spreading_resistance_ohm,
                faradaic_resistance_ohm,
                interface_capacitance_f,
            } => {
                let series = spreading_resistance_ohm + short_resistance;
                let parallel =
                    faradaic_resistance_ohm * series / (faradaic_resistance_ohm + series);
                parallel * interface_capacitance_f
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mcm_load() -> TissueLoad {
        TissueLoad::series_rc(3.0e3, 100.0e-9)
    }

    #[test]
    fn series_rc_impedance_at_150hz() {
        let z = mcm_load().impedance(150.0).unwrap();
        assert_relative_eq!(z.norm(), 11_026.7, max_relative = 1e-4);
        assert_relative_eq!(z.re, 3000.0, max_relative = 1e-12);
    }

    #[test]
    fn series_rc_capacitor_shorts_at_high_frequency() {
        let z = mcm_load().impedance(1e9).unwrap();
        assert_relative_eq!(z.norm(), 3000.0, max_relative = 1e-6);
    }

    #[test]
    fn randles_limits_are_rs_and_rs_plus_rw() {
        let load = TissueLoad::randles(1e3, 10e3, 1e-6);
        let dc = load.impedance(1e-6).unwrap();
        assert_relative_eq!(dc.norm(), 11e3, max_relative = 1e-6);
        let hf = load.impedance(1e12).unwrap();
        assert_relative_eq!(hf.norm(), 1e3, max_relative = 1e-6);
    }

    #[test]
    fn impedance_rejects_nonpositive_frequency() {
        assert!(mcm_load().impedance(0.0).is_err());
        assert!(mcm_load().impedance(-5.0).is_err());
    }

    #[test]
    fn series_magnitude_decreases_with_frequency_phase_in_quadrant() {
        let load = mcm_load();
        let mut prev = f64::INFINITY;
        for exp in 0..8 {
            let f = 10f64.powi(exp);
            let z = load.impedance(f).unwrap();
            assert!(z.norm() < prev);
            prev = z.norm();
            let phase = z.arg().to_degrees();
            assert!(phase > -90.0 && phase < 0.0);
        }
    }

    #[test]
    fn constant_current_response_is_ir_plus_ramp() {
        let load = mcm_load();
        let dt = 1e-6;
        let samples = vec![1e-3; 100];
        let v = load.step_voltage_response(&samples, dt).unwrap();
        assert_relative_eq!(v[99], 4.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_current_gives_zero_voltage() {
        let v = mcm_load()
            .step_voltage_response(&vec![0.0; 32], 1e-6)
            .unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn symmetric_biphasic_leaves_no_capacitor_charge() {
        let load = mcm_load();
        let mut drive = vec![-1.25e-3; 100];
        drive.extend(vec![1.25e-3; 100]);
        let mut state = LoadState::default();
        for &i in &drive {
            load.step(&mut state, i, 1e-6);
        }
        assert!(state.capacitor_voltage_v.abs() < 1e-15);
    }

    #[test]
    fn response_converges_when_dt_halves() {
        let load = TissueLoad::randles(1e3, 50e3, 200e-9);
        let total = 0.75e-3;
        let drive = |t: f64| 1e-3 * (std::f64::consts::TAU * 1000.0 * t).sin();
        let run = |n: usize| {
            let dt = total / n as f64;
            let samples: Vec<f64> = (0..n).map(|k| drive((k as f64 + 0.5) * dt)).collect();
            *load
                .step_voltage_response(&samples, dt)
                .unwrap()
                .last()
                .unwrap()
        };
        let coarse = run(3000);
        let fine = run(6000);
        assert!(
            (coarse - fine).abs() <= 0.001 * fine.abs().max(1e-12),
            "coarse {coarse} fine {fine}"
        );
    }

    #[test]
    fn step_response_rejects_bad_dt() {
        assert!(mcm_load().step_voltage_response(&[1e-3], 0.0).is_err());
        assert!(mcm_load().step_voltage_response(&[f64::NAN], 1e-6).is_err());
    }

    #[test]
    fn validate_rejects_nonpositive_fields() {
        assert!(TissueLoad::series_rc(0.0, 1e-9).validate().is_err());
        assert!(TissueLoad::randles(1.0, -2.0, 1e-9).validate().is_err());
        assert!(mcm_load().validate().is_ok());
    }

    #[test]
    fn json_round_trip_with_kind_tag() {
        let load = TissueLoad::randles(1e3, 10e3, 1e-6);
        let json = serde_json::to_string(&load).unwrap();
        assert!(json.contains("\"kind\":\"randles\""));
        let back: TissueLoad = serde_json::from_str(&json).unwrap();
        assert_eq!(load, back);
    }

    #[test]
    fn balance_time_constants() {
        assert_relative_eq!(
            mcm_load().balance_time_constant(0.0),
            300e-6,
            max_relative = 1e-12
        );
        let randles = TissueLoad::randles(1e3, 10e3, 1e-6);
        let tau = randles.balance_time_constant(0.0);
        assert_relative_eq!(tau, 1e-6 * (10e3 * 1e3 / 11e3), max_relative = 1e-12);
    }
}
