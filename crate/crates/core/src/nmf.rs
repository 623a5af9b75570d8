//! Noise modulating function: periodic transconductance of a three-region
//! square-law device under harmonic gate/drain drive, normalized to its
//! peak.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{theta_grid, time_rms};
use crate::isf::HarmonicWaveform;
use crate::sweep::{grid_min, map_grid, Axis, GridExtremum};
use crate::tline::VoltageRatio;

pub const DEFAULT_V_TH_V: f64 = 0.4;

/// Flicker-noise parameters of the device, for the gate-referred PSD
/// K_F·W/(L·f·C_ox²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlickerParams {
    pub k_f: f64,
    pub c_ox_f_per_m2: f64,
    pub width_m: f64,
    pub length_m: f64,
}

impl FlickerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k_f", self.k_f),
            ("c_ox_f_per_m2", self.c_ox_f_per_m2),
            ("width_m", self.width_m),
            ("length_m", self.length_m),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }
}

/// Square-law MOS device reduced to what the waveform analysis needs: a
/// threshold, a transconductance scale, and optional flicker parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceModel {
    pub v_th_v: f64,
    /// Square-law scale factor k (A/V²); cancels in the normalized output.
    pub transconductance_a_per_v2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flicker: Option<FlickerParams>,
}

impl Default for DeviceModel {
    fn default() -> Self {
        DeviceModel {
            v_th_v: DEFAULT_V_TH_V,
            transconductance_a_per_v2: 1.0,
            flicker: None,
        }
    }
}

/// Operating region at one bias point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Cutoff,
    Triode,
    Saturation,
}

impl DeviceModel {
    pub fn validate(&self) -> Result<()> {
        if !self.v_th_v.is_finite() || self.v_th_v <= 0.0 {
            return Err(Error::validation("v_th_v", "must be finite and > 0"));
        }
        if !self.transconductance_a_per_v2.is_finite() || self.transconductance_a_per_v2 <= 0.0 {
            return Err(Error::validation(
                "transconductance_a_per_v2",
                "must be finite and > 0",
            ));
        }
        if let Some(flicker) = &self.flicker {
            flicker.validate()?;
        }
        Ok(())
    }

    pub fn region(&self, v_gs: f64, v_ds: f64) -> Region {
        let v_ov = v_gs - self.v_th_v;
        if v_ov <= 0.0 {
            Region::Cutoff
        } else if v_ds >= v_ov {
            Region::Saturation
        } else {
            Region::Triode
        }
    }

    /// Instantaneous transconductance: 0 in cutoff, k·(V_gs−V_th) in
    /// saturation, k·V_ds in triode (clamped at 0 for reverse drain swing).
    pub fn transconductance(&self, v_gs: f64, v_ds: f64) -> f64 {
        let k = self.transconductance_a_per_v2;
        match self.region(v_gs, v_ds) {
            Region::Cutoff => 0.0,
            Region::Saturation => k * (v_gs - self.v_th_v),
            Region::Triode => k * v_ds.max(0.0),
        }
    }

    /// Gate-referred flicker PSD at `f`; requires flicker parameters.
    pub fn flicker_psd(&self, f_hz: f64) -> Result<f64> {
        let params = self.flicker.ok_or_else(|| {
            Error::validation("flicker", "device has no flicker parameters")
        })?;
        params.validate()?;
        crate::formulas::mos_flicker_psd(
            params.k_f,
            params.width_m,
            params.length_m,
            params.c_ox_f_per_m2,
            f_hz,
        )
    }
}

/// Transconductance samples normalized to their maximum: α(θ) ∈ [0, 1].
/// The device must turn on somewhere in the cycle.
pub fn nmf(device: &DeviceModel, v_gs: &[f64], v_ds: &[f64]) -> Result<Vec<f64>> {
    device.validate()?;
    if v_gs.len() != v_ds.len() {
        return Err(Error::Length {
            expected: v_gs.len(),
            actual: v_ds.len(),
        });
    }
    if v_gs.is_empty() {
        return Err(Error::domain("empty waveforms"));
    }
    let gm: Vec<f64> = v_gs
        .iter()
        .zip(v_ds)
        .map(|(&g, &d)| device.transconductance(g, d))
        .collect();
    let max = gm.iter().fold(0.0f64, |m, &v| m.max(v));
    if max <= 0.0 {
        return Err(Error::domain(
            "device never active: peak transconductance is zero",
        ));
    }
    Ok(gm.into_iter().map(|g| g / max).collect())
}

/// How the oscillator waveform reaches the device: drain sees the waveform
/// on a bias, the gate sees each harmonic scaled and rotated by its
/// feedback ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub drain_bias_v: f64,
    pub gate_bias_v: f64,
    /// Gate-to-drain ratio per harmonic, aligned with the waveform's
    /// component list.
    pub gate_ratios: Vec<VoltageRatio>,
}

impl Default for DriveSpec {
    fn default() -> Self {
        DriveSpec {
            drain_bias_v: 1.0,
            gate_bias_v: 1.0,
            gate_ratios: vec![
                VoltageRatio::new(3.0, std::f64::consts::FRAC_PI_4),
                VoltageRatio::new(1.0, 0.0),
            ],
        }
    }
}

impl DriveSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("drain_bias_v", self.drain_bias_v),
            ("gate_bias_v", self.gate_bias_v),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
        }
        for ratio in &self.gate_ratios {
            ratio.validate()?;
        }
        Ok(())
    }
}

/// Builds the sampled (v_gs, v_ds) pair on the standard theta grid.
pub fn drive_waveforms(
    waveform: &HarmonicWaveform,
    drive: &DriveSpec,
    n_samples: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    waveform.validate()?;
    drive.validate()?;
    if drive.gate_ratios.len() != waveform.components.len() {
        return Err(Error::validation(
            "gate_ratios",
            format!(
                "need one ratio per harmonic component: {} components, {} ratios",
                waveform.components.len(),
                drive.gate_ratios.len()
            ),
        ));
    }
    let theta = theta_grid(n_samples);
    let mut v_gs = vec![drive.gate_bias_v; n_samples];
    let mut v_ds = vec![drive.drain_bias_v; n_samples];
    for (n, (&(amp, phase), ratio)) in waveform
        .components
        .iter()
        .zip(&drive.gate_ratios)
        .enumerate()
    {
        let harmonic = (n + 1) as f64;
        for (k, &th) in theta.iter().enumerate() {
            v_ds[k] += amp * (harmonic * th + phase).cos();
            v_gs[k] += ratio.magnitude * amp * (harmonic * th + phase + ratio.phase_rad).cos();
        }
    }
    Ok((v_gs, v_ds))
}

/// α_rms map over a grid of fundamental gate ratios (magnitude × phase).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NmfSweep {
    pub magnitude: Vec<f64>,
    pub phase_rad: Vec<f64>,
    /// alpha_rms[i][j] for magnitude[i], phase_rad[j]; NaN where the device
    /// never turns on.
    pub alpha_rms: Vec<Vec<f64>>,
    pub rms_min: GridExtremum,
}

/// Sweeps the fundamental gate ratio R_v,1 and reports the rms of α at each
/// grid point, with tie-aware minimum locations.
pub fn sweep_rv1(
    device: &DeviceModel,
    waveform: &HarmonicWaveform,
    drive: &DriveSpec,
    magnitude_axis: &Axis,
    phase_axis: &Axis,
    n_samples: usize,
) -> Result<NmfSweep> {
    device.validate()?;
    magnitude_axis.validate()?;
    phase_axis.validate()?;
    if drive.gate_ratios.is_empty() {
        return Err(Error::validation("gate_ratios", "must not be empty"));
    }
    let magnitude = magnitude_axis.values();
    let phase = phase_axis.values();
    let alpha_rms = map_grid(&magnitude, &phase, |mag, ph| {
        let mut swept = drive.clone();
        swept.gate_ratios[0] = VoltageRatio::new(mag, ph);
        drive_waveforms(waveform, &swept, n_samples)
            .and_then(|(v_gs, v_ds)| nmf(device, &v_gs, &v_ds))
            .map(|alpha| time_rms(&alpha))
            .unwrap_or(f64::NAN)
    });
    let rms_min = grid_min(&alpha_rms, 1e-9).ok_or_else(|| {
        Error::domain("device never active anywhere on the sweep grid")
    })?;
    Ok(NmfSweep {
        magnitude,
        phase_rad: phase,
        alpha_rms,
        rms_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn regions_partition_the_bias_plane() {
        let d = DeviceModel::default();
        assert_eq!(d.region(0.3, 1.0), Region::Cutoff);
        assert_eq!(d.region(0.4, 1.0), Region::Cutoff);
        assert_eq!(d.region(1.0, 1.0), Region::Saturation);
        assert_eq!(d.region(1.0, 0.6), Region::Saturation);
        assert_eq!(d.region(1.0, 0.5), Region::Triode);
        assert_eq!(d.region(2.0, 0.1), Region::Triode);
    }

    #[test]
    fn transconductance_is_continuous_at_the_region_edge() {
        let d = DeviceModel::default();
        let v_gs = 1.1;
        let edge = v_gs - d.v_th_v;
        assert_relative_eq!(
            d.transconductance(v_gs, edge + 1e-12),
            d.transconductance(v_gs, edge - 1e-12),
            max_relative = 1e-9
        );
        assert_eq!(d.transconductance(1.0, -0.5), 0.0);
    }

    #[test]
    fn cutoff_everywhere_is_an_error() {
        let d = DeviceModel::default();
        let v_gs = vec![0.1; 512];
        let v_ds = vec![1.0; 512];
        assert!(matches!(nmf(&d, &v_gs, &v_ds), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_saturation_gives_unity_nmf() {
        let d = DeviceModel::default();
        let v_gs = vec![1.0; 512];
        let v_ds = vec![2.0; 512];
        let alpha = nmf(&d, &v_gs, &v_ds).unwrap();
        assert!(alpha.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn nmf_is_normalized_to_unit_peak() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, std::f64::consts::PI);
        let (v_gs, v_ds) = drive_waveforms(&waveform, &DriveSpec::default(), 1024).unwrap();
        let alpha = nmf(&DeviceModel::default(), &v_gs, &v_ds).unwrap();
        let max = alpha.iter().cloned().fold(0.0f64, f64::max);
        assert_eq!(max, 1.0);
        assert!(alpha.iter().all(|&a| (0.0..=1.0).contains(&a)));
    }

    #[test]
    fn scale_factor_cancels_in_the_nmf() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, std::f64::consts::PI);
        let (v_gs, v_ds) = drive_waveforms(&waveform, &DriveSpec::default(), 512).unwrap();
        let small = DeviceModel::default();
        let mut large = small;
        large.transconductance_a_per_v2 = 250.0;
        let a = nmf(&small, &v_gs, &v_ds).unwrap();
        let b = nmf(&large, &v_gs, &v_ds).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let d = DeviceModel::default();
        assert!(matches!(
            nmf(&d, &[1.0; 8], &[1.0; 7]),
            Err(Error::Length { .. })
        ));
    }

    #[test]
    fn drive_samples_match_the_closed_form() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, std::f64::consts::PI);
        let drive = DriveSpec::default();
        let n = 512;
        let (v_gs, v_ds) = drive_waveforms(&waveform, &drive, n).unwrap();
        let theta = theta_grid(n);
        for (k, &th) in theta.iter().enumerate() {
            let expect_ds =
                1.0 + th.cos() + 0.7 * (2.0 * th + std::f64::consts::PI).cos();
            let expect_gs = 1.0
                + 3.0 * (th + std::f64::consts::FRAC_PI_4).cos()
                + 0.7 * (2.0 * th + std::f64::consts::PI).cos();
            assert_relative_eq!(v_ds[k], expect_ds, epsilon = 1e-12);
            assert_relative_eq!(v_gs[k], expect_gs, epsilon = 1e-12);
        }
    }

    #[test]
    fn ratio_count_must_match_component_count() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, std::f64::consts::PI);
        let mut drive = DriveSpec::default();
        drive.gate_ratios.pop();
        assert!(matches!(
            drive_waveforms(&waveform, &drive, 512),
            Err(Error::Validation { field, .. }) if field == "gate_ratios"
        ));
    }

    #[test]
    fn rv1_sweep_minimum_magnitude_is_at_the_grid_edge() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, std::f64::consts::PI);
        let sweep = sweep_rv1(
            &DeviceModel::default(),
            &waveform,
            &DriveSpec::default(),
            &Axis::linear("rv1_magnitude", 0.0, 3.0, 16),
            &Axis::linear("rv1_phase", 0.0, std::f64::consts::TAU, 33),
            1024,
        )
        .unwrap();
        let top_row = sweep.magnitude.len() - 1;
        assert!(
            sweep.rms_min.locations.iter().all(|&(i, _)| i == top_row),
            "minimum rows {:?}",
            sweep.rms_min.locations
        );
        assert!(sweep.rms_min.value < 0.4);
    }

    #[test]
    fn flicker_psd_requires_parameters() {
        let d = DeviceModel::default();
        assert!(d.flicker_psd(1e3).is_err());
        let mut d = DeviceModel::default();
        d.flicker = Some(FlickerParams {
            k_f: 1e-25,
            c_ox_f_per_m2: 8.6e-3,
            width_m: 10e-6,
            length_m: 60e-9,
        });
        let psd1 = d.flicker_psd(1e3).unwrap();
        let psd2 = d.flicker_psd(2e3).unwrap();
        assert_relative_eq!(psd1 / psd2, 2.0, max_relative = 1e-12);
    }
}
