//! Impulse sensitivity of a harmonic oscillator waveform and its effective
//! form after weighting by the device's noise modulating function.
//!
//! For a waveform f(θ) built from a fundamental plus harmonics, the impulse
//! sensitivity is Γ(θ) = f′(θ)/(f′(θ)² + f(θ)²) with f normalized so the
//! fundamental has unit amplitude. Γ_eff(θ) = Γ(θ)·α(θ) folds in the noise
//! modulating function α from the device bias trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{full_parseval_rms, project, theta_grid, time_rms, Spectrum};
use crate::nmf::{drive_waveforms, nmf, DeviceModel, DriveSpec};
use crate::sweep::{grid_min, map_grid, Axis, GridExtremum};

pub const MIN_ISF_SAMPLES: usize = 256;
pub const DEFAULT_ISF_SAMPLES: usize = 1024;
pub const DEFAULT_SPECTRUM_ORDER: usize = 8;

/// Periodic waveform Σ A_n·cos(nθ + φ_n), n = 1.. Components are listed in
/// harmonic order starting at the fundamental.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicWaveform {
    /// (amplitude, phase) per harmonic; components[0] is the fundamental.
    pub components: Vec<(f64, f64)>,
    pub f0_hz: f64,
}

impl HarmonicWaveform {
    pub fn new(components: Vec<(f64, f64)>, f0_hz: f64) -> Self {
        HarmonicWaveform { components, f0_hz }
    }

    /// Fundamental of unit amplitude plus one second harmonic.
    pub fn two_harmonic(a2: f64, phi2_rad: f64) -> Self {
        HarmonicWaveform {
            components: vec![(1.0, 0.0), (a2, phi2_rad)],
            f0_hz: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::validation("components", "must not be empty"));
        }
        for (n, &(amp, phase)) in self.components.iter().enumerate() {
            if !amp.is_finite() || amp < 0.0 {
                return Err(Error::validation(
                    "components",
                    format!("harmonic {} amplitude must be finite and >= 0", n + 1),
                ));
            }
            if !phase.is_finite() {
                return Err(Error::validation(
                    "components",
                    format!("harmonic {} phase must be finite", n + 1),
                ));
            }
        }
        if self.components[0].0 <= 0.0 {
            return Err(Error::validation(
                "components",
                "fundamental amplitude must be > 0",
            ));
        }
        if !self.f0_hz.is_finite() || self.f0_hz <= 0.0 {
            return Err(Error::validation("f0_hz", "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.components
            .iter()
            .enumerate()
            .map(|(n, &(amp, phase))| amp * ((n + 1) as f64 * theta + phase).cos())
            .sum()
    }

    /// d f/dθ.
    pub fn derivative(&self, theta: f64) -> f64 {
        self.components
            .iter()
            .enumerate()
            .map(|(n, &(amp, phase))| {
                let k = (n + 1) as f64;
                -k * amp * (k * theta + phase).sin()
            })
            .sum()
    }

    /// Same shape with the fundamental scaled to unit amplitude.
    pub fn normalized(&self) -> Self {
        let a1 = self.components[0].0;
        HarmonicWaveform {
            components: self
                .components
                .iter()
                .map(|&(amp, phase)| (amp / a1, phase))
                .collect(),
            f0_hz: self.f0_hz,
        }
    }
}

/// Γ(θ) on the half-offset grid of `n_samples` points.
pub fn isf_samples(waveform: &HarmonicWaveform, n_samples: usize) -> Result<Vec<f64>> {
    waveform.validate()?;
    if n_samples < MIN_ISF_SAMPLES {
        return Err(Error::validation(
            "n_samples",
            format!("need at least {MIN_ISF_SAMPLES} samples per period"),
        ));
    }
    let unit = waveform.normalized();
    Ok(theta_grid(n_samples)
        .into_iter()
        .map(|theta| {
            let f = unit.value(theta);
            let fp = unit.derivative(theta);
            fp / (fp * fp + f * f)
        })
        .collect())
}

/// Pointwise product Γ·α.
pub fn gamma_eff(gamma: &[f64], alpha: &[f64]) -> Result<Vec<f64>> {
    if gamma.len() != alpha.len() {
        return Err(Error::Length {
            expected: gamma.len(),
            actual: alpha.len(),
        });
    }
    Ok(gamma.iter().zip(alpha).map(|(&g, &a)| g * a).collect())
}

/// A periodic sample sequence with its truncated spectrum and both rms
/// routes: direct time quadrature and the full Parseval sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralProfile {
    pub samples: Vec<f64>,
    pub spectrum: Spectrum,
    pub dc: f64,
    pub rms_time: f64,
    pub rms_parseval: f64,
}

impl SpectralProfile {
    pub fn analyze(samples: Vec<f64>, order: usize) -> Result<Self> {
        let spectrum = project(&samples, order)?;
        let rms_parseval = full_parseval_rms(&samples)?;
        let rms_time = time_rms(&samples);
        let dc = spectrum.dc;
        Ok(SpectralProfile {
            samples,
            spectrum,
            dc,
            rms_time,
            rms_parseval,
        })
    }
}

/// Full sensitivity analysis at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsfProfile {
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
    pub gamma_eff: SpectralProfile,
}

/// Computes Γ, α, and the analyzed Γ_eff for one waveform, device, and
/// drive mapping.
pub fn profile(
    waveform: &HarmonicWaveform,
    device: &DeviceModel,
    drive: &DriveSpec,
    n_samples: usize,
    order: usize,
) -> Result<IsfProfile> {
    let gamma = isf_samples(waveform, n_samples)?;
    let (v_gs, v_ds) = drive_waveforms(waveform, drive, n_samples)?;
    let alpha = nmf(device, &v_gs, &v_ds)?;
    let effective = gamma_eff(&gamma, &alpha)?;
    Ok(IsfProfile {
        theta: theta_grid(n_samples),
        gamma,
        alpha,
        gamma_eff: SpectralProfile::analyze(effective, order)?,
    })
}

/// Γ statistics over a (A₂, φ₂) grid of two-harmonic waveforms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsfSweep {
    pub a2: Vec<f64>,
    pub phi2_rad: Vec<f64>,
    /// Grids indexed [a2][phi2].
    pub gamma_dc: Vec<Vec<f64>>,
    pub gamma_1: Vec<Vec<f64>>,
    pub gamma_2: Vec<Vec<f64>>,
    pub gamma_rms: Vec<Vec<f64>>,
    pub rms_min: GridExtremum,
}

/// Sweeps second-harmonic amplitude and phase, reporting Γ dc, first and
/// second harmonic magnitudes, and full-band rms per cell, with the
/// tie-aware rms minimum.
pub fn sweep_isf(a2_axis: &Axis, phi2_axis: &Axis, n_samples: usize) -> Result<IsfSweep> {
    a2_axis.validate()?;
    phi2_axis.validate()?;
    let a2 = a2_axis.values();
    let phi2 = phi2_axis.values();
    let cells = map_grid(&a2, &phi2, |amp, phase| {
        let waveform = HarmonicWaveform::two_harmonic(amp, phase);
        isf_samples(&waveform, n_samples)
            .and_then(|gamma| {
                let spectrum = project(&gamma, 2)?;
                let rms = full_parseval_rms(&gamma)?;
                Ok((
                    spectrum.dc,
                    spectrum.magnitude(1),
                    spectrum.magnitude(2),
                    rms,
                ))
            })
            .unwrap_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN))
    });
    let field = |pick: fn(&(f64, f64, f64, f64)) -> f64| -> Vec<Vec<f64>> {
        cells
            .iter()
            .map(|row| row.iter().map(pick).collect())
            .collect()
    };
    let gamma_rms = field(|c| c.3);
    let rms_min = grid_min(&gamma_rms, 1e-9)
        .ok_or_else(|| Error::domain("no valid waveform anywhere on the sweep grid"))?;
    Ok(IsfSweep {
        a2,
        phi2_rad: phi2,
        gamma_dc: field(|c| c.0),
        gamma_1: field(|c| c.1),
        gamma_2: field(|c| c.2),
        gamma_rms,
        rms_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

    #[test]
    fn pure_cosine_sensitivity_is_minus_sine() {
        let waveform = HarmonicWaveform::two_harmonic(0.0, 0.0);
        let gamma = isf_samples(&waveform, 1024).unwrap();
        for (g, theta) in gamma.iter().zip(theta_grid(1024)) {
            assert_relative_eq!(*g, -theta.sin(), epsilon = 1e-12);
        }
        let profile = SpectralProfile::analyze(gamma, 4).unwrap();
        assert!(profile.dc.abs() < 1e-15);
        assert_relative_eq!(profile.rms_time, FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn fundamental_scale_cancels() {
        let unit = HarmonicWaveform::two_harmonic(0.5, 1.2);
        let scaled = HarmonicWaveform::new(vec![(4.0, 0.0), (2.0, 1.2)], 1.0);
        assert_eq!(
            isf_samples(&unit, 512).unwrap(),
            isf_samples(&scaled, 512).unwrap()
        );
    }

    #[test]
    fn dc_vanishes_for_half_wave_symmetric_phases() {
        for phi2 in [0.0, PI] {
            let waveform = HarmonicWaveform::two_harmonic(0.5, phi2);
            let gamma = isf_samples(&waveform, 1024).unwrap();
            let spectrum = project(&gamma, 2).unwrap();
            assert!(spectrum.dc.abs() < 1e-12, "phi2 {phi2}: dc {}", spectrum.dc);
        }
    }

    #[test]
    fn parseval_route_matches_time_quadrature() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, PI);
        let gamma = isf_samples(&waveform, 1024).unwrap();
        let profile = SpectralProfile::analyze(gamma, 8).unwrap();
        assert_relative_eq!(profile.rms_parseval, profile.rms_time, max_relative = 1e-12);
        assert!(profile.spectrum.rms() <= profile.rms_time + 1e-15);
    }

    #[test]
    fn rms_at_the_reference_shape() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, PI);
        let gamma = isf_samples(&waveform, 2048).unwrap();
        assert_relative_eq!(time_rms(&gamma), 0.6779, max_relative = 1e-3);
    }

    #[test]
    fn undersampling_is_rejected() {
        let waveform = HarmonicWaveform::two_harmonic(0.3, 0.0);
        assert!(matches!(
            isf_samples(&waveform, 255),
            Err(Error::Validation { field, .. }) if field == "n_samples"
        ));
    }

    #[test]
    fn degenerate_waveforms_are_rejected() {
        assert!(HarmonicWaveform::new(vec![], 1.0).validate().is_err());
        assert!(HarmonicWaveform::new(vec![(0.0, 0.0), (1.0, 0.0)], 1.0)
            .validate()
            .is_err());
        assert!(HarmonicWaveform::new(vec![(1.0, 0.0)], 0.0)
            .validate()
            .is_err());
        assert!(HarmonicWaveform::new(vec![(1.0, f64::NAN)], 1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn normalization_divides_by_the_fundamental() {
        let w = HarmonicWaveform::new(vec![(2.0, 0.1), (0.5, 0.2)], 3e9);
        let n = w.normalized();
        assert_eq!(n.components, vec![(1.0, 0.1), (0.25, 0.2)]);
        assert_eq!(n.f0_hz, 3e9);
    }

    #[test]
    fn mismatched_nmf_length_is_rejected() {
        assert!(matches!(
            gamma_eff(&[1.0; 8], &[1.0; 9]),
            Err(Error::Length {
                expected: 8,
                actual: 9
            })
        ));
    }

    #[test]
    fn unit_nmf_leaves_the_sensitivity_unchanged() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, PI);
        let device = DeviceModel::default();
        let drive = DriveSpec {
            drain_bias_v: 5.0,
            gate_bias_v: 1.0,
            gate_ratios: vec![
                crate::tline::VoltageRatio::new(0.0, 0.0),
                crate::tline::VoltageRatio::new(0.0, 0.0),
            ],
        };
        let p = profile(&waveform, &device, &drive, 1024, 4).unwrap();
        assert!(p.alpha.iter().all(|&a| a == 1.0));
        assert_eq!(p.gamma_eff.samples, p.gamma);
    }

    #[test]
    fn shaped_drive_profile_is_consistent() {
        let waveform = HarmonicWaveform::two_harmonic(0.7, PI);
        let p = profile(
            &waveform,
            &DeviceModel::default(),
            &DriveSpec::default(),
            1024,
            8,
        )
        .unwrap();
        assert_eq!(p.theta.len(), 1024);
        for k in 0..1024 {
            assert_relative_eq!(
                p.gamma_eff.samples[k],
                p.gamma[k] * p.alpha[k],
                epsilon = 1e-15
            );
        }
        assert_relative_eq!(
            p.gamma_eff.rms_parseval,
            p.gamma_eff.rms_time,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rms_minimum_sits_mid_amplitude_at_flat_phase() {
        let sweep = sweep_isf(
            &Axis::linear("a2", 0.0, 1.0, 51),
            &Axis::linear("phi2", 0.0, TAU, 33),
            1024,
        )
        .unwrap();
        assert_relative_eq!(sweep.rms_min.value, 0.5293, max_relative = 2e-3);
        for &(i, j) in &sweep.rms_min.locations {
            let a2 = sweep.a2[i];
            let phi2 = sweep.phi2_rad[j];
            assert!((0.36..=0.48).contains(&a2), "a2 {a2}");
            assert!(phi2.sin().abs() < 1e-9, "phi2 {phi2}");
        }
    }

    #[test]
    fn second_harmonic_grows_with_waveform_asymmetry() {
        let mut last = -1.0;
        for &a2 in &[0.1, 0.3, 0.5, 0.7] {
            let waveform = HarmonicWaveform::two_harmonic(a2, PI);
            let gamma = isf_samples(&waveform, 1024).unwrap();
            let g2 = project(&gamma, 2).unwrap().magnitude(2);
            assert!(g2 > last, "a2 {a2}: gamma_2 {g2} <= {last}");
            last = g2;
        }
    }
}
