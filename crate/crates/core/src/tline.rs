//! Transmission-line feedback analysis: gate-to-drain voltage ratio of a
//! line terminated in a known reflection, and the line length that
//! maximizes the fundamental ratio.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// Mean fundamental-frequency gate reflection of the reference 40 GHz
/// design. The separately quoted gate impedance (18.61 − 44.7j Ω) does not
/// reduce to this value under a 50 Ω normalization; both are kept verbatim
/// rather than reconciled.
pub const REFERENCE_GATE_REFLECTION: (f64, f64) = (-0.157, -0.6567);
pub const REFERENCE_GATE_IMPEDANCE_OHM: (f64, f64) = (18.61, -44.7);

/// Feedback line between drain and gate: characteristic impedance,
/// effective permittivity, physical length, and the gate-side reflection
/// coefficient at the fundamental.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TlineFeedback {
    pub z0_ohm: f64,
    pub effective_permittivity: f64,
    pub f0_hz: f64,
    pub length_m: f64,
    pub gamma_re: f64,
    pub gamma_im: f64,
}

impl Default for TlineFeedback {
    fn default() -> Self {
        TlineFeedback {
            z0_ohm: 50.0,
            effective_permittivity: 3.44,
            f0_hz: 40e9,
            length_m: 0.0,
            gamma_re: REFERENCE_GATE_REFLECTION.0,
            gamma_im: REFERENCE_GATE_REFLECTION.1,
        }
    }
}

impl TlineFeedback {
    pub fn gamma(&self) -> Complex64 {
        Complex64::new(self.gamma_re, self.gamma_im)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("z0_ohm", self.z0_ohm), ("f0_hz", self.f0_hz)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        if !self.effective_permittivity.is_finite() || self.effective_permittivity < 1.0 {
            return Err(Error::validation(
                "effective_permittivity",
                "must be finite and >= 1",
            ));
        }
        if !self.length_m.is_finite() || self.length_m < 0.0 {
            return Err(Error::validation("length_m", "must be finite and >= 0"));
        }
        if !self.gamma_re.is_finite() || !self.gamma_im.is_finite() {
            return Err(Error::validation("gamma_re", "must be finite"));
        }
        if self.gamma().norm() > 1.0 {
            return Err(Error::domain(format!(
                "passive reflection required: |gamma| = {:.4} exceeds 1",
                self.gamma().norm()
            )));
        }
        Ok(())
    }

    /// Guided wavelength at harmonic `n`: c/(n·f0·sqrt(eps_eff)).
    pub fn wavelength_m(&self, n: u32) -> f64 {
        SPEED_OF_LIGHT / (n as f64 * self.f0_hz * self.effective_permittivity.sqrt())
    }

    /// Phase constant at harmonic `n`: 2π·n·f0·sqrt(eps_eff)/c.
    pub fn beta_rad_per_m(&self, n: u32) -> f64 {
        std::f64::consts::TAU / self.wavelength_m(n)
    }
}

/// Gate-to-drain voltage ratio in polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoltageRatio {
    pub magnitude: f64,
    pub phase_rad: f64,
}

impl VoltageRatio {
    pub fn new(magnitude: f64, phase_rad: f64) -> Self {
        VoltageRatio {
            magnitude,
            phase_rad,
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase_rad)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.magnitude.is_finite() || self.magnitude < 0.0 {
            return Err(Error::validation("magnitude", "must be finite and >= 0"));
        }
        if !self.phase_rad.is_finite() {
            return Err(Error::validation("phase_rad", "must be finite"));
        }
        Ok(())
    }
}

fn rv_complex(t: &TlineFeedback, n: u32, length_m: f64) -> Result<Complex64> {
    let gamma = t.gamma();
    let numerator = Complex64::new(1.0, 0.0) + gamma;
    if numerator.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let beta_l = t.beta_rad_per_m(n) * length_m;
    let phase = Complex64::from_polar(1.0, beta_l);
    let denominator = phase + gamma / phase;
    if denominator.norm() <= 1e-12 * (1.0 + gamma.norm()) {
        return Err(Error::domain(
            "lossless resonance: the voltage ratio is unbounded at this length",
        ));
    }
    Ok(numerator / denominator)
}

/// R_v,n = (1 + Γ̃)/(e^{jβl} + Γ̃·e^{−jβl}) at the line's own length.
pub fn rv_from_tline(t: &TlineFeedback, n: u32) -> Result<VoltageRatio> {
    t.validate()?;
    if n < 1 {
        return Err(Error::validation("n", "harmonic index must be >= 1"));
    }
    let rv = rv_complex(t, n, t.length_m)?;
    Ok(VoltageRatio::new(rv.norm(), rv.arg()))
}

/// |R_v,n| at an explicit length, for sweeps over `l`.
pub fn rv_magnitude(t: &TlineFeedback, n: u32, length_m: f64) -> Result<f64> {
    t.validate()?;
    if n < 1 {
        return Err(Error::validation("n", "harmonic index must be >= 1"));
    }
    if !length_m.is_finite() || length_m < 0.0 {
        return Err(Error::validation("length_m", "must be finite and >= 0"));
    }
    Ok(rv_complex(t, n, length_m)?.norm())
}

/// Length in [0, λ_n/2) that maximizes |R_v,n|. The magnitude is periodic in
/// l with period λ_n/2 and peaks where the denominator term
/// 2|Γ̃|cos(ψ − 2βl) is most negative, giving l = λ_n·((ψ+π) mod 2π)/(4π)
/// with ψ the phase of Γ̃. A reflection of zero leaves |R_v,n| constant, so
/// no unique maximum exists.
pub fn optimal_length(t: &TlineFeedback, n: u32) -> Result<f64> {
    t.validate()?;
    if n < 1 {
        return Err(Error::validation("n", "harmonic index must be >= 1"));
    }
    let gamma = t.gamma();
    if gamma.norm() == 0.0 {
        return Err(Error::domain(
            "matched termination: |R_v,n| is length-independent, no unique maximum",
        ));
    }
    let psi = gamma.im.atan2(gamma.re);
    let angle = (psi + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU);
    Ok(t.wavelength_m(n) * angle / (4.0 * std::f64::consts::PI))
}

/// |R_v,n| sampled at `points` lengths spanning one period [0, λ_n/2).
pub fn length_sweep(t: &TlineFeedback, n: u32, points: usize) -> Result<Vec<(f64, f64)>> {
    t.validate()?;
    if points < 2 {
        return Err(Error::validation("points", "must be at least 2"));
    }
    let half_wave = t.wavelength_m(n) / 2.0;
    (0..points)
        .map(|k| {
            let l = half_wave * k as f64 / points as f64;
            rv_magnitude(t, n, l).map(|m| (l, m))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference_line() -> TlineFeedback {
        TlineFeedback::default()
    }

    #[test]
    fn wavelength_at_reference_parameters() {
        let t = reference_line();
        assert_relative_eq!(t.wavelength_m(1), 4.043724e-3, max_relative = 1e-5);
        assert_relative_eq!(t.wavelength_m(2), t.wavelength_m(1) / 2.0, max_relative = 1e-12);
        assert_relative_eq!(
            t.beta_rad_per_m(1) * t.wavelength_m(1),
            std::f64::consts::TAU,
            max_relative = 1e-12
        );
    }

    #[test]
    fn matched_line_has_unity_ratio_everywhere() {
        let mut t = reference_line();
        t.gamma_re = 0.0;
        t.gamma_im = 0.0;
        for k in 0..10 {
            let l = k as f64 * 100e-6;
            assert_relative_eq!(rv_magnitude(&t, 1, l).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn full_reflection_nulls_the_ratio() {
        let mut t = reference_line();
        t.gamma_re = -1.0;
        t.gamma_im = 0.0;
        t.length_m = 123e-6;
        let rv = rv_from_tline(&t, 1).unwrap();
        assert_eq!(rv.magnitude, 0.0);
    }

    #[test]
    fn reference_reflection_peaks_near_430_micron() {
        let t = reference_line();
        let l_opt = optimal_length(&t, 1).unwrap();
        assert!(
            (l_opt - 430e-6).abs() < 5e-6,
            "optimal length {:.3} µm",
            l_opt * 1e6
        );
        let peak = rv_magnitude(&t, 1, l_opt).unwrap();
        assert_relative_eq!(peak, 3.29, max_relative = 1e-2);
    }

    #[test]
    fn closed_form_matches_dense_sweep() {
        let t = reference_line();
        let sweep = length_sweep(&t, 1, 20_001).unwrap();
        let magnitudes: Vec<f64> = sweep.iter().map(|&(_, m)| m).collect();
        let best = crate::sweep::argmax(&magnitudes).unwrap();
        let l_opt = optimal_length(&t, 1).unwrap();
        let lambda = t.wavelength_m(1);
        assert!(
            (sweep[best].0 - l_opt).abs() < 1e-3 * lambda,
            "sweep {} vs closed form {}",
            sweep[best].0,
            l_opt
        );
    }

    #[test]
    fn closed_form_matches_sweep_for_random_reflections() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let r = rng.gen_range(0.05..0.95);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let mut t = reference_line();
            t.gamma_re = r * phi.cos();
            t.gamma_im = r * phi.sin();
            let sweep = length_sweep(&t, 1, 10_000).unwrap();
            let magnitudes: Vec<f64> = sweep.iter().map(|&(_, m)| m).collect();
            let best = crate::sweep::argmax(&magnitudes).unwrap();
            let l_opt = optimal_length(&t, 1).unwrap();
            let lambda = t.wavelength_m(1);
            let err = (sweep[best].0 - l_opt).abs();
            let err = err.min(lambda / 2.0 - err);
            assert!(err < 1e-3 * lambda, "gamma {r}∠{phi}: err {err}");
        }
    }

    #[test]
    fn real_axis_reflections_use_the_expected_branch() {
        let mut t = reference_line();
        t.gamma_re = -0.05;
        t.gamma_im = 0.0;
        assert_eq!(optimal_length(&t, 1).unwrap(), 0.0);

        t.gamma_re = 0.4;
        let quarter = t.wavelength_m(1) / 4.0;
        assert_relative_eq!(optimal_length(&t, 1).unwrap(), quarter, max_relative = 1e-12);

        t.gamma_re = 0.0;
        t.gamma_im = -0.5;
        assert_relative_eq!(
            optimal_length(&t, 1).unwrap(),
            t.wavelength_m(1) / 8.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn optimum_lies_within_one_half_wavelength() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let r = rng.gen_range(1e-3..1.0);
            let phi = rng.gen_range(-8.0..8.0);
            let mut t = reference_line();
            t.gamma_re = r * f64::cos(phi);
            t.gamma_im = r * f64::sin(phi);
            let l = optimal_length(&t, 1).unwrap();
            assert!(l >= 0.0 && l < t.wavelength_m(1) / 2.0);
        }
    }

    #[test]
    fn active_reflection_is_rejected() {
        let mut t = reference_line();
        t.gamma_re = 1.2;
        assert!(matches!(rv_from_tline(&t, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn matched_termination_has_no_optimum() {
        let mut t = reference_line();
        t.gamma_re = 0.0;
        t.gamma_im = 0.0;
        assert!(matches!(optimal_length(&t, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn resonant_length_is_a_domain_error() {
        let mut t = reference_line();
        t.gamma_re = 0.0;
        t.gamma_im = 1.0;
        // gamma = j equals −e^{2jβl} when βl = 3π/4.
        t.length_m = 3.0 * t.wavelength_m(1) / 8.0;
        assert!(matches!(rv_from_tline(&t, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_fields_are_rejected() {
        let mut t = reference_line();
        t.effective_permittivity = 0.8;
        assert!(t.validate().is_err());
        let mut t = reference_line();
        t.length_m = -1e-6;
        assert!(t.validate().is_err());
        let t = reference_line();
        assert!(rv_from_tline(&t, 0).is_err());
    }

    #[test]
    fn higher_harmonics_scale_the_optimum_down() {
        let t = reference_line();
        let l1 = optimal_length(&t, 1).unwrap();
        let l2 = optimal_length(&t, 2).unwrap();
        assert_relative_eq!(l2, l1 / 2.0, max_relative = 1e-12);
    }
}
