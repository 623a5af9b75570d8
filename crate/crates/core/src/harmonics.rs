//! Second-harmonic drain current and power of a feedback oscillator stage,
//! from the two-port coefficients and the gate/drain voltage ratios.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tline::VoltageRatio;

/// Two-port and nonlinearity coefficients of the harmonic current model.
/// `g21_a` and `g22_t` are the active and total transadmittance terms at
/// 2f0; `m_12` and `n_12` weight the squared gate and drain fundamentals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicPowerCoefficients {
    pub g21_a: Complex64,
    pub g22_t: Complex64,
    pub m_12: Complex64,
    pub n_12: Complex64,
}

impl HarmonicPowerCoefficients {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g21_a", self.g21_a),
            ("g22_t", self.g22_t),
            ("m_12", self.m_12),
            ("n_12", self.n_12),
        ] {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Drain current phasor at 2f0:
/// (G21_a·R_v2 + G22_t)·V2 + M_12·(R_v1·V1)² + N_12·V1²,
/// where V1 and V2 are the drain phasors at f0 and 2f0 and the gate
/// fundamental is R_v1·V1.
pub fn harmonic_current(
    c: &HarmonicPowerCoefficients,
    v1_drain: Complex64,
    v2_drain: Complex64,
    r_v1: &VoltageRatio,
    r_v2: &VoltageRatio,
) -> Result<Complex64> {
    c.validate()?;
    r_v1.validate()?;
    r_v2.validate()?;
    let v_gate = r_v1.as_complex() * v1_drain;
    Ok((c.g21_a * r_v2.as_complex() + c.g22_t) * v2_drain
        + c.m_12 * v_gate * v_gate
        + c.n_12 * v1_drain * v1_drain)
}

/// Power delivered at 2f0, taken as the real part of the phasor product
/// conj(V2)·I with no additional 1/2 factor; the phasors carry whatever
/// rms/peak convention the coefficients were extracted under.
pub fn harmonic_power(
    c: &HarmonicPowerCoefficients,
    v1_drain: Complex64,
    v2_drain: Complex64,
    r_v1: &VoltageRatio,
    r_v2: &VoltageRatio,
) -> Result<f64> {
    let current = harmonic_current(c, v1_drain, v2_drain, r_v1, r_v2)?;
    Ok((v2_drain.conj() * current).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    fn coefficients() -> HarmonicPowerCoefficients {
        HarmonicPowerCoefficients {
            g21_a: Complex64::new(1.0, 0.5),
            g22_t: Complex64::new(0.2, -0.1),
            m_12: Complex64::new(0.0, 0.3),
            n_12: Complex64::new(0.1, 0.0),
        }
    }

    #[test]
    fn zero_coefficients_give_zero_power() {
        let c = HarmonicPowerCoefficients {
            g21_a: Complex64::new(0.0, 0.0),
            g22_t: Complex64::new(0.0, 0.0),
            m_12: Complex64::new(0.0, 0.0),
            n_12: Complex64::new(0.0, 0.0),
        };
        let p = harmonic_power(
            &c,
            Complex64::new(1.0, 0.2),
            Complex64::new(0.5, -0.3),
            &VoltageRatio::new(3.0, FRAC_PI_4),
            &VoltageRatio::new(1.5, 0.1),
        )
        .unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn without_nonlinear_terms_the_current_is_the_linear_form() {
        let mut c = coefficients();
        c.m_12 = Complex64::new(0.0, 0.0);
        c.n_12 = Complex64::new(0.0, 0.0);
        let v2 = Complex64::new(0.6, -0.4);
        let r_v2 = VoltageRatio::new(1.5, -0.3);
        let i = harmonic_current(
            &c,
            Complex64::new(1.0, 0.0),
            v2,
            &VoltageRatio::new(3.0, FRAC_PI_4),
            &r_v2,
        )
        .unwrap();
        let expect = (c.g21_a * r_v2.as_complex() + c.g22_t) * v2;
        assert_relative_eq!(i.re, expect.re, epsilon = 1e-15);
        assert_relative_eq!(i.im, expect.im, epsilon = 1e-15);

        let p = harmonic_power(
            &c,
            Complex64::new(1.0, 0.0),
            v2,
            &VoltageRatio::new(3.0, FRAC_PI_4),
            &r_v2,
        )
        .unwrap();
        let g = c.g21_a * r_v2.as_complex() + c.g22_t;
        assert_relative_eq!(p, v2.norm_sqr() * g.re, max_relative = 1e-12);
    }

    #[test]
    fn zero_second_harmonic_voltage_leaves_only_nonlinear_current() {
        let c = coefficients();
        let v1 = Complex64::from_polar(1.0, 0.3);
        let r_v1 = VoltageRatio::new(2.0, FRAC_PI_4);
        let i = harmonic_current(
            &c,
            v1,
            Complex64::new(0.0, 0.0),
            &r_v1,
            &VoltageRatio::new(1.0, 0.0),
        )
        .unwrap();
        let v_gate = r_v1.as_complex() * v1;
        let expect = c.m_12 * v_gate * v_gate + c.n_12 * v1 * v1;
        assert_relative_eq!(i.re, expect.re, epsilon = 1e-15);
        assert_relative_eq!(i.im, expect.im, epsilon = 1e-15);

        let p = harmonic_power(
            &c,
            v1,
            Complex64::new(0.0, 0.0),
            &r_v1,
            &VoltageRatio::new(1.0, 0.0),
        )
        .unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn gate_term_squares_the_ratio() {
        let mut c = coefficients();
        c.g21_a = Complex64::new(0.0, 0.0);
        c.g22_t = Complex64::new(0.0, 0.0);
        c.n_12 = Complex64::new(0.0, 0.0);
        let v1 = Complex64::new(1.0, 0.0);
        let base = harmonic_current(
            &c,
            v1,
            Complex64::new(0.0, 0.0),
            &VoltageRatio::new(1.0, 0.2),
            &VoltageRatio::new(1.0, 0.0),
        )
        .unwrap();
        let doubled = harmonic_current(
            &c,
            v1,
            Complex64::new(0.0, 0.0),
            &VoltageRatio::new(2.0, 0.2),
            &VoltageRatio::new(1.0, 0.0),
        )
        .unwrap();
        assert_relative_eq!(doubled.norm(), 4.0 * base.norm(), max_relative = 1e-12);
        assert_relative_eq!(doubled.arg(), base.arg(), epsilon = 1e-12);
    }

    #[test]
    fn larger_output_ratio_raises_the_current_at_small_phase() {
        let mut c = coefficients();
        c.m_12 = Complex64::new(0.0, 0.0);
        c.n_12 = Complex64::new(0.0, 0.0);
        let v2 = Complex64::new(0.8, 0.0);
        let mut last = 0.0;
        for mag in [0.5, 1.0, 2.0, 4.0] {
            let i = harmonic_current(
                &c,
                Complex64::new(1.0, 0.0),
                v2,
                &VoltageRatio::new(3.0, FRAC_PI_4),
                &VoltageRatio::new(mag, 0.05),
            )
            .unwrap();
            assert!(i.norm() > last, "|R_v2| {mag}: |I| {} <= {last}", i.norm());
            last = i.norm();
        }
    }

    #[test]
    fn opposed_nonlinear_terms_make_gate_gain_costly() {
        let c = HarmonicPowerCoefficients {
            g21_a: Complex64::new(1.0, 0.0),
            g22_t: Complex64::new(1.0, 0.0),
            m_12: Complex64::new(-0.5, 0.0),
            n_12: Complex64::new(0.5, 0.0),
        };
        let v1 = Complex64::new(1.0, 0.0);
        let v2 = Complex64::new(1.0, 0.0);
        let r_v2 = VoltageRatio::new(1.0, 0.0);
        let mut last = f64::INFINITY;
        for mag in [0.5, 1.0, 2.0, 3.0] {
            let p = harmonic_power(&c, v1, v2, &VoltageRatio::new(mag, 0.0), &r_v2).unwrap();
            assert!(p < last, "|R_v1| {mag}: power {p} >= {last}");
            last = p;
        }
    }

    #[test]
    fn non_finite_coefficients_are_rejected() {
        let mut c = coefficients();
        c.m_12 = Complex64::new(f64::NAN, 0.0);
        assert!(harmonic_current(
            &c,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            &VoltageRatio::new(1.0, 0.0),
            &VoltageRatio::new(1.0, 0.0),
        )
        .is_err());
    }
}
