//! Closed-form figure-of-merit, noise, PLL, and FMCW radar formulas.
//! Direct evaluation in SI units; every physical input must be positive.

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

fn positive(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::domain(format!("{name} must be positive, got {v}")));
    }
    Ok(v)
}

/// Oscillator figure of merit in dBc/Hz:
/// |PN| + 20·log10(f0/Δf) − 10·log10(P_DC/1 mW).
/// `pn_dbchz` is the phase noise at `offset_hz` from the carrier `f0_hz`;
/// `p_dc_mw` is the DC power in milliwatts.
pub fn fom(pn_dbchz: f64, f0_hz: f64, offset_hz: f64, p_dc_mw: f64) -> Result<f64> {
    if !pn_dbchz.is_finite() {
        return Err(Error::domain("pn_dbchz must be finite"));
    }
    positive("f0_hz", f0_hz)?;
    positive("offset_hz", offset_hz)?;
    positive("p_dc_mw", p_dc_mw)?;
    Ok(pn_dbchz.abs() + 20.0 * (f0_hz / offset_hz).log10() - 10.0 * p_dc_mw.log10())
}

/// Generic flicker spectral density K/f^α.
pub fn flicker_psd(k: f64, alpha_exp: f64, f_hz: f64) -> Result<f64> {
    positive("k", k)?;
    positive("alpha_exp", alpha_exp)?;
    positive("f_hz", f_hz)?;
    Ok(k / f_hz.powf(alpha_exp))
}

/// Gate-referred MOS flicker voltage PSD: K_F·W/(L·f·C_ox²).
pub fn mos_flicker_psd(
    k_f: f64,
    width_m: f64,
    length_m: f64,
    c_ox_f_per_m2: f64,
    f_hz: f64,
) -> Result<f64> {
    positive("k_f", k_f)?;
    positive("width_m", width_m)?;
    positive("length_m", length_m)?;
    positive("c_ox_f_per_m2", c_ox_f_per_m2)?;
    positive("f_hz", f_hz)?;
    Ok(k_f * width_m / (length_m * f_hz * c_ox_f_per_m2 * c_ox_f_per_m2))
}

/// VCO tuning gain Δf/ΔV in Hz per volt.
pub fn k_vco(delta_f_hz: f64, delta_v: f64) -> Result<f64> {
    positive("delta_f_hz", delta_f_hz)?;
    positive("delta_v", delta_v)?;
    Ok(delta_f_hz / delta_v)
}

/// Closed-loop PLL bandwidth (1/2π)·√(K_PD·K_VCO·K_F/(N·L)).
pub fn pll_bandwidth(k_pd: f64, k_vco: f64, k_f: f64, n: f64, l: f64) -> Result<f64> {
    positive("k_pd", k_pd)?;
    positive("k_vco", k_vco)?;
    positive("k_f", k_f)?;
    positive("n", n)?;
    positive("l", l)?;
    Ok((k_pd * k_vco * k_f / (n * l)).sqrt() / std::f64::consts::TAU)
}

/// Capture range Δω_C = 2π·K_VCO·V_Cmax in rad/s.
pub fn capture_range(k_vco_hz_per_v: f64, v_c_max: f64) -> Result<f64> {
    positive("k_vco_hz_per_v", k_vco_hz_per_v)?;
    positive("v_c_max", v_c_max)?;
    Ok(std::f64::consts::TAU * k_vco_hz_per_v * v_c_max)
}

/// FMCW range resolution c/(2B) in meters.
pub fn range_resolution(bandwidth_hz: f64) -> Result<f64> {
    positive("bandwidth_hz", bandwidth_hz)?;
    Ok(SPEED_OF_LIGHT / (2.0 * bandwidth_hz))
}

/// FMCW maximum unambiguous range c·T_chirp/2 in meters.
pub fn max_unambiguous_range(t_chirp_s: f64) -> Result<f64> {
    positive("t_chirp_s", t_chirp_s)?;
    Ok(SPEED_OF_LIGHT * t_chirp_s / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fom_round_reference_row() {
        assert_relative_eq!(
            fom(-100.0, 1e9, 1e6, 1.0).unwrap(),
            160.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fom_published_row_recomputes_to_187_point_6() {
        assert_relative_eq!(
            fom(-109.8, 79e9, 1e6, 102.7).unwrap(),
            187.6368,
            max_relative = 1e-5
        );
    }

    #[test]
    fn doubling_dc_power_costs_three_db() {
        let a = fom(-100.0, 1e9, 1e6, 2.0).unwrap();
        let b = fom(-100.0, 1e9, 1e6, 4.0).unwrap();
        assert_relative_eq!(a - b, 3.010299956639812, epsilon = 1e-12);
    }

    #[test]
    fn fom_is_invariant_under_joint_frequency_scaling() {
        let base = fom(-95.0, 2.4e9, 1e6, 10.0).unwrap();
        for c in [2.5, 1e3, 1e-2] {
            assert_relative_eq!(
                fom(-95.0, c * 2.4e9, c * 1e6, 10.0).unwrap(),
                base,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn fom_sign_of_phase_noise_is_ignored() {
        assert_eq!(
            fom(-100.0, 1e9, 1e6, 1.0).unwrap(),
            fom(100.0, 1e9, 1e6, 1.0).unwrap()
        );
    }

    #[test]
    fn flicker_psd_follows_the_inverse_f_law() {
        let s1 = flicker_psd(1e-10, 1.0, 1e3).unwrap();
        let s2 = flicker_psd(1e-10, 1.0, 2e3).unwrap();
        assert_relative_eq!(s1 / s2, 2.0, max_relative = 1e-12);
        let q1 = flicker_psd(1e-10, 2.0, 1e3).unwrap();
        let q2 = flicker_psd(1e-10, 2.0, 2e3).unwrap();
        assert_relative_eq!(q1 / q2, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn mos_flicker_psd_scalings() {
        let base = mos_flicker_psd(1e-25, 10e-6, 60e-9, 8.6e-3, 1e3).unwrap();
        assert_relative_eq!(
            mos_flicker_psd(1e-25, 20e-6, 60e-9, 8.6e-3, 1e3).unwrap(),
            2.0 * base,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mos_flicker_psd(1e-25, 10e-6, 120e-9, 8.6e-3, 1e3).unwrap(),
            base / 2.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mos_flicker_psd(1e-25, 10e-6, 60e-9, 17.2e-3, 1e3).unwrap(),
            base / 4.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mos_flicker_psd(1e-25, 10e-6, 60e-9, 8.6e-3, 2e3).unwrap(),
            base / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn tuning_gain_is_a_plain_ratio() {
        assert_eq!(k_vco(100e6, 2.0).unwrap(), 50e6);
    }

    #[test]
    fn pll_bandwidth_matches_the_printed_form() {
        let got = pll_bandwidth(1.0, 2.0, 3.0, 4.0, 5.0).unwrap();
        let expect = (6.0f64 / 20.0).sqrt() / std::f64::consts::TAU;
        assert_relative_eq!(got, expect, max_relative = 1e-15);
    }

    #[test]
    fn capture_range_is_angular() {
        assert_eq!(
            capture_range(10e6, 0.5).unwrap(),
            std::f64::consts::TAU * 10e6 * 0.5
        );
    }

    #[test]
    fn radar_reference_points() {
        assert_eq!(range_resolution(4e9).unwrap(), 0.0375);
        assert_relative_eq!(
            max_unambiguous_range(1e-6).unwrap(),
            150.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn nonpositive_inputs_are_domain_errors() {
        assert!(matches!(fom(-100.0, 0.0, 1e6, 1.0), Err(Error::Domain(_))));
        assert!(matches!(fom(-100.0, 1e9, -1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(fom(-100.0, 1e9, 1e6, 0.0), Err(Error::Domain(_))));
        assert!(matches!(fom(f64::NAN, 1e9, 1e6, 1.0), Err(Error::Domain(_))));
        assert!(flicker_psd(0.0, 1.0, 1e3).is_err());
        assert!(mos_flicker_psd(1e-25, 0.0, 60e-9, 8.6e-3, 1e3).is_err());
        assert!(k_vco(1e6, 0.0).is_err());
        assert!(pll_bandwidth(1.0, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(capture_range(-1.0, 1.0).is_err());
        assert!(range_resolution(0.0).is_err());
        assert!(max_unambiguous_range(-1e-6).is_err());
    }
}
