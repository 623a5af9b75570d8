//! Behavioral modeling toolkit for two coupled systems: an implantable
//! biphasic inner-ear stimulator (tissue loads, waveform engine, charge-pump
//! power chain, reference clocks, BPSK link codec) and an ISF-based
//! phase-noise waveform analyzer for harmonic VCOs (noise modulation factor,
//! transmission-line feedback ratios, harmonic power, oscillator figures of
//! merit).
//!
//! Every model is a pure function over plain value types; simulators own
//! their state per call. Grid sweeps run in parallel by default (`parallel`
//! feature) with a sequential fallback that produces identical results.

pub mod codec;
pub mod error;
pub mod formulas;
pub mod fourier;
pub mod harmonics;
pub mod isf;
pub mod nmf;
pub mod power;
pub mod refclock;
pub mod stim;
pub mod sweep;
pub mod tissue;
pub mod tline;

pub use error::{Error, Result};

/// Speed of light in vacuum (m/s), rounded engineering value used throughout
/// the radar and transmission-line formulas.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Zero-Celsius offset for thermal-voltage calculations (K).
pub const KELVIN_AT_0C: f64 = 273.15;
