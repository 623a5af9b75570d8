//! 38-byte memory image: 32 bytes of SRAM waveform table plus 6 bytes of
//! ROM-packed burst parameters, with bit-exact pack/unpack.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stim::{canonical_table, Shape, StimProgram};

pub const SRAM_BYTES: usize = 32;
pub const ROM_BYTES: usize = 6;
pub const IMAGE_BYTES: usize = SRAM_BYTES + ROM_BYTES;

// ROM bit layout, LSB-first within the 6-byte array:
//   cycles            bits  0..11
//   frequency (Hz)    bits 11..26
//   amplitude code    bits 26..31
//   balance (ms)      bits 31..42
//   full-scale steps  bits 42..48
const CYCLES_OFFSET: usize = 0;
const CYCLES_BITS: usize = 11;
const FREQ_OFFSET: usize = 11;
const FREQ_BITS: usize = 15;
const AMP_OFFSET: usize = 26;
const AMP_BITS: usize = 5;
const BALANCE_OFFSET: usize = 31;
const BALANCE_BITS: usize = 11;
const FULL_SCALE_OFFSET: usize = 42;
const FULL_SCALE_BITS: usize = 6;

/// Full-scale current lattice: (step_code + 1)·50 µA, 50 µA = 1/20000 A.
pub const FULL_SCALE_STEPS_PER_A: f64 = 20_000.0;
pub const MAX_FULL_SCALE_STEPS: u32 = 1 << FULL_SCALE_BITS;

/// Receiver-side memory snapshot: the SRAM sample table and the packed ROM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryImage {
    pub sram: [u8; SRAM_BYTES],
    pub rom: [u8; ROM_BYTES],
}

impl MemoryImage {
    /// SRAM followed by ROM as one 38-byte payload.
    pub fn to_bytes(&self) -> [u8; IMAGE_BYTES] {
        let mut out = [0u8; IMAGE_BYTES];
        out[..SRAM_BYTES].copy_from_slice(&self.sram);
        out[SRAM_BYTES..].copy_from_slice(&self.rom);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != IMAGE_BYTES {
            return Err(Error::Length {
                expected: IMAGE_BYTES,
                actual: bytes.len(),
            });
        }
        let mut image = MemoryImage {
            sram: [0; SRAM_BYTES],
            rom: [0; ROM_BYTES],
        };
        image.sram.copy_from_slice(&bytes[..SRAM_BYTES]);
        image.rom.copy_from_slice(&bytes[SRAM_BYTES..]);
        Ok(image)
    }
}

fn set_bits(rom: &mut [u8; ROM_BYTES], offset: usize, width: usize, value: u32) {
    debug_assert!(width == 32 || value < (1u32 << width));
    for i in 0..width {
        let pos = offset + i;
        let mask = 1u8 << (pos % 8);
        if (value >> i) & 1 == 1 {
            rom[pos / 8] |= mask;
        } else {
            rom[pos / 8] &= !mask;
        }
    }
}

fn get_bits(rom: &[u8; ROM_BYTES], offset: usize, width: usize) -> u32 {
    let mut value = 0u32;
    for i in 0..width {
        let pos = offset + i;
        if rom[pos / 8] >> (pos % 8) & 1 == 1 {
            value |= 1 << i;
        }
    }
    value
}

/// Packs a program into the memory image. Fields stored on a quantized
/// lattice (integer hertz, integer milliseconds, 50 µA full-scale steps)
/// must sit exactly on it so that `unpack` restores the program bit-exactly.
pub fn pack(program: &StimProgram) -> Result<MemoryImage> {
    program.validate()?;
    if program.stim_frequency_hz.fract() != 0.0 {
        return Err(Error::validation(
            "stim_frequency_hz",
            "must be a whole number of hertz to pack",
        ));
    }
    let freq_code = program.stim_frequency_hz as u32;

    let balance_ms = (program.balance_duration_s * 1000.0).round();
    if balance_ms / 1000.0 != program.balance_duration_s {
        return Err(Error::validation(
            "balance_duration_s",
            "must be a whole number of milliseconds to pack",
        ));
    }
    let balance_code = balance_ms as u32;

    let steps = (program.full_scale_current_a * FULL_SCALE_STEPS_PER_A).round();
    if steps < 1.0
        || steps > MAX_FULL_SCALE_STEPS as f64
        || steps / FULL_SCALE_STEPS_PER_A != program.full_scale_current_a
    {
        return Err(Error::validation(
            "full_scale_current_a",
            "must be a multiple of 50 µA, at most 3.2 mA, to pack",
        ));
    }
    let fs_code = steps as u32 - 1;

    let mut rom = [0u8; ROM_BYTES];
    set_bits(&mut rom, CYCLES_OFFSET, CYCLES_BITS, program.cycles);
    set_bits(&mut rom, FREQ_OFFSET, FREQ_BITS, freq_code);
    set_bits(&mut rom, AMP_OFFSET, AMP_BITS, program.amplitude_code as u32);
    set_bits(&mut rom, BALANCE_OFFSET, BALANCE_BITS, balance_code);
    set_bits(&mut rom, FULL_SCALE_OFFSET, FULL_SCALE_BITS, fs_code);
    Ok(MemoryImage {
        sram: program.sample_table,
        rom,
    })
}

/// Decodes a memory image back into a program. The shape tag is recovered by
/// matching the SRAM against the canonical tables; anything else is
/// arbitrary. Decoded fields are re-validated.
pub fn unpack(image: &MemoryImage) -> Result<StimProgram> {
    let shape = [Shape::Sine, Shape::Triangle, Shape::Square]
        .into_iter()
        .find(|s| canonical_table(*s) == Some(image.sram))
        .unwrap_or(Shape::Arbitrary);
    let steps = get_bits(&image.rom, FULL_SCALE_OFFSET, FULL_SCALE_BITS) + 1;
    let program = StimProgram {
        shape,
        sample_table: image.sram,
        stim_frequency_hz: get_bits(&image.rom, FREQ_OFFSET, FREQ_BITS) as f64,
        cycles: get_bits(&image.rom, CYCLES_OFFSET, CYCLES_BITS),
        amplitude_code: get_bits(&image.rom, AMP_OFFSET, AMP_BITS) as u8,
        full_scale_current_a: steps as f64 / FULL_SCALE_STEPS_PER_A,
        balance_duration_s: get_bits(&image.rom, BALANCE_OFFSET, BALANCE_BITS) as f64 / 1000.0,
    };
    program.validate()?;
    Ok(program)
}
