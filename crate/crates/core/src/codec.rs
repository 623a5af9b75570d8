//! Uplink codec: program → memory image → framed 480-bit stream →
//! differential-BPSK baseband, and the inverse chain.

mod baseband;
mod frame;
mod image;

pub use baseband::{
    demodulate, modulate, modulate_impaired, BasebandParams, BasebandSignal,
    DEFAULT_CARRIER_FREQUENCY_HZ, DEFAULT_CYCLES_PER_BIT, DEFAULT_SAMPLES_PER_CYCLE,
    MIN_SAMPLES_PER_CYCLE,
};
pub use frame::{
    bits_to_bytes, bytes_to_bits, deserialize, frame_bits, serialize, serialize_with,
    Deserializer, DATA_FRAMES, FRAME_BITS, STREAM_BITS, SYNC_BITS, SYNC_END, SYNC_START,
};
pub use image::{
    pack, unpack, MemoryImage, FULL_SCALE_STEPS_PER_A, IMAGE_BYTES, MAX_FULL_SCALE_STEPS,
    ROM_BYTES, SRAM_BYTES,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stim::{
        canonical_table, Shape, StimProgram, MAX_AMPLITUDE_CODE, MAX_CYCLES, MIN_CYCLES,
        SAMPLES_PER_CYCLE,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn random_program(rng: &mut ChaCha8Rng) -> StimProgram {
        let shape = match rng.gen_range(0..4) {
            0 => Shape::Sine,
            1 => Shape::Triangle,
            2 => Shape::Square,
            _ => Shape::Arbitrary,
        };
        let table = match canonical_table(shape) {
            Some(table) => table,
            None => loop {
                let mut table = [0u8; SAMPLES_PER_CYCLE];
                rng.fill(&mut table);
                let named = [Shape::Sine, Shape::Triangle, Shape::Square];
                if !named.iter().any(|s| canonical_table(*s) == Some(table)) {
                    break table;
                }
            },
        };
        StimProgram {
            shape,
            sample_table: table,
            stim_frequency_hz: rng.gen_range(150..=20_000) as f64,
            cycles: rng.gen_range(MIN_CYCLES..=MAX_CYCLES),
            amplitude_code: rng.gen_range(0..=MAX_AMPLITUDE_CODE),
            full_scale_current_a: rng.gen_range(1..=MAX_FULL_SCALE_STEPS) as f64
                / FULL_SCALE_STEPS_PER_A,
            balance_duration_s: rng.gen_range(16..=1280) as f64 / 1000.0,
        }
    }

    #[test]
    fn end_to_end_identity_through_the_baseband() {
        let params = BasebandParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let program = random_program(&mut rng);
            let bits = serialize(&pack(&program).unwrap());
            assert_eq!(bits.len(), STREAM_BITS);
            let signal = modulate(&bits, &params).unwrap();
            let received = demodulate(&signal).unwrap();
            assert_eq!(received, bits);
            let image = deserialize(&received).unwrap();
            assert_eq!(unpack(&image).unwrap(), program);
        }
    }

    #[test]
    fn end_to_end_identity_with_channel_impairments() {
        let params = BasebandParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let program = random_program(&mut rng);
        let bits = serialize(&pack(&program).unwrap());
        let signal = modulate_impaired(&bits, &params, 0.25, 1.0).unwrap();
        let image = deserialize(&demodulate(&signal).unwrap()).unwrap();
        assert_eq!(unpack(&image).unwrap(), program);
    }
}
