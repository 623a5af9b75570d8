//! Frame-level serialization: sync words, 12-bit data frames, and a
//! resumable deserializer state machine.

use crate::error::{Error, Result};

use super::image::{MemoryImage, IMAGE_BYTES, ROM_BYTES, SRAM_BYTES};

pub const SYNC_BITS: usize = 12;
pub const FRAME_BITS: usize = 12;
pub const DATA_FRAMES: usize = IMAGE_BYTES;
/// Start sync + 38 data frames + end sync.
pub const STREAM_BITS: usize = SYNC_BITS + DATA_FRAMES * FRAME_BITS + SYNC_BITS;

/// Default start sync word. Read as a frame its parity duplicate fails, so
/// it can never be produced by a data frame.
pub const SYNC_START: u16 = 0xACE;
/// Default end sync word; its leading bits are not a valid frame header.
pub const SYNC_END: u16 = 0x35C;

const SYNC_MASK: u16 = 0xFFF;

/// 12-bit frame for one payload byte: header "10", data MSB-first, then the
/// even-parity bit of the data twice.
pub fn frame_bits(byte: u8) -> [bool; FRAME_BITS] {
    let mut bits = [false; FRAME_BITS];
    bits[0] = true;
    bits[1] = false;
    let mut parity = false;
    for i in 0..8 {
        let bit = byte >> (7 - i) & 1 == 1;
        bits[2 + i] = bit;
        parity ^= bit;
    }
    bits[10] = parity;
    bits[11] = parity;
    bits
}

fn sync_word_bits(code: u16) -> [bool; SYNC_BITS] {
    let mut bits = [false; SYNC_BITS];
    for (i, slot) in bits.iter_mut().enumerate() {
        *slot = code >> (SYNC_BITS - 1 - i) & 1 == 1;
    }
    bits
}

/// Full 480-bit uplink stream for one memory image.
pub fn serialize(image: &MemoryImage) -> Vec<bool> {
    serialize_with(image, SYNC_START, SYNC_END)
}

pub fn serialize_with(image: &MemoryImage, start_sync: u16, end_sync: u16) -> Vec<bool> {
    let mut bits = Vec::with_capacity(STREAM_BITS);
    bits.extend_from_slice(&sync_word_bits(start_sync & SYNC_MASK));
    for byte in image.to_bytes() {
        bits.extend_from_slice(&frame_bits(byte));
    }
    bits.extend_from_slice(&sync_word_bits(end_sync & SYNC_MASK));
    bits
}

#[derive(Debug, Clone, PartialEq)]
enum State {
    Hunt,
    Data { frame_index: usize },
    EndSync,
    Done(MemoryImage),
}

/// Push-driven deserializer: hunt for the start sync, collect 38 data
/// frames, then match the end sync. Feed bits with [`Deserializer::push`];
/// the image is returned once the end sync lands. The machine is a plain
/// value, so callers may clone it to fork a parse.
#[derive(Debug, Clone)]
pub struct Deserializer {
    start_sync: u16,
    end_sync: u16,
    /// Highest bit offset at which the start sync may begin; 0 demands an
    /// aligned stream.
    hunt_limit: usize,
    state: State,
    position: usize,
    window: u16,
    window_len: usize,
    payload: Vec<u8>,
    frame: Vec<bool>,
}

impl Default for Deserializer {
    fn default() -> Self {
        Deserializer::new()
    }
}

impl Deserializer {
    pub fn new() -> Self {
        Deserializer::with_config(SYNC_START, SYNC_END, 0)
    }

    pub fn with_hunt_limit(hunt_limit: usize) -> Self {
        Deserializer::with_config(SYNC_START, SYNC_END, hunt_limit)
    }

    pub fn with_config(start_sync: u16, end_sync: u16, hunt_limit: usize) -> Self {
        Deserializer {
            start_sync: start_sync & SYNC_MASK,
            end_sync: end_sync & SYNC_MASK,
            hunt_limit,
            state: State::Hunt,
            position: 0,
            window: 0,
            window_len: 0,
            payload: Vec::with_capacity(DATA_FRAMES),
            frame: Vec::with_capacity(FRAME_BITS),
        }
    }

    /// Bits consumed so far.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn is_done(&self) -> bool {
        matches!(self.state, State::Done(_))
    }

    /// Advance by one bit. Returns the decoded image on the bit that
    /// completes the end sync, `None` while more input is needed, and an
    /// error that leaves the machine poisoned on malformed input.
    pub fn push(&mut self, bit: bool) -> Result<Option<MemoryImage>> {
        self.position += 1;
        match &mut self.state {
            State::Hunt => {
                self.window = (self.window << 1 | bit as u16) & SYNC_MASK;
                self.window_len += 1;
                if self.window_len < SYNC_BITS {
                    return Ok(None);
                }
                let offset = self.position - SYNC_BITS;
                if self.window == self.start_sync {
                    self.state = State::Data { frame_index: 0 };
                    Ok(None)
                } else if offset >= self.hunt_limit {
                    Err(Error::Sync { offset })
                } else {
                    Ok(None)
                }
            }
            State::Data { frame_index } => {
                let index = *frame_index;
                self.frame.push(bit);
                if self.frame.len() < FRAME_BITS {
                    return Ok(None);
                }
                if !(self.frame[0] && !self.frame[1]) {
                    return Err(Error::Frame {
                        index,
                        reason: "bad header".into(),
                    });
                }
                let mut byte = 0u8;
                let mut parity = false;
                for i in 0..8 {
                    byte = byte << 1 | self.frame[2 + i] as u8;
                    parity ^= self.frame[2 + i];
                }
                if self.frame[10] != parity || self.frame[11] != parity {
                    return Err(Error::Frame {
                        index,
                        reason: "parity mismatch".into(),
                    });
                }
                self.payload.push(byte);
                self.frame.clear();
                if self.payload.len() == DATA_FRAMES {
                    self.window = 0;
                    self.window_len = 0;
                    self.state = State::EndSync;
                } else {
                    self.state = State::Data {
                        frame_index: index + 1,
                    };
                }
                Ok(None)
            }
            State::EndSync => {
                self.window = (self.window << 1 | bit as u16) & SYNC_MASK;
                self.window_len += 1;
                if self.window_len < SYNC_BITS {
                    return Ok(None);
                }
                if self.window != self.end_sync {
                    return Err(Error::Sync {
                        offset: self.position - SYNC_BITS,
                    });
                }
                let mut image = MemoryImage {
                    sram: [0; SRAM_BYTES],
                    rom: [0; ROM_BYTES],
                };
                image.sram.copy_from_slice(&self.payload[..SRAM_BYTES]);
                image.rom.copy_from_slice(&self.payload[SRAM_BYTES..]);
                self.state = State::Done(image);
                Ok(Some(image))
            }
            State::Done(_) => Err(Error::Length {
                expected: STREAM_BITS,
                actual: self.position,
            }),
        }
    }

    /// Feed a whole slice; stops at the first completed image or error.
    pub fn feed(&mut self, bits: &[bool]) -> Result<Option<MemoryImage>> {
        for &bit in bits {
            if let Some(image) = self.push(bit)? {
                return Ok(Some(image));
            }
        }
        Ok(None)
    }

    /// Terminate the parse; errors if the stream ended mid-image.
    pub fn finish(self) -> Result<MemoryImage> {
        match self.state {
            State::Done(image) => Ok(image),
            _ => Err(Error::Length {
                expected: STREAM_BITS,
                actual: self.position,
            }),
        }
    }
}

/// Strict whole-stream parse: exactly 480 bits, sync aligned at offset 0.
pub fn deserialize(bits: &[bool]) -> Result<MemoryImage> {
    if bits.len() != STREAM_BITS {
        return Err(Error::Length {
            expected: STREAM_BITS,
            actual: bits.len(),
        });
    }
    let mut machine = Deserializer::new();
    if let Some(image) = machine.feed(bits)? {
        Ok(image)
    } else {
        machine.finish()
    }
}

/// Packs bits MSB-first into bytes, zero-padding the final byte.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &bit) in bits.iter().enumerate() {
        if bit {
            bytes[i / 8] |= 1 << (7 - i % 8);
        }
    }
    bytes
}

/// Unpacks bytes into bits, MSB-first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    let mut bits = Vec::with_capacity(bytes.len() * 8);
    for byte in bytes {
        for i in 0..8 {
            bits.push(byte >> (7 - i) & 1 == 1);
        }
    }
    bits
}
