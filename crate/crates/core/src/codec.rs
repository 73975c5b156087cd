//! Fixed-point quantization and bit-exact message accounting.
//!
//! Quantizers use uniform cells over `[lo, hi)` with floor indexing; values
//! outside the range are clamped first. Messages carry a [`BitString`]
//! payload and every protocol run produces a [`Transcript`] whose total
//! length is the communication cost of the run.

use std::fmt;

use crate::error::{invalid, Result};

/// Largest supported quantizer width. Cell indices beyond 2^52 are no longer
/// exactly representable as `f64` offsets.
pub const MAX_QUANTIZER_BITS: u32 = 52;

// ──────────────────────────────────────────────────────────────────────
// BitString
// ──────────────────────────────────────────────────────────────────────

/// An ordered sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Append the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for shift in (0..width).rev() {
            self.bits.push((value >> shift) & 1 == 1);
        }
    }

    /// Read `width` bits starting at `offset` as an unsigned integer.
    pub fn read_uint(&self, offset: usize, width: u32) -> Result<u64> {
        let end = offset + width as usize;
        if end > self.bits.len() || width > 64 {
            return Err(invalid(format!(
                "read of {width} bits at offset {offset} exceeds length {}",
                self.bits.len()
            )));
        }
        Ok(self.bits[offset..end]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
    }

    pub fn extend(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    /// Hexadecimal rendering, most significant bit first. The string is
    /// left-padded with zero bits to a multiple of four, so `len()` must be
    /// carried alongside to recover the exact payload.
    pub fn to_hex(&self) -> String {
        let pad = (4 - self.bits.len() % 4) % 4;
        let padded: Vec<bool> = std::iter::repeat(false)
            .take(pad)
            .chain(self.bits.iter().copied())
            .collect();
        padded
            .chunks(4)
            .map(|nibble| {
                let v = nibble.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
                char::from_digit(v, 16).expect("nibble < 16")
            })
            .collect()
    }

    /// Inverse of [`BitString::to_hex`] for a payload of `len` bits.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let mut all = Vec::with_capacity(hex.len() * 4);
        for ch in hex.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| invalid(format!("non-hex character {ch:?}")))?;
            for shift in (0..4).rev() {
                all.push((v >> shift) & 1 == 1);
            }
        }
        if len > all.len() || all.len() - len >= 4 {
            return Err(invalid(format!(
                "hex string of {} digits cannot hold exactly {len} bits",
                hex.len()
            )));
        }
        let pad = all.len() - len;
        if all[..pad].iter().any(|&b| b) {
            return Err(invalid("nonzero padding bits"));
        }
        Ok(Self {
            bits: all.split_off(pad),
        })
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}b:", self.bits.len())?;
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

// ──────────────────────────────────────────────────────────────────────
// Messages and transcripts
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Independent,
    Interactive,
}

impl ProtocolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Independent => "independent",
            ProtocolKind::Interactive => "interactive",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One message sent by `machine` (1-based) in `round` (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub machine: usize,
    pub round: u32,
    pub payload: BitString,
}

impl Message {
    pub fn new(machine: usize, round: u32, payload: BitString) -> Self {
        Self {
            machine,
            round,
            payload,
        }
    }
}

/// The ordered record of every message of one protocol run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub kind: ProtocolKind,
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn new(kind: ProtocolKind) -> Self {
        Self {
            kind,
            messages: Vec::new(),
        }
    }

    pub fn push(&mut self, message: Message) {
        self.messages.push(message);
    }

    pub fn total_bits(&self) -> u64 {
        transcript_total_bits(self)
    }

    /// Append the messages of `other`.
    pub fn concat(&mut self, other: &Transcript) {
        self.messages.extend(other.messages.iter().cloned());
    }

    /// Messages sent by `machine`, in order.
    pub fn messages_from(&self, machine: usize) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(move |msg| msg.machine == machine)
    }

    /// Check the structural invariants for a run over `machines` machines.
    pub fn validate(&self, machines: usize) -> Result<()> {
        let mut seen = vec![false; machines + 1];
        for msg in &self.messages {
            if msg.machine == 0 || msg.machine > machines {
                return Err(invalid(format!(
                    "message from machine {} outside 1..={machines}",
                    msg.machine
                )));
            }
            if msg.round == 0 {
                return Err(invalid("message round must be >= 1"));
            }
            if self.kind == ProtocolKind::Independent {
                if msg.round != 1 {
                    return Err(invalid("independent protocols use a single round"));
                }
                if std::mem::replace(&mut seen[msg.machine], true) {
                    return Err(invalid(format!(
                        "machine {} sent more than one independent message",
                        msg.machine
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Sum of payload lengths.
pub fn transcript_total_bits(t: &Transcript) -> u64 {
    t.messages.iter().map(|m| m.payload.len() as u64).sum()
}

// ──────────────────────────────────────────────────────────────────────
// Quantization
// ──────────────────────────────────────────────────────────────────────

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RoundingMode {
    /// Dequantize to the left edge of the cell.
    RoundDown,
    /// Dequantize to the cell midpoint.
    RoundNearest,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizerSpec {
    lo: f64,
    hi: f64,
    bits: u32,
    mode: RoundingMode,
}

impl QuantizerSpec {
    pub fn new(lo: f64, hi: f64, bits: u32, mode: RoundingMode) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(invalid(format!("quantizer range [{lo}, {hi}] is empty or non-finite")));
        }
        if bits > MAX_QUANTIZER_BITS {
            return Err(invalid(format!(
                "quantizer width {bits} exceeds {MAX_QUANTIZER_BITS} bits"
            )));
        }
        Ok(Self { lo, hi, bits, mode })
    }

    /// Quantizer on `[lo, hi]` with the fewest bits achieving cell width <= `eps`.
    pub fn with_accuracy(lo: f64, hi: f64, eps: f64, mode: RoundingMode) -> Result<Self> {
        Self::new(lo, hi, bits_for_accuracy(lo, hi, eps)?, mode)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mode(&self) -> RoundingMode {
        self.mode
    }

    pub fn cells(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn cell_width(&self) -> f64 {
        (self.hi - self.lo) / self.cells() as f64
    }

    pub fn quantize(&self, value: f64) -> Result<u64> {
        quantize(value, self)
    }

    pub fn dequantize(&self, index: u64) -> Result<f64> {
        dequantize(index, self)
    }

    /// Quantize then dequantize.
    pub fn round_trip(&self, value: f64) -> Result<f64> {
        self.dequantize(self.quantize(value)?)
    }
}

/// Smallest bit count whose uniform grid over `[lo, hi]` has cell width <= `eps`.
pub fn bits_for_accuracy(lo: f64, hi: f64, eps: f64) -> Result<u32> {
    if !lo.is_finite() || !hi.is_finite() || !eps.is_finite() {
        return Err(invalid("bits_for_accuracy requires finite arguments"));
    }
    if lo >= hi || eps <= 0.0 {
        return Err(invalid(format!(
            "bits_for_accuracy requires lo < hi and eps > 0 (got [{lo}, {hi}], eps={eps})"
        )));
    }
    let width = hi - lo;
    let ratio = width / eps;
    if ratio <= 1.0 {
        return Ok(0);
    }
    let mut bits = ratio.log2().ceil().max(0.0) as i64;
    // log2 rounding can be off by one near exact powers of two
    while width / (bits as f64).exp2() > eps {
        bits += 1;
    }
    while bits > 0 && width / ((bits - 1) as f64).exp2() <= eps {
        bits -= 1;
    }
    if bits > MAX_QUANTIZER_BITS as i64 {
        return Err(invalid(format!(
            "accuracy {eps} over width {width} needs {bits} bits (max {MAX_QUANTIZER_BITS})"
        )));
    }
    Ok(bits as u32)
}

/// Cell index of `value` after clamping it to `[lo, hi]`.
pub fn quantize(value: f64, spec: &QuantizerSpec) -> Result<u64> {
    if !value.is_finite() {
        return Err(invalid(format!("cannot quantize non-finite value {value}")));
    }
    let clamped = value.clamp(spec.lo, spec.hi);
    let cells = spec.cells();
    let scaled = (clamped - spec.lo) / (spec.hi - spec.lo) * cells as f64;
    let k = scaled.floor() as u64;
    Ok(k.min(cells - 1))
}

pub fn dequantize(index: u64, spec: &QuantizerSpec) -> Result<f64> {
    if index >= spec.cells() {
        return Err(invalid(format!(
            "cell index {index} out of range for {} bits",
            spec.bits
        )));
    }
    let w = spec.cell_width();
    let left = spec.lo + (spec.hi - spec.lo) * index as f64 / spec.cells() as f64;
    Ok(match spec.mode {
        RoundingMode::RoundDown => left,
        RoundingMode::RoundNearest => left + 0.5 * w,
    })
}

// ──────────────────────────────────────────────────────────────────────
// Improvement messages
// ──────────────────────────────────────────────────────────────────────

/// Width of a coordinate index field for dimension `d`: ⌈log₂ d⌉.
pub fn index_bits(d: usize) -> u32 {
    if d <= 1 {
        0
    } else {
        usize::BITS - (d - 1).leading_zeros()
    }
}

/// Frame an improvement list: all coordinate indices (⌈log₂ d⌉ bits each)
/// followed by all cell values (`value_bits` each).
pub fn encode_improvement_message(
    indices: &[usize],
    values: &[u64],
    d: usize,
    value_bits: u32,
) -> Result<BitString> {
    if indices.len() != values.len() {
        return Err(invalid(format!(
            "{} indices but {} values",
            indices.len(),
            values.len()
        )));
    }
    if value_bits > 64 {
        return Err(invalid("value fields are at most 64 bits"));
    }
    for (pos, &j) in indices.iter().enumerate() {
        if j >= d {
            return Err(invalid(format!("coordinate index {j} >= dimension {d}")));
        }
        if pos > 0 && indices[pos - 1] >= j {
            return Err(invalid("coordinate indices must be strictly increasing"));
        }
    }
    if value_bits < 64 {
        if let Some(&v) = values.iter().find(|&&v| v >> value_bits != 0) {
            return Err(invalid(format!("value {v} does not fit in {value_bits} bits")));
        }
    }
    let ib = index_bits(d);
    let mut out = BitString::new();
    for &j in indices {
        out.push_uint(j as u64, ib);
    }
    for &v in values {
        out.push_uint(v, value_bits);
    }
    Ok(out)
}

/// Inverse of [`encode_improvement_message`].
pub fn decode_improvement_message(
    payload: &BitString,
    d: usize,
    value_bits: u32,
) -> Result<(Vec<usize>, Vec<u64>)> {
    let ib = index_bits(d);
    let per_entry = (ib + value_bits) as usize;
    if payload.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    if per_entry == 0 || payload.len() % per_entry != 0 {
        return Err(invalid(format!(
            "payload of {} bits is not a whole number of {per_entry}-bit entries",
            payload.len()
        )));
    }
    let count = payload.len() / per_entry;
    let mut indices = Vec::with_capacity(count);
    for k in 0..count {
        let j = payload.read_uint(k * ib as usize, ib)? as usize;
        if j >= d || indices.last().is_some_and(|&prev| prev >= j) {
            return Err(invalid(format!("decoded index {j} is not a valid increasing index")));
        }
        indices.push(j);
    }
    let base = count * ib as usize;
    let values = (0..count)
        .map(|k| payload.read_uint(base + k * value_bits as usize, value_bits))
        .collect::<Result<Vec<_>>>()?;
    Ok((indices, values))
}
