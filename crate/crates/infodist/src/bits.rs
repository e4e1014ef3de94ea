//! Finite binary strings and the primitive codes built on them.
//!
//! [`BitString`] is the universal representation of items, stimuli,
//! responses and programs throughout the crate. The text form used in
//! every file and CLI surface is the character `b` followed by `0`/`1`
//! digits, so the empty string serializes as `"b"` and never as an
//! ambiguous empty CSV field.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An immutable-by-convention sequence of bits.
///
/// Ordering is shortlex (length first, then lexicographic), which gives
/// enumeration-friendly, deterministic iteration orders in maps.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    /// The empty bit string.
    pub fn new() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parse from bare `0`/`1` digits, e.g. `"01011"`.
    pub fn from_bits_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "bit strings may only contain 0 and 1, got {c:?}"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }

    /// Parse the file/CLI text form: `b` followed by digits.
    pub fn parse_text(s: &str) -> Result<Self> {
        match s.strip_prefix('b') {
            Some(rest) => Self::from_bits_str(rest),
            None => Err(Error::InvalidInput(format!(
                "bit string text form must start with 'b', got {s:?}"
            ))),
        }
    }

    /// The text form: `b` followed by digits (`"b"` for the empty string).
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.len() + 1);
        s.push('b');
        for &bit in &self.bits {
            s.push(if bit { '1' } else { '0' });
        }
        s
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn prefix(&self, n: usize) -> BitString {
        BitString {
            bits: self.bits[..n.min(self.len())].to_vec(),
        }
    }

    /// True if `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len() <= other.len() && self.bits == other.bits[..self.len()]
    }

    /// Bitwise exclusive-or of two equal-length strings.
    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(BitString {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a ^ b)
                .collect(),
        })
    }

    /// Every bit flipped.
    pub fn complement(&self) -> BitString {
        BitString {
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    /// Pack into bytes: one leading byte holding the count of zero pad
    /// bits (0-7), then the bits most-significant-bit first, zero-padded
    /// at the end.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let pad = (8 - self.len() % 8) % 8;
        let mut out = Vec::with_capacity(1 + self.len().div_ceil(8));
        out.push(pad as u8);
        let mut cur = 0u8;
        let mut filled = 0u8;
        for &bit in &self.bits {
            cur = (cur << 1) | u8::from(bit);
            filled += 1;
            if filled == 8 {
                out.push(cur);
                cur = 0;
                filled = 0;
            }
        }
        if filled > 0 {
            out.push(cur << (8 - filled));
        }
        out
    }

    /// Inverse of [`BitString::to_packed_bytes`].
    pub fn from_packed_bytes(bytes: &[u8]) -> Result<BitString> {
        let (&pad, data) = bytes
            .split_first()
            .ok_or_else(|| Error::InvalidInput("packed bit string is empty".into()))?;
        if pad > 7 {
            return Err(Error::InvalidInput(format!(
                "packed bit string pad byte {pad} exceeds 7"
            )));
        }
        if data.is_empty() && pad != 0 {
            return Err(Error::InvalidInput(
                "packed bit string has pad bits but no data".into(),
            ));
        }
        let total = data.len() * 8 - pad as usize;
        let mut bits = Vec::with_capacity(total);
        for (i, &byte) in data.iter().enumerate() {
            let take = if i + 1 == data.len() { 8 - pad as usize } else { 8 };
            for k in 0..take {
                bits.push(byte & (0x80 >> k) != 0);
            }
        }
        Ok(BitString { bits })
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitString::parse_text(s)
    }
}

/// All bit strings of length 0..=`max_len` in shortlex order; the
/// standard desk-scale item domain.
pub fn all_strings_up_to(max_len: usize) -> Vec<BitString> {
    assert!(max_len < 32, "domain of 2^{max_len} strings is not desk-scale");
    let mut out = Vec::new();
    for len in 0..=max_len {
        for v in 0..(1u64 << len) {
            let mut s = BitString::new();
            for k in (0..len).rev() {
                s.push(v & (1 << k) != 0);
            }
            out.push(s);
        }
    }
    out
}

/// All bit strings of exactly `len` bits in lexicographic order.
pub fn all_strings_of_len(len: usize) -> Vec<BitString> {
    assert!(len < 32, "domain of 2^{len} strings is not desk-scale");
    let mut out = Vec::new();
    for v in 0..(1u64 << len) {
        let mut s = BitString::new();
        for k in (0..len).rev() {
            s.push(v & (1 << k) != 0);
        }
        out.push(s);
    }
    out
}

/// Length in bits of the Elias gamma code for `n`.
pub fn gamma_len(n: u64) -> u32 {
    assert!(n >= 1, "gamma code is defined for positive integers");
    2 * n.ilog2() + 1
}

/// Elias gamma code: `floor(log2 n)` zeros followed by the binary
/// expansion of `n`.
pub fn gamma_encode(n: u64) -> BitString {
    assert!(n >= 1, "gamma code is defined for positive integers");
    let width = n.ilog2() + 1;
    let mut bits = Vec::with_capacity(2 * width as usize - 1);
    bits.resize(width as usize - 1, false);
    for k in (0..width).rev() {
        bits.push(n & (1 << k) != 0);
    }
    BitString { bits }
}

/// Decode an Elias gamma code from the start of `s`, returning the value
/// and the number of bits consumed.
pub fn gamma_decode(s: &BitString) -> Result<(u64, usize)> {
    let mut zeros = 0usize;
    loop {
        match s.get(zeros) {
            Some(false) => zeros += 1,
            Some(true) => break,
            None => {
                return Err(Error::MalformedCode(
                    "gamma code ended before its leading 1".into(),
                ))
            }
        }
        if zeros >= 64 {
            return Err(Error::MalformedCode("gamma code value exceeds 64 bits".into()));
        }
    }
    let mut n = 1u64;
    for k in 0..zeros {
        let bit = s.get(zeros + 1 + k).ok_or_else(|| {
            Error::MalformedCode("gamma code ended inside its value bits".into())
        })?;
        n = (n << 1) | u64::from(bit);
    }
    Ok((n, 2 * zeros + 1))
}

/// Elias delta code: gamma code of `floor(log2 n) + 1`, then the binary
/// expansion of `n` without its leading 1.
pub fn delta_encode(n: u64) -> BitString {
    assert!(n >= 1, "delta code is defined for positive integers");
    let width = n.ilog2() + 1;
    let mut out = gamma_encode(u64::from(width));
    for k in (0..width - 1).rev() {
        out.push(n & (1 << k) != 0);
    }
    out
}

/// Decode an Elias delta code from the start of `s`.
pub fn delta_decode(s: &BitString) -> Result<(u64, usize)> {
    let (width, used) = gamma_decode(s)?;
    if width > 64 {
        return Err(Error::MalformedCode("delta code value exceeds 64 bits".into()));
    }
    let mut n = 1u64;
    for k in 0..width - 1 {
        let bit = s.get(used + k as usize).ok_or_else(|| {
            Error::MalformedCode("delta code ended inside its value bits".into())
        })?;
        n = (n << 1) | u64::from(bit);
    }
    Ok((n, used + width as usize - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        BitString::from_bits_str(s).unwrap()
    }

    #[test]
    fn xor_paper_strings() {
        let x = bs("01011");
        let y = bs("10001");
        let z = x.xor(&y).unwrap();
        assert_eq!(z, bs("11010"));
        // z recovers either operand from the other
        assert_eq!(z.xor(&y).unwrap(), x);
        assert_eq!(z.xor(&x).unwrap(), y);
    }

    #[test]
    fn xor_empty() {
        assert_eq!(BitString::new().xor(&BitString::new()).unwrap(), BitString::new());
    }

    #[test]
    fn xor_length_mismatch() {
        let err = bs("01").xor(&bs("011")).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(bs("01011").complement(), bs("10100"));
        assert_eq!(BitString::new().complement(), BitString::new());
        assert_eq!(bs("1111").complement(), bs("0000"));
        assert_eq!(bs("1111").complement().complement(), bs("1111"));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_encode(1), bs("1"));
        assert_eq!(gamma_encode(5), bs("00101"));
        assert_eq!(gamma_encode(6), bs("00110"));
        let (n, used) = gamma_decode(&bs("0011001011")).unwrap();
        assert_eq!((n, used), (6, 5));
    }

    #[test]
    fn gamma_malformed() {
        assert!(gamma_decode(&bs("000")).is_err());
        assert!(gamma_decode(&bs("001")).is_err());
        assert!(gamma_decode(&BitString::new()).is_err());
    }

    #[test]
    fn gamma_round_trip_dense() {
        for n in 1..=(1u64 << 20) {
            let code = gamma_encode(n);
            assert_eq!(code.len(), gamma_len(n) as usize);
            let (m, used) = gamma_decode(&code).unwrap();
            assert_eq!((m, used), (n, code.len()));
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_encode(1), bs("1"));
        assert_eq!(delta_encode(2), bs("0100"));
        assert_eq!(delta_encode(3), bs("0101"));
        assert_eq!(delta_encode(4), bs("01100"));
        for n in 1..50_000 {
            let code = delta_encode(n);
            assert_eq!(delta_decode(&code).unwrap(), (n, code.len()));
        }
    }

    #[test]
    fn pack_examples() {
        assert_eq!(bs("0100101").to_packed_bytes(), vec![0x01, 0x4A]);
        assert_eq!(BitString::new().to_packed_bytes(), vec![0x00]);
        let x = bs("1100000000000");
        assert_eq!(BitString::from_packed_bytes(&x.to_packed_bytes()).unwrap(), x);
    }

    #[test]
    fn unpack_malformed() {
        assert!(BitString::from_packed_bytes(&[8, 0xFF]).is_err());
        assert!(BitString::from_packed_bytes(&[]).is_err());
        assert!(BitString::from_packed_bytes(&[3]).is_err());
    }

    #[test]
    fn text_form() {
        assert_eq!(BitString::new().to_text(), "b");
        assert_eq!(bs("010").to_text(), "b010");
        assert_eq!(BitString::parse_text("b010").unwrap(), bs("010"));
        assert_eq!(BitString::parse_text("b").unwrap(), BitString::new());
        assert!(BitString::parse_text("010").is_err());
        assert!(BitString::parse_text("b012").is_err());
    }

    #[test]
    fn shortlex_order() {
        let mut v = vec![bs("10"), bs("1"), bs("0"), BitString::new(), bs("01")];
        v.sort();
        assert_eq!(v, vec![BitString::new(), bs("0"), bs("1"), bs("01"), bs("10")]);
    }

    proptest! {
        #[test]
        fn xor_involution_and_self_annihilation(bits in proptest::collection::vec(any::<bool>(), 0..64),
                                                other in proptest::collection::vec(any::<bool>(), 0..64)) {
            let x = BitString::from_bools(bits);
            let zeroed = x.xor(&x).unwrap();
            prop_assert_eq!(zeroed.bits(), vec![false; x.len()]);
            if other.len() == x.len() {
                let y = BitString::from_bools(other);
                prop_assert_eq!(x.xor(&y).unwrap().xor(&y).unwrap(), x);
            }
        }

        #[test]
        fn pack_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..4096)) {
            let x = BitString::from_bools(bits);
            prop_assert_eq!(BitString::from_packed_bytes(&x.to_packed_bytes()).unwrap(), x);
        }

        #[test]
        fn text_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..128)) {
            let x = BitString::from_bools(bits);
            prop_assert_eq!(BitString::parse_text(&x.to_text()).unwrap(), x);
        }
    }
}
