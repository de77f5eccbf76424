use std::fmt;

use super::SeqError;

/// Bases per packed word.
const BASES_PER_WORD: usize = 32;

/// Canonical 2-bit code of an uppercase or lowercase nucleotide.
///
/// A=00, C=01, G=10, T=11.
#[inline]
pub fn encode_base(ch: u8) -> Option<u8> {
    match ch {
        b'A' | b'a' => Some(0b00),
        b'C' | b'c' => Some(0b01),
        b'G' | b'g' => Some(0b10),
        b'T' | b't' => Some(0b11),
        _ => None,
    }
}

#[inline]
pub fn decode_base(code: u8) -> u8 {
    b"ACGT"[(code & 0b11) as usize]
}

/// A DNA sequence packed at two bits per base.
///
/// Base `i` lives in word `i / 32` at bit offset `2 * (i % 32)`, so a window
/// of up to 32 bases can be pulled out as a single `u64` with the first base
/// in the lowest two bits. Bits beyond `2 * len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct EncodedSeq {
    len: usize,
    words: Vec<u64>,
}

impl EncodedSeq {
    pub fn encode(text: &str) -> Result<Self, SeqError> {
        Self::encode_bytes(text.as_bytes())
    }

    pub fn encode_bytes(text: &[u8]) -> Result<Self, SeqError> {
        let mut words = vec![0u64; text.len().div_ceil(BASES_PER_WORD)];
        for (i, &ch) in text.iter().enumerate() {
            let code = encode_base(ch).ok_or(SeqError::InvalidBase {
                position: i,
                ch: ch as char,
            })?;
            words[i / BASES_PER_WORD] |= (code as u64) << (2 * (i % BASES_PER_WORD));
        }
        Ok(Self {
            len: text.len(),
            words,
        })
    }

    /// Builds a sequence from 2-bit codes; only the low two bits of each code are used.
    pub fn from_codes(codes: &[u8]) -> Self {
        let mut words = vec![0u64; codes.len().div_ceil(BASES_PER_WORD)];
        for (i, &code) in codes.iter().enumerate() {
            words[i / BASES_PER_WORD] |= ((code & 0b11) as u64) << (2 * (i % BASES_PER_WORD));
        }
        Self {
            len: codes.len(),
            words,
        }
    }

    pub fn decode(&self) -> String {
        let bytes: Vec<u8> = self.codes().map(decode_base).collect();
        // every byte is one of ACGT
        String::from_utf8(bytes).expect("ascii")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The packed payload; trailing pad bits are zero.
    pub fn payload(&self) -> &[u64] {
        &self.words
    }

    /// 2-bit code of base `i`.
    #[inline]
    pub fn code(&self, i: usize) -> u8 {
        debug_assert!(i < self.len);
        ((self.words[i / BASES_PER_WORD] >> (2 * (i % BASES_PER_WORD))) & 0b11) as u8
    }

    pub fn codes(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.code(i))
    }

    /// Bit `k` of the sequence in reading order: bit `2i` is the high bit of
    /// base `i`, bit `2i + 1` its low bit. "ACGT" reads as 00 01 10 11.
    #[inline]
    pub fn bit(&self, k: usize) -> bool {
        let code = self.code(k / 2);
        if k.is_multiple_of(2) {
            code & 0b10 != 0
        } else {
            code & 0b01 != 0
        }
    }

    /// Up to 32 bases starting at `start`, first base in the low bits.
    ///
    /// Panics if the window runs past the end of the sequence.
    #[inline]
    pub fn window(&self, start: usize, n: usize) -> u64 {
        debug_assert!(n <= BASES_PER_WORD);
        assert!(start + n <= self.len, "window {start}+{n} past length {}", self.len);
        if n == 0 {
            return 0;
        }
        let w = start / BASES_PER_WORD;
        let off = 2 * (start % BASES_PER_WORD);
        let mut v = self.words[w] >> off;
        if off != 0 && w + 1 < self.words.len() {
            v |= self.words[w + 1] << (64 - off);
        }
        if n == BASES_PER_WORD {
            v
        } else {
            v & ((1u64 << (2 * n)) - 1)
        }
    }

    /// Whether `self[a..a+n] == other[b..b+n]`. Both ranges must be in bounds.
    pub fn range_eq(&self, a: usize, other: &EncodedSeq, b: usize, n: usize) -> bool {
        let mut done = 0;
        while done < n {
            let chunk = (n - done).min(BASES_PER_WORD);
            if self.window(a + done, chunk) != other.window(b + done, chunk) {
                return false;
            }
            done += chunk;
        }
        true
    }

    pub fn slice(&self, start: usize, n: usize) -> EncodedSeq {
        assert!(start + n <= self.len);
        let codes: Vec<u8> = (start..start + n).map(|i| self.code(i)).collect();
        Self::from_codes(&codes)
    }
}

impl fmt::Debug for EncodedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "EncodedSeq({})", self.decode())
        } else {
            write!(f, "EncodedSeq(len={})", self.len)
        }
    }
}

impl fmt::Display for EncodedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decode())
    }
}
