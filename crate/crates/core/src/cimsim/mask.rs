/// Read-occupied bit range `[start, end)` inside one word-set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordSetMask {
    pub wordset: u64,
    pub start: usize,
    pub end: usize,
}

impl WordSetMask {
    pub fn is_set(&self, bit: usize) -> bool {
        (self.start..self.end).contains(&bit)
    }

    pub fn count(&self) -> usize {
        self.end - self.start
    }

    pub fn to_bit_string(&self, wordset_bits: usize) -> String {
        (0..wordset_bits).map(|b| if self.is_set(b) { '1' } else { '0' }).collect()
    }
}

/// Masks for every word-set touched by a read of `len` bases at `phi`.
pub fn build_read_mask(phi: u64, len: usize, wordset_bits: usize) -> Vec<WordSetMask> {
    assert!(wordset_bits > 0);
    let wb = wordset_bits as u64;
    let lo = 2 * phi;
    let hi = lo + 2 * len as u64;
    if lo == hi {
        return Vec::new();
    }
    (lo / wb..=(hi - 1) / wb)
        .map(|w| {
            let origin = w * wb;
            WordSetMask {
                wordset: w,
                start: (lo.max(origin) - origin) as usize,
                end: (hi.min(origin + wb) - origin) as usize,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn straddling_read() {
        let m = build_read_mask(10, 100, 128);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0], WordSetMask { wordset: 0, start: 20, end: 128 });
        assert_eq!(m[1], WordSetMask { wordset: 1, start: 0, end: 92 });
        assert!(m[0].to_bit_string(128).starts_with(&"0".repeat(20)));
        assert!(m[1].to_bit_string(128).ends_with(&"0".repeat(36)));
    }

    #[test]
    fn full_wordset() {
        let m = build_read_mask(0, 64, 128);
        assert_eq!(m, vec![WordSetMask { wordset: 0, start: 0, end: 128 }]);
        assert_eq!(m[0].to_bit_string(128), "1".repeat(128));
        assert!(build_read_mask(5, 0, 128).is_empty());
    }

    #[test]
    fn unmasked_bits_sum_to_read_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let phi = rng.gen_range(0..5000u64);
            let len = rng.gen_range(1..1000usize);
            let m = build_read_mask(phi, len, 128);
            // independent count: bits of each word-set inside [2phi, 2phi + 2len)
            let direct: usize = (0..(2 * (phi as usize + len)).div_ceil(128))
                .map(|w| (w * 128..w * 128 + 128).filter(|&b| b >= 2 * phi as usize && b < 2 * (phi as usize + len)).count())
                .sum();
            assert_eq!(m.iter().map(WordSetMask::count).sum::<usize>(), 2 * len);
            assert_eq!(direct, 2 * len);
            assert!(m.windows(2).all(|p| p[1].wordset == p[0].wordset + 1));
        }
    }
}
