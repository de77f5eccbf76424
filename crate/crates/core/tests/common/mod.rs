#![allow(dead_code)]

use segsift::seq::{EncodedSeq, PairRecord};

/// Two-row Levenshtein over bytes.
pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, &x) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, &y) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

pub fn pair(phi: u64, read: &str, window: &str) -> PairRecord {
    PairRecord::new(0, phi, EncodedSeq::encode(read).unwrap(), EncodedSeq::encode(window).unwrap()).unwrap()
}

pub fn slice_string(p: &PairRecord) -> String {
    p.anchored_slice().decode()
}
