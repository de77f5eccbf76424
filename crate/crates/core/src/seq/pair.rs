use super::EncodedSeq;

/// One candidate mapping: a read and the reference window around its seed
/// location.
///
/// The reference window is the anchored slice (same length as the read)
/// extended by `pad` bases on each side. `phi` is where the read's first base
/// falls on the accelerator's word-set coordinate grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairRecord {
    pub id: u64,
    pub read: EncodedSeq,
    pub ref_window: EncodedSeq,
    pub pad: usize,
    pub phi: u64,
    pub planted_edits: Option<u32>,
}

impl PairRecord {
    /// Builds a record, inferring `pad` from the length difference.
    ///
    /// Returns `None` when `|ref_window| - |read|` is negative or odd.
    pub fn new(id: u64, phi: u64, read: EncodedSeq, ref_window: EncodedSeq) -> Option<Self> {
        let diff = ref_window.len().checked_sub(read.len())?;
        if diff % 2 != 0 {
            return None;
        }
        Some(Self {
            id,
            read,
            ref_window,
            pad: diff / 2,
            phi,
            planted_edits: None,
        })
    }

    #[inline]
    pub fn read_len(&self) -> usize {
        self.read.len()
    }

    /// `ref_window[pad .. pad + L]`.
    pub fn anchored_slice(&self) -> EncodedSeq {
        self.ref_window.slice(self.pad, self.read.len())
    }
}
