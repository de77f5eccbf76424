use super::tcam::TcamTables;

/// One comparison handed to a sub-array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepInput {
    /// `2T` XOR bits; base `k` contributes bits `2k` and `2k + 1`.
    pub operand: u128,
    /// Bases whose reference cell lies outside the window.
    pub invalid: u64,
    /// Bases that belong to the read.
    pub mask: u64,
    pub id: u32,
}

/// Collapses bit pairs into a base vector, masks it and runs PD then OS.
pub fn subarray_step(input: StepInput, t: usize, tcam: &TcamTables) -> (bool, u32) {
    let mut base_vec = 0u64;
    for k in 0..t {
        let pair = (input.operand >> (2 * k)) & 0b11;
        base_vec |= ((pair != 0) as u64) << k;
    }
    base_vec = (base_vec | input.invalid) & input.mask;
    let hits = tcam.pd_lookup(base_vec);
    (tcam.os_lookup(hits), input.id)
}
