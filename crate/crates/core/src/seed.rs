//! Deterministic seed derivation shared by the solvers and the Monte Carlo
//! harness. Seeds are a pure function of their inputs, so any trial or slot
//! can be reproduced in isolation regardless of worker count.

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a master seed and two indices
/// (typically trial number and lane).
pub fn derive_seed(master: u64, index: u64, lane: u64) -> u64 {
    let a = splitmix64(master ^ splitmix64(index.wrapping_add(1)));
    splitmix64(a ^ splitmix64(lane.wrapping_add(0x5151_5151_5151_5151)))
}
