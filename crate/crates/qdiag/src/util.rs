//! Seed derivation shared by everything that draws random numbers.

/// SplitMix64 output function.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Substream seed for shard `index` of master `seed`:
/// `splitmix64(seed ^ splitmix64(index + 1))`. Recorded in result artifacts
/// so any shard can be replayed in isolation.
pub(crate) fn substream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}
