//! Per-path random streams.
//!
//! Each path draws from a ChaCha8 stream whose key comes from
//! `(master_seed, domain)` and whose stream id is the path index, so the
//! numbers a path sees never depend on which worker ran it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PathRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream for `path_index` under `master_seed`; `domain` separates
/// unrelated experiments sharing a master seed (e.g. different `n`).
pub fn path_rng(master_seed: u64, domain: u64, path_index: u64) -> PathRng {
    let mut key = [0u8; 32];
    let mut s = master_seed ^ splitmix(domain);
    for chunk in key.chunks_mut(8) {
        s = splitmix(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path_index);
    rng
}
