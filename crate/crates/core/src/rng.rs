//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator. ChaCha is a
//! counter-based cipher: the 256-bit key is expanded from a 64-bit seed with
//! SplitMix64 and the 64-bit stream id selects an independent substream. A
//! substream is named by a `(tag, index)` pair, e.g. `("gaussian-row", 17)`,
//! which makes draws independent of the order in which workers consume them.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One SplitMix64 step; used for key expansion and stream-id mixing.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Derive a child seed from a parent seed and a label. Used to hand each
/// experiment seed its own problem and initialization seeds.
pub fn derive_seed(parent: u64, tag: &str, index: u64) -> u64 {
    let mut s = parent ^ fnv1a(tag).rotate_left(17) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    splitmix64(&mut s)
}

/// Generator for substream `(tag, index)` of `seed`.
pub fn stream(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut sid = fnv1a(tag) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    rng.set_stream(splitmix64(&mut sid));
    rng
}

/// Uniform sign in {-1, +1}.
pub fn sign<R: RngCore>(rng: &mut R) -> f64 {
    if rng.next_u64() >> 63 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Uniform draw in the open interval (0, 1), 53 bits of precision.
pub fn open01<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal pair by the Box–Muller transform of two open-interval
/// uniforms. Deterministic given the stream, unlike rejection samplers whose
/// draw count depends on the values.
pub fn normal_pair<R: RngCore>(rng: &mut R) -> (f64, f64) {
    let u1 = open01(rng);
    let u2 = open01(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// `n` standard normal draws.
pub fn normals<R: RngCore>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let (a, b) = normal_pair(rng);
        out.push(a);
        out.push(b);
    }
    out.truncate(n);
    out
}

/// Uniform permutation of `0..n` by Fisher–Yates.
pub fn permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}
