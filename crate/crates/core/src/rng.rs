//! Seeded random streams.
//!
//! Every randomized component draws from xoshiro256** seeded with
//! `base_seed ^ role`, where `role` is one of the constants below, so that two
//! components given the same base seed never share a stream.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub type Rng = Xoshiro256StarStar;

pub const ROLE_RANDOM_ORDER: u64 = 0x7261_6e64_6f72_6465;
pub const ROLE_ANNEAL: u64 = 0x616e_6e65_616c_0001;
pub const ROLE_GENERATOR: u64 = 0x6766_6765_6e00_0002;
pub const ROLE_BENCH_RUN: u64 = 0x6265_6e63_6800_0003;

pub fn stream(base_seed: u64, role: u64) -> Rng {
    Rng::seed_from_u64(base_seed ^ role)
}

/// Seed of one benchmark run, independent of every other run.
pub fn run_seed(base_seed: u64, setting: usize, run: usize) -> u64 {
    let key = ((setting as u64) << 32) | run as u64;
    stream(base_seed ^ key, ROLE_BENCH_RUN).next_u64()
}
