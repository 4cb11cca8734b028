//! Engines for two models of cumulative creativity.
//!
//! * [`evoc`] is an artificial society of stationary agents on a toroidal
//!   lattice that invent and imitate bodily actions. Actions can optionally
//!   be chained into multi-step sequences, and agents can optionally learn a
//!   movement trend that biases invention.
//! * [`focus`] layers periodic fitness shifts and per-agent adaptive
//!   mutation rates on top of the society.
//! * [`cgp`] is a Cartesian genetic programming engine whose programs paint
//!   an HSV image pixel by pixel.
//! * [`portrait`] evolves those programs toward a sitter image with a
//!   fitness function that swings between resemblance and painterly rules.
//!
//! The crate is `no_std` and only needs `alloc`. Everything stochastic takes
//! an explicit RNG so runs are reproducible from a single seed.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cgp;
pub mod color;
pub mod evoc;
pub mod focus;
pub mod portrait;

mod error;

pub use error::Error;

/// The PRNG used for every run. ChaCha8 is portable across platforms, so a
/// seed reproduces the same stream everywhere.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the run RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
