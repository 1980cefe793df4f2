//! Per-trial random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for trial `trial` of grid cell `cell`.
///
/// All estimators evaluated in one cell see the same draws.
pub fn trial_rng(seed: u64, cell: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((cell as u64) << 32) | (trial as u64 & 0xffff_ffff));
    rng
}
