//! Reproducible random streams.
//!
//! A session's stream is ChaCha8 keyed by the master seed (expanded with
//! `SeedableRng::seed_from_u64`) and positioned on the ChaCha stream id equal
//! to the session index. Distinct indices never share keystream, so sessions
//! can run in any order or concurrently and still replay bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SessionRng = ChaCha8Rng;

pub fn session_stream(seed: u64, session_index: u64) -> SessionRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(session_index);
    rng
}
