//! Helpers shared by the integration suites.

use woodbury::generate::{gen_conditioned, GenSpec, Regime};
use woodbury::matrix::ComplexMatrix;
use woodbury::rng::CounterRng;
use woodbury::update::UpdateInstance;

/// Deterministic dimension mix for a seeded pool: spans tall, wide, and
/// square shapes, partial and full rank, and r in {1, 2, 5}.
pub fn pool_spec(seed: u64, max_dim: usize, regime: Regime) -> GenSpec {
    let mut dice = CounterRng::new(seed ^ 0xD1CE);
    let m = 2 + (dice.next_u64() % (max_dim as u64 - 1)) as usize;
    let n = 2 + (dice.next_u64() % (max_dim as u64 - 1)) as usize;
    let rank = 1 + (dice.next_u64() % m.min(n) as u64) as usize;
    let r = [1, 2, 5][(seed % 3) as usize];
    GenSpec {
        m,
        n,
        r,
        rank,
        regime,
        seed,
        scale: 0.5,
    }
}

pub fn conditioned_pool(seeds: std::ops::RangeInclusive<u64>, max_dim: usize) -> Vec<UpdateInstance> {
    seeds
        .map(|seed| gen_conditioned(&pool_spec(seed, max_dim, Regime::Conditioned)).unwrap())
        .collect()
}

/// Max entrywise relative difference used by the "matches entrywise" checks:
/// `max |x_ij - y_ij| / max(1, max |y_ij|)`.
pub fn entrywise_rel_diff(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    assert_eq!(x.shape(), y.shape());
    let scale = y.max_abs().max(1.0);
    x.sub(y).max_abs() / scale
}
