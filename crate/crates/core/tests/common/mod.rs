#![allow(dead_code)]

use dmc_capacity::{Channel, Distribution};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Flat Dirichlet sample from normalized exponentials.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-12).collect();
    let s: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= s;
    }
    w
}

pub fn random_distribution(rng: &mut impl Rng, n: usize) -> Distribution {
    Distribution::new(random_weights(rng, n)).unwrap()
}

pub fn random_channel(rng: &mut impl Rng, inputs: usize, outputs: usize) -> Channel {
    let rows: Vec<Vec<f64>> = (0..inputs).map(|_| random_weights(rng, outputs)).collect();
    Channel::from_rows(&rows).unwrap()
}

/// Random channel with both dimensions drawn from `2..=max`.
pub fn random_sized_channel(rng: &mut impl Rng, max: usize) -> Channel {
    let n = rng.gen_range(2..=max);
    let m = rng.gen_range(2..=max);
    random_channel(rng, n, m)
}
