#![allow(dead_code)]

use floatloc::Instance;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Instance with a random offset, length in `length`, bump count in `bumps`
/// and floating count in `floating`; bumps uniform inside the interval.
pub fn random_instance(
    rng: &mut impl Rng,
    length: (f64, f64),
    bumps: (usize, usize),
    floating: (usize, usize),
) -> Instance {
    let lower = rng.gen_range(-1000.0..1000.0);
    let ls = rng.gen_range(length.0..=length.1);
    let upper = lower + ls;
    let nb = rng.gen_range(bumps.0..=bumps.1);
    let nf = rng.gen_range(floating.0..=floating.1);
    let positions: Vec<f64> = (0..nb)
        .map(|_| loop {
            let b = rng.gen_range(lower..upper);
            if b > lower {
                break b;
            }
        })
        .collect();
    Instance::new(lower, upper, positions, nf).expect("generated instance is valid")
}

/// Bracket lengths of an instance, independent of the library's partition.
pub fn areas_of(instance: &Instance) -> Vec<f64> {
    instance.walls().windows(2).map(|w| w[1] - w[0]).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
