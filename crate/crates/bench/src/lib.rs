//! Shared fixtures for the benchmarks.

use disksep::geom::TolerancePolicy;
use disksep::instance::{generate_random_instance, Instance};

/// Deterministic instance at roughly constant disk density.
pub fn fixture(n: usize, k: usize, seed: u64) -> Instance {
    let tol = TolerancePolicy::default();
    let box_size = ((n as f64) * std::f64::consts::PI / 1.6).sqrt();
    generate_random_instance(n, k, box_size, seed, &tol).expect("fixture generates")
}
