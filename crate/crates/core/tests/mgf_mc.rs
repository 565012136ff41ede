//! Sampled moment generating functions against the built-in `φ` bounds.

use maxbound_core::mgf::{make_phi, PhiKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

const N: usize = 1_000_000;

/// Checks `mean(exp(s Y)) <= exp(v φ(s)) + 4 SE` for `Y` centered.
fn check(kind: PhiKind, v: f64, samples: &[f64], grid: &[f64]) {
    let phi = make_phi(kind).unwrap();
    for &s in grid {
        let e: Vec<f64> = samples.iter().map(|y| (s * y).exp()).collect();
        let n = e.len() as f64;
        let m = e.iter().sum::<f64>() / n;
        let var = e.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        let bound = (v * phi.phi(s).unwrap()).exp();
        assert!(m <= bound + 4.0 * (var / n).sqrt(), "{kind:?} at s = {s}: {m} vs {bound}");
    }
}

fn three_point(rng: &mut ChaCha8Rng) -> f64 {
    // -1, 0, 2 with probabilities 0.2, 0.7, 0.1: mean 0, variance 0.6
    let u: f64 = rng.random();
    if u < 0.2 {
        -1.0
    } else if u < 0.9 {
        0.0
    } else {
        2.0
    }
}

#[test]
fn sampled_mgfs_are_dominated() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let wide = [-3.0, -1.5, -0.5, 0.25, 0.5, 1.0, 1.5, 3.0];

    let g: Vec<f64> = (0..N).map(|_| Normal::new(0.0, 1.0).unwrap().sample(&mut rng)).collect();
    check(PhiKind::Gaussian { v: 1.0 }, 1.0, &g, &wide);

    let u: Vec<f64> = (0..N).map(|_| rng.random::<f64>() - 0.5).collect();
    check(PhiKind::Uniform24, 1.0, &u, &[-20.0, -5.0, -1.0, 1.0, 5.0, 20.0]);

    let mu = 0.3;
    let b: Vec<f64> = (0..N).map(|_| f64::from(rng.random::<f64>() < mu) - mu).collect();
    check(PhiKind::HoeffdingBernoulli { mu }, 1.0, &b, &wide);

    let lambda = 2.0;
    let pois = Poisson::new(lambda).unwrap();
    let p: Vec<f64> = (0..N).map(|_| pois.sample(&mut rng) - lambda).collect();
    check(PhiKind::PoissonCentered { lambda }, 1.0, &p, &wide);

    let t: Vec<f64> = (0..N).map(|_| three_point(&mut rng)).collect();
    // Bounded above only: the lower tail is not covered.
    check(PhiKind::Bennett { sigma2: 0.6, b: 2.0 }, 1.0, &t, &[0.25, 0.5, 1.0, 1.5, 3.0]);
    check(PhiKind::CbbExp { b: 2.0 }, 0.6, &t, &[0.25, 0.5, 1.0, 1.5]);
    check(PhiKind::Bernstein { b: 2.0 }, 0.6, &t, &[0.25, 0.5, 1.0, 1.4]);
}
