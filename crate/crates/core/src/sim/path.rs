use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::stream::{PathPoint, PathStream};
use super::ProcessSpec;
use crate::error::{Error, Result};
use crate::math;
use crate::mgf::MgfBound;

/// How a path moves between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Right-continuous and piecewise constant in both `X` and `V`.
    Step,
    /// Continuous, linear between grid points.
    Linear,
    /// Jumps at grid points, linear in between; left limits are stored.
    Jump,
}

/// A sampled trajectory with its variance proxy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub vproxy: Vec<f64>,
    pub interpolation: Interpolation,
    /// Left limits of `X` for [`Interpolation::Jump`] paths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_values: Option<Vec<f64>>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid points with left limits, in time order.
    pub fn points(&self) -> impl Iterator<Item = PathPoint> + '_ {
        (0..self.len()).map(move |i| {
            let (t, x, v) = (self.times[i], self.values[i], self.vproxy[i]);
            let (x_left, v_left) = match self.interpolation {
                Interpolation::Linear => (x, v),
                Interpolation::Step if i > 0 => (self.values[i - 1], self.vproxy[i - 1]),
                Interpolation::Step => (x, v),
                Interpolation::Jump => (self.left_values.as_ref().map_or(x, |l| l[i]), v),
            };
            PathPoint { t, x, v, x_left, v_left }
        })
    }

    pub fn last_value(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Checks the structural invariants: strictly increasing times from 0,
    /// matching lengths, non-decreasing variance proxy.
    pub fn check(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyPath);
        }
        let n = self.len();
        if self.values.len() != n || self.vproxy.len() != n || self.left_values.as_ref().is_some_and(|l| l.len() != n) {
            return Err(Error::InvalidSpec("path columns have different lengths".into()));
        }
        if self.times[0] != 0.0 {
            return Err(Error::InvalidSpec("path must start at t = 0".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpec("path times must be strictly increasing".into()));
        }
        if self.vproxy.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpec("variance proxy must be non-decreasing".into()));
        }
        Ok(())
    }
}

fn interpolation_of(spec: &ProcessSpec) -> Interpolation {
    match spec {
        ProcessSpec::IidSum { .. } | ProcessSpec::LazyWalk { .. } => Interpolation::Step,
        ProcessSpec::Brownian { .. } => Interpolation::Linear,
        ProcessSpec::PoissonCounting { .. } => Interpolation::Jump,
        ProcessSpec::ExpSupermartingale { base, .. } => interpolation_of(base),
    }
}

/// Simulates one path. Identical `(spec, seed, path_index)` give identical paths.
pub fn generate(spec: &ProcessSpec, seed: u64, path_index: u64) -> Result<Path> {
    let stream = PathStream::new(spec, seed, path_index)?;
    let interpolation = interpolation_of(spec);
    let mut path = Path {
        times: Vec::new(),
        values: Vec::new(),
        vproxy: Vec::new(),
        interpolation,
        left_values: (interpolation == Interpolation::Jump).then(Vec::new),
    };
    for p in stream {
        path.times.push(p.t);
        path.values.push(p.x);
        path.vproxy.push(p.v);
        if let Some(l) = path.left_values.as_mut() {
            l.push(p.x_left);
        }
    }
    Ok(path)
}

/// `Y_t = exp(s X_t - φ(s) V_t)` on the same grid.
pub fn transform_exp_martingale(path: &Path, s: f64, phi: &MgfBound) -> Result<Path> {
    let phis = phi.phi(s)?;
    let f = |x: f64, v: f64| math::exp(s * x - phis * v);
    let values = path.values.iter().zip(&path.vproxy).map(|(&x, &v)| f(x, v)).collect();
    let left_values = path
        .left_values
        .as_ref()
        .map(|l| l.iter().zip(&path.vproxy).map(|(&x, &v)| f(x, v)).collect());
    Ok(Path {
        times: path.times.clone(),
        values,
        vproxy: path.vproxy.clone(),
        interpolation: path.interpolation,
        left_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgf::{make_phi, PhiKind};
    use crate::sim::StepDist;
    use alloc::boxed::Box;

    fn brownian(dt: f64, horizon: f64, refine: u32) -> ProcessSpec {
        ProcessSpec::Brownian { dt, horizon, refine }
    }

    #[test]
    fn generation_is_deterministic() {
        let specs = [
            brownian(0.01, 1.0, 2),
            ProcessSpec::PoissonCounting { lambda: 2.0, horizon: 5.0, centered: true },
            ProcessSpec::IidSum { dist: StepDist::Uniform, n: 50, v_per_step: 1.0 },
        ];
        for spec in &specs {
            let a = generate(spec, 42, 7).unwrap();
            let b = generate(spec, 42, 7).unwrap();
            assert_eq!(a, b);
            a.check().unwrap();
            assert_ne!(a, generate(spec, 42, 8).unwrap());
        }
    }

    #[test]
    fn bernoulli_increments_are_centered() {
        let p = 0.3;
        let path = generate(&ProcessSpec::IidSum { dist: StepDist::Bernoulli { p }, n: 200, v_per_step: 1.0 }, 1, 0).unwrap();
        assert_eq!(path.values[0], 0.0);
        for w in path.values.windows(2) {
            let d = w[1] - w[0];
            assert!((d + p).abs() < 1e-12 || (d - (1.0 - p)).abs() < 1e-12, "{d}");
        }
        assert_eq!(path.vproxy[200], 200.0);
    }

    #[test]
    fn brownian_grid_size() {
        let path = generate(&brownian(0.25, 1.0, 0), 3, 0).unwrap();
        assert_eq!(path.len(), 5);
        assert_eq!(path.times, [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(path.vproxy, path.times);
    }

    #[test]
    fn refinement_keeps_coarse_points() {
        let coarse = generate(&brownian(0.1, 2.0, 0), 9, 4).unwrap();
        for r in 1..4u32 {
            let fine = generate(&brownian(0.1, 2.0, r), 9, 4).unwrap();
            let stride = 1usize << r;
            assert_eq!(fine.len(), (coarse.len() - 1) * stride + 1);
            for (i, &x) in coarse.values.iter().enumerate() {
                assert_eq!(fine.values[i * stride], x);
            }
        }
    }

    #[test]
    fn poisson_path_shape() {
        let spec = ProcessSpec::PoissonCounting { lambda: 2.0, horizon: 10.0, centered: false };
        let path = generate(&spec, 5, 0).unwrap();
        assert_eq!(*path.times.last().unwrap(), 10.0);
        let jumps = path.len() - 2;
        assert_eq!(path.values[path.len() - 1], jumps as f64);
        let left = path.left_values.as_ref().unwrap();
        for (x, l) in path.values.iter().zip(left).skip(1).take(jumps) {
            assert_eq!(x - l, 1.0);
        }
    }

    #[test]
    fn exp_supermartingale_starts_at_one() {
        let spec = ProcessSpec::ExpSupermartingale {
            base: Box::new(brownian(0.01, 1.0, 0)),
            s: 1.3,
            phi: PhiKind::Gaussian { v: 1.0 },
        };
        let path = generate(&spec, 11, 0).unwrap();
        assert_eq!(path.values[0], 1.0);
        let base = generate(&brownian(0.01, 1.0, 0), 11, 0).unwrap();
        let phi = make_phi(PhiKind::Gaussian { v: 1.0 }).unwrap();
        let direct = transform_exp_martingale(&base, 1.3, &phi).unwrap();
        assert_eq!(path, direct);
    }

    #[test]
    fn zero_tilt_is_constant() {
        let base = generate(&ProcessSpec::PoissonCounting { lambda: 1.0, horizon: 4.0, centered: true }, 2, 0).unwrap();
        let phi = make_phi(PhiKind::PoissonCentered { lambda: 1.0 }).unwrap();
        let y = transform_exp_martingale(&base, 0.0, &phi).unwrap();
        assert!(y.values.iter().all(|&v| v == 1.0));
        assert!(y.left_values.unwrap().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn transform_rejects_out_of_domain_tilt() {
        let base = generate(&brownian(0.1, 1.0, 0), 2, 0).unwrap();
        let phi = make_phi(PhiKind::Bernstein { b: 1.0 }).unwrap();
        assert!(transform_exp_martingale(&base, 3.0, &phi).is_err());
    }
}
