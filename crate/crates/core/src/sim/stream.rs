//! Incremental path generation.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{coarse_steps, ProcessSpec, StepDist};
use crate::error::Result;
use crate::math;
use crate::mgf::make_phi;

/// One grid point together with the left limit of `(X, V)` at that time.
///
/// For continuous paths the left limit equals the point. Between the
/// previous point and `(x_left, v_left)` the path moves linearly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub x_left: f64,
    pub v_left: f64,
}

impl PathPoint {
    pub(crate) fn continuous(t: f64, x: f64, v: f64) -> Self {
        PathPoint { t, x, v, x_left: x, v_left: v }
    }
}

/// Per-path RNG: stream `(path_index << 4) | substream` of the master seed.
pub(crate) fn path_rng(seed: u64, path_index: u64, substream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((path_index << 4) | substream);
    rng
}

/// Lazily generated path. Iterates from `t = 0` to the spec's horizon.
#[derive(Clone, Debug)]
pub struct PathStream {
    inner: Inner,
    started: bool,
}

#[derive(Clone, Debug)]
enum Inner {
    Steps(StepState),
    Poisson(PoissonState),
    Brownian(BrownianState),
    Exp { base: Box<Inner>, s: f64, phis: f64 },
}

#[derive(Clone, Debug)]
enum Increment {
    Bernoulli { p: f64 },
    Uniform,
    Custom { cdf: Vec<f64>, values: Vec<f64> },
    Lazy { p_move: f64, drift: f64 },
}

#[derive(Clone, Debug)]
struct StepState {
    rng: ChaCha8Rng,
    inc: Increment,
    mean: f64,
    i: u64,
    n: u64,
    x: f64,
    v_per_step: f64,
}

#[derive(Clone, Debug)]
struct PoissonState {
    rng: ChaCha8Rng,
    lambda: f64,
    horizon: f64,
    centered: bool,
    count: u64,
    last: f64,
    done: bool,
}

#[derive(Clone, Debug)]
struct BrownianState {
    /// `rngs[j]` feeds refinement level `j`; level 0 draws the coarse increments.
    rngs: Vec<ChaCha8Rng>,
    sqrt_dt: f64,
    refine: u32,
    coarse: u64,
    coarse_total: u64,
    h: f64,
    x: f64,
    buf: Vec<f64>,
    pos: usize,
}

impl PathStream {
    pub fn new(spec: &ProcessSpec, seed: u64, path_index: u64) -> Result<Self> {
        spec.validate()?;
        Ok(PathStream { inner: Inner::new(spec, seed, path_index), started: false })
    }

    /// Points up to and including the first one at or past `t_max`.
    pub fn take_until(&mut self, t_max: f64) -> impl Iterator<Item = PathPoint> + '_ {
        let mut done = false;
        core::iter::from_fn(move || {
            if done {
                return None;
            }
            let p = self.next()?;
            if p.t >= t_max {
                done = true;
            }
            Some(p)
        })
    }
}

impl Iterator for PathStream {
    type Item = PathPoint;

    #[inline]
    fn next(&mut self) -> Option<PathPoint> {
        if !self.started {
            self.started = true;
            return Some(self.inner.origin());
        }
        self.inner.next_point()
    }
}

impl Inner {
    fn new(spec: &ProcessSpec, seed: u64, idx: u64) -> Inner {
        match spec {
            ProcessSpec::IidSum { dist, n, v_per_step } => {
                let inc = match dist {
                    StepDist::Bernoulli { p } => Increment::Bernoulli { p: *p },
                    StepDist::Uniform => Increment::Uniform,
                    StepDist::BoundedCustom { values, probs } => {
                        let mut acc = 0.0;
                        let mut cdf: Vec<f64> = probs
                            .iter()
                            .map(|p| {
                                acc += p;
                                acc
                            })
                            .collect();
                        if let Some(last) = cdf.last_mut() {
                            *last = f64::INFINITY;
                        }
                        Increment::Custom { cdf, values: values.clone() }
                    }
                };
                Inner::Steps(StepState {
                    rng: path_rng(seed, idx, 0),
                    inc,
                    mean: dist.mean(),
                    i: 0,
                    n: *n,
                    x: 0.0,
                    v_per_step: *v_per_step,
                })
            }
            ProcessSpec::LazyWalk { p_move, drift, steps, v_per_step } => Inner::Steps(StepState {
                rng: path_rng(seed, idx, 0),
                inc: Increment::Lazy { p_move: *p_move, drift: *drift },
                mean: 0.0,
                i: 0,
                n: *steps,
                x: 0.0,
                v_per_step: *v_per_step,
            }),
            ProcessSpec::PoissonCounting { lambda, horizon, centered } => Inner::Poisson(PoissonState {
                rng: path_rng(seed, idx, 0),
                lambda: *lambda,
                horizon: *horizon,
                centered: *centered,
                count: 0,
                last: 0.0,
                done: false,
            }),
            ProcessSpec::Brownian { dt, horizon, refine } => {
                let fine = 1usize << refine;
                Inner::Brownian(BrownianState {
                    rngs: (0..=u64::from(*refine)).map(|j| path_rng(seed, idx, j)).collect(),
                    sqrt_dt: math::sqrt(*dt),
                    refine: *refine,
                    coarse: 0,
                    coarse_total: coarse_steps(*dt, *horizon),
                    h: dt / fine as f64,
                    x: 0.0,
                    buf: vec![0.0; fine + 1],
                    pos: fine + 1,
                })
            }
            ProcessSpec::ExpSupermartingale { base, s, phi } => {
                let phis = make_phi(*phi).and_then(|p| p.phi(*s)).unwrap_or(f64::NAN);
                Inner::Exp { base: Box::new(Inner::new(base, seed, idx)), s: *s, phis }
            }
        }
    }

    fn origin(&self) -> PathPoint {
        match self {
            Inner::Exp { .. } => PathPoint::continuous(0.0, 1.0, 0.0),
            _ => PathPoint::continuous(0.0, 0.0, 0.0),
        }
    }

    #[inline]
    fn next_point(&mut self) -> Option<PathPoint> {
        match self {
            Inner::Steps(st) => st.next_point(),
            Inner::Poisson(st) => st.next_point(),
            Inner::Brownian(st) => st.next_point(),
            Inner::Exp { base, s, phis } => {
                let p = base.next_point()?;
                Some(PathPoint {
                    t: p.t,
                    x: math::exp(*s * p.x - *phis * p.v),
                    v: p.v,
                    x_left: math::exp(*s * p.x_left - *phis * p.v_left),
                    v_left: p.v_left,
                })
            }
        }
    }
}

impl StepState {
    fn next_point(&mut self) -> Option<PathPoint> {
        if self.i >= self.n {
            return None;
        }
        let y = match &self.inc {
            Increment::Bernoulli { p } => {
                if self.rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Increment::Uniform => self.rng.random::<f64>() - 0.5,
            Increment::Custom { cdf, values } => {
                let u = self.rng.random::<f64>();
                let k = cdf.partition_point(|&c| c <= u);
                values[k.min(values.len() - 1)]
            }
            Increment::Lazy { p_move, drift } => {
                let u = self.rng.random::<f64>();
                let step = if u < 0.5 * p_move {
                    1.0
                } else if u < *p_move {
                    -1.0
                } else {
                    0.0
                };
                step + drift
            }
        };
        let x_left = self.x;
        let v_left = self.i as f64 * self.v_per_step;
        self.i += 1;
        self.x += y - self.mean;
        let t = self.i as f64;
        Some(PathPoint { t, x: self.x, v: t * self.v_per_step, x_left, v_left })
    }
}

impl PoissonState {
    fn level(&self, count: u64, t: f64) -> f64 {
        let n = count as f64;
        if self.centered {
            n - self.lambda * t
        } else {
            n
        }
    }

    fn next_point(&mut self) -> Option<PathPoint> {
        if self.done {
            return None;
        }
        let gap: f64 = Exp1.sample(&mut self.rng);
        let t = self.last + gap / self.lambda;
        if t < self.horizon {
            let x_left = self.level(self.count, t);
            self.count += 1;
            self.last = t;
            Some(PathPoint { t, x: self.level(self.count, t), v: t, x_left, v_left: t })
        } else {
            self.done = true;
            let h = self.horizon;
            Some(PathPoint::continuous(h, self.level(self.count, h), h))
        }
    }
}

impl BrownianState {
    #[inline]
    fn next_point(&mut self) -> Option<PathPoint> {
        let fine = 1usize << self.refine;
        if self.pos > fine {
            if self.coarse >= self.coarse_total {
                return None;
            }
            self.fill_interval();
            self.pos = 1;
        }
        let x = self.buf[self.pos];
        let idx = (self.coarse - 1) * fine as u64 + self.pos as u64;
        self.pos += 1;
        let t = idx as f64 * self.h;
        Some(PathPoint::continuous(t, x, t))
    }

    /// Draws the next coarse increment and the bridge midpoints inside it,
    /// level by level, so every level's stream is consumed in time order.
    fn fill_interval(&mut self) {
        let fine = 1usize << self.refine;
        let z: f64 = StandardNormal.sample(&mut self.rngs[0]);
        let next = self.x + self.sqrt_dt * z;
        self.buf[0] = self.x;
        self.buf[fine] = next;
        let mut span = fine;
        let mut len = self.h * fine as f64;
        for j in 1..=self.refine as usize {
            let half = span / 2;
            let sd = 0.5 * math::sqrt(len);
            let mut i = 0;
            while i < fine {
                let z: f64 = StandardNormal.sample(&mut self.rngs[j]);
                self.buf[i + half] = 0.5 * (self.buf[i] + self.buf[i + span]) + sd * z;
                i += span;
            }
            span = half;
            len *= 0.5;
        }
        self.x = next;
        self.coarse += 1;
    }
}
