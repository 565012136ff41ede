//! Exact binomial confidence intervals.

use crate::error::{Error, Result};
use crate::math;

const CF_MAX_ITER: usize = 100_000;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Regularized incomplete beta `I_x(a, b)`.
pub fn inc_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = math::ln_gamma(a + b) - math::ln_gamma(a) - math::ln_gamma(b) + a * math::ln(x) + b * math::ln_1p(-x);
    // The continued fraction converges fast on this side of the mean.
    if x < (a + 1.0) / (a + b + 2.0) {
        math::exp(ln_front) * beta_cf(x, a, b) / a
    } else {
        1.0 - math::exp(ln_front) * beta_cf(1.0 - x, b, a) / b
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// `x` with `I_x(a, b) = q`, by bisection.
pub fn beta_quantile(q: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inc_beta(mid, a, b) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided Clopper-Pearson interval for `k` successes in `n` trials at
/// level `1 - alpha`.
pub fn clopper_pearson(k: u64, n: u64, alpha: f64) -> Result<(f64, f64)> {
    if n == 0 || k > n {
        return Err(Error::DomainViolation(alloc::format!("need 0 <= k <= n and n > 0, got k = {k}, n = {n}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::DomainViolation(alloc::format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (kf, nf) = (k as f64, n as f64);
    let half = 0.5 * alpha;
    let lo = if k == 0 {
        0.0
    } else if k == n {
        math::pow(half, 1.0 / nf)
    } else {
        beta_quantile(half, kf, nf - kf + 1.0)
    };
    let hi = if k == n {
        1.0
    } else if k == 0 {
        1.0 - math::pow(half, 1.0 / nf)
    } else {
        beta_quantile(1.0 - half, kf + 1.0, nf - kf)
    };
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn inc_beta_known_values() {
        // I_x(1, 1) = x; I_x(2, 3) = 1 - (1-x)^3 (1 + 3x).
        assert!(close(inc_beta(0.3, 1.0, 1.0), 0.3, 1e-14));
        let x: f64 = 0.4;
        assert!(close(inc_beta(x, 2.0, 3.0), 1.0 - (1.0 - x).powi(3) * (1.0 + 3.0 * x), 1e-13));
        assert!(close(inc_beta(0.5, 7.5, 7.5), 0.5, 1e-13));
    }

    #[test]
    fn clopper_pearson_oracle_values() {
        // Beta quantiles from an independent implementation.
        let cases = [
            (50, 100, 0.05, 0.398_321_129_503_301_06, 0.601_678_870_496_698_9),
            (3, 10, 0.05, 0.066_739_511_177_734_47, 0.652_452_850_059_997_3),
            (1, 1000, 0.01, 5.012_529_260_777_506e-6, 0.007_406_286_938_352_937),
            (999, 1000, 0.01, 0.992_593_713_061_647, 0.999_994_987_470_739_2),
            (7, 20, 0.1, 0.177_310_917_574_449_14, 0.558_034_511_315_488_8),
            (123, 50_000, 0.01, 0.001_926_727_406_022_404_3, 0.003_090_176_766_714_785),
        ];
        for (k, n, alpha, lo, hi) in cases {
            let (l, h) = clopper_pearson(k, n, alpha).unwrap();
            assert!(close(l, lo, 1e-9), "k={k} n={n}: lo {l} vs {lo}");
            assert!(close(h, hi, 1e-9), "k={k} n={n}: hi {h} vs {hi}");
        }
    }

    #[test]
    fn clopper_pearson_edges() {
        let (lo, hi) = clopper_pearson(0, 100, 0.10).unwrap();
        assert_eq!(lo, 0.0);
        assert!(close(hi, 0.029_513_049_607_039_9, 1e-12));
        assert!(close(hi, 1.0 - 0.05f64.powf(0.01), 1e-15));
        let (lo, hi) = clopper_pearson(100, 100, 0.10).unwrap();
        assert_eq!(hi, 1.0);
        assert!(close(lo, 0.05f64.powf(0.01), 1e-15));
    }

    #[test]
    fn clopper_pearson_rejects_bad_input() {
        assert!(clopper_pearson(5, 4, 0.05).is_err());
        assert!(clopper_pearson(0, 0, 0.05).is_err());
        assert!(clopper_pearson(1, 4, 1.0).is_err());
    }
}
