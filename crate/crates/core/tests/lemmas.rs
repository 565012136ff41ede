//! Elementary inequalities behind the built-in `φ` functions.

use maxbound_core::mgf::{make_phi, PhiKind};

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

#[test]
fn uniform_mgf_is_dominated() {
    let phi = make_phi(PhiKind::Uniform24).unwrap();
    for s in grid(-50.0, 50.0, 10_000) {
        let h = 0.5 * s;
        let lhs = if h == 0.0 { 0.0 } else { (h.sinh() / h).ln() };
        assert!(lhs <= phi.phi(s).unwrap() + 1e-15, "s = {s}");
    }
}

#[test]
fn cbb_auxiliary_bound() {
    for s in grid(1e-4, 3.0 - 1e-4, 10_000) {
        let g = (s.exp_m1() - s) / (s * s);
        assert!(g <= 1.0 / (2.0 * (1.0 - s / 3.0)), "s = {s}");
    }
}

#[test]
fn sub_gaussian_auxiliary_bound() {
    for s in grid(1e-4, 1.75, 10_000) {
        assert!(s.exp_m1() - s <= s * s, "s = {s}");
    }
}
