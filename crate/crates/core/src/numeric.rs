//! Small shared numeric helpers: deterministic summation, bisection,
//! golden-section minimization, log-spaced sampling.

/// Deterministic pairwise summation (split at len/2). For power-of-two
/// lengths this reproduces the cube-sum tree of `CellMeasure` exactly.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Bisection for the root of a monotone non-increasing `f` with
/// `f(lo) ≥ 0 ≥ f(hi)`, to relative bracket width `rel_tol`.
/// Returns the upper end of the final bracket (where `f ≤ 0`).
pub fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    debug_assert!(lo > 0.0 && hi > lo);
    for _ in 0..200 {
        if (hi - lo) <= rel_tol * hi.abs().max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Golden-section minimization of `f` on `[a, b]`; returns `(x_min, f_min)`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a) > tol * (a.abs() + b.abs()).max(1.0) {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 { (x1, f1) } else { (x2, f2) }
}

/// `count` points log-spaced over `(lo, hi]`, excluding `lo` itself.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > lo && count >= 2);
    let (la, lb) = (lo.ln(), hi.ln());
    (1..=count)
        .map(|i| (la + (lb - la) * i as f64 / count as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn bisect_finds_sqrt() {
        // f(x) = 4 - x^2 is decreasing on [0, 10]
        let x = bisect_decreasing(|x| 4.0 - x * x, 1e-6, 10.0, 1e-12);
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn golden_section_parabola() {
        let (x, _) = golden_section_min(|x| (x - 3.0) * (x - 3.0), 0.0, 10.0, 1e-10);
        assert!((x - 3.0).abs() < 1e-7);
    }
}
