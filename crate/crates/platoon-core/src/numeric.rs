//! Shared numerical routines: trapezoidal integration, linear
//! interpolation, and simple descriptive statistics.

use alloc::vec::Vec;

use crate::float;

/// Trapezoidal integral of `y` on a uniform grid with step `dt`.
pub fn trapz_uniform(y: &[f64], dt: f64) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let sum: f64 = y.iter().sum();
    dt * (sum - 0.5 * (y[0] + y[y.len() - 1]))
}

/// Trapezoidal integral of `y` over possibly non-uniform timestamps `t`.
pub fn trapz(t: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(t.len(), y.len());
    let mut acc = 0.0;
    for i in 1..t.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
    }
    acc
}

/// Cumulative trapezoidal integral, starting at zero.
pub fn cumtrapz(t: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(t.len(), y.len());
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
        out.push(acc);
    }
    out
}

/// Timestamps snap to knots within this tolerance during interpolation, so
/// that resampling onto an already-matching grid reproduces samples exactly.
const SNAP_TOL: f64 = 1e-9;

/// Piecewise-linear interpolation of `(xs, ys)` at `x`.
///
/// `xs` must be strictly increasing. Queries outside the range clamp to the
/// end values; queries within `SNAP_TOL` of a knot return that knot's value.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert!(!xs.is_empty());
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    // index of the first knot strictly greater than x
    let hi = xs.partition_point(|&knot| knot <= x);
    let lo = hi - 1;
    if (x - xs[lo]).abs() <= SNAP_TOL {
        return ys[lo];
    }
    if (xs[hi] - x).abs() <= SNAP_TOL {
        return ys[hi];
    }
    let frac = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + frac * (ys[hi] - ys[lo])
}

/// Arithmetic mean; zero for empty input.
pub fn mean(y: &[f64]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    y.iter().sum::<f64>() / y.len() as f64
}

/// Population standard deviation; zero for fewer than two samples.
pub fn population_std(y: &[f64]) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let m = mean(y);
    let var = y.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / y.len() as f64;
    float::sqrt(var)
}

/// Euclidean norm.
pub fn l2_norm(y: &[f64]) -> f64 {
    float::sqrt(y.iter().map(|&v| v * v).sum::<f64>())
}

/// Ordinary least-squares slope of `y` against `x`.
///
/// Returns `None` when fewer than two points are given or `x` has no
/// variance.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y.iter()) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Pearson correlation coefficient of two equal-length vectors.
///
/// Returns `None` when either vector has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y.iter()) {
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / float::sqrt(sxx * syy))
}

/// Median of the samples (average of the middle pair for even counts).
pub fn median(y: &[f64]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Centered moving average with a shrinking window at the edges.
///
/// `window` must be odd. With `window == 1` the input is returned unchanged.
pub fn moving_average(y: &[f64], window: usize) -> Vec<f64> {
    debug_assert!(window % 2 == 1);
    if window <= 1 || y.len() < 2 {
        return y.to_vec();
    }
    let half = window / 2;
    let n = y.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        out.push(y[lo..hi].iter().sum::<f64>() / (hi - lo) as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn trapz_of_line_is_exact() {
        // y = 2t on [0, 1] integrates to 1
        let t: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|&ti| 2.0 * ti).collect();
        assert_relative_eq!(trapz(&t, &y), 1.0, max_relative = 1e-12);
        assert_relative_eq!(trapz_uniform(&y, 0.1), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn cumtrapz_matches_trapz_prefixes() {
        let t = vec![0.0, 0.5, 1.2, 2.0];
        let y = vec![1.0, 3.0, 2.0, 5.0];
        let c = cumtrapz(&t, &y);
        assert_eq!(c[0], 0.0);
        assert_relative_eq!(c[3], trapz(&t, &y), max_relative = 1e-12);
    }

    #[test]
    fn interp_snaps_to_knots() {
        let xs = vec![0.0, 0.1, 0.2];
        let ys = vec![1.0, 2.0, 7.0];
        // 3 * 0.1 differs from 0.30000000000000004; snapping hides that noise
        assert_eq!(interp_linear(&xs, &ys, 0.1 + 1e-12), 2.0);
        assert_relative_eq!(interp_linear(&xs, &ys, 0.15), 4.5);
        // clamped outside the range
        assert_eq!(interp_linear(&xs, &ys, -1.0), 1.0);
        assert_eq!(interp_linear(&xs, &ys, 5.0), 7.0);
    }

    #[test]
    fn two_point_population_std() {
        assert_relative_eq!(population_std(&[19.0, 21.0]), 1.0);
    }

    #[test]
    fn pearson_perfect_affine() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|&v| 3.0 * v - 2.0).collect();
        assert_relative_eq!(pearson(&x, &y).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn pearson_zero_variance_is_none() {
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn slope_of_line() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y = vec![1.0, 1.5, 2.0, 2.5];
        assert_relative_eq!(least_squares_slope(&x, &y).unwrap(), 0.5);
    }

    #[test]
    fn moving_average_shrinks_at_edges() {
        let y = vec![0.0, 3.0, 6.0, 9.0, 12.0];
        let sm = moving_average(&y, 3);
        assert_relative_eq!(sm[0], 1.5); // mean of first two
        assert_relative_eq!(sm[2], 6.0);
        assert_relative_eq!(sm[4], 10.5);
    }
}
