//! Shared numerical helpers: periodic geometry, compensated summation,
//! finite differences, scalar minimization and adaptive quadrature.

/// Half-width of the periodic domain (-1/2, 1/2].
pub const TORUS_HALF: f64 = 0.5;

/// Wrap a coordinate into (-1/2, 1/2].
pub fn periodic_wrap(x: f64) -> f64 {
    let mut y = x - x.round();
    if y <= -0.5 {
        y += 1.0;
    }
    y
}

/// Periodic distance between two torus points, in [0, 1/2].
pub fn periodic_distance(a: f64, b: f64) -> f64 {
    periodic_wrap(a - b).abs()
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Dot product with compensated accumulation.
pub fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Fourth-order central difference of a periodic cell-centered field.
pub fn derivative_periodic_4th(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "stencil needs at least 5 cells");
    let mut out = vec![0.0; n];
    for i in 0..n {
        let ip1 = f[(i + 1) % n];
        let ip2 = f[(i + 2) % n];
        let im1 = f[(i + n - 1) % n];
        let im2 = f[(i + n - 2) % n];
        out[i] = (-ip2 + 8.0 * ip1 - 8.0 * im1 + im2) / (12.0 * dx);
    }
    out
}

/// Minmod limiter: zero on opposite signs, otherwise the smaller magnitude.
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// n log-spaced points on [lo, hi], lo > 0.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let ratio = (hi / lo).ln();
    (0..n)
        .map(|i| lo * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Golden-section minimization of `f` on [a, b].
///
/// Stops when the bracket width falls below `rel_tol` relative to the larger
/// endpoint magnitude. Returns `(x_min, f_min)`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if (b - a).abs() <= rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 <= f2 {
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
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

const SIMPSON_MIN_DEPTH: u32 = 8;
const SIMPSON_MAX_DEPTH: u32 = 55;

/// Adaptive Simpson quadrature of `f` over [a, b] to a relative tolerance.
///
/// The minimum subdivision depth makes the estimate robust for integrands
/// with an interior jump (level-set truncations).
pub fn adaptive_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    // Coarse midpoint scan fixes the absolute tolerance scale.
    let n0 = 256;
    let h = (b - a) / n0 as f64;
    let coarse: f64 = (0..n0).map(|i| f(a + (i as f64 + 0.5) * h) * h).sum();
    let eps = rel_tol * coarse.abs().max(1e-14);

    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, fa, b, fb, m, fm, whole, eps, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= SIMPSON_MAX_DEPTH
        || (depth >= SIMPSON_MIN_DEPTH && delta.abs() <= 15.0 * eps)
    {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth + 1)
        + simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth + 1)
}

/// Linear interpolation of a sampled series (t, v) at time `t`.
/// Clamps outside the sampled range.
pub fn interp_series(series: &[(f64, f64)], t: f64) -> f64 {
    assert!(!series.is_empty());
    if t <= series[0].0 {
        return series[0].1;
    }
    if t >= series[series.len() - 1].0 {
        return series[series.len() - 1].1;
    }
    let idx = series.partition_point(|&(ti, _)| ti <= t);
    let (t0, v0) = series[idx - 1];
    let (t1, v1) = series[idx];
    if t1 <= t0 {
        return v0;
    }
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_lands_in_half_open_interval() {
        for &x in &[0.0, 0.5, -0.5, 0.75, -0.75, 3.25, -3.25, 1.0, -1.0] {
            let y = periodic_wrap(x);
            assert!(y > -0.5 && y <= 0.5, "wrap({x}) = {y}");
        }
        assert_eq!(periodic_wrap(0.5), 0.5);
        assert_eq!(periodic_wrap(-0.5), 0.5);
        assert_eq!(periodic_wrap(0.75), -0.25);
    }

    #[test]
    fn distance_is_symmetric_and_bounded() {
        let pts = [-0.49, -0.2, 0.0, 0.13, 0.5];
        for &a in &pts {
            for &b in &pts {
                let d = periodic_distance(a, b);
                assert!((0.0..=0.5).contains(&d));
                assert_eq!(d, periodic_distance(b, a));
            }
        }
        assert!((periodic_distance(0.45, -0.45) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn fourth_order_derivative_of_sine() {
        let n = 64;
        let dx = 1.0 / n as f64;
        let f: Vec<f64> = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * dx - 0.5;
                (2.0 * std::f64::consts::PI * x).sin()
            })
            .collect();
        let d = derivative_periodic_4th(&f, dx);
        let mut max_err: f64 = 0.0;
        for (i, di) in d.iter().enumerate() {
            let x = (i as f64 + 0.5) * dx - 0.5;
            let exact = 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x).cos();
            max_err = max_err.max((di - exact).abs());
        }
        // O(dx^4) with the (2*pi)^5/30 coefficient.
        assert!(max_err < 1e-4, "max_err = {max_err}");
    }

    #[test]
    fn golden_finds_quadratic_minimum() {
        // Location accuracy saturates near sqrt(machine eps); the value is
        // quadratically better.
        let (x, fx) = golden_min(|x| (x - 3.0) * (x - 3.0) + 1.0, 0.0, 10.0, 1e-12);
        assert!((x - 3.0).abs() < 1e-6, "x = {x}");
        assert!((fx - 1.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_integral_matches_closed_forms() {
        let v = adaptive_integral(&|x: f64| x.cos(), 0.0, 1.0, 1e-12);
        assert!((v - 1.0f64.sin()).abs() < 1e-11);
        // Discontinuous integrand: indicator of [0.3, 1].
        let v = adaptive_integral(&|x: f64| if x >= 0.3 { 2.0 } else { 0.0 }, 0.0, 1.0, 1e-10);
        assert!((v - 1.4).abs() < 1e-9, "v = {v}");
    }

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        let xs = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }
}
