//! Small numerical helpers shared by the geometry and profile code.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Smallest `x` in `[lo, hi]` with `f(x) >= target` for nondecreasing `f`,
/// resolved by bisection until the bracket is narrower than `tol`.
pub fn invert_nondecreasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    if f(hi) < target {
        return hi;
    }
    // invariant: f(lo) < target <= f(hi)
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_and_trig() {
        let v = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(&|x: f64| x.sin().powi(2), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn inversion_finds_infimum_on_plateau() {
        // f = 0 on [0,1], then x - 1
        let f = |x: f64| (x - 1.0).max(0.0);
        let x = invert_nondecreasing(f, 0.0, 0.0, 3.0, 1e-13);
        assert_eq!(x, 0.0);
        let x = invert_nondecreasing(f, 0.5, 0.0, 3.0, 1e-13);
        assert!((x - 1.5).abs() < 1e-12);
    }
}
